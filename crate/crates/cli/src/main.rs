use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use symsep::povm::Family;
use symsep::reproduce::{self, Target};
use symsep::state::{self, DensityMatrix};
use symsep::sweep;
use symsep::{CriterionReport, SymmetricPovm};

const EXIT_ENTANGLED: u8 = 2;

#[derive(Parser)]
#[command(name = "symsep", version, about = "Entanglement detection with symmetric (N,M)-POVMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a pinned example configuration and emit CSV plus a JSON bundle.
    Reproduce {
        /// example1, example2, example3 or appendixA
        target: Target,
        /// Directory for bundle.json and the per-case CSV files; stdout gets the bundle otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a one-parameter state family on [0, 1] and locate the threshold.
    Sweep {
        /// JSON state file (mixed with white noise, param p) or builtin:tiles|isotropic|rho1|be
        #[arg(long)]
        state: String,
        #[arg(long, value_parser = parse_shape)]
        povm: (usize, usize),
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_parser = parse_reals, allow_hyphen_values = true, default_value = "")]
        a: Reals,
        #[arg(long, value_parser = parse_reals, allow_hyphen_values = true, default_value = "")]
        b: Reals,
        /// p, q or lambda; must match the state family
        #[arg(long)]
        param: String,
        /// Equal-entry vectors mu,nu,l in place of --a/--b.
        #[arg(long, value_parser = parse_baseline)]
        baseline: Option<(f64, f64, usize)>,
        #[arg(long, default_value_t = sweep::GRID_POINTS)]
        points: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a state file; exit 0 inconclusive, 2 entangled, 1 error.
    Evaluate {
        #[arg(long)]
        state: PathBuf,
        /// N,M for every party, or once per party.
        #[arg(long, value_parser = parse_shape, required = true)]
        povm: Vec<(usize, usize)>,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_parser = parse_reals, allow_hyphen_values = true, default_value = "")]
        a: Reals,
        #[arg(long, value_parser = parse_reals, allow_hyphen_values = true, default_value = "")]
        b: Reals,
        /// Party q (1-based) of the bipartition A_q | rest for three or more parties.
        #[arg(long, default_value_t = 1)]
        party: usize,
    },
    /// Print a POVM as JSON.
    PovmInfo {
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = parse_shape)]
        povm: (usize, usize),
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
}

#[derive(Clone, Debug)]
struct Reals(Vec<f64>);

fn parse_reals(s: &str) -> std::result::Result<Reals, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Reals)
}

fn parse_shape(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, m) = s.split_once(',').ok_or("expected N,M")?;
    let n = n.trim().parse().map_err(|e| format!("N: {e}"))?;
    let m = m.trim().parse().map_err(|e| format!("M: {e}"))?;
    Ok((n, m))
}

fn parse_baseline(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [mu, nu, l] = parts.as_slice() else {
        return Err("expected mu,nu,l".into());
    };
    Ok((
        mu.parse().map_err(|e| format!("mu: {e}"))?,
        nu.parse().map_err(|e| format!("nu: {e}"))?,
        l.parse().map_err(|e| format!("l: {e}"))?,
    ))
}

/// GSIC or MUM form when both POVMs belong to that family, general form otherwise.
fn evaluate_auto(
    rho: &DensityMatrix,
    pa: &SymmetricPovm,
    pb: &SymmetricPovm,
    a: &[f64],
    b: &[f64],
) -> symsep::Result<CriterionReport> {
    match (pa.family(), pb.family()) {
        (Family::Gsic, Family::Gsic) => symsep::evaluate_gsic(rho, pa, pb, a, b),
        (Family::Mum, Family::Mum) => symsep::evaluate_mum(rho, pa, pb, a, b),
        _ => symsep::evaluate_bipartite(rho, pa, pb, a, b),
    }
}

enum SweepState {
    Noise(DensityMatrix),
    Isotropic,
    Rho1,
}

impl SweepState {
    fn parse(spec: &str) -> Result<Self> {
        Ok(match spec.strip_prefix("builtin:") {
            Some("tiles") => SweepState::Noise(state::tiles_ppt_state()),
            Some("be") => SweepState::Noise(state::bound_entangled_be()),
            Some("isotropic") => SweepState::Isotropic,
            Some("rho1") => SweepState::Rho1,
            Some(other) => bail!("unknown builtin state {other:?}; expected tiles, isotropic, rho1 or be"),
            None => SweepState::Noise(read_state(&PathBuf::from(spec))?),
        })
    }

    fn param(&self) -> &'static str {
        match self {
            SweepState::Noise(_) => "p",
            SweepState::Isotropic => "q",
            SweepState::Rho1 => "lambda",
        }
    }

    fn dims(&self) -> Vec<usize> {
        match self {
            SweepState::Noise(rho) => rho.dims().to_vec(),
            _ => vec![3, 3],
        }
    }

    fn at(&self, v: f64) -> symsep::Result<DensityMatrix> {
        match self {
            SweepState::Noise(rho) => state::white_noise_mix(rho, v),
            SweepState::Isotropic => state::isotropic(3, v),
            SweepState::Rho1 => state::rho1(v),
        }
    }
}

fn read_state(path: &PathBuf) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DensityMatrix::from_json(&text).with_context(|| format!("parsing state {}", path.display()))
}

fn povms_for(dims: &[usize], shapes: &[(usize, usize)], t: f64) -> Result<Vec<SymmetricPovm>> {
    if shapes.len() != 1 && shapes.len() != dims.len() {
        bail!("{} --povm flags for {} parties", shapes.len(), dims.len());
    }
    dims.iter()
        .enumerate()
        .map(|(i, &d)| {
            let (n, m) = shapes[if shapes.len() == 1 { 0 } else { i }];
            SymmetricPovm::canonical(d, n, m, t).with_context(|| format!("POVM for party {}", i + 1))
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Reproduce { target, out } => {
            let bundle = reproduce::reproduce(target)?;
            if let Some(note) = bundle.note {
                eprintln!("note: {note}");
            }
            match out {
                Some(dir) => {
                    bundle.write_to(&dir)?;
                    for case in &bundle.cases {
                        let th = case.threshold.map_or("none".to_string(), |v| format!("{v:.6}"));
                        println!("{}: threshold {th}, margin at 1 {:.6e}", case.name, case.margin_at_1);
                    }
                }
                None => println!("{}", serde_json::to_string_pretty(&bundle)?),
            }
        }
        Command::Sweep {
            state,
            povm,
            t,
            a,
            b,
            param,
            baseline,
            points,
            out,
        } => {
            let family = SweepState::parse(&state)?;
            if param != family.param() {
                bail!("state {state:?} is swept in {:?}, not {param:?}", family.param());
            }
            let dims = family.dims();
            if dims.len() != 2 {
                bail!("sweep needs a bipartite state, got dims {dims:?}");
            }
            let povms = povms_for(&dims, &[povm], t)?;
            let grid = sweep::uniform_grid(0.0, 1.0, points);
            let result = sweep::sweep(&param, &grid, |v| {
                let rho = family.at(v)?;
                match baseline {
                    Some((mu, nu, l)) => {
                        symsep::evaluate_baseline_equal_entries(&rho, &povms[0], &povms[1], mu, nu, l)
                    }
                    None => evaluate_auto(&rho, &povms[0], &povms[1], &a.0, &b.0),
                }
            })?;
            let csv = result.to_csv();
            match out {
                Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            match result.threshold {
                Some(v) => eprintln!("threshold {param} = {v:.10}"),
                None => eprintln!(
                    "no verdict change on the grid (margin {:.6e} at 0, {:.6e} at 1)",
                    result.rows.first().map_or(f64::NAN, |r| r.margin),
                    result.rows.last().map_or(f64::NAN, |r| r.margin)
                ),
            }
        }
        Command::Evaluate {
            state,
            povm,
            t,
            a,
            b,
            party,
        } => {
            let rho = read_state(&state)?;
            let povms = povms_for(rho.dims(), &povm, t)?;
            let report = match povms.len() {
                0 | 1 => bail!("state has a single party; dims {:?}", rho.dims()),
                2 => evaluate_auto(&rho, &povms[0], &povms[1], &a.0, &b.0)?,
                _ => symsep::evaluate_multipartite(&rho, &povms, party, &a.0, &b.0)?,
            };
            let report = report.with_state(state.display().to_string());
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.entangled {
                return Ok(ExitCode::from(EXIT_ENTANGLED));
            }
        }
        Command::PovmInfo { d, povm, t } => {
            let p = SymmetricPovm::canonical(d, povm.0, povm.1, t)?;
            println!("{}", serde_json::to_string_pretty(&p.export())?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
