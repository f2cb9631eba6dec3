//! Pinned configurations of the worked qutrit examples.
//!
//! Each target sweeps one state family over `[0, 1]` for one or more POVM
//! families at `t = 0.01`, once with the free vectors `a`, `b` and once with
//! the equal-entry baseline, and locates the detection threshold of each.
//! The basis groupings are the explicit ones listed with the examples, not
//! the library's canonical chunking.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::basis::{GellMann, OperatorBasisLayout};
use crate::criterion::{self, CriterionReport};
use crate::povm::SymmetricPovm;
use crate::state::{self, DensityMatrix};
use crate::sweep::{self, RootInfo, SweepResult};
use crate::{Error, Result};

pub const T_REFERENCE: f64 = 0.01;

/// Reading of the fifth Tiles vector printed with a `|3⟩` component.
pub const TILES_NOTE: &str = "the fifth product vector of the Tiles state is taken as \
(|0>+|1>+|2>)/sqrt(3) (x) (|0>+|1>+|2>)/sqrt(3); the listing writes |3>, which does not exist in a qutrit";

/// The three qutrit POVM families used by the examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QutritFamily {
    /// (N, M) = (8, 2)
    #[serde(rename = "(8,2)")]
    Pairs,
    /// (N, M) = (1, 9), GSIC
    #[serde(rename = "(1,9)")]
    Gsic,
    /// (N, M) = (4, 3), MUM
    #[serde(rename = "(4,3)")]
    Mum,
}

impl QutritFamily {
    pub const ALL: [QutritFamily; 3] = [QutritFamily::Pairs, QutritFamily::Gsic, QutritFamily::Mum];

    pub fn shape(self) -> (usize, usize) {
        match self {
            QutritFamily::Pairs => (8, 2),
            QutritFamily::Gsic => (1, 9),
            QutritFamily::Mum => (4, 3),
        }
    }

    fn slug(self) -> &'static str {
        match self {
            QutritFamily::Pairs => "n8m2",
            QutritFamily::Gsic => "n1m9",
            QutritFamily::Mum => "n4m3",
        }
    }

    /// Grouping exactly as listed for this family.
    pub fn reference_layout(self) -> OperatorBasisLayout {
        use GellMann::{Antisymmetric as Y, Diagonal as D, Symmetric as X};
        let x01 = X { j: 0, k: 1 };
        let x02 = X { j: 0, k: 2 };
        let x12 = X { j: 1, k: 2 };
        let y01 = Y { j: 0, k: 1 };
        let y02 = Y { j: 0, k: 2 };
        let y12 = Y { j: 1, k: 2 };
        let d1 = D { l: 1 };
        let d2 = D { l: 2 };
        let groups = match self {
            QutritFamily::Pairs => [x01, y01, x02, y02, x12, y12, d1, d2]
                .iter()
                .map(|g| vec![*g])
                .collect(),
            QutritFamily::Gsic => vec![vec![d1, x01, x02, y01, d2, x12, y02, y12]],
            QutritFamily::Mum => vec![vec![x01, y01], vec![x02, y02], vec![x12, y12], vec![d1, d2]],
        };
        OperatorBasisLayout::from_labels(3, groups).expect("reference groupings are complete")
    }

    pub fn povm(self, t: f64) -> Result<SymmetricPovm> {
        SymmetricPovm::build(&self.reference_layout(), t)
    }
}

impl fmt::Display for QutritFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, m) = self.shape();
        write!(f, "({n},{m})")
    }
}

/// One-parameter state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFamily {
    /// `(1−p)/9 I + p ρ_tiles`, parameter `p`.
    Tiles,
    /// Isotropic qutrit pair, parameter `q`.
    Isotropic,
    /// `λ|ω_1⟩⟨ω_1| + (1−λ)ρ_BE`, parameter `lambda`.
    Rho1,
}

impl StateFamily {
    pub fn param(self) -> &'static str {
        match self {
            StateFamily::Tiles => "p",
            StateFamily::Isotropic => "q",
            StateFamily::Rho1 => "lambda",
        }
    }

    pub fn state(self, value: f64) -> Result<DensityMatrix> {
        match self {
            StateFamily::Tiles => state::white_noise_mix(&state::tiles_ppt_state(), value),
            StateFamily::Isotropic => state::isotropic(3, value),
            StateFamily::Rho1 => state::rho1(value),
        }
    }
}

/// Equal-entry vectors `a = μ(1,…,1)`, `b = ν(1,…,1)` of length `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Baseline {
    pub mu: f64,
    pub nu: f64,
    pub l: usize,
}

/// Criterion evaluated by a case.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Vectors {
    Enhanced { a: Vec<f64>, b: Vec<f64> },
    Baseline(Baseline),
}

/// Report of the criterion matching `family`: general form for (8,2), GSIC
/// form for (1,9), MUM form for (4,3).
pub fn evaluate_family(
    family: QutritFamily,
    rho: &DensityMatrix,
    povm: &SymmetricPovm,
    vectors: &Vectors,
) -> Result<CriterionReport> {
    match vectors {
        Vectors::Baseline(bl) => {
            criterion::evaluate_baseline_equal_entries(rho, povm, povm, bl.mu, bl.nu, bl.l)
        }
        Vectors::Enhanced { a, b } => match family {
            QutritFamily::Pairs => criterion::evaluate_bipartite(rho, povm, povm, a, b),
            QutritFamily::Gsic => criterion::evaluate_gsic(rho, povm, povm, a, b),
            QutritFamily::Mum => criterion::evaluate_mum(rho, povm, povm, a, b),
        },
    }
}

/// A single sweep: state family, POVM family and vectors.
#[derive(Debug, Clone, Serialize)]
pub struct CaseConfig {
    pub state: StateFamily,
    pub family: QutritFamily,
    pub grouping: Vec<Vec<GellMann>>,
    pub t: f64,
    pub vectors: Vectors,
}

impl CaseConfig {
    pub fn name(&self) -> String {
        let kind = match self.vectors {
            Vectors::Enhanced { .. } => "enhanced",
            Vectors::Baseline(_) => "baseline",
        };
        format!("{}_{}_{}", self.state.param(), self.family.slug(), kind)
    }

    pub fn margin(&self, value: f64) -> Result<CriterionReport> {
        let povm = self.family.povm(self.t)?;
        let rho = self.state.state(value)?;
        evaluate_family(self.family, &rho, &povm, &self.vectors)
    }

    pub fn run(&self, grid: &[f64]) -> Result<SweepResult> {
        let povm = self.family.povm(self.t)?;
        sweep::sweep(self.state.param(), grid, |v| {
            let rho = self.state.state(v)?;
            evaluate_family(self.family, &rho, &povm, &self.vectors)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Example1,
    Example2,
    Example3,
    #[serde(rename = "appendixA")]
    AppendixA,
}

impl Target {
    pub const ALL: [Target; 4] = [Target::Example1, Target::Example2, Target::Example3, Target::AppendixA];

    fn spec(self) -> (StateFamily, &'static [QutritFamily], Vec<f64>, Vec<f64>, Baseline) {
        const WIDE_A: [f64; 2] = [0.1, 0.1];
        const WIDE_B: [f64; 2] = [0.05, 0.051];
        const WIDE_BASE: Baseline = Baseline { mu: 0.1, nu: 0.05, l: 2 };
        match self {
            Target::Example1 => (
                StateFamily::Tiles,
                &[QutritFamily::Pairs],
                WIDE_A.to_vec(),
                WIDE_B.to_vec(),
                WIDE_BASE,
            ),
            Target::AppendixA => (
                StateFamily::Tiles,
                &[QutritFamily::Gsic, QutritFamily::Mum],
                WIDE_A.to_vec(),
                WIDE_B.to_vec(),
                WIDE_BASE,
            ),
            Target::Example2 => (
                StateFamily::Isotropic,
                &QutritFamily::ALL,
                WIDE_A.to_vec(),
                WIDE_B.to_vec(),
                WIDE_BASE,
            ),
            Target::Example3 => (
                StateFamily::Rho1,
                &QutritFamily::ALL,
                vec![0.005, 0.005],
                vec![0.005, 0.0051],
                Baseline { mu: 0.005, nu: 0.005, l: 2 },
            ),
        }
    }

    /// Enhanced and baseline case for every POVM family of the target.
    pub fn cases(self) -> Vec<CaseConfig> {
        let (state, families, a, b, baseline) = self.spec();
        let mut out = Vec::new();
        for &family in families {
            let grouping = family.reference_layout().labels().to_vec();
            for vectors in [
                Vectors::Enhanced { a: a.clone(), b: b.clone() },
                Vectors::Baseline(baseline),
            ] {
                out.push(CaseConfig {
                    state,
                    family,
                    grouping: grouping.clone(),
                    t: T_REFERENCE,
                    vectors,
                });
            }
        }
        out
    }

    pub fn note(self) -> Option<&'static str> {
        match self {
            Target::Example1 | Target::AppendixA => Some(TILES_NOTE),
            _ => None,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Example1 => "example1",
            Target::Example2 => "example2",
            Target::Example3 => "example3",
            Target::AppendixA => "appendixA",
        })
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "example1" => Ok(Target::Example1),
            "example2" => Ok(Target::Example2),
            "example3" => Ok(Target::Example3),
            "appendixa" => Ok(Target::AppendixA),
            _ => Err(format!(
                "unknown target {s:?}; expected example1, example2, example3 or appendixA"
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub config: CaseConfig,
    pub csv: String,
    pub threshold: Option<f64>,
    pub root: Option<RootInfo>,
    pub margin_at_0: f64,
    pub margin_at_1: f64,
    #[serde(skip)]
    pub sweep: SweepResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct Bundle {
    pub target: Target,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
    pub grid: GridSpec,
    pub cases: Vec<CaseResult>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub bisection_tol: f64,
}

pub fn reproduce(target: Target) -> Result<Bundle> {
    let grid_spec = GridSpec {
        lo: 0.0,
        hi: 1.0,
        points: sweep::GRID_POINTS,
        bisection_tol: sweep::BISECTION_TOL,
    };
    let grid = sweep::uniform_grid(grid_spec.lo, grid_spec.hi, grid_spec.points);
    let cases = target
        .cases()
        .into_iter()
        .map(|config| {
            let result = config.run(&grid)?;
            let name = config.name();
            Ok(CaseResult {
                csv: format!("{name}.csv"),
                name,
                threshold: result.threshold,
                root: result.root,
                margin_at_0: result.rows.first().map_or(f64::NAN, |r| r.margin),
                margin_at_1: result.rows.last().map_or(f64::NAN, |r| r.margin),
                config,
                sweep: result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Bundle {
        target,
        note: target.note(),
        grid: grid_spec,
        cases,
    })
}

impl Bundle {
    /// Writes `bundle.json` and one CSV per case into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for case in &self.cases {
            std::fs::write(dir.join(&case.csv), case.sweep.to_csv())?;
        }
        let json = serde_json::to_string_pretty(self).map_err(Error::Json)?;
        std::fs::write(dir.join("bundle.json"), json + "\n")?;
        Ok(())
    }

    pub fn case(&self, family: QutritFamily, baseline: bool) -> Option<&CaseResult> {
        self.cases.iter().find(|c| {
            c.config.family == family && matches!(c.config.vectors, Vectors::Baseline(_)) == baseline
        })
    }
}
