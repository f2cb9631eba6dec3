//! Correlation-matrix separability criteria.
//!
//! For local (N,M)-POVMs on each side, `P` collects the joint probabilities
//! `tr[(E_{α,k} ⊗ E_{β,l}) ρ]`, `τ` and `σ` the local outcome probabilities,
//! and for arbitrary real vectors `a`, `b`
//!
//! ```text
//! Q_{a,b}(ρ) = [ a bᵀ   a σᵀ ]
//!              [ τ bᵀ   P    ]
//! ```
//!
//! Every separable state satisfies `‖Q_{a,b}‖_tr ≤ √(|a|² + C_A) √(|b|² + C_B)`
//! with `C_X = (d_X−1)(M_X² x_X + d_X²)/(d_X M_X (M_X−1))`, the pure-state
//! bound on the local coincidence index. A positive margin therefore
//! certifies entanglement; a non-positive one is inconclusive.
//!
//! Rows and columns are flattened α outer, k inner; for several parties the
//! lower-numbered party is the more significant digit.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg::{self, CMatrix};
use crate::povm::{self, Family, SymmetricPovm};
use crate::state::DensityMatrix;
use crate::{Error, Result};

/// Real matrix of joint outcome probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub entries: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm_real(&self.entries)
    }
}

/// Local outcome probabilities of one POVM, α outer, k inner.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalVector {
    pub entries: Vec<f64>,
}

impl MarginalVector {
    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }
}

/// `Q_{a,b}` together with the vectors that bordered it.
#[derive(Debug, Clone)]
pub struct AugmentedMatrix {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

impl AugmentedMatrix {
    /// The lower-right block, i.e. `P`.
    pub fn p_block(&self) -> DMatrix<f64> {
        let (r, c) = self.matrix.shape();
        self.matrix
            .view((self.a.len(), self.b.len()), (r - self.a.len(), c - self.b.len()))
            .into_owned()
    }

    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm_real(&self.matrix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Theorem1,
    Gsic,
    Mum,
    Baseline,
    Theorem2,
}

/// Parameters of one local POVM as echoed in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PovmParams {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub t: f64,
    pub x: f64,
}

impl PovmParams {
    pub fn new(d: usize, n: usize, m: usize, t: f64) -> Self {
        Self {
            d,
            n,
            m,
            t,
            x: povm::x_of_t(d, m, t),
        }
    }

    /// `(d−1)(M²x + d²)/(d M (M−1))`.
    pub fn local_factor(&self) -> f64 {
        povm::coincidence_bound(self.d, self.m, self.x)
    }
}

impl From<&SymmetricPovm> for PovmParams {
    fn from(p: &SymmetricPovm) -> Self {
        Self {
            d: p.d(),
            n: p.n(),
            m: p.m(),
            t: p.t(),
            x: p.x(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub povm: Vec<PovmParams>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bipartition_q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    pub trace_norm: f64,
    pub bound: f64,
    pub margin: f64,
    pub entangled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CriterionReport {
    fn new(
        criterion: Criterion,
        povm: Vec<PovmParams>,
        a: &[f64],
        b: &[f64],
        trace_norm: f64,
        bound: f64,
    ) -> Self {
        let margin = trace_norm - bound;
        Self {
            criterion,
            povm,
            a: a.to_vec(),
            b: b.to_vec(),
            bipartition_q: None,
            state: None,
            trace_norm,
            bound,
            margin,
            entangled: margin > 0.0,
            note: None,
        }
    }

    pub fn with_state(mut self, descriptor: impl Into<String>) -> Self {
        self.state = Some(descriptor.into());
        self
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn bipartite_dims(rho: &DensityMatrix, pa: &SymmetricPovm, pb: &SymmetricPovm) -> Result<()> {
    let ok = match rho.dims() {
        [da, db] => *da == pa.d() && *db == pb.d(),
        [n] => *n == pa.d() * pb.d(),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "state dims {:?} vs POVM dimensions ({}, {})",
            rho.dims(),
            pa.d(),
            pb.d()
        )))
    }
}

/// `P_{(α,k),(β,l)} = tr[(E_{α,k} ⊗ E_{β,l}) ρ]`.
pub fn probability_matrix(
    povm_a: &SymmetricPovm,
    povm_b: &SymmetricPovm,
    rho: &DensityMatrix,
) -> Result<CorrelationMatrix> {
    bipartite_dims(rho, povm_a, povm_b)?;
    let ea: Vec<&CMatrix> = povm_a.flat_operators().collect();
    let eb: Vec<&CMatrix> = povm_b.flat_operators().collect();
    let mut entries = DMatrix::zeros(ea.len(), eb.len());
    for (i, a) in ea.iter().enumerate() {
        for (j, b) in eb.iter().enumerate() {
            entries[(i, j)] = linalg::trace_product(&linalg::kron(a, b), rho.matrix()).re;
        }
    }
    Ok(CorrelationMatrix { entries })
}

/// `(tr E_{α,k} ρ)` for a local state.
pub fn marginal_vector(povm: &SymmetricPovm, rho: &DensityMatrix) -> Result<MarginalVector> {
    Ok(MarginalVector {
        entries: povm.probabilities(rho)?,
    })
}

/// Assembles `Q_{a,b}`. Empty `a` and `b` give `Q = P`.
pub fn augmented_matrix(
    a: &[f64],
    b: &[f64],
    p: &CorrelationMatrix,
    tau: &MarginalVector,
    sigma: &MarginalVector,
) -> Result<AugmentedMatrix> {
    let (pr, pc) = p.entries.shape();
    if tau.entries.len() != pr || sigma.entries.len() != pc {
        return Err(Error::DimensionMismatch(format!(
            "P is {pr}x{pc}, tau has {} entries, sigma has {}",
            tau.entries.len(),
            sigma.entries.len()
        )));
    }
    let (m, n) = (a.len(), b.len());
    let mut q = DMatrix::zeros(m + pr, n + pc);
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            q[(i, j)] = ai * bj;
        }
        for (j, &sj) in sigma.entries.iter().enumerate() {
            q[(i, n + j)] = ai * sj;
        }
    }
    for (i, &ti) in tau.entries.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            q[(m + i, j)] = ti * bj;
        }
    }
    q.view_mut((m, n), (pr, pc)).copy_from(&p.entries);
    Ok(AugmentedMatrix {
        a: a.to_vec(),
        b: b.to_vec(),
        matrix: q,
    })
}

/// Separable bound on `‖Q_{a,b}‖_tr` for two local POVMs.
pub fn theorem1_bound(a: &[f64], b: &[f64], party_a: &PovmParams, party_b: &PovmParams) -> f64 {
    (norm2(a) + party_a.local_factor()).sqrt() * (norm2(b) + party_b.local_factor()).sqrt()
}

/// Bound written in GSIC form, with `a_X` the GSIC purity parameter.
pub fn gsic_bound(a: &[f64], b: &[f64], d_a: usize, purity_a: f64, d_b: usize, purity_b: f64) -> f64 {
    let f = |d: usize, p: f64| {
        let d = d as f64;
        (p * d * d + 1.0) / (d * (d + 1.0))
    };
    ((norm2(a) + f(d_a, purity_a)) * (norm2(b) + f(d_b, purity_b))).sqrt()
}

/// Bound written in MUM form, with `κ_X` the MUM purity parameter.
pub fn mum_bound(a: &[f64], b: &[f64], kappa_a: f64, kappa_b: f64) -> f64 {
    ((norm2(a) + 1.0 + kappa_a) * (norm2(b) + 1.0 + kappa_b)).sqrt()
}

fn bipartite_q(
    rho: &DensityMatrix,
    povm_a: &SymmetricPovm,
    povm_b: &SymmetricPovm,
    a: &[f64],
    b: &[f64],
) -> Result<AugmentedMatrix> {
    let p = probability_matrix(povm_a, povm_b, rho)?;
    let split = DensityMatrix::new(rho.matrix().clone(), vec![povm_a.d(), povm_b.d()])?;
    let tau = marginal_vector(povm_a, &split.partial_trace(&[0])?)?;
    let sigma = marginal_vector(povm_b, &split.partial_trace(&[1])?)?;
    augmented_matrix(a, b, &p, &tau, &sigma)
}

/// General (N,M)-POVM criterion.
pub fn evaluate_bipartite(
    rho: &DensityMatrix,
    povm_a: &SymmetricPovm,
    povm_b: &SymmetricPovm,
    a: &[f64],
    b: &[f64],
) -> Result<CriterionReport> {
    let q = bipartite_q(rho, povm_a, povm_b, a, b)?;
    let (pa, pb) = (PovmParams::from(povm_a), PovmParams::from(povm_b));
    let bound = theorem1_bound(a, b, &pa, &pb);
    Ok(CriterionReport::new(Criterion::Theorem1, vec![pa, pb], a, b, q.trace_norm(), bound))
}

fn require_family(p: &SymmetricPovm, family: Family, name: &'static str) -> Result<()> {
    if p.family() == family {
        Ok(())
    } else {
        Err(Error::FamilyMismatch {
            family: name,
            d: p.d(),
            n: p.n(),
            m: p.m(),
        })
    }
}

/// Criterion for two GSIC-POVMs (N = 1, M = d²).
pub fn evaluate_gsic(
    rho: &DensityMatrix,
    povm_a: &SymmetricPovm,
    povm_b: &SymmetricPovm,
    a: &[f64],
    b: &[f64],
) -> Result<CriterionReport> {
    require_family(povm_a, Family::Gsic, "GSIC")?;
    require_family(povm_b, Family::Gsic, "GSIC")?;
    let q = bipartite_q(rho, povm_a, povm_b, a, b)?;
    let bound = gsic_bound(a, b, povm_a.d(), povm_a.x(), povm_b.d(), povm_b.x());
    Ok(CriterionReport::new(
        Criterion::Gsic,
        vec![povm_a.into(), povm_b.into()],
        a,
        b,
        q.trace_norm(),
        bound,
    ))
}

/// Criterion for two complete sets of MUMs (N = d + 1, M = d).
pub fn evaluate_mum(
    rho: &DensityMatrix,
    povm_a: &SymmetricPovm,
    povm_b: &SymmetricPovm,
    a: &[f64],
    b: &[f64],
) -> Result<CriterionReport> {
    require_family(povm_a, Family::Mum, "MUM")?;
    require_family(povm_b, Family::Mum, "MUM")?;
    let q = bipartite_q(rho, povm_a, povm_b, a, b)?;
    let bound = mum_bound(a, b, povm_a.x(), povm_b.x());
    Ok(CriterionReport::new(
        Criterion::Mum,
        vec![povm_a.into(), povm_b.into()],
        a,
        b,
        q.trace_norm(),
        bound,
    ))
}

/// Equal-entry special case: `a = μ(1,…,1)`, `b = ν(1,…,1)`, both of length `l`.
pub fn evaluate_baseline_equal_entries(
    rho: &DensityMatrix,
    povm_a: &SymmetricPovm,
    povm_b: &SymmetricPovm,
    mu: f64,
    nu: f64,
    l: usize,
) -> Result<CriterionReport> {
    let a = vec![mu; l];
    let b = vec![nu; l];
    let mut report = evaluate_bipartite(rho, povm_a, povm_b, &a, &b)?;
    let (pa, pb) = (report.povm[0], report.povm[1]);
    let lf = l as f64;
    report.bound = (lf * mu * mu + pa.local_factor()).sqrt() * (lf * nu * nu + pb.local_factor()).sqrt();
    report.margin = report.trace_norm - report.bound;
    report.entangled = report.margin > 0.0;
    report.criterion = Criterion::Baseline;
    Ok(report)
}

/// `R = tr_1[(E ⊗ I) ρ]` for `ρ` on `d_first ⊗ rest`.
fn contract_first(rho: &CMatrix, d_first: usize, e: &CMatrix) -> CMatrix {
    let rest = rho.nrows() / d_first;
    CMatrix::from_fn(rest, rest, |r, col| {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..d_first {
            for j in 0..d_first {
                let ej = e[(j, i)];
                if ej.re != 0.0 || ej.im != 0.0 {
                    acc += ej * rho[(i * rest + r, j * rest + col)];
                }
            }
        }
        acc
    })
}

fn joint_into(rho: &CMatrix, dims: &[usize], povms: &[&SymmetricPovm], out: &mut Vec<f64>) {
    match povms {
        [] => {}
        [last] => out.extend(last.flat_operators().map(|e| linalg::trace_product(e, rho).re)),
        [first, rest @ ..] => {
            for e in first.flat_operators() {
                let reduced = contract_first(rho, dims[0], e);
                joint_into(&reduced, &dims[1..], rest, out);
            }
        }
    }
}

/// Probabilities of every joint outcome, party 1 most significant.
pub fn joint_probabilities(povms: &[&SymmetricPovm], rho: &DensityMatrix) -> Result<Vec<f64>> {
    let dims: Vec<usize> = povms.iter().map(|p| p.d()).collect();
    if rho.dims() != dims.as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {:?} vs POVM dimensions {:?}",
            rho.dims(),
            dims
        )));
    }
    let mut out = Vec::with_capacity(povms.iter().map(|p| p.outcome_count()).product());
    joint_into(rho.matrix(), &dims, povms, &mut out);
    Ok(out)
}

fn check_party(q: usize, n: usize) -> Result<usize> {
    if q == 0 || q > n {
        Err(Error::PartyOutOfRange { q, n })
    } else {
        Ok(q - 1)
    }
}

/// Correlation matrix under the bipartition `A_q | rest` (`q` is 1-based).
///
/// Rows are party q's outcomes; columns the joint outcomes of the remaining
/// parties in ascending order.
pub fn probability_matrix_bipartition(
    povms: &[SymmetricPovm],
    rho: &DensityMatrix,
    q: usize,
) -> Result<CorrelationMatrix> {
    let qi = check_party(q, povms.len())?;
    let refs: Vec<&SymmetricPovm> = povms.iter().collect();
    let joint = joint_probabilities(&refs, rho)?;
    let counts: Vec<usize> = povms.iter().map(|p| p.outcome_count()).collect();
    let rows = counts[qi];
    let cols = joint.len() / rows;
    // stride of party q's digit and the size of the digits after it
    let after: usize = counts[qi + 1..].iter().product();
    let mut entries = DMatrix::zeros(rows, cols);
    for (flat, &v) in joint.iter().enumerate() {
        let hi = flat / (rows * after);
        let digit = (flat / after) % rows;
        let lo = flat % after;
        entries[(digit, hi * after + lo)] = v;
    }
    Ok(CorrelationMatrix { entries })
}

/// Separable bound under the bipartition `A_q | rest`.
pub fn theorem2_bound(a: &[f64], b: &[f64], q: usize, params: &[PovmParams]) -> Result<f64> {
    let qi = check_party(q, params.len())?;
    let rest: f64 = params
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != qi)
        .map(|(_, p)| p.local_factor())
        .product();
    Ok((norm2(a) + params[qi].local_factor()).sqrt() * (norm2(b) + rest).sqrt())
}

/// Multipartite criterion; detection certifies that the state is not fully separable.
pub fn evaluate_multipartite(
    rho: &DensityMatrix,
    povms: &[SymmetricPovm],
    q: usize,
    a: &[f64],
    b: &[f64],
) -> Result<CriterionReport> {
    let qi = check_party(q, povms.len())?;
    let p = probability_matrix_bipartition(povms, rho, q)?;
    let tau = marginal_vector(&povms[qi], &rho.partial_trace(&[qi])?)?;
    let others: Vec<usize> = (0..povms.len()).filter(|&i| i != qi).collect();
    let rest_state = rho.partial_trace(&others)?;
    let rest_povms: Vec<&SymmetricPovm> = others.iter().map(|&i| &povms[i]).collect();
    let sigma = MarginalVector {
        entries: joint_probabilities(&rest_povms, &rest_state)?,
    };
    let qm = augmented_matrix(a, b, &p, &tau, &sigma)?;
    let params: Vec<PovmParams> = povms.iter().map(PovmParams::from).collect();
    let bound = theorem2_bound(a, b, q, &params)?;
    let mut report = CriterionReport::new(Criterion::Theorem2, params, a, b, qm.trace_norm(), bound);
    report.bipartition_q = Some(q);
    report.note = Some(if report.entangled {
        format!("state is not fully separable (detected across A_{q} | rest)")
    } else {
        "inconclusive".to_string()
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn povm(d: usize, n: usize, m: usize, t: f64) -> SymmetricPovm {
        SymmetricPovm::canonical(d, n, m, t).unwrap()
    }

    fn marginal_of(p: &SymmetricPovm, rho: &DensityMatrix, keep: usize) -> MarginalVector {
        marginal_vector(p, &rho.partial_trace(&[keep]).unwrap()).unwrap()
    }

    #[test]
    fn product_state_gives_rank_one_p() {
        let pa = povm(3, 8, 2, 0.01);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ra = state::random_density_with(3, &mut rng);
        let rb = state::random_density_with(3, &mut rng);
        let rho = ra.tensor(&rb);
        let p = probability_matrix(&pa, &pa, &rho).unwrap();
        let tau = marginal_vector(&pa, &ra).unwrap();
        let sigma = marginal_vector(&pa, &rb).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                assert!((p.entries[(i, j)] - tau.entries[i] * sigma.entries[j]).abs() < 1e-14);
            }
        }
        assert_eq!(linalg::numerical_rank(&linalg::singular_values_real(&p.entries)), 1);
    }

    #[test]
    fn uniform_state_gives_flat_p() {
        let pa = povm(3, 4, 3, 0.01);
        let pb = povm(2, 3, 2, 0.1);
        let rho = state::maximally_mixed(&[3, 2]);
        let p = probability_matrix(&pa, &pb, &rho).unwrap();
        assert!(p.entries.iter().all(|v| (v - 1.0 / 6.0).abs() < 1e-15));
    }

    #[test]
    fn p_matches_direct_trace_oracle() {
        let pa = povm(3, 8, 2, 0.01);
        let rho = state::isotropic(3, 0.7).unwrap();
        let p = probability_matrix(&pa, &pa, &rho).unwrap();
        let ops: Vec<&CMatrix> = pa.flat_operators().collect();
        for (i, ea) in ops.iter().enumerate() {
            for (j, eb) in ops.iter().enumerate() {
                let full = linalg::kron(ea, eb) * rho.matrix();
                let v = linalg::trace(&full).re;
                assert!((p.entries[(i, j)] - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_blocks_sum_to_one() {
        let pa = povm(3, 4, 3, 0.02);
        let rho = state::random_density(9, 1);
        let rho = DensityMatrix::new(rho.matrix().clone(), vec![3, 3]).unwrap();
        let p = probability_matrix(&pa, &pa, &rho).unwrap();
        for alpha in 0..4 {
            for beta in 0..4 {
                let s: f64 = p.entries.view((alpha * 3, beta * 3), (3, 3)).sum();
                assert!((s - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn marginal_vector_cases() {
        let p = povm(3, 4, 3, 0.01);
        let mixed = state::maximally_mixed(&[3]);
        let v = marginal_vector(&p, &mixed).unwrap();
        assert!(v.entries.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let rho = state::random_density(3, 44);
        let v = marginal_vector(&p, &rho).unwrap();
        for block in v.entries.chunks(3) {
            assert!((block.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!((v.norm_squared() - p.coincidence_index(&rho).unwrap()).abs() < 1e-12);
        assert!(marginal_vector(&p, &state::maximally_mixed(&[2])).is_err());
    }

    #[test]
    fn augmented_matrix_blocks() {
        let p = CorrelationMatrix {
            entries: DMatrix::from_row_slice(1, 1, &[0.25]),
        };
        let tau = MarginalVector { entries: vec![0.5] };
        let sigma = MarginalVector { entries: vec![0.7] };
        let q = augmented_matrix(&[1.0], &[1.0], &p, &tau, &sigma).unwrap();
        assert_eq!(q.matrix, DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.5, 0.25]));
        let q0 = augmented_matrix(&[], &[], &p, &tau, &sigma).unwrap();
        assert_eq!(q0.matrix, p.entries);
        assert_eq!(q.p_block(), p.entries);
        assert!(augmented_matrix(&[], &[], &p, &MarginalVector { entries: vec![] }, &sigma).is_err());
    }

    #[test]
    fn example_configuration_has_18_by_18_q() {
        let pa = povm(3, 8, 2, 0.01);
        let rho = state::tiles_ppt_state();
        let q = bipartite_q(&rho, &pa, &pa, &[0.1, 0.1], &[0.05, 0.051]).unwrap();
        assert_eq!(q.matrix.shape(), (18, 18));
        let p = probability_matrix(&pa, &pa, &rho).unwrap();
        assert_eq!(q.p_block(), p.entries);
    }

    #[test]
    fn empty_vectors_reduce_to_trace_norm_of_p() {
        let pa = povm(3, 8, 2, 0.01);
        let rho = state::isotropic(3, 0.6).unwrap();
        let r = evaluate_bipartite(&rho, &pa, &pa, &[], &[]).unwrap();
        let p = probability_matrix(&pa, &pa, &rho).unwrap();
        assert_eq!(r.trace_norm, p.trace_norm());
        let f = PovmParams::from(&pa).local_factor();
        assert!((r.bound - f).abs() < 1e-15);
    }

    #[test]
    fn specialized_bounds_agree_with_general_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::env_seed(12));
        let a = [0.1, 0.1];
        let b = [0.05, 0.051];
        for _ in 0..20 {
            let t = rng.random_range(-0.012..0.012);
            let g = PovmParams::new(3, 1, 9, t);
            assert!((theorem1_bound(&a, &b, &g, &g) - gsic_bound(&a, &b, 3, g.x, 3, g.x)).abs() < 1e-12);
            let t = rng.random_range(-0.1..0.12);
            let m = PovmParams::new(3, 4, 3, t);
            assert!((theorem1_bound(&a, &b, &m, &m) - mum_bound(&a, &b, m.x, m.x)).abs() < 1e-12);
        }
    }

    #[test]
    fn family_mismatch_rejected() {
        let g = povm(3, 8, 2, 0.01);
        let rho = state::isotropic(3, 1.0).unwrap();
        assert!(matches!(evaluate_gsic(&rho, &g, &g, &[], &[]), Err(Error::FamilyMismatch { .. })));
        assert!(matches!(evaluate_mum(&rho, &g, &g, &[], &[]), Err(Error::FamilyMismatch { .. })));
    }

    #[test]
    fn baseline_with_zero_length_is_remark_reduction() {
        let g = povm(3, 8, 2, 0.01);
        let rho = state::isotropic(3, 0.5).unwrap();
        let zero = evaluate_bipartite(&rho, &g, &g, &[], &[]).unwrap();
        for r in [
            evaluate_baseline_equal_entries(&rho, &g, &g, 0.1, 0.05, 0).unwrap(),
            evaluate_baseline_equal_entries(&rho, &g, &g, 0.0, 0.0, 2).unwrap(),
        ] {
            assert!((r.trace_norm - zero.trace_norm).abs() < 1e-12);
            assert!((r.bound - zero.bound).abs() < 1e-15);
        }
    }

    #[test]
    fn bipartition_matches_bipartite_matrix() {
        let pa = povm(3, 4, 3, 0.01);
        let pb = povm(2, 3, 2, 0.1);
        let rho = state::random_separable(3, 2, 3, 8);
        let direct = probability_matrix(&pa, &pb, &rho).unwrap();
        let via = probability_matrix_bipartition(&[pa.clone(), pb.clone()], &rho, 1).unwrap();
        assert!((direct.entries.clone() - via.entries).abs().max() < 1e-15);
        let swapped = probability_matrix_bipartition(&[pa, pb], &rho, 2).unwrap();
        assert!((direct.entries.transpose() - swapped.entries).abs().max() < 1e-15);
    }

    #[test]
    fn bipartition_matches_triple_kron_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = povm(2, 3, 2, 0.1);
        let povms = vec![p.clone(), p.clone(), p.clone()];
        let noisy = state::white_noise_mix(&state::ghz(3), 0.6).unwrap();
        let rho = DensityMatrix::new(
            noisy.matrix() * linalg::c(0.9, 0.0) + state::random_product_with(&[2, 2, 2], &mut rng).matrix() * linalg::c(0.1, 0.0),
            vec![2, 2, 2],
        )
        .unwrap();
        let ops: Vec<&CMatrix> = p.flat_operators().collect();
        for q in 1..=3 {
            let m = probability_matrix_bipartition(&povms, &rho, q).unwrap();
            assert_eq!(m.entries.shape(), (6, 36));
            for r in 0..6 {
                for col in 0..36 {
                    let (o1, o2) = (col / 6, col % 6);
                    let mut idx = [o1, o2];
                    let mut slots = vec![];
                    let mut it = idx.iter_mut();
                    for party in 1..=3 {
                        if party == q {
                            slots.push(r);
                        } else {
                            slots.push(*it.next().unwrap());
                        }
                    }
                    let full = linalg::kron(&linalg::kron(ops[slots[0]], ops[slots[1]]), ops[slots[2]]);
                    let v = linalg::trace(&(full * rho.matrix())).re;
                    assert!((m.entries[(r, col)] - v).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fully_product_three_party_is_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = povm(2, 3, 2, 0.1);
        let rho = state::random_product_with(&[2, 2, 2], &mut rng);
        let m = probability_matrix_bipartition(&[p.clone(), p.clone(), p], &rho, 2).unwrap();
        assert_eq!(linalg::numerical_rank(&linalg::singular_values_real(&m.entries)), 1);
    }

    #[test]
    fn party_index_checked() {
        let p = povm(2, 3, 2, 0.1);
        let rho = state::ghz(3);
        let povms = vec![p.clone(), p.clone(), p];
        assert!(matches!(
            probability_matrix_bipartition(&povms, &rho, 0),
            Err(Error::PartyOutOfRange { .. })
        ));
        assert!(probability_matrix_bipartition(&povms, &rho, 4).is_err());
        assert!(probability_matrix_bipartition(&povms[..2], &rho, 1).is_err());
    }

    #[test]
    fn theorem2_bound_reductions() {
        let a = [0.1, 0.2];
        let b = [0.3];
        let pa = PovmParams::new(3, 8, 2, 0.01);
        let pb = PovmParams::new(2, 3, 2, 0.05);
        let t2 = theorem2_bound(&a, &b, 1, &[pa, pb]).unwrap();
        assert!((t2 - theorem1_bound(&a, &b, &pa, &pb)).abs() < 1e-15);

        let f = pb.local_factor();
        let sym = theorem2_bound(&[], &[], 2, &[pb, pb, pb]).unwrap();
        assert!((sym - f.powf(1.5)).abs() < 1e-12);
        assert!((pb.local_factor() - povm::coincidence_bound(2, 2, pb.x)).abs() < 1e-12);
    }

    #[test]
    fn multipartite_two_party_equals_bipartite() {
        let pa = povm(3, 4, 3, 0.01);
        let rho = state::isotropic(3, 0.6).unwrap();
        let a = [0.1, 0.1];
        let b = [0.05, 0.051];
        let bi = evaluate_bipartite(&rho, &pa, &pa, &a, &b).unwrap();
        let multi = evaluate_multipartite(&rho, &[pa.clone(), pa], 1, &a, &b).unwrap();
        assert!((bi.trace_norm - multi.trace_norm).abs() < 1e-10);
        assert!((bi.bound - multi.bound).abs() < 1e-10);
        assert_eq!(multi.bipartition_q, Some(1));
    }

    #[test]
    fn marginal_consistency() {
        let pa = povm(3, 8, 2, 0.01);
        let pb = povm(3, 4, 3, 0.02);
        let rho = DensityMatrix::new(state::random_density(9, 3).matrix().clone(), vec![3, 3]).unwrap();
        let p = probability_matrix(&pa, &pb, &rho).unwrap();
        let tau = marginal_of(&pa, &rho, 0);
        for beta in 0..4 {
            for (i, t) in tau.entries.iter().enumerate() {
                let s: f64 = (0..3).map(|l| p.entries[(i, beta * 3 + l)]).sum();
                assert!((s - t).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pure_product_saturates_remark_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let pa = povm(3, 4, 3, 0.01);
        let pb = povm(2, 3, 2, 0.1);
        for _ in 0..5 {
            let rho = state::random_pure_product_with(&[3, 2], &mut rng);
            let r = evaluate_bipartite(&rho, &pa, &pb, &[], &[]).unwrap();
            assert!(r.margin.abs() < 1e-10, "{}", r.margin);
        }
    }

    #[test]
    fn report_json_shape() {
        let pa = povm(3, 8, 2, 0.01);
        let rho = state::isotropic(3, 1.0).unwrap();
        let r = evaluate_bipartite(&rho, &pa, &pa, &[0.1], &[0.2]).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["criterion"], "theorem1");
        assert_eq!(v["entangled"], true);
        assert!(v.get("bipartition_q").is_none());
        assert_eq!(v["povm"][0]["N"], 8);
    }
}
