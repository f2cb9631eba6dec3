//! Informationally complete symmetric (N,M)-POVMs.
//!
//! Operators are `E_{α,k} = I/M + t·H_{α,k}` with
//! `H_{α,k} = G_α − √M(√M+1)·G_{α,k}` for `k < M` and `H_{α,M} = (√M+1)·G_α`,
//! where `G_α` is the sum of the α-th group of the basis layout. The set
//! obeys
//!
//! ```text
//! tr E_{α,k} = w = d/M
//! tr E_{α,k}² = x = d/M² + t²(M−1)(√M+1)²
//! tr E_{α,k}E_{α,l} = y = (d − Mx)/(M(M−1))      (k ≠ l)
//! tr E_{α,k}E_{β,l} = z = d/M²                   (α ≠ β)
//! ```

use serde::Serialize;

use crate::basis::{GellMann, OperatorBasisLayout};
use crate::linalg::{self, c, CMatrix};
use crate::state::DensityMatrix;
use crate::{Error, Result};

/// Closed interval of admissible `t` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TRange {
    pub lo: f64,
    pub hi: f64,
}

impl TRange {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

/// Purity parameter `x = tr E²` as a function of `t`.
pub fn x_of_t(d: usize, m: usize, t: f64) -> f64 {
    let (d, m) = (d as f64, m as f64);
    d / (m * m) + t * t * (m - 1.0) * (m.sqrt() + 1.0).powi(2)
}

/// Upper bound on the coincidence index, attained by pure states:
/// `(d−1)/d · (d² + M²x)/(M(M−1))`.
pub fn coincidence_bound(d: usize, m: usize, x: f64) -> f64 {
    let (d, m) = (d as f64, m as f64);
    (d - 1.0) / d * (d * d + m * m * x) / (m * (m - 1.0))
}

/// Coincidence index as a function of the purity `tr ρ²`.
pub fn coincidence_closed_form(d: usize, m: usize, x: f64, purity: f64) -> f64 {
    let (d, m) = (d as f64, m as f64);
    (d * (m * m * x - d) * purity + d.powi(3) - m * m * x) / (d * m * (m - 1.0))
}

fn h_operators(layout: &OperatorBasisLayout) -> Vec<Vec<CMatrix>> {
    let d = layout.d();
    let sm = (layout.m() as f64).sqrt();
    layout
        .groups()
        .iter()
        .map(|group| {
            let g_alpha = group
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, g| acc + g);
            let mut row: Vec<CMatrix> = group
                .iter()
                .map(|g| &g_alpha - g * c(sm * (sm + 1.0), 0.0))
                .collect();
            row.push(&g_alpha * c(sm + 1.0, 0.0));
            row
        })
        .collect()
}

/// Admissible `t`: `[−1/(M λ_max), 1/(M |λ_min|)]` over all `H_{α,k}`.
pub fn t_range(layout: &OperatorBasisLayout) -> TRange {
    let mut lam_min = f64::INFINITY;
    let mut lam_max = f64::NEG_INFINITY;
    for h in h_operators(layout).iter().flatten() {
        // H is Hermitian by construction
        let (lo, hi) = linalg::hermitian_eig_extremes(h).expect("H operators are Hermitian");
        lam_min = lam_min.min(lo);
        lam_max = lam_max.max(hi);
    }
    let m = layout.m() as f64;
    TRange {
        lo: -1.0 / (m * lam_max),
        hi: 1.0 / (m * lam_min.abs()),
    }
}

/// Which special family an (N,M) shape belongs to for dimension d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// N = 1, M = d².
    Gsic,
    /// N = d + 1, M = d.
    Mum,
    General,
}

#[derive(Debug, Clone)]
pub struct SymmetricPovm {
    d: usize,
    n: usize,
    m: usize,
    t: f64,
    x: f64,
    range: TRange,
    grouping: Vec<Vec<GellMann>>,
    operators: Vec<Vec<CMatrix>>,
}

impl SymmetricPovm {
    pub fn build(layout: &OperatorBasisLayout, t: f64) -> Result<Self> {
        let range = t_range(layout);
        if !t.is_finite() || !range.contains(t) {
            return Err(Error::TOutOfRange {
                t,
                lo: range.lo,
                hi: range.hi,
            });
        }
        let d = layout.d();
        let m = layout.m();
        let base = linalg::identity(d) * c(1.0 / m as f64, 0.0);
        let operators = h_operators(layout)
            .into_iter()
            .map(|row| row.into_iter().map(|h| &base + h * c(t, 0.0)).collect())
            .collect();
        Ok(Self {
            d,
            n: layout.n(),
            m,
            t,
            x: x_of_t(d, m, t),
            range,
            grouping: layout.labels().to_vec(),
            operators,
        })
    }

    /// Canonical layout for `(d, N, M)` followed by [`SymmetricPovm::build`].
    pub fn canonical(d: usize, n: usize, m: usize, t: f64) -> Result<Self> {
        Self::build(&OperatorBasisLayout::canonical(d, n, m)?, t)
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn t_range(&self) -> TRange {
        self.range
    }
    pub fn grouping(&self) -> &[Vec<GellMann>] {
        &self.grouping
    }

    pub fn w(&self) -> f64 {
        self.d as f64 / self.m as f64
    }

    pub fn y(&self) -> f64 {
        let (d, m) = (self.d as f64, self.m as f64);
        (d - m * self.x) / (m * (m - 1.0))
    }

    pub fn z(&self) -> f64 {
        let (d, m) = (self.d as f64, self.m as f64);
        d / (m * m)
    }

    pub fn family(&self) -> Family {
        if self.n == 1 && self.m == self.d * self.d {
            Family::Gsic
        } else if self.n == self.d + 1 && self.m == self.d {
            Family::Mum
        } else {
            Family::General
        }
    }

    /// `operators()[α][k]` is `E_{α+1,k+1}`.
    pub fn operators(&self) -> &[Vec<CMatrix>] {
        &self.operators
    }

    /// Operators flattened α outer, k inner.
    pub fn flat_operators(&self) -> impl Iterator<Item = &CMatrix> {
        self.operators.iter().flatten()
    }

    pub fn outcome_count(&self) -> usize {
        self.n * self.m
    }

    pub(crate) fn probabilities_of(&self, rho: &CMatrix) -> Result<Vec<f64>> {
        if rho.nrows() != self.d || rho.ncols() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "POVM acts on d={}, state is {}x{}",
                self.d,
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(self
            .flat_operators()
            .map(|e| linalg::trace_product(e, rho).re)
            .collect())
    }

    /// Outcome probabilities `tr(E_{α,k} ρ)`, α outer, k inner.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.probabilities_of(rho.matrix())
    }

    /// `Σ_{α,k} tr(E_{α,k} ρ)²`.
    pub fn coincidence_index(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(self.probabilities(rho)?.iter().map(|p| p * p).sum())
    }

    pub fn coincidence_bound(&self) -> f64 {
        coincidence_bound(self.d, self.m, self.x)
    }

    pub fn dual_frame(&self) -> Result<DualFrame> {
        let gap = self.x - self.y();
        if gap.abs() <= 1e-14 * self.x.abs().max(1.0) {
            return Err(Error::DegenerateFrame(self.x));
        }
        let n = self.n as f64;
        let shift = ((n - 1.0) * self.z() + self.y()) / (n * self.w());
        let id = linalg::identity(self.d) * c(shift, 0.0);
        let operators = self
            .operators
            .iter()
            .map(|row| row.iter().map(|e| (e - &id) * c(1.0 / gap, 0.0)).collect())
            .collect();
        Ok(DualFrame {
            d: self.d,
            operators,
        })
    }

    pub fn export(&self) -> PovmExport {
        PovmExport {
            d: self.d,
            n: self.n,
            m: self.m,
            t: self.t,
            x: self.x,
            t_range: self.range,
            grouping: self.grouping.clone(),
            operators: self
                .flat_operators()
                .map(row_major_pairs)
                .collect(),
        }
    }
}

/// Entries of a matrix as `[re, im]` pairs in row-major order.
pub fn row_major_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

/// JSON view of a POVM.
#[derive(Debug, Clone, Serialize)]
pub struct PovmExport {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub t: f64,
    pub x: f64,
    pub t_range: TRange,
    pub grouping: Vec<Vec<GellMann>>,
    /// α outer, k inner; each operator row-major.
    pub operators: Vec<Vec<[f64; 2]>>,
}

/// Operators `F_{α,k}` with `ρ = Σ p_{α,k} F_{α,k}`.
#[derive(Debug, Clone)]
pub struct DualFrame {
    d: usize,
    operators: Vec<Vec<CMatrix>>,
}

impl DualFrame {
    pub fn operators(&self) -> &[Vec<CMatrix>] {
        &self.operators
    }

    /// `Σ p_{α,k} F_{α,k}` without any validation of the result.
    pub fn combine(&self, probabilities: &[Vec<f64>]) -> Result<CMatrix> {
        self.check_grid(probabilities)?;
        let mut acc = CMatrix::zeros(self.d, self.d);
        for (row_f, row_p) in self.operators.iter().zip(probabilities) {
            for (f, &p) in row_f.iter().zip(row_p) {
                acc += f * c(p, 0.0);
            }
        }
        Ok(acc)
    }

    /// State with the given outcome probabilities.
    pub fn reconstruct(&self, probabilities: &[Vec<f64>]) -> Result<DensityMatrix> {
        DensityMatrix::new(self.combine(probabilities)?, vec![self.d])
    }

    fn check_grid(&self, p: &[Vec<f64>]) -> Result<()> {
        const TOL: f64 = 1e-10;
        if p.len() != self.operators.len() {
            return Err(Error::MalformedProbabilities(format!(
                "expected {} rows, got {}",
                self.operators.len(),
                p.len()
            )));
        }
        for (alpha, (row, ops)) in p.iter().zip(&self.operators).enumerate() {
            if row.len() != ops.len() {
                return Err(Error::MalformedProbabilities(format!(
                    "row {alpha} has {} entries, expected {}",
                    row.len(),
                    ops.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(-TOL..=1.0 + TOL).contains(*v)) {
                return Err(Error::MalformedProbabilities(format!(
                    "row {alpha} has entry {v} outside [0, 1]"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > TOL {
                return Err(Error::MalformedProbabilities(format!(
                    "row {alpha} sums to {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Splits a flat α-outer/k-inner vector into an N×M grid.
pub fn to_grid(flat: &[f64], m: usize) -> Vec<Vec<f64>> {
    flat.chunks(m).map(<[f64]>::to_vec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::layout;
    use crate::linalg::{max_abs_diff, trace, trace_product};
    use crate::state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn povm(d: usize, n: usize, m: usize, t: f64) -> SymmetricPovm {
        SymmetricPovm::canonical(d, n, m, t).unwrap()
    }

    /// tr(E_i E_j) for every pair, compared against the four constants.
    fn check_gram(p: &SymmetricPovm, tol: f64) {
        let ops = p.operators();
        for (a, row_a) in ops.iter().enumerate() {
            for (k, ea) in row_a.iter().enumerate() {
                assert!((trace(ea).re - p.w()).abs() <= tol);
                for (b, row_b) in ops.iter().enumerate() {
                    for (l, eb) in row_b.iter().enumerate() {
                        let v = trace_product(ea, eb).re;
                        let expected = if a != b {
                            p.z()
                        } else if k == l {
                            p.x()
                        } else {
                            p.y()
                        };
                        assert!((v - expected).abs() <= tol, "({a},{k})x({b},{l}): {v} vs {expected}");
                    }
                }
            }
        }
    }

    #[test]
    fn t_zero_gives_flat_operators() {
        for (d, n, m) in [(2, 3, 2), (2, 1, 4), (3, 8, 2), (3, 4, 3), (3, 1, 9)] {
            let p = povm(d, n, m, 0.0);
            let flat = linalg::identity(d) * c(1.0 / m as f64, 0.0);
            for e in p.flat_operators() {
                assert!(max_abs_diff(e, &flat) < 1e-15);
            }
        }
    }

    #[test]
    fn x_for_qutrit_families() {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let t: f64 = 0.01;
        assert!((povm(3, 8, 2, t).x() - (0.75 + t * t * (s2 + 1.0).powi(2))).abs() < 1e-15);
        assert!((povm(3, 8, 2, t).x() - 0.750_582_842_7).abs() < 1e-9);
        assert!((x_of_t(3, 9, t) - (1.0 / 27.0 + 128.0 * t * t)).abs() < 1e-15);
        assert!((x_of_t(3, 3, t) - (1.0 / 3.0 + 2.0 * t * t * (1.0 + s3).powi(2))).abs() < 1e-15);
        assert!((x_of_t(3, 2, 0.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn gsic_gram_values_at_t_001() {
        let p = povm(3, 1, 9, 0.01);
        check_gram(&p, 1e-10);
        // x measured directly
        let e = &p.operators()[0][0];
        assert!((trace_product(e, e).re - (1.0 / 27.0 + 128e-4)).abs() < 1e-12);
    }

    #[test]
    fn qutrit_t_ranges() {
        let r = t_range(&layout(3, 8, 2).unwrap());
        assert!((r.lo + 0.2536).abs() < 1e-4 && (r.hi - 0.2536).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn out_of_range_t_is_rejected() {
        let l = layout(3, 8, 2).unwrap();
        assert!(matches!(SymmetricPovm::build(&l, 0.3), Err(Error::TOutOfRange { .. })));
        let r = t_range(&l);
        assert!(SymmetricPovm::build(&l, r.hi).is_ok());
        assert!(SymmetricPovm::build(&l, r.lo).is_ok());
    }

    #[test]
    fn endpoints_touch_zero_eigenvalue() {
        for (d, n, m) in [(2, 3, 2), (2, 1, 4), (3, 8, 2), (3, 4, 3), (3, 1, 9), (4, 5, 4)] {
            let l = layout(d, n, m).unwrap();
            let r = t_range(&l);
            for t in [r.lo, r.hi] {
                let p = SymmetricPovm::build(&l, t).unwrap();
                let smallest = p
                    .flat_operators()
                    .map(|e| linalg::hermitian_eig_extremes(e).unwrap().0)
                    .fold(f64::INFINITY, f64::min);
                assert!(smallest.abs() < 1e-8, "({d},{n},{m}) t={t}: {smallest}");
            }
        }
    }

    #[test]
    fn gram_relations_hold_for_random_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::env_seed(3));
        for (d, n, m) in [(2, 3, 2), (2, 1, 4), (3, 8, 2), (3, 4, 3), (3, 1, 9), (4, 15, 2), (4, 3, 6)] {
            let l = layout(d, n, m).unwrap();
            let r = t_range(&l);
            for _ in 0..5 {
                let t = rng.random_range(r.lo..=r.hi);
                let p = SymmetricPovm::build(&l, t).unwrap();
                check_gram(&p, 1e-10);
                for row in p.operators() {
                    let s = row.iter().fold(CMatrix::zeros(d, d), |acc, e| acc + e);
                    assert!(max_abs_diff(&s, &linalg::identity(d)) <= 1e-12);
                }
                for e in p.flat_operators() {
                    assert!(linalg::hermitian_eig_extremes(e).unwrap().0 >= -1e-10);
                }
                let lower = d as f64 / (m * m) as f64;
                let upper = ((d * d) as f64 / (m * m) as f64).min(d as f64 / m as f64);
                assert!(p.x() >= lower && p.x() <= upper + 1e-12);
            }
        }
    }

    #[test]
    fn coincidence_index_cases() {
        let p = povm(3, 8, 2, 0.01);
        let mixed = state::maximally_mixed(&[3]);
        let ci = p.coincidence_index(&mixed).unwrap();
        assert!((ci - 8.0 / 2.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pure = state::random_pure(3, &mut rng);
        assert!((p.coincidence_index(&pure).unwrap() - p.coincidence_bound()).abs() < 1e-12);

        let rho = state::random_density(3, 17);
        let direct: f64 = p
            .flat_operators()
            .map(|e| trace_product(e, rho.matrix()).re.powi(2))
            .sum();
        let closed = coincidence_closed_form(3, 2, p.x(), rho.purity());
        assert!((direct - closed).abs() < 1e-12);
    }

    #[test]
    fn coincidence_bound_arithmetic() {
        assert!((coincidence_bound(3, 2, 0.75) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn dual_frame_reconstructs_maximally_mixed() {
        let p = povm(3, 8, 2, 0.01);
        let mixed = state::maximally_mixed(&[3]);
        let probs = p.probabilities(&mixed).unwrap();
        assert!(probs.iter().all(|&v| (v - 0.5).abs() < 1e-15));
        let back = p.dual_frame().unwrap().reconstruct(&to_grid(&probs, 2)).unwrap();
        assert!(max_abs_diff(back.matrix(), mixed.matrix()) < 1e-12);
    }

    #[test]
    fn dual_frame_round_trip() {
        let cases = [(3usize, 4usize, 3usize, Some(0.01)), (2, 3, 2, None)];
        for (d, n, m, t) in cases {
            let l = layout(d, n, m).unwrap();
            let r = t_range(&l);
            let t = t.unwrap_or(0.5 * r.hi);
            let p = SymmetricPovm::build(&l, t).unwrap();
            let frame = p.dual_frame().unwrap();
            for seed in 0..10 {
                let rho = state::random_density(d, 100 + seed);
                let probs = p.probabilities(&rho).unwrap();
                let back = frame.reconstruct(&to_grid(&probs, m)).unwrap();
                assert!(max_abs_diff(back.matrix(), rho.matrix()) <= 1e-10);
            }
        }
    }

    #[test]
    fn dual_frame_degenerate_at_t_zero() {
        assert!(matches!(povm(3, 8, 2, 0.0).dual_frame(), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn malformed_grids_are_rejected() {
        let frame = povm(2, 3, 2, 0.1).dual_frame().unwrap();
        assert!(frame.combine(&[vec![0.5, 0.5], vec![0.5, 0.5]]).is_err());
        assert!(frame.combine(&[vec![0.5, 0.5], vec![0.5, 0.5], vec![0.7, 0.7]]).is_err());
        assert!(frame.combine(&[vec![0.5, 0.5], vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        assert!(frame.combine(&[vec![0.5, 0.5], vec![0.5], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn family_detection() {
        assert_eq!(povm(3, 1, 9, 0.0).family(), Family::Gsic);
        assert_eq!(povm(3, 4, 3, 0.0).family(), Family::Mum);
        assert_eq!(povm(3, 8, 2, 0.0).family(), Family::General);
        assert_eq!(povm(2, 3, 2, 0.0).family(), Family::Mum);
    }

    #[test]
    fn export_shape() {
        let p = povm(2, 3, 2, 0.1);
        let v = serde_json::to_value(p.export()).unwrap();
        assert_eq!(v["N"], 3);
        assert_eq!(v["M"], 2);
        assert_eq!(v["operators"].as_array().unwrap().len(), 6);
        assert_eq!(v["operators"][0].as_array().unwrap().len(), 4);
        assert_eq!(v["grouping"][0][0], "X01");
    }
}
