//! Generalized Gell-Mann operators and their (N, M-1) grouping.
//!
//! Every operator is traceless, Hermitian and normalized to `tr(G²) = 1`, so
//! together with `I/√d` they form an orthonormal basis of the d×d Hermitian
//! matrices under the Hilbert-Schmidt inner product.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::linalg::{c, CMatrix};
use crate::{Error, Result};

/// One generalized Gell-Mann operator. Indices are zero-based levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GellMann {
    /// `(|j⟩⟨k| + |k⟩⟨j|)/√2`, `j < k`.
    Symmetric { j: usize, k: usize },
    /// `(-i|j⟩⟨k| + i|k⟩⟨j|)/√2`, `j < k`.
    Antisymmetric { j: usize, k: usize },
    /// `(Σ_{i<l} |i⟩⟨i| - l|l⟩⟨l|)/√(l(l+1))`, `1 <= l < d`.
    Diagonal { l: usize },
}

impl GellMann {
    pub fn matrix(&self, d: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            GellMann::Symmetric { j, k } => {
                m[(j, k)] = c(h, 0.0);
                m[(k, j)] = c(h, 0.0);
            }
            GellMann::Antisymmetric { j, k } => {
                m[(j, k)] = c(0.0, -h);
                m[(k, j)] = c(0.0, h);
            }
            GellMann::Diagonal { l } => {
                let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
                for i in 0..l {
                    m[(i, i)] = c(norm, 0.0);
                }
                m[(l, l)] = c(-(l as f64) * norm, 0.0);
            }
        }
        m
    }

    fn fits(&self, d: usize) -> bool {
        match *self {
            GellMann::Symmetric { j, k } | GellMann::Antisymmetric { j, k } => j < k && k < d,
            GellMann::Diagonal { l } => l >= 1 && l < d,
        }
    }
}

impl fmt::Display for GellMann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GellMann::Symmetric { j, k } => write!(f, "X{j}{k}"),
            GellMann::Antisymmetric { j, k } => write!(f, "Y{j}{k}"),
            GellMann::Diagonal { l } => write!(f, "D{l}"),
        }
    }
}

impl Serialize for GellMann {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Labels of the canonical ordering: all symmetric pairs `(j,k)`, `j<k`
/// lexicographic, then the antisymmetric pairs in the same order, then
/// `D_1 .. D_{d-1}`.
pub fn gell_mann_labels(d: usize) -> Result<Vec<GellMann>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| ((j + 1)..d).map(move |k| (j, k)))
        .collect();
    let mut out: Vec<GellMann> = pairs
        .iter()
        .map(|&(j, k)| GellMann::Symmetric { j, k })
        .collect();
    out.extend(pairs.iter().map(|&(j, k)| GellMann::Antisymmetric { j, k }));
    out.extend((1..d).map(|l| GellMann::Diagonal { l }));
    Ok(out)
}

/// The d²−1 generalized Gell-Mann matrices in canonical order.
pub fn gell_mann_basis(d: usize) -> Result<Vec<CMatrix>> {
    Ok(gell_mann_labels(d)?.iter().map(|g| g.matrix(d)).collect())
}

/// Traceless basis split into N groups of M−1 operators `G_{α,k}`.
#[derive(Debug, Clone)]
pub struct OperatorBasisLayout {
    d: usize,
    m: usize,
    labels: Vec<Vec<GellMann>>,
    groups: Vec<Vec<CMatrix>>,
}

fn check_complete(d: usize, n: usize, m: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let need = d * d - 1;
    let got = m.saturating_sub(1) * n;
    if m < 2 || got != need {
        return Err(Error::IncompleteLayout { d, n, m, got, need });
    }
    Ok(())
}

impl OperatorBasisLayout {
    /// Canonical layout: consecutive chunks of `M-1` operators of
    /// [`gell_mann_basis`] order.
    pub fn canonical(d: usize, n: usize, m: usize) -> Result<Self> {
        check_complete(d, n, m)?;
        let labels = gell_mann_labels(d)?;
        let groups: Vec<Vec<GellMann>> = labels.chunks(m - 1).map(<[GellMann]>::to_vec).collect();
        Self::from_labels(d, groups)
    }

    /// Explicit grouping. The groups must use every Gell-Mann operator of
    /// dimension `d` exactly once and all have the same size.
    pub fn from_labels(d: usize, labels: Vec<Vec<GellMann>>) -> Result<Self> {
        let n = labels.len();
        let m = labels.first().map_or(0, |g| g.len() + 1);
        check_complete(d, n, m)?;
        if labels.iter().any(|g| g.len() + 1 != m) {
            return Err(Error::IncompleteLayout {
                d,
                n,
                m,
                got: labels.iter().map(Vec::len).sum(),
                need: d * d - 1,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for g in labels.iter().flatten() {
            if !g.fits(d) || !seen.insert(*g) {
                return Err(Error::DimensionMismatch(format!(
                    "operator {g} is invalid or repeated for d={d}"
                )));
            }
        }
        let groups = labels
            .iter()
            .map(|grp| grp.iter().map(|g| g.matrix(d)).collect())
            .collect();
        Ok(Self { d, m, labels, groups })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Group count N.
    pub fn n(&self) -> usize {
        self.groups.len()
    }

    /// Outcomes per group M.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn groups(&self) -> &[Vec<CMatrix>] {
        &self.groups
    }

    pub fn labels(&self) -> &[Vec<GellMann>] {
        &self.labels
    }
}

/// Shorthand for [`OperatorBasisLayout::canonical`].
pub fn layout(d: usize, n: usize, m: usize) -> Result<OperatorBasisLayout> {
    OperatorBasisLayout::canonical(d, n, m)
}
