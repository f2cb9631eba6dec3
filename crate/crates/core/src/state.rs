//! Density matrices and the states used by the worked examples.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, CMatrix};
use crate::{Error, Result};

/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;

/// Hermitian, positive semidefinite, unit-trace matrix with a subsystem
/// factorization (`dims` multiplies to the matrix dimension).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || total != matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dims {:?} do not factor dimension {}",
                dims,
                matrix.nrows()
            )));
        }
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let (lo, _) = linalg::hermitian_eig_extremes(&matrix)?;
        if lo < -PSD_TOL {
            return Err(Error::InvalidState(format!("smallest eigenvalue {lo:.3e}")));
        }
        Ok(Self { matrix, dims })
    }

    /// Projector onto a (not necessarily normalized) vector.
    pub fn pure(psi: &DVector<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi / c(norm, 0.0);
        Self::new(&v * v.adjoint(), dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.matrix, &self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix).expect("validated Hermitian")
    }

    /// Number of eigenvalues above 1e-10.
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > 1e-10).count()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            dims,
        }
    }

    /// Reduced state on the listed subsystems.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let m = linalg::partial_trace(&self.matrix, &self.dims, &keep)?;
        let dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix {
            matrix: m,
            dims: if dims.is_empty() { vec![1] } else { dims },
        })
    }

    /// Parses the `{ "dims": [...], "matrix": [[re, im], ...] }` format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        file.into_state()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateFile::from(self)).expect("plain data serializes")
    }
}

/// On-disk state: subsystem dimensions and row-major `[re, im]` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn into_state(self) -> Result<DensityMatrix> {
        let n: usize = self.dims.iter().product();
        if self.matrix.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} need {} entries, got {}",
                self.dims,
                n * n,
                self.matrix.len()
            )));
        }
        let m = CMatrix::from_row_iterator(n, n, self.matrix.iter().map(|&[re, im]| c(re, im)));
        DensityMatrix::new(m, self.dims)
    }
}

impl From<&DensityMatrix> for StateFile {
    fn from(rho: &DensityMatrix) -> Self {
        StateFile {
            dims: rho.dims.clone(),
            matrix: crate::povm::row_major_pairs(&rho.matrix),
        }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange { name, value });
    }
    Ok(())
}

fn ket(d: usize, amps: &[(usize, f64)]) -> DVector<Complex64> {
    let mut v = DVector::zeros(d);
    for &(i, a) in amps {
        v[i] += c(a, 0.0);
    }
    v
}

fn product_ket(a: &DVector<Complex64>, b: &DVector<Complex64>) -> DVector<Complex64> {
    DVector::from_iterator(
        a.len() * b.len(),
        a.iter().flat_map(|x| b.iter().map(move |y| x * y)),
    )
}

/// `I/D` on the given subsystems.
pub fn maximally_mixed(dims: &[usize]) -> DensityMatrix {
    let n: usize = dims.iter().product();
    DensityMatrix {
        matrix: linalg::identity(n) * c(1.0 / n as f64, 0.0),
        dims: dims.to_vec(),
    }
}

/// `q|Ψ⁺⟩⟨Ψ⁺| + (1−q) I/d²` with `|Ψ⁺⟩ = Σ|ii⟩/√d`.
pub fn isotropic(d: usize, q: f64) -> Result<DensityMatrix> {
    check_unit("q", q)?;
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let amp = 1.0 / (d as f64).sqrt();
    let psi = ket(d * d, &(0..d).map(|i| (i * d + i, amp)).collect::<Vec<_>>());
    let proj = &psi * psi.adjoint();
    let noise = linalg::identity(d * d) * c((1.0 - q) / (d * d) as f64, 0.0);
    DensityMatrix::new(proj * c(q, 0.0) + noise, vec![d, d])
}

/// `(1−p)/D · I + p·ρ`.
pub fn white_noise_mix(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_unit("p", p)?;
    let n = rho.dim();
    let m = linalg::identity(n) * c((1.0 - p) / n as f64, 0.0) + rho.matrix() * c(p, 0.0);
    DensityMatrix::new(m, rho.dims.to_vec())
}

fn upb_complement(vectors: &[DVector<Complex64>]) -> Result<DensityMatrix> {
    let mut m = linalg::identity(9);
    for v in vectors {
        m -= v * v.adjoint();
    }
    DensityMatrix::new(m * c(0.25, 0.0), vec![3, 3])
}

/// The five product vectors of the 3⊗3 Tiles basis, in the order
/// `|0⟩|0−1⟩, |0−1⟩|2⟩, |2⟩|1−2⟩, |1−2⟩|0⟩, |0+1+2⟩|0+1+2⟩`.
pub fn tiles_vectors() -> [DVector<Complex64>; 5] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = 1.0 / 3f64.sqrt();
    let e = |i| ket(3, &[(i, 1.0)]);
    let m01 = ket(3, &[(0, h), (1, -h)]);
    let m12 = ket(3, &[(1, h), (2, -h)]);
    let u = ket(3, &[(0, r), (1, r), (2, r)]);
    [
        product_ket(&e(0), &m01),
        product_ket(&m01, &e(2)),
        product_ket(&e(2), &m12),
        product_ket(&m12, &e(0)),
        product_ket(&u, &u),
    ]
}

/// PPT entangled state `(I − Σ_i |φ_i⟩⟨φ_i|)/4` built on [`tiles_vectors`].
pub fn tiles_ppt_state() -> DensityMatrix {
    upb_complement(&tiles_vectors()).expect("tiles complement is a valid state")
}

/// `ω_1 .. ω_5`: the Tiles vectors listed starting from `|2⟩|1−2⟩`.
pub fn omega_vectors() -> [DVector<Complex64>; 5] {
    let [p0, p1, p2, p3, p4] = tiles_vectors();
    [p2, p0, p1, p3, p4]
}

/// `ρ_BE = (I − Σ_i |ω_i⟩⟨ω_i|)/4`.
pub fn bound_entangled_be() -> DensityMatrix {
    upb_complement(&omega_vectors()).expect("UPB complement is a valid state")
}

/// `λ|ω_1⟩⟨ω_1| + (1−λ)ρ_BE`.
pub fn rho1(lambda: f64) -> Result<DensityMatrix> {
    check_unit("lambda", lambda)?;
    let w1 = &omega_vectors()[0];
    let m = (w1 * w1.adjoint()) * c(lambda, 0.0) + bound_entangled_be().matrix() * c(1.0 - lambda, 0.0);
    DensityMatrix::new(m, vec![3, 3])
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz(n: usize) -> DensityMatrix {
    let dim = 1usize << n;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = ket(dim, &[(0, h), (dim - 1, h)]);
    DensityMatrix::pure(&psi, vec![2; n]).expect("GHZ vector is normalized")
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let psi = DVector::from_fn(d, |_, _| complex_gaussian(rng));
    DensityMatrix::pure(&psi, vec![d]).expect("nonzero Gaussian vector")
}

/// Ginibre mixed state `GG†/tr(GG†)`.
pub fn random_density_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m);
    // symmetrize away rounding so the Hermitian check is exact
    let m = (&m + m.adjoint()) * c(0.5 / tr.re, 0.0);
    DensityMatrix::new(m, vec![d]).expect("Ginibre state is valid")
}

pub fn random_density(d: usize, seed: u64) -> DensityMatrix {
    random_density_with(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Convex mixture of `terms` products of local states.
///
/// Each local factor is pure with probability 1/2 and Ginibre-mixed otherwise.
pub fn random_separable_with<R: Rng + ?Sized>(dims: &[usize], terms: usize, rng: &mut R) -> DensityMatrix {
    let terms = terms.max(1);
    let weights = dirichlet_weights(terms, rng);
    let n: usize = dims.iter().product();
    let mut acc = CMatrix::zeros(n, n);
    for w in weights {
        let prod = random_product_with(dims, rng);
        acc += prod.matrix * c(w, 0.0);
    }
    let acc = (&acc + acc.adjoint()) * c(0.5, 0.0);
    let tr = linalg::trace(&acc).re;
    DensityMatrix::new(acc * c(1.0 / tr, 0.0), dims.to_vec()).expect("mixture of product states")
}

pub fn random_separable(d_a: usize, d_b: usize, terms: usize, seed: u64) -> DensityMatrix {
    random_separable_with(&[d_a, d_b], terms, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Single product `ρ_1 ⊗ … ⊗ ρ_n` of random local states.
pub fn random_product_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let factors: Vec<DensityMatrix> = dims
        .iter()
        .map(|&d| {
            if rng.random_bool(0.5) {
                random_pure(d, rng)
            } else {
                random_density_with(d, rng)
            }
        })
        .collect();
    tensor_all(&factors)
}

/// Product of Haar-random pure states.
pub fn random_pure_product_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let factors: Vec<DensityMatrix> = dims.iter().map(|&d| random_pure(d, rng)).collect();
    tensor_all(&factors)
}

pub fn tensor_all(factors: &[DensityMatrix]) -> DensityMatrix {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().fold(first.clone(), |acc, f| acc.tensor(f))
}
