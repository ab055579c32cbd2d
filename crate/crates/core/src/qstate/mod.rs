//! Dense finite-dimensional quantum states.
//!
//! Everything here is immutable once built. Constructors validate their input
//! against [`Tolerances`] and the derived operations (tensor products, partial
//! traces, dephasing, purification) preserve the invariants by construction.

pub mod io;
pub mod random;

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Which factor of a bipartite system to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    v: CVector,
}

/// Orthonormal basis stored as the columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    m: CMatrix,
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    w: Vec<f64>,
}

/// A pure-state decomposition `{p_i, |psi_i>}` of a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

/// Qubit state `(I + n.sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub nx: f64,
    pub ny: f64,
    pub nz: f64,
}

/// Eigenvalues in descending order with matching phase-fixed eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
}

fn check_finite<'a>(entries: impl IntoIterator<Item = &'a C64>) -> Result<()> {
    if entries
        .into_iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
    {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues below `zero` in magnitude are snapped to exactly 0. Each
/// eigenvector is rotated so its first non-negligible component is real and
/// positive; ordering is by eigenvalue descending, ties broken by ascending
/// lexicographic order of the (re, im) components.
pub(crate) fn hermitian_spectrum(m: &CMatrix, zero: f64) -> Spectrum {
    let eig = m.clone().symmetric_eigen();
    let mut pairs: Vec<(f64, CVector)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&val, col)| {
            let val = if val.abs() < zero { 0.0 } else { val };
            (val, phase_fix(col.into_owned()))
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        if (la - lb).abs() > zero {
            return lb.partial_cmp(la).unwrap_or(Ordering::Equal);
        }
        for (x, y) in va.iter().zip(vb.iter()) {
            let ord =
                x.re.partial_cmp(&y.re)
                    .unwrap_or(Ordering::Equal)
                    .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    });
    let (values, vectors) = pairs.into_iter().unzip();
    Spectrum { values, vectors }
}

/// Eigenvalues of a Hermitian matrix, unsorted, without eigenvectors.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

fn phase_fix(mut v: CVector) -> CVector {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = first.conj() / first.norm();
        v *= phase;
    }
    v
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl DensityMatrix {
    /// Validates `m` with the default tolerances.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    /// Checks Hermiticity, unit trace and positivity.
    ///
    /// Small negative eigenvalues (within `tol.psd`) are clamped to zero and
    /// the spectrum is renormalized, so the stored matrix is exactly PSD.
    pub fn new_with(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::dims(format!(
                "density matrix must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        check_finite(m.iter())?;
        let herm_violation = max_abs(&(&m - m.adjoint()));
        if herm_violation > tol.hermitian {
            return Err(Error::NotHermitian {
                violation: herm_violation,
            });
        }
        let m = (&m + m.adjoint()).scale(0.5);
        let deviation = (m.trace().re - 1.0).abs();
        if deviation > tol.trace {
            return Err(Error::TraceNotOne { deviation });
        }
        let spec = hermitian_spectrum(&m, tol.zero);
        let min = spec.values.last().copied().unwrap_or(0.0);
        if min < -tol.psd {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        if min < 0.0 {
            return Ok(Self::from_spectrum_clamped(&spec));
        }
        Ok(DensityMatrix { m })
    }

    fn from_spectrum_clamped(spec: &Spectrum) -> Self {
        let d = spec.vectors[0].len();
        let total: f64 = spec.values.iter().map(|&x| x.max(0.0)).sum();
        let mut m = CMatrix::zeros(d, d);
        for (&val, vec) in spec.values.iter().zip(&spec.vectors) {
            if val > 0.0 {
                m += (vec * vec.adjoint()).scale(val / total);
            }
        }
        DensityMatrix { m }
    }

    /// Wraps a matrix known to satisfy the invariants up to rounding.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        let m = (&m + m.adjoint()).scale(0.5);
        let tr = m.trace().re;
        DensityMatrix { m: m.unscale(tr) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            m: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// Incoherent state `sum_i p_i |b_i><b_i|`.
    pub fn incoherent(probs: &ProbDist, basis: &Basis) -> Result<Self> {
        if probs.len() != basis.len() {
            return Err(Error::dims(format!(
                "{} weights for a basis of {} vectors",
                probs.len(),
                basis.len()
            )));
        }
        let mut m = CMatrix::zeros(basis.dim(), basis.dim());
        for (i, &p) in probs.iter().enumerate() {
            let b = basis.vector(i);
            m += (&b * b.adjoint()).scale(p);
        }
        Ok(Self::from_trusted(m))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn spectrum(&self) -> Spectrum {
        hermitian_spectrum(&self.m, Tolerances::default().zero)
    }

    /// Eigenvalues in descending order, clamped at zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let zero = Tolerances::default().zero;
        let mut ev: Vec<f64> = hermitian_eigenvalues(&self.m)
            .into_iter()
            .map(|x| if x < zero { 0.0 } else { x })
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        ev
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > 0.0).count()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == 1
    }

    /// Kronecker product; dimensions multiply.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            m: self.m.kronecker(&other.m),
        }
    }

    /// Reduced state of one factor of a `dims.0 x dims.1` bipartite state.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
        let (da, db) = dims;
        if da * db != self.dim() {
            return Err(Error::dims(format!(
                "subsystem dims {da}x{db} do not match state dim {}",
                self.dim()
            )));
        }
        let m = &self.m;
        let out = match keep {
            Subsystem::A => CMatrix::from_fn(da, da, |a, a2| {
                (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
            }),
            Subsystem::B => CMatrix::from_fn(db, db, |b, b2| {
                (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
            }),
        };
        Ok(DensityMatrix::from_trusted(out))
    }

    /// `sum_i <b_i|rho|b_i> |b_i><b_i|`.
    pub fn dephase(&self, basis: &Basis) -> Result<DensityMatrix> {
        let probs = self.populations(basis)?;
        DensityMatrix::incoherent(&probs, basis)
    }

    /// Outcome distribution of a projective measurement in `basis`.
    pub fn populations(&self, basis: &Basis) -> Result<ProbDist> {
        if basis.dim() != self.dim() {
            return Err(Error::dims(format!(
                "basis of dim {} for state of dim {}",
                basis.dim(),
                self.dim()
            )));
        }
        let w = (0..basis.len())
            .map(|i| {
                let b = basis.vector(i);
                (b.adjoint() * &self.m * &b)[(0, 0)].re.max(0.0)
            })
            .collect();
        Ok(ProbDist::renormalized(w))
    }

    /// Standard purification `sum_i sqrt(l_i) |a_i> (x) |e_i>` with the
    /// environment dimension equal to `self.dim()`.
    pub fn purify(&self) -> PureState {
        let d = self.dim();
        let spec = self.spectrum();
        let mut v = CVector::zeros(d * d);
        for (i, (&l, a)) in spec.values.iter().zip(&spec.vectors).enumerate() {
            if l <= 0.0 {
                continue;
            }
            let s = l.sqrt();
            for (k, amp) in a.iter().enumerate() {
                v[k * d + i] = amp * s;
            }
        }
        PureState::normalized(v).expect("purification of a unit-trace state is nonzero")
    }

    /// `U rho U^dag` for a unitary `u`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || !u.is_square() {
            return Err(Error::dims("unitary does not match state dimension"));
        }
        Ok(DensityMatrix::from_trusted(u * &self.m * u.adjoint()))
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::dims("mixing states of different dimension"));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::OutOfRange { value: lambda });
        }
        Ok(DensityMatrix::from_trusted(
            self.m.scale(lambda) + other.m.scale(1.0 - lambda),
        ))
    }

    /// Whether dephasing in `basis` leaves the state unchanged within `tol`.
    pub fn is_incoherent(&self, basis: &Basis, tol: f64) -> Result<bool> {
        let deph = self.dephase(basis)?;
        Ok(max_abs(&(&self.m - &deph.m)) <= tol)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.m - &other.m))
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        DensityMatrix::from_trusted(&psi.v * psi.v.adjoint())
    }
}

impl PureState {
    pub fn new(v: CVector) -> Result<Self> {
        Self::new_with(v, &Tolerances::default())
    }

    pub fn new_with(v: CVector, tol: &Tolerances) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::dims("empty state vector"));
        }
        check_finite(v.iter())?;
        let deviation = (v.norm() - 1.0).abs();
        if deviation > tol.norm {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(PureState { v })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(v: CVector) -> Result<Self> {
        check_finite(v.iter())?;
        let n = v.norm();
        if v.is_empty() || n == 0.0 {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        Ok(PureState { v: v.unscale(n) })
    }

    pub fn from_amplitudes(amps: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        PureState { v }
    }

    /// `(|0> + |1>) / sqrt(2)`
    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState {
            v: CVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]),
        }
    }

    /// `(|0> - |1>) / sqrt(2)`
    pub fn minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState {
            v: CVector::from_vec(vec![C64::new(s, 0.0), C64::new(-s, 0.0)]),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.v
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            v: self.v.kronecker(&other.v),
        }
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from(self)
    }

    /// `|<b_i|psi>|^2` for each basis vector.
    pub fn overlaps(&self, basis: &Basis) -> Result<ProbDist> {
        if basis.dim() != self.dim() {
            return Err(Error::dims(format!(
                "basis of dim {} for state of dim {}",
                basis.dim(),
                self.dim()
            )));
        }
        let amps = basis.matrix().adjoint() * &self.v;
        Ok(ProbDist::renormalized(
            amps.iter().map(|z| z.norm_sqr()).collect(),
        ))
    }
}

impl Basis {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::dims(format!(
                "a basis needs as many vectors as the dimension, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        check_finite(m.iter())?;
        let gram = m.adjoint() * &m;
        let violation = max_abs(&(gram - CMatrix::identity(m.nrows(), m.nrows())));
        if violation > tol.orthonormal {
            return Err(Error::BasisNotOrthonormal { violation });
        }
        Ok(Basis { m })
    }

    pub fn from_vectors(vectors: &[PureState]) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::dims("empty basis"));
        };
        if vectors.iter().any(|v| v.dim() != first.dim()) {
            return Err(Error::dims("basis vectors of different dimension"));
        }
        let cols: Vec<CVector> = vectors.iter().map(|v| v.v.clone()).collect();
        Self::new(CMatrix::from_columns(&cols))
    }

    pub fn computational(dim: usize) -> Self {
        Basis {
            m: CMatrix::identity(dim, dim),
        }
    }

    /// Tensor power of the Hadamard basis; `dim` must be a power of two.
    pub fn hadamard(dim: usize) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::dims(format!(
                "the X basis needs a power-of-two dimension, got {dim}"
            )));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(-s, 0.0),
            ],
        );
        let mut m = CMatrix::identity(1, 1);
        while m.nrows() < dim {
            m = m.kronecker(&h);
        }
        Ok(Basis { m })
    }

    pub(crate) fn from_unitary_unchecked(m: CMatrix) -> Self {
        Basis { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn len(&self) -> usize {
        self.m.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.m.ncols() == 0
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.m.column(i).into_owned()
    }

    pub fn vectors(&self) -> Vec<PureState> {
        (0..self.len())
            .map(|i| PureState { v: self.vector(i) })
            .collect()
    }

    /// Reorders the basis vectors: new vector `i` is old vector `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Basis> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len()
            || perm
                .iter()
                .any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::dims("not a permutation of the basis indices"));
        }
        let cols: Vec<CVector> = perm.iter().map(|&p| self.vector(p)).collect();
        Ok(Basis {
            m: CMatrix::from_columns(&cols),
        })
    }
}

impl ProbDist {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        Self::new_with(w, &Tolerances::default())
    }

    pub fn new_with(w: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::NotADistribution("no outcomes".into()));
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(neg) = w.iter().find(|&&x| x < 0.0) {
            return Err(Error::NotADistribution(format!("negative weight {neg}")));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > tol.norm {
            return Err(Error::NotADistribution(format!("weights sum to {total}")));
        }
        Ok(ProbDist { w })
    }

    /// Clamps rounding noise and rescales to unit sum.
    pub(crate) fn renormalized(w: Vec<f64>) -> Self {
        let w: Vec<f64> = w.into_iter().map(|x| x.max(0.0)).collect();
        let total: f64 = w.iter().sum();
        ProbDist {
            w: w.into_iter().map(|x| x / total).collect(),
        }
    }

    pub fn uniform(n: usize) -> Self {
        ProbDist {
            w: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.w.iter()
    }
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let weights: Vec<f64> = members.iter().map(|(p, _)| *p).collect();
        ProbDist::new(weights)?;
        let dim = members[0].1.dim();
        if members.iter().any(|(_, s)| s.dim() != dim) {
            return Err(Error::dims("ensemble members of different dimension"));
        }
        Ok(Ensemble { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `sum_i p_i |psi_i><psi_i|`
    pub fn density_matrix(&self) -> DensityMatrix {
        let d = self.members[0].1.dim();
        let mut m = CMatrix::zeros(d, d);
        for (p, s) in &self.members {
            m += (&s.v * s.v.adjoint()).scale(*p);
        }
        DensityMatrix::from_trusted(m)
    }
}

impl BlochVector {
    pub fn new(nx: f64, ny: f64, nz: f64) -> Result<Self> {
        if !(nx.is_finite() && ny.is_finite() && nz.is_finite()) {
            return Err(Error::NonFinite);
        }
        let b = BlochVector { nx, ny, nz };
        if b.norm() > 1.0 + Tolerances::default().norm {
            return Err(Error::NormExceedsOne { norm: b.norm() });
        }
        Ok(b)
    }

    pub fn norm(&self) -> f64 {
        (self.nx * self.nx + self.ny * self.ny + self.nz * self.nz).sqrt()
    }

    /// `(I + n.sigma) / 2`
    pub fn to_state(&self) -> DensityMatrix {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new((1.0 + self.nz) / 2.0, 0.0),
                C64::new(self.nx / 2.0, -self.ny / 2.0),
                C64::new(self.nx / 2.0, self.ny / 2.0),
                C64::new((1.0 - self.nz) / 2.0, 0.0),
            ],
        );
        if self.norm() > 1.0 {
            // within tolerance of the sphere; clamp the spectrum
            DensityMatrix::new(m).expect("Bloch vector within tolerance of the unit ball")
        } else {
            DensityMatrix { m }
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::dims(format!(
                "Bloch vectors describe qubits, got dim {}",
                rho.dim()
            )));
        }
        let m = rho.matrix();
        Ok(BlochVector {
            nx: 2.0 * m[(0, 1)].re,
            ny: -2.0 * m[(0, 1)].im,
            nz: (m[(0, 0)] - m[(1, 1)]).re,
        })
    }
}

impl From<BlochVector> for DensityMatrix {
    fn from(b: BlochVector) -> Self {
        b.to_state()
    }
}
