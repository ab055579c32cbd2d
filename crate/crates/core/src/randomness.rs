//! The two measures of measurement randomness in a reference basis.
//!
//! * `R^Q = S(rho_diag) - S(rho)`: Eve holds a purification and keeps her
//!   system quantum. Closed form.
//! * `R^C = min sum_i p_i H(|<k|psi_i>|^2)`: Eve measures first, which
//!   induces a pure-state decomposition `{p_i, psi_i}` of `rho`. Convex roof,
//!   found numerically.
//!
//! The convex-roof search parametrizes Eve's `m`-outcome measurement on the
//! support of the purification. With spectral data `rho = sum_j l_j |a_j><a_j|`
//! and an `m x m` unitary `U`, the unnormalized branch states are
//! `psi_i = sum_{j < rank} U_ij sqrt(l_j) |a_j>`; every decomposition of
//! `rho` into `m` pure states arises this way.

use serde::Serialize;

use crate::entropy::{shannon, von_neumann};
use crate::error::{Error, Result};
use crate::optim::{
    multistart, random_params, unitary_from_params, unitary_param_count, OptimizerConfig,
    OptimizerInfo,
};
use crate::qstate::{Basis, BlochVector, CMatrix, DensityMatrix, Ensemble, PureState, C64};
use crate::tolerance::Tolerances;

/// Agreement required between the optimizer and the qubit closed form.
pub const QUBIT_ORACLE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    ConvexRoofOptimizer,
    QubitOracle,
}

#[derive(Debug, Clone)]
pub struct RandomnessResult {
    /// Bits.
    pub value: f64,
    pub method: Method,
    pub optimizer: Option<OptimizerInfo>,
    /// Minimizing decomposition, for `R^C`.
    pub ensemble: Option<Ensemble>,
}

impl RandomnessResult {
    fn closed(value: f64) -> Self {
        RandomnessResult {
            value,
            method: Method::ClosedForm,
            optimizer: None,
            ensemble: None,
        }
    }

    /// False only when an optimizer run failed to converge.
    pub fn converged(&self) -> bool {
        self.optimizer.is_none_or(|info| info.converged)
    }
}

fn check_basis(rho_dim: usize, basis: &Basis) -> Result<()> {
    if basis.dim() != rho_dim {
        return Err(Error::dims(format!(
            "basis of dim {} for state of dim {rho_dim}",
            basis.dim()
        )));
    }
    Ok(())
}

/// Relative entropy of coherence `S(dephase(rho)) - S(rho)`.
pub fn r_quantum(rho: &DensityMatrix, basis: &Basis) -> Result<RandomnessResult> {
    check_basis(rho.dim(), basis)?;
    let diag = rho.dephase(basis)?;
    Ok(RandomnessResult::closed(
        (von_neumann(&diag) - von_neumann(rho)).max(0.0),
    ))
}

/// Shannon entropy of the outcome distribution of a pure state.
pub fn pure_state_randomness(psi: &PureState, basis: &Basis) -> Result<f64> {
    Ok(shannon(&psi.overlaps(basis)?))
}

/// `R^C` of a qubit measured along Z: `H((1 + sqrt(1 - nx^2 - ny^2)) / 2)`.
pub fn r_classical_qubit(n: &BlochVector) -> Result<f64> {
    let norm = n.norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if norm > 1.0 + Tolerances::default().norm {
        return Err(Error::NormExceedsOne { norm });
    }
    let c = (1.0 - n.nx * n.nx - n.ny * n.ny).max(0.0).sqrt();
    crate::entropy::binary_entropy(((1.0 + c) / 2.0).min(1.0))
}

/// [`r_classical_qubit`] for a qubit state measured in an arbitrary basis.
pub fn r_classical_qubit_oracle(rho: &DensityMatrix, basis: &Basis) -> Result<RandomnessResult> {
    let value = r_classical_qubit(&bloch_in_basis(rho, basis)?)?;
    Ok(RandomnessResult {
        method: Method::QubitOracle,
        ..RandomnessResult::closed(value)
    })
}

/// `R^Q` of a qubit measured along Z: `H((1 + nz) / 2) - H((1 + |n|) / 2)`.
pub fn r_quantum_qubit(n: &BlochVector) -> Result<f64> {
    let norm = n.norm();
    if norm > 1.0 + Tolerances::default().norm {
        return Err(Error::NormExceedsOne { norm });
    }
    let h = crate::entropy::binary_entropy;
    Ok(h(((1.0 + n.nz) / 2.0).clamp(0.0, 1.0))? - h(((1.0 + norm) / 2.0).min(1.0))?)
}

/// Bloch vector of a qubit expressed in `basis` (the basis plays the role of Z).
pub fn bloch_in_basis(rho: &DensityMatrix, basis: &Basis) -> Result<BlochVector> {
    check_basis(rho.dim(), basis)?;
    let rotated = DensityMatrix::new(basis.matrix().adjoint() * rho.matrix() * basis.matrix())?;
    BlochVector::from_state(&rotated)
}

/// Average outcome entropy of the decomposition generated by `u`.
///
/// `coeffs` holds `B^dag sqrt(l_j) a_j` as columns (`d x rank`); branch `i`
/// has basis amplitudes `sum_j u[i, j] coeffs[:, j]`.
struct RoofObjective {
    coeffs: CMatrix,
    m: usize,
}

impl RoofObjective {
    fn branches(&self, params: &[f64]) -> CMatrix {
        let u = unitary_from_params(params, self.m);
        let r = self.coeffs.ncols();
        &self.coeffs * u.view((0, 0), (self.m, r)).transpose()
    }

    fn value(&self, params: &[f64]) -> f64 {
        let u = unitary_from_params(params, self.m);
        let (d, r) = self.coeffs.shape();
        let xlogx = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
        let mut total = 0.0;
        for i in 0..self.m {
            let mut p = 0.0;
            let mut neg_entropy = 0.0;
            for k in 0..d {
                let mut amp = C64::new(0.0, 0.0);
                for j in 0..r {
                    amp += u[(i, j)] * self.coeffs[(k, j)];
                }
                let q = amp.norm_sqr();
                p += q;
                neg_entropy += xlogx(q);
            }
            total += xlogx(p) - neg_entropy;
        }
        total
    }

    fn ensemble(&self, params: &[f64], basis: &Basis) -> Ensemble {
        let psi = basis.matrix() * self.branches(params);
        let zero = Tolerances::default().zero;
        let members: Vec<(f64, PureState)> = psi
            .column_iter()
            .filter_map(|col| {
                let p = col.norm_squared();
                (p > zero).then(|| {
                    (
                        p,
                        PureState::normalized(col.into_owned()).expect("nonzero branch"),
                    )
                })
            })
            .collect();
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        Ensemble::new(members.into_iter().map(|(p, s)| (p / total, s)).collect())
            .expect("branch weights form a distribution")
    }
}

/// Coherence of formation by multistart search over Eve's measurements.
///
/// The value is an upper bound on the convex roof. Restart 0 starts from the
/// spectral decomposition; the others from seeded random unitaries. For
/// qubits the result is checked against [`r_classical_qubit`] and the
/// convergence flag is cleared if they disagree by more than
/// [`QUBIT_ORACLE_TOL`].
pub fn r_classical(
    rho: &DensityMatrix,
    basis: &Basis,
    cfg: &OptimizerConfig,
) -> Result<RandomnessResult> {
    check_basis(rho.dim(), basis)?;
    let spec = rho.spectrum();
    let rank = spec.values.iter().filter(|&&l| l > 0.0).count();

    if rank <= 1 {
        let psi = PureState::normalized(spec.vectors[0].clone())?;
        let value = pure_state_randomness(&psi, basis)?;
        return Ok(RandomnessResult {
            ensemble: Some(Ensemble::new(vec![(1.0, psi)])?),
            ..RandomnessResult::closed(value)
        });
    }
    if rho.is_incoherent(basis, Tolerances::default().zero)? {
        let pops = rho.populations(basis)?;
        let members = pops.iter().copied().zip(basis.vectors()).collect();
        return Ok(RandomnessResult {
            ensemble: Some(Ensemble::new(members)?),
            ..RandomnessResult::closed(0.0)
        });
    }

    let m = cfg.ensemble_size.unwrap_or(rank * rank);
    if m < rank {
        return Err(Error::InvalidConfig(format!(
            "ensemble size {m} is below the rank {rank}"
        )));
    }
    if cfg.tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerance {} must be positive",
            cfg.tol
        )));
    }

    let cols: Vec<_> = spec.values[..rank]
        .iter()
        .zip(&spec.vectors)
        .map(|(&l, a)| basis.matrix().adjoint() * a * C64::new(l.sqrt(), 0.0))
        .collect();
    let objective = RoofObjective {
        coeffs: CMatrix::from_columns(&cols),
        m,
    };
    let n_params = unitary_param_count(m);
    let best = multistart(
        cfg,
        |p| objective.value(p),
        |r, rng| {
            if r == 0 {
                vec![0.0; n_params]
            } else {
                random_params(n_params, rng)
            }
        },
    );

    let value = best.value.max(0.0);
    let mut info = best.info;
    if rho.dim() == 2 {
        let oracle = r_classical_qubit_oracle(rho, basis)?.value;
        info.converged = (value - oracle).abs() <= QUBIT_ORACLE_TOL;
    }
    Ok(RandomnessResult {
        value,
        method: Method::ConvexRoofOptimizer,
        optimizer: Some(info),
        ensemble: Some(objective.ensemble(&best.x, basis)),
    })
}

/// `R^C - R^Q`; nonnegative up to optimizer noise.
pub fn randomness_gap(rho: &DensityMatrix, basis: &Basis, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(r_classical(rho, basis, cfg)?.value - r_quantum(rho, basis)?.value)
}
