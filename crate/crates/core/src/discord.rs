//! Discord of bipartite states measured on the second party, and the check
//! that it closes the gap between the two randomness measures.

use serde::Serialize;

use crate::entropy::{shannon_raw, von_neumann};
use crate::error::{Error, Result};
use crate::optim::{
    multistart, random_params, unitary_from_params, unitary_param_count, OptimizerConfig,
    OptimizerInfo,
};
use crate::qstate::{Basis, CMatrix, CVector, DensityMatrix, ProbDist, PureState, Subsystem, C64};
use crate::randomness::{r_classical, r_quantum};
use crate::tolerance::Tolerances;

/// Classical-quantum state `sum_i p_i |i><i| (x) rho_i`.
#[derive(Debug, Clone)]
pub struct CQState {
    weights: ProbDist,
    pointer_basis: Basis,
    conditionals: Vec<DensityMatrix>,
}

impl CQState {
    pub fn new(
        weights: ProbDist,
        pointer_basis: Basis,
        conditionals: Vec<DensityMatrix>,
    ) -> Result<Self> {
        if weights.len() != pointer_basis.len() || conditionals.len() != weights.len() {
            return Err(Error::dims(format!(
                "{} weights, {} pointer states and {} conditionals",
                weights.len(),
                pointer_basis.len(),
                conditionals.len()
            )));
        }
        let de = conditionals[0].dim();
        if conditionals.iter().any(|c| c.dim() != de) {
            return Err(Error::dims("conditional states of different dimension"));
        }
        Ok(CQState {
            weights,
            pointer_basis,
            conditionals,
        })
    }

    pub fn weights(&self) -> &ProbDist {
        &self.weights
    }

    pub fn pointer_basis(&self) -> &Basis {
        &self.pointer_basis
    }

    pub fn conditionals(&self) -> &[DensityMatrix] {
        &self.conditionals
    }

    /// `(dim A, dim B)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.pointer_basis.dim(), self.conditionals[0].dim())
    }

    /// Pointer state `k` takes over the weight and conditional of pointer
    /// state `perm[k]`. Equivalent to a permutation unitary on A.
    pub fn relabelled(&self, perm: &[usize]) -> Result<CQState> {
        let mut seen = vec![false; self.weights.len()];
        for &i in perm {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::dims(format!("{perm:?} is not a permutation")));
            }
        }
        if perm.len() != seen.len() {
            return Err(Error::dims(format!("{perm:?} is not a permutation")));
        }
        let weights = ProbDist::new(perm.iter().map(|&i| self.weights.as_slice()[i]).collect())?;
        let conditionals = perm.iter().map(|&i| self.conditionals[i].clone()).collect();
        CQState::new(weights, self.pointer_basis.clone(), conditionals)
    }
}

/// Joint matrix of a CQ state; block diagonal in the pointer basis.
pub fn assemble_cq(cq: &CQState) -> Result<DensityMatrix> {
    let (da, de) = cq.dims();
    let mut m = CMatrix::zeros(da * de, da * de);
    for (i, (&p, cond)) in cq.weights.iter().zip(&cq.conditionals).enumerate() {
        if p == 0.0 {
            continue;
        }
        let v = cq.pointer_basis.vector(i);
        m += (&v * v.adjoint()).kronecker(cond.matrix()).scale(p);
    }
    Ok(DensityMatrix::from_trusted(m))
}

/// Pre-reshaped joint state for repeated conditioning on B outcomes.
struct Conditioner {
    blocks: Vec<Vec<CMatrix>>,
    da: usize,
}

impl Conditioner {
    fn new(rho: &DensityMatrix, (da, db): (usize, usize)) -> Result<Self> {
        if da * db != rho.dim() {
            return Err(Error::dims(format!(
                "subsystem dims {da}x{db} do not match state dim {}",
                rho.dim()
            )));
        }
        let m = rho.matrix();
        let blocks = (0..da)
            .map(|a| {
                (0..da)
                    .map(|a2| m.view((a * db, a2 * db), (db, db)).into_owned())
                    .collect()
            })
            .collect();
        Ok(Conditioner { blocks, da })
    }

    /// Unnormalized `<w|_B rho_AB |w>_B` as a `dA x dA` matrix.
    fn condition(&self, w: &CVector) -> CMatrix {
        let db = w.len();
        CMatrix::from_fn(self.da, self.da, |a, a2| {
            let block = &self.blocks[a][a2];
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..db {
                let mut row = C64::new(0.0, 0.0);
                for b2 in 0..db {
                    row += block[(b, b2)] * w[b2];
                }
                acc += w[b].conj() * row;
            }
            acc
        })
    }

    /// `sum_j q_j S(rho_A|j)` over rank-one effects `|w_j><w_j|` on B.
    fn measured_entropy(&self, effects: impl Iterator<Item = CVector>) -> f64 {
        let zero = Tolerances::default().zero;
        effects
            .map(|w| {
                let cond = self.condition(&w);
                let q = cond.trace().re;
                if q < zero {
                    return 0.0;
                }
                let ev = crate::qstate::hermitian_eigenvalues(&cond);
                // q S(cond / q) = -sum e log e + q log q
                shannon_raw(ev.iter().copied()) + q * q.log2()
            })
            .sum::<f64>()
            .max(0.0)
    }
}

/// `sum_j q_j S(rho_A|j)` after measuring B in `meas`; outcomes with
/// `q_j < 1e-12` are dropped.
pub fn conditional_entropy_after_measurement(
    rho_ab: &DensityMatrix,
    dims: (usize, usize),
    meas: &Basis,
) -> Result<f64> {
    let cond = Conditioner::new(rho_ab, dims)?;
    if meas.dim() != dims.1 {
        return Err(Error::dims(format!(
            "measurement of dim {} on subsystem of dim {}",
            meas.dim(),
            dims.1
        )));
    }
    Ok(cond.measured_entropy((0..meas.len()).map(|j| meas.vector(j))))
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscordResult {
    /// Bits.
    pub value: f64,
    /// Best measurement found, on B extended by the ancilla. Vectors of
    /// dimension `dB * ancilla_dim`, ancilla index slowest.
    #[serde(skip)]
    pub best_measurement: Basis,
    pub optimizer: OptimizerInfo,
}

/// `D_B = min_meas S(A|meas) - S(AB) + S(B)` over rank-one projective
/// measurements on B.
pub fn discord_b(
    rho_ab: &DensityMatrix,
    dims: (usize, usize),
    cfg: &OptimizerConfig,
) -> Result<DiscordResult> {
    discord_b_extended(rho_ab, dims, 1, cfg)
}

/// Like [`discord_b`], but B is first extended by an ancilla of dimension
/// `ancilla_dim` prepared in `|0>`. A projective measurement on the extended
/// system acts on B as a POVM with `dB * ancilla_dim` rank-one outcomes.
pub fn discord_b_extended(
    rho_ab: &DensityMatrix,
    dims: (usize, usize),
    ancilla_dim: usize,
    cfg: &OptimizerConfig,
) -> Result<DiscordResult> {
    if ancilla_dim == 0 {
        return Err(Error::InvalidConfig(
            "ancilla dimension must be positive".into(),
        ));
    }
    let cond = Conditioner::new(rho_ab, dims)?;
    let db = dims.1;
    let n = db * ancilla_dim;
    let offset = von_neumann(&rho_ab.partial_trace(dims, Subsystem::B)?) - von_neumann(rho_ab);

    let effects = |u: &CMatrix| {
        (0..n)
            .map(|j| u.view((0, j), (db, 1)).column(0).into_owned())
            .collect::<Vec<_>>()
    };
    let n_params = unitary_param_count(n);
    let best = multistart(
        cfg,
        |p| {
            let u = unitary_from_params(p, n);
            cond.measured_entropy(effects(&u).into_iter())
        },
        |r, rng| {
            if r == 0 {
                vec![0.0; n_params]
            } else {
                random_params(n_params, rng)
            }
        },
    );
    Ok(DiscordResult {
        value: best.value + offset,
        best_measurement: Basis::from_unitary_unchecked(unitary_from_params(&best.x, n)),
        optimizer: best.info,
    })
}

/// Outcome of [`verify_gap`], in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapCheck {
    pub r_classical: f64,
    pub r_quantum: f64,
    pub discord: f64,
    /// `|(r_classical - r_quantum) - discord|`
    pub residual: f64,
    pub converged: bool,
}

/// The classical-quantum state left after Alice measures her half of the
/// standard purification of `rho_a` in `basis`. Conditionals are Eve's pure
/// states `<i|psi><psi|i> / p_i`; zero-probability outcomes get a placeholder
/// projector.
pub fn post_measurement_cq(rho_a: &DensityMatrix, basis: &Basis) -> Result<CQState> {
    let d = rho_a.dim();
    if basis.dim() != d {
        return Err(Error::dims(format!(
            "basis of dim {} for state of dim {d}",
            basis.dim()
        )));
    }
    let psi = rho_a.purify();
    let amps = psi.amplitudes();
    let mut weights = Vec::with_capacity(d);
    let mut conditionals = Vec::with_capacity(d);
    for i in 0..d {
        let b = basis.vector(i);
        // (<b_i| (x) I_E) |psi>
        let e = CVector::from_fn(d, |k, _| {
            (0..d).map(|a| b[a].conj() * amps[a * d + k]).sum()
        });
        let p = e.norm_squared();
        weights.push(p);
        conditionals.push(match PureState::normalized(e) {
            Ok(s) if p > Tolerances::default().zero => s.projector(),
            _ => PureState::basis_state(d, 0).projector(),
        });
    }
    let total: f64 = weights.iter().sum();
    let weights = ProbDist::new(weights.into_iter().map(|w| w / total).collect())?;
    CQState::new(weights, basis.clone(), conditionals)
}

/// Computes `R^C`, `R^Q` and the discord of the post-measurement state and
/// reports how far `R^C - R^Q = D_E` is from holding.
///
/// `roof_cfg` drives the convex-roof search, `discord_cfg` the discord
/// search.
pub fn verify_gap(
    rho_a: &DensityMatrix,
    basis: &Basis,
    roof_cfg: &OptimizerConfig,
    discord_cfg: &OptimizerConfig,
) -> Result<GapCheck> {
    let rc = r_classical(rho_a, basis, roof_cfg)?;
    let rq = r_quantum(rho_a, basis)?;
    let cq = post_measurement_cq(rho_a, basis)?;
    let joint = assemble_cq(&cq)?;
    let d = discord_b(&joint, cq.dims(), discord_cfg)?;
    Ok(GapCheck {
        r_classical: rc.value,
        r_quantum: rq.value,
        discord: d.value,
        residual: ((rc.value - rq.value) - d.value).abs(),
        converged: rc.converged() && d.optimizer.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::shannon;
    use crate::qstate::BlochVector;

    fn z() -> Basis {
        Basis::computational(2)
    }

    #[test]
    fn assemble_single_term() {
        let rho_e = BlochVector::new(0.1, 0.2, 0.3).unwrap().to_state();
        let cq = CQState::new(
            ProbDist::new(vec![0.0, 1.0]).unwrap(),
            z(),
            vec![DensityMatrix::maximally_mixed(2), rho_e.clone()],
        )
        .unwrap();
        let joint = assemble_cq(&cq).unwrap();
        let expected = PureState::basis_state(2, 1).projector().tensor(&rho_e);
        assert!(joint.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn assemble_identical_conditionals_is_product() {
        let rho_e = BlochVector::new(0.4, 0.0, -0.3).unwrap().to_state();
        let cq = CQState::new(
            ProbDist::uniform(3),
            Basis::computational(3),
            vec![rho_e.clone(); 3],
        )
        .unwrap();
        let expected = DensityMatrix::maximally_mixed(3).tensor(&rho_e);
        assert!(assemble_cq(&cq).unwrap().max_abs_diff(&expected) < 1e-15);
        assert!(CQState::new(
            ProbDist::uniform(2),
            Basis::computational(3),
            vec![rho_e; 3]
        )
        .is_err());
    }

    #[test]
    fn conditional_entropy_of_product_ignores_measurement() {
        let a = BlochVector::new(0.3, -0.2, 0.5).unwrap().to_state();
        let b = BlochVector::new(0.0, 0.6, 0.1).unwrap().to_state();
        let joint = a.tensor(&b);
        for meas in [z(), Basis::hadamard(2).unwrap()] {
            let s = conditional_entropy_after_measurement(&joint, (2, 2), &meas).unwrap();
            assert!((s - von_neumann(&a)).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_entropy_of_classical_correlation_is_zero() {
        let p = ProbDist::new(vec![0.2, 0.5, 0.3]).unwrap();
        let conds = (0..3)
            .map(|i| PureState::basis_state(3, i).projector())
            .collect();
        let joint = assemble_cq(&CQState::new(p, Basis::computational(3), conds).unwrap()).unwrap();
        let s = conditional_entropy_after_measurement(&joint, (3, 3), &Basis::computational(3))
            .unwrap();
        assert!(s.abs() < 1e-12);
        assert!(conditional_entropy_after_measurement(&joint, (3, 3), &z()).is_err());
    }

    #[test]
    fn discord_of_product_and_classical_states_vanishes() {
        let cfg = OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::discord()
        };
        let a = BlochVector::new(0.3, -0.2, 0.5).unwrap().to_state();
        let b = BlochVector::new(0.0, 0.6, 0.1).unwrap().to_state();
        let d = discord_b(&a.tensor(&b), (2, 2), &cfg).unwrap();
        assert!(d.value.abs() < 1e-6, "{}", d.value);

        let p = ProbDist::new(vec![0.7, 0.3]).unwrap();
        let conds = vec![
            PureState::basis_state(2, 0).projector(),
            PureState::basis_state(2, 1).projector(),
        ];
        let joint = assemble_cq(&CQState::new(p, z(), conds).unwrap()).unwrap();
        let d = discord_b(&joint, (2, 2), &cfg).unwrap();
        assert!(d.value.abs() < 1e-6, "{}", d.value);
    }

    #[test]
    fn post_measurement_state_has_pure_conditionals() {
        let rho = BlochVector::new(0.3, 0.4, 0.1).unwrap().to_state();
        let cq = post_measurement_cq(&rho, &z()).unwrap();
        assert!(cq.conditionals().iter().all(|c| c.is_pure()));
        let pops = rho.populations(&z()).unwrap();
        for (w, p) in cq.weights().iter().zip(pops.iter()) {
            assert!((w - p).abs() < 1e-12);
        }
        // Eve's marginal is the spectrum-equivalent of rho
        let joint = assemble_cq(&cq).unwrap();
        let rho_e = joint.partial_trace((2, 2), Subsystem::B).unwrap();
        assert!((von_neumann(&rho_e) - von_neumann(&rho)).abs() < 1e-12);
        assert!((von_neumann(&joint) - shannon(&pops)).abs() < 1e-12);
    }

    #[test]
    fn verify_gap_on_pure_and_diagonal() {
        let cfg = OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::default()
        };
        let psi = PureState::from_amplitudes(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let g = verify_gap(&psi.projector(), &z(), &cfg, &cfg).unwrap();
        let h = crate::entropy::binary_entropy(0.36).unwrap();
        assert!((g.r_classical - h).abs() < 1e-12 && (g.r_quantum - h).abs() < 1e-12);
        assert!(g.discord.abs() < 1e-6 && g.residual < 1e-6);

        let diag = BlochVector::new(0.0, 0.0, 0.5).unwrap().to_state();
        let g = verify_gap(&diag, &z(), &cfg, &cfg).unwrap();
        assert!(g.r_classical.abs() < 1e-12 && g.r_quantum.abs() < 1e-12);
        assert!(g.discord.abs() < 1e-6 && g.residual < 1e-6);
    }

    #[test]
    fn verify_gap_on_mixed_qubit() {
        let rho = BlochVector::new(0.5, 0.0, 0.0).unwrap().to_state();
        let g = verify_gap(
            &rho,
            &z(),
            &OptimizerConfig::default(),
            &OptimizerConfig::discord(),
        )
        .unwrap();
        assert!(g.residual <= 2e-3, "{g:?}");
        assert!(g.converged);
    }

    #[test]
    fn extended_measurement_is_no_worse() {
        let rho = BlochVector::new(0.6, 0.2, -0.3).unwrap().to_state();
        let cq = post_measurement_cq(&rho, &z()).unwrap();
        let joint = assemble_cq(&cq).unwrap();
        let cfg = OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::discord()
        };
        let plain = discord_b(&joint, (2, 2), &cfg).unwrap();
        let ext = discord_b_extended(&joint, (2, 2), 2, &cfg).unwrap();
        assert!(ext.value <= plain.value + 1e-4);
        assert_eq!(ext.best_measurement.dim(), 4);
    }
}
