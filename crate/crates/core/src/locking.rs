//! Data-locking scenarios: Alice labels a classical message `i` (probability
//! `p_i`) and sends Eve a carrier state `|c_i>`. Eve can decode `X` fully once
//! Alice sends `R^Q` bits if Eve waits for them before measuring, or `R^C`
//! bits if Eve measures first. The difference is the discord of the
//! post-measurement state.

use serde::{Deserialize, Serialize};

use crate::discord::{assemble_cq, discord_b, CQState};
use crate::entropy::shannon;
use crate::error::{Error, Result};
use crate::optim::{OptimizerConfig, OptimizerInfo};
use crate::qstate::io::{BasisFile, VectorFile};
use crate::qstate::{Basis, CVector, DensityMatrix, ProbDist, PureState, Subsystem, C64};
use crate::randomness::{r_classical, r_quantum};

#[derive(Debug, Clone)]
pub struct EncodingScenario {
    message_probs: ProbDist,
    carriers: Vec<PureState>,
    label_basis: Basis,
}

impl EncodingScenario {
    /// `labels` defaults to the computational basis on `probs.len()` labels.
    pub fn new(probs: ProbDist, carriers: Vec<PureState>, labels: Option<Basis>) -> Result<Self> {
        if carriers.len() != probs.len() {
            return Err(Error::dims(format!(
                "{} carriers for {} messages",
                carriers.len(),
                probs.len()
            )));
        }
        let de = carriers[0].dim();
        if carriers.iter().any(|c| c.dim() != de) {
            return Err(Error::dims("carriers of different dimension"));
        }
        let label_basis = labels.unwrap_or_else(|| Basis::computational(probs.len()));
        if label_basis.dim() != probs.len() {
            return Err(Error::dims(format!(
                "label basis of dim {} for {} messages",
                label_basis.dim(),
                probs.len()
            )));
        }
        Ok(EncodingScenario {
            message_probs: probs,
            carriers,
            label_basis,
        })
    }

    /// Two uniform bits (basis, polarization): labels `00, 01, 10, 11` carry
    /// `|0>, |1>, |+>, |->`.
    pub fn bb84() -> Self {
        EncodingScenario {
            message_probs: ProbDist::uniform(4),
            carriers: vec![
                PureState::basis_state(2, 0),
                PureState::basis_state(2, 1),
                PureState::plus(),
                PureState::minus(),
            ],
            label_basis: Basis::computational(4),
        }
    }

    pub fn message_probs(&self) -> &ProbDist {
        &self.message_probs
    }

    pub fn carriers(&self) -> &[PureState] {
        &self.carriers
    }

    pub fn label_basis(&self) -> &Basis {
        &self.label_basis
    }

    /// `(label dim, carrier dim)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.label_basis.dim(), self.carriers[0].dim())
    }
}

/// JSON form: `{"probs": [...], "carriers": [pure states], "labels": basis?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub probs: Vec<f64>,
    pub carriers: Vec<VectorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BasisFile>,
}

impl ScenarioFile {
    pub fn to_scenario(&self) -> Result<EncodingScenario> {
        let probs = ProbDist::new(self.probs.clone())?;
        let carriers = self
            .carriers
            .iter()
            .map(VectorFile::to_state)
            .collect::<Result<Vec<_>>>()?;
        let labels = self.labels.as_ref().map(BasisFile::to_basis).transpose()?;
        EncodingScenario::new(probs, carriers, labels)
    }
}

pub fn parse_scenario(text: &str) -> Result<EncodingScenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_scenario()
}

/// `sum_i sqrt(p_i) |i>_A |c_i>_E`, normalized.
pub fn build_joint(scenario: &EncodingScenario) -> PureState {
    let (da, de) = scenario.dims();
    let mut v = CVector::zeros(da * de);
    for (i, (&p, c)) in scenario
        .message_probs
        .iter()
        .zip(&scenario.carriers)
        .enumerate()
    {
        let term = scenario.label_basis.vector(i).kronecker(c.amplitudes());
        v += term * C64::new(p.sqrt(), 0.0);
    }
    PureState::normalized(v).expect("joint state of a valid scenario is nonzero")
}

/// `sum_i p_i |i><i| (x) |c_i><c_i|`.
pub fn post_measurement_state(scenario: &EncodingScenario) -> Result<CQState> {
    CQState::new(
        scenario.message_probs.clone(),
        scenario.label_basis.clone(),
        scenario.carriers.iter().map(PureState::projector).collect(),
    )
}

/// Alice's reduced state `Tr_E |psi><psi|_AE`.
pub fn label_state(scenario: &EncodingScenario) -> Result<DensityMatrix> {
    build_joint(scenario)
        .projector()
        .partial_trace(scenario.dims(), Subsystem::A)
}

/// Key sizes in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockingReport {
    /// `R^Q`: bits Eve needs if she waits for them before measuring.
    pub key_after_measurement: f64,
    /// `R^C`: bits Eve needs if she measures before receiving them.
    pub key_before_measurement: f64,
    /// Discord of the post-measurement state.
    pub locking_advantage: f64,
    /// `H(p) - R^Q`.
    pub accessible_info_with_key: f64,
    pub message_entropy: f64,
    /// `|(before - after) - advantage|`
    pub residual: f64,
    pub roof_optimizer: Option<OptimizerInfo>,
    pub discord_optimizer: OptimizerInfo,
    pub converged: bool,
}

pub fn locking_report(
    scenario: &EncodingScenario,
    roof_cfg: &OptimizerConfig,
    discord_cfg: &OptimizerConfig,
) -> Result<LockingReport> {
    let rho_a = label_state(scenario)?;
    let basis = &scenario.label_basis;
    let rq = r_quantum(&rho_a, basis)?;
    let rc = r_classical(&rho_a, basis, roof_cfg)?;
    let cq = post_measurement_state(scenario)?;
    let d = discord_b(&assemble_cq(&cq)?, cq.dims(), discord_cfg)?;
    let h = shannon(&scenario.message_probs);
    Ok(LockingReport {
        key_after_measurement: rq.value,
        key_before_measurement: rc.value,
        locking_advantage: d.value,
        accessible_info_with_key: h - rq.value,
        message_entropy: h,
        residual: ((rc.value - rq.value) - d.value).abs(),
        roof_optimizer: rc.optimizer,
        discord_optimizer: d.optimizer,
        converged: rc.converged() && d.optimizer.converged,
    })
}
