//! Classical and quantum entropies, all in bits.
//!
//! Probabilities and eigenvalues below [`Tolerances::zero`] are treated as
//! exact zeros, which gives `0 log 0 = 0`.

use crate::error::{Error, Result};
use crate::qstate::{hermitian_spectrum, DensityMatrix, ProbDist, Subsystem};
use crate::tolerance::Tolerances;

fn zero_cutoff() -> f64 {
    Tolerances::default().zero
}

/// `-sum p log2 p` over raw weights, skipping negligible terms.
pub(crate) fn shannon_raw(weights: impl IntoIterator<Item = f64>) -> f64 {
    let cut = zero_cutoff();
    weights
        .into_iter()
        .filter(|&p| p >= cut)
        .map(|p| -p * p.log2())
        .sum()
}

pub fn shannon(p: &ProbDist) -> f64 {
    shannon_raw(p.iter().copied()).max(0.0)
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { value: x });
    }
    Ok(shannon_raw([x, 1.0 - x]).max(0.0))
}

pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    shannon_raw(rho.eigenvalues()).max(0.0)
}

/// `S(A|B) = S(AB) - S(B)` for a `dims.0 x dims.1` state. Negative for
/// entangled inputs.
pub fn quantum_conditional(rho_ab: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let rho_b = rho_ab.partial_trace(dims, Subsystem::B)?;
    Ok(von_neumann(rho_ab) - von_neumann(&rho_b))
}

/// `H(X|Y) = H(X,Y) - H(Y)` for a joint table indexed `[x][y]`.
pub fn classical_conditional(joint: &[Vec<f64>]) -> Result<f64> {
    let Some(first) = joint.first() else {
        return Err(Error::NotADistribution("empty joint table".into()));
    };
    let cols = first.len();
    if joint.iter().any(|row| row.len() != cols) {
        return Err(Error::NotADistribution("ragged joint table".into()));
    }
    // validates nonnegativity and normalization
    let flat = ProbDist::new(joint.iter().flatten().copied().collect())?;
    let marginal_y = (0..cols).map(|y| joint.iter().map(|row| row[y]).sum::<f64>());
    Ok((shannon(&flat) - shannon_raw(marginal_y)).max(0.0))
}

/// Quantum relative entropy `Tr[rho (log2 rho - log2 sigma)]`.
///
/// `log sigma` is taken on the support of `sigma` only. If `rho` puts more
/// than [`Tolerances::support`] weight outside that support the divergence is
/// infinite and `f64::INFINITY` is returned.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(format!(
            "relative entropy of dim {} against dim {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let tol = Tolerances::default();
    let spec = hermitian_spectrum(sigma.matrix(), tol.zero);
    let mut cross = 0.0;
    let mut outside = 0.0;
    for (&s, v) in spec.values.iter().zip(&spec.vectors) {
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if s > 0.0 {
            cross += w * s.log2();
        } else {
            outside += w;
        }
    }
    if outside > tol.support {
        return Ok(f64::INFINITY);
    }
    Ok((-von_neumann(rho) - cross).max(0.0))
}
