/// Numerical tolerances shared by every validation and rank decision.
///
/// `Tolerances::default()` holds the values used throughout the crate; the
/// `*_with` constructors accept an override.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max elementwise deviation from Hermiticity.
    pub hermitian: f64,
    /// Max |Tr - 1|.
    pub trace: f64,
    /// Eigenvalues down to `-psd` are clamped to zero; below that is an error.
    pub psd: f64,
    /// Max |norm - 1| for pure states and |sum - 1| for distributions.
    pub norm: f64,
    /// Max elementwise deviation of B^dag B from the identity.
    pub orthonormal: f64,
    /// Eigenvalues and probabilities below this are exact zeros.
    pub zero: f64,
    /// Weight of rho outside supp(sigma) that counts as a support violation.
    pub support: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-9,
            trace: 1e-9,
            psd: 1e-9,
            norm: 1e-9,
            orthonormal: 1e-9,
            zero: 1e-12,
            support: 1e-9,
        }
    }
}
