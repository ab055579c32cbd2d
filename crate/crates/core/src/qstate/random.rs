//! Seeded random states, unitaries and bases.
//!
//! Unitaries are Haar-distributed (QR of a complex Ginibre matrix with the
//! phase correction on R's diagonal); mixed states are induced measures
//! `G G^dag / Tr` with a `dim x rank` Ginibre factor.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{Basis, BlochVector, CMatrix, CVector, DensityMatrix, PureState, C64};

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn random_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Basis {
    Basis::from_unitary_unchecked(random_unitary(dim, rng))
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v: CVector = ginibre(dim, 1, rng).column(0).into_owned();
    PureState::normalized(v).expect("Gaussian vector is nonzero with probability one")
}

/// Random state of the given dimension and (generic) rank.
pub fn random_density_matrix<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let g = ginibre(dim, rank.max(1), rng);
    DensityMatrix::from_trusted(&g * g.adjoint())
}

/// Uniform point in the closed unit ball.
pub fn random_bloch_in_ball<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    let z: f64 = rng.sample(StandardNormal);
    let n = (x * x + y * y + z * z).sqrt();
    let r = rng.random::<f64>().cbrt();
    BlochVector {
        nx: r * x / n,
        ny: r * y / n,
        nz: r * z / n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..6 {
            let u = random_unitary(d, &mut rng);
            assert!(Basis::new(u).is_ok());
        }
    }

    #[test]
    fn random_states_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 2..6 {
            let rho = random_density_matrix(d, d, &mut rng);
            assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
            assert_eq!(rho.rank(), d);
            let low = random_density_matrix(d, 1, &mut rng);
            assert!(low.is_pure());
        }
        for _ in 0..100 {
            assert!(random_bloch_in_ball(&mut rng).norm() <= 1.0);
        }
    }
}
