use proptest::prelude::*;
use qrandomness::entropy::{
    classical_conditional, quantum_conditional, relative_entropy, shannon, von_neumann,
};
use qrandomness::qstate::random::{random_basis, random_density_matrix, random_unitary};
use qrandomness::ProbDist;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shannon_is_concave(seed: u64, n in 1usize..=8, lambda in 0.0..=1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = dist(&mut rng, n);
        let q = dist(&mut rng, n);
        let mixed: Vec<f64> = p.iter().zip(&q).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let h = |v: Vec<f64>| shannon(&ProbDist::new(v).unwrap());
        let lhs = h(mixed);
        let rhs = lambda * h(p) + (1.0 - lambda) * h(q);
        prop_assert!(lhs >= rhs - 1e-9);
    }

    #[test]
    fn von_neumann_is_unitarily_invariant(seed: u64, dim in 1usize..=6, rank in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(dim, rank.min(dim), &mut rng);
        let u = random_unitary(dim, &mut rng);
        let moved = rho.conjugate(&u).unwrap();
        prop_assert!((von_neumann(&rho) - von_neumann(&moved)).abs() < 1e-9);
    }

    #[test]
    fn relative_entropy_to_dephased_state(seed: u64, dim in 2usize..=8, rank in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(dim, rank.min(dim), &mut rng);
        let basis = random_basis(dim, &mut rng);
        let deph = rho.dephase(&basis).unwrap();
        let lhs = relative_entropy(&rho, &deph).unwrap();
        prop_assert!((lhs - (von_neumann(&deph) - von_neumann(&rho))).abs() < 1e-9);
    }

    #[test]
    fn classical_conditional_is_nonnegative(seed: u64, nx in 1usize..=5, ny in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flat = dist(&mut rng, nx * ny);
        let joint: Vec<Vec<f64>> = flat.chunks(ny).map(<[f64]>::to_vec).collect();
        prop_assert!(classical_conditional(&joint).unwrap() >= 0.0);
    }

    #[test]
    fn quantum_conditional_is_bounded(seed: u64, da in 1usize..=3, db in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = da * db;
        let rank = rng.random_range(1..=d);
        let rho = random_density_matrix(d, rank, &mut rng);
        let s = quantum_conditional(&rho, (da, db)).unwrap();
        prop_assert!(s >= -(da as f64).log2() - 1e-9);
        prop_assert!(s <= (da as f64).log2() + 1e-9);
    }
}
