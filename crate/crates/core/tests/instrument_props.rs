use proptest::prelude::*;
use qtradeoff::instruments::{apply_channel, make_optimal_instrument, povm_of, OptimalFamilyParams};
use qtradeoff::qmath::herm_eigvals;
use qtradeoff::random::{random_density_matrix, random_diagonal_params, random_instrument};
use qtradeoff::{make_diagonal_instrument, CMat2, Instrument};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check(ins: &Instrument, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let povm = povm_of(ins);
    prop_assert!((*povm.e1() + *povm.e2()).max_abs_diff(&CMat2::identity()) < 1e-10);
    for _ in 0..8 {
        let rho = random_density_matrix(rng);
        let out = apply_channel(ins, &rho);
        prop_assert!((out.mat().trace().re - 1.0).abs() < 1e-9);
        prop_assert!(herm_eigvals(out.mat()).unwrap().min() > -1e-9);
    }
    Ok(())
}

proptest! {
    #[test]
    fn random_instruments_are_channels(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ins = random_instrument(&mut rng);
        check(&ins, &mut rng)?;
    }

    #[test]
    fn diagonal_family_is_valid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ins = make_diagonal_instrument(random_diagonal_params(&mut rng)).unwrap();
        check(&ins, &mut rng)?;
    }

    #[test]
    fn optimal_family_is_valid(gamma in 0.0..=1.0f64, beta in -3.2..3.2f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ins = make_optimal_instrument(OptimalFamilyParams::new(gamma, beta).unwrap()).unwrap();
        check(&ins, &mut rng)?;
    }
}
