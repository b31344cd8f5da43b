use nqa_core::fourier::{fwht, FourierSpectrum};
use nqa_core::gauss::{psi_statistic, psi_statistics, sample_squared_forrelation};
use nqa_core::noise::ErrorVectorDistribution;
use nqa_core::sim::{
    bit_marginals, evolve_reference, output_distribution_noisy_dj, simulate_reference,
    total_variation, NoisyCircuit,
};
use nqa_core::stats::RunningMoments;
use nqa_core::{
    derive_rng, derive_seed, BitString, BooleanFunction, Convention, CovarianceSpec,
    ErrorDistribution, Label, Noise, Noise32, Spectrum, Spectrum32,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn function(max_n: usize) -> impl Strategy<Value = BooleanFunction> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), 1 << n)
            .prop_map(|bits| BooleanFunction::from_bits(&bits).unwrap())
    })
}

fn vector(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    (0..=max_n).prop_flat_map(|n| prop::collection::vec(-10.0..10.0f64, 1 << n))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_twice_scales_by_length(v in vector(7)) {
        let back = fwht(&fwht(&v).unwrap()).unwrap();
        let len = v.len() as f64;
        for (a, b) in v.iter().zip(&back) {
            prop_assert!(close(a * len, *b, 1e-12));
        }
    }

    #[test]
    fn parseval_holds_in_both_conventions(f in function(9)) {
        let mean = Spectrum::of(&f, Convention::Mean);
        let sqrt = Spectrum::of(&f, Convention::Sqrt);
        prop_assert!(close(mean.squared_norm(), 1.0, 1e-12));
        prop_assert!(close(sqrt.squared_norm(), f.len() as f64, 1e-12));
    }

    #[test]
    fn balanced_functions_carry_spectral_mass(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = BooleanFunction::random_balanced(n, &mut rng).unwrap();
        let spectrum = Spectrum::of(&f, Convention::Mean);
        prop_assert!(spectrum.coefficients()[0].abs() < 1e-15);
        let mass = spectrum.spectral_mass_per_bit().unwrap();
        prop_assert!(mass.iter().all(|&m| (0.0..=1.0 + 1e-12).contains(&m)));
        prop_assert!(mass.iter().sum::<f64>() >= 1.0 - 1e-12);
        let constant = Spectrum::of(&BooleanFunction::constant(n, -1).unwrap(), Convention::Mean);
        prop_assert!(constant.spectral_mass_per_bit().unwrap().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn negation_preserves_power(f in function(8)) {
        let a = Spectrum::of(&f, Convention::Mean).power();
        let b = Spectrum::of(&f.negated(), Convention::Mean).power();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn packed_bytes_round_trip(f in function(10)) {
        let bytes = f.to_packed_bytes();
        prop_assert_eq!(BooleanFunction::from_packed_bytes(f.n(), &bytes).unwrap(), f);
    }

    #[test]
    fn bit_strings_round_trip_through_text(n in 1usize..20, raw in any::<usize>()) {
        let s = BitString::new(n, raw & ((1 << n) - 1)).unwrap();
        prop_assert_eq!(BitString::parse(&s.to_string()).unwrap(), s);
        prop_assert_eq!(s ^ s, BitString::zeros(n).unwrap());
    }

    #[test]
    fn noise_parameters_stay_in_range(lambda in 0.0..=1.0f64, sbar in 0.0..=1.0f64) {
        let params = Noise::new(lambda).unwrap();
        prop_assert!((0.5..=1.0).contains(&params.p1()));
        prop_assert!((0.0..=0.5 + 1e-15).contains(&params.g()));
        let y = params.expected_bit_value(sbar);
        prop_assert!((0.0..=1.0).contains(&y));
        prop_assert!(y >= params.g() - 1e-15);
        prop_assert!(params.expected_bit_value(1.0) >= y - 1e-15);
    }

    #[test]
    fn analytic_model_matches_density_matrix(f in function(3), lambda in 0.0..=1.0f64) {
        let params = Noise::new(lambda).unwrap();
        let circuit = NoisyCircuit::deutsch_jozsa(&f);
        let exact = simulate_reference(&circuit, lambda).unwrap();
        let analytic = output_distribution_noisy_dj(&f, &params).unwrap();
        prop_assert!(total_variation(&exact, &analytic) < 1e-12);
        let mass = Spectrum::of(&f, Convention::Mean).spectral_mass_per_bit().unwrap();
        for (m, s) in bit_marginals(&analytic).iter().zip(&mass) {
            prop_assert!(close(*m, params.expected_bit_value(*s), 1e-12));
        }
        prop_assert!(evolve_reference(&circuit, lambda, 3).unwrap().validate().is_physical());
    }

    #[test]
    fn shifts_preserve_mass(n in 1usize..7, lambda in 0.0..=1.0f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = BooleanFunction::random(n, &mut rng).unwrap();
        let weights = Spectrum::of(&f, Convention::Mean).power();
        let iid = ErrorDistribution::iid(n, lambda).unwrap();
        let explicit = ErrorDistribution::explicit(iid.probabilities()).unwrap();
        let a = iid.shift(&weights).unwrap();
        let b = explicit.shift(&weights).unwrap();
        prop_assert!(close(a.iter().sum::<f64>(), 1.0, 1e-12));
        prop_assert!(a.iter().all(|&p| p >= -1e-15));
        prop_assert!(total_variation(&a, &b) < 1e-12);
        prop_assert!(total_variation(&a, &weights) <= 1.0 + 1e-12);
    }

    #[test]
    fn psi_for_all_shifts_matches_single_shifts(n in 1usize..6, seed in any::<u64>(), yes in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = CovarianceSpec::hardness_scale(n, 4.0).unwrap();
        let label = if yes { Label::Yes } else { Label::No };
        let sample = sample_squared_forrelation(&spec, label, &mut rng);
        let all = psi_statistics(&sample).unwrap();
        for (e, &value) in all.iter().enumerate() {
            let single = psi_statistic(&sample, BitString::new(n, e).unwrap()).unwrap();
            prop_assert!((single - value).abs() < 1e-12 * (1.0 + single.abs()));
        }
    }

    #[test]
    fn running_moments_merge_like_a_single_pass(
        a in prop::collection::vec(-100.0..100.0f64, 0..50),
        b in prop::collection::vec(-100.0..100.0f64, 0..50),
    ) {
        let mut left: RunningMoments = a.iter().copied().collect();
        left.merge(&b.iter().copied().collect());
        let whole: RunningMoments = a.iter().chain(&b).copied().collect();
        prop_assert_eq!(left.count(), whole.count());
        if whole.count() > 0 {
            prop_assert!(close(left.mean(), whole.mean(), 1e-10));
        }
        if whole.count() > 1 {
            prop_assert!(close(left.variance(), whole.variance(), 1e-9));
        }
    }

    #[test]
    fn single_precision_tracks_double(f in function(8), lambda in 0.0..=1.0f32) {
        let wide = Spectrum::of(&f, Convention::Mean);
        let narrow = Spectrum32::of(&f, Convention::Mean);
        for (a, b) in wide.coefficients().iter().zip(narrow.coefficients()) {
            prop_assert!((a - f64::from(*b)).abs() < 1e-6);
        }
        let p32 = Noise32::new(lambda).unwrap();
        let p64 = Noise::new(f64::from(lambda)).unwrap();
        prop_assert!((f64::from(p32.g()) - p64.g()).abs() < 1e-6);
        prop_assert!((f64::from(p32.p1()) - p64.p1()).abs() < 1e-6);
    }
}

#[test]
fn derived_streams_are_reproducible_and_distinct() {
    use rand::RngCore;
    let mut seen = std::collections::HashSet::new();
    for cell in 0..20 {
        for trial in 0..50 {
            let seed = derive_seed(7, cell, trial);
            assert_eq!(seed, derive_seed(7, cell, trial));
            assert!(seen.insert(seed));
        }
    }
    let a: Vec<u64> = (0..4).map(|_| derive_rng(7, 1, 2).next_u64()).collect();
    assert!(a.windows(2).all(|w| w[0] == w[1]));
    assert_ne!(derive_rng(7, 1, 2).next_u64(), derive_rng(8, 1, 2).next_u64());
}

#[test]
fn error_distributions_are_normalized() {
    for n in 1..=10 {
        for dist in [
            ErrorDistribution::iid(n, 0.3).unwrap(),
            ErrorDistribution::log_over_n(n).unwrap(),
            ErrorDistribution::noiseless(n).unwrap(),
            ErrorDistribution::uniform(n).unwrap(),
        ] {
            let total: f64 = dist.probabilities().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}");
            let e = BitString::new(n, (1 << n) - 1).unwrap();
            assert_eq!(dist.probability(e).unwrap(), dist.probabilities()[(1 << n) - 1]);
        }
    }
    let f32_dist = ErrorVectorDistribution::<f32>::iid(6, 0.2).unwrap();
    assert!((f32_dist.probabilities().iter().sum::<f32>() - 1.0).abs() < 1e-5);
    let _ = FourierSpectrum::<f32>::of(&BooleanFunction::constant(2, 1).unwrap(), Convention::Sqrt);
}
