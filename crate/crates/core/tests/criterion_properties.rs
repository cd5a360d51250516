use approx::assert_abs_diff_eq;
use kernsel::experiments::standard_bandwidths;
use kernsel::quadrature::{gaussian_cutoff, Integrator};
use kernsel::{
    empirical_contrast, estimate_at, penalty_value, select, BaseKernel, KernelModel, KnownDensity,
    PenaltyRule, Sample,
};
use proptest::prelude::*;

fn parzen_family(a: f64) -> Vec<KernelModel> {
    standard_bandwidths()
        .into_iter()
        .map(|h| KernelModel::parzen(BaseKernel::two_bump(a), h).unwrap())
        .collect()
}

fn histograms(max: usize) -> Vec<KernelModel> {
    (1..=max)
        .map(|d| KernelModel::histogram(d).unwrap())
        .collect()
}

fn rule() -> impl Strategy<Value = PenaltyRule> {
    prop_oneof![
        Just(PenaltyRule::OptimalTheoretical),
        Just(PenaltyRule::OptimalEmpirical),
        Just(PenaltyRule::Minimal),
        (-1.0..1.0f64).prop_map(PenaltyRule::MinimalPlusKappa),
    ]
}

/// A family with its sample, either Parzen on the line or histograms on `[0, 1]`.
fn family_and_sample() -> impl Strategy<Value = (Vec<KernelModel>, Sample)> {
    prop_oneof![
        (
            prop::sample::select(vec![0.0, 1.5, 2.0, 3.0]),
            2usize..40,
            any::<u64>()
        )
            .prop_map(|(a, n, seed)| {
                let s = KnownDensity::StdGaussian.sample(n, seed);
                (parzen_family(a), Sample::new(s).unwrap())
            }),
        (2usize..60, any::<u64>()).prop_map(|(n, seed)| {
            let s = KnownDensity::Triangular2x.sample(n, seed);
            (histograms(30), Sample::new(s).unwrap())
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn criterion_is_contrast_plus_penalty((family, sample) in family_and_sample(), rule in rule()) {
        let sel = select(&family, &sample, &rule).unwrap();
        for row in &sel.rows {
            prop_assert_eq!(row.criterion, row.contrast + row.penalty);
        }
        let best = sel.rows.iter().map(|r| r.criterion).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(sel.selected().criterion, best);
    }

    #[test]
    fn uniform_penalty_shift_keeps_the_selection(
        (family, sample) in family_and_sample(),
        rule in rule(),
        c in -1.0..1.0f64,
    ) {
        let sel = select(&family, &sample, &rule).unwrap();
        let shifted: Vec<f64> = sel.rows.iter().map(|r| r.penalty + c).collect();
        let moved = select(&family, &sample, &PenaltyRule::ExplicitTable(shifted)).unwrap();
        let mut sorted: Vec<f64> = sel.rows.iter().map(|r| r.criterion).collect();
        sorted.sort_by(f64::total_cmp);
        let scale = sel.rows.iter().map(|r| r.criterion.abs() + r.penalty.abs()).fold(1.0, f64::max);
        if sorted.len() < 2 || sorted[1] - sorted[0] > 1e-12 * scale {
            prop_assert_eq!(moved.selected_index, sel.selected_index);
        } else {
            let best = moved.rows.iter().map(|r| r.criterion).fold(f64::INFINITY, f64::min);
            prop_assert!(moved.rows[sel.selected_index].criterion - best <= 1e-12 * scale);
        }
    }

    #[test]
    fn empirical_optimal_penalty_equals_theoretical_for_constant_chi(
        (family, sample) in family_and_sample(),
        idx in 0usize..30,
    ) {
        let k = &family[idx % family.len()];
        let theo = penalty_value(&PenaltyRule::OptimalTheoretical, k, &sample, 0).unwrap();
        let emp = penalty_value(&PenaltyRule::OptimalEmpirical, k, &sample, 0).unwrap();
        prop_assert!((theo - emp).abs() <= 1e-13 * theo.abs(), "{} vs {}", theo, emp);
    }

    #[test]
    fn selection_is_deterministic((family, sample) in family_and_sample(), rule in rule()) {
        let a = select(&family, &sample, &rule).unwrap();
        let b = select(&family, &sample, &rule).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contrast_matches_quadrature(
        kind in 0usize..3,
        n in 1usize..=50,
        seed in any::<u64>(),
        h in 0.05..1.0f64,
        d in 1usize..25,
    ) {
        let (k, density) = match kind {
            0 => (KernelModel::parzen(BaseKernel::two_bump(1.5), h).unwrap(), KnownDensity::StdGaussian),
            1 => (KernelModel::histogram(d).unwrap(), KnownDensity::Uniform01),
            _ => (KernelModel::fourier_paired(0.9, &[0.6, 0.4]).unwrap(), KnownDensity::Triangular2x),
        };
        let sample = Sample::new(density.sample(n, seed)).unwrap();
        let f = |x: f64| estimate_at(&k, &sample, x).unwrap().powi(2);
        let sq = if let KernelModel::Parzen { base, h } = &k {
            let r = (base.shift() + gaussian_cutoff()) * h;
            let v = sample.values();
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min) - r;
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max) + r;
            Integrator::default().with_max_panel(*h).integrate(f, lo, hi, &[]).unwrap()
        } else {
            Integrator::default().integrate(f, 0.0, 1.0, &k.breakpoints()).unwrap()
        };
        let pn = sample.values().iter().map(|&x| estimate_at(&k, &sample, x).unwrap()).sum::<f64>() / n as f64;
        let exact = empirical_contrast(&k, &sample).unwrap();
        prop_assert!((exact - (sq - 2.0 * pn)).abs() <= 1e-6);
    }
}

#[test]
fn estimator_examples() {
    let k0 = KernelModel::parzen(BaseKernel::Gaussian, 1.0).unwrap();
    let one = Sample::new(vec![0.0]).unwrap();
    assert_abs_diff_eq!(
        estimate_at(&k0, &one, 0.0).unwrap(),
        0.398_942_3,
        epsilon = 1e-7
    );

    let h2 = KernelModel::histogram(2).unwrap();
    let s = Sample::new(vec![0.1, 0.2, 0.7]).unwrap();
    assert_abs_diff_eq!(
        estimate_at(&h2, &s, 0.3).unwrap(),
        4.0 / 3.0,
        epsilon = 1e-15
    );

    let h1 = KernelModel::histogram(1).unwrap();
    assert_eq!(estimate_at(&h1, &s, 0.9).unwrap(), 1.0);
    assert_eq!(empirical_contrast(&h1, &s).unwrap(), -1.0);

    let same_bin = Sample::new(vec![0.1, 0.2]).unwrap();
    assert_eq!(empirical_contrast(&h2, &same_bin).unwrap(), -2.0);
}

#[test]
fn single_kernel_family_selects_it() {
    let family = vec![KernelModel::histogram(3).unwrap()];
    let s = Sample::new(vec![0.2, 0.9]).unwrap();
    let sel = select(&family, &s, &PenaltyRule::Minimal).unwrap();
    assert_eq!(sel.selected_index, 0);
}

#[test]
fn unpenalized_parzen_selects_smallest_bandwidth() {
    let family = parzen_family(0.0);
    let sample = Sample::new(KnownDensity::StdGaussian.sample(100, 2024)).unwrap();
    let sel = select(&family, &sample, &PenaltyRule::zeros(family.len())).unwrap();
    let KernelModel::Parzen { h, .. } = family[sel.selected_index] else {
        unreachable!()
    };
    assert_eq!(h, 0.01);
}

#[test]
fn histogram_penalties() {
    let s = Sample::new(vec![0.3; 4]).unwrap();
    let k = KernelModel::histogram(6).unwrap();
    assert_abs_diff_eq!(
        penalty_value(&PenaltyRule::OptimalTheoretical, &k, &s, 0).unwrap(),
        12.0 / 4.0
    );
    assert_abs_diff_eq!(
        penalty_value(&PenaltyRule::Minimal, &k, &s, 0).unwrap(),
        6.0 / 4.0
    );
}

#[test]
fn mismatched_table_is_a_config_error() {
    let s = Sample::new(vec![0.3, 0.4]).unwrap();
    let err = select(
        &histograms(3),
        &s,
        &PenaltyRule::ExplicitTable(vec![0.0; 2]),
    )
    .unwrap_err();
    assert!(matches!(err, kernsel::Error::Config(_)));
}

#[test]
fn out_of_domain_sample_is_a_data_error() {
    let s = Sample::new(vec![0.3, 1.4]).unwrap();
    let err = select(&histograms(3), &s, &PenaltyRule::Minimal).unwrap_err();
    assert!(matches!(
        err,
        kernsel::Error::Data(_) | kernsel::Error::Domain { .. }
    ));
}
