use lagspec_core::analysis::{
    classify_orders, count_in_interval, kolmogorov_distance, ks_two_sample, near_zero_count,
    near_zero_fraction, verify_extremes, DetectionScenario, Margins, Tolerances,
};
use lagspec_core::eig::{esd, hermitian_eigenvalues, Spectrum};
use lagspec_core::lsd::{boundary, LsdModel, MarchenkoPastur, SpectralLaw};
use lagspec_core::matrices::build_m_tau;
use lagspec_core::noise::{sample_panel, DistributionKind, SimulationConfig};
use proptest::prelude::*;

fn spectrum(v: &[f64]) -> Spectrum {
    Spectrum::new(v.to_vec()).unwrap()
}

/// Generalised inverse `inf{x : F(x) ≥ p}` by bisection on the cdf.
fn quantile(law: &LsdModel, p: f64) -> f64 {
    let d = law.boundary();
    let (mut lo, mut hi) = (-d - 1e-9, d + 1e-9);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if law.cdf(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if law.cdf_left(0.0) < p && p <= law.cdf(0.0) {
        return 0.0;
    }
    hi
}

/// Lower bound on the sup distance from a dense grid, both one-sided limits.
fn grid_distance(s: &Spectrum, law: &LsdModel) -> f64 {
    let f = esd(s).unwrap();
    let d = law.boundary() * 1.01;
    (0..=20_000)
        .map(|i| -d + 2.0 * d * i as f64 / 20_000.0)
        .map(|x| (f.cdf(x) - law.cdf(x)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn quantile_sample_is_close_to_its_law() {
    for c in [0.2, 1.0, 2.5] {
        let law = LsdModel::new(c).unwrap();
        for n in [10usize, 100, 400] {
            let v: Vec<f64> = (0..n)
                .map(|i| quantile(&law, (i as f64 + 0.5) / n as f64))
                .collect();
            let ks = kolmogorov_distance(&esd(&spectrum(&v)).unwrap(), &law);
            assert!(ks <= 1.0 / n as f64 + 1e-9, "c={c} n={n}: {ks}");
        }
    }
}

#[test]
fn exact_distance_dominates_grid_estimate() {
    for (c, seed_shift) in [(0.5, 0.0), (2.5, 0.3)] {
        let law = LsdModel::new(c).unwrap();
        let d = law.boundary();
        let v: Vec<f64> = (0..37)
            .map(|i| ((i as f64 * 0.618 + seed_shift).fract() * 2.0 - 1.0) * d)
            .collect();
        let s = spectrum(&v);
        let exact = kolmogorov_distance(&esd(&s).unwrap(), &law);
        let grid = grid_distance(&s, &law);
        assert!(exact + 1e-12 >= grid, "c={c}: {exact} < {grid}");
        assert!(exact - grid < 0.03, "c={c}: {exact} vs {grid}");
    }
}

#[test]
fn snapped_zeros_meet_the_atom() {
    let law = LsdModel::new(2.5).unwrap();
    let n = 500;
    let mut v: Vec<f64> = (0..n)
        .map(|i| quantile(&law, (i as f64 + 0.5) / n as f64))
        .collect();
    let radius = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for x in v.iter_mut().filter(|x| **x == 0.0) {
        *x = 1e-13 * radius;
    }
    let ks = kolmogorov_distance(&esd(&spectrum(&v)).unwrap(), &law);
    assert!(ks <= 1.0 / n as f64 + 1e-9, "{ks}");
}

#[test]
fn two_sample_distance() {
    let a = esd(&spectrum(&[1.0, 2.0, 3.0, 4.0])).unwrap();
    assert_eq!(ks_two_sample(&a, &a), 0.0);
    let b = esd(&spectrum(&[1.0, 2.0, 3.5, 5.0])).unwrap();
    assert_eq!(ks_two_sample(&a, &b), 0.25);
    let far = esd(&spectrum(&[10.0, 11.0])).unwrap();
    assert_eq!(ks_two_sample(&a, &far), 1.0);
}

#[test]
fn counting_examples() {
    let s = spectrum(&[-2.0, -1e-12, 0.0, 3e-9, 1.0, 4.0]);
    assert_eq!(count_in_interval(&s, -2.0, 0.0).unwrap(), 3);
    assert_eq!(count_in_interval(&s, 0.5, 0.5).unwrap(), 0);
    assert!(count_in_interval(&s, 1.0, -1.0).is_err());
    assert_eq!(near_zero_count(&s, 1e-8), 3);
    assert_eq!(near_zero_fraction(&s, 1e-8), 0.5);
    assert_eq!(near_zero_fraction(&spectrum(&[]), 1.0), 0.0);
}

#[test]
fn counting_rule_on_synthetic_spectra() {
    let c = 0.2;
    let margins = Margins {
        delta0: 0.15,
        delta1: 5.0,
    };
    let mp_cut = MarchenkoPastur::new(c).unwrap().edges().1 * 1.15;
    let lag_cut = boundary(c).unwrap() + 5.0;
    let bulk = [-1.0, 0.0, 1.0];
    let with = |extra: &[f64]| spectrum(&[&bulk[..], extra].concat());
    let spectra = vec![
        with(&[mp_cut + 1.0, mp_cut + 2.0, mp_cut + 3.0, mp_cut - 0.01]),
        with(&[lag_cut + 0.5, -lag_cut - 0.5]),
        with(&[]),
        with(&[-lag_cut - 3.0]),
        with(&[lag_cut - 0.01]),
    ];
    let rep = classify_orders(&spectra, c, margins).unwrap();
    assert_eq!(rep.counts, vec![3, 2, 0, 1, 0]);
    assert_eq!(rep.q_hat, 3);
    // round(3/4) = 1
    assert_eq!(rep.k_hat, 1);
    assert!((rep.lag0_threshold - mp_cut).abs() < 1e-12);
    assert!((rep.lag_threshold - lag_cut).abs() < 1e-12);

    let none = vec![with(&[]), with(&[])];
    let rep = classify_orders(&none, c, margins).unwrap();
    assert_eq!((rep.k_hat, rep.q_hat), (0, 0));
    assert!(classify_orders(&none[..1], c, margins).is_err());
}

#[test]
fn half_integers_round_up() {
    // N(0) = 3 over q̂ + 1 = 2 lags.
    let c = 0.2;
    let big = 100.0;
    let spectra = vec![spectrum(&[big, big, big]), spectrum(&[big])];
    let rep = classify_orders(
        &spectra,
        c,
        Margins {
            delta0: 0.0,
            delta1: 0.0,
        },
    )
    .unwrap();
    assert_eq!((rep.q_hat, rep.k_hat), (1, 2));
}

#[test]
fn noise_only_scenario_detects_nothing() {
    let sc = DetectionScenario {
        n: 60,
        t: 300,
        tau_max: 2,
        k: 0,
        q: 0,
        strength: 0.0,
        dist: DistributionKind::Rademacher,
    };
    let rep = classify_orders(
        &sc.spectra(4).unwrap(),
        sc.ratio(),
        Margins {
            delta0: 0.15,
            delta1: 5.0,
        },
    )
    .unwrap();
    assert_eq!((rep.k_hat, rep.q_hat), (0, 0));
}

#[test]
fn verification_report_is_deterministic_and_consistent() {
    let cfg = SimulationConfig::new(40, 200, 1).unwrap();
    let a = verify_extremes(
        cfg,
        DistributionKind::ComplexGaussian,
        4,
        11,
        Tolerances::default(),
    )
    .unwrap();
    let b = verify_extremes(
        cfg,
        DistributionKind::ComplexGaussian,
        4,
        11,
        Tolerances::default(),
    )
    .unwrap();
    assert_eq!(a, b);
    assert_eq!(a.recompute_summary(), a.summary);
    let seeds: Vec<u64> = a.records.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, vec![11, 12, 13, 14]);
    let max_hi = a
        .records
        .iter()
        .map(|r| (r.lambda_max.unwrap() - a.summary.boundary).abs())
        .fold(0.0, f64::max);
    assert_eq!(max_hi, a.summary.max_upper_deviation);
}

#[test]
fn wide_panel_reports_rank_zeros() {
    let cfg = SimulationConfig::new(50, 20, 1).unwrap();
    let rep = verify_extremes(
        cfg,
        DistributionKind::RealGaussian,
        2,
        0,
        Tolerances::default(),
    )
    .unwrap();
    assert!(rep.summary.min_near_zero >= 50 - 21);
}

fn m_spectrum(n: usize, t: usize, tau: usize, seed: u64) -> Spectrum {
    let cfg = SimulationConfig::new(n, t, tau).unwrap();
    let p = sample_panel(cfg, DistributionKind::ComplexGaussian, seed).unwrap();
    hermitian_eigenvalues(&build_m_tau(&p, tau).unwrap()).unwrap()
}

#[test]
fn lag_zero_follows_marchenko_pastur() {
    let mp = MarchenkoPastur::new(0.2).unwrap();
    for seed in 0..5 {
        let ks = kolmogorov_distance(&esd(&m_spectrum(200, 1000, 0, seed)).unwrap(), &mp);
        assert!(ks < 0.06, "seed {seed}: {ks}");
    }
}

#[test]
fn distance_to_limit_shrinks_with_dimension() {
    let law = LsdModel::new(0.2).unwrap();
    let medians: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&n| {
            let mut d: Vec<f64> = (0..20)
                .map(|s| kolmogorov_distance(&esd(&m_spectrum(n, 5 * n, 1, s)).unwrap(), &law))
                .collect();
            d.sort_by(f64::total_cmp);
            0.5 * (d[9] + d[10])
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_in_unit_interval(v in proptest::collection::vec(-5.0f64..5.0, 1..60), c in 0.1f64..4.0) {
        let law = LsdModel::new(c).unwrap();
        let ks = kolmogorov_distance(&esd(&spectrum(&v)).unwrap(), &law);
        prop_assert!((0.0..=1.0).contains(&ks));
    }

    #[test]
    fn two_sample_is_symmetric(a in proptest::collection::vec(-5.0f64..5.0, 1..40),
                               b in proptest::collection::vec(-5.0f64..5.0, 1..40)) {
        let (fa, fb) = (esd(&spectrum(&a)).unwrap(), esd(&spectrum(&b)).unwrap());
        prop_assert_eq!(ks_two_sample(&fa, &fb), ks_two_sample(&fb, &fa));
    }
}
