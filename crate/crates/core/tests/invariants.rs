use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use stern_measure::dilation::Dilation;
use stern_measure::fourier::{level_measure, mu_hat, mu_hat_int, FourierCache, FourierSettings};
use stern_measure::sequence::{jsr_estimate, stern_pair, summatory_upto};
use stern_measure::wiener::{
    appendix_doubling, appendix_inequalities, atom_estimate, jw_moments, wiener_series,
};
use stern_measure::{Dyadic, GOLDEN_RATIO};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

#[test]
fn stern_four_n_plus_one() {
    for n in 0..=100_000u64 {
        let lhs = stern_pair(4 * n + 1).0;
        let (a, b) = stern_pair(2 * n);
        assert_eq!(lhs, a + b, "n = {n}");
    }
}

#[test]
fn summatory_block_boundaries() {
    for n in 1..=18u32 {
        let hi = summatory_upto(1 << n);
        let lo = summatory_upto(1 << (n - 1));
        // both endpoints are powers of two, where s = 1
        assert_eq!(hi - lo, BigUint::from(3u8).pow(n - 1));
    }
}

#[test]
fn jsr_is_golden_ratio() {
    let mut prev = 0.0;
    for len in 1..=12 {
        let est = jsr_estimate(len).unwrap();
        assert!(est.value >= prev);
        if len >= 2 {
            assert!(
                (est.value - GOLDEN_RATIO).abs() < 1e-12,
                "len {len}: {}",
                est.value
            );
            assert_eq!(est.word, vec![0, 1]);
        }
        prev = est.value;
    }
}

#[test]
fn ratio_identity_and_estimate() {
    let s = FourierSettings::default();
    for n in 0..=10 {
        let scale = 2f64.powi(n);
        for i in 1..=500 {
            let kappa = i as f64 / 1000.0;
            let num = mu_hat(scale * (1.0 - kappa), &s);
            let den = mu_hat(scale * kappa, &s);
            let base_den = mu_hat(kappa, &s);
            if den.abs() > 1e-9 && base_den.abs() > 1e-9 {
                let lhs = num / den;
                let rhs = mu_hat(1.0 - kappa, &s) / base_den;
                assert!(
                    (lhs - rhs).abs() <= 1e-7 * rhs.abs().max(1.0),
                    "N {n}, kappa {kappa}"
                );
            }
            assert!(num.abs() <= den.abs() + 1e-9, "N {n}, kappa {kappa}");
        }
    }
}

#[test]
fn cache_matches_direct_evaluation_across_threads() {
    use rayon::prelude::*;
    let s = FourierSettings::default();
    let cache = FourierCache::new(s, 64);
    let ks: Vec<i64> = (-2000..2000).collect();
    let via_cache: Vec<u64> = ks
        .par_iter()
        .map(|&k| cache.mu_hat_int(k).to_bits())
        .collect();
    let direct: Vec<u64> = ks.iter().map(|&k| mu_hat_int(k, &s).to_bits()).collect();
    assert_eq!(via_cache, direct);
    assert!(cache.len() <= 64);
}

#[test]
fn wiener_series_independent_of_thread_count() {
    let s = FourierSettings::default();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| wiener_series(16, &s).unwrap())
    };
    let one = run(1);
    let four = run(4);
    let bits = |w: &stern_measure::WienerSeries| -> Vec<u64> {
        w.sigma
            .iter()
            .chain(&w.sigma_grouped)
            .map(|v| v.to_bits())
            .collect()
    };
    assert_eq!(bits(&one), bits(&four));
    assert!(one.max_route_gap() < 1e-9);
}

#[test]
fn wiener_first_terms() {
    let s = FourierSettings::default();
    let w = wiener_series(20, &s).unwrap();
    // Σ₀ = 1 + μ̂(1)², Σ₁ = (1 + 2μ̂(1)²)/2
    let m1 = -0.0834320975932734f64;
    assert!((w.sigma[0] - (1.0 + m1 * m1)).abs() < 1e-12);
    assert!((w.sigma[1] - (1.0 + 2.0 * m1 * m1) / 2.0).abs() < 1e-12);
    assert!((w.sigma[20] - 1.1104e-6).abs() < 1e-9);
}

#[test]
fn first_appendix_inequality_fails_near_83() {
    let s = FourierSettings::default();
    let slacks = appendix_inequalities(4096, &s).unwrap();
    // high-precision reference: |μ̂(167)| − |μ̂(83) + μ̂(84)|/2 = 1.13410119647415e-7,
    // attained at k = 83 and at its mirror k = −84
    assert_eq!(slacks.worst_k_1, -84);
    assert!((slacks.worst_slack_1 - 1.13410119647415e-7).abs() < 1e-12);
    assert!(slacks.worst_slack_2 <= 1e-9);
    let at_83 = mu_hat_int(167, &s).abs() - 0.5 * (mu_hat_int(83, &s) + mu_hat_int(84, &s)).abs();
    assert_eq!(at_83, slacks.worst_slack_1);
}

#[test]
fn approximant_masses_approach_interval_measure() {
    let d = Dilation::new();
    let lm = level_measure(20).unwrap();
    for k in 1..=6u32 {
        for m in 0..(1u64 << (k - 1)) {
            let a = Dyadic::new(2 * m, k).unwrap();
            let b = Dyadic::new(2 * m + 1, k).unwrap();
            let gap = lm.interval_mass(&a, &b) - d.interval_measure(m, k).unwrap();
            assert!(gap.to_f64().unwrap().abs() < 1e-3, "m {m}, k {k}");
        }
    }
}

#[test]
fn f_components_monotone_on_grid() {
    let d = Dilation::new();
    let grid: Vec<_> = (0..=1u64 << 12)
        .map(|j| d.f_dyadic(&Dyadic::new(j, 12).unwrap()))
        .collect();
    for w in grid.windows(2) {
        assert!(w[0].f0 <= w[1].f0 && w[0].f1 <= w[1].f1);
    }
}

#[test]
fn moment_table_is_exact() {
    let t = jw_moments(8, 32).unwrap();
    assert_eq!(t.entries.len(), 9 * 32);
    assert!(
        t.first_moments_vanish && t.second_moments_closed_form && t.second_moment_series_cauchy
    );
    for e in &t.entries {
        if e.r % 2 == 1 && e.r > 0 {
            assert!(e.value.is_zero());
        }
        if e.r == 0 {
            assert!(e.value.is_one());
        }
    }
}

#[test]
fn atoms_vanish_in_the_limit() {
    let est = atom_estimate(&q(1, 4), 20).unwrap();
    assert!(est.neighbour_inequality);
    // s(2^n + 2^{n−2}) = s(5) = 3 for n ≥ 2
    assert_eq!(est.history[20], q(3, 3i64.pow(20)));
    assert!(est.history[1].is_zero());
    assert!(est.history.windows(2).skip(2).all(|w| w[1] < w[0]));
}

#[test]
fn symmetric_sums_decay_faster_than_the_bound() {
    let s = FourierSettings::default();
    let a = appendix_doubling(1 << 16, &s).unwrap();
    assert!(a.doubling_ratios.iter().all(|&(_, r)| r <= 1.5 + 1e-9));
    let alpha = 1.5f64.log2();
    assert!(
        a.decay_exponent >= 1.0 - alpha - 0.1,
        "{}",
        a.decay_exponent
    );
    assert!(a.alpha_empirical < alpha);
}
