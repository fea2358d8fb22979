//! Quantitative checks around Wiener's criterion: the averages
//! `Σ_N = 2^{−N} Σ_{k=0}^{2^N} |μ̂(k)|²` and their decay inequalities, the
//! coefficient ratio bound on `[0, 1]`, the symmetric sums
//! `Σ(N) = Σ_{|k| ≤ N} μ̂(k)²`, moments of the convolution factors
//! `ν_m = (1/3)(δ₀ + δ_{2^{−m}} + δ_{−2^{−m}})`, and atoms of `μ_n`.
//!
//! Every floating-point reduction runs over fixed-size chunks whose partial
//! sums are combined in chunk order, so results do not depend on the number
//! of worker threads.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::dilation::least_squares_slope;
use crate::dyadic::is_dyadic;
use crate::error::{out_of_range, Result};
use crate::fourier::{level_measure, mu_hat, mu_hat_int, odd_part, FourierSettings};
use crate::sequence::stern_pair;

const CHUNK: u64 = 1 << 12;

pub const WIENER_MAX_EXPONENT: u32 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct WienerSeries {
    pub max_exponent: u32,
    /// `Σ_N` for `N = 0..=max_exponent`, summed over `k` directly.
    pub sigma: Vec<f64>,
    /// The same averages regrouped by odd part,
    /// `2^{−N}(1 + Σ_{odd j ≤ 2^N} |μ̂(j)|² (⌊log₂(2^N/j)⌋ + 1))`.
    pub sigma_grouped: Vec<f64>,
    pub settings: FourierSettings,
}

impl WienerSeries {
    /// `Σ_N`, with `Σ_{−1} = 0`.
    pub fn get(&self, n: i64) -> f64 {
        if n < 0 {
            0.0
        } else {
            self.sigma[n as usize]
        }
    }

    pub fn max_route_gap(&self) -> f64 {
        self.sigma
            .iter()
            .zip(&self.sigma_grouped)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Chunked, order-fixed parallel sum of `term(i)` over `i ∈ [0, len)`.
fn chunked_sum<F>(len: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    let chunks = len.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(len);
            (lo..hi).map(&term).sum::<f64>()
        })
        .collect();
    partial.iter().sum()
}

/// `|μ̂(j)|²` for odd `j = 2i + 1 ≤ limit`, indexed by `i`.
fn odd_squares(limit: u64, settings: &FourierSettings) -> Vec<f64> {
    let count = limit.div_ceil(2) as usize;
    (0..count)
        .into_par_iter()
        .with_min_len(CHUNK as usize)
        .map(|i| {
            let v = mu_hat((2 * i + 1) as f64, settings);
            v * v
        })
        .collect()
}

pub fn wiener_series(n_max: u32, settings: &FourierSettings) -> Result<WienerSeries> {
    if n_max > WIENER_MAX_EXPONENT {
        return Err(out_of_range(n_max, "[0, 20]"));
    }
    let top = 1u64 << n_max;
    let squares = odd_squares(top, settings);
    let sq = |k: u64| -> f64 {
        match odd_part(k) {
            0 => 1.0,
            j => squares[(j / 2) as usize],
        }
    };
    let mut sigma = Vec::with_capacity(n_max as usize + 1);
    let mut sigma_grouped = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let len = 1u64 << n;
        let scale = 0.5f64.powi(n as i32);
        sigma.push(chunked_sum(len + 1, sq) * scale);

        let odd_count = len.div_ceil(2);
        let grouped = chunked_sum(odd_count, |i| {
            let j = 2 * i + 1;
            let doublings = if j == 1 {
                n
            } else {
                n - (64 - j.leading_zeros())
            };
            squares[i as usize] * (doublings as f64 + 1.0)
        });
        sigma_grouped.push((1.0 + grouped) * scale);
    }
    Ok(WienerSeries {
        max_exponent: n_max,
        sigma,
        sigma_grouped,
        settings: *settings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublinearCheck {
    pub n: u32,
    /// `Σ_N < Σ_{N−1} − (15/64) Σ_{N−2}`
    pub sublinear: bool,
    /// `Σ_N < (49/64) Σ_{N−2}`
    pub two_step: bool,
    /// `Σ_N ≤ (7/8)^{N−1} max(Σ₀, Σ₁)`
    pub geometric: bool,
}

pub fn check_sublinear(series: &WienerSeries) -> Result<Vec<SublinearCheck>> {
    if series.max_exponent < 2 {
        return Err(out_of_range(series.max_exponent, "N_max ≥ 2"));
    }
    let start = series.get(0).max(series.get(1));
    Ok((2..=series.max_exponent)
        .map(|n| {
            let cur = series.get(n as i64);
            let prev = series.get(n as i64 - 1);
            let prev2 = series.get(n as i64 - 2);
            SublinearCheck {
                n,
                sublinear: cur < prev - 15.0 / 64.0 * prev2,
                two_step: cur < 49.0 / 64.0 * prev2,
                geometric: cur <= (7.0f64 / 8.0).powi(n as i32 - 1) * start,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBound {
    /// Position of `max_{[3/5, 1]} |μ̂|`.
    pub argmax: f64,
    pub max_value: f64,
    /// Position of `min_{[0, 2/5]} |μ̂|`.
    pub argmin: f64,
    pub min_value: f64,
    pub ratio: f64,
}

const GOLDEN_SECTION_WIDTH: f64 = 1e-9;

/// `max_{κ∈[3/5,1]} |μ̂(κ)| / min_{κ∈[0,2/5]} |μ̂(κ)|` from a uniform grid of
/// `grid` points on each interval, with golden-section refinement inside the
/// best grid cell.
pub fn ratio_bound_check(settings: &FourierSettings, grid: usize) -> Result<RatioBound> {
    if grid < 1000 {
        return Err(out_of_range(grid, "grid ≥ 1000"));
    }
    let abs_mu = |x: f64| mu_hat(x, settings).abs();
    let (argmax, max_value) = grid_extremum(0.6, 1.0, grid, &|x| abs_mu(x));
    let (argmin, neg_min) = grid_extremum(0.0, 0.4, grid, &|x| -abs_mu(x));
    let min_value = -neg_min;
    Ok(RatioBound {
        argmax,
        max_value,
        argmin,
        min_value,
        ratio: max_value / min_value,
    })
}

fn grid_extremum(a: f64, b: f64, grid: usize, f: &(dyn Fn(f64) -> f64 + Sync)) -> (f64, f64) {
    let step = (b - a) / (grid - 1) as f64;
    let at = |i: usize| {
        if i == grid - 1 {
            b
        } else {
            a + step * i as f64
        }
    };
    let values: Vec<f64> = (0..grid).into_par_iter().map(|i| f(at(i))).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    if best == 0 || best == grid - 1 {
        return (at(best), values[best]);
    }
    golden_section_max(at(best - 1), at(best + 1), f)
}

fn golden_section_max(mut lo: f64, mut hi: f64, f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = 1.0 / crate::GOLDEN_RATIO;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > GOLDEN_SECTION_WIDTH {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixSlacks {
    /// `max_k |μ̂(2k+1)| − (1/2)|μ̂(k) + μ̂(k+1)|` (non-positive when the first
    /// inequality holds everywhere).
    pub worst_slack_1: f64,
    pub worst_k_1: i64,
    /// `max_k μ̂(2k+1)(μ̂(2k) + μ̂(2k+2))`.
    pub worst_slack_2: f64,
    pub worst_k_2: i64,
}

pub const APPENDIX_K_MAX: i64 = 100_000;

/// Sweep both coefficient inequalities over `|k| ≤ k_max`.
pub fn appendix_inequalities(k_max: i64, settings: &FourierSettings) -> Result<AppendixSlacks> {
    if !(0..=APPENDIX_K_MAX).contains(&k_max) {
        return Err(out_of_range(k_max, "[0, 100000]"));
    }
    let per_k: Vec<(f64, f64)> = (-k_max..=k_max)
        .into_par_iter()
        .map(|k| {
            let c = |j: i64| mu_hat_int(j, settings);
            let odd = c(2 * k + 1);
            let s1 = odd.abs() - 0.5 * (c(k) + c(k + 1)).abs();
            let s2 = odd * (c(2 * k) + c(2 * k + 2));
            (s1, s2)
        })
        .collect();
    // first (smallest) k wins ties
    let worst = |pick: fn(&(f64, f64)) -> f64| -> (f64, i64) {
        let mut best = (f64::NEG_INFINITY, -k_max);
        for (i, v) in per_k.iter().enumerate() {
            if pick(v) > best.0 {
                best = (pick(v), i as i64 - k_max);
            }
        }
        best
    };
    let (worst_slack_1, worst_k_1) = worst(|v| v.0);
    let (worst_slack_2, worst_k_2) = worst(|v| v.1);
    Ok(AppendixSlacks {
        worst_slack_1,
        worst_k_1,
        worst_slack_2,
        worst_k_2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixSeries {
    /// `(N, Σ(N))` for `N = 2^j ≤ n_max`.
    pub at_powers: Vec<(u64, f64)>,
    /// `(N, Σ(4N)/Σ(2N))` for `N = 2^j ≤ n_max/4`.
    pub doubling_ratios: Vec<(u64, f64)>,
    /// Fitted exponent `d` in `Σ(N)/N ~ N^{−d}`.
    pub decay_exponent: f64,
    /// `1 − d`, to compare against the bound `log₂(3/2)`.
    pub alpha_empirical: f64,
}

pub const APPENDIX_N_MAX: u64 = 1 << 16;

/// `Σ(N) = 1 + 2 Σ_{k=1}^{N} μ̂(k)²` for every `N = 0..=n_max`.
pub fn appendix_sigma_all(n_max: u64, settings: &FourierSettings) -> Result<Vec<f64>> {
    if n_max > APPENDIX_N_MAX {
        return Err(out_of_range(n_max, "[0, 65536]"));
    }
    let squares = odd_squares(n_max, settings);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut acc = 0.0f64;
    out.push(1.0);
    for k in 1..=n_max {
        acc += squares[(odd_part(k) / 2) as usize];
        out.push(1.0 + 2.0 * acc);
    }
    Ok(out)
}

pub fn appendix_doubling(n_max: u64, settings: &FourierSettings) -> Result<AppendixSeries> {
    let all = appendix_sigma_all(n_max, settings)?;
    let powers: Vec<u64> = (0..64)
        .map(|j| 1u64 << j)
        .take_while(|&p| p <= n_max)
        .collect();
    let at_powers: Vec<(u64, f64)> = powers.iter().map(|&p| (p, all[p as usize])).collect();
    let doubling_ratios = powers
        .iter()
        .filter(|&&p| 4 * p <= n_max)
        .map(|&p| (p, all[4 * p as usize] / all[2 * p as usize]))
        .collect();
    let pts: Vec<(f64, f64)> = at_powers
        .iter()
        .filter(|(p, _)| *p >= 2)
        .map(|&(p, s)| ((p as f64).log2(), (s / p as f64).log2()))
        .collect();
    let slope = if pts.len() >= 2 {
        least_squares_slope(&pts)
    } else {
        f64::NAN
    };
    Ok(AppendixSeries {
        at_powers,
        doubling_ratios,
        decay_exponent: -slope,
        alpha_empirical: 1.0 + slope,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentEntry {
    pub r: u32,
    pub m: u32,
    /// `M_r(ν_m) = ∫ x^r dν_m`.
    pub value: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentTable {
    pub entries: Vec<MomentEntry>,
    /// `M₁(ν_m) = 0` for every tabulated `m`.
    pub first_moments_vanish: bool,
    /// `M₂(ν_m) = (2/3) 4^{−m}` for every tabulated `m`.
    pub second_moments_closed_form: bool,
    /// Partial sums of `M₂` increase with exact tail `(2/9) 4^{−M}`.
    pub second_moment_series_cauchy: bool,
}

pub const MOMENT_R_MAX: u32 = 8;
pub const MOMENT_M_MAX: u32 = 32;

/// `M_r(ν_m) = (1/3)(0^r + 2^{−rm} + (−1)^r 2^{−rm})`, with `0⁰ = 1`.
pub fn moment(r: u32, m: u32) -> BigRational {
    let zero_pow = if r == 0 {
        BigInt::one()
    } else {
        BigInt::zero()
    };
    let pow = BigRational::new(BigInt::one(), BigInt::one() << (r as u64 * m as u64));
    let sign = if r.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let sum = BigRational::from_integer(zero_pow) + &pow + BigRational::from_integer(sign) * &pow;
    sum / BigRational::from_integer(BigInt::from(3))
}

pub fn jw_moments(r_max: u32, m_max: u32) -> Result<MomentTable> {
    if r_max > MOMENT_R_MAX {
        return Err(out_of_range(r_max, "[0, 8]"));
    }
    if m_max == 0 || m_max > MOMENT_M_MAX {
        return Err(out_of_range(m_max, "[1, 32]"));
    }
    let mut entries = Vec::new();
    for r in 0..=r_max {
        for m in 1..=m_max {
            entries.push(MomentEntry {
                r,
                m,
                value: moment(r, m),
            });
        }
    }
    let q = |n: i64, d: BigInt| BigRational::new(BigInt::from(n), d);
    let four_pow = |m: u32| BigInt::one() << (2 * m as u64);
    let first_moments_vanish = (1..=m_max).all(|m| moment(1, m).is_zero());
    let second_moments_closed_form =
        (1..=m_max).all(|m| moment(2, m) == q(2, BigInt::from(3) * four_pow(m)));
    let limit = q(2, BigInt::from(9));
    let mut partial = BigRational::zero();
    let mut cauchy = true;
    for m in 1..=m_max {
        let next = &partial + moment(2, m);
        cauchy &= next > partial && &limit - &next == q(2, BigInt::from(9) * four_pow(m));
        partial = next;
    }
    Ok(MomentTable {
        entries,
        first_moments_vanish,
        second_moments_closed_form,
        second_moment_series_cauchy: cauchy,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomEstimate {
    /// `μ_n({x})` at `n = n_max`.
    pub atom: BigRational,
    /// `μ_n({x})` for `n = 0..=n_max`.
    pub history: Vec<BigRational>,
    /// `μ_n({y}) ≤ μ_n({y + 2^{−n}}) + μ_n({y − 2^{−n}})` at every interior
    /// grid point `y` of level `n_max`.
    pub neighbour_inequality: bool,
}

pub const ATOM_MAX_LEVEL: u32 = 20;

pub const ATOM_POINT_MAX_LEVEL: u32 = 10;

/// Atoms of the approximants at a rational point `x ∈ [0, 1)`. Dyadic points
/// may have level at most 10; other rationals carry no atoms at any level.
pub fn atom_estimate(x: &BigRational, n_max: u32) -> Result<AtomEstimate> {
    if n_max > ATOM_MAX_LEVEL {
        return Err(out_of_range(n_max, "[0, 20]"));
    }
    let zero = BigRational::zero();
    if *x < zero || *x >= BigRational::one() {
        return Err(out_of_range(x, "[0, 1)"));
    }
    if is_dyadic(x) && x.denom().bits() > u64::from(ATOM_POINT_MAX_LEVEL) + 1 {
        return Err(out_of_range(x, "dyadic level ≤ 10"));
    }
    let history: Vec<BigRational> = (0..=n_max).map(|n| approximant_atom(x, n)).collect();
    let weights = level_measure(n_max)?;
    let w = weights.numerators();
    let neighbour_inequality = w.windows(3).all(|t| t[1] <= t[0] + t[2]);
    Ok(AtomEstimate {
        atom: history.last().cloned().unwrap_or(zero),
        history,
        neighbour_inequality,
    })
}

fn approximant_atom(x: &BigRational, n: u32) -> BigRational {
    if !is_dyadic(x) {
        return BigRational::zero();
    }
    let scaled = x * BigRational::from_integer(BigInt::from(1u64 << n));
    if !scaled.is_integer() {
        return BigRational::zero();
    }
    let m = u64::try_from(scaled.to_integer()).expect("0 ≤ m < 2^n");
    let s = stern_pair((1u64 << n) + m).0;
    BigRational::new(BigInt::from(s), BigInt::from(3u64.pow(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn first_averages() {
        let s = FourierSettings::default();
        let w = wiener_series(6, &s).unwrap();
        assert_eq!(w.sigma.len(), 7);
        assert!((w.sigma[0] - 1.006961).abs() < 1e-5);
        assert_eq!(w.get(-1), 0.0);
        assert!(w.max_route_gap() < 1e-12);
        for n in 2..=6 {
            assert!(w.sigma[n] < w.sigma[n - 1]);
        }
        assert!(wiener_series(21, &s).is_err());
    }

    #[test]
    fn sublinear_inequalities() {
        let s = FourierSettings::default();
        let w = wiener_series(8, &s).unwrap();
        let checks = check_sublinear(&w).unwrap();
        assert_eq!(checks.len(), 7);
        assert!(checks
            .iter()
            .all(|c| c.sublinear && c.two_step && c.geometric));
        let short = wiener_series(1, &s).unwrap();
        assert!(check_sublinear(&short).is_err());
    }

    #[test]
    fn moments() {
        assert_eq!(moment(0, 3), q(1, 1));
        assert_eq!(moment(1, 5), q(0, 1));
        assert_eq!(moment(2, 1), q(1, 6));
        assert_eq!(moment(3, 2), q(0, 1));
        assert_eq!(moment(4, 1), q(2, 48));
        let t = jw_moments(4, 10).unwrap();
        assert_eq!(t.entries.len(), 50);
        assert!(t.first_moments_vanish && t.second_moments_closed_form);
        assert!(t.second_moment_series_cauchy);
        assert!(jw_moments(9, 3).is_err());
        assert!(jw_moments(2, 33).is_err());
    }

    #[test]
    fn atoms() {
        let zero = atom_estimate(&q(0, 1), 10).unwrap();
        assert_eq!(zero.atom, q(1, 59049));
        assert!(zero.neighbour_inequality);
        let half = atom_estimate(&q(1, 2), 2).unwrap();
        assert_eq!(half.atom, q(2, 9));
        assert_eq!(half.history[0], q(0, 1));
        let third = atom_estimate(&q(1, 3), 12).unwrap();
        assert!(third.history.iter().all(|a| a.is_zero()));
        assert!(atom_estimate(&q(1, 1), 3).is_err());
        assert!(atom_estimate(&q(0, 1), 21).is_err());
        assert!(atom_estimate(&q(1, 1024), 4).is_ok());
        assert!(atom_estimate(&q(1, 2048), 4).is_err());
    }

    #[test]
    fn doubling_small() {
        let s = FourierSettings::default();
        let a = appendix_doubling(64, &s).unwrap();
        assert_eq!(a.at_powers.len(), 7);
        assert_eq!(a.doubling_ratios.len(), 5);
        assert!(a
            .doubling_ratios
            .iter()
            .all(|&(_, r)| r.is_finite() && r <= 1.5));
        let all = appendix_sigma_all(2, &s).unwrap();
        let m1 = mu_hat(1.0, &s);
        assert!((all[1] - (1.0 + 2.0 * m1 * m1)).abs() < 1e-15);
        assert!((all[2] - (1.0 + 4.0 * m1 * m1)).abs() < 1e-15);
    }
}
