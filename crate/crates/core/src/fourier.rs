//! Level measures `μ_n = 3^{−n} Σ_m s(2^n + m) δ_{m/2^n}` and the
//! Fourier-Bohr coefficients
//!
//! ```text
//! μ̂_n(k) = ∏_{m=1}^{n} (1/3)(1 + 2 cos(2πk / 2^m)),    μ̂(k) = lim μ̂_n(k).
//! ```
//!
//! Products are always taken in ascending `m` and start from `|k|`, so the
//! results are bit-reproducible and exactly even in `k`.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use lru::LruCache;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use parking_lot::Mutex;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::sequence::SternPairs;

pub const LEVEL_MEASURE_MAX: u32 = 24;
pub const DIRECT_SUM_MAX: u32 = 20;

/// Truncation control for the infinite product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierSettings {
    tail_tol: f64,
    min_depth: u32,
}

impl Default for FourierSettings {
    fn default() -> Self {
        FourierSettings {
            tail_tol: 1e-10,
            min_depth: 24,
        }
    }
}

impl FourierSettings {
    /// `tail_tol ∈ (0, 1e-6]`, `min_depth ≥ 8`.
    pub fn new(tail_tol: f64, min_depth: u32) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
            return Err(Error::InvalidSettings(format!(
                "tail tolerance {tail_tol} not in (0, 1e-6]"
            )));
        }
        if min_depth < 8 {
            return Err(Error::InvalidSettings(format!(
                "minimum depth {min_depth} is below 8"
            )));
        }
        Ok(FourierSettings {
            tail_tol,
            min_depth,
        })
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn min_depth(&self) -> u32 {
        self.min_depth
    }

    /// Number of product factors used for `μ̂(k)`.
    ///
    /// With `j = ⌈log₂ max(|k|, 1)⌉` and `k̃ = |k| / 2^j ≤ 1`, every factor
    /// beyond `m = j + B` deviates from 1 by at most `(1/3)(2πk/2^m)²`, so the
    /// discarded tail is bounded by `(4π²k̃²/9) 4^{−B}`. `B` is the least value
    /// bringing that below `tail_tol`.
    pub fn depth_for(&self, k: f64) -> u32 {
        let k = k.abs().max(1.0);
        let mut j = k.log2().ceil().max(0.0) as i32;
        while 2f64.powi(j) < k {
            j += 1;
        }
        while j > 0 && 2f64.powi(j - 1) >= k {
            j -= 1;
        }
        let reduced = k / 2f64.powi(j);
        let lead = TAU * TAU * reduced * reduced / 9.0;
        let mut b = 0u32;
        while lead * 0.25f64.powi(b as i32) > self.tail_tol {
            b += 1;
        }
        self.min_depth.max(j as u32 + b)
    }
}

/// `(1/3)(1 + 2 cos(2πk / 2^m))`, with the phase `k / 2^m` reduced to
/// `[−1/2, 1/2]` exactly before the cosine.
#[inline]
pub fn factor(k: f64, m: u32) -> f64 {
    let phase = k * 0.5f64.powi(m as i32);
    let phase = phase - phase.round();
    (1.0 + 2.0 * (TAU * phase).cos()) / 3.0
}

/// `μ̂_n(k)` as the finite product.
pub fn mu_hat_level(n: u32, k: f64) -> f64 {
    let k = k.abs();
    (1..=n).fold(1.0, |acc, m| acc * factor(k, m))
}

/// `μ̂_n(k)` summed directly over the atoms of `μ_n` lifted to the real
/// line, independent of the product form.
///
/// The finite product is the transform of
/// `⍟_{m ≤ n} (1/3)(δ₀ + δ_{2^{−m}} + δ_{−2^{−m}})` on `ℝ`, which puts mass
/// `s(2^n − |p|) / 3^n` at `p / 2^n` for `|p| < 2^n`; folding modulo 1 gives
/// the level weights through `s(2^n + m) = s(m) + s(2^n − m)`. For integer `k`
/// this agrees with [`LevelMeasure::fourier_direct`]; for other real `k` only
/// the lifted sum matches the product.
pub fn mu_hat_level_direct(n: u32, k: f64) -> Result<f64> {
    if n > DIRECT_SUM_MAX {
        return Err(Error::LevelTooLarge {
            level: n,
            max: DIRECT_SUM_MAX,
        });
    }
    let k = k.abs();
    let top = 1u64 << n;
    let whole = k.trunc() as u128 % top as u128;
    let frac = k - k.trunc();
    let scale = 0.5f64.powi(n as i32);
    // s(1), ..., s(2^n), read backwards as the weight s(2^n − p) of p = 0, 1, ...
    let values: Vec<u64> = SternPairs::starting_at(1)
        .take(top as usize)
        .map(|(_, v)| v)
        .collect();
    let mut acc = 0.0;
    for (p, &w) in values.iter().rev().enumerate() {
        let int_phase = ((whole * p as u128) % top as u128) as f64 * scale;
        let phase = int_phase + frac * p as f64 * scale;
        let phase = phase - phase.round();
        let term = w as f64 * (TAU * phase).cos();
        acc += if p == 0 { term } else { 2.0 * term };
    }
    Ok(acc / 3f64.powi(n as i32))
}

/// `μ̂(k)` truncated so the certified tail error is below `tail_tol`.
/// Accurate for `|k| ≤ 2^40`.
pub fn mu_hat(k: f64, settings: &FourierSettings) -> f64 {
    let k = k.abs();
    mu_hat_level(settings.depth_for(k), k)
}

/// The odd `j` with `k = 2^a j`; zero for `k = 0`.
pub fn odd_part(k: u64) -> u64 {
    if k == 0 {
        0
    } else {
        k >> k.trailing_zeros()
    }
}

/// `μ̂(k)` at an integer, through `μ̂(2k) = μ̂(k)`.
pub fn mu_hat_int(k: i64, settings: &FourierSettings) -> f64 {
    match odd_part(k.unsigned_abs()) {
        0 => 1.0,
        j => mu_hat(j as f64, settings),
    }
}

/// `|μ̂(2k) − (1/3)(1 + 2cos(2πk)) μ̂(k)|`.
pub fn scaling_residual(k: f64, settings: &FourierSettings) -> f64 {
    (mu_hat(2.0 * k, settings) - factor(k, 0) * mu_hat(k, settings)).abs()
}

/// Integer coefficients keyed by odd part in a bounded LRU cache.
pub struct FourierCache {
    settings: FourierSettings,
    cache: Mutex<LruCache<u64, f64>>,
}

impl FourierCache {
    pub fn new(settings: FourierSettings, capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity.max(1)).expect("capacity is positive");
        FourierCache {
            settings,
            cache: Mutex::new(LruCache::new(cap)),
        }
    }

    pub fn settings(&self) -> &FourierSettings {
        &self.settings
    }

    pub fn len(&self) -> usize {
        self.cache.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mu_hat_int(&self, k: i64) -> f64 {
        let j = odd_part(k.unsigned_abs());
        if j == 0 {
            return 1.0;
        }
        if let Some(&v) = self.cache.lock().get(&j) {
            return v;
        }
        // evaluated outside the lock; any racing insert stores the same bits
        let v = mu_hat(j as f64, &self.settings);
        *self.cache.lock().get_or_insert(j, || v)
    }
}

/// `μ_n` with exact weights `s(2^n + m) / 3^n` at `m / 2^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMeasure {
    level: u32,
    numerators: Vec<u64>,
    denominator: u64,
}

pub fn level_measure(n: u32) -> Result<LevelMeasure> {
    if n > LEVEL_MEASURE_MAX {
        return Err(Error::LevelTooLarge {
            level: n,
            max: LEVEL_MEASURE_MAX,
        });
    }
    let start = 1u64 << n;
    let numerators = SternPairs::starting_at(start)
        .take(start as usize)
        .map(|(_, s)| s)
        .collect();
    Ok(LevelMeasure {
        level: n,
        numerators,
        denominator: 3u64.pow(n),
    })
}

impl LevelMeasure {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// `s(2^n + m)`, the numerator of the weight at `m / 2^n`.
    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    /// `3^n`.
    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn weight(&self, m: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerators[m]),
            BigInt::from(self.denominator),
        )
    }

    pub fn weight_f64(&self, m: usize) -> f64 {
        self.numerators[m] as f64 / self.denominator as f64
    }

    pub fn support_point(&self, m: usize) -> Dyadic {
        Dyadic::new(BigUint::from(m), self.level).expect("m < 2^n")
    }

    /// Exact total mass, which is 1.
    pub fn total(&self) -> BigRational {
        let sum: u128 = self.numerators.iter().map(|&x| x as u128).sum();
        BigRational::new(BigInt::from(sum), BigInt::from(self.denominator))
    }

    /// Mass of the atom at `x` (zero off the grid).
    pub fn atom(&self, x: &BigRational) -> BigRational {
        match self.grid_index(x) {
            Some(m) => self.weight(m),
            None => BigRational::zero(),
        }
    }

    fn grid_index(&self, x: &BigRational) -> Option<usize> {
        let scaled = x * BigRational::from_integer(BigInt::from(1u64 << self.level));
        if !scaled.is_integer() {
            return None;
        }
        let m = scaled.to_integer();
        let m = usize::try_from(m.to_biguint()?).ok()?;
        (m < self.numerators.len()).then_some(m)
    }

    /// `μ_n([a, b])` for a closed interval inside `[0, 1)`.
    pub fn interval_mass(&self, a: &Dyadic, b: &Dyadic) -> BigRational {
        let level = self.level;
        // first grid index ≥ a and last grid index ≤ b
        let ceil_index = |d: &Dyadic| -> u64 {
            if d.level() <= level {
                to_u64(&d.num_at_level(level).unwrap())
            } else {
                let shift = d.level() - level;
                let q = d.num() >> shift;
                to_u64(&q) + 1
            }
        };
        let floor_index = |d: &Dyadic| -> u64 {
            if d.level() <= level {
                to_u64(&d.num_at_level(level).unwrap())
            } else {
                to_u64(&(d.num() >> (d.level() - level)))
            }
        };
        let lo = ceil_index(a);
        let hi = floor_index(b).min(self.numerators.len() as u64 - 1);
        if lo > hi {
            return BigRational::zero();
        }
        let sum: u128 = self.numerators[lo as usize..=hi as usize]
            .iter()
            .map(|&x| x as u128)
            .sum();
        BigRational::new(BigInt::from(sum), BigInt::from(self.denominator))
    }

    /// `Σ_m w_m cos(2πk m/2^n)`; the phase `k m / 2^n` is reduced modulo 1
    /// with the integer part of `k` handled in exact integer arithmetic.
    pub fn fourier_direct(&self, k: f64) -> f64 {
        let k = k.abs();
        let whole = k.trunc();
        let frac = k - whole;
        let modulus = 1u128 << self.level;
        let whole_mod = (whole as u128) % modulus.max(1);
        let scale = 0.5f64.powi(self.level as i32);
        let mut acc = 0.0;
        for (m, &w) in self.numerators.iter().enumerate() {
            let int_phase = ((whole_mod * m as u128) % modulus) as f64 * scale;
            let phase = int_phase + frac * m as f64 * scale;
            let phase = phase - phase.round();
            acc += w as f64 * (TAU * phase).cos();
        }
        acc / self.denominator as f64
    }
}

fn to_u64(x: &BigUint) -> u64 {
    u64::try_from(x).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn level_weights() {
        let m0 = level_measure(0).unwrap();
        assert_eq!(m0.numerators(), &[1]);
        let m1 = level_measure(1).unwrap();
        assert_eq!((m1.weight(0), m1.weight(1)), (q(1, 3), q(2, 3)));
        assert_eq!(m1.support_point(1), Dyadic::half());
        let m2 = level_measure(2).unwrap();
        let w: Vec<_> = (0..4).map(|i| m2.weight(i)).collect();
        assert_eq!(w, vec![q(1, 9), q(3, 9), q(2, 9), q(3, 9)]);
        for n in 0..=12 {
            let m = level_measure(n).unwrap();
            assert_eq!(m.total(), q(1, 1));
            assert!(m.numerators().iter().all(|&x| x >= 1));
        }
        assert!(level_measure(25).is_err());
    }

    #[test]
    fn level_products() {
        assert_eq!(mu_hat_level(0, 3.7), 1.0);
        for k in [-5i64, -1, 1, 3, 7, 101] {
            assert!((mu_hat_level(1, k as f64) + 1.0 / 3.0).abs() < 1e-15);
        }
        for k in [-4i64, 0, 2, 8, 100] {
            assert!((mu_hat_level(1, k as f64) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn direct_sum_oracle() {
        assert_eq!(mu_hat_level_direct(0, 2.5).unwrap(), 1.0);
        assert!((mu_hat_level_direct(1, 1.0).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        let a = mu_hat_level_direct(12, 7.0).unwrap();
        assert!((a - mu_hat_level(12, 7.0)).abs() < 1e-10);
        assert!(mu_hat_level_direct(21, 1.0).is_err());
    }

    #[test]
    fn anchor_values() {
        let s = FourierSettings::default();
        assert_eq!(mu_hat(0.0, &s), 1.0);
        // 40-digit reference: −0.0834320975932734…
        assert!((mu_hat(1.0, &s) + 0.083432).abs() < 5e-7);
        assert!((mu_hat(1.0, &s) + 0.083_432_097_593_273_4).abs() < 1e-12);
        assert!((mu_hat(0.4, &s).abs() - 0.450342617).abs() < 1e-8);
        assert!((mu_hat(0.877996139, &s).abs() - 0.105423890).abs() < 1e-7);
    }

    #[test]
    fn integer_reduction() {
        let s = FourierSettings::default();
        let one = mu_hat(1.0, &s);
        for j in 0..40 {
            assert_eq!(mu_hat_int(1 << j, &s), one);
        }
        assert_eq!(mu_hat_int(0, &s), 1.0);
        assert_eq!(mu_hat_int(12, &s), mu_hat(3.0, &s));
        assert_eq!(mu_hat_int(-12, &s), mu_hat(3.0, &s));
        let cache = FourierCache::new(s, 4);
        assert_eq!(cache.mu_hat_int(24), mu_hat(3.0, &s));
        assert_eq!(cache.mu_hat_int(6), cache.mu_hat_int(3));
        for k in 1..20 {
            cache.mu_hat_int(k);
        }
        assert!(cache.len() <= 4);
    }

    #[test]
    fn scaling_identity() {
        let s = FourierSettings::default();
        assert_eq!(scaling_residual(0.0, &s), 0.0);
        for k in [0.5, 0.3, -1.7, 3.9] {
            assert!(scaling_residual(k, &s) <= 4.0 * s.tail_tol());
        }
    }

    #[test]
    fn settings_validation() {
        assert!(FourierSettings::new(1e-10, 24).is_ok());
        assert!(FourierSettings::new(0.0, 24).is_err());
        assert!(FourierSettings::new(1e-5, 24).is_err());
        assert!(FourierSettings::new(1e-10, 7).is_err());
        let s = FourierSettings::default();
        assert_eq!(s.depth_for(0.0), 24);
        // |k| = 1 needs B with 4.39·4^{−B} ≤ 1e-10, i.e. B = 18
        assert_eq!(FourierSettings::new(1e-10, 8).unwrap().depth_for(1.0), 18);
        assert_eq!(
            FourierSettings::new(1e-10, 8).unwrap().depth_for(1024.0),
            28
        );
    }

    #[test]
    fn atoms_and_intervals() {
        let m2 = level_measure(2).unwrap();
        assert_eq!(m2.atom(&q(1, 2)), q(2, 9));
        assert_eq!(m2.atom(&q(1, 3)), q(0, 1));
        assert_eq!(m2.atom(&q(1, 8)), q(0, 1));
        let a = Dyadic::zero();
        let b = Dyadic::parse("1/4").unwrap();
        assert_eq!(m2.interval_mass(&a, &b), q(4, 9));
        let c = Dyadic::parse("3/8").unwrap();
        let e = Dyadic::parse("5/8").unwrap();
        assert_eq!(m2.interval_mass(&c, &e), q(2, 9));
    }
}
