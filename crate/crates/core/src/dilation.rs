//! The dilation equation `f(t) = (1/3)(S₀ f(2t) + S₁ f(2t − 1))` with
//! `f ≡ (0, 0)` on `t ≤ 0` and `f ≡ (1/2, 1/2)` on `t ≥ 1`, solved exactly at
//! dyadic points, together with the distribution function
//! `F(x) = μ([0, x]) = f₀(x) + f₁(x)` and the masses of dyadic intervals.
//!
//! Everything on the dyadic grid is exact rational arithmetic; denominators
//! are of the form `2 · 3^k`. Floating point only enters through the Hölder
//! regression and the level choice in [`Dilation::f_real`].

use std::sync::OnceLock;

use dashmap::DashMap;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dyadic::Dyadic;
use crate::error::{out_of_range, Error, Result};
use crate::sequence::{LinearRep, Mat2};

/// `(f₀(t), f₁(t))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FValue {
    pub f0: BigRational,
    pub f1: BigRational,
}

impl FValue {
    pub fn zero() -> Self {
        FValue {
            f0: BigRational::zero(),
            f1: BigRational::zero(),
        }
    }

    pub fn right_limit() -> Self {
        let h = ratio(1, 2);
        FValue {
            f0: h.clone(),
            f1: h,
        }
    }

    /// `f₀ + f₁`, which is `F` on `[0, 1]`.
    pub fn sum(&self) -> BigRational {
        &self.f0 + &self.f1
    }

    /// `0 ≤ f₀ ≤ f₁ ≤ 1/2`.
    pub fn within_bounds(&self) -> bool {
        !self.f0.is_negative() && self.f0 <= self.f1 && self.f1 <= ratio(1, 2)
    }

    fn apply(&self, m: &Mat2) -> FValue {
        let c = |x: u64| BigRational::from_integer(BigInt::from(x));
        FValue {
            f0: c(m[0][0]) * &self.f0 + c(m[0][1]) * &self.f1,
            f1: c(m[1][0]) * &self.f0 + c(m[1][1]) * &self.f1,
        }
    }

    fn add(&self, other: &FValue) -> FValue {
        FValue {
            f0: &self.f0 + &other.f0,
            f1: &self.f1 + &other.f1,
        }
    }

    fn scale(&self, s: &BigRational) -> FValue {
        FValue {
            f0: &self.f0 * s,
            f1: &self.f1 * s,
        }
    }
}

/// Per-coordinate enclosure of `f(t)` between the values at the two
/// neighbouring dyadics of a common level.
#[derive(Debug, Clone, PartialEq)]
pub struct FInterval {
    pub lower: FValue,
    pub upper: FValue,
    pub level: u32,
}

impl FInterval {
    pub fn width(&self) -> BigRational {
        let w0 = &self.upper.f0 - &self.lower.f0;
        let w1 = &self.upper.f1 - &self.lower.f1;
        w0.max(w1)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    pub fn midpoint_f0(&self) -> f64 {
        let m = (&self.lower.f0 + &self.upper.f0) / ratio(2, 1);
        m.to_f64().unwrap_or(f64::NAN)
    }

    pub fn midpoint_f1(&self) -> f64 {
        let m = (&self.lower.f1 + &self.upper.f1) / ratio(2, 1);
        m.to_f64().unwrap_or(f64::NAN)
    }
}

/// `(1/3) [[S_b, u_b], [0 0, 3]]` with `u₀ = (0, 0)ᵀ`, `u₁ = (1/2, 1)ᵀ`: one
/// step of the dilation recursion acting on `(f, 1)ᵀ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugMatrix {
    pub entries: [[BigRational; 3]; 3],
}

impl AugMatrix {
    pub fn for_digit(bit: u8) -> Self {
        let s = LinearRep::STERN.digit(bit);
        let third = ratio(1, 3);
        let int = |x: u64| BigRational::from_integer(BigInt::from(x)) * &third;
        let (u0, u1) = if bit == 0 {
            (BigRational::zero(), BigRational::zero())
        } else {
            (ratio(1, 2) * &third, third.clone())
        };
        AugMatrix {
            entries: [
                [int(s[0][0]), int(s[0][1]), u0],
                [int(s[1][0]), int(s[1][1]), u1],
                [BigRational::zero(), BigRational::zero(), BigRational::one()],
            ],
        }
    }

    pub fn apply(&self, v: &[BigRational; 3]) -> [BigRational; 3] {
        std::array::from_fn(|i| {
            self.entries[i]
                .iter()
                .zip(v)
                .fold(BigRational::zero(), |acc, (a, x)| acc + a * x)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderEstimate {
    /// Least-squares slope of `log₂ max_j ΔF` against `−L`, `L = 0..=max_level`.
    pub alpha_hat: f64,
    /// `max ΔF / (Δx)^{α₀}` over all dyadic intervals up to `max_level`.
    pub c_hat: f64,
    /// `max_j ΔF` at each level `0..=max_level`.
    pub max_increment: Vec<f64>,
    /// Running value of `c_hat` after each level `0..=max_level`.
    pub c_by_level: Vec<f64>,
}

pub const MEMO_MAX_LEVEL: u32 = 20;
pub const HOLDER_MAX_LEVEL: u32 = 16;
pub const STRICT_MAX_LEVEL: u32 = 14;

/// Exact evaluator for `f`, `F` and dyadic interval masses. The memo is
/// shared and safe for concurrent use.
#[derive(Debug, Default)]
pub struct Dilation {
    memo: DashMap<(BigUint, u32), FValue>,
    holder_constant: OnceLock<f64>,
}

impl Dilation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Exact `(f₀(t), f₁(t))` at a dyadic `t ∈ [0, 1]`.
    pub fn f_dyadic(&self, t: &Dyadic) -> FValue {
        self.f_reduced(t.num(), t.level())
    }

    // (num, level) in lowest terms
    fn f_reduced(&self, num: &BigUint, level: u32) -> FValue {
        if num.is_zero() {
            return FValue::zero();
        }
        if level == 0 {
            return FValue::right_limit();
        }
        let key = (num.clone(), level);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        // 2t = num / 2^{level-1}, 2t − 1 = (num − 2^{level-1}) / 2^{level-1}
        let child = level - 1;
        let half = BigInt::one() << child;
        let num_signed = BigInt::from(num.clone());
        let rep = LinearRep::STERN;
        let left = self.f_clamped(&num_signed, child).apply(&rep.s0);
        let right = self.f_clamped(&(num_signed - half), child).apply(&rep.s1);
        let value = left.add(&right).scale(&ratio(1, 3));
        if level <= MEMO_MAX_LEVEL {
            self.memo.entry(key).or_insert_with(|| value.clone());
        }
        value
    }

    // f at num / 2^level for arbitrary integer num, with the boundary clamps
    fn f_clamped(&self, num: &BigInt, level: u32) -> FValue {
        if !num.is_positive() {
            return FValue::zero();
        }
        let unit = BigInt::one() << level;
        if *num >= unit {
            return FValue::right_limit();
        }
        let t = Dyadic::new(num.magnitude().clone(), level).expect("checked range");
        self.f_dyadic(&t)
    }

    /// `f(t)` for `t = b_k…b_0 / 2^{k+1}` by the product of augmented
    /// matrices `A_{b_k} ⋯ A_{b_1}` applied to `(f(b₀/2), 1)ᵀ`.
    pub fn f_dyadic_by_matrices(&self, t: &Dyadic) -> FValue {
        if t.is_one() {
            return FValue::right_limit();
        }
        if t.is_zero() {
            return FValue::zero();
        }
        let digits = t.level();
        let num = t.num();
        let base = if num.bit(0) {
            FValue {
                f0: ratio(1, 6),
                f1: ratio(1, 3),
            }
        } else {
            FValue::zero()
        };
        let mut v = [base.f0, base.f1, BigRational::one()];
        for i in 1..digits {
            v = AugMatrix::for_digit(num.bit(i as u64) as u8).apply(&v);
        }
        let [f0, f1, _] = v;
        FValue { f0, f1 }
    }

    /// Enclosure of `f(t)` at real `t ∈ [0, 1]` with width at most `eps`,
    /// using monotonicity of `f₀` and `f₁` between neighbouring dyadics.
    pub fn f_real(&self, t: f64, eps: f64) -> Result<FInterval> {
        if !(0.0..=1.0).contains(&t) {
            return Err(out_of_range(t, "[0, 1]"));
        }
        if eps.is_nan() || eps <= 0.0 {
            return Err(out_of_range(eps, "(0, ∞)"));
        }
        let alpha = crate::holder_exponent();
        let c = 2.0 * self.holder_constant();
        let mut level = ((c / eps).log2() / alpha).ceil().max(1.0) as u32;
        loop {
            let lo = Dyadic::floor_at_level(t, level)?;
            let lower = self.f_dyadic(&lo);
            if lo.to_f64() == t {
                return Ok(FInterval {
                    upper: lower.clone(),
                    lower,
                    level,
                });
            }
            let hi_num = lo.num_at_level(level).expect("floor is at this level") + 1u8;
            let hi = Dyadic::new(hi_num, level)?;
            let interval = FInterval {
                lower,
                upper: self.f_dyadic(&hi),
                level,
            };
            if interval.width().to_f64().unwrap_or(f64::INFINITY) <= eps || level >= 1000 {
                return Ok(interval);
            }
            level += 4;
        }
    }

    // ĉ from levels up to 10, computed once
    fn holder_constant(&self) -> f64 {
        *self
            .holder_constant
            .get_or_init(|| self.holder_estimate(10).map(|h| h.c_hat).unwrap_or(1.0))
    }

    /// `F(x)` at a dyadic `x`, computed as `f₀(x) + f₁(x)` and as
    /// `3 (f₀((1+x)/2) − 1/6)`; the two must agree exactly.
    pub fn big_f(&self, x: &Dyadic) -> Result<BigRational> {
        let direct = self.f_dyadic(x).sum();
        let shifted = self.f_dyadic(&x.midpoint_with_one()).f0;
        let via_upper_half = ratio(3, 1) * (shifted - ratio(1, 6));
        if direct != via_upper_half {
            return Err(Error::IdentityViolated(format!(
                "F({x}): f0 + f1 = {direct} but 3(f0((1+x)/2) - 1/6) = {via_upper_half}"
            )));
        }
        Ok(direct)
    }

    /// `μ([2m/2^k, (2m+1)/2^k]) = (1/6)(3^{1−k}, 0) S₁ S_{b_{k−1}} ⋯ S_{b_1} (1, 2)ᵀ`
    /// where `1 b_{k−1} ⋯ b_1 0` is the binary expansion of `2^k + 2m`.
    pub fn interval_measure(&self, m: u64, k: u32) -> Result<BigRational> {
        check_interval(m, k)?;
        let rep = LinearRep::STERN;
        let n = (1u64 << k) + 2 * m;
        let mut v = [BigUint::from(1u8), BigUint::from(2u8)];
        let step = |s: &Mat2, v: &[BigUint; 2]| -> [BigUint; 2] {
            [
                &v[0] * s[0][0] + &v[1] * s[0][1],
                &v[0] * s[1][0] + &v[1] * s[1][1],
            ]
        };
        for i in 1..k {
            v = step(rep.digit(((n >> i) & 1) as u8), &v);
        }
        v = step(&rep.s1, &v);
        let den = BigInt::from(6u8) * BigInt::from(3u8).pow(k - 1);
        Ok(BigRational::new(BigInt::from(v[0].clone()), den))
    }

    /// Same mass through the augmented 3×3 matrices acting on
    /// `(f(1/2), 1)ᵀ − (f(0), 1)ᵀ`.
    pub fn interval_measure_augmented(&self, m: u64, k: u32) -> Result<BigRational> {
        check_interval(m, k)?;
        let n = (1u64 << k) + 2 * m;
        let mut v = [ratio(1, 6), ratio(1, 3), BigRational::zero()];
        for i in 1..k {
            v = AugMatrix::for_digit(((n >> i) & 1) as u8).apply(&v);
        }
        v = AugMatrix::for_digit(1).apply(&v);
        Ok(ratio(3, 1) * &v[0])
    }

    /// `F(j / 2^level)` for all `j = 0..=2^level`.
    pub fn cdf_grid(&self, level: u32) -> Vec<BigRational> {
        (0..=(1u64 << level))
            .map(|j| {
                let x = Dyadic::new(j, level).expect("grid point in [0, 1]");
                self.f_dyadic(&x).sum()
            })
            .collect()
    }

    pub fn holder_estimate(&self, max_level: u32) -> Result<HolderEstimate> {
        if max_level == 0 || max_level > HOLDER_MAX_LEVEL {
            return Err(out_of_range(max_level, "[1, 16]"));
        }
        let grid = self.cdf_grid(max_level);
        let alpha0 = crate::holder_exponent();
        let mut max_increment = Vec::with_capacity(max_level as usize + 1);
        let mut c_by_level = Vec::with_capacity(max_level as usize + 1);
        let mut c_hat = 0.0f64;
        for level in 0..=max_level {
            let stride = 1usize << (max_level - level);
            let biggest = grid
                .iter()
                .step_by(stride)
                .zip(grid.iter().step_by(stride).skip(1))
                .map(|(a, b)| b - a)
                .max()
                .expect("at least one interval");
            let biggest = biggest.to_f64().unwrap_or(f64::NAN);
            max_increment.push(biggest);
            c_hat = c_hat.max(biggest * 2f64.powf(level as f64 * alpha0));
            c_by_level.push(c_hat);
        }
        // slope of y = log₂ maxΔF against x = −L
        let pts: Vec<(f64, f64)> = max_increment
            .iter()
            .enumerate()
            .map(|(l, &d)| (-(l as f64), d.log2()))
            .collect();
        let alpha_hat = least_squares_slope(&pts);
        Ok(HolderEstimate {
            alpha_hat,
            c_hat,
            max_increment,
            c_by_level,
        })
    }

    /// Every dyadic increment of `F` up to `max_level` is strictly positive.
    pub fn strict_increase_check(&self, max_level: u32) -> Result<bool> {
        if max_level > STRICT_MAX_LEVEL {
            return Err(out_of_range(max_level, "[0, 14]"));
        }
        let grid = self.cdf_grid(max_level);
        for level in 0..=max_level {
            let stride = 1usize << (max_level - level);
            let mut points = grid.iter().step_by(stride);
            let mut prev = points.next().expect("grid is nonempty");
            for next in points {
                if next <= prev {
                    return Ok(false);
                }
                prev = next;
            }
        }
        Ok(true)
    }
}

fn check_interval(m: u64, k: u32) -> Result<()> {
    if k == 0 || k > 62 {
        return Err(out_of_range(k, "[1, 62]"));
    }
    if m >= 1u64 << (k - 1) {
        return Err(out_of_range(m, "2m < 2^k"));
    }
    Ok(())
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
