//! Stern's diatomic sequence `s(0) = 0, s(1) = 1, s(2n) = s(n),
//! s(2n+1) = s(n) + s(n+1)` (OEIS A002487) and its 2-regular linear
//! representation.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::dilation::Dilation;
use crate::dyadic::Dyadic;
use crate::error::{out_of_range, Error, Result};

pub type Mat2 = [[u64; 2]; 2];

/// The matrices `S₀, S₁` with row vector `v` and column vector `w`, so that
/// `s(n) = vᵀ S_{b_k} ⋯ S_{b_0} w` for the binary expansion `b_k ⋯ b_0` of
/// `n ≥ 1`. With `v = (1, 0)` the closing vector must be `w = (0, 1)`:
/// `v` on both sides would read off the wrong matrix entry (`s(2)` would come
/// out as 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearRep {
    pub s0: Mat2,
    pub s1: Mat2,
    pub v: [u64; 2],
    pub w: [u64; 2],
}

impl Default for LinearRep {
    fn default() -> Self {
        Self::STERN
    }
}

impl LinearRep {
    pub const STERN: LinearRep = LinearRep {
        s0: [[1, 0], [1, 1]],
        s1: [[1, 1], [0, 1]],
        v: [1, 0],
        w: [0, 1],
    };

    pub fn digit(&self, bit: u8) -> &Mat2 {
        if bit == 0 {
            &self.s0
        } else {
            &self.s1
        }
    }

    /// `Q = S₀ + S₁`.
    pub fn sum_matrix(&self) -> Mat2 {
        let mut q = [[0; 2]; 2];
        for (i, row) in q.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.s0[i][j] + self.s1[i][j];
            }
        }
        q
    }

    /// Trace and determinant of `Q`; eigenvalues 3 and 1 mean `(4, 3)`.
    pub fn sum_trace_det(&self) -> (i128, i128) {
        let q = self.sum_matrix();
        (trace(&q), det(&q))
    }
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn trace(m: &Mat2) -> i128 {
    m[0][0] as i128 + m[1][1] as i128
}

fn det(m: &Mat2) -> i128 {
    m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128
}

/// Spectral radius of a 2×2 integer matrix from its characteristic
/// polynomial `λ² − tr λ + det`.
pub fn spectral_radius(m: &Mat2) -> f64 {
    let tr = trace(m);
    let dt = det(m);
    let disc = tr * tr - 4 * dt;
    if disc >= 0 {
        (tr.abs() as f64 + (disc as f64).sqrt()) / 2.0
    } else {
        // complex pair, |λ|² = det
        (dt as f64).sqrt()
    }
}

/// Memo for the recursive definition. Entries with index above `cap` are
/// recomputed instead of stored.
#[derive(Debug, Clone)]
pub struct SternMemo {
    cache: HashMap<u64, BigUint>,
    cap: u64,
}

impl Default for SternMemo {
    fn default() -> Self {
        Self::with_cap(1 << 22)
    }
}

impl SternMemo {
    pub fn with_cap(cap: u64) -> Self {
        SternMemo {
            cache: HashMap::new(),
            cap,
        }
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }

    pub fn get(&mut self, n: u64) -> BigUint {
        match n {
            0 => return BigUint::zero(),
            1 => return BigUint::one(),
            _ => {}
        }
        if let Some(v) = self.cache.get(&n) {
            return v.clone();
        }
        let half = n / 2;
        let value = if n.is_multiple_of(2) {
            self.get(half)
        } else {
            self.get(half) + self.get(half + 1)
        };
        if n <= self.cap {
            self.cache.insert(n, value.clone());
        }
        value
    }
}

/// `s(n)` from the defining recursion.
pub fn stern_recursive(n: u64) -> BigUint {
    SternMemo::with_cap(u64::MAX).get(n)
}

/// `s(n) = vᵀ S_{b_k} ⋯ S_{b_0} w`, evaluated as a row vector sweeping the
/// binary digits from the most significant end.
pub fn stern_matrix(n: u64) -> Result<BigUint> {
    stern_matrix_with(&LinearRep::STERN, n)
}

pub fn stern_matrix_with(rep: &LinearRep, n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    let mut row = [BigUint::from(rep.v[0]), BigUint::from(rep.v[1])];
    let bits = 64 - n.leading_zeros();
    for i in (0..bits).rev() {
        let s = rep.digit(((n >> i) & 1) as u8);
        row = [
            scaled_sum(&row, s[0][0], s[1][0]),
            scaled_sum(&row, s[0][1], s[1][1]),
        ];
    }
    Ok(scaled_sum(&row, rep.w[0], rep.w[1]))
}

fn scaled_sum(row: &[BigUint; 2], a: u64, b: u64) -> BigUint {
    let mut acc = BigUint::zero();
    for (x, c) in row.iter().zip([a, b]) {
        match c {
            0 => {}
            1 => acc += x,
            c => acc += x * c,
        }
    }
    acc
}

/// Iterator over consecutive pairs `(s(n), s(n+1))` starting at `start`,
/// advanced with `s(n+2) = s(n) + s(n+1) − 2 (s(n) mod s(n+1))`.
#[derive(Debug, Clone)]
pub struct SternPairs {
    n: u64,
    cur: u64,
    next: u64,
}

impl SternPairs {
    pub fn starting_at(start: u64) -> Self {
        let (cur, next) = stern_pair(start);
        SternPairs {
            n: start,
            cur,
            next,
        }
    }
}

impl Iterator for SternPairs {
    /// `(n, s(n))`
    type Item = (u64, u64);

    fn next(&mut self) -> Option<Self::Item> {
        let item = (self.n, self.cur);
        let after = self.cur + self.next - 2 * (self.cur % self.next);
        self.cur = self.next;
        self.next = after;
        self.n = self.n.checked_add(1)?;
        Some(item)
    }
}

/// `(s(n), s(n+1))` in machine words, by descending the binary digits.
pub fn stern_pair(n: u64) -> (u64, u64) {
    // (a, b) = (s(m), s(m+1)) for the prefix m of n
    let (mut a, mut b) = (0u64, 1u64);
    let bits = 64 - n.leading_zeros();
    for i in (0..bits).rev() {
        if (n >> i) & 1 == 0 {
            b += a;
        } else {
            a += b;
        }
    }
    (a, b)
}

/// `Σ_{m=2^n}^{2^{n+1}-1} s(m)`.
pub fn block_sum(n: u32) -> BigUint {
    assert!(n < 63, "block index {n} too large for a linear scan");
    let start = 1u64 << n;
    let total: u128 = SternPairs::starting_at(start)
        .take(start as usize)
        .map(|(_, s)| s as u128)
        .sum();
    BigUint::from(total)
}

/// `Σ_{n ≤ x} s(n)` for real `x ≥ 1`.
pub fn summatory(x: f64) -> Result<BigUint> {
    if !x.is_finite() || x < 1.0 || x >= 2f64.powi(63) {
        return Err(out_of_range(x, "[1, 2^63)"));
    }
    Ok(summatory_upto(x.floor() as u64))
}

/// `Σ_{n=0}^{upto} s(n)` by a linear scan.
pub fn summatory_upto(upto: u64) -> BigUint {
    let mut acc = 0u128;
    for (_, s) in SternPairs::starting_at(0).take_while(|&(n, _)| n <= upto) {
        acc += s as u128;
    }
    BigUint::from(acc)
}

/// Summatory values at each of the (ascending) `points`, from one scan.
pub fn summatory_at(points: &[u64]) -> Vec<BigUint> {
    debug_assert!(points.windows(2).all(|w| w[0] <= w[1]));
    let mut out = Vec::with_capacity(points.len());
    let Some(&last) = points.last() else {
        return out;
    };
    let mut acc = 0u128;
    let mut idx = 0;
    for (n, s) in SternPairs::starting_at(0) {
        acc += s as u128;
        while idx < points.len() && points[idx] == n {
            out.push(BigUint::from(acc));
            idx += 1;
        }
        if n >= last {
            break;
        }
    }
    out
}

/// Main term `3^{⌊log₂x⌋+1} f₀(2^{⟨log₂x⟩−1})` of the summatory function.
///
/// For integer `x` the argument `x / 2^{⌊log₂x⌋+1}` is dyadic and the main
/// term is exact; otherwise `f₀` is bracketed to within `1e-12`.
pub fn summatory_asymptotic(x: f64, dilation: &Dilation) -> Result<f64> {
    if !x.is_finite() || x < 1.0 || x >= 2f64.powi(53) {
        return Err(out_of_range(x, "[1, 2^53)"));
    }
    if x.fract() == 0.0 {
        return main_term_exact(x as u64, dilation).map(|q| q.to_f64().unwrap_or(f64::NAN));
    }
    let octave = 63 - (x.floor() as u64).leading_zeros();
    // exact: division by a power of two
    let t = x / 2f64.powi(octave as i32 + 1);
    let bracket = dilation.f_real(t, 1e-12)?;
    let f0 = bracket.midpoint_f0();
    Ok(3f64.powi(octave as i32 + 1) * f0)
}

fn main_term_exact(x: u64, dilation: &Dilation) -> Result<BigRational> {
    let octave = 63 - x.leading_zeros();
    let t = Dyadic::new(BigUint::from(x), octave + 1)?;
    let f = dilation.f_dyadic(&t);
    let scale = BigRational::from_integer(num_bigint::BigInt::from(3u8).pow(octave + 1));
    Ok(scale * f.f0)
}

/// Exact residual `Σ_{n ≤ x} s(n) − 3^{⌊log₂x⌋+1} f₀(x / 2^{⌊log₂x⌋+1})` for
/// integer `x ≥ 1`, given the summatory value.
pub fn summatory_residual(
    x: u64,
    summatory_value: &BigUint,
    dilation: &Dilation,
) -> Result<BigRational> {
    if x == 0 {
        return Err(out_of_range(x, "[1, ∞)"));
    }
    let main = main_term_exact(x, dilation)?;
    let sum = BigRational::from_integer(num_bigint::BigInt::from(summatory_value.clone()));
    Ok(sum - main)
}

/// Result of the exhaustive joint spectral radius search.
#[derive(Debug, Clone, PartialEq)]
pub struct JsrEstimate {
    /// `max ρ(P)^{1/L}` over all products of length `L ≤ max_len`.
    pub value: f64,
    /// First digit word (0 ↦ S₀, 1 ↦ S₁, left to right) attaining it.
    pub word: Vec<u8>,
    /// Best value for each length `1..=max_len`.
    pub by_length: Vec<f64>,
}

pub const JSR_MAX_LEN: u32 = 16;

/// Enumerate all products of `S₀, S₁` of length at most `max_len`.
pub fn jsr_estimate(max_len: u32) -> Result<JsrEstimate> {
    if max_len == 0 || max_len > JSR_MAX_LEN {
        return Err(out_of_range(max_len, "[1, 16]"));
    }
    let rep = LinearRep::STERN;
    let mut by_length = vec![0.0f64; max_len as usize];
    let mut best = (0.0f64, Vec::new());
    let mut word = Vec::with_capacity(max_len as usize);
    let identity: Mat2 = [[1, 0], [0, 1]];
    jsr_walk(
        &rep,
        &identity,
        max_len,
        &mut word,
        &mut by_length,
        &mut best,
    );
    Ok(JsrEstimate {
        value: best.0,
        word: best.1,
        by_length,
    })
}

fn jsr_walk(
    rep: &LinearRep,
    prefix: &Mat2,
    max_len: u32,
    word: &mut Vec<u8>,
    by_length: &mut [f64],
    best: &mut (f64, Vec<u8>),
) {
    if word.len() as u32 == max_len {
        return;
    }
    for bit in 0..2u8 {
        let product = mat_mul(prefix, rep.digit(bit));
        word.push(bit);
        let len = word.len();
        let growth = spectral_radius(&product).powf(1.0 / len as f64);
        if growth > by_length[len - 1] {
            by_length[len - 1] = growth;
        }
        // strict improvement beyond rounding noise, so the shortest word wins
        if growth > best.0 * (1.0 + 1e-13) {
            *best = (growth, word.clone());
        }
        jsr_walk(rep, &product, max_len, word, by_length, best);
        word.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursion_small_values() {
        let expect = [0u64, 1, 1, 2, 1, 3, 2, 3, 1, 4, 3, 5, 2, 5, 3, 4, 1];
        for (n, &e) in expect.iter().enumerate() {
            assert_eq!(stern_recursive(n as u64), BigUint::from(e), "s({n})");
        }
    }

    #[test]
    fn powers_of_two_are_one() {
        for k in 0..64 {
            assert_eq!(stern_recursive(1u64 << k), BigUint::one());
        }
    }

    #[test]
    fn matrix_form() {
        assert_eq!(stern_matrix(1).unwrap(), BigUint::from(1u8));
        assert_eq!(stern_matrix(5).unwrap(), BigUint::from(3u8));
        assert_eq!(stern_matrix(7).unwrap(), BigUint::from(3u8));
        assert_eq!(stern_matrix(0), Err(Error::ZeroIndex));
    }

    #[test]
    fn matrix_matches_recursion_and_pairs() {
        let mut memo = SternMemo::default();
        let mut pairs = SternPairs::starting_at(1);
        for n in 1..5000u64 {
            let r = memo.get(n);
            assert_eq!(stern_matrix(n).unwrap(), r);
            let (m, s) = pairs.next().unwrap();
            assert_eq!(m, n);
            assert_eq!(BigUint::from(s), r);
            assert_eq!(BigUint::from(stern_pair(n).0), r);
        }
    }

    #[test]
    fn memo_cap_is_respected() {
        let mut memo = SternMemo::with_cap(100);
        let v = memo.get(1_000_003);
        assert_eq!(v, stern_recursive(1_000_003));
        assert!(memo.cache.keys().all(|&k| k <= 100));
    }

    #[test]
    fn representation_invariants() {
        let rep = LinearRep::default();
        assert_eq!(rep.s0, [[1, 0], [1, 1]]);
        assert_eq!(rep.s1, [[1, 1], [0, 1]]);
        assert_eq!(rep.v, [1, 0]);
        assert_eq!(rep.w, [0, 1]);
        assert_eq!(rep.sum_trace_det(), (4, 3));
    }

    #[test]
    fn block_sums() {
        assert_eq!(block_sum(0), BigUint::from(1u8));
        assert_eq!(block_sum(1), BigUint::from(3u8));
        assert_eq!(block_sum(10), BigUint::from(59049u32));
    }

    #[test]
    fn summatory_values() {
        assert_eq!(summatory(1.0).unwrap(), BigUint::from(1u8));
        assert_eq!(summatory(3.0).unwrap(), BigUint::from(4u8));
        assert_eq!(summatory(3.7).unwrap(), BigUint::from(4u8));
        assert!(summatory(0.5).is_err());
        assert!(summatory(f64::NAN).is_err());
        // complete blocks telescope to Σ_{j≤n} 3^j; the next term s(2^{n+1}) adds 1
        for n in 0..12u32 {
            let top = 1u64 << (n + 1);
            let blocks: u64 = (0..=n).map(|j| 3u64.pow(j)).sum();
            assert_eq!(summatory(top as f64 - 0.5).unwrap(), BigUint::from(blocks));
            assert_eq!(summatory(top as f64).unwrap(), BigUint::from(blocks + 1));
        }
        let pts = [1u64, 3, 3, 10, 64];
        let got = summatory_at(&pts);
        for (p, g) in pts.iter().zip(&got) {
            assert_eq!(*g, summatory_upto(*p));
        }
    }

    #[test]
    fn asymptotic_main_term() {
        let dil = Dilation::new();
        assert_eq!(summatory_asymptotic(1.0, &dil).unwrap(), 0.5);
        for n in 0..10 {
            let x = (1u64 << n) as f64;
            let expect = 3f64.powi(n + 1) / 6.0;
            assert!((summatory_asymptotic(x, &dil).unwrap() - expect).abs() < 1e-9 * expect);
        }
        // non-integer argument interpolates between neighbouring integers
        let a = summatory_asymptotic(100.0, &dil).unwrap();
        let b = summatory_asymptotic(100.5, &dil).unwrap();
        let c = summatory_asymptotic(101.0, &dil).unwrap();
        assert!(a <= b && b <= c);
        assert!(summatory_asymptotic(0.0, &dil).is_err());
    }

    #[test]
    fn spectral_radius_closed_form() {
        assert_eq!(spectral_radius(&LinearRep::STERN.s0), 1.0);
        let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
        let p = mat_mul(&LinearRep::STERN.s0, &LinearRep::STERN.s1);
        assert_eq!(p, [[1, 1], [1, 2]]);
        assert!((spectral_radius(&p) - golden_sq).abs() < 1e-15);
        // rotation-like matrix with complex eigenvalues
        assert!((spectral_radius(&[[0, 1], [0, 0]]) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn jsr_small_lengths() {
        let one = jsr_estimate(1).unwrap();
        assert_eq!(one.value, 1.0);
        let two = jsr_estimate(2).unwrap();
        assert!((two.value - crate::GOLDEN_RATIO).abs() < 1e-12);
        assert_eq!(two.word, vec![0, 1]);
        assert!(jsr_estimate(0).is_err());
        assert!(jsr_estimate(17).is_err());
    }
}
