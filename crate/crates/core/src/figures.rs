//! Data series behind the three standard plots: `|μ̂(κ)|` on `[0, 1]`, the
//! distribution function `F`, and the pair `(f₀, f₁)`.

use num_rational::BigRational;
use rayon::prelude::*;

use crate::dilation::{Dilation, FValue};
use crate::dyadic::Dyadic;
use crate::error::{out_of_range, Result};
use crate::fourier::{mu_hat, FourierSettings};

/// Finest dyadic level used for the exact plots.
pub const FIGURE_MAX_LEVEL: u32 = 12;

/// `(κ, |μ̂(κ)|)` at `points` uniform nodes of `[0, 1]`, endpoints included.
pub fn modulus_profile(points: usize, settings: &FourierSettings) -> Result<Vec<(f64, f64)>> {
    if points < 2 {
        return Err(out_of_range(points, "points ≥ 2"));
    }
    let step = 1.0 / (points - 1) as f64;
    Ok((0..points)
        .into_par_iter()
        .map(|i| {
            let kappa = if i == points - 1 {
                1.0
            } else {
                i as f64 * step
            };
            (kappa, mu_hat(kappa, settings).abs())
        })
        .collect())
}

/// `(x, F(x))` on the dyadic grid of the given level.
pub fn distribution(dilation: &Dilation, level: u32) -> Result<Vec<(Dyadic, BigRational)>> {
    Ok(pairs(dilation, level)?
        .into_iter()
        .map(|(x, f)| (x, f.sum()))
        .collect())
}

/// `(t, f(t))` on the dyadic grid of the given level.
pub fn pairs(dilation: &Dilation, level: u32) -> Result<Vec<(Dyadic, FValue)>> {
    if level > FIGURE_MAX_LEVEL {
        return Err(out_of_range(level, "[0, 12]"));
    }
    Ok((0..=(1u64 << level))
        .map(|j| {
            let t = Dyadic::new(j, level).expect("grid point in [0, 1]");
            let f = dilation.f_dyadic(&t);
            (t, f)
        })
        .collect())
}

/// Indices of strict interior local minima and maxima of a sampled curve.
pub fn local_extrema(values: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b < a && b < c {
            minima.push(i);
        } else if b > a && b > c {
            maxima.push(i);
        }
    }
    (minima, maxima)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_endpoints() {
        let s = FourierSettings::default();
        let p = modulus_profile(11, &s).unwrap();
        assert_eq!(p.len(), 11);
        assert_eq!(p[0], (0.0, 1.0));
        assert_eq!(p[10].0, 1.0);
        assert!(modulus_profile(1, &s).is_err());
    }

    #[test]
    fn exact_series() {
        let d = Dilation::new();
        let f = distribution(&d, 2).unwrap();
        let got: Vec<String> = f.iter().map(|(_, v)| v.to_string()).collect();
        assert_eq!(got, ["0", "2/9", "1/2", "7/9", "1"]);
        assert!(pairs(&d, 13).is_err());
    }

    #[test]
    fn extrema() {
        let (lo, hi) = local_extrema(&[3.0, 1.0, 2.0, 5.0, 4.0]);
        assert_eq!(lo, vec![1]);
        assert_eq!(hi, vec![3]);
        assert_eq!(local_extrema(&[1.0]), (vec![], vec![]));
    }
}
