//! One function per subcommand, each producing a [`Report`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use stern_measure::acceptance::{self, Context};
use stern_measure::fourier::{level_measure, mu_hat, FourierCache, FourierSettings};
use stern_measure::sequence::{stern_recursive, summatory, summatory_asymptotic};
use stern_measure::wiener::{
    appendix_doubling, appendix_inequalities, check_sublinear, jw_moments, ratio_bound_check,
    wiener_series,
};
use stern_measure::{figures, Dilation, Dyadic, Error};

use crate::report::{Cell, Report};

/// Settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Globals {
    pub settings: FourierSettings,
    pub depth: u32,
    pub grid: usize,
}

pub type Outcome = Result<Report, Error>;

/// Parse a point of `[0, 1]`: exact fractions stay exact, decimals are
/// snapped to the nearest dyadic of level `depth` with a warning.
pub fn parse_dyadic(input: &str, depth: u32) -> Result<Dyadic, Error> {
    if input.contains('/') || !input.contains(['.', 'e', 'E']) {
        return Dyadic::parse(input);
    }
    let x: f64 = input.trim().parse().map_err(|_| Error::Parse {
        input: input.to_string(),
        reason: "not a number".to_string(),
    })?;
    let snapped = Dyadic::nearest_at_level(x, depth)?;
    if snapped.to_f64() != x {
        eprintln!("warning: {input} snapped to {snapped} (nearest dyadic of level {depth})");
    }
    Ok(snapped)
}

pub fn stern(n: u64) -> Outcome {
    let mut r = Report::new("stern", &["n", "s"]).param("n", n);
    r.row(vec![Cell::int(n), Cell::int(stern_recursive(n))]);
    Ok(r)
}

pub fn sum(x: f64) -> Outcome {
    let dilation = Dilation::new();
    let total = summatory(x)?;
    let main = summatory_asymptotic(x, &dilation)?;
    let mut r = Report::new("sum", &["x", "summatory", "main_term", "residual"]).param("x", x);
    let residual = total.to_f64().unwrap_or(f64::NAN) - main;
    r.row(vec![
        Cell::Real(x),
        Cell::int(&total),
        Cell::Real(main),
        Cell::Real(residual),
    ]);
    Ok(r)
}

pub fn weights(n: u32) -> Outcome {
    let lm = level_measure(n)?;
    let mut r = Report::new("weights", &["m", "x", "weight", "weight_value"]).param("n", n);
    for m in 0..lm.len() {
        r.row(vec![
            Cell::int(m),
            Cell::text(lm.support_point(m).to_string()),
            Cell::exact(&lm.weight(m)),
            Cell::Real(lm.weight_f64(m)),
        ]);
    }
    r.check(
        "total_is_one",
        lm.total() == BigRational::from_integer(BigInt::from(1)),
    );
    Ok(r)
}

pub fn fourier(k: &str, real: bool, g: &Globals) -> Outcome {
    let bad = |reason: &str| Error::Parse {
        input: k.to_string(),
        reason: reason.to_string(),
    };
    let mut r = Report::new("fourier", &["k", "mu_hat", "depth"])
        .param("k", k)
        .param("real", real)
        .param("tol", g.settings.tail_tol())
        .param("depth", g.settings.min_depth());
    if real {
        let x: f64 = k.parse().map_err(|_| bad("not a real number"))?;
        if !x.is_finite() || x.abs() > 2f64.powi(40) {
            return Err(bad("|k| must not exceed 2^40"));
        }
        let v = mu_hat(x, &g.settings);
        r.row(vec![
            Cell::Real(x),
            Cell::Real(v),
            Cell::int(g.settings.depth_for(x.abs())),
        ]);
    } else {
        let n: i64 = k
            .parse()
            .map_err(|_| bad("not an integer (use --real for real k)"))?;
        if n.unsigned_abs() > 1u64 << 40 {
            return Err(bad("|k| must not exceed 2^40"));
        }
        let cache = FourierCache::new(g.settings, 16);
        let v = cache.mu_hat_int(n);
        let odd = stern_measure::fourier::odd_part(n.unsigned_abs());
        r.row(vec![
            Cell::int(n),
            Cell::Real(v),
            Cell::int(g.settings.depth_for(odd as f64)),
        ]);
    }
    Ok(r)
}

pub fn cdf(x: &str, g: &Globals) -> Outcome {
    let point = parse_dyadic(x, g.depth)?;
    let value = Dilation::new().big_f(&point)?;
    let mut r = Report::new("cdf", &["x", "F", "F_value"]).param("x", x);
    r.row(vec![
        Cell::text(point.to_string()),
        Cell::exact(&value),
        Cell::Real(value.to_f64().unwrap_or(f64::NAN)),
    ]);
    Ok(r)
}

pub fn dilation(t: &str, g: &Globals) -> Outcome {
    let point = parse_dyadic(t, g.depth)?;
    let f = Dilation::new().f_dyadic(&point);
    let mut r = Report::new("dilation", &["t", "f0", "f1"]).param("t", t);
    r.row(vec![
        Cell::text(point.to_string()),
        Cell::exact(&f.f0),
        Cell::exact(&f.f1),
    ]);
    Ok(r)
}

pub fn interval(m: u64, k: u32) -> Outcome {
    let d = Dilation::new();
    let mass = d.interval_measure(m, k)?;
    let lower = Dyadic::new(2 * m, k)?;
    let upper = Dyadic::new(2 * m + 1, k)?;
    let increment = d.big_f(&upper)? - d.big_f(&lower)?;
    let mut r = Report::new("interval", &["lower", "upper", "mass", "mass_value"])
        .param("m", m)
        .param("k", k);
    r.row(vec![
        Cell::text(lower.to_string()),
        Cell::text(upper.to_string()),
        Cell::exact(&mass),
        Cell::Real(mass.to_f64().unwrap_or(f64::NAN)),
    ]);
    r.check("matches_distribution_increment", mass == increment);
    Ok(r)
}

pub fn wiener(n_max: u32, g: &Globals) -> Outcome {
    let series = wiener_series(n_max, &g.settings)?;
    let checks = if n_max >= 2 {
        check_sublinear(&series)?
    } else {
        Vec::new()
    };
    let mut r = Report::new(
        "wiener",
        &[
            "N",
            "sigma",
            "sigma_grouped",
            "sublinear",
            "two_step",
            "geometric",
        ],
    )
    .param("nmax", n_max)
    .param("tol", g.settings.tail_tol())
    .param("depth", g.settings.min_depth());
    for n in 0..=n_max {
        let flags = checks.iter().find(|c| c.n == n);
        let flag = |f: fn(&stern_measure::wiener::SublinearCheck) -> bool| {
            flags.map_or(Cell::Empty, |c| Cell::Flag(f(c)))
        };
        r.row(vec![
            Cell::int(n),
            Cell::Real(series.sigma[n as usize]),
            Cell::Real(series.sigma_grouped[n as usize]),
            flag(|c| c.sublinear),
            flag(|c| c.two_step),
            flag(|c| c.geometric),
        ]);
    }
    r.check("routes_agree", series.max_route_gap() < 1e-9);
    r.check("sublinear", checks.iter().all(|c| c.sublinear));
    r.check("geometric", checks.iter().all(|c| c.geometric));
    Ok(r)
}

pub fn scan(g: &Globals) -> Outcome {
    let b = ratio_bound_check(&g.settings, g.grid)?;
    let mut r = Report::new("scan", &["quantity", "location", "value"]).param("grid", g.grid);
    r.row(vec![
        Cell::text("max |mu_hat| on [3/5,1]"),
        Cell::Real(b.argmax),
        Cell::Real(b.max_value),
    ]);
    r.row(vec![
        Cell::text("min |mu_hat| on [0,2/5]"),
        Cell::Real(b.argmin),
        Cell::Real(b.min_value),
    ]);
    r.row(vec![Cell::text("ratio"), Cell::Empty, Cell::Real(b.ratio)]);
    r.check("ratio_below_quarter", b.ratio < 0.25);
    Ok(r)
}

pub fn appendix(k_max: i64, n_max: u64, g: &Globals) -> Outcome {
    let slacks = appendix_inequalities(k_max, &g.settings)?;
    let series = appendix_doubling(n_max, &g.settings)?;
    let mut r = Report::new("appendix", &["quantity", "at", "value"])
        .param("kmax", k_max)
        .param("nmax", n_max);
    r.row(vec![
        Cell::text("worst slack |mu(2k+1)| - |mu(k)+mu(k+1)|/2"),
        Cell::int(slacks.worst_k_1),
        Cell::Real(slacks.worst_slack_1),
    ]);
    r.row(vec![
        Cell::text("worst mu(2k+1)(mu(2k)+mu(2k+2))"),
        Cell::int(slacks.worst_k_2),
        Cell::Real(slacks.worst_slack_2),
    ]);
    for (n, s) in &series.at_powers {
        r.row(vec![Cell::text("Sigma(N)"), Cell::int(n), Cell::Real(*s)]);
    }
    for (n, q) in &series.doubling_ratios {
        r.row(vec![
            Cell::text("Sigma(4N)/Sigma(2N)"),
            Cell::int(n),
            Cell::Real(*q),
        ]);
    }
    r.row(vec![
        Cell::text("decay exponent"),
        Cell::Empty,
        Cell::Real(series.decay_exponent),
    ]);
    r.row(vec![
        Cell::text("alpha empirical"),
        Cell::Empty,
        Cell::Real(series.alpha_empirical),
    ]);
    r.check("inequality_1", slacks.worst_slack_1 <= 1e-9);
    r.check("inequality_2", slacks.worst_slack_2 <= 1e-9);
    r.check(
        "doubling",
        series.doubling_ratios.iter().all(|&(_, q)| q <= 1.5),
    );
    Ok(r)
}

pub fn moments(r_max: u32, m_max: u32) -> Outcome {
    let table = jw_moments(r_max, m_max)?;
    let mut r = Report::new("moments", &["r", "m", "moment"])
        .param("rmax", r_max)
        .param("mmax", m_max);
    for e in &table.entries {
        r.row(vec![Cell::int(e.r), Cell::int(e.m), Cell::exact(&e.value)]);
    }
    r.check("first_moments_vanish", table.first_moments_vanish);
    r.check(
        "second_moments_closed_form",
        table.second_moments_closed_form,
    );
    r.check(
        "second_moment_series_cauchy",
        table.second_moment_series_cauchy,
    );
    Ok(r)
}

pub fn figure(which: u8, g: &Globals) -> Outcome {
    let level = g.depth.min(figures::FIGURE_MAX_LEVEL);
    match which {
        1 => {
            let mut r = Report::new("figure 1", &["kappa", "abs_mu_hat"]).param("grid", g.grid);
            for (k, v) in figures::modulus_profile(g.grid, &g.settings)? {
                r.row(vec![Cell::Real(k), Cell::Real(v)]);
            }
            Ok(r)
        }
        2 => {
            let mut r = Report::new("figure 2", &["x", "F", "F_value"]).param("level", level);
            for (x, f) in figures::distribution(&Dilation::new(), level)? {
                let v = f.to_f64().unwrap_or(f64::NAN);
                r.row(vec![
                    Cell::text(x.to_string()),
                    Cell::exact(&f),
                    Cell::Real(v),
                ]);
            }
            Ok(r)
        }
        3 => {
            let mut r = Report::new("figure 3", &["t", "f0", "f1", "f0_value", "f1_value"])
                .param("level", level);
            for (t, f) in figures::pairs(&Dilation::new(), level)? {
                r.row(vec![
                    Cell::text(t.to_string()),
                    Cell::exact(&f.f0),
                    Cell::exact(&f.f1),
                    Cell::Real(f.f0.to_f64().unwrap_or(f64::NAN)),
                    Cell::Real(f.f1.to_f64().unwrap_or(f64::NAN)),
                ]);
            }
            Ok(r)
        }
        _ => unreachable!("figure number validated by the parser"),
    }
}

pub fn verify(g: &Globals) -> Outcome {
    let ctx = Context {
        settings: g.settings,
        dilation: Dilation::new(),
    };
    let mut r = Report::new("verify", &["criterion", "name", "passed", "detail"]);
    for o in acceptance::run_all(&ctx) {
        eprintln!("{o}");
        r.check(&o.id, o.passed);
        r.row(vec![
            Cell::text(&o.id),
            Cell::text(o.name),
            Cell::Flag(o.passed),
            Cell::text(&o.detail),
        ]);
    }
    Ok(r)
}
