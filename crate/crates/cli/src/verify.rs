//! `verify-paper`: recompute the published constants and figure claims.

use std::time::Instant;

use dirichlet_strips::dseries::{parse_series, Series, SeriesSpec};
use dirichlet_strips::scanner::{
    count_zeros_rectangle, detect_zero_free_strips, estimate_sigma_star, min_modulus_scan, Range, Rectangle,
    ScanConfig,
};
use dirichlet_strips::strips::{
    construct_k_holes, mod5_basis, paper_closed_form_coefficients, projective_distance, ratio_constant, HoleConfig,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Format, JobConfig, VerifyArgs};
use crate::output::json_record;
use crate::run::Outcome;
use crate::CliError;

/// Published eight-decimal values of the three coefficients.
pub const PRINTED_COEFFICIENTS: [(f64, f64); 3] =
    [(-0.08260584, -0.99658995), (1.00000059, 0.00375400), (-0.91739597, 0.99283727)];
pub const PRINTED_RATIO: (f64, f64) = (0.99997181, 0.00750790);

pub const ITEMS: [&str; 6] = ["constants", "ratio", "construction", "figure2", "figure1", "sigma-star"];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Published values carry a trailing ellipsis: they are the leading eight
/// decimals of the true value, so compare by truncation.
pub fn agrees_to_digits(x: f64, printed: f64, digits: i32) -> bool {
    let scale = 10f64.powi(digits);
    (x * scale).trunc() == (printed * scale).round()
}

pub fn matches_printed(z: Complex64, want: (f64, f64)) -> bool {
    agrees_to_digits(z.re, want.0, 8) && agrees_to_digits(z.im, want.1, 8)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_term() -> dirichlet_strips::Result<Series> {
    let b = mod5_basis();
    let r = ratio_constant()?;
    Series::new(SeriesSpec::linear(vec![(c(1.0, 0.0), b[0].clone()), (-r, b[1].clone())]))
}

fn dh_series() -> dirichlet_strips::Result<Series> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let tau = -phi - (1.0 + phi * phi).sqrt();
    let l = parse_series("L(mod=5,value(2)=i)")?;
    Series::new(SeriesSpec::linear(vec![(c(1.0, -tau) / 2.0, l.clone()), (c(1.0, tau) / 2.0, l.conj())]))
}

type Item = dirichlet_strips::Result<(bool, String)>;

fn constants() -> Item {
    let p = paper_closed_form_coefficients()?;
    let pass = p.entries.iter().zip(PRINTED_COEFFICIENTS).all(|(z, w)| matches_printed(*z, w));
    let shown: Vec<String> = p.entries.iter().map(|z| format!("{:.11}{:+.11}i", z.re, z.im)).collect();
    Ok((pass, shown.join(", ")))
}

fn ratio() -> Item {
    let r = ratio_constant()?;
    Ok((matches_printed(r, PRINTED_RATIO), format!("{:.11}{:+.11}i", r.re, r.im)))
}

fn construction(full: bool) -> Item {
    let t = if full { Range::new(0.0, 2000.0, 0.01) } else { Range::new(0.0, 500.0, 0.05) };
    let cfg = HoleConfig { t, sigma_step: 0.05, forced_betas: Some(vec![8.0, 16.0]), ..HoleConfig::default() };
    let (cv, cert) = construct_k_holes(&mod5_basis(), &cfg)?;
    let paper = paper_closed_form_coefficients()?;
    let dist = projective_distance(&cv.entries, &paper.entries);
    let worst = cert.residuals.iter().cloned().fold(0.0, f64::max);
    Ok((worst <= 1e-8 && dist <= 1e-7, format!("max |L(beta)| = {worst:.3e}, projective distance {dist:.3e}")))
}

fn figure2(full: bool) -> Item {
    let s = two_term()?;
    let (step, t) = if full { (0.01, Range::new(0.0, 2000.0, 0.01)) } else { (0.05, Range::new(0.0, 500.0, 0.05)) };
    let mut cfg = ScanConfig::new(Range::new(2.0, 7.0, step), t);
    cfg.symmetric = true;
    let r = min_modulus_scan(&s, &cfg)?;
    let floor = r.floor();
    let n = count_zeros_rectangle(&s, &Rectangle::new(7.9, 8.1, -0.1, 0.1))?;
    let pass = floor > 10.0 * r.max_tail_bound() && n.count >= 1;
    Ok((pass, format!("floor on [2,7] = {floor:.4e}, zeros near 8: {}", n.count)))
}

fn figure1(full: bool) -> Item {
    let s = Series::new(paper_closed_form_coefficients()?.combination())?;
    let (step, t) = if full { (0.01, Range::new(0.0, 2000.0, 0.01)) } else { (0.05, Range::new(0.0, 200.0, 0.05)) };
    let mut cfg = ScanConfig::new(Range::new(7.0, 22.0, step), t);
    cfg.symmetric = true;
    let r = min_modulus_scan(&s, &cfg)?;
    let strips = detect_zero_free_strips(&r, r.default_threshold());
    let dip = |x: f64| r.rows.iter().filter(|row| (row.sigma - x).abs() < 0.3).map(|row| row.min_modulus).fold(f64::INFINITY, f64::min);
    let pass = strips.len() >= 2 && dip(8.0) < 1e-3 && dip(16.0) < 1e-3;
    let shown: Vec<String> = strips.iter().map(|s| format!("[{:.2}, {:.2}]", s.lo, s.hi)).collect();
    Ok((pass, format!("strips {}", shown.join(" "))))
}

fn sigma_star(full: bool) -> Item {
    let s = dh_series()?;
    let step = if full { 0.005 } else { 0.02 };
    let mut cfg = ScanConfig::new(Range::new(2.2, 3.0, step), Range::new(0.0, 2000.0, 0.01));
    cfg.symmetric = true;
    let star = estimate_sigma_star(&s, &cfg, 0.01)?;
    let inside = star.zeros.iter().any(|z| (2.30..=2.383).contains(&z.re));
    let above = star.zeros.iter().any(|z| z.re > 2.383);
    Ok((inside && !above, format!("largest confirmed real part {:.6} ({} zeros)", star.sigma_low, star.zeros.len())))
}

pub fn check(name: &'static str, full: bool) -> Check {
    let start = Instant::now();
    let res = match name {
        "constants" => constants(),
        "ratio" => ratio(),
        "construction" => construction(full),
        "figure2" => figure2(full),
        "figure1" => figure1(full),
        _ => sigma_star(full),
    };
    let (pass, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { name, pass, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run(cfg: &JobConfig, a: &VerifyArgs) -> Result<Outcome, CliError> {
    let names: Vec<&'static str> = match &a.only {
        None => ITEMS.to_vec(),
        Some(list) => list
            .split(',')
            .map(|n| {
                ITEMS
                    .iter()
                    .find(|i| **i == n.trim())
                    .copied()
                    .ok_or_else(|| CliError::validation("InvalidInput", format!("unknown item `{n}`; known: {}", ITEMS.join(", "))))
            })
            .collect::<Result<_, _>>()?,
    };
    let checks: Vec<Check> = names.into_iter().map(|n| check(n, a.full)).collect();
    let failed = checks.iter().any(|c| !c.pass);
    let text = if cfg.format == Some(Format::Json) {
        json_record(cfg, &checks)
    } else {
        checks
            .iter()
            .map(|c| format!("{} {}: {} ({:.1} s)\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail, c.seconds))
            .collect()
    };
    Ok(Outcome { text, exit_code: if failed { 3 } else { 0 } })
}
