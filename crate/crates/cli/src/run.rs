//! Subcommand implementations on top of the library.

use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use dirichlet_strips::characters::{build_character_group, root_number};
use dirichlet_strips::convexity::{radius_r1, radius_r2, radius_r3};
use dirichlet_strips::dseries::{parse_complex, parse_series, split_top_level, Precision, Series, SeriesSpec};
use dirichlet_strips::scanner::{
    count_zeros_rectangle, detect_zero_free_strips, estimate_sigma_star, min_modulus_scan_with_progress,
    refine_zero, Range, Rectangle, ScanConfig,
};
use dirichlet_strips::strips::{
    construct_funceq, construct_k_holes, mod5_basis, paper_closed_form_coefficients, ratio_constant, HoleConfig,
};
use dirichlet_strips::torus::{kappa_bounds, kappa_integrals, kw_time_average, torus_integral, TorusFunction, TrigPoly};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::*;
use crate::output::{emit_plot_data, json_record, scan_csv, sci};
use crate::{verify, CliError};

/// What a finished job produced.
#[derive(Debug)]
pub struct Outcome {
    /// Main output, written to `--out` or stdout.
    pub text: String,
    /// Non-zero when the job ran but reported failures (verify-paper).
    pub exit_code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, exit_code: 0 }
    }
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::validation("InvalidInput", format!("missing --{name}")))
}

fn bad(msg: String) -> CliError {
    CliError::validation("InvalidInput", msg)
}

pub fn parse_range(src: &str, what: &str) -> Result<Range, CliError> {
    let parts: Vec<&str> = src.split(':').collect();
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad(format!("{what} `{src}`: expected lo:hi:step")))?;
    match nums[..] {
        [lo, hi, step] => {
            let r = Range::new(lo, hi, step);
            r.validate(what)?;
            Ok(r)
        }
        _ => Err(bad(format!("{what} `{src}`: expected lo:hi:step"))),
    }
}

pub fn parse_reals(src: &str) -> Result<Vec<f64>, CliError> {
    src.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad(format!("`{p}` is not a number")))).collect()
}

fn parse_complexes(src: &str) -> Result<Vec<Complex64>, CliError> {
    src.split(',').map(|p| Ok(parse_complex(p.trim())?)).collect()
}

pub fn parse_basis(src: &str) -> Result<Vec<SeriesSpec>, CliError> {
    split_top_level(src).iter().map(|s| Ok(parse_series(s)?)).collect()
}

fn precision(cfg: &JobConfig, eps: Option<f64>) -> Precision {
    match cfg.terms {
        Some(n) => Precision::Terms(n),
        None => Precision::Eps(eps.unwrap_or(1e-10)),
    }
}

/// Stderr progress, at most once per second.
fn progress_printer(label: &'static str) -> impl Fn(usize, usize) + Sync {
    let last = Mutex::new(Instant::now());
    move |done, total| {
        let mut l = last.lock().expect("progress lock");
        if l.elapsed() >= Duration::from_secs(1) {
            eprintln!("{label}: {done}/{total}");
            *l = Instant::now();
        }
    }
}

pub fn run(cfg: &JobConfig) -> Result<Outcome, CliError> {
    match &cfg.job {
        Command::Chars(a) => chars(cfg, a),
        Command::Eval(a) => eval(cfg, a),
        Command::Scan(a) => scan(cfg, a),
        Command::Zeros(a) => zeros(cfg, a),
        Command::Holes(a) => holes(cfg, a),
        Command::Funceq(a) => funceq(cfg, a),
        Command::Radii(a) => radii(cfg, a),
        Command::Torus(t) => match &t.mode {
            TorusMode::Kw(a) => torus_kw(cfg, a),
            TorusMode::Kappa(a) => torus_kappa(cfg, a),
        },
        Command::VerifyPaper(a) => verify::run(cfg, a),
    }
}

fn json_mode(cfg: &JobConfig) -> bool {
    cfg.format == Some(Format::Json)
}

fn chars(cfg: &JobConfig, a: &CharsArgs) -> Result<Outcome, CliError> {
    let q = need(&a.modulus, "modulus")?;
    if !(1..=2000).contains(&q) {
        return Err(bad(format!("modulus {q} outside 1..=2000")));
    }
    let mut rows = Vec::new();
    for chi in build_character_group(q) {
        if a.primitive_only && !chi.is_primitive() {
            continue;
        }
        let omega = if chi.is_primitive() { Some(root_number(&chi)?.omega) } else { None };
        let values: Vec<String> = (1..q.max(2))
            .filter_map(|n| chi.value_exponent(n).map(|k| format!("{n}:{k}/{}", chi.order())))
            .collect();
        rows.push(json!({
            "index": chi.index(),
            "exponents": chi.exponents(),
            "order": chi.order(),
            "conductor": chi.conductor(),
            "parity": chi.parity(),
            "primitive": chi.is_primitive(),
            "root_number": omega.map(|w| [w.re, w.im]),
            "values": values,
        }));
    }
    if json_mode(cfg) {
        return Ok(Outcome::ok(json_record(cfg, &rows)));
    }
    let mut s = String::from("index,exponents,order,conductor,parity,root_number,values\n");
    for r in &rows {
        let ex: Vec<String> = r["exponents"].as_array().unwrap().iter().map(|v| v.to_string()).collect();
        let w = match r["root_number"].as_array() {
            Some(w) => sci_complex(Complex64::new(w[0].as_f64().unwrap(), w[1].as_f64().unwrap())),
            None => "-".into(),
        };
        let vals: Vec<&str> = r["values"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r["index"],
            ex.join(" "),
            r["order"],
            r["conductor"],
            r["parity"],
            w,
            vals.join(" ")
        ));
    }
    Ok(Outcome::ok(s))
}

fn sci_complex(z: Complex64) -> String {
    let im = sci(z.im);
    if im.starts_with('-') {
        format!("{}{im}i", sci(z.re))
    } else {
        format!("{}+{im}i", sci(z.re))
    }
}

fn eval(cfg: &JobConfig, a: &EvalArgs) -> Result<Outcome, CliError> {
    let series = Series::new(parse_series(&need(&a.series, "series")?)?)?;
    let s = Complex64::new(need(&a.sigma, "sigma")?, a.t.unwrap_or(0.0));
    let r = series.evaluate(s, precision(cfg, a.eps.or(Some(1e-12))))?;
    if json_mode(cfg) {
        return Ok(Outcome::ok(json_record(cfg, &r)));
    }
    Ok(Outcome::ok(format!(
        "{} {} {} {} {}\n",
        sci(r.value.re),
        sci(r.value.im),
        sci(r.tail_bound),
        r.terms_used,
        u8::from(r.warning)
    )))
}

/// Series and ranges for the figure presets; explicit flags override them.
fn preset_defaults(p: Preset) -> Result<(String, String, String), CliError> {
    let b = mod5_basis();
    Ok(match p {
        Preset::Figure1 => {
            let c = paper_closed_form_coefficients()?;
            (c.combination().to_string(), "7:22:0.01".into(), "0:2000:0.01".into())
        }
        Preset::Figure2 => {
            let r = ratio_constant()?;
            let spec = SeriesSpec::linear(vec![(Complex64::new(1.0, 0.0), b[0].clone()), (-r, b[1].clone())]);
            (spec.to_string(), "1.01:16.01:0.01".into(), "0:2000:0.01".into())
        }
    })
}

fn scan(cfg: &JobConfig, a: &ScanArgs) -> Result<Outcome, CliError> {
    let (series, sigma, t) = match a.preset {
        Some(p) => {
            let (s, sg, t) = preset_defaults(p)?;
            (a.series.clone().unwrap_or(s), a.sigma.clone().unwrap_or(sg), a.t.clone().unwrap_or(t))
        }
        None => (need(&a.series, "series")?, need(&a.sigma, "sigma")?, need(&a.t, "t")?),
    };
    let series = Series::new(parse_series(&series)?)?;
    let mut sc = ScanConfig::new(parse_range(&sigma, "sigma")?, parse_range(&t, "t")?);
    sc.precision = precision(cfg, a.eps);
    sc.threshold = a.threshold;
    sc.symmetric = a.symmetric || a.preset.is_some();
    let progress = progress_printer("scan");
    let result = min_modulus_scan_with_progress(&series, &sc, Some(&progress))?;
    if let Some(path) = &a.plot {
        emit_plot_data(cfg, &result, path)?;
    }
    let threshold = a.threshold.unwrap_or_else(|| result.default_threshold());
    let strips = detect_zero_free_strips(&result, threshold);
    if json_mode(cfg) {
        let body = json!({
            "rows": result.rows,
            "warnings": result.warnings,
            "floor": result.floor(),
            "max_tail_bound": result.max_tail_bound(),
            "threshold": threshold,
            "strips": strips,
        });
        return Ok(Outcome::ok(json_record(cfg, &body)));
    }
    if a.threshold.is_some() {
        for s in &strips {
            eprintln!("strip [{}, {}] min {}", s.lo, s.hi, sci(s.min_modulus));
        }
    }
    Ok(Outcome::ok(scan_csv(cfg, &result)))
}

fn parse_box(src: &str) -> Result<Rectangle, CliError> {
    match parse_reals(src)?[..] {
        [s1, s2, t1, t2] => Ok(Rectangle::new(s1, s2, t1, t2)),
        _ => Err(bad(format!("box `{src}`: expected s1,s2,t1,t2"))),
    }
}

fn zeros(cfg: &JobConfig, a: &ZerosArgs) -> Result<Outcome, CliError> {
    let series = Series::new(parse_series(&need(&a.series, "series")?)?)?;
    if a.sigma_star {
        let mut sc = ScanConfig::new(parse_range(&need(&a.sigma, "sigma")?, "sigma")?, parse_range(&need(&a.t, "t")?, "t")?);
        sc.precision = precision(cfg, None);
        sc.symmetric = true;
        let star = estimate_sigma_star(&series, &sc, a.zero_tol.unwrap_or(1e-8))?;
        return Ok(Outcome::ok(json_record(cfg, &star)));
    }
    if let Some(seed) = &a.refine {
        let z = refine_zero(&series, parse_complex(seed)?)?;
        if json_mode(cfg) {
            return Ok(Outcome::ok(json_record(cfg, &json!({ "zero": [z.re, z.im] }))));
        }
        return Ok(Outcome::ok(format!("{} {}\n", sci(z.re), sci(z.im))));
    }
    let rect = parse_box(&need(&a.rect, "box")?)?;
    let n = count_zeros_rectangle(&series, &rect)?;
    if json_mode(cfg) {
        return Ok(Outcome::ok(json_record(cfg, &n)));
    }
    Ok(Outcome::ok(format!("{}\n", n.count)))
}

fn hole_config(cfg: &JobConfig, scan_t: &Option<String>, sigma_step: Option<f64>) -> Result<HoleConfig, CliError> {
    let mut hc = HoleConfig::default();
    if let Some(t) = scan_t {
        hc.t = parse_range(t, "scan-t")?;
    }
    if let Some(s) = sigma_step {
        hc.sigma_step = s;
    }
    if let Some(n) = cfg.terms {
        hc.precision = Precision::Terms(n);
    }
    Ok(hc)
}

fn holes(cfg: &JobConfig, a: &HolesArgs) -> Result<Outcome, CliError> {
    let basis = parse_basis(&need(&a.basis, "basis")?)?;
    let mut hc = hole_config(cfg, &a.scan_t, a.sigma_step)?;
    hc.forced_betas = a.betas.as_deref().map(parse_reals).transpose()?;
    if let Some(v) = a.start_sigma {
        hc.start_sigma = v;
    }
    if let Some(v) = a.strip_width {
        hc.strip_width = v;
    }
    if let Some(v) = a.beta_step {
        hc.beta_step = v;
    }
    if let Some(v) = a.sigma_cap {
        hc.sigma_cap = v;
    }
    let (cv, cert) = construct_k_holes(&basis, &hc)?;
    let body = json!({ "coefficients": cv, "certificate": cert, "zeros_ok": cert.zeros_ok(), "strips_ok": cert.strips_ok() });
    Ok(Outcome::ok(json_record(cfg, &body)))
}

fn funceq(cfg: &JobConfig, a: &FuncEqArgs) -> Result<Outcome, CliError> {
    let q = need(&a.modulus, "modulus")?;
    if !(1..=2000).contains(&q) {
        return Err(bad(format!("modulus {q} outside 1..=2000")));
    }
    let group = build_character_group(q);
    let basis = need(&a.chars, "chars")?
        .split(',')
        .map(|i| {
            let i: usize = i.trim().parse().map_err(|_| bad(format!("`{i}` is not an index")))?;
            group.get(i).cloned().map(SeriesSpec::character).ok_or_else(|| bad(format!("no character {i} mod {q}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let tau = parse_reals(&need(&a.tau, "tau")?)?;
    let hc = hole_config(cfg, &a.scan_t, a.sigma_step)?;
    let (cv, cert) = construct_funceq(&basis, &tau, &hc)?;
    let body = json!({ "coefficients": cv, "certificate": cert, "zeros_ok": cert.zeros_ok(), "strips_ok": cert.strips_ok() });
    Ok(Outcome::ok(json_record(cfg, &body)))
}

pub fn default_k_grid() -> Vec<f64> {
    (0..50).map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 49.0)).collect()
}

fn radii(cfg: &JobConfig, a: &RadiiArgs) -> Result<Outcome, CliError> {
    let ks = match &a.k {
        Some(s) => parse_reals(s)?,
        None => default_k_grid(),
    };
    let r1 = radius_r1::<f64>();
    let mut rows = Vec::new();
    for k in ks {
        rows.push((k, radius_r2(k)?, radius_r3(k)?));
    }
    if json_mode(cfg) {
        let body = json!({
            "r1": r1,
            "rows": rows.iter().map(|(k, r2, r3)| json!({ "K": k, "r2": r2, "r3": r3 })).collect::<Vec<_>>(),
        });
        return Ok(Outcome::ok(json_record(cfg, &body)));
    }
    let mut s = format!("# R1 {} residual {}\nK,R2,R3,residual2,residual3\n", sci(r1.radius), sci(r1.residual));
    for (k, r2, r3) in rows {
        s.push_str(&format!("{},{},{},{},{}\n", sci(k), sci(r2.radius), sci(r3.radius), sci(r2.residual), sci(r3.residual)));
    }
    Ok(Outcome::ok(s))
}

/// `k1,k2=coef;...`
fn parse_poly(src: &str, dim: usize) -> Result<TrigPoly, CliError> {
    let mut terms = Vec::new();
    for part in src.split(';').filter(|p| !p.trim().is_empty()) {
        let (ks, coef) = part.split_once('=').ok_or_else(|| bad(format!("term `{part}`: expected k1,...,kn=coef")))?;
        let ks: Vec<i64> = ks
            .split(',')
            .map(|k| k.trim().parse().map_err(|_| bad(format!("`{k}` is not an integer"))))
            .collect::<Result<_, _>>()?;
        terms.push((ks, parse_complex(coef.trim())?));
    }
    Ok(TrigPoly::new(dim, terms)?)
}

/// Random trigonometric polynomial with frequencies in `[-3, 3]^dim`.
pub fn random_poly(dim: usize, seed: u64) -> TrigPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for _ in 0..8 {
        let k: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
        terms.push((k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    }
    TrigPoly::new(dim, terms).expect("valid polynomial")
}

fn torus_kw(cfg: &JobConfig, a: &KwArgs) -> Result<Outcome, CliError> {
    let lambdas = match (&a.freqs, &a.primes) {
        (Some(f), None) => parse_reals(f)?,
        (None, Some(p)) => parse_reals(p)?.into_iter().map(f64::ln).collect(),
        (None, None) => vec![2f64.ln(), 3f64.ln()],
        (Some(_), Some(_)) => return Err(bad("give either --freqs or --primes".into())),
    };
    let poly = match &a.poly {
        Some(p) => parse_poly(p, lambdas.len())?,
        None => random_poly(lambdas.len(), cfg.seed),
    };
    let h = TorusFunction::Trig(poly.clone());
    let t_end = a.t_end.unwrap_or(1e4);
    let avg = kw_time_average(&h, &lambdas, 0.0, t_end, a.dt.unwrap_or(1e-3))?;
    let int = torus_integral(&h)?;
    let body = json!({
        "lambdas": lambdas,
        "poly": poly,
        "T": t_end,
        "time_average": [avg.re, avg.im],
        "torus_integral": [int.value.re, int.value.im],
        "difference": (avg - int.value).norm(),
    });
    Ok(Outcome::ok(json_record(cfg, &body)))
}

fn torus_kappa(cfg: &JobConfig, a: &KappaArgs) -> Result<Outcome, CliError> {
    let basis = parse_basis(&need(&a.basis, "basis")?)?;
    let p = need(&a.p, "p")?;
    let sigma = need(&a.sigma, "sigma")?;
    let y = match &a.y {
        Some(y) => parse_complexes(y)?,
        None => vec![Complex64::new(0.0, 0.0); basis.len()],
    };
    let j = a.j.unwrap_or(0);
    let k = kappa_integrals(&basis, p, sigma, &y, j)?;
    let b = kappa_bounds(&basis, p, sigma, &y, j)?;
    Ok(Outcome::ok(json_record(cfg, &json!({ "kappa": k, "bounds": b }))))
}

/// Where the main output goes.
pub fn destination(cfg: &JobConfig) -> Option<PathBuf> {
    cfg.out.clone()
}
