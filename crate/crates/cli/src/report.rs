//! The `report` bundle. Sections run on scoped threads and are assembled in a
//! fixed order, so the JSON depends only on the configuration and the seed.
//! Wall-clock times appear only with `--timing`.

use std::fmt::Write as _;
use std::time::Instant;

use floorlog::alpha::{floor_alpha_plus_log, FracPower, Rounding, Sign2};
use floorlog::recur::polynomial_detector;
use floorlog::series::{g_coefficients, series_rows};
use floorlog::seq::{tau, FloorLogSeq};
use floorlog::Error;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::commands::{b_terms, digits_summary, kernel_report, run_detectors};
use crate::config::{core_exit_code, envelope, to_value, CliError, ExperimentConfig, Outcome};
use crate::{DetectorBounds, Format};

pub struct ReportSizes {
    pub m_max: u32,
    pub horizon: u32,
    pub e_max: u32,
    pub trunc_len: usize,
    pub terms: usize,
    pub samples: usize,
}

/// Largest sampled `n` in the consistency section.
const SAMPLE_N_MAX: u64 = 1 << 20;
/// Largest sampled `m` in the consistency section.
const SAMPLE_M_MAX: i64 = 40;

struct Section {
    name: &'static str,
    body: Value,
    code: u8,
    wall_ms: u64,
}

fn section(name: &'static str, f: impl FnOnce() -> Result<(Value, bool), Error>) -> Section {
    let t0 = Instant::now();
    let (body, code) = match f() {
        Ok((Value::Object(mut m), ok)) => {
            let mut out = Map::new();
            out.insert("status".into(), json!(if ok { "ok" } else { "mismatch" }));
            out.append(&mut m);
            (Value::Object(out), if ok { 0 } else { 4 })
        }
        Ok((v, ok)) => (json!({"status": if ok { "ok" } else { "mismatch" }, "value": v}), if ok { 0 } else { 4 }),
        Err(e) => (json!({"status": "error", "error": e.to_string()}), core_exit_code(&e)),
    };
    Section { name, body, code, wall_ms: t0.elapsed().as_millis() as u64 }
}

pub fn report(cfg: &ExperimentConfig, sizes: &ReportSizes, bounds: DetectorBounds) -> Result<Outcome, CliError> {
    let format = cfg.format_or(Format::Json);
    if format == Format::Csv {
        return Err(CliError::Usage("report supports json and text output".into()));
    }
    let t0 = Instant::now();
    let sections: Vec<Section> = std::thread::scope(|s| {
        let coeffs = s.spawn(|| section("coeffs", || coeffs_section(cfg, sizes.m_max)));
        let digits = s.spawn(|| section("digits", || digits_section(cfg, sizes.horizon, bounds)));
        let kernel = s.spawn(|| section("kernel", || kernel_section(cfg, sizes.e_max, sizes.trunc_len)));
        let guess = s.spawn(|| section("guess", || guess_section(cfg, sizes.terms, bounds)));
        let consistency = s.spawn(|| section("consistency", || consistency_section(cfg, sizes.samples)));
        [coeffs, digits, kernel, guess, consistency]
            .into_iter()
            .map(|h| h.join().expect("report section panicked"))
            .collect()
    });

    let mut body = Map::new();
    body.insert("tool".into(), json!({"name": "floorlog", "version": env!("CARGO_PKG_VERSION")}));
    body.insert(
        "config".into(),
        json!({
            "k": cfg.k,
            "alpha": cfg.alpha,
            "seed": cfg.seed,
            "budget": cfg.budget,
            "m_max": sizes.m_max,
            "horizon": sizes.horizon,
            "e_max": sizes.e_max,
            "trunc_len": sizes.trunc_len,
            "terms": sizes.terms,
            "samples": sizes.samples,
            "bounds": {
                "max_order": bounds.max_order,
                "max_degree": bounds.max_degree,
                "prec_order": bounds.prec_order,
                "prec_degree": bounds.prec_degree,
                "period_span": bounds.period_span,
            },
        }),
    );
    let mut timing = Map::new();
    for s in &sections {
        body.insert(s.name.into(), s.body.clone());
        timing.insert(s.name.into(), json!(s.wall_ms));
    }
    timing.insert("total".into(), json!(t0.elapsed().as_millis() as u64));
    body.insert("timing".into(), if cfg.timing { Value::Object(timing) } else { Value::Null });
    // first failing section, in report order, decides the exit code
    let code = sections.iter().map(|s| s.code).find(|&c| c != 0).unwrap_or(0);

    let text = match format {
        Format::Text => {
            let mut out = format!("floorlog {} report for k = {}, alpha = {}\n", env!("CARGO_PKG_VERSION"), cfg.k, cfg.alpha);
            for s in &sections {
                let status = s.body["status"].as_str().unwrap_or("?");
                writeln!(out, "{}: {status}", s.name).expect("write to string");
            }
            out
        }
        _ => envelope("report", Value::Object(body)),
    };
    Ok(Outcome { text, code })
}

fn coeffs_section(cfg: &ExperimentConfig, m_max: u32) -> Result<(Value, bool), Error> {
    let rows = series_rows(cfg.k, &cfg.alpha, m_max, cfg.budget)?;
    let all_match = rows.iter().all(|r| r.matches);
    let brute_rows = rows.iter().filter(|r| r.b_brute.is_some()).count();
    Ok((json!({"all_match": all_match, "brute_rows": brute_rows, "rows": rows}), all_match))
}

fn digits_section(cfg: &ExperimentConfig, horizon: u32, bounds: DetectorBounds) -> Result<(Value, bool), Error> {
    let s = digits_summary(cfg, horizon, None)?;
    let seq: Vec<BigInt> = s.rows.iter().map(|r| BigInt::from(r.g_m)).collect();
    let poly = polynomial_detector(&seq, bounds.prec_order, bounds.prec_degree);
    let mut v = to_value(&s);
    v["polynomial"] = match poly {
        Ok(d) => to_value(&d),
        Err(e) => json!({"status": "error", "error": e.to_string()}),
    };
    Ok((v, s.matches))
}

fn kernel_section(cfg: &ExperimentConfig, e_max: u32, trunc_len: usize) -> Result<(Value, bool), Error> {
    Ok((to_value(&kernel_report(cfg, e_max, trunc_len)?), true))
}

fn guess_section(cfg: &ExperimentConfig, terms: usize, bounds: DetectorBounds) -> Result<(Value, bool), Error> {
    let seq = b_terms(cfg, terms)?;
    let mut v = to_value(&run_detectors(&seq, bounds)?);
    v["sequence"] = json!("b");
    Ok((v, true))
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        }
    }

    fn value(&self) -> Value {
        json!({"checked": self.checked, "failed": self.failures.len(), "examples": self.failures})
    }

    fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Seeded spot checks of invariants that the deterministic sections do not cover.
fn consistency_section(cfg: &ExperimentConfig, samples: usize) -> Result<(Value, bool), Error> {
    let k = cfg.k;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let exact = cfg.alpha.exact()?;
    let seq = FloorLogSeq::new(k, exact, SAMPLE_N_MAX + 1)?;
    let fp = FracPower::new(k, exact)?;
    let kk = BigInt::from(k);

    let mut step = Tally::default();
    let mut direct = Tally::default();
    let mut words = Tally::default();
    let mut ceil_floor = Tally::default();
    let mut bracket = Tally::default();
    for _ in 0..samples {
        let n = rng.gen_range(0..SAMPLE_N_MAX);
        let d = seq.get(n + 1) - seq.get(n);
        step.check(d == 0 || d == 1, || format!("a({}) - a({n}) = {d}", n + 1));
        let a = floor_alpha_plus_log(k, &cfg.alpha, n)?;
        direct.check(a == seq.get(n), || format!("n = {n}: direct {a}, table {}", seq.get(n)));
        let w = tau(k, n);
        words.check(w.value() == n.into(), || format!("tau({n}) = {w} does not read back"));

        let m = rng.gen_range(1..=SAMPLE_M_MAX);
        let ceil = fp.value(m, Sign2::Plus, Rounding::Ceil);
        let neg_floor = fp.value(m, Sign2::Minus, Rounding::Floor);
        ceil_floor.check(ceil == -&neg_floor, || format!("m = {m}: ceil {ceil}, -floor(-) {}", -&neg_floor));
        let lo = fp.value(m, Sign2::Plus, Rounding::Floor);
        let hi = fp.value(m + 1, Sign2::Plus, Rounding::Floor);
        let scaled = &kk * &lo;
        bracket.check(scaled <= hi && hi < &scaled + &kk, || format!("m = {m}: {k}*{lo} vs {hi}"));
    }
    // the digit transform must stay in range on a random stretch as well
    let m_top = rng.gen_range(1..=64u32);
    let digits_ok = g_coefficients(k, &cfg.alpha, m_top).is_ok();

    let all = [&step, &direct, &words, &ceil_floor, &bracket].iter().all(|t| t.ok()) && digits_ok;
    let v = json!({
        "seed": cfg.seed,
        "samples": samples,
        "unit_step": step.value(),
        "direct_floor": direct.value(),
        "word_round_trip": words.value(),
        "ceil_is_neg_floor_neg": ceil_floor.value(),
        "power_bracket": bracket.value(),
        "digit_range": {"m_max": m_top, "ok": digits_ok},
    });
    Ok((v, all))
}
