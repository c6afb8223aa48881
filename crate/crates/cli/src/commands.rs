use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use floorlog::alpha::classify_k_alpha;
use floorlog::kernel::{rank_profile, KernelReport};
use floorlog::recur::{
    detect_period_bounded, linear_detector, period_detector, polynomial_detector, rational_detector, Bounds,
    DetectorResult, PeriodReport, LINEAR_HOLDOUT, POLY_HOLDOUT,
};
use floorlog::series::{coeff_table, digit_oracle, g_coefficients, series_csv, series_rows, Method};
use floorlog::seq::{grouped_by_exponent, grouped_display, sequence_terms, tau};
use floorlog::{Error, KAlphaClass};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::config::{csv_field, envelope, text_table, to_value, CliError, ExperimentConfig, Outcome};
use crate::{DetectorBounds, Format, Generator};

pub fn terms(cfg: &ExperimentConfig, start: u64, count: u64) -> Result<Outcome, CliError> {
    let w = sequence_terms(cfg.k, &cfg.alpha, start, count)?;
    let words: Vec<String> = (0..count).map(|i| tau(cfg.k, start + i).digit_string()).collect();
    let grouped = grouped_prefix(cfg, start, count)?;
    let text = match cfg.format_or(Format::Text) {
        Format::Csv => w.to_csv(),
        Format::Json => envelope(
            "terms",
            json!({
                "k": cfg.k,
                "alpha": cfg.alpha,
                "start": start,
                "values": w.values,
                "tau": words,
                "grouped": grouped,
            }),
        ),
        Format::Text => {
            let mut out = String::new();
            for (i, (v, word)) in w.values.iter().zip(&words).enumerate() {
                writeln!(out, "{}\t{v}\t{word}", start + i as u64).expect("write to string");
            }
            if let Some(g) = grouped {
                writeln!(out, "grouped: {g}").expect("write to string");
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}

/// The grouped display of every complete exponent block inside the window,
/// when the window starts at 0.
fn grouped_prefix(cfg: &ExperimentConfig, start: u64, count: u64) -> Result<Option<String>, CliError> {
    if start != 0 || count == 0 || !cfg.alpha.is_exact() {
        return Ok(None);
    }
    let mut m = 0u32;
    while cfg.k.checked_pow(m + 1).is_some_and(|t| t <= count) {
        m += 1;
    }
    Ok(Some(grouped_display(&grouped_by_exponent(cfg.k, &cfg.alpha, m)?)))
}

pub fn coeffs(cfg: &ExperimentConfig, m_max: u32) -> Result<Outcome, CliError> {
    // the brute-force column is the point of the self-test, so it must fit
    if cfg.k.checked_pow(m_max).is_none_or(|n| n > cfg.budget) {
        return Err(Error::Budget { needed: format!("{}^{m_max}", cfg.k), budget: cfg.budget }.into());
    }
    let rows = series_rows(cfg.k, &cfg.alpha, m_max, cfg.budget)?;
    let all_match = rows.iter().all(|r| r.matches);
    let text = match cfg.format_or(Format::Text) {
        Format::Csv => series_csv(&rows),
        Format::Json => envelope(
            "coeffs",
            json!({"k": cfg.k, "alpha": cfg.alpha, "m_max": m_max, "rows": rows, "all_match": all_match}),
        ),
        Format::Text => {
            let opt = |o: &Option<String>| o.clone().unwrap_or_else(|| "-".into());
            let optd = |o: Option<u32>| o.map_or_else(|| "-".into(), |d| d.to_string());
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.m.to_string(),
                        opt(&r.b_brute),
                        r.b_closed.clone(),
                        r.rational_part_coeff.clone(),
                        opt(&r.floor_term),
                        optd(r.g_m),
                        optd(r.digit_m),
                        r.matches.to_string(),
                    ]
                })
                .collect();
            let mut out = text_table(
                &["m", "b_brute", "b_closed", "rational_part", "floor_term", "g_m", "digit_m", "match"],
                &body,
            );
            writeln!(out, "all match: {all_match}").expect("write to string");
            out
        }
    };
    Ok(Outcome { text, code: if all_match { 0 } else { 4 } })
}

#[derive(Debug, Serialize)]
pub struct DigitRow {
    pub m: u32,
    pub g_m: u32,
    pub digit_m: u32,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Everything `digits` reports, shared with the report bundle.
#[derive(Debug, Serialize)]
pub struct DigitsSummary {
    pub rows: Vec<DigitRow>,
    #[serde(rename = "match")]
    pub matches: bool,
    pub period: PeriodReport,
    pub class: String,
    pub class_detail: KAlphaClass,
}

pub fn digits_summary(cfg: &ExperimentConfig, horizon: u32, max_span: Option<usize>) -> Result<DigitsSummary, Error> {
    let g = g_coefficients(cfg.k, &cfg.alpha, horizon)?.g;
    let oracle = digit_oracle(cfg.k, &cfg.alpha, horizon)?;
    let rows: Vec<DigitRow> = g
        .iter()
        .zip(&oracle)
        .enumerate()
        .map(|(i, (&g_m, &digit_m))| DigitRow { m: i as u32 + 1, g_m, digit_m, matches: g_m == digit_m })
        .collect();
    let matches = g.len() == oracle.len() && rows.iter().all(|r| r.matches);
    let h = horizon as usize;
    let period = detect_period_bounded(&g, h, max_span.unwrap_or(h / 3))?;
    let class_detail = classify_k_alpha(cfg.k, &cfg.alpha)?;
    Ok(DigitsSummary { rows, matches, period, class: class_detail.to_string(), class_detail })
}

pub fn digits(cfg: &ExperimentConfig, horizon: u32, max_span: Option<usize>) -> Result<Outcome, CliError> {
    let s = digits_summary(cfg, horizon, max_span)?;
    let text = match cfg.format_or(Format::Text) {
        Format::Csv => {
            let mut out = String::from("m,g_m,digit_m,match\n");
            for r in &s.rows {
                writeln!(out, "{},{},{},{}", r.m, r.g_m, r.digit_m, r.matches).expect("write to string");
            }
            out
        }
        Format::Json => envelope("digits", json!({"k": cfg.k, "alpha": cfg.alpha, "digits": s})),
        Format::Text => {
            let body: Vec<Vec<String>> = s
                .rows
                .iter()
                .map(|r| vec![r.m.to_string(), r.g_m.to_string(), r.digit_m.to_string(), r.matches.to_string()])
                .collect();
            let mut out = text_table(&["m", "g_m", "digit_m", "match"], &body);
            writeln!(out, "match: {}", s.matches).expect("write to string");
            writeln!(out, "period: {}", period_text(&s.period)).expect("write to string");
            writeln!(out, "class: {}", s.class).expect("write to string");
            out
        }
    };
    Ok(Outcome { text, code: if s.matches { 0 } else { 4 } })
}

fn period_text(p: &PeriodReport) -> String {
    match p.found {
        Some(f) => format!("({}, {})", f.preperiod, f.period),
        None => format!(
            "none with preperiod + period <= {} in {} digits",
            p.max_span, p.horizon
        ),
    }
}

pub fn kernel_report(cfg: &ExperimentConfig, e_max: u32, trunc_len: usize) -> Result<KernelReport, Error> {
    let t0 = Instant::now();
    let profile = rank_profile(cfg.k, &cfg.alpha, e_max, trunc_len)?;
    let wall = cfg.timing.then(|| t0.elapsed().as_millis() as u64);
    Ok(KernelReport::new(cfg.k, &cfg.alpha, &profile, wall))
}

pub fn kernel(cfg: &ExperimentConfig, e_max: u32, trunc_len: usize) -> Result<Outcome, CliError> {
    let r = kernel_report(cfg, e_max, trunc_len)?;
    let text = match cfg.format_or(Format::Text) {
        Format::Csv => {
            let mut out = String::from("e,rank\n");
            for (e, rank) in r.ranks.iter().enumerate() {
                writeln!(out, "{e},{rank}").expect("write to string");
            }
            out
        }
        Format::Json => envelope("kernel", to_value(&r)),
        Format::Text => {
            let body: Vec<Vec<String>> =
                r.ranks.iter().enumerate().map(|(e, rank)| vec![e.to_string(), rank.to_string()]).collect();
            let mut out = text_table(&["e", "rank"], &body);
            writeln!(out, "stabilized: {}", r.stabilized).expect("write to string");
            writeln!(out, "verdict: {}", r.verdict).expect("write to string");
            if let Some(ms) = r.wall_time_ms {
                writeln!(out, "wall_time_ms: {ms}").expect("write to string");
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}

/// Results keyed by detector kind, in a fixed order.
#[derive(Debug, Serialize)]
pub struct GuessResults {
    pub terms: usize,
    pub linear: DetectorResult,
    pub rational: DetectorResult,
    pub polynomial: DetectorResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<DetectorResult>,
}

impl GuessResults {
    fn all(&self) -> Vec<&DetectorResult> {
        let mut v = vec![&self.linear, &self.rational, &self.polynomial];
        v.extend(self.period.as_ref());
        v
    }
}

fn skipped(kind: &str, bounds: Bounds, need: usize) -> DetectorResult {
    DetectorResult {
        kind: kind.into(),
        summary: format!("{kind}: skipped, needs at least {need} terms, got {}", bounds.terms),
        bounds,
        found: false,
        parameters: None,
        validated: false,
    }
}

/// Runs every detector with its bounds shrunk to what `seq.len()` supports.
pub fn run_detectors(seq: &[BigInt], b: DetectorBounds) -> Result<GuessResults, Error> {
    let n = seq.len();
    let linear_order = b.max_order.min(n.saturating_sub(LINEAR_HOLDOUT) / 2);
    let linear = if linear_order == 0 {
        let bounds = Bounds { terms: n, max_order: Some(0), ..Bounds::default() };
        skipped("linear", bounds, LINEAR_HOLDOUT + 2)
    } else {
        linear_detector(seq, linear_order)?
    };
    let rational_degree = b.max_degree.min(n.saturating_sub(2) / 2);
    let rational = if n < 2 {
        skipped("rational", Bounds { terms: n, max_degree: Some(0), ..Bounds::default() }, 2)
    } else {
        rational_detector(seq, rational_degree)?
    };
    let need = |r: usize, d: usize| (r + 1) * (d + 1) + r + POLY_HOLDOUT;
    let (mut r, mut d) = (b.prec_order.max(1), b.prec_degree);
    while need(r, d) > n && (d > 0 || r > 1) {
        if d > 0 {
            d -= 1;
        } else {
            r -= 1;
        }
    }
    let polynomial = if need(r, d) > n {
        let bounds = Bounds { terms: n, max_order: Some(r), max_degree: Some(d), ..Bounds::default() };
        skipped("polynomial", bounds, need(r, d))
    } else {
        polynomial_detector(seq, r, d)?
    };
    let digits: Option<Vec<u32>> = seq.iter().map(ToPrimitive::to_u32).collect();
    let period = match digits {
        Some(ds) if n >= 8 => Some(period_detector(&ds, b.period_span.min(n / 3).max(1))?),
        _ => None,
    };
    Ok(GuessResults { terms: n, linear, rational, polynomial, period })
}

pub fn parse_sequence(text: &str) -> Result<Vec<BigInt>, CliError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            let v = tok
                .parse::<BigInt>()
                .map_err(|_| CliError::Usage(format!("line {}: {tok:?} is not an integer", lineno + 1)))?;
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("sequence input is empty".into()));
    }
    Ok(out)
}

pub fn generate(cfg: &ExperimentConfig, gen: Generator, count: usize) -> Result<Vec<BigInt>, Error> {
    Ok(match gen {
        Generator::B if count == 0 => Vec::new(),
        Generator::B => coeff_table(cfg.k, &cfg.alpha, count as u32 - 1, Method::Closed, cfg.budget)?.b,
        Generator::G => g_coefficients(cfg.k, &cfg.alpha, count as u32)?.g.into_iter().map(BigInt::from).collect(),
        Generator::A => sequence_terms(cfg.k, &cfg.alpha, 0, count as u64)?.values.into_iter().map(BigInt::from).collect(),
    })
}

pub fn guess(
    cfg: &ExperimentConfig,
    input: Option<&Path>,
    gen: Option<Generator>,
    count: usize,
    bounds: DetectorBounds,
) -> Result<Outcome, CliError> {
    let (source, seq) = match (input, gen) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            (json!({"file": path.display().to_string()}), parse_sequence(&text)?)
        }
        (None, Some(g)) => {
            let name = format!("{g:?}").to_lowercase();
            (json!({"generator": name, "k": cfg.k, "alpha": cfg.alpha}), generate(cfg, g, count)?)
        }
        (None, None) => return Err(CliError::Usage("guess needs --input FILE or --gen b|g|a".into())),
    };
    let res = run_detectors(&seq, bounds)?;
    let text = match cfg.format_or(Format::Text) {
        Format::Csv => {
            let mut out = String::from("kind,found,validated,parameters\n");
            for d in res.all() {
                let p = d.parameters.as_deref().unwrap_or("");
                writeln!(out, "{},{},{},{}", d.kind, d.found, d.validated, csv_field(p)).expect("write to string");
            }
            out
        }
        Format::Json => {
            let mut body = to_value(&res);
            body["source"] = source;
            envelope("guess", body)
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "terms: {}", res.terms).expect("write to string");
            for d in res.all() {
                writeln!(out, "{}", d.summary).expect("write to string");
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}

/// The report's guess section input: `b(0..count)` by closed form.
pub fn b_terms(cfg: &ExperimentConfig, count: usize) -> Result<Vec<BigInt>, Error> {
    generate(cfg, Generator::B, count)
}
