use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use denjoy_core::certify::{
    certify_membership, verify_certificate, Certificate, GapSequence, SparseBounds,
};
use denjoy_core::counterexample::{
    construct_counterexample, verify_counterexample, CounterexampleCert, CounterexampleDoc,
    WeightOracle,
};
use denjoy_core::extremal::build_extremal;
use denjoy_core::gorny::{verify_gorny_sampled, CorpusRegistry, GornyCheck};
use denjoy_core::quasianalytic::{propagation_plan, taylor_constant, PropagationPlan};
use denjoy_core::sequences::{
    check_condition_a, check_log_convex, fit_analytic_constant, quasianalytic_diagnostic,
    ConditionReport, FamilyRegistry, FamilySpec, LogSequence, QuasianalyticDiagnostic,
    SequenceSpec,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::SequenceArgs;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// The sequence spec named by the flags, without building it.
fn sequence_spec(args: &SequenceArgs) -> Result<SequenceSpec, CliError> {
    if let Some(path) = &args.sequence {
        return read_json(path);
    }
    let kind = args
        .family
        .clone()
        .ok_or_else(|| CliError::Usage("one of --family or --sequence is required".into()))?;
    Ok(SequenceSpec {
        family: FamilySpec {
            kind,
            s: args.s,
            base: args.base,
            lambda: args.lambda,
            logs: None,
        },
        n_max: args.n_max,
    })
}

fn build(spec: &SequenceSpec) -> Result<LogSequence, CliError> {
    Ok(spec.build(&FamilyRegistry::standard())?)
}

#[derive(Debug, Serialize)]
struct ConditionA {
    m0: f64,
    #[serde(flatten)]
    report: ConditionReport,
}

#[derive(Debug, Serialize)]
struct ConditionB {
    c: f64,
}

#[derive(Debug, Serialize)]
struct CheckReport {
    sequence: SequenceSpec,
    log_convex: ConditionReport,
    condition_a: ConditionA,
    condition_b: ConditionB,
    quasianalytic: QuasianalyticDiagnostic,
    #[serde(skip_serializing_if = "Option::is_none")]
    propagation: Option<PropagationPlan>,
}

pub fn check(args: &SequenceArgs, m0: f64, interval: Option<Vec<f64>>) -> Result<Value, CliError> {
    if !m0.is_finite() || m0 < 0.0 {
        return Err(CliError::Usage(format!("--m0 must be finite and >= 0, got {m0}")));
    }
    let spec = sequence_spec(args)?;
    let seq = build(&spec)?;
    let propagation = match interval.as_deref() {
        Some(&[a, b]) => Some(propagation_plan(a, b, taylor_constant(&seq))?),
        _ => None,
    };
    let report = CheckReport {
        log_convex: check_log_convex(&seq),
        condition_a: ConditionA {
            m0,
            report: check_condition_a(&seq, m0),
        },
        condition_b: ConditionB {
            c: fit_analytic_constant(&seq),
        },
        quasianalytic: quasianalytic_diagnostic(&seq),
        propagation,
        sequence: spec,
    };
    let value = to_value(&report);
    if let Some(v) = report
        .log_convex
        .first_violation
        .as_ref()
        .or(report.condition_a.report.first_violation.as_ref())
    {
        return Err(CliError::failed(v.to_string(), value));
    }
    Ok(value)
}

#[derive(Debug, Serialize, Deserialize)]
struct CertifyReport {
    sequence: SequenceSpec,
    orders: Vec<usize>,
    m0: f64,
    certificate: Certificate,
    verification: ConditionReport,
}

/// Split `[order, log_F]` pairs into gap-order entries and low orders.
fn split_bounds(d: &GapSequence, pairs: Vec<(usize, f64)>) -> Result<SparseBounds, CliError> {
    let mut entries = Vec::new();
    let mut low = Vec::new();
    for (order, log_f) in pairs {
        if order < d.first() {
            low.push((order, log_f));
        } else if d.orders().contains(&order) {
            entries.push((order, log_f));
        } else {
            return Err(CliError::Usage(format!(
                "bound at order {order} is neither a gap order nor below d_0"
            )));
        }
    }
    entries.sort_by_key(|&(o, _)| o);
    Ok(SparseBounds::new(entries).with_low_orders(low))
}

pub fn certify(
    args: &SequenceArgs,
    orders: Vec<usize>,
    bounds: Option<&Path>,
    length: Option<f64>,
    m0: f64,
) -> Result<Value, CliError> {
    let bounds = bounds.ok_or_else(|| CliError::Usage("--bounds is required".into()))?;
    let length = length.ok_or_else(|| CliError::Usage("--length is required".into()))?;
    let spec = sequence_spec(args)?;
    let seq = build(&spec)?;
    let d = GapSequence::new(orders.clone())?;
    let pairs: Vec<(usize, f64)> = read_json(bounds)?;
    let sparse = split_bounds(&d, pairs)?;
    let certificate = certify_membership(&seq, &d, &sparse, length, m0)?;
    let verification = verify_certificate(&certificate, &seq);
    let report = CertifyReport {
        sequence: spec,
        orders,
        m0,
        certificate,
        verification,
    };
    finish_verified(&report, &report.verification)
}

pub fn certify_verify(path: &Path) -> Result<Value, CliError> {
    let mut report: CertifyReport = read_json(path)?;
    let seq = build(&report.sequence)?;
    report.verification = verify_certificate(&report.certificate, &seq);
    finish_verified(&report, &report.verification)
}

fn finish_verified<T: Serialize>(report: &T, verification: &ConditionReport) -> Result<Value, CliError> {
    let value = to_value(report);
    match &verification.first_violation {
        Some(v) => Err(CliError::failed(v.to_string(), value)),
        None if !verification.holds => Err(CliError::failed("verification failed", value)),
        None => Ok(value),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CounterexampleReport {
    family: FamilySpec,
    i0: usize,
    rounds: usize,
    counterexample: CounterexampleDoc,
    verification: ConditionReport,
}

pub fn counterexample(
    args: &SequenceArgs,
    i0: usize,
    rounds: usize,
    budget: usize,
) -> Result<Value, CliError> {
    let family_spec = sequence_spec(args)?.family;
    let family = FamilyRegistry::standard().resolve(&family_spec)?;
    let oracle = WeightOracle::with_budget(family.as_ref(), budget)?;
    let cert = construct_counterexample(&oracle, i0, rounds)?;
    let verification = verify_counterexample(&cert, &oracle)?;
    let report = CounterexampleReport {
        family: family_spec,
        i0,
        rounds,
        counterexample: CounterexampleDoc::from(&cert),
        verification,
    };
    finish_verified(&report, &report.verification)
}

pub fn counterexample_verify(path: &Path, budget: usize) -> Result<Value, CliError> {
    let mut report: CounterexampleReport = read_json(path)?;
    let family = FamilyRegistry::standard().resolve(&report.family)?;
    let oracle = WeightOracle::with_budget(family.as_ref(), budget)?;
    report.verification = match CounterexampleCert::try_from(report.counterexample.clone()) {
        Ok(cert) => verify_counterexample(&cert, &oracle)?,
        Err(e) => {
            return Err(CliError::failed(e.to_string(), to_value(&report)));
        }
    };
    finish_verified(&report, &report.verification)
}

#[derive(Debug, Serialize)]
struct ExtremalRow {
    order: usize,
    #[serde(with = "denjoy_core::serde_log")]
    log_midpoint: f64,
    #[serde(with = "denjoy_core::serde_log")]
    log_lower: f64,
    #[serde(with = "denjoy_core::serde_log")]
    log_sup: f64,
    #[serde(with = "denjoy_core::serde_log")]
    log_upper: f64,
    midpoint_holds: bool,
    upper_holds: bool,
}

#[derive(Debug, Serialize)]
struct ExtremalReport {
    a: f64,
    b: f64,
    k_trunc: usize,
    grid: usize,
    log_n: Vec<f64>,
    rows: Vec<ExtremalRow>,
}

pub fn extremal(
    args: &SequenceArgs,
    counterexample: Option<&Path>,
    interval: (f64, f64),
    k_trunc: Option<usize>,
    grid: usize,
    max_order: usize,
) -> Result<Value, CliError> {
    let seq = match counterexample {
        Some(path) => {
            let report: CounterexampleReport = read_json(path)?;
            LogSequence::new(report.counterexample.log_n)?
        }
        None => build(&sequence_spec(args)?)?,
    };
    if grid < 2 {
        return Err(CliError::Usage(format!("--grid must be >= 2, got {grid}")));
    }
    let series = build_extremal(&seq, interval, k_trunc)?;
    let top = max_order.min(seq.n_max());
    let mut rows = Vec::with_capacity(top + 1);
    for order in 0..=top {
        let mid = series.check_midpoint_lower(order)?;
        let up = series.check_upper_bound(order, grid)?;
        rows.push(ExtremalRow {
            order,
            log_midpoint: mid.log_value,
            log_lower: mid.log_lower,
            log_sup: up.log_sup_sampled,
            log_upper: up.log_bound,
            midpoint_holds: mid.holds,
            upper_holds: up.holds,
        });
    }
    let failing = rows
        .iter()
        .find(|r| !(r.midpoint_holds && r.upper_holds))
        .map(|r| r.order);
    let report = ExtremalReport {
        a: interval.0,
        b: interval.1,
        k_trunc: series.k_trunc(),
        grid,
        log_n: seq.into_logs(),
        rows,
    };
    let value = to_value(&report);
    match failing {
        Some(order) => Err(CliError::failed(
            format!("extremal bound violated at order {order}"),
            value,
        )),
        None => Ok(value),
    }
}

#[derive(Debug, Serialize)]
struct GornyReport {
    checks: Vec<GornyCheck>,
    all_hold: bool,
}

const STANDARD_INTERVALS: [(f64, f64); 3] = [(0.0, 1.0), (0.0, TAU), (-1.0, 1.0)];

pub fn gorny(
    function: Option<&str>,
    interval: Option<Vec<f64>>,
    m: Option<usize>,
    k: Option<usize>,
    max_m: usize,
    grid: usize,
) -> Result<Value, CliError> {
    let corpus = CorpusRegistry::standard();
    let functions: Vec<String> = match function {
        Some(f) => vec![f.to_string()],
        None => corpus.names().map(str::to_string).collect(),
    };
    let intervals = match interval.as_deref() {
        Some(&[a, b]) => vec![(a, b)],
        _ => STANDARD_INTERVALS.to_vec(),
    };
    let ms: Vec<usize> = match m {
        Some(m) => vec![m],
        None => (2..=max_m).collect(),
    };
    let mut checks = Vec::new();
    for f in &functions {
        for &iv in &intervals {
            for &m in &ms {
                let ks: Vec<usize> = match k {
                    Some(k) => vec![k],
                    None => (1..m).collect(),
                };
                for k in ks {
                    checks.push(verify_gorny_sampled(&corpus, f, iv, m, k, grid)?);
                }
            }
        }
    }
    if checks.is_empty() {
        return Err(CliError::Usage("no (m, k) pairs selected".into()));
    }
    let failing = checks.iter().find(|c| !c.holds).cloned();
    let report = GornyReport {
        all_hold: failing.is_none(),
        checks,
    };
    let value = to_value(&report);
    match failing {
        Some(c) => Err(CliError::failed(
            format!(
                "Cartan-Gorny bound violated for {} on [{}, {}] at m = {}, k = {}",
                c.function, c.a, c.b, c.m, c.k
            ),
            value,
        )),
        None => Ok(value),
    }
}
