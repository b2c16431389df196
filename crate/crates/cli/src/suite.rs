//! Grid experiments. Instances run in parallel; the report lists them in
//! grid order (suite, field, n, a, k), so output does not depend on scheduling.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::Result;
use dickson_core::charsum::{
    lemma_decomposition, sum_over_value_set, weighted_identity_check, weil_sum_1, weil_sum_2,
    weil_sum_3, AdditiveCharacter, IDENTITY_TOL,
};
use dickson_core::dickson::{
    value_set, value_set_size_formula, DicksonSpec, EvaluationSet, DEFAULT_ENUMERATION_BUDGET,
};
use dickson_core::rscode::{
    count_nu, deg_k1_deep_hole_test, error_distance_bf, DeepHoleVerdict, RSCodeSpec, ReceivedWord,
};
use dickson_core::sieve::{
    c_k_periodic_bound, ceil_log2, falling_factorial_exact, main_bound_check, region_solve,
    sieve_identity, to_f64, MAX_DIRECT_K, MAX_DIRECT_SET, MAX_TYPE_K,
};
use dickson_core::{Elem, Error, FiniteField, Polynomial};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceRecord {
    pub suite: Suite,
    pub field: String,
    pub n: u64,
    pub a: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub status: Status,
    pub checks: u64,
    /// Why the instance was skipped or failed, e.g. `budget: ...`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub detail: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub pass: u64,
    pub fail: u64,
    pub skipped: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub artifact_version: String,
    pub config: ExperimentConfig,
    pub pass: bool,
    pub suites: BTreeMap<String, SuiteSummary>,
    pub failures: Vec<InstanceRecord>,
    pub instances: Vec<InstanceRecord>,
    /// Only filled when timings are requested; left out otherwise so that
    /// reports are byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<BTreeMap<String, u64>>,
}

/// CSV columns of the per-instance table.
pub const CSV_HEADER: [&str; 9] = [
    "suite", "field", "n", "a", "k", "status", "checks", "reason", "detail",
];

impl RunReport {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.instances
            .iter()
            .map(|r| {
                vec![
                    r.suite.to_string(),
                    r.field.clone(),
                    r.n.to_string(),
                    r.a.to_string(),
                    r.k.map(|k| k.to_string()).unwrap_or_default(),
                    serde_json::to_value(r.status)
                        .unwrap()
                        .as_str()
                        .unwrap()
                        .to_string(),
                    r.checks.to_string(),
                    r.reason.clone().unwrap_or_default(),
                    crate::emit::canonical(r.detail.clone()).to_string(),
                ]
            })
            .collect()
    }
}

struct Task<'a> {
    suite: Suite,
    field: &'a FiniteField,
    n: u64,
    a: u64,
    k: Option<u64>,
}

/// Outcome of one instance body: pass flag, number of checks, detail.
type Body = std::result::Result<(bool, u64, Value), Error>;

pub fn run_suite(cfg: &ExperimentConfig, timings: bool) -> Result<RunReport> {
    let fields = cfg.validate()?;
    let mut instances = Vec::new();
    let mut wall = BTreeMap::new();
    for &suite in &cfg.suites {
        let start = Instant::now();
        let mut tasks = Vec::new();
        for f in &fields {
            for &n in cfg.n.values() {
                for a in cfg.a.resolve(f.order()) {
                    if suite.uses_k() {
                        for &k in cfg.k.values() {
                            tasks.push(Task {
                                suite,
                                field: f,
                                n,
                                a,
                                k: Some(k),
                            });
                        }
                    } else {
                        tasks.push(Task {
                            suite,
                            field: f,
                            n,
                            a,
                            k: None,
                        });
                    }
                }
            }
        }
        let records: Vec<InstanceRecord> = tasks.par_iter().map(|t| run_task(cfg, t)).collect();
        instances.extend(records);
        wall.insert(suite.name().to_string(), start.elapsed().as_millis() as u64);
        eprintln!("suite {suite}: {:.2?}", start.elapsed());
    }
    let mut suites = BTreeMap::new();
    for r in &instances {
        let s: &mut SuiteSummary = suites.entry(r.suite.name().to_string()).or_default();
        match r.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::Skipped => s.skipped += 1,
        }
    }
    let failures: Vec<InstanceRecord> = instances
        .iter()
        .filter(|r| r.status == Status::Fail)
        .cloned()
        .collect();
    Ok(RunReport {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        pass: failures.is_empty(),
        suites,
        failures,
        instances,
        wall_clock_ms: timings.then_some(wall),
    })
}

fn run_task(cfg: &ExperimentConfig, t: &Task) -> InstanceRecord {
    let f = t.field;
    let spec = DicksonSpec::new(f, t.n, Elem::from_enc(t.a as u32));
    let body = match t.suite {
        Suite::ValueSet => valueset_instance(&spec),
        Suite::Preimage => preimage_instance(&spec, cfg.stride),
        Suite::CharSum => charsum_instance(&spec, cfg.stride),
        Suite::Sieve => sieve_instance(&spec, t.k.unwrap() as usize, cfg),
        Suite::DeepHole => deephole_instance(&spec, t.k.unwrap() as usize, cfg),
        Suite::Region => region_instance(&spec, cfg.c1),
    };
    let (status, checks, reason, detail) = match body {
        Ok((true, checks, detail)) => (Status::Pass, checks, None, detail),
        Ok((false, checks, detail)) => (
            Status::Fail,
            checks,
            Some("check failed".to_string()),
            detail,
        ),
        Err(e @ Error::BudgetExceeded { .. }) => (
            Status::Skipped,
            0,
            Some(format!("budget: {e}")),
            Value::Null,
        ),
        Err(
            e @ (Error::OutOfDomain(_)
            | Error::RequiresOddField
            | Error::RequiresEvenField
            | Error::InvalidArgument(_)
            | Error::WrongDegree { .. }),
        ) => (
            Status::Skipped,
            0,
            Some(format!("domain: {e}")),
            Value::Null,
        ),
        Err(e) => (Status::Fail, 0, Some(format!("error: {e}")), Value::Null),
    };
    InstanceRecord {
        suite: t.suite,
        field: f.spec_string(),
        n: t.n,
        a: t.a,
        k: t.k,
        status,
        checks,
        reason,
        detail,
    }
}

fn enumerate(spec: &DicksonSpec) -> std::result::Result<EvaluationSet, Error> {
    value_set(spec, DEFAULT_ENUMERATION_BUDGET)
}

fn valueset_instance(spec: &DicksonSpec) -> Body {
    let formula = value_set_size_formula(spec)?;
    let enumerated = enumerate(spec)?.len() as u64;
    Ok((
        formula.size == enumerated,
        1,
        json!({ "formula": formula, "enumerated": enumerated }),
    ))
}

fn preimage_instance(spec: &DicksonSpec, stride: u64) -> Body {
    spec.check_formula_domain()?;
    let hist = spec.value_histogram(DEFAULT_ENUMERATION_BUDGET)?;
    let mut checks = 0;
    let mut mismatches = Vec::new();
    for x in spec.field().elements().step_by(stride as usize) {
        let r = dickson_core::dickson::preimage_count(spec, x)?;
        checks += 1;
        let actual = hist[r.value.enc() as usize] as u64;
        if r.count != actual {
            mismatches.push(json!({ "x0": x, "formula": r.count, "enumerated": actual }));
        }
    }
    Ok((
        mismatches.is_empty(),
        checks,
        json!({ "points": checks, "mismatches": mismatches }),
    ))
}

fn charsum_instance(spec: &DicksonSpec, stride: u64) -> Body {
    let f = spec.field();
    let d = enumerate(spec)?;
    let mut checks = 0;
    let mut min_slack = f64::INFINITY;
    let mut max_identity: f64 = 0.0;
    let mut failures = Vec::new();
    for b in f.nonzero_elements().step_by(stride as usize) {
        let psi = AdditiveCharacter::new(f, b);
        let mut reports = vec![
            ("value_set", sum_over_value_set(&psi, &d)?),
            ("complete", weil_sum_1(&psi, spec)?),
        ];
        if f.is_even() {
            let (s1, s2) = weil_sum_3(b, spec)?;
            let gap = (s1.sum() - s2.sum()).norm();
            checks += 1;
            if gap > IDENTITY_TOL {
                failures.push(json!({ "b": b, "check": "even_pair", "gap": gap }));
            }
            reports.push(("even_1", s1));
            reports.push(("even_2", s2));
        } else {
            reports.push(("twisted", weil_sum_2(&psi, spec)?));
        }
        for (name, r) in reports {
            checks += 1;
            min_slack = min_slack.min(r.slack);
            if !r.pass {
                failures.push(json!({ "b": b, "check": name, "report": r }));
            }
        }
        let id = weighted_identity_check(&psi, spec, DEFAULT_ENUMERATION_BUDGET)?;
        checks += 1;
        max_identity = max_identity.max(id.deviation);
        if !id.pass {
            failures.push(json!({ "b": b, "check": "identity", "report": id }));
        }
        let dec = lemma_decomposition(&psi, spec, DEFAULT_ENUMERATION_BUDGET)?;
        checks += 1;
        if !(dec.remainder_ok && dec.chain_ok) {
            failures.push(json!({ "b": b, "check": "decomposition", "report": dec }));
        }
    }
    Ok((
        failures.is_empty(),
        checks,
        json!({
            "value_set_size": d.len(),
            "min_slack": min_slack,
            "max_identity_deviation": max_identity,
            "failures": failures,
        }),
    ))
}

fn sieve_instance(spec: &DicksonSpec, k: usize, cfg: &ExperimentConfig) -> Body {
    let f = spec.field();
    let q = f.order();
    let d = enumerate(spec)?;
    let size_d = d.len() as u64;
    if k as u64 + 1 > size_d {
        return Err(Error::OutOfDomain(format!(
            "k + 1 = {} exceeds |D| = {size_d}",
            k + 1
        )));
    }
    let mut checks = 0;
    let mut failures = Vec::new();

    let identity = if d.len() <= MAX_DIRECT_SET && k <= MAX_DIRECT_K {
        let mut worst: f64 = 0.0;
        for psi in AdditiveCharacter::all(f).step_by(cfg.stride as usize) {
            let r = sieve_identity(d.elems(), &psi, k)?;
            checks += 1;
            worst = worst.max(r.deviation);
        }
        if worst > IDENTITY_TOL {
            failures.push(json!({ "check": "sieve_identity", "deviation": worst }));
        }
        Some(worst)
    } else {
        None
    };

    let s = (spec.n() + 1) as f64 * (q as f64).sqrt();
    let periodic = if size_d as f64 >= s && size_d >= 2 && k < MAX_TYPE_K {
        let b = c_k_periodic_bound(s, size_d as f64, 2, k + 1)?;
        checks += 1;
        if b.closed_form > b.falling_bound * (1.0 + 1e-12) {
            failures.push(json!({ "check": "periodic_bound", "bound": b }));
        }
        Some(b)
    } else {
        None
    };

    // N_u for every b_1 against the mean and the sieve bound
    let bound = main_bound_check(q, spec.n(), size_d, k as u64, None)?;
    let code = RSCodeSpec::from_evaluation_set(&d, k)?;
    let falling = falling_factorial_exact(size_d, k as u64 + 1);
    let mean = to_f64(&falling) / q as f64;
    let mut total = BigUint::ZERO;
    let mut max_dev: f64 = 0.0;
    let mut min_nu: Option<BigUint> = None;
    for b in f.elements() {
        let nu = count_nu(&code, b, cfg.budget_dp)?;
        max_dev = max_dev.max((to_f64(&nu) - mean).abs());
        min_nu = Some(min_nu.map_or(nu.clone(), |m| m.min(nu.clone())));
        total += nu;
    }
    checks += 3;
    if total != falling {
        failures.push(json!({ "check": "nu_total", "total": total.to_string(), "expected": falling.to_string() }));
    }
    if bound.rhs.is_some_and(|rhs| max_dev > rhs) {
        failures.push(json!({ "check": "nu_deviation", "deviation": max_dev, "bound": bound.rhs }));
    }
    let min_nu = min_nu.unwrap_or_default();
    if bound.guaranteed && min_nu == BigUint::ZERO {
        failures.push(json!({ "check": "guarantee", "min_nu": "0" }));
    }
    Ok((
        failures.is_empty(),
        checks,
        json!({
            "value_set_size": size_d,
            "identity_max_deviation": identity,
            "periodic_bound": periodic,
            "nu_mean": mean,
            "nu_max_deviation": max_dev,
            "nu_min": min_nu.to_string(),
            "bound": bound,
            "failures": failures,
        }),
    ))
}

/// `x^{k+1} - b x^k`
fn degree_k1_word(code: &RSCodeSpec, b: Elem) -> std::result::Result<ReceivedWord, Error> {
    let f = code.field();
    let k = code.k();
    let mut c = vec![Elem::ZERO; k + 2];
    c[k + 1] = Elem::ONE;
    c[k] = f.neg(b);
    ReceivedWord::from_polynomial(code, &Polynomial::new(f, c))
}

fn deephole_instance(spec: &DicksonSpec, k: usize, cfg: &ExperimentConfig) -> Body {
    let f = spec.field();
    let d = enumerate(spec)?;
    if k + 2 > d.len() {
        return Err(Error::OutOfDomain(format!(
            "degree k + 1 = {} words need |D| > k + 1, |D| = {}",
            k + 1,
            d.len()
        )));
    }
    let code = RSCodeSpec::from_evaluation_set(&d, k)?;
    let len = code.len();
    let mut checks = 0;
    let mut deep = Vec::new();
    let mut failures = Vec::new();
    for b in f.elements().step_by(cfg.stride as usize) {
        let u = degree_k1_word(&code, b)?;
        let dist = error_distance_bf(&u, cfg.budget_subsets)?.distance;
        let verdict = deg_k1_deep_hole_test(&u, cfg.budget_dp)?;
        checks += 1;
        if (dist < len - k) == verdict.is_deep_hole() {
            failures.push(
                json!({ "b1": b, "check": "equivalence", "distance": dist, "verdict": verdict }),
            );
        }
        match &verdict {
            DeepHoleVerdict::NotDeepHole { v, codeword, .. } => {
                checks += 1;
                if v.degree().is_some_and(|dv| dv >= k) || u.distance_to(codeword) != len - k - 1 {
                    failures.push(json!({ "b1": b, "check": "witness", "verdict": verdict }));
                }
            }
            DeepHoleVerdict::DeepHole { .. } => deep.push(b),
        }
    }
    let u = ReceivedWord::from_polynomial(&code, &Polynomial::monomial(f, Elem::ONE, k))?;
    let r = error_distance_bf(&u, cfg.budget_subsets)?;
    checks += 1;
    if !r.is_deep_hole {
        failures.push(json!({ "check": "degree_k", "distance": r.distance }));
    }
    Ok((
        failures.is_empty(),
        checks,
        json!({
            "value_set_size": len,
            "deep_hole_b1": deep,
            "failures": failures,
        }),
    ))
}

fn region_instance(spec: &DicksonSpec, c1: f64) -> Body {
    let q = spec.field().order();
    let size_d = value_set_size_formula(spec)?.size;
    let region = region_solve(q, spec.n(), size_d, c1)?;
    let feasible =
        |k: u64| (k as f64) < size_d as f64 * ((q as f64).powf(-1.0 / (k as f64 + 1.0)) - 0.5 - c1);
    let k_min = ceil_log2(q);
    let first = (k_min..size_d).find(|&k| feasible(k));
    let oracle = (k_min..size_d).filter(|&k| feasible(k)).max();
    let mut checks = 2;
    let mut ok = region.k_min == k_min && region.k_max == oracle;
    let mut guaranteed = Vec::new();
    if let (Some(lo), Some(hi)) = (first, region.k_max) {
        for k in [lo, hi] {
            let b = main_bound_check(q, spec.n(), size_d, k, Some(c1))?;
            checks += 1;
            ok &= b.guaranteed;
            guaranteed.push(json!({ "k": k, "guaranteed": b.guaranteed, "near_tie": b.near_tie }));
        }
    }
    Ok((
        ok,
        checks,
        json!({ "region": region, "oracle_k_first": first, "oracle_k_max": oracle, "bound_at_endpoints": guaranteed }),
    ))
}
