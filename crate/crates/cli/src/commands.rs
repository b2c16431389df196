//! One-shot subcommands. Each returns a JSON value for the emitter.

use anyhow::{anyhow, bail, Context, Result};
use dickson_core::charsum::{
    lemma_decomposition, sum_over_value_set, weighted_identity_check, weil_sum_1, weil_sum_2,
    weil_sum_3, AdditiveCharacter,
};
use dickson_core::dickson::{
    preimage_brute_force, preimage_count, value_set, value_set_size_formula, DicksonSpec,
    DEFAULT_ENUMERATION_BUDGET,
};
use dickson_core::rscode::{deg_k1_deep_hole_test, error_distance_bf, RSCodeSpec, ReceivedWord};
use dickson_core::sieve::{main_bound_check, region_solve};
use dickson_core::{Elem, FiniteField, Polynomial};
use serde_json::{json, Value};

pub fn elem(f: &FiniteField, enc: u64) -> Result<Elem> {
    f.element(enc).map_err(|e| anyhow!("{e}"))
}

pub fn dickson(f: &FiniteField, n: u64, a: u64) -> Result<DicksonSpec> {
    Ok(DicksonSpec::new(f, n, elem(f, a)?))
}

fn spec_echo(spec: &DicksonSpec) -> Value {
    json!({ "field": spec.field().spec_string(), "n": spec.n(), "a": spec.a() })
}

pub fn field_info(f: &FiniteField, element: Option<u64>) -> Result<Value> {
    let mut out = json!({
        "field": f.spec_string(),
        "characteristic": f.characteristic(),
        "degree": f.degree(),
        "order": f.order(),
        "modulus": f.modulus(),
    });
    if let Some(enc) = element {
        let x = elem(f, enc)?;
        let quad = if f.is_even() {
            None
        } else {
            Some(f.quad_char(x)?)
        };
        out["element"] = json!({
            "enc": x,
            "coeffs": f.coeffs(x),
            "trace": f.trace(x),
            "quad_char": quad,
            "inverse": f.inv(x).ok(),
            "frobenius": f.pow(x, f.characteristic()),
        });
    }
    Ok(out)
}

pub fn value_set_cmd(spec: &DicksonSpec, list: bool) -> Result<Value> {
    let formula = value_set_size_formula(spec)?;
    let d = value_set(spec, DEFAULT_ENUMERATION_BUDGET)?;
    let mut out = json!({
        "spec": spec_echo(spec),
        "formula": formula,
        "enumerated": d.len(),
        "match": formula.size == d.len() as u64,
    });
    if list {
        out["elements"] = json!(d.elems());
    }
    Ok(out)
}

pub fn preimage_cmd(spec: &DicksonSpec, x0: Option<u64>) -> Result<Value> {
    let f = spec.field();
    let points: Vec<Elem> = match x0 {
        Some(enc) => vec![elem(f, enc)?],
        None => f.elements().collect(),
    };
    let rows = points
        .into_iter()
        .map(|x| {
            let r = preimage_count(spec, x)?;
            let brute = preimage_brute_force(spec, x);
            Ok(json!({
                "x0": r.x0,
                "value": r.value,
                "count": r.count,
                "case": r.case,
                "enumerated": brute,
                "match": brute == r.count,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match x0 {
        Some(_) => rows.into_iter().next().unwrap(),
        None => Value::Array(rows),
    })
}

pub fn charsum_cmd(spec: &DicksonSpec, b: u64) -> Result<Value> {
    let f = spec.field();
    let b = elem(f, b)?;
    let psi = AdditiveCharacter::new(f, b);
    let d = value_set(spec, DEFAULT_ENUMERATION_BUDGET)?;
    let mut out = json!({
        "spec": spec_echo(spec),
        "b": b,
        "value_set": sum_over_value_set(&psi, &d)?,
        "identity": weighted_identity_check(&psi, spec, DEFAULT_ENUMERATION_BUDGET)?,
    });
    if !psi.is_trivial() {
        out["complete"] = json!(weil_sum_1(&psi, spec)?);
        out["decomposition"] = json!(lemma_decomposition(&psi, spec, DEFAULT_ENUMERATION_BUDGET)?);
        if f.is_even() {
            let (s1, s2) = weil_sum_3(b, spec)?;
            out["even"] = json!([s1, s2]);
        } else {
            out["twisted"] = json!(weil_sum_2(&psi, spec)?);
        }
    }
    Ok(out)
}

/// Which words `deephole` examines.
pub enum WordSource {
    B1(u64),
    AllB1,
    /// JSON array of encodings, one per point of `D` in encoding order.
    Values(String),
    /// Polynomial literal, coefficients low to high.
    Poly(String),
}

pub struct DeepHoleArgs {
    pub k: usize,
    pub source: WordSource,
    pub crosscheck: bool,
    pub budget_subsets: u128,
    pub budget_dp: u128,
}

fn word_report(u: &ReceivedWord, args: &DeepHoleArgs) -> Result<Value> {
    let interp = u.interpolant();
    let degree = interp.degree();
    let mut out = json!({ "interpolant": interp, "degree": degree });
    if degree == Some(u.code().k() + 1) {
        let verdict = deg_k1_deep_hole_test(u, args.budget_dp)?;
        out["deep_hole"] = json!(verdict.is_deep_hole());
        out["verdict"] = json!(verdict);
    }
    if args.crosscheck {
        let r = error_distance_bf(u, args.budget_subsets)?;
        out["distance"] = json!(r);
        if let Some(deep) = out.get("deep_hole").and_then(Value::as_bool) {
            out["crosscheck_agrees"] = json!(deep == r.is_deep_hole);
        }
    }
    Ok(out)
}

pub fn deephole_cmd(spec: &DicksonSpec, args: &DeepHoleArgs) -> Result<Value> {
    let f = spec.field();
    let d = value_set(spec, DEFAULT_ENUMERATION_BUDGET)?;
    let code = RSCodeSpec::from_evaluation_set(&d, args.k)?;
    let k = args.k;
    let monic_word = |b: Elem| -> Result<ReceivedWord> {
        let mut c = vec![Elem::ZERO; k + 2];
        c[k + 1] = Elem::ONE;
        c[k] = f.neg(b);
        Ok(ReceivedWord::from_polynomial(
            &code,
            &Polynomial::new(f, c),
        )?)
    };
    let header = json!({ "spec": spec_echo(spec), "k": k, "points": code.points() });
    let words: Vec<Value> = match &args.source {
        WordSource::B1(b) => vec![word_report(&monic_word(elem(f, *b)?)?, args)?],
        WordSource::AllB1 => f
            .elements()
            .map(|b| word_report(&monic_word(b)?, args))
            .collect::<Result<_>>()?,
        WordSource::Values(text) => {
            let encs: Vec<u64> =
                serde_json::from_str(text).context("word must be a JSON array of integers")?;
            let values = encs
                .into_iter()
                .map(|e| elem(f, e))
                .collect::<Result<Vec<_>>>()?;
            vec![word_report(&ReceivedWord::new(&code, values)?, args)?]
        }
        WordSource::Poly(text) => {
            let p = Polynomial::parse_literal(f, text)?;
            vec![word_report(
                &ReceivedWord::from_polynomial(&code, &p)?,
                args,
            )?]
        }
    };
    let mut out = header;
    out["words"] = Value::Array(words);
    Ok(out)
}

fn resolve_size(spec: &DicksonSpec, size_d: Option<u64>) -> Result<(u64, &'static str)> {
    Ok(match size_d {
        Some(s) => (s, "given"),
        None => (value_set_size_formula(spec)?.size, "formula"),
    })
}

pub fn bound_cmd(
    spec: &DicksonSpec,
    k: u64,
    size_d: Option<u64>,
    c1: Option<f64>,
) -> Result<Value> {
    let (size, source) = resolve_size(spec, size_d)?;
    let r = main_bound_check(spec.field().order(), spec.n(), size, k, c1)?;
    Ok(json!({ "spec": spec_echo(spec), "size_d_source": source, "bound": r }))
}

pub fn region_cmd(spec: &DicksonSpec, c1: f64, size_d: Option<u64>) -> Result<Value> {
    let (size, source) = resolve_size(spec, size_d)?;
    if !(c1 > 0.0) {
        bail!("c1 must be positive");
    }
    let r = region_solve(spec.field().order(), spec.n(), size, c1)?;
    Ok(json!({ "spec": spec_echo(spec), "size_d_source": source, "region": r }))
}
