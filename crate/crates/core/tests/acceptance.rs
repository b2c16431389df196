//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::time::Instant;

use dickson_core::charsum::{
    sum_over_value_set, weighted_identity_check, weil_sum_1, weil_sum_2, weil_sum_3,
    AdditiveCharacter, IDENTITY_TOL, SLACK_TOL,
};
use dickson_core::dickson::{
    preimage_brute_force, preimage_count, value_set, value_set_size_formula, DicksonSpec,
    EvaluationSet,
};
use dickson_core::rscode::{
    count_nu, deg_k1_deep_hole_test, error_distance_bf, DeepHoleVerdict, RSCodeSpec, ReceivedWord,
    DEFAULT_DP_BUDGET, DEFAULT_SUBSET_BUDGET,
};
use dickson_core::sieve::{
    c_k_eval_exact, c_k_periodic_bound, cycle_types, main_bound_check, perm_count, region_solve,
    sieve_identity,
};
use dickson_core::{Elem, FiniteField, Polynomial};
use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

const GRID_Q: [u64; 13] = [4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64];
const BUDGET: u64 = 1 << 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn field_of_order(q: u64) -> FiniteField {
    let p = (2..=q).find(|p| q.is_multiple_of(*p)).unwrap();
    let m = (q as f64).log(p as f64).round() as u32;
    assert_eq!(p.pow(m), q);
    FiniteField::new(p, m, None).unwrap()
}

/// Every `(field, n, a)` with `q` in the grid, `2 <= n <= 12`, `a != 0`.
fn grid() -> Vec<DicksonSpec> {
    let mut out = Vec::new();
    for q in GRID_Q {
        let f = field_of_order(q);
        for n in 2..=12 {
            for a in f.nonzero_elements() {
                out.push(DicksonSpec::new(&f, n, a));
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut mismatches = 0;
    let mut checked = 0;
    for spec in grid() {
        let formula = value_set_size_formula(&spec).unwrap().size;
        let actual = value_set(&spec, BUDGET).unwrap().len() as u64;
        checked += 1;
        if formula != actual {
            mismatches += 1;
        }
    }
    Outcome {
        pass: mismatches == 0,
        detail: format!("{checked} (q, n, a) points, {mismatches} mismatches"),
    }
}

fn criterion_2() -> Outcome {
    let f = FiniteField::new(2, 16, None).unwrap();
    let mut sizes = Vec::new();
    for a in [1u32, 2, 0xffff] {
        let spec = DicksonSpec::new(&f, 3, Elem::from_enc(a));
        let formula = value_set_size_formula(&spec).unwrap().size;
        let enumerated = value_set(&spec, BUDGET).unwrap().len() as u64;
        sizes.push((a, formula, enumerated));
    }
    Outcome {
        pass: sizes.iter().all(|&(_, f, e)| f == 43691 && e == 43691),
        detail: format!(
            "q = 2^16, n = 3: {}",
            sizes
                .iter()
                .map(|(a, f, e)| format!("a={a} formula={f} enumerated={e}"))
                .join(", ")
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut mismatches = 0;
    let mut checked = 0;
    for spec in grid() {
        let hist = spec.value_histogram(BUDGET).unwrap();
        for x in spec.field().elements() {
            let r = preimage_count(&spec, x).unwrap();
            checked += 1;
            if r.count != hist[r.value.enc() as usize] as u64 {
                mismatches += 1;
            }
        }
    }
    // the histogram path above is cross-checked against direct counting on a sample
    let spot = grid().iter().step_by(97).all(|spec| {
        spec.field()
            .elements()
            .all(|x| preimage_count(spec, x).unwrap().count == preimage_brute_force(spec, x))
    });
    Outcome {
        pass: mismatches == 0 && spot,
        detail: format!("{checked} (q, n, a, x0) points, {mismatches} mismatches"),
    }
}

fn criterion_4() -> Outcome {
    let mut checks = 0u64;
    let mut failures = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut max_disagreement: f64 = 0.0;
    for spec in grid() {
        let f = spec.field().clone();
        let d = value_set(&spec, BUDGET).unwrap();
        for b in f.nonzero_elements() {
            let psi = AdditiveCharacter::new(&f, b);
            let mut reports = vec![
                ("value-set", sum_over_value_set(&psi, &d).unwrap()),
                ("complete", weil_sum_1(&psi, &spec).unwrap()),
            ];
            if f.is_even() {
                let (s1, s2) = weil_sum_3(b, &spec).unwrap();
                max_disagreement = max_disagreement.max((s1.sum() - s2.sum()).norm());
                reports.push(("even-1", s1));
                reports.push(("even-2", s2));
            } else {
                reports.push(("twisted", weil_sum_2(&psi, &spec).unwrap()));
            }
            for (name, r) in reports {
                checks += 1;
                min_slack = min_slack.min(r.slack);
                if r.slack < -SLACK_TOL {
                    failures.push(format!(
                        "{name} {:?} n={} a={} b={b}",
                        f,
                        spec.n(),
                        spec.a()
                    ));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && max_disagreement <= IDENTITY_TOL,
        detail: format!(
            "{checks} sums, min slack {min_slack:.2e}, even-q pair disagreement {max_disagreement:.1e}, failures {:?}",
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut checks = 0u64;
    let mut worst: f64 = 0.0;
    for spec in grid() {
        for psi in AdditiveCharacter::all(spec.field()) {
            let r = weighted_identity_check(&psi, &spec, BUDGET).unwrap();
            checks += 1;
            worst = worst.max(r.deviation);
        }
    }
    Outcome {
        pass: worst <= IDENTITY_TOL,
        detail: format!("{checks} (q, n, a, psi) points, max deviation {worst:.2e}"),
    }
}

fn cycle_lengths(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len > 0 {
            out.push(len);
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();

    // C_k against S_k enumeration, k <= 7
    let mut ck_ok = true;
    for k in 1..=7usize {
        for t in [[2i64, 3, 5, 7, 11, 13, 17], [-1, 4, 0, 2, -3, 1, 6]] {
            let t = &t[..k];
            let brute: i64 = (0..k)
                .permutations(k)
                .map(|p| cycle_lengths(&p).iter().map(|&l| t[l - 1]).product::<i64>())
                .sum();
            let v =
                c_k_eval_exact(&t.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()).unwrap();
            ck_ok &= v == BigInt::from(brute);
        }
    }
    notes.push(format!(
        "C_k vs S_k {}",
        if ck_ok { "ok" } else { "MISMATCH" }
    ));

    // constant arguments, k <= 10
    let mut rising_ok = true;
    for k in 1..=10usize {
        for t in 1..=6i64 {
            let v = c_k_eval_exact(&vec![BigInt::from(t); k]).unwrap();
            rising_ok &= v
                == (0..k as i64)
                    .map(|i| BigInt::from(t + i))
                    .product::<BigInt>();
        }
        rising_ok &= cycle_types(k).unwrap().iter().map(perm_count).sum::<u128>()
            == (1..=k as u128).product();
    }
    notes.push(format!(
        "rising {}",
        if rising_ok { "ok" } else { "MISMATCH" }
    ));

    // closed form against falling bound, 400 points with qv >= s >= 0
    let mut points = 0;
    let mut bound_ok = true;
    for (q, n) in [(7u64, 2u64), (16, 3), (64, 2), (1024, 3), (65536, 3)] {
        let s = (n + 1) as f64 * (q as f64).sqrt();
        for qv in [s, s + 0.5, 2.0 * s, s + q as f64] {
            for d in [1usize, 2] {
                for k in [1usize, 2, 3, 5, 8, 13, 15, 17, 19, 20] {
                    let b = c_k_periodic_bound(s, qv, d, k).unwrap();
                    points += 1;
                    bound_ok &= b.closed_form <= b.falling_bound * (1.0 + 1e-12);
                }
            }
        }
    }
    notes.push(format!(
        "{points} bound points {}",
        if bound_ok { "ok" } else { "VIOLATED" }
    ));

    // distinct-coordinate identity, |D| <= 12, k <= 5
    let mut worst: f64 = 0.0;
    let mut identities = 0;
    for (q, n) in [
        (7u64, 2u64),
        (7, 3),
        (8, 3),
        (9, 2),
        (11, 2),
        (13, 4),
        (16, 5),
    ] {
        let f = field_of_order(q);
        let d = value_set(&DicksonSpec::new(&f, n, Elem::ONE), BUDGET).unwrap();
        assert!(d.len() <= 12);
        for psi in AdditiveCharacter::all(&f) {
            for k in 1..=5usize {
                let r = sieve_identity(d.elems(), &psi, k).unwrap();
                identities += 1;
                worst = worst.max(r.deviation);
            }
        }
    }
    notes.push(format!(
        "{identities} identities, max deviation {worst:.1e}"
    ));

    Outcome {
        pass: ck_ok && rising_ok && bound_ok && worst <= IDENTITY_TOL,
        detail: notes.join("; "),
    }
}

/// The eight codes of criteria 7 to 9.
fn small_codes() -> Vec<(String, EvaluationSet, RSCodeSpec)> {
    let mut out = Vec::new();
    for q in [7u64, 8] {
        let f = field_of_order(q);
        for n in [2u64, 3] {
            let d = value_set(&DicksonSpec::new(&f, n, Elem::ONE), BUDGET).unwrap();
            for k in 1..=2 {
                let code = RSCodeSpec::from_evaluation_set(&d, k).unwrap();
                out.push((
                    format!("q={q} n={n} k={k} |D|={}", d.len()),
                    d.clone(),
                    code,
                ));
            }
        }
    }
    out
}

/// `x^{k+1} - b x^k`
fn degree_k1_word(code: &RSCodeSpec, b: Elem) -> ReceivedWord {
    let f = code.field();
    let k = code.k();
    let mut c = vec![Elem::ZERO; k + 2];
    c[k + 1] = Elem::ONE;
    c[k] = f.neg(b);
    ReceivedWord::from_polynomial(code, &Polynomial::new(f, c)).unwrap()
}

fn criterion_7() -> Outcome {
    let mut words = 0;
    let mut disagreements = Vec::new();
    let mut bad_witness = 0;
    let mut deep = 0;
    for (label, _, code) in small_codes() {
        let len = code.len();
        let k = code.k();
        for b in code.field().elements() {
            let u = degree_k1_word(&code, b);
            let dist = error_distance_bf(&u, DEFAULT_SUBSET_BUDGET)
                .unwrap()
                .distance;
            let verdict = deg_k1_deep_hole_test(&u, DEFAULT_DP_BUDGET).unwrap();
            words += 1;
            if (dist < len - k) == verdict.is_deep_hole() {
                disagreements.push(format!("{label} b1={b}"));
            }
            match verdict {
                DeepHoleVerdict::NotDeepHole { v, codeword, .. } => {
                    if v.degree().is_some_and(|d| d >= k) || u.distance_to(&codeword) != len - k - 1
                    {
                        bad_witness += 1;
                    }
                }
                DeepHoleVerdict::DeepHole { .. } => deep += 1,
            }
        }
    }
    Outcome {
        pass: disagreements.is_empty() && bad_witness == 0,
        detail: format!(
            "{words} words ({deep} deep holes), {} disagreements {:?}, {bad_witness} bad witnesses",
            disagreements.len(),
            disagreements.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut degree_k = 0;
    let mut degree_k_bad = 0;
    for (_, _, code) in small_codes() {
        let f = code.field().clone();
        let k = code.k();
        for (c, t) in f.nonzero_elements().cartesian_product(f.elements()) {
            let mut coeffs = vec![Elem::ZERO; k + 1];
            coeffs[k] = c;
            coeffs[0] = f.add(coeffs[0], t);
            let u = ReceivedWord::from_polynomial(&code, &Polynomial::new(&f, coeffs)).unwrap();
            let r = error_distance_bf(&u, DEFAULT_SUBSET_BUDGET).unwrap();
            degree_k += 1;
            if r.distance != code.len() - k || !r.is_deep_hole {
                degree_k_bad += 1;
            }
        }
    }
    let mut wu_hong = Vec::new();
    for q in [5u64, 7, 8, 9] {
        let f = field_of_order(q);
        for k in [2usize, 3] {
            let code = RSCodeSpec::new(&f, f.nonzero_elements().collect(), k).unwrap();
            let u = ReceivedWord::from_polynomial(
                &code,
                &Polynomial::monomial(&f, Elem::ONE, (q - 2) as usize),
            )
            .unwrap();
            let r = error_distance_bf(&u, DEFAULT_SUBSET_BUDGET).unwrap();
            wu_hong.push((q, k, r.distance, code.len() - k));
        }
    }
    let wu_hong_ok = wu_hong.iter().all(|&(_, _, d, want)| d == want);
    Outcome {
        pass: degree_k_bad == 0 && wu_hong_ok,
        detail: format!(
            "{degree_k} degree-k words, {degree_k_bad} not deep; x^(q-2) on F_q^*: {}",
            wu_hong
                .iter()
                .map(|(q, k, d, want)| format!("q={q} k={k} d={d}/{want}"))
                .join(" ")
        ),
    }
}

fn criterion_9() -> Outcome {
    let mut sums_ok = true;
    let mut within = true;
    let mut guarantee_ok = true;
    let mut worst_ratio: f64 = 0.0;
    let mut instances = 0;
    for (_, d, code) in small_codes() {
        let f = code.field();
        let q = f.order();
        let k = code.k() as u64;
        let size_d = code.len() as u64;
        let falling: BigUint = (0..=k).map(|i| BigUint::from(size_d - i)).product();
        let mean = falling.to_f64().unwrap() / q as f64;
        let report = main_bound_check(q, d.spec().n(), size_d, k, None).unwrap();
        let sieve_bound = report.rhs.unwrap();
        let mut total = BigUint::ZERO;
        for b in f.elements() {
            let nu = count_nu(&code, b, DEFAULT_DP_BUDGET).unwrap();
            let dev = (nu.to_f64().unwrap() - mean).abs();
            worst_ratio = worst_ratio.max(dev / sieve_bound);
            within &= dev <= sieve_bound;
            if report.guaranteed {
                guarantee_ok &= nu > BigUint::ZERO;
            }
            total += nu;
            instances += 1;
        }
        sums_ok &= total == falling;
    }
    Outcome {
        pass: sums_ok && within && guarantee_ok,
        detail: format!(
            "{instances} (code, b1) instances, sums {}, max deviation / sieve bound {worst_ratio:.3e}",
            if sums_ok { "exact" } else { "WRONG" }
        ),
    }
}

fn criterion_10() -> Outcome {
    let (q, n, size_d, c1) = (1u64 << 16, 3u64, 43691u64, 0.015);
    let r = region_solve(q, n, size_d, c1).unwrap();
    // oracle: test every k directly
    let feasible =
        |k: u64| (k as f64) < size_d as f64 * ((q as f64).powf(-1.0 / (k as f64 + 1.0)) - 0.5 - c1);
    let k_min_oracle = (1..64).find(|&k| 1u64 << k >= q).unwrap();
    let k_max_oracle = (k_min_oracle..size_d).filter(|&k| feasible(k)).max();
    let interval_ok = k_max_oracle.is_some_and(|m| (k_min_oracle..=m).all(feasible));
    let claim = r.published.as_ref().unwrap();
    let discrepancy_flagged = claim.k_max_matches == (r.k_max == Some(claim.k_max));
    Outcome {
        pass: r.k_min == 16 && r.k_min == k_min_oracle && r.k_max == k_max_oracle && interval_ok && discrepancy_flagged,
        detail: format!(
            "k_min {} (oracle {k_min_oracle}), k_max {:?} (oracle {k_max_oracle:?}), published k_max {} flagged {}",
            r.k_min,
            r.k_max,
            claim.k_max,
            if claim.k_max_matches { "match" } else { "discrepancy" }
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("value-set size formula on grid", criterion_1),
        ("q = 2^16, n = 3 value set has 43691 elements", criterion_2),
        ("preimage counts on grid", criterion_3),
        ("character-sum bounds on grid", criterion_4),
        ("weighted identity on grid", criterion_5),
        ("sieve combinatorics", criterion_6),
        ("degree k+1 deep-hole equivalence", criterion_7),
        ("known deep holes", criterion_8),
        ("N_u counting consistency", criterion_9),
        ("region solver", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.2?}]",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
