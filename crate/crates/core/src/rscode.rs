//! Reed-Solomon codes over an explicit evaluation set, exact error
//! distances at small scale, and the subset-sum test for received words of
//! degree `k + 1`.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dickson::EvaluationSet;
use crate::error::{Error, Result};
use crate::gf::{Elem, FiniteField};
use crate::poly::Polynomial;

/// Default cap on the number of `k`-subsets examined by [`error_distance_bf`].
pub const DEFAULT_SUBSET_BUDGET: u128 = 10_000_000;
/// Default cap on `|D| r q` for the subset-sum tables.
pub const DEFAULT_DP_BUDGET: u128 = 100_000_000;

/// Code of message length `k` evaluated at the points of `D`, kept in
/// encoding order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSCodeSpec {
    field: FiniteField,
    points: Vec<Elem>,
    k: usize,
}

impl RSCodeSpec {
    pub fn new(field: &FiniteField, mut points: Vec<Elem>, k: usize) -> Result<Self> {
        for &x in &points {
            field.element(x.enc() as u64)?;
        }
        points.sort();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedNode(w[0].enc()));
        }
        if k == 0 || k >= points.len() {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= k < |D|, got k = {k}, |D| = {}",
                points.len()
            )));
        }
        Ok(RSCodeSpec {
            field: field.clone(),
            points,
            k,
        })
    }

    pub fn from_evaluation_set(d: &EvaluationSet, k: usize) -> Result<Self> {
        RSCodeSpec::new(d.spec().field(), d.elems().to_vec(), k)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn points(&self) -> &[Elem] {
        &self.points
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A word indexed by the code's points.
#[derive(Clone, Debug)]
pub struct ReceivedWord {
    code: RSCodeSpec,
    values: Vec<Elem>,
    interp: OnceLock<Polynomial>,
}

impl PartialEq for ReceivedWord {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code && self.values == other.values
    }
}

impl ReceivedWord {
    pub fn new(code: &RSCodeSpec, values: Vec<Elem>) -> Result<Self> {
        if values.len() != code.len() {
            return Err(Error::InvalidArgument(format!(
                "word has {} values, code has {} points",
                values.len(),
                code.len()
            )));
        }
        for &v in &values {
            code.field.element(v.enc() as u64)?;
        }
        Ok(ReceivedWord {
            code: code.clone(),
            values,
            interp: OnceLock::new(),
        })
    }

    /// Evaluations of `f` on the code's points, with no degree restriction.
    pub fn from_polynomial(code: &RSCodeSpec, f: &Polynomial) -> Result<Self> {
        if f.field() != &code.field {
            return Err(Error::FieldMismatch);
        }
        let values = code.points.iter().map(|&x| f.eval(x)).collect();
        ReceivedWord::new(code, values)
    }

    pub fn code(&self) -> &RSCodeSpec {
        &self.code
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    /// The unique interpolant of degree below `|D|`.
    pub fn interpolant(&self) -> &Polynomial {
        self.interp.get_or_init(|| {
            let pts: Vec<(Elem, Elem)> = self
                .code
                .points
                .iter()
                .copied()
                .zip(self.values.iter().copied())
                .collect();
            Polynomial::interpolate(&self.code.field, &pts).expect("code points are distinct")
        })
    }

    /// Hamming distance to the evaluations of `c`.
    pub fn distance_to(&self, c: &Polynomial) -> usize {
        self.code
            .points
            .iter()
            .zip(&self.values)
            .filter(|&(&x, &v)| c.eval(x) != v)
            .count()
    }
}

pub fn encode(code: &RSCodeSpec, msg: &Polynomial) -> Result<ReceivedWord> {
    if msg.degree().is_some_and(|d| d >= code.k) {
        return Err(Error::WrongDegree {
            expected: format!("< {}", code.k),
            found: format!("{}", msg.degree().unwrap()),
        });
    }
    ReceivedWord::from_polynomial(code, msg)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub distance: usize,
    /// A codeword polynomial at that distance.
    pub witness: Polynomial,
    /// `distance == |D| - k`
    pub is_deep_hole: bool,
    pub subsets_examined: u128,
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.checked_mul(n - j)? / (j + 1);
    }
    Some(acc)
}

/// Exact distance from `u` to the code.
///
/// Every word is within `|D| - k` of the code, so some codeword agrees with
/// it on at least `k` points, and that codeword is the interpolant through
/// any `k` of them. Maximizing agreement over interpolants of all
/// `k`-subsets therefore finds the distance. Ties keep the first subset in
/// lexicographic order.
pub fn error_distance_bf(u: &ReceivedWord, budget: u128) -> Result<DistanceReport> {
    let code = &u.code;
    let (len, k) = (code.len(), code.k);
    let interp = u.interpolant();
    if interp.degree().is_none_or(|d| d < k) {
        return Ok(DistanceReport {
            distance: 0,
            witness: interp.clone(),
            is_deep_hole: false,
            subsets_examined: 0,
        });
    }
    let needed = binomial_u128(len as u128, k as u128).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: "k-subsets",
            needed,
            budget,
        });
    }
    let field = &code.field;
    let mut best: Option<(usize, Polynomial)> = None;
    let mut idx: Vec<usize> = (0..k).collect();
    let mut examined = 0u128;
    loop {
        examined += 1;
        let pts: Vec<(Elem, Elem)> = idx.iter().map(|&i| (code.points[i], u.values[i])).collect();
        let c = Polynomial::interpolate(field, &pts)?;
        let agree = len - u.distance_to(&c);
        if best.as_ref().is_none_or(|(b, _)| agree > *b) {
            best = Some((agree, c));
        }
        if !next_combination(&mut idx, len) {
            break;
        }
    }
    let (agree, witness) = best.expect("at least one subset");
    let distance = len - agree;
    Ok(DistanceReport {
        distance,
        witness,
        is_deep_hole: distance == len - k,
        subsets_examined: examined,
    })
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `b_1` with the monic interpolant written as `x^{k+1} - b_1 x^k + ...`.
pub fn deg_k1_reduction(u: &ReceivedWord) -> Result<Elem> {
    let k = u.code.k;
    let interp = u.interpolant();
    if interp.degree() != Some(k + 1) {
        return Err(Error::WrongDegree {
            expected: format!("{}", k + 1),
            found: interp
                .degree()
                .map_or_else(|| "-inf".to_string(), |d| d.to_string()),
        });
    }
    let (monic, _) = interp.monic_normalize()?;
    Ok(u.code.field.neg(monic.coeff(k)))
}

fn check_subset_sum_args(
    field: &FiniteField,
    d: &[Elem],
    r: usize,
    budget: u128,
) -> Result<Vec<Elem>> {
    if r > d.len() {
        return Err(Error::InvalidArgument(format!(
            "r = {r} exceeds |D| = {}",
            d.len()
        )));
    }
    let mut sorted = d.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::RepeatedNode(w[0].enc()));
    }
    for &x in &sorted {
        field.element(x.enc() as u64)?;
    }
    let needed = d.len() as u128 * r.max(1) as u128 * field.order() as u128;
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: "subset-sum table",
            needed,
            budget,
        });
    }
    Ok(sorted)
}

/// Number of `r`-element subsets of `d` summing to `target`.
pub fn subset_sum_count(
    field: &FiniteField,
    d: &[Elem],
    r: usize,
    target: Elem,
    budget: u128,
) -> Result<BigUint> {
    let sorted = check_subset_sum_args(field, d, r, budget)?;
    let q = field.order() as usize;
    // table[j][s]: subsets of the processed prefix of size j with sum s
    let mut table = vec![vec![BigUint::zero(); q]; r + 1];
    table[0][0] = BigUint::one();
    for (i, &x) in sorted.iter().enumerate() {
        for j in (1..=r.min(i + 1)).rev() {
            let (lower, upper) = table.split_at_mut(j);
            let (from, to) = (&lower[j - 1], &mut upper[0]);
            for s in 0..q {
                if !from[s].is_zero() {
                    let t = field.add(Elem::from_enc(s as u32), x).enc() as usize;
                    to[t] += &from[s];
                }
            }
        }
    }
    Ok(std::mem::take(&mut table[r][target.enc() as usize]))
}

/// Bit table of reachable `(chosen, sum)` states after each prefix.
struct Reach {
    q: usize,
    r: usize,
    words: Vec<u64>,
}

impl Reach {
    fn index(&self, i: usize, j: usize, s: usize) -> usize {
        (i * (self.r + 1) + j) * self.q + s
    }

    fn get(&self, i: usize, j: usize, s: usize) -> bool {
        let b = self.index(i, j, s);
        self.words[b / 64] >> (b % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize, s: usize) {
        let b = self.index(i, j, s);
        self.words[b / 64] |= 1 << (b % 64);
    }
}

/// Some `r`-element subset of `d` summing to `target`, in encoding order.
pub fn subset_sum_find(
    field: &FiniteField,
    d: &[Elem],
    r: usize,
    target: Elem,
    budget: u128,
) -> Result<Option<Vec<Elem>>> {
    let sorted = check_subset_sum_args(field, d, r, budget)?;
    let q = field.order() as usize;
    let len = sorted.len();
    let bits = (len + 1) * (r + 1) * q;
    let mut reach = Reach {
        q,
        r,
        words: vec![0; bits.div_ceil(64)],
    };
    reach.set(0, 0, 0);
    for (i, &x) in sorted.iter().enumerate() {
        for j in 0..=r.min(i) {
            for s in 0..q {
                if reach.get(i, j, s) {
                    reach.set(i + 1, j, s);
                    if j < r {
                        let t = field.add(Elem::from_enc(s as u32), x).enc() as usize;
                        reach.set(i + 1, j + 1, t);
                    }
                }
            }
        }
    }
    let mut s = target.enc() as usize;
    if !reach.get(len, r, s) {
        return Ok(None);
    }
    // Walk back, preferring to skip elements, so the witness is deterministic.
    let mut picked = Vec::with_capacity(r);
    let mut j = r;
    for i in (1..=len).rev() {
        if reach.get(i - 1, j, s) {
            continue;
        }
        let x = sorted[i - 1];
        picked.push(x);
        j -= 1;
        s = field.sub(Elem::from_enc(s as u32), x).enc() as usize;
    }
    picked.reverse();
    let sum = picked.iter().fold(Elem::ZERO, |acc, &x| field.add(acc, x));
    assert!(
        picked.len() == r && sum == target,
        "subset-sum witness failed to re-sum"
    );
    Ok(Some(picked))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DeepHoleVerdict {
    DeepHole {
        b1: Elem,
    },
    /// `u` agrees with `codeword` exactly off `subset`; `v` is the monic
    /// reduction `u_monic - prod (x - x_i)`, and `codeword = c v` where `c`
    /// is the leading coefficient of `u`.
    NotDeepHole {
        b1: Elem,
        subset: Vec<Elem>,
        v: Polynomial,
        codeword: Polynomial,
    },
}

impl DeepHoleVerdict {
    pub fn is_deep_hole(&self) -> bool {
        matches!(self, DeepHoleVerdict::DeepHole { .. })
    }

    pub fn b1(&self) -> Elem {
        match self {
            DeepHoleVerdict::DeepHole { b1 } | DeepHoleVerdict::NotDeepHole { b1, .. } => *b1,
        }
    }
}

/// Deep-hole test for a word whose interpolant has degree exactly `k + 1`.
///
/// Only `b_1` matters: every lower coefficient of the interpolant can be
/// absorbed into the codeword, so `u` fails to be a deep hole exactly when
/// some `k + 1` distinct points of `D` sum to `b_1`.
pub fn deg_k1_deep_hole_test(u: &ReceivedWord, budget: u128) -> Result<DeepHoleVerdict> {
    let b1 = deg_k1_reduction(u)?;
    let code = &u.code;
    let field = &code.field;
    let Some(subset) = subset_sum_find(field, &code.points, code.k + 1, b1, budget)? else {
        return Ok(DeepHoleVerdict::DeepHole { b1 });
    };
    let (monic, lead) = u.interpolant().monic_normalize()?;
    let v = monic.sub(&Polynomial::from_roots(field, &subset))?;
    assert!(
        v.degree().is_none_or(|d| d < code.k),
        "reduction left degree {:?} >= k",
        v.degree()
    );
    let codeword = v.scale(lead);
    Ok(DeepHoleVerdict::NotDeepHole {
        b1,
        subset,
        v,
        codeword,
    })
}

/// Ordered solutions of `x_1 + ... + x_{k+1} = b_1` in distinct points of `D`.
pub fn count_nu(code: &RSCodeSpec, b1: Elem, budget: u128) -> Result<BigUint> {
    let r = code.k + 1;
    let unordered = subset_sum_count(&code.field, &code.points, r, b1, budget)?;
    Ok(unordered * (1..=r as u64).product::<BigUint>())
}
