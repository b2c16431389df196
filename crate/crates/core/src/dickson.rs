//! Dickson polynomials `D_n(x, a)`: evaluation, value sets, and the exact
//! preimage-count and value-set-size formulas.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FiniteField};

/// Default cap on the field order for full value-set enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 20;

/// Parameters `(n, a)` of `D_n(x, a)` over a fixed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DicksonSpec {
    field: FiniteField,
    n: u64,
    a: Elem,
}

impl DicksonSpec {
    pub fn new(field: &FiniteField, n: u64, a: Elem) -> Self {
        DicksonSpec {
            field: field.clone(),
            n,
            a,
        }
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn a(&self) -> Elem {
        self.a
    }

    /// The counting formulas are stated for `n >= 2` and `a != 0` only.
    pub fn check_formula_domain(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::OutOfDomain(format!("n = {} < 2", self.n)));
        }
        if self.a.is_zero() {
            return Err(Error::OutOfDomain("a = 0".into()));
        }
        Ok(())
    }

    /// `D_n(x, a)` by the recurrence `D_j = x D_{j-1} - a D_{j-2}`,
    /// `D_0 = 2`, `D_1 = x`.
    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        if self.n == 0 {
            return f.from_int(2);
        }
        let mut prev = f.from_int(2);
        let mut cur = x;
        for _ in 1..self.n {
            let next = f.sub(f.mul(x, cur), f.mul(self.a, prev));
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `D_n(x, a)` from the closed-form expansion, coefficients reduced mod `p`.
    pub fn eval_closed_form(&self, x: Elem) -> Elem {
        let f = &self.field;
        let p = BigInt::from(f.characteristic());
        dickson_coeffs(self.n).iter().fold(Elem::ZERO, |acc, term| {
            let c = term.coeff.mod_floor(&p).to_i64().expect("reduced mod p");
            let monomial = f.mul(f.pow(x, term.x_power), f.pow(self.a, term.a_power));
            f.add(acc, f.mul(f.from_int(c), monomial))
        })
    }

    /// Number of `x` with `D_n(x, a) = v` for every `v`, indexed by encoding.
    pub fn value_histogram(&self, budget: u64) -> Result<Vec<u32>> {
        let q = self.field.order();
        check_budget(q, budget)?;
        let mut hist = vec![0u32; q as usize];
        for x in self.field.elements() {
            hist[self.eval(x).enc() as usize] += 1;
        }
        Ok(hist)
    }
}

fn check_budget(q: u64, budget: u64) -> Result<()> {
    if q > budget {
        return Err(Error::BudgetExceeded {
            what: "value-set enumeration",
            needed: q as u128,
            budget: budget as u128,
        });
    }
    Ok(())
}

/// One term `coeff * a^{a_power} * x^{x_power}` of the closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DicksonTerm {
    pub x_power: u64,
    pub a_power: u64,
    #[serde(serialize_with = "serialize_bigint")]
    pub coeff: BigInt,
}

fn serialize_bigint<S: serde::Serializer>(
    v: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Integer coefficients `n/(n-i) * C(n-i, i) * (-1)^i` of `a^i x^{n-2i}`,
/// for `i = 0..=n/2`, before reduction mod `p`.
pub fn dickson_coeffs(n: u64) -> Vec<DicksonTerm> {
    if n == 0 {
        return vec![DicksonTerm {
            x_power: 0,
            a_power: 0,
            coeff: BigInt::from(2),
        }];
    }
    (0..=n / 2)
        .map(|i| {
            let binom = binomial(n - i, i);
            let (quot, rem) = (BigUint::from(n) * binom).div_rem(&BigUint::from(n - i));
            debug_assert!(rem.is_zero());
            let mut coeff = BigInt::from(quot);
            if i % 2 == 1 {
                coeff = -coeff;
            }
            DicksonTerm {
                x_power: n - 2 * i,
                a_power: i,
                coeff,
            }
        })
        .collect()
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, j| {
        acc * BigUint::from(n - j) / BigUint::from(j + 1)
    })
}

/// The value set `{D_n(x, a) : x in F_q}`, sorted by encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationSet {
    spec: DicksonSpec,
    elems: Vec<Elem>,
}

impl EvaluationSet {
    pub fn spec(&self) -> &DicksonSpec {
        &self.spec
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.elems.binary_search(&x).is_ok()
    }
}

/// Enumerates the value set. Fails if `q` exceeds `budget`.
pub fn value_set(spec: &DicksonSpec, budget: u64) -> Result<EvaluationSet> {
    let hist = spec.value_histogram(budget)?;
    let elems = hist
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(v, _)| Elem::from_enc(v as u32))
        .collect();
    Ok(EvaluationSet {
        spec: spec.clone(),
        elems,
    })
}

/// Value-set size from `(q, n, a)` alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueSetReport {
    pub size: u64,
    /// Correction term, one of 0, 1/2, 1.
    #[serde(serialize_with = "serialize_ratio")]
    pub delta: Ratio<u64>,
    /// `(q-1) / (2 gcd(n, q-1))` and `(q+1) / (2 gcd(n, q+1))`.
    #[serde(serialize_with = "serialize_ratios")]
    pub terms: [Ratio<u64>; 2],
}

fn serialize_ratio<S: serde::Serializer>(
    v: &Ratio<u64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn serialize_ratios<S: serde::Serializer>(
    v: &[Ratio<u64>; 2],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

pub fn value_set_size_formula(spec: &DicksonSpec) -> Result<ValueSetReport> {
    spec.check_formula_domain()?;
    let f = &spec.field;
    let q = f.order();
    let n = spec.n;
    let terms = [
        Ratio::new(q - 1, 2 * n.gcd(&(q - 1))),
        Ratio::new(q + 1, 2 * n.gcd(&(q + 1))),
    ];
    let delta = if f.is_even() {
        Ratio::zero()
    } else {
        let two = f.two_adic(n);
        let r = two.r.expect("odd q");
        if two.t + 1 == r && f.quad_char(spec.a)? == -1 {
            Ratio::one()
        } else if two.t >= 1 && two.t + 2 <= r {
            Ratio::new(1, 2)
        } else {
            Ratio::zero()
        }
    };
    let total = terms[0] + terms[1] + delta;
    if !total.is_integer() {
        return Err(Error::OutOfDomain(format!(
            "value-set formula gives non-integral size {total}"
        )));
    }
    Ok(ValueSetReport {
        size: total.to_integer(),
        delta,
        terms,
    })
}

/// Which branch of the preimage-count formula applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreimageCase {
    /// Even q, `z^2 + x0 z + a` splits, value nonzero.
    #[serde(rename = "A")]
    A,
    /// Even q, `z^2 + x0 z + a` irreducible, value nonzero.
    #[serde(rename = "B")]
    B,
    /// Even q, value zero.
    ZeroEven,
    /// Odd q, `eta(x0^2 - 4a) = 1`, value not a square root of `4a^n`.
    EtaPlus,
    /// Odd q, `eta(x0^2 - 4a) = -1`, value not a square root of `4a^n`.
    EtaMinus,
    CPlus,
    CMinus,
    Otherwise,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreimageReport {
    pub x0: Elem,
    pub value: Elem,
    pub count: u64,
    pub case: PreimageCase,
}

/// `|D_n^{-1}(D_n(x0, a))|` by the closed formula.
///
/// In odd characteristic the comparisons `D_n(x0, a) = ±2 a^{n/2}` are
/// evaluated as `D_n(x0, a)^2 = 4 a^n`, so for odd `n` they mean
/// `±2 sqrt(a)^n` and are satisfiable whenever `a` is a square. Condition C
/// needs `2 | n`, where `a^{n/2}` is an ordinary power.
pub fn preimage_count(spec: &DicksonSpec, x0: Elem) -> Result<PreimageReport> {
    spec.check_formula_domain()?;
    let f = &spec.field;
    let q = f.order();
    let n = spec.n;
    let a = spec.a;
    let g_minus = n.gcd(&(q - 1));
    let g_plus = n.gcd(&(q + 1));
    let value = spec.eval(x0);

    let (count, case) = if f.is_even() {
        if value.is_zero() {
            ((g_minus + g_plus) / 2, PreimageCase::ZeroEven)
        } else {
            // z^2 + a always splits; otherwise use the trace criterion.
            let splits = x0.is_zero() || f.trace(f.div(a, f.mul(x0, x0))?) == 0;
            if splits {
                (g_minus, PreimageCase::A)
            } else {
                (g_plus, PreimageCase::B)
            }
        }
    } else {
        let four = f.from_int(4);
        let two = f.from_int(2);
        let eta_disc = f.quad_char(f.sub(f.mul(x0, x0), f.mul(four, a)))?;
        let eta_a = f.quad_char(a)?;
        let special = f.mul(value, value) == f.mul(four, f.pow(a, n));
        let adic = f.two_adic(n);
        let (r, t) = (adic.r.expect("odd q"), adic.t);
        let cond_c = n.is_multiple_of(2) && {
            let minus_two_half = f.neg(f.mul(two, f.pow(a, n / 2)));
            (t >= 1 && t < r && eta_a == -1 && special)
                || (t >= 1 && t + 2 <= r && eta_a == 1 && value == minus_two_half)
        };
        match (eta_disc, special, cond_c) {
            (1, false, _) => (g_minus, PreimageCase::EtaPlus),
            (-1, false, _) => (g_plus, PreimageCase::EtaMinus),
            (1, true, true) => (g_minus / 2, PreimageCase::CPlus),
            (-1, true, true) => (g_plus / 2, PreimageCase::CMinus),
            _ => ((g_minus + g_plus) / 2, PreimageCase::Otherwise),
        }
    };
    Ok(PreimageReport {
        x0,
        value,
        count,
        case,
    })
}

/// Preimage cardinality by scanning the whole field.
pub fn preimage_brute_force(spec: &DicksonSpec, x0: Elem) -> u64 {
    let target = spec.eval(x0);
    spec.field
        .elements()
        .filter(|&x| spec.eval(x) == target)
        .count() as u64
}
