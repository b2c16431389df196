//! Cycle-type combinatorics for sums over distinct-coordinate tuples, and
//! the bound chain that turns them into a guarantee on message lengths.
//!
//! For a permutation type `(c_1, ..., c_k)` (exactly `c_i` cycles of length
//! `i`), `N(c)` counts the permutations of that type and
//! `C_k(t_1, ..., t_k) = sum_c N(c) t_1^{c_1} ... t_k^{c_k}`. A sum over
//! tuples with pairwise distinct coordinates equals the signed sum over types
//! of `N(c) F_c`, where `F_c` drops the distinctness condition but forces the
//! coordinates in each cycle to be equal.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::charsum::AdditiveCharacter;
use crate::error::{Error, Result};
use crate::gf::Elem;

/// Largest `k` for explicit type enumeration.
pub const MAX_TYPE_K: usize = 24;
/// Largest set size for direct distinct-tuple enumeration.
pub const MAX_DIRECT_SET: usize = 12;
/// Largest tuple length for direct distinct-tuple enumeration.
pub const MAX_DIRECT_K: usize = 5;
/// Relative gap between log-sides below which a comparison is reported as a near tie.
pub const NEAR_TIE_REL: f64 = 1e-12;

/// Cycle type `(c_1, ..., c_k)` with `sum i c_i = k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CycleType {
    c: Vec<u32>,
}

impl CycleType {
    /// Validates `sum i c_i = len(c)`.
    pub fn new(c: Vec<u32>) -> Result<Self> {
        let weight: usize = c
            .iter()
            .enumerate()
            .map(|(i, &ci)| (i + 1) * ci as usize)
            .sum();
        if weight != c.len() {
            return Err(Error::InvalidArgument(format!(
                "cycle type {c:?} has weight {weight}, expected {}",
                c.len()
            )));
        }
        Ok(CycleType { c })
    }

    pub fn k(&self) -> usize {
        self.c.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.c
    }

    /// Total number of cycles, `sum c_i`.
    pub fn num_cycles(&self) -> u32 {
        self.c.iter().sum()
    }

    /// Cycle lengths with multiplicity, longest first.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &ci) in self.c.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(i + 1, ci as usize));
        }
        out
    }
}

fn check_type_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_TYPE_K {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 1..={MAX_TYPE_K}"
        )));
    }
    Ok(())
}

/// All cycle types of `S_k`, most cycles first (the identity type leads,
/// the single `k`-cycle comes last).
pub fn cycle_types(k: usize) -> Result<Vec<CycleType>> {
    check_type_k(k)?;
    let mut out = Vec::new();
    let mut parts = Vec::new();
    partitions(k, k, &mut parts, &mut out);
    let mut types: Vec<CycleType> = out
        .into_iter()
        .map(|p: Vec<usize>| {
            let mut c = vec![0u32; k];
            for len in p {
                c[len - 1] += 1;
            }
            CycleType { c }
        })
        .collect();
    types.sort_by(|a, b| {
        b.num_cycles()
            .cmp(&a.num_cycles())
            .then_with(|| b.c.cmp(&a.c))
    });
    Ok(types)
}

fn partitions(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if rest == 0 {
        out.push(cur.clone());
        return;
    }
    for part in (1..=max.min(rest)).rev() {
        cur.push(part);
        partitions(rest - part, part, cur, out);
        cur.pop();
    }
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// `N(c) = k! / prod_i (i^{c_i} c_i!)`.
pub fn perm_count(t: &CycleType) -> u128 {
    let denom: u128 =
        t.c.iter()
            .enumerate()
            .map(|(i, &ci)| ((i + 1) as u128).pow(ci) * factorial_u128(ci as usize))
            .product();
    factorial_u128(t.k()) / denom
}

/// `C_k(t_1, ..., t_k)` in floating point, `k = t.len()`.
pub fn c_k_eval(t: &[f64]) -> Result<f64> {
    let types = cycle_types(t.len())?;
    Ok(types
        .iter()
        .map(|ty| {
            ty.c.iter()
                .enumerate()
                .fold(perm_count(ty) as f64, |acc, (i, &ci)| {
                    acc * t[i].powi(ci as i32)
                })
        })
        .sum())
}

/// `C_k(t_1, ..., t_k)` over the integers.
pub fn c_k_eval_exact(t: &[BigInt]) -> Result<BigInt> {
    let types = cycle_types(t.len())?;
    Ok(types
        .iter()
        .map(|ty| {
            ty.c.iter()
                .enumerate()
                .fold(BigInt::from(perm_count(ty)), |acc, (i, &ci)| {
                    acc * t[i].pow(ci)
                })
        })
        .sum())
}

/// `(x)_k = x (x-1) ... (x-k+1)`
pub fn falling_factorial(x: f64, k: usize) -> f64 {
    (0..k).map(|i| x - i as f64).product()
}

/// `x (x+1) ... (x+k-1)`
pub fn rising_factorial(x: f64, k: usize) -> f64 {
    (0..k).map(|i| x + i as f64).product()
}

/// Binomial coefficient with real upper argument,
/// `prod_{j<i} (x - j) / (i - j)`.
pub fn real_binomial(x: f64, i: usize) -> f64 {
    (0..i).map(|j| (x - j as f64) / (i - j) as f64).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodicBound {
    pub closed_form: f64,
    pub falling_bound: f64,
}

/// `C_k` at `t_i = qv` for `d | i` and `t_i = s` otherwise: the closed
/// form `k! sum_i binom((qv-s)/d + i - 1, i) binom(s + k - d i - 1, k - d i)`
/// and the bound `(s + k + (qv - s)/d - 1)_k`. Arguments may be non-integral.
pub fn c_k_periodic_bound(s: f64, qv: f64, d: usize, k: usize) -> Result<PeriodicBound> {
    if !(s >= 0.0 && qv >= s) {
        return Err(Error::InvalidArgument(format!(
            "need qv >= s >= 0, got s = {s}, qv = {qv}"
        )));
    }
    if d == 0 || qv < d as f64 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= d <= qv, got d = {d}"
        )));
    }
    check_type_k(k)?;
    let step = (qv - s) / d as f64;
    let sum: f64 = (0..=k / d)
        .map(|i| {
            real_binomial(step + i as f64 - 1.0, i)
                * real_binomial(s + (k - d * i) as f64 - 1.0, k - d * i)
        })
        .sum();
    Ok(PeriodicBound {
        closed_form: factorial_u128(k) as f64 * sum,
        falling_bound: falling_factorial(s + k as f64 + step - 1.0, k),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SieveIdentity {
    /// Sum of `psi(x_1 + ... + x_k)` over ordered tuples of distinct elements.
    pub direct: [f64; 2],
    /// `sum_c (-1)^{k - sum c_i} N(c) prod_l S_l^{c_l}` with `S_l = sum_x psi(l x)`.
    pub via_types: [f64; 2],
    pub deviation: f64,
}

/// Both sides of the distinct-coordinate identity for `f = psi(x_1 + ... + x_k)`.
pub fn sieve_identity(d: &[Elem], psi: &AdditiveCharacter, k: usize) -> Result<SieveIdentity> {
    if d.len() > MAX_DIRECT_SET || k > MAX_DIRECT_K {
        return Err(Error::BudgetExceeded {
            what: "distinct-tuple enumeration",
            needed: (d.len() as u128).pow(k as u32),
            budget: (MAX_DIRECT_SET as u128).pow(MAX_DIRECT_K as u32),
        });
    }
    check_type_k(k)?;
    let f = psi.field();

    let mut direct = Complex64::zero();
    let mut used = vec![false; d.len()];
    distinct_tuples(
        d,
        k,
        Elem::ZERO,
        &mut used,
        &mut |sum| direct += psi.eval(sum),
        f,
    );

    let power_sums: Vec<Complex64> = (1..=k)
        .map(|l| {
            let scalar = f.from_int(l as i64);
            d.iter().map(|&x| psi.eval(f.mul(scalar, x))).sum()
        })
        .collect();
    let mut via = Complex64::zero();
    for ty in cycle_types(k)? {
        let sign = if (k as u32 - ty.num_cycles()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let term =
            ty.c.iter()
                .enumerate()
                .fold(Complex64::one(), |acc, (i, &ci)| {
                    acc * power_sums[i].powu(ci)
                });
        via += term * (sign * perm_count(&ty) as f64);
    }
    Ok(SieveIdentity {
        direct: [direct.re, direct.im],
        via_types: [via.re, via.im],
        deviation: (direct - via).norm(),
    })
}

fn distinct_tuples(
    d: &[Elem],
    depth: usize,
    sum: Elem,
    used: &mut [bool],
    visit: &mut impl FnMut(Elem),
    f: &crate::gf::FiniteField,
) {
    if depth == 0 {
        visit(sum);
        return;
    }
    for i in 0..d.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        distinct_tuples(d, depth - 1, f.add(sum, d[i]), used, visit, f);
        used[i] = false;
    }
}

/// Both sides of `(|D|)_{k+1} / q > ((n+1) sqrt(q) / 2 + k + |D| / 2)_{k+1}`,
/// which guarantees a distinct-coordinate solution of `x_1 + ... + x_{k+1} = b`
/// for every `b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub q: u64,
    pub n: u64,
    pub size_d: u64,
    pub k: u64,
    /// Natural logs of both sides.
    pub lhs_log: f64,
    pub rhs_log: f64,
    /// Linear values when representable as `f64`.
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// Decided by exact integer comparison (interval-refined when `q` is not a square).
    pub guaranteed: bool,
    /// The log-sides differ by less than [`NEAR_TIE_REL`], or the exact
    /// comparison could not separate them.
    pub near_tie: bool,
    pub c1: f64,
    pub c2: f64,
    /// `q^{-1/(k+1)} - 1/2 > c1 + c2`.
    pub simplified_ok: bool,
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Evaluates the main bound at `(q, n, |D|, k)`.
///
/// `c1` defaults to its least admissible value `(n+1) sqrt(q) / (2|D|)`; `c2`
/// is always `k / |D|`.
pub fn main_bound_check(
    q: u64,
    n: u64,
    size_d: u64,
    k: u64,
    c1: Option<f64>,
) -> Result<BoundReport> {
    if k + 1 > size_d {
        return Err(Error::InvalidArgument(format!(
            "k + 1 = {} exceeds |D| = {size_d}",
            k + 1
        )));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!(
            "q = {q} is not a field order"
        )));
    }
    let root_q = (q as f64).sqrt();
    let s = (n + 1) as f64 * root_q;
    let x = s / 2.0 + k as f64 + size_d as f64 / 2.0;
    let lhs_log = neumaier_sum((0..=k).map(|i| ((size_d - i) as f64).ln())) - (q as f64).ln();
    let rhs_log = neumaier_sum((0..=k).map(|i| (x - i as f64).ln()));
    let finite = |v: f64| Some(v.exp()).filter(|e| e.is_finite());

    let (guaranteed, undecided) = match exact_guarantee(q, n, size_d, k) {
        Some(g) => (g, false),
        None => (false, true),
    };
    let scale = lhs_log.abs().max(rhs_log.abs()).max(1.0);
    let near_tie = undecided || (lhs_log - rhs_log).abs() <= NEAR_TIE_REL * scale;

    let c1 = c1.unwrap_or(s / (2.0 * size_d as f64));
    let c2 = k as f64 / size_d as f64;
    let simplified_ok = (q as f64).powf(-1.0 / (k + 1) as f64) - 0.5 > c1 + c2;
    Ok(BoundReport {
        q,
        n,
        size_d,
        k,
        lhs_log,
        rhs_log,
        lhs: finite(lhs_log),
        rhs: finite(rhs_log),
        guaranteed,
        near_tie,
        c1,
        c2,
        simplified_ok,
    })
}

fn product(values: &[BigUint]) -> BigUint {
    match values.len() {
        0 => BigUint::one(),
        1 => values[0].clone(),
        len => {
            let (a, b) = values.split_at(len / 2);
            product(a) * product(b)
        }
    }
}

/// Decides `(|D|)_{k+1} 2^{k+1} > q prod_{i=0}^{k} (S + 2k + |D| - 2i)` with
/// `S = (n+1) sqrt(q)`. `S` is exact when `q` is a square and otherwise
/// bracketed by dyadic rationals of increasing precision. `None` means the
/// brackets never separated the sides.
fn exact_guarantee(q: u64, n: u64, size_d: u64, k: u64) -> Option<bool> {
    let offsets: Vec<BigUint> = (0..=k)
        .map(|i| BigUint::from(2 * k + size_d - 2 * i))
        .collect();
    let lhs = product(
        &(0..=k)
            .map(|i| BigUint::from(size_d - i))
            .collect::<Vec<_>>(),
    ) << (k + 1);
    let q_big = BigUint::from(q);
    let s_squared = BigUint::from(n + 1).pow(2) * &q_big;
    let root = s_squared.sqrt();
    if &root * &root == s_squared {
        let factors: Vec<BigUint> = offsets.iter().map(|c| &root + c).collect();
        return Some(lhs > &q_big * product(&factors));
    }
    for bits in [64u64, 256, 1024, 4096] {
        let lo_s = (&s_squared << (2 * bits)).sqrt();
        let hi_s = &lo_s + 1u32;
        let lo: Vec<BigUint> = offsets.iter().map(|c| &lo_s + (c << bits)).collect();
        let hi: Vec<BigUint> = offsets.iter().map(|c| &hi_s + (c << bits)).collect();
        let scaled = &lhs << (bits * (k + 1));
        if scaled > &q_big * product(&hi) {
            return Some(true);
        }
        if scaled <= &q_big * product(&lo) {
            return Some(false);
        }
    }
    None
}

/// The example region the solver cross-checks against when its inputs match.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PublishedClaim {
    pub k_min: u64,
    pub k_max: u64,
    /// Printed left side of the `c1` gate for this example.
    pub gate_constant: f64,
    pub k_min_matches: bool,
    pub k_max_matches: bool,
    pub gate_matches: bool,
    pub note: String,
}

/// Message lengths `k` for which the simplified conditions hold at fixed `c1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionSpec {
    pub q: u64,
    pub n: u64,
    pub size_d: u64,
    pub c1: f64,
    /// `(n+1)/2 sqrt(q)`, must be below `c1 |D|`.
    pub gate_lhs: f64,
    pub gate_rhs: f64,
    /// `ceil(log2 q)`
    pub k_min: u64,
    /// Largest `k >= k_min` with `k < |D| (q^{-1/(k+1)} - 1/2 - c1)`.
    pub k_max: Option<u64>,
    /// `q^{-1/(k_max+1)} - 1/2 - c1`
    pub c2_at_k_max: Option<f64>,
    pub published: Option<PublishedClaim>,
}

/// `k < |D| (q^{-1/(k+1)} - 1/2 - c1)`
pub fn region_condition(q: u64, size_d: u64, c1: f64, k: u64) -> bool {
    let exponent = -(q as f64).log2() / (k + 1) as f64;
    (k as f64) < size_d as f64 * (exponent.exp2() - 0.5 - c1)
}

pub fn ceil_log2(q: u64) -> u64 {
    assert!(q >= 2);
    (64 - (q - 1).leading_zeros()) as u64
}

pub fn region_solve(q: u64, n: u64, size_d: u64, c1: f64) -> Result<RegionSpec> {
    if q < 2 || size_d == 0 {
        return Err(Error::InvalidArgument("need q >= 2 and |D| >= 1".into()));
    }
    let gate_lhs = (n + 1) as f64 / 2.0 * (q as f64).sqrt();
    let gate_rhs = c1 * size_d as f64;
    if !(gate_lhs < gate_rhs) {
        return Err(Error::OutOfDomain(format!(
            "(n+1)/2 sqrt(q) = {gate_lhs} is not below c1 |D| = {gate_rhs}"
        )));
    }
    let k_min = ceil_log2(q);
    // The feasible k form an interval above k_min: skip an infeasible
    // prefix, then walk until the condition first fails.
    let mut k = k_min;
    while k < size_d && !region_condition(q, size_d, c1, k) {
        k += 1;
        // Past this point the right side only shrinks relative to k.
        if (k as f64) >= size_d as f64 * (0.5 - c1) {
            break;
        }
    }
    let mut k_max = None;
    while k < size_d && region_condition(q, size_d, c1, k) {
        k_max = Some(k);
        k += 1;
    }
    let c2_at_k_max = k_max.map(|k| (q as f64).powf(-1.0 / (k + 1) as f64) - 0.5 - c1);

    let published = (q == 1 << 16 && n == 3 && (c1 - 0.015).abs() < 1e-12).then(|| {
        let claim_k_max = 21182;
        let gate_constant = 640.0;
        PublishedClaim {
            k_min: 16,
            k_max: claim_k_max,
            gate_constant,
            k_min_matches: k_min == 16,
            k_max_matches: k_max == Some(claim_k_max),
            gate_matches: (gate_lhs - gate_constant).abs() < 1e-9,
            note: format!(
                "published k_max {claim_k_max} vs computed {}; published gate constant {gate_constant} vs (n+1)/2 sqrt(q) = {gate_lhs}",
                k_max.map_or("none".to_string(), |k| k.to_string()),
            ),
        }
    });
    Ok(RegionSpec {
        q,
        n,
        size_d,
        c1,
        gate_lhs,
        gate_rhs,
        k_min,
        k_max,
        c2_at_k_max,
        published,
    })
}

/// Exact `(x)_k` over the integers; zero once a factor hits zero.
pub fn falling_factorial_exact(x: u64, k: u64) -> BigUint {
    if k > x {
        return BigUint::zero();
    }
    product(&(0..k).map(|i| BigUint::from(x - i)).collect::<Vec<_>>())
}

/// Nearest `f64`, or infinity when out of range.
pub fn to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}
