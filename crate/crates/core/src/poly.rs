//! Dense univariate polynomials over a [`FiniteField`].

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Elem, FiniteField};

/// A polynomial with coefficients low to high and no trailing zeros.
/// The zero polynomial has no coefficients and no degree.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: FiniteField,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]", self.to_literal())
    }
}

impl serde::Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_zero() {
            s.serialize_str("0")
        } else {
            s.serialize_str(&self.to_literal())
        }
    }
}

impl Polynomial {
    pub fn new(field: &FiniteField, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &FiniteField) -> Self {
        Polynomial::new(field, Vec::new())
    }

    pub fn constant(field: &FiniteField, c: Elem) -> Self {
        Polynomial::new(field, vec![c])
    }

    /// `c x^d`
    pub fn monomial(field: &FiniteField, c: Elem, d: usize) -> Self {
        let mut coeffs = vec![Elem::ZERO; d + 1];
        coeffs[d] = c;
        Polynomial::new(field, coeffs)
    }

    /// `prod (x - r)` over the given roots.
    pub fn from_roots(field: &FiniteField, roots: &[Elem]) -> Self {
        let mut coeffs = vec![Elem::ONE];
        for &r in roots {
            let neg_r = field.neg(r);
            let mut next = vec![Elem::ZERO; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] = field.add(next[i + 1], c);
                next[i] = field.add(next[i], field.mul(c, neg_r));
            }
            coeffs = next;
        }
        Polynomial::new(field, coeffs)
    }

    /// Parses a comma-separated list of element encodings, low to high.
    /// The empty string is the zero polynomial.
    pub fn parse_literal(field: &FiniteField, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Polynomial::zero(field));
        }
        let coeffs = s
            .split(',')
            .map(|t| {
                let enc = t
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))?;
                field.element(enc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::new(field, coeffs))
    }

    pub fn to_literal(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.enc().to_string()).collect();
        parts.join(",")
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    fn same_field(&self, other: &Polynomial) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_field(other)?;
        let f = &self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(Polynomial::new(f, coeffs))
    }

    pub fn neg(&self) -> Polynomial {
        let f = &self.field;
        Polynomial::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_field(other)?;
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(f));
        }
        let mut coeffs = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Ok(Polynomial::new(f, coeffs))
    }

    pub fn scale(&self, c: Elem) -> Polynomial {
        let f = &self.field;
        Polynomial::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Splits `f` into its monic associate and leading coefficient.
    pub fn monic_normalize(&self) -> Result<(Polynomial, Elem)> {
        let lead = self.leading_coeff().ok_or(Error::ZeroPolynomial)?;
        let inv = self.field.inv(lead)?;
        Ok((self.scale(inv), lead))
    }

    /// The unique polynomial of degree `< points.len()` through the given
    /// points, via the Lagrange basis built from the node polynomial.
    pub fn interpolate(field: &FiniteField, points: &[(Elem, Elem)]) -> Result<Polynomial> {
        let nodes: Vec<Elem> = points.iter().map(|&(x, _)| x).collect();
        {
            let mut sorted = nodes.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::RepeatedNode(w[0].enc()));
            }
        }
        let f = field;
        let n = points.len();
        if n == 0 {
            return Ok(Polynomial::zero(f));
        }
        let master = Polynomial::from_roots(f, &nodes);
        let mut acc = vec![Elem::ZERO; n];
        for (i, &(xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            // master / (x - xi) by synthetic division; degree n - 1.
            let mut quotient = vec![Elem::ZERO; n];
            let mut carry = Elem::ZERO;
            for d in (1..=n).rev() {
                carry = f.add(master.coeffs[d], f.mul(carry, xi));
                quotient[d - 1] = carry;
            }
            let denom = nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Elem::ONE, |acc, (_, &xj)| f.mul(acc, f.sub(xi, xj)));
            let w = f.mul(yi, f.inv(denom)?);
            for (a, q) in acc.iter_mut().zip(&quotient) {
                *a = f.add(*a, f.mul(*q, w));
            }
        }
        Ok(Polynomial::new(f, acc))
    }
}
