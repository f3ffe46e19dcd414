//! Exact scalars: Laurent polynomials in `u = ω^{1/2}` with big-integer coefficients.
//!
//! Every scalar that shows up in the quantum torus (`ω^{2Q}`, `q^{2r-1}`, Weyl
//! normalization factors) is an integer power of `u`, so `ℤ[u^{±1}]` is the only
//! coefficient ring the rest of the crate needs. Recall `q = ω^{n²} = u^{2n²}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// An element of `ℤ[u^{±1}]`, stored as a sparse map `u`-exponent → coefficient.
///
/// Zero coefficients are never stored, so structural equality is ring equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarLaurent {
    terms: BTreeMap<i64, BigInt>,
}

impl ScalarLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// `c · u^e`.
    pub fn monomial(e: i64, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `u^e`.
    pub fn u_pow(e: i64) -> Self {
        Self::monomial(e, 1)
    }

    /// `q^e = u^{2n²e}`.
    pub fn q_pow(n: usize, e: i64) -> Self {
        Self::u_pow(2 * (n * n) as i64 * e)
    }

    /// Builds a scalar from `(exponent, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I, C>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero();
        for (e, c) in pairs {
            out.add_term(e, c.into());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Iterates `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// If `self = ±u^k`, returns `(sign, k)`.
    pub fn as_unit(&self) -> Option<(i8, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        if c.is_one() {
            Some((1, *e))
        } else if (-c).is_one() {
            Some((-1, *e))
        } else {
            None
        }
    }

    pub fn is_unit(&self) -> bool {
        self.as_unit().is_some()
    }

    /// Inverse of a unit `±u^k`; `None` for non-units.
    pub fn unit_inverse(&self) -> Option<Self> {
        self.as_unit()
            .map(|(s, k)| Self::monomial(-k, BigInt::from(s)))
    }

    /// The bar involution `u ↦ u⁻¹`.
    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Multiplies by `u^k` (shift of all exponents).
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }
}

impl From<i64> for ScalarLaurent {
    fn from(c: i64) -> Self {
        Self::monomial(0, c)
    }
}

impl Add for &ScalarLaurent {
    type Output = ScalarLaurent;
    fn add(self, rhs: &ScalarLaurent) -> ScalarLaurent {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ScalarLaurent {
    type Output = ScalarLaurent;
    fn add(mut self, rhs: ScalarLaurent) -> ScalarLaurent {
        self += &rhs;
        self
    }
}

impl AddAssign<&ScalarLaurent> for ScalarLaurent {
    fn add_assign(&mut self, rhs: &ScalarLaurent) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl Neg for &ScalarLaurent {
    type Output = ScalarLaurent;
    fn neg(self) -> ScalarLaurent {
        ScalarLaurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for ScalarLaurent {
    type Output = ScalarLaurent;
    fn neg(self) -> ScalarLaurent {
        -&self
    }
}

impl Sub for &ScalarLaurent {
    type Output = ScalarLaurent;
    fn sub(self, rhs: &ScalarLaurent) -> ScalarLaurent {
        let mut out = self.clone();
        out += &(-rhs);
        out
    }
}

impl Sub for ScalarLaurent {
    type Output = ScalarLaurent;
    fn sub(self, rhs: ScalarLaurent) -> ScalarLaurent {
        &self - &rhs
    }
}

impl Mul for &ScalarLaurent {
    type Output = ScalarLaurent;
    fn mul(self, rhs: &ScalarLaurent) -> ScalarLaurent {
        let mut out = ScalarLaurent::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for ScalarLaurent {
    type Output = ScalarLaurent;
    fn mul(self, rhs: ScalarLaurent) -> ScalarLaurent {
        &self * &rhs
    }
}

/// Free-function form of the product, mirroring the operation table.
pub fn scalar_mul(a: &ScalarLaurent, b: &ScalarLaurent) -> ScalarLaurent {
    a * b
}

/// Free-function form of `u ↦ u⁻¹`.
pub fn scalar_conj(a: &ScalarLaurent) -> ScalarLaurent {
    a.conj()
}

impl fmt::Display for ScalarLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (*e, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "u")?,
                (1, false) => write!(f, "{abs}u")?,
                (e, true) => write!(f, "u^{e}")?,
                (e, false) => write!(f, "{abs}u^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ScalarLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarLaurent({self})")
    }
}

/// JSON form: `[[exponent, "decimal coefficient"], ...]`.
impl Serialize for ScalarLaurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e, c.to_string()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ScalarLaurent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs: Vec<(i64, String)> = Vec::deserialize(deserializer)?;
        let mut out = ScalarLaurent::zero();
        for (e, s) in pairs {
            let c: BigInt = s
                .parse()
                .map_err(|_| de::Error::custom(format!("invalid integer coefficient {s:?}")))?;
            out.add_term(e, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_pair() {
        assert!((ScalarLaurent::u_pow(1) * ScalarLaurent::u_pow(-1)).is_one());
    }

    #[test]
    fn difference_of_squares() {
        let a = ScalarLaurent::from_terms([(0, 1), (2, 1)]);
        let b = ScalarLaurent::from_terms([(0, 1), (2, -1)]);
        assert_eq!(a * b, ScalarLaurent::from_terms([(0, 1), (4, -1)]));
    }

    #[test]
    fn q_for_n_two_is_u8() {
        assert_eq!(ScalarLaurent::q_pow(2, 1), ScalarLaurent::u_pow(8));
    }

    #[test]
    fn conj_examples() {
        assert!(ScalarLaurent::one().conj().is_one());
        assert_eq!(ScalarLaurent::u_pow(3).conj(), ScalarLaurent::u_pow(-3));
        assert_eq!(
            ScalarLaurent::from_terms([(0, 1), (2, 1)]).conj(),
            ScalarLaurent::from_terms([(0, 1), (-2, 1)])
        );
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = ScalarLaurent::from_terms([(3, 2), (3, -2), (1, 5)]);
        assert_eq!(a.len(), 1);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn units() {
        assert_eq!(ScalarLaurent::monomial(4, -1).as_unit(), Some((-1, 4)));
        assert_eq!(ScalarLaurent::monomial(4, 2).as_unit(), None);
        let x = ScalarLaurent::monomial(-3, -1);
        assert!((&x * &x.unit_inverse().unwrap()).is_one());
    }

    #[test]
    fn big_coefficients_do_not_overflow() {
        let mut p = ScalarLaurent::from_terms([(0, 1), (1, 1)]);
        for _ in 0..7 {
            p = &p * &p;
        }
        // (1+u)^128 has central binomial coefficient C(128,64) > 2^64.
        let mid = p.terms().find(|(e, _)| *e == 64).unwrap().1.clone();
        assert!(mid > BigInt::from(u64::MAX));
    }

    #[test]
    fn json_round_trip() {
        let a = ScalarLaurent::from_terms([(-2, 3), (5, -7)]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[[-2,"3"],[5,"-7"]]"#);
        let b: ScalarLaurent = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
