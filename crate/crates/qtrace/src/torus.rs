//! Quantum torus elements in the Weyl-ordered basis.
//!
//! Generators satisfy `Z_v Z_w = ω^{2Q(v,w)} Z_w Z_v = u^{2·2Q(v,w)} Z_w Z_v`. The Weyl
//! monomial `Z^t` is the order-independent, star-invariant normalization
//! `ω^{−Σ_{i<j} Q(v_i,v_j) t_i t_j} Z_{v_1}^{t_1}⋯Z_{v_m}^{t_m}`, and the product law is
//! `Z^t · Z^s = u^{Λ(t,s)} Z^{t+s}` with `Λ(t,s) = Σ_{v,w} 2Q(v,w) t_v s_w`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::balance::ExponentVector;
use crate::coeff::ScalarLaurent;
use crate::error::{Error, Result};
use crate::quiver::Seed;

/// `Λ(t,s) = Σ_{v,w} 2Q(v,w) t_v s_w`.
pub fn lambda2(seed: &Seed, t: &ExponentVector, s: &ExponentVector) -> i64 {
    let mut acc = 0;
    for (v, &tv) in t.0.iter().enumerate() {
        if tv != 0 {
            acc += tv * s.two_q_pairing(seed, v);
        }
    }
    acc
}

/// A finite sum `Σ c_t Z^t` over a fixed seed.
#[derive(Clone)]
pub struct TorusElement {
    seed: Arc<Seed>,
    terms: BTreeMap<ExponentVector, ScalarLaurent>,
}

impl TorusElement {
    pub fn zero(seed: Arc<Seed>) -> Self {
        Self {
            seed,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(seed: Arc<Seed>) -> Self {
        let len = seed.len();
        Self::weyl_monomial(seed, ExponentVector::zeros(len), ScalarLaurent::one())
    }

    /// `c · Z^t`.
    pub fn weyl_monomial(seed: Arc<Seed>, t: ExponentVector, c: ScalarLaurent) -> Self {
        assert_eq!(t.len(), seed.len(), "exponent length must match the seed");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(t, c);
        }
        Self { seed, terms }
    }

    /// `Z^t` with coefficient one.
    pub fn monomial(seed: Arc<Seed>, t: ExponentVector) -> Self {
        Self::weyl_monomial(seed, t, ScalarLaurent::one())
    }

    /// `X_v = Z^{n e_v}`.
    pub fn x_generator(seed: Arc<Seed>, v: usize, n: usize) -> Self {
        let len = seed.len();
        Self::monomial(seed, ExponentVector::unit(len, v).scaled(n as i64))
    }

    /// `1 + α Z^a`.
    pub fn binomial(seed: Arc<Seed>, a: &ExponentVector, alpha: ScalarLaurent) -> Self {
        let mut out = Self::one(seed);
        out.add_term(a.clone(), alpha);
        out
    }

    pub fn seed(&self) -> &Arc<Seed> {
        &self.seed
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &ScalarLaurent)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, t: &ExponentVector) -> ScalarLaurent {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    /// Adds `c·Z^t` in place.
    pub fn add_term(&mut self, t: ExponentVector, c: ScalarLaurent) {
        assert_eq!(t.len(), self.seed.len(), "exponent length must match the seed");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&t) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&t);
                }
            }
            None => {
                self.terms.insert(t, c);
            }
        }
    }

    fn same_seed(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.seed, &other.seed) || *self.seed == *other.seed
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_seed(other) {
            return Err(Error::SeedMismatch);
        }
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&ScalarLaurent::from(-1))
    }

    pub fn scale(&self, c: &ScalarLaurent) -> Self {
        let mut out = Self::zero(self.seed.clone());
        for (t, a) in &self.terms {
            out.add_term(t.clone(), a * c);
        }
        out
    }

    /// The product in the quantum torus.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if !self.same_seed(other) {
            return Err(Error::SeedMismatch);
        }
        let mut out = Self::zero(self.seed.clone());
        for (t, a) in &self.terms {
            for (s, b) in &other.terms {
                let e = lambda2(&self.seed, t, s);
                out.add_term(t + s, (a * b).shift(e));
            }
        }
        Ok(out)
    }

    /// The anti-linear anti-automorphism fixing every `Z_v` and sending `u ↦ u⁻¹`.
    /// In the Weyl basis it conjugates coefficients.
    pub fn star(&self) -> Self {
        Self {
            seed: self.seed.clone(),
            terms: self.terms.iter().map(|(t, c)| (t.clone(), c.conj())).collect(),
        }
    }

    /// True if every coefficient is `±u^k` (a "unit" coefficient).
    pub fn has_unit_coefficients(&self) -> bool {
        self.terms.values().all(ScalarLaurent::is_unit)
    }

    /// Solves `N = R · (1 + α Z^a)` for `R`.
    ///
    /// Terms are grouped by coset of the exponent modulo `ℤ·a`. Inside a coset with
    /// representative `r`, `Z^{r+ja} Z^a = u^{Λ(r,a)} Z^{r+(j+1)a}`, so the problem is a
    /// commutative synthetic division by `1 + β y` with `β = α u^{Λ(r,a)}`.
    pub fn right_divide_binomial(&self, a: &ExponentVector, alpha: &ScalarLaurent) -> Result<Self> {
        if a.len() != self.seed.len() {
            return Err(Error::DimensionMismatch {
                expected: self.seed.len(),
                got: a.len(),
            });
        }
        if !alpha.is_unit() {
            return Err(Error::NonUnitDivisor);
        }
        let Some(pivot) = a.0.iter().position(|&x| x != 0) else {
            // Divisor is the scalar 1 + α.
            return Err(Error::NonUnitDivisor);
        };
        let ap = a[pivot];
        let mut groups: BTreeMap<ExponentVector, BTreeMap<i64, ScalarLaurent>> = BTreeMap::new();
        for (t, c) in &self.terms {
            let j = t[pivot].div_euclid(ap);
            let rep = t - &a.scaled(j);
            groups.entry(rep).or_default().insert(j, c.clone());
        }
        let mut quotient = Self::zero(self.seed.clone());
        let mut remainder = Self::zero(self.seed.clone());
        for (rep, coeffs) in groups {
            let beta = alpha.shift(lambda2(&self.seed, &rep, a));
            let jmin = *coeffs.keys().next().expect("nonempty group");
            let jmax = *coeffs.keys().next_back().expect("nonempty group");
            let mut prev = ScalarLaurent::zero();
            for j in jmin..jmax {
                let nj = coeffs.get(&j).cloned().unwrap_or_default();
                let rj = &nj - &(&beta * &prev);
                quotient.add_term(&rep + &a.scaled(j), rj.clone());
                prev = rj;
            }
            let top = &coeffs[&jmax] - &(&beta * &prev);
            if !top.is_zero() {
                remainder.add_term(&rep + &a.scaled(jmax), top);
            }
        }
        if remainder.is_zero() {
            Ok(quotient)
        } else {
            Err(Error::NotDivisible {
                remainder: Box::new(remainder),
            })
        }
    }

    /// Transports the element to another seed on the same vertex count by renaming
    /// vertices: new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize], seed: Arc<Seed>) -> Self {
        assert_eq!(perm.len(), seed.len());
        let mut out = Self::zero(seed);
        for (t, c) in &self.terms {
            out.add_term(t.permuted(perm), c.clone());
        }
        out
    }

    /// Reinterprets the same terms over another (equal-size) seed without changes.
    pub fn with_seed(&self, seed: Arc<Seed>) -> Self {
        assert_eq!(seed.len(), self.seed.len());
        Self {
            seed,
            terms: self.terms.clone(),
        }
    }

    /// JSON form: `[{"exponents": {vertex: int, ...}, "coeff": [[e, "c"], ...]}, ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        let items: Vec<JsonTerm> = self
            .terms
            .iter()
            .map(|(t, c)| JsonTerm {
                exponents: t
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0)
                    .map(|(v, x)| (self.seed.vertices()[v].clone(), *x))
                    .collect(),
                coeff: c.clone(),
            })
            .collect();
        serde_json::to_value(items).expect("torus element serializes")
    }

    /// Parses the JSON form against a seed, resolving vertex names.
    pub fn from_json(seed: Arc<Seed>, value: &serde_json::Value) -> Result<Self> {
        let items: Vec<JsonTerm> = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidInput(format!("torus element: {e}")))?;
        let mut out = Self::zero(seed.clone());
        for item in items {
            let mut t = ExponentVector::zeros(seed.len());
            for (name, x) in item.exponents {
                let v = seed
                    .index_of(&name)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown vertex {name:?}")))?;
                t[v] += x;
            }
            out.add_term(t, item.coeff);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    exponents: BTreeMap<String, i64>,
    coeff: ScalarLaurent,
}

impl PartialEq for TorusElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_seed(other) && self.terms == other.terms
    }
}

impl Eq for TorusElement {}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·Z^{t:?}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorusElement[{self}]")
    }
}
