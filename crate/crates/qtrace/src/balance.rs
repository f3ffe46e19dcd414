//! Exponent vectors and the balanced / mutable-balanced lattices.
//!
//! A vector `k ∈ ℤ^V` is *balanced* if on every face its pullback is, mod `n`, an
//! integer combination of the three barycentric coordinate functions. It is
//! *mutable-balanced* for a seed if `Σ_v Q(u,v)·k_v ≡ 0 (mod n)` at every mutable `u`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::quiver::Seed;
use crate::surface::Lattice;

/// A dense integer vector indexed by the small vertices of a lattice (or seed).
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// The basis vector `e_k`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[k] = 1;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scaled(&self, c: i64) -> Self {
        Self(self.0.iter().map(|x| c * x).collect())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// Reorders entries: new entry `i` is old entry `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&p| self.0[p]).collect())
    }

    /// `Σ_v 2Q(u,v)·t_v`.
    pub fn two_q_pairing(&self, seed: &Seed, u: usize) -> i64 {
        seed.two_q_row(u)
            .iter()
            .zip(&self.0)
            .map(|(q, t)| q * t)
            .sum()
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl Index<usize> for ExponentVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ExponentVector {
    fn index_mut(&mut self, i: usize) -> &mut i64 {
        &mut self.0[i]
    }
}

impl Add for &ExponentVector {
    type Output = ExponentVector;
    fn add(self, rhs: &ExponentVector) -> ExponentVector {
        assert_eq!(self.len(), rhs.len(), "exponent length mismatch");
        ExponentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ExponentVector {
    type Output = ExponentVector;
    fn sub(self, rhs: &ExponentVector) -> ExponentVector {
        assert_eq!(self.len(), rhs.len(), "exponent length mismatch");
        ExponentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ExponentVector {
    type Output = ExponentVector;
    fn neg(self) -> ExponentVector {
        ExponentVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Per-face witness `(a, b, c)` mod `n` with `k ≡ a·k₁ + b·k₂ + c·k₃` on that face,
/// where `k_i` is the barycentric weight on the face's `i`-th corner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceWitness {
    pub face: usize,
    pub coefficients: [i64; 3],
}

/// Finds a witness for every face, or `None` if some face has none.
pub fn balanced_witnesses(k: &ExponentVector, lat: &Lattice) -> Option<Vec<FaceWitness>> {
    let n = lat.n() as i64;
    let mut out = Vec::with_capacity(lat.surface().faces().len());
    for f in 0..lat.surface().faces().len() {
        let pts: Vec<([i64; 3], i64)> = lat
            .face_points(f)
            .map(|(w, v)| (w, k[v].rem_euclid(n)))
            .collect();
        let mut found = None;
        'search: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if pts
                        .iter()
                        .all(|(w, kv)| (a * w[0] + b * w[1] + c * w[2]).rem_euclid(n) == *kv)
                    {
                        found = Some([a, b, c]);
                        break 'search;
                    }
                }
            }
        }
        out.push(FaceWitness {
            face: f,
            coefficients: found?,
        });
    }
    Some(out)
}

/// Balancedness by exhaustive search over `(ℤ/n)³` on each face.
pub fn is_balanced(k: &ExponentVector, lat: &Lattice) -> bool {
    balanced_witnesses(k, lat).is_some()
}

/// The necessary condition `k·H ∈ (nℤ)^V`.
pub fn is_balanced_via_h(k: &ExponentVector, lat: &Lattice) -> bool {
    let n = lat.n() as i64;
    let h = lat.h_matrix();
    (0..k.len()).all(|w| {
        let s: i64 = (0..k.len()).map(|v| k[v] * h[v][w]).sum();
        s.rem_euclid(n) == 0
    })
}

/// `Σ_v Q(u,v) t_v ≡ 0 (mod n)` at every mutable `u`.
///
/// `Q(u,·)` is integral at mutable `u`, so the test is `Σ 2Q(u,v)t_v ≡ 0 (mod 2n)`.
pub fn is_mutable_balanced(t: &ExponentVector, seed: &Seed, n: usize) -> bool {
    let n2 = 2 * n as i64;
    seed.mutable_indices()
        .all(|u| t.two_q_pairing(seed, u).rem_euclid(n2) == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_polygon, triangulate_polygon, Lattice};

    fn triangle(n: usize) -> Lattice {
        let s = triangulate_polygon(&build_polygon(3).unwrap(), &[]).unwrap();
        Lattice::new(&s, n).unwrap()
    }

    #[test]
    fn zero_is_balanced() {
        let lat = triangle(3);
        let z = ExponentVector::zeros(lat.len());
        assert!(is_balanced(&z, &lat));
        assert!(is_balanced_via_h(&z, &lat));
        assert!(is_mutable_balanced(&z, lat.seed(), 3));
    }

    #[test]
    fn two_midpoints_balanced_one_not() {
        let lat = triangle(2);
        // Midpoints of the two sides through corner 0 carry weight 1 on that corner.
        let mut k = ExponentVector::zeros(3);
        let mut single = ExponentVector::zeros(3);
        for (w, v) in lat.face_points(0) {
            if w[0] == 1 {
                k[v] = 1;
                if single.is_zero() {
                    single[v] = 1;
                }
            }
        }
        assert!(is_balanced(&k, &lat));
        assert!(!is_balanced(&single, &lat));
    }

    #[test]
    fn multiples_of_n_are_mutable_balanced() {
        let lat = triangle(4);
        let t = ExponentVector((0..lat.len() as i64).map(|i| 4 * (i - 3)).collect());
        assert!(is_mutable_balanced(&t, lat.seed(), 4));
    }
}
