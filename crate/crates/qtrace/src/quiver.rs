//! Cluster seeds: vertex roles plus the half-integer exchange matrix `Q`, stored as `2Q`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A seed: ordered vertices, mutable/frozen roles, and `twoQ = 2·Q`.
///
/// Invariants: `twoQ` is antisymmetric, and `twoQ(u,v)` is even whenever `u` or
/// `v` is mutable (half-arrows only ever join two frozen vertices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    vertices: Vec<String>,
    mutable: Vec<bool>,
    #[serde(rename = "twoQ")]
    two_q: Vec<Vec<i64>>,
}

impl Seed {
    /// Builds a seed and checks the invariants.
    pub fn new(vertices: Vec<String>, mutable: Vec<bool>, two_q: Vec<Vec<i64>>) -> Result<Self> {
        let seed = Self {
            vertices,
            mutable,
            two_q,
        };
        seed.validate()?;
        Ok(seed)
    }

    /// Checks shape, antisymmetry and the evenness rule at mutable vertices.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.mutable.len() != n || self.two_q.len() != n || self.two_q.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSeed("dimension mismatch".into()));
        }
        for u in 0..n {
            for v in 0..n {
                let a = self.two_q[u][v];
                if a != -self.two_q[v][u] {
                    return Err(Error::InvalidSeed(format!(
                        "twoQ not antisymmetric at ({}, {})",
                        self.vertices[u], self.vertices[v]
                    )));
                }
                if (self.mutable[u] || self.mutable[v]) && a % 2 != 0 {
                    return Err(Error::InvalidSeed(format!(
                        "half-arrow at mutable vertex pair ({}, {})",
                        self.vertices[u], self.vertices[v]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn is_mutable(&self, k: usize) -> bool {
        self.mutable[k]
    }

    pub fn mutable_mask(&self) -> &[bool] {
        &self.mutable
    }

    pub fn mutable_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&k| self.mutable[k])
    }

    /// `2Q(u,v)`.
    pub fn two_q(&self, u: usize, v: usize) -> i64 {
        self.two_q[u][v]
    }

    pub fn two_q_row(&self, u: usize) -> &[i64] {
        &self.two_q[u]
    }

    pub fn two_q_matrix(&self) -> &[Vec<i64>] {
        &self.two_q
    }

    /// `Q(u,v)` when it is an integer (always the case if `u` or `v` is mutable).
    pub fn q_int(&self, u: usize, v: usize) -> Option<i64> {
        let a = self.two_q[u][v];
        (a % 2 == 0).then_some(a / 2)
    }

    /// Classical mutation of the exchange matrix at `k`.
    ///
    /// `Q'(u,v) = −Q(u,v)` if `k ∈ {u,v}`, otherwise
    /// `Q(u,v) + ½(Q(u,k)|Q(k,v)| + |Q(u,k)|Q(k,v))`.
    /// On `2Q` this reads `2Q' = 2Q + (2Q(u,k)|2Q(k,v)| + |2Q(u,k)|2Q(k,v)) / 4`, exact
    /// because `2Q(u,k)` and `2Q(k,v)` are both even.
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        if !self.mutable[k] {
            return Err(Error::MutationAtFrozenVertex(self.vertices[k].clone()));
        }
        let n = self.len();
        let mut out = self.two_q.clone();
        for u in 0..n {
            for v in 0..n {
                if u == k || v == k {
                    out[u][v] = -self.two_q[u][v];
                } else {
                    let a = self.two_q[u][k];
                    let b = self.two_q[k][v];
                    out[u][v] = self.two_q[u][v] + (a * b.abs() + a.abs() * b) / 4;
                }
            }
        }
        Ok(Seed {
            vertices: self.vertices.clone(),
            mutable: self.mutable.clone(),
            two_q: out,
        })
    }

    /// Reorders vertices: the new seed's vertex `i` is this seed's vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Seed {
        Seed {
            vertices: perm.iter().map(|&p| self.vertices[p].clone()).collect(),
            mutable: perm.iter().map(|&p| self.mutable[p]).collect(),
            two_q: perm
                .iter()
                .map(|&p| perm.iter().map(|&q| self.two_q[p][q]).collect())
                .collect(),
        }
    }

    /// Graphviz rendering: one arrow per positive entry, labelled `1`, `½`, `3/2`, ...
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{name}\" {{");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if self.mutable[i] { "circle" } else { "box" };
            let _ = writeln!(s, "  \"{v}\" [shape={shape}];");
        }
        for u in 0..self.len() {
            for v in 0..self.len() {
                let a = self.two_q[u][v];
                if a > 0 {
                    let label = match (a % 2, a / 2) {
                        (0, w) => w.to_string(),
                        (_, 0) => "½".to_string(),
                        _ => format!("{a}/2"),
                    };
                    let _ = writeln!(
                        s,
                        "  \"{}\" -> \"{}\" [label=\"{label}\"];",
                        self.vertices[u], self.vertices[v]
                    );
                }
            }
        }
        s.push_str("}\n");
        s
    }
}
