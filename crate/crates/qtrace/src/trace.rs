//! Quantum traces of corner arcs as Weyl-ordered sums over network paths, and the
//! splitting homomorphism along an internal edge.
//!
//! For a corner arc with states `(i, j)` the trace is
//! `Σ_{p ∈ 𝒩(ij)} Z^{n·k(p) + 𝐤}`, where `k(p)` is the indicator of the small vertices
//! to the left of the path `p` and the normalizer `𝐤 = Σ_i k(p_i)` sums the unique
//! paths `p_i ∈ 𝒩(ii)`.

use serde::{Deserialize, Serialize};

use crate::balance::ExponentVector;
use crate::coeff::ScalarLaurent;
use crate::error::{Error, Result};
use crate::network::{NetPath, Network};
use crate::surface::{Lattice, TriSurface};
use crate::torus::TorusElement;

/// A corner arc: enters through `source_edge`, turns left around the marked point the
/// two edges share, and leaves through `sink_edge`, with states `i` (start) and `j`
/// (end).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CornerArc {
    pub source_edge: usize,
    pub sink_edge: usize,
    pub i: usize,
    pub j: usize,
}

impl CornerArc {
    /// The arc around marked point `corner` of a triangulated polygon: the source is the
    /// side from `corner` to `corner+1`, the sink the side from `corner−1` to `corner`.
    pub fn at_polygon_corner(s: &TriSurface, corner: usize, i: usize, j: usize) -> Result<CornerArc> {
        let k = s.num_marked();
        if s.coords().is_none() || corner >= k {
            return Err(Error::UnsupportedArc(format!("no polygon corner {corner}")));
        }
        let side = |a: usize, b: usize| {
            s.edge_between(a, b)
                .filter(|&e| s.edges()[e].boundary)
                .ok_or_else(|| Error::UnsupportedArc(format!("no boundary side {a}{b}")))
        };
        Ok(CornerArc {
            source_edge: side(corner, (corner + 1) % k)?,
            sink_edge: side((corner + k - 1) % k, corner)?,
            i,
            j,
        })
    }

    /// Named arcs `a, b, c, d, …` are the corner arcs at marked points `0, 1, 2, 3, …`.
    pub fn named(s: &TriSurface, name: char, i: usize, j: usize) -> Result<CornerArc> {
        let corner = corner_of_name(name)?;
        Self::at_polygon_corner(s, corner, i, j)
    }

    /// The same arc with other states.
    pub fn with_states(self, i: usize, j: usize) -> CornerArc {
        CornerArc { i, j, ..self }
    }
}

/// `a ↦ 0`, `b ↦ 1`, … .
pub fn corner_of_name(name: char) -> Result<usize> {
    if name.is_ascii_lowercase() {
        Ok((name as u8 - b'a') as usize)
    } else {
        Err(Error::UnsupportedArc(format!("arc name {name:?}")))
    }
}

/// A network with its normalizer, ready to produce traces for every state pair.
#[derive(Clone, Debug)]
pub struct ArcTracer {
    network: Network,
    normalizer: ExponentVector,
    lattice: Lattice,
}

impl ArcTracer {
    pub fn new(lat: &Lattice, source_edge: usize, sink_edge: usize) -> Result<ArcTracer> {
        let network = Network::corner(lat, source_edge, sink_edge)?;
        let mut normalizer = ExponentVector::zeros(lat.len());
        for i in 1..=lat.n() {
            let paths = network.enumerate_paths(i, i);
            if paths.len() != 1 {
                return Err(Error::DegenerateGeometry(format!(
                    "expected a unique path for states ({i},{i}), found {}",
                    paths.len()
                )));
            }
            normalizer = &normalizer + &network.left_exponent(&paths[0], lat)?;
        }
        Ok(ArcTracer {
            network,
            normalizer,
            lattice: lat.clone(),
        })
    }

    pub fn for_arc(lat: &Lattice, arc: &CornerArc) -> Result<ArcTracer> {
        Self::new(lat, arc.source_edge, arc.sink_edge)
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    /// The normalizer `𝐤 = Σ_i k(p_i)`.
    pub fn normalizer(&self) -> &ExponentVector {
        &self.normalizer
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The paths of `𝒩(ij)` with their exponents `n·k(p) + 𝐤`.
    pub fn summands(&self, i: usize, j: usize) -> Result<Vec<(NetPath, ExponentVector)>> {
        let n = self.lattice.n() as i64;
        self.network
            .enumerate_paths(i, j)
            .into_iter()
            .map(|p| {
                let k = self.network.left_exponent(&p, &self.lattice)?;
                let t = &k.scaled(n) + &self.normalizer;
                Ok((p, t))
            })
            .collect()
    }

    /// `tr(a_{ij}) = Σ_{p ∈ 𝒩(ij)} Z^{n·k(p) + 𝐤}`; zero when `𝒩(ij)` is empty.
    pub fn trace(&self, i: usize, j: usize) -> Result<TorusElement> {
        let n = self.lattice.n();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::InvalidInput(format!("states ({i},{j}) out of range 1..={n}")));
        }
        let mut out = TorusElement::zero(self.lattice.seed().clone());
        for (_, t) in self.summands(i, j)? {
            out.add_term(t, ScalarLaurent::one());
        }
        Ok(out)
    }
}

/// The trace of one corner arc.
pub fn corner_arc_trace(lat: &Lattice, arc: &CornerArc) -> Result<TorusElement> {
    ArcTracer::for_arc(lat, arc)?.trace(arc.i, arc.j)
}

/// The cut lattice along an internal edge with its projection `pr[cut] = original`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub edge: usize,
    pub lattice: Lattice,
    pub pr: Vec<usize>,
}

impl Splitting {
    pub fn new(lat: &Lattice, e: usize) -> Result<Splitting> {
        let (lattice, pr) = lat.cut(e)?;
        Ok(Splitting { edge: e, lattice, pr })
    }

    /// `𝒮_e(Z^t) = Z^{t∘pr}`: exponents on `e` are duplicated on both copies and the
    /// coefficients are unchanged.
    pub fn apply(&self, a: &TorusElement) -> Result<TorusElement> {
        if a.seed().len() != self.pr.iter().max().map_or(0, |m| m + 1) {
            return Err(Error::DimensionMismatch {
                expected: self.pr.iter().max().map_or(0, |m| m + 1),
                got: a.seed().len(),
            });
        }
        let mut out = TorusElement::zero(self.lattice.seed().clone());
        for (t, c) in a.terms() {
            out.add_term(t.permuted(&self.pr), c.clone());
        }
        Ok(out)
    }

    /// The edge id of the copy of the cut edge lying in the component of face `f`.
    pub fn copy_in_component_of(&self, f: usize) -> Option<usize> {
        let s = self.lattice.surface();
        let comp = s.components().into_iter().find(|c| c.contains(&f))?;
        let copy = s.edges().len() - 1;
        [self.edge, copy]
            .into_iter()
            .find(|&e| s.slots_of(e).iter().any(|(g, _)| comp.contains(g)))
    }
}

/// `𝒮_e(A)` over the lattice cut along `e`.
pub fn split_element(a: &TorusElement, lat: &Lattice, e: usize) -> Result<(TorusElement, Splitting)> {
    let sp = Splitting::new(lat, e)?;
    let out = sp.apply(a)?;
    Ok((out, sp))
}

/// Both sides of the splitting identity for one state pair.
#[derive(Clone, Debug)]
pub struct SplitCheck {
    pub i: usize,
    pub j: usize,
    /// `𝒮_e(tr(a_{ij}))`.
    pub lhs: TorusElement,
    /// `Σ_t tr(a^α_{it}) · tr(a^β_{tj})` on the cut surface.
    pub rhs: TorusElement,
}

impl SplitCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Checks `𝒮_e(tr(a_{ij})) = Σ_t tr(a^α_{it}) tr(a^β_{tj})`, where the arc `arc` crosses
/// the internal edge `e` once: after cutting, `a^α` runs from the source edge to the
/// copy of `e` on the source side, and `a^β` from the other copy to the sink edge.
pub fn check_split_compatibility(lat: &Lattice, arc: &CornerArc, e: usize) -> Result<SplitCheck> {
    let s = lat.surface();
    let sp = Splitting::new(lat, e)?;
    let src_face = s.slots_of(arc.source_edge)[0].0;
    let snk_face = s.slots_of(arc.sink_edge)[0].0;
    let alpha_copy = sp
        .copy_in_component_of(src_face)
        .ok_or_else(|| Error::UnsupportedArc("source side does not meet the cut edge".into()))?;
    let beta_copy = sp
        .copy_in_component_of(snk_face)
        .ok_or_else(|| Error::UnsupportedArc("sink side does not meet the cut edge".into()))?;
    if alpha_copy == beta_copy {
        return Err(Error::UnsupportedArc("arc does not cross the cut edge".into()));
    }
    let full = ArcTracer::for_arc(lat, arc)?;
    let alpha = ArcTracer::new(&sp.lattice, arc.source_edge, alpha_copy)?;
    let beta = ArcTracer::new(&sp.lattice, beta_copy, arc.sink_edge)?;
    let lhs = sp.apply(&full.trace(arc.i, arc.j)?)?;
    let mut rhs = TorusElement::zero(sp.lattice.seed().clone());
    for t in 1..=lat.n() {
        let prod = alpha.trace(arc.i, t)?.multiply(&beta.trace(t, arc.j)?)?;
        rhs = rhs.add(&prod)?;
    }
    Ok(SplitCheck {
        i: arc.i,
        j: arc.j,
        lhs,
        rhs,
    })
}
