//! Triangulated surfaces, their n-triangulation lattices, flips and cuts.
//!
//! A [`TriSurface`] is combinatorial: marked points, edges (boundary or internal) and
//! triangular faces whose corners and sides are listed clockwise, side `s` joining
//! corners `s` and `s+1`. Each face side records whether it traverses its edge in the
//! edge's canonical direction (`ends[0] → ends[1]`); the two sides glued along an
//! internal edge traverse it in opposite directions. Polygons additionally carry
//! planar coordinates for their marked points, which networks use for left-of tests.
//!
//! A [`Lattice`] is the set `V` of small vertices of the n-triangulation (barycentric
//! points `w` with `w₀+w₁+w₂ = n`, corners excluded), identified along glued edges,
//! together with the Fock–Goncharov seed and the matrix `H`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quiver::Seed;

/// An edge of a triangulated surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub ends: [usize; 2],
    pub boundary: bool,
    pub label: String,
}

/// A triangle: corners and sides in clockwise order; side `s` joins corners `s`, `s+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub corners: [usize; 3],
    pub sides: [usize; 3],
    /// `true` if side `s` runs `corners[s] → corners[s+1]` along `ends[0] → ends[1]`.
    pub forward: [bool; 3],
}

/// A combinatorial triangulated punctured bordered surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriSurface {
    num_marked: usize,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    /// Planar coordinates of marked points (polygons only).
    coords: Option<Vec<[i64; 2]>>,
}

/// Builds the bare polygon `ℙ_k` (boundary edges only, marked points counterclockwise).
///
/// For `k = 4` the marked points are bottom-left, bottom-right, top-right, top-left and
/// the sides are labelled `e2` (bottom), `e5` (right), `e4` (top), `e3` (left).
pub fn build_polygon(k: usize) -> Result<TriSurface> {
    if k < 3 {
        return Err(Error::PolygonTooSmall(k));
    }
    let coords: Vec<[i64; 2]> = match k {
        3 => vec![[0, 0], [1, 0], [0, 1]],
        4 => vec![[0, 0], [1, 0], [1, 1], [0, 1]],
        _ => (0..k as i64).map(|i| [i, i * i]).collect(),
    };
    let label = |i: usize| match k {
        3 => format!("e{}", i + 1),
        4 => ["e2", "e5", "e4", "e3"][i].to_string(),
        _ => format!("s{i}"),
    };
    let edges = (0..k)
        .map(|i| Edge {
            ends: [i, (i + 1) % k],
            boundary: true,
            label: label(i),
        })
        .collect();
    Ok(TriSurface {
        num_marked: k,
        edges,
        faces: Vec::new(),
        coords: Some(coords),
    })
}

fn crosses(k: usize, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    let _ = k;
    let (a, b) = (a.min(b), a.max(b));
    let inside = |x: usize| a < x && x < b;
    let shared = a == c || a == d || b == c || b == d;
    !shared && (inside(c) != inside(d))
}

/// Triangulates a bare polygon with the given diagonals (pairs of marked points).
///
/// Diagonal edges get ids `k, k+1, …` in the given order and labels `d{a}{b}`.
pub fn triangulate_polygon(s: &TriSurface, diagonals: &[(usize, usize)]) -> Result<TriSurface> {
    let k = s.num_marked;
    if !s.faces.is_empty() || s.coords.is_none() || s.edges.len() != k {
        return Err(Error::NotATriangulation("expected a bare polygon".into()));
    }
    if diagonals.len() != k - 3 {
        return Err(Error::NotATriangulation(format!(
            "ℙ_{k} needs {} diagonals, got {}",
            k - 3,
            diagonals.len()
        )));
    }
    let mut adj = BTreeSet::new();
    for i in 0..k {
        let j = (i + 1) % k;
        adj.insert((i.min(j), i.max(j)));
    }
    let mut edges = s.edges.clone();
    for (idx, &(a, b)) in diagonals.iter().enumerate() {
        let (a, b) = (a.min(b), a.max(b));
        if b >= k || b - a < 2 || (a == 0 && b == k - 1) {
            return Err(Error::NotATriangulation(format!("({a},{b}) is not a diagonal")));
        }
        if !adj.insert((a, b)) {
            return Err(Error::NotATriangulation(format!("duplicate diagonal ({a},{b})")));
        }
        for &(c, d) in &diagonals[..idx] {
            if crosses(k, (a, b), (c, d)) {
                return Err(Error::NotATriangulation(format!(
                    "diagonals ({a},{b}) and ({c},{d}) cross"
                )));
            }
        }
        edges.push(Edge {
            ends: [a, b],
            boundary: false,
            label: format!("d{a}{b}"),
        });
    }
    let edge_id = |a: usize, b: usize| -> usize {
        edges
            .iter()
            .position(|e| (e.ends[0] == a && e.ends[1] == b) || (e.ends[0] == b && e.ends[1] == a))
            .expect("edge exists")
    };
    let mut faces = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                if adj.contains(&(a, b)) && adj.contains(&(b, c)) && adj.contains(&(a, c)) {
                    // (a, b, c) is counterclockwise; store clockwise (a, c, b).
                    let corners = [a, c, b];
                    let mut sides = [0; 3];
                    let mut forward = [false; 3];
                    for sl in 0..3 {
                        let (x, y) = (corners[sl], corners[(sl + 1) % 3]);
                        let e = edge_id(x, y);
                        sides[sl] = e;
                        forward[sl] = edges[e].ends == [x, y];
                    }
                    faces.push(Face {
                        corners,
                        sides,
                        forward,
                    });
                }
            }
        }
    }
    if faces.len() != k - 2 {
        return Err(Error::NotATriangulation("diagonals do not triangulate".into()));
    }
    let out = TriSurface {
        num_marked: k,
        edges,
        faces,
        coords: s.coords.clone(),
    };
    out.validate()?;
    Ok(out)
}

/// Convenience: the two triangulations of `ℙ₄`. `lambda` has the diagonal from
/// bottom-right to top-left, `lambda'` the one from bottom-left to top-right.
pub fn p4(primed: bool) -> TriSurface {
    let d = if primed { (0, 2) } else { (1, 3) };
    triangulate_polygon(&build_polygon(4).expect("k = 4"), &[d]).expect("valid diagonal")
}

/// The fan triangulation of `ℙ_k` from marked point 0.
pub fn fan(k: usize) -> Result<TriSurface> {
    let d: Vec<(usize, usize)> = (2..k - 1).map(|j| (0, j)).collect();
    triangulate_polygon(&build_polygon(k)?, &d)
}

#[derive(Serialize, Deserialize)]
struct JsonFace {
    id: usize,
    sides: [usize; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    corners: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    forward: Option<[bool; 3]>,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    id: usize,
    boundary: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonSurface {
    faces: Vec<JsonFace>,
    edges: Vec<JsonEdge>,
    gluing: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[i64; 2]>>,
}

impl TriSurface {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn num_marked(&self) -> usize {
        self.num_marked
    }

    pub fn coords(&self) -> Option<&[[i64; 2]]> {
        self.coords.as_deref()
    }

    pub fn edge_by_label(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.label == label)
    }

    /// The edge joining two marked points, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.ends == [a, b] || e.ends == [b, a])
    }

    /// The `(face, slot)` pairs carrying edge `e`.
    pub fn slots_of(&self, e: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (f, face) in self.faces.iter().enumerate() {
            for s in 0..3 {
                if face.sides[s] == e {
                    out.push((f, s));
                }
            }
        }
        out
    }

    /// Pairs of glued side slots `[faceA, slotA, faceB, slotB]`.
    pub fn gluing(&self) -> Vec<[usize; 4]> {
        (0..self.edges.len())
            .filter(|&e| !self.edges[e].boundary)
            .filter_map(|e| {
                let s = self.slots_of(e);
                (s.len() == 2).then(|| [s[0].0, s[0].1, s[1].0, s[1].1])
            })
            .collect()
    }

    /// Checks edge incidences, orientation reversal along gluings and the absence of
    /// self-folded triangles.
    pub fn validate(&self) -> Result<()> {
        for (f, face) in self.faces.iter().enumerate() {
            let [a, b, c] = face.sides;
            if a == b || b == c || a == c {
                return Err(Error::InvalidSurface(format!("face {f} is self-folded")));
            }
            for s in 0..3 {
                if face.sides[s] >= self.edges.len() {
                    return Err(Error::InvalidSurface(format!("face {f} uses unknown edge")));
                }
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let slots = self.slots_of(e);
            let expected = if edge.boundary { 1 } else { 2 };
            if !self.faces.is_empty() && slots.len() != expected {
                return Err(Error::InvalidSurface(format!(
                    "edge {e} is used by {} face sides, expected {expected}",
                    slots.len()
                )));
            }
            if slots.len() == 2 {
                let d0 = self.faces[slots[0].0].forward[slots[0].1];
                let d1 = self.faces[slots[1].0].forward[slots[1].1];
                if d0 == d1 {
                    return Err(Error::InvalidSurface(format!(
                        "edge {e} is glued without orientation reversal"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Flips the internal edge `e`: the quadrilateral `P0 P1 P2 P3` (counterclockwise,
    /// `e = P0P2`) is retriangulated along `P1P3`. Edge and face ids are preserved.
    pub fn flip(&self, e: usize) -> Result<TriSurface> {
        let q = self.quadrilateral(e)?;
        let mut out = self.clone();
        let [p0, p1, p2, p3] = q.marked;
        let f1 = &self.faces[q.f1];
        let f2 = &self.faces[q.f2];
        // Sides of the quadrilateral with their traversal flags (unchanged by the flip).
        let side = |face: &Face, slot: usize| (face.sides[slot], face.forward[slot]);
        let s01 = side(f1, (q.s1 + 2) % 3);
        let s12 = side(f1, (q.s1 + 1) % 3);
        let s23 = side(f2, (q.s2 + 2) % 3);
        let s30 = side(f2, (q.s2 + 1) % 3);
        out.edges[e].ends = [p1, p3];
        let label = &self.edges[e].label;
        if label.len() > 1 && label.starts_with('d') && label[1..].bytes().all(|b| b.is_ascii_digit()) {
            out.edges[e].label = format!("d{}{}", p1.min(p3), p1.max(p3));
        }
        out.faces[q.f1] = Face {
            corners: [p1, p3, p2],
            sides: [e, s23.0, s12.0],
            forward: [true, s23.1, s12.1],
        };
        out.faces[q.f2] = Face {
            corners: [p3, p1, p0],
            sides: [e, s01.0, s30.0],
            forward: [false, s01.1, s30.1],
        };
        out.validate()?;
        Ok(out)
    }

    /// The quadrilateral around internal edge `e`.
    pub fn quadrilateral(&self, e: usize) -> Result<Quadrilateral> {
        if e >= self.edges.len() || self.edges[e].boundary {
            return Err(Error::FlipNotAllowed(format!("edge {e} is not internal")));
        }
        let slots = self.slots_of(e);
        if slots.len() != 2 || slots[0].0 == slots[1].0 {
            return Err(Error::FlipNotAllowed(format!(
                "edge {e} does not bound two distinct triangles"
            )));
        }
        let (f1, s1) = slots[0];
        let (f2, s2) = slots[1];
        let c1 = self.faces[f1].corners;
        let c2 = self.faces[f2].corners;
        // f1 clockwise: P0 → P2 → P1 along slots s1, s1+1, s1+2.
        let p0 = c1[s1];
        let p2 = c1[(s1 + 1) % 3];
        let p1 = c1[(s1 + 2) % 3];
        let p3 = c2[(s2 + 2) % 3];
        // Role of each face slot: 0..3 ↔ P0..P3.
        let mut roles1 = [0; 3];
        roles1[s1] = 0;
        roles1[(s1 + 1) % 3] = 2;
        roles1[(s1 + 2) % 3] = 1;
        let mut roles2 = [0; 3];
        roles2[s2] = 2;
        roles2[(s2 + 1) % 3] = 0;
        roles2[(s2 + 2) % 3] = 3;
        Ok(Quadrilateral {
            edge: e,
            f1,
            s1,
            f2,
            s2,
            marked: [p0, p1, p2, p3],
            roles1,
            roles2,
        })
    }

    /// Cuts along internal edge `e`. The second face slot gets a fresh boundary edge
    /// (id `edges.len()`); marked points are duplicated per connected component so that
    /// each component has its own boundary cycle.
    pub fn cut(&self, e: usize) -> Result<TriSurface> {
        if e >= self.edges.len() || self.edges[e].boundary {
            return Err(Error::CannotCutBoundary(e));
        }
        let slots = self.slots_of(e);
        let mut out = self.clone();
        out.edges[e].boundary = true;
        let copy = out.edges.len();
        out.edges.push(Edge {
            ends: self.edges[e].ends,
            boundary: true,
            label: format!("{}'", self.edges[e].label),
        });
        let (f, s) = slots[1];
        out.faces[f].sides[s] = copy;
        // Duplicate marked points shared between components.
        let comps = out.components();
        let mut owner: HashMap<usize, usize> = HashMap::new();
        let mut coords = out.coords.clone();
        for (ci, comp) in comps.iter().enumerate() {
            let mut remap: HashMap<usize, usize> = HashMap::new();
            for &f in comp {
                for c in 0..3 {
                    let p = out.faces[f].corners[c];
                    let np = *remap.entry(p).or_insert_with(|| match owner.get(&p) {
                        Some(&o) if o != ci => {
                            let np = out.num_marked;
                            out.num_marked += 1;
                            if let Some(cs) = coords.as_mut() {
                                let xy = cs[p];
                                cs.push(xy);
                            }
                            np
                        }
                        _ => {
                            owner.insert(p, ci);
                            p
                        }
                    });
                    out.faces[f].corners[c] = np;
                }
            }
            for &f in comp {
                for s in 0..3 {
                    let ed = out.faces[f].sides[s];
                    let fw = out.faces[f].forward[s];
                    let (a, b) = (out.faces[f].corners[s], out.faces[f].corners[(s + 1) % 3]);
                    out.edges[ed].ends = if fw { [a, b] } else { [b, a] };
                }
            }
        }
        out.coords = coords;
        out.validate()?;
        Ok(out)
    }

    /// Faces grouped into connected components through internal edges.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let nf = self.faces.len();
        let mut comp = vec![usize::MAX; nf];
        let mut out = Vec::new();
        for start in 0..nf {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![];
            let mut queue = VecDeque::from([start]);
            comp[start] = id;
            while let Some(f) = queue.pop_front() {
                members.push(f);
                for s in 0..3 {
                    let e = self.faces[f].sides[s];
                    if self.edges[e].boundary {
                        continue;
                    }
                    for (g, _) in self.slots_of(e) {
                        if comp[g] == usize::MAX {
                            comp[g] = id;
                            queue.push_back(g);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Direction of boundary edge `e` that keeps its face on the left, as
    /// `(from, to)` marked points.
    pub fn boundary_ccw(&self, e: usize) -> Option<(usize, usize)> {
        if !self.edges[e].boundary {
            return None;
        }
        let (f, s) = *self.slots_of(e).first()?;
        let c = self.faces[f].corners;
        // The face traverses its sides clockwise, i.e. with the face on the right.
        Some((c[(s + 1) % 3], c[s]))
    }

    /// JSON with the documented `{faces, edges, gluing}` layout (plus coordinates).
    pub fn to_json(&self) -> serde_json::Value {
        let js = JsonSurface {
            faces: self
                .faces
                .iter()
                .enumerate()
                .map(|(id, f)| JsonFace {
                    id,
                    sides: f.sides,
                    corners: Some(f.corners),
                    forward: Some(f.forward),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| JsonEdge {
                    id,
                    boundary: e.boundary,
                    label: Some(e.label.clone()),
                })
                .collect(),
            gluing: self.gluing(),
            coords: self.coords.clone(),
        };
        serde_json::to_value(js).expect("surface serializes")
    }

    /// Parses the `{faces, edges, gluing}` layout. Marked points are recovered by
    /// identifying face corners across gluings; each glued pair reverses orientation.
    pub fn from_json(value: &serde_json::Value) -> Result<TriSurface> {
        let js: JsonSurface = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidInput(format!("surface: {e}")))?;
        let nf = js.faces.len();
        let mut faces_sides = vec![[usize::MAX; 3]; nf];
        let mut given_corners = vec![None; nf];
        let mut given_forward = vec![None; nf];
        for f in &js.faces {
            if f.id >= nf {
                return Err(Error::InvalidSurface(format!("face id {} out of range", f.id)));
            }
            faces_sides[f.id] = f.sides;
            given_corners[f.id] = f.corners;
            given_forward[f.id] = f.forward;
        }
        let ne = js.edges.len();
        let mut boundary = vec![false; ne];
        let mut labels = vec![String::new(); ne];
        for e in &js.edges {
            if e.id >= ne {
                return Err(Error::InvalidSurface(format!("edge id {} out of range", e.id)));
            }
            boundary[e.id] = e.boundary;
            labels[e.id] = e.label.clone().unwrap_or_else(|| format!("E{}", e.id));
        }
        // Union-find over face corners (3 per face).
        let mut parent: Vec<usize> = (0..3 * nf).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nxt = p[y];
                p[y] = r;
                y = nxt;
            }
            r
        }
        let mut forward = vec![[true; 3]; nf];
        for g in &js.gluing {
            let [fa, sa, fb, sb] = *g;
            if fa >= nf || fb >= nf || sa > 2 || sb > 2 {
                return Err(Error::InvalidSurface("gluing index out of range".into()));
            }
            if faces_sides[fa][sa] != faces_sides[fb][sb] {
                return Err(Error::InvalidSurface(format!(
                    "gluing {g:?} pairs sides carrying different edges"
                )));
            }
            forward[fb][sb] = false;
            let pairs = [(3 * fa + sa, 3 * fb + (sb + 1) % 3), (3 * fa + (sa + 1) % 3, 3 * fb + sb)];
            for (x, y) in pairs {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
        let mut marked: BTreeMap<usize, usize> = BTreeMap::new();
        let mut faces = Vec::with_capacity(nf);
        let all_given = given_corners.iter().all(Option::is_some) && given_forward.iter().all(Option::is_some);
        for f in 0..nf {
            let mut corners = [0; 3];
            for (c, slot) in corners.iter_mut().enumerate() {
                let r = find(&mut parent, 3 * f + c);
                let next = marked.len();
                *slot = *marked.entry(r).or_insert(next);
            }
            let (corners, fw) = if all_given {
                (given_corners[f].expect("checked"), given_forward[f].expect("checked"))
            } else {
                (corners, forward[f])
            };
            faces.push(Face {
                corners,
                sides: faces_sides[f],
                forward: fw,
            });
        }
        let num_marked = if all_given {
            faces.iter().flat_map(|f| f.corners).max().map_or(0, |m| m + 1)
        } else {
            marked.len()
        };
        let mut edges: Vec<Edge> = (0..ne)
            .map(|e| Edge {
                ends: [usize::MAX; 2],
                boundary: boundary[e],
                label: labels[e].clone(),
            })
            .collect();
        for face in &faces {
            for s in 0..3 {
                let (a, b) = (face.corners[s], face.corners[(s + 1) % 3]);
                if face.forward[s] {
                    edges[face.sides[s]].ends = [a, b];
                }
            }
        }
        let out = TriSurface {
            num_marked,
            edges,
            faces,
            coords: js.coords,
        };
        out.validate()?;
        Ok(out)
    }
}

/// The quadrilateral around an internal edge, with corner roles `P0..P3`
/// (counterclockwise, `e = P0P2`).
#[derive(Clone, Debug)]
pub struct Quadrilateral {
    pub edge: usize,
    pub f1: usize,
    pub s1: usize,
    pub f2: usize,
    pub s2: usize,
    pub marked: [usize; 4],
    /// `roles1[c]` is the role (0..3) of corner `c` of face `f1`.
    pub roles1: [usize; 3],
    pub roles2: [usize; 3],
}

/// Integer coordinates in the unit square scaled by `n`, with `P0=(0,0)`, `P1=(n,0)`,
/// `P2=(n,n)`, `P3=(0,n)`: both triangulations of the quadrilateral place their small
/// vertices on this common lattice.
fn square_coords(roles: [usize; 3], w: [i64; 3]) -> (i64, i64) {
    const UNIT: [(i64, i64); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];
    let mut x = 0;
    let mut y = 0;
    for c in 0..3 {
        x += w[c] * UNIT[roles[c]].0;
        y += w[c] * UNIT[roles[c]].1;
    }
    (x, y)
}

/// Identity of a small vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexKey {
    /// The `pos`-th point (1..n−1) on an edge, counted from `ends[0]`.
    Edge { edge: usize, pos: usize },
    /// An interior point of a face, with barycentric weights on its corners.
    Face { face: usize, w: [usize; 3] },
}

/// Coordinate scale: planar positions are stored multiplied by `6n`, which makes small
/// vertices, small-triangle centroids and small-edge midpoints all integral.
pub const POSITION_SCALE: i64 = 6;

/// The n-triangulation of a triangulated surface.
#[derive(Clone, Debug)]
pub struct Lattice {
    surface: TriSurface,
    n: usize,
    keys: Vec<VertexKey>,
    index: HashMap<VertexKey, usize>,
    seed: Arc<Seed>,
    h: Vec<Vec<i64>>,
}

/// Arrow directions parallel to the sides, in weights on the clockwise-stored corners
/// `(c0, c1, c2)`: every small edge points clockwise, `c0 → c1 → c2 → c0`.
///
/// This global orientation is the one under which the left-turn corner-arc traces
/// (with the planar embedding used here) are natural under flips.
const ARROW_STEPS: [[i64; 3]; 3] = [[-1, 1, 0], [0, -1, 1], [1, 0, -1]];

impl Lattice {
    /// Builds `V`, the seed (mutable = vertices off the boundary) and `H`.
    pub fn new(surface: &TriSurface, n: usize) -> Result<Lattice> {
        if n < 2 {
            return Err(Error::InvalidInput("n must be at least 2".into()));
        }
        if surface.faces.is_empty() {
            return Err(Error::NotATriangulation("surface has no faces".into()));
        }
        surface.validate()?;
        let mut keys = BTreeSet::new();
        for e in 0..surface.edges.len() {
            if !surface.slots_of(e).is_empty() {
                for pos in 1..n {
                    keys.insert(VertexKey::Edge { edge: e, pos });
                }
            }
        }
        for f in 0..surface.faces.len() {
            for a in 1..n {
                for b in 1..n - a {
                    let c = n - a - b;
                    keys.insert(VertexKey::Face { face: f, w: [a, b, c] });
                }
            }
        }
        let keys: Vec<VertexKey> = keys.into_iter().collect();
        let index: HashMap<VertexKey, usize> =
            keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let nv = keys.len();
        let mut lat = Lattice {
            surface: surface.clone(),
            n,
            keys,
            index,
            seed: Arc::new(Seed::new(vec![], vec![], vec![])?),
            h: vec![],
        };
        let mut two_q = vec![vec![0i64; nv]; nv];
        for f in 0..surface.faces.len() {
            for (w, v) in lat.face_points(f).collect::<Vec<_>>() {
                for step in ARROW_STEPS {
                    let w2 = [w[0] + step[0], w[1] + step[1], w[2] + step[2]];
                    let Some(v2) = lat.face_point(f, w2) else { continue };
                    // An edge lying on a side of the face has a zero weight in common.
                    let on_side = (0..3).any(|c| w[c] == 0 && w2[c] == 0);
                    let wt = if on_side { 1 } else { 2 };
                    two_q[v][v2] += wt;
                    two_q[v2][v] -= wt;
                }
            }
        }
        let mutable: Vec<bool> = lat
            .keys
            .iter()
            .map(|k| match k {
                VertexKey::Edge { edge, .. } => !surface.edges[*edge].boundary,
                VertexKey::Face { .. } => true,
            })
            .collect();
        let names = lat.keys.iter().map(|k| lat.key_name(k)).collect();
        let seed = Seed::new(names, mutable, two_q)?;
        let mut h = vec![vec![0i64; nv]; nv];
        for v in 0..nv {
            for w in 0..nv {
                let same_boundary_edge = match (&lat.keys[v], &lat.keys[w]) {
                    (VertexKey::Edge { edge: a, .. }, VertexKey::Edge { edge: b, .. }) => {
                        a == b && surface.edges[*a].boundary
                    }
                    _ => false,
                };
                let q2 = seed.two_q(v, w);
                h[v][w] = if same_boundary_edge {
                    if v == w {
                        -1
                    } else if q2 > 0 {
                        1
                    } else {
                        0
                    }
                } else {
                    debug_assert!(q2 % 2 == 0, "half-arrow off a boundary edge");
                    q2 / 2
                };
            }
        }
        lat.seed = Arc::new(seed);
        lat.h = h;
        Ok(lat)
    }

    fn key_name(&self, k: &VertexKey) -> String {
        match k {
            VertexKey::Edge { edge, pos } => format!("{}.{pos}", self.surface.edges[*edge].label),
            VertexKey::Face { face, w } => format!("f{face}.{}{}{}", w[0], w[1], w[2]),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn surface(&self) -> &TriSurface {
        &self.surface
    }

    pub fn seed(&self) -> &Arc<Seed> {
        &self.seed
    }

    pub fn h_matrix(&self) -> &[Vec<i64>] {
        &self.h
    }

    pub fn keys(&self) -> &[VertexKey] {
        &self.keys
    }

    pub fn index_of(&self, k: &VertexKey) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// The ordered `n−1` vertices on edge `e`, from `ends[0]` to `ends[1]`.
    pub fn edge_vertices(&self, e: usize) -> Vec<usize> {
        (1..self.n)
            .filter_map(|pos| self.index_of(&VertexKey::Edge { edge: e, pos }))
            .collect()
    }

    /// The vertex at barycentric weights `w` on face `f`; `None` for corners and
    /// invalid weights.
    pub fn face_point(&self, f: usize, w: [i64; 3]) -> Option<usize> {
        let n = self.n as i64;
        if w.iter().any(|&x| x < 0) || w.iter().sum::<i64>() != n {
            return None;
        }
        let zeros = w.iter().filter(|&&x| x == 0).count();
        let face = &self.surface.faces[f];
        let key = match zeros {
            0 => VertexKey::Face {
                face: f,
                w: [w[0] as usize, w[1] as usize, w[2] as usize],
            },
            1 => {
                let z = w.iter().position(|&x| x == 0).expect("one zero");
                let s = (z + 1) % 3;
                let pos = if face.forward[s] { w[(s + 1) % 3] } else { w[s] };
                VertexKey::Edge {
                    edge: face.sides[s],
                    pos: pos as usize,
                }
            }
            _ => return None,
        };
        self.index_of(&key)
    }

    /// All `(weights, vertex)` pairs on face `f`.
    pub fn face_points(&self, f: usize) -> impl Iterator<Item = ([i64; 3], usize)> + '_ {
        let n = self.n as i64;
        (0..=n).flat_map(move |a| {
            (0..=n - a).filter_map(move |b| {
                let w = [a, b, n - a - b];
                self.face_point(f, w).map(|v| (w, v))
            })
        })
    }

    /// Planar position of a barycentric point of face `f`, scaled by
    /// [`POSITION_SCALE`]` · n`. Requires an embedded surface.
    pub fn planar(&self, f: usize, w: [i64; 3]) -> Option<[i64; 2]> {
        let coords = self.surface.coords()?;
        let c = self.surface.faces[f].corners;
        let mut p = [0, 0];
        for i in 0..3 {
            p[0] += POSITION_SCALE * w[i] * coords[c[i]][0];
            p[1] += POSITION_SCALE * w[i] * coords[c[i]][1];
        }
        Some(p)
    }

    /// Planar position of each vertex (embedded surfaces only).
    pub fn vertex_positions(&self) -> Option<Vec<[i64; 2]>> {
        let mut out = vec![None; self.len()];
        for f in 0..self.surface.faces.len() {
            for (w, v) in self.face_points(f) {
                out[v] = Some(self.planar(f, w)?);
            }
        }
        out.into_iter().collect()
    }

    /// Faces whose points include vertex `v`.
    pub fn faces_of(&self, v: usize) -> Vec<usize> {
        match &self.keys[v] {
            VertexKey::Face { face, .. } => vec![*face],
            VertexKey::Edge { edge, .. } => self.surface.slots_of(*edge).into_iter().map(|(f, _)| f).collect(),
        }
    }

    /// Flips `e`, returning the new lattice and `map` with `map[new] = old` (vertices
    /// of the quadrilateral are identified through its common square lattice).
    pub fn flip(&self, e: usize) -> Result<(Lattice, Vec<usize>)> {
        let quad = self.surface.quadrilateral(e)?;
        let flipped = self.surface.flip(e)?;
        let new = Lattice::new(&flipped, self.n)?;
        let new_quad = flipped.quadrilateral(e)?;
        let mut by_square: HashMap<(i64, i64), usize> = HashMap::new();
        for (f, roles) in [(quad.f1, quad.roles1), (quad.f2, quad.roles2)] {
            for (w, v) in self.face_points(f) {
                by_square.insert(square_coords(roles, w), v);
            }
        }
        // In the flipped surface the new faces have roles relative to the old corners.
        let role_of = |p: usize| quad.marked.iter().position(|&m| m == p);
        let mut map = vec![usize::MAX; new.len()];
        for (i, k) in new.keys.iter().enumerate() {
            if let Some(&old) = self.index.get(k) {
                let in_quad = match k {
                    VertexKey::Edge { edge, .. } => *edge == e,
                    VertexKey::Face { face, .. } => *face == quad.f1 || *face == quad.f2,
                };
                if !in_quad {
                    map[i] = old;
                }
            }
        }
        for f in [new_quad.f1, new_quad.f2] {
            let corners = flipped.faces[f].corners;
            let mut roles = [0; 3];
            for c in 0..3 {
                roles[c] = role_of(corners[c]).ok_or_else(|| {
                    Error::FlipNotAllowed("quadrilateral has repeated corners".into())
                })?;
            }
            for (w, v) in new.face_points(f) {
                let sq = square_coords(roles, w);
                let old = *by_square.get(&sq).ok_or_else(|| {
                    Error::FlipNotAllowed(format!("no matching vertex at {sq:?}"))
                })?;
                map[v] = old;
            }
        }
        if map.contains(&usize::MAX) {
            return Err(Error::FlipNotAllowed("vertex identification incomplete".into()));
        }
        Ok((new, map))
    }

    /// The staged mutation sequence `V^{(0)}, …, V^{(n−2)}` realizing the flip at `e`.
    ///
    /// In the square picture `e` is the line `x = y` and the flipped edge is
    /// `x + y = n`. With `d_hori = |x − y|` and `d_vert = |x + y − n|`, stage `i` is
    /// `{d_hori ≤ i, d_hori ≡ i, d_vert ≤ n−2−i, d_vert ≡ n−2−i (mod 2)}`, ordered
    /// lexicographically by `(x, y)`.
    pub fn flip_mutation_sequence(&self, e: usize) -> Result<Vec<Vec<usize>>> {
        let quad = self.surface.quadrilateral(e)?;
        let n = self.n as i64;
        let mut pts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for (f, roles) in [(quad.f1, quad.roles1), (quad.f2, quad.roles2)] {
            for (w, v) in self.face_points(f) {
                pts.insert(square_coords(roles, w), v);
            }
        }
        let mut stages = vec![Vec::new(); self.n - 1];
        for (i, stage) in stages.iter_mut().enumerate() {
            let i = i as i64;
            for (&(x, y), &v) in &pts {
                let dv = (x + y - n).abs();
                let dh = (x - y).abs();
                if dh <= i && (dh - i) % 2 == 0 && dv <= n - 2 - i && (dv - (n - 2 - i)) % 2 == 0 {
                    stage.push(v);
                }
            }
        }
        Ok(stages)
    }

    /// Cuts along internal edge `e`; returns the cut lattice and `pr[cut] = original`.
    pub fn cut(&self, e: usize) -> Result<(Lattice, Vec<usize>)> {
        let cut_surface = self.surface.cut(e)?;
        let cut = Lattice::new(&cut_surface, self.n)?;
        let copy = self.surface.edges.len();
        let pr = cut
            .keys
            .iter()
            .map(|k| {
                let orig = match k {
                    VertexKey::Edge { edge, pos } if *edge == copy => VertexKey::Edge { edge: e, pos: *pos },
                    other => other.clone(),
                };
                self.index[&orig]
            })
            .collect();
        Ok((cut, pr))
    }

    /// Identifies this lattice's vertices with those of `other`, a lattice over a
    /// triangulation of the same polygon with the same diagonals (ids may differ):
    /// returns `map[v_other] = v_self`. Matching uses marked points, so it needs
    /// surfaces without repeated corners.
    pub fn match_vertices(&self, other: &Lattice) -> Option<Vec<usize>> {
        let sig = |lat: &Lattice, v: usize| -> Vec<(usize, usize)> {
            // Weight per marked point of any face containing the vertex.
            let f = lat.faces_of(v)[0];
            let face = &lat.surface.faces[f];
            let (w, _) = lat.face_points(f).find(|(_, x)| *x == v).expect("vertex on face");
            let mut s: Vec<(usize, usize)> = (0..3)
                .filter(|&c| w[c] > 0)
                .map(|c| (face.corners[c], w[c] as usize))
                .collect();
            s.sort_unstable();
            s
        };
        if self.n != other.n || self.len() != other.len() {
            return None;
        }
        let mine: HashMap<Vec<(usize, usize)>, usize> =
            (0..self.len()).map(|v| (sig(self, v), v)).collect();
        (0..other.len()).map(|v| mine.get(&sig(other, v)).copied()).collect()
    }

    /// Graphviz rendering of the quiver.
    pub fn to_dot(&self) -> String {
        self.seed.to_dot("quiver")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_sizes() {
        assert!(matches!(build_polygon(2), Err(Error::PolygonTooSmall(2))));
        let p4 = build_polygon(4).unwrap();
        let labels: BTreeSet<_> = p4.edges().iter().map(|e| e.label.clone()).collect();
        assert_eq!(labels, ["e2", "e3", "e4", "e5"].iter().map(|s| s.to_string()).collect());
        let t = triangulate_polygon(&build_polygon(3).unwrap(), &[]).unwrap();
        assert_eq!(t.faces().len(), 1);
    }

    #[test]
    fn pentagon_has_five_triangulations() {
        let p5 = build_polygon(5).unwrap();
        let diags: Vec<(usize, usize)> = (0..5)
            .flat_map(|a| (a + 2..5).map(move |b| (a, b)))
            .filter(|&(a, b)| !(a == 0 && b == 4))
            .collect();
        let mut count = 0;
        for i in 0..diags.len() {
            for j in i + 1..diags.len() {
                if triangulate_polygon(&p5, &[diags[i], diags[j]]).is_ok() {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 5);
    }

    #[test]
    fn crossing_diagonals_rejected() {
        let p4 = build_polygon(4).unwrap();
        let p5 = build_polygon(5).unwrap();
        assert!(triangulate_polygon(&p4, &[]).is_err());
        assert!(triangulate_polygon(&p5, &[(0, 2), (1, 3)]).is_err());
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(Lattice::new(&p4(false), 3).unwrap().len(), 12);
        assert_eq!(Lattice::new(&p4(false), 4).unwrap().len(), 21);
        let tri = triangulate_polygon(&build_polygon(3).unwrap(), &[]).unwrap();
        let lat = Lattice::new(&tri, 2).unwrap();
        assert_eq!(lat.len(), 3);
        assert_eq!(lat.seed().mutable_indices().count(), 0);
    }

    #[test]
    fn n2_triangle_quiver_is_oriented_cycle_of_weight_one() {
        let tri = triangulate_polygon(&build_polygon(3).unwrap(), &[]).unwrap();
        let lat = Lattice::new(&tri, 2).unwrap();
        let s = lat.seed();
        for u in 0..3 {
            let out: Vec<i64> = (0..3).map(|v| s.two_q(u, v)).filter(|&x| x != 0).collect();
            let mut out = out;
            out.sort();
            assert_eq!(out, vec![-2, 2]);
        }
    }

    #[test]
    fn half_arrows_cancel_on_internal_edges() {
        for n in 2..=4 {
            let lat = Lattice::new(&p4(false), n).unwrap();
            let d = lat.surface().edge_by_label("d13").unwrap();
            let vs = lat.edge_vertices(d);
            for w in vs.windows(2) {
                assert_eq!(lat.seed().two_q(w[0], w[1]), 0);
            }
        }
    }

    #[test]
    fn h_agrees_with_q_at_interior_vertices() {
        let lat = Lattice::new(&p4(false), 4).unwrap();
        for v in 0..lat.len() {
            for k in lat.seed().mutable_indices() {
                assert_eq!(lat.h_matrix()[v][k] * 2, lat.seed().two_q(v, k));
            }
        }
    }

    #[test]
    fn flip_p4_and_back() {
        let lam = p4(false);
        let d = lam.edge_by_label("d13").unwrap();
        let flipped = lam.flip(d).unwrap();
        let lam_p = p4(true);
        let ends: BTreeSet<usize> = flipped.edges()[d].ends.into_iter().collect();
        assert_eq!(ends, BTreeSet::from([0, 2]));
        assert_eq!(flipped.faces().len(), lam_p.faces().len());
        assert_eq!(flipped.flip(d).unwrap().edges()[d].ends.iter().collect::<BTreeSet<_>>(), BTreeSet::from([&1, &3]));
    }

    #[test]
    fn stage_sizes() {
        for n in 2..=5 {
            let lat = Lattice::new(&p4(false), n).unwrap();
            let d = lat.surface().edge_by_label("d13").unwrap();
            let st = lat.flip_mutation_sequence(d).unwrap();
            let sizes: Vec<usize> = st.iter().map(Vec::len).collect();
            let expect: Vec<usize> = (0..n - 1).map(|i| (i + 1) * (n - 1 - i)).collect();
            assert_eq!(sizes, expect);
            assert_eq!(sizes.iter().sum::<usize>(), (n * n * n - n) / 6);
        }
    }

    #[test]
    fn cut_p4_gives_two_triangles() {
        let lat = Lattice::new(&p4(true), 3).unwrap();
        let d = lat.surface().edge_by_label("d02").unwrap();
        let (cut, pr) = lat.cut(d).unwrap();
        assert_eq!(cut.surface().components().len(), 2);
        assert_eq!(cut.len(), lat.len() + 2);
        let mut mult = vec![0; lat.len()];
        for &p in &pr {
            mult[p] += 1;
        }
        let on_edge = lat.edge_vertices(d);
        for v in 0..lat.len() {
            assert_eq!(mult[v], if on_edge.contains(&v) { 2 } else { 1 });
        }
    }

    #[test]
    fn json_round_trip() {
        let s = p4(false);
        let back = TriSurface::from_json(&s.to_json()).unwrap();
        let a = Lattice::new(&s, 3).unwrap();
        let b = Lattice::new(&back, 3).unwrap();
        assert_eq!(a.seed().two_q_matrix(), b.seed().two_q_matrix());
    }
}
