//! Left-turn directed networks dual to n-triangulations of polygons.
//!
//! Dual vertices sit in the small up-triangles (`U`, oriented like their big face),
//! the small down-triangles (`D`), and on every small edge of the boundary. Each dual
//! edge crosses exactly one small edge. Every face has a distinguished *out-side*:
//! a dual edge crossing a small edge parallel to the out-side runs `U → D` (or out of
//! the face), and one crossing a small edge parallel to either other side runs
//! `D → U` (or into the face). Hence `U` is 2-in/1-out and `D` is 1-in/2-out.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::balance::ExponentVector;
use crate::error::{Error, Result};
use crate::surface::{Lattice, TriSurface};

/// A vertex of the dual network.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DualVertex {
    /// Up-triangle with corners `base + e_c`.
    Up { face: usize, base: [usize; 3] },
    /// Down-triangle with corners `base + (1,1,1) − e_c`.
    Down { face: usize, base: [usize; 3] },
    /// The `idx`-th small edge (0-based from `ends[0]`) of a boundary edge.
    Boundary { edge: usize, idx: usize },
}

/// A directed dual edge; `mid` is the midpoint of the small edge it crosses.
#[derive(Clone, Debug, Serialize)]
pub struct NetEdge {
    pub tail: usize,
    pub head: usize,
    pub mid: [i64; 2],
}

/// A directed path, as a list of edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetPath {
    pub edges: Vec<usize>,
}

impl NetPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A left-turn network with its source (`α`) and sink (`β`) labels.
#[derive(Clone, Debug)]
pub struct Network {
    vertices: Vec<DualVertex>,
    points: Vec<[i64; 2]>,
    edges: Vec<NetEdge>,
    out_edges: Vec<Vec<usize>>,
    in_degree: Vec<usize>,
    out_side: Vec<usize>,
    source_edge: usize,
    sink_edge: usize,
    sources: Vec<usize>,
    sinks: Vec<usize>,
    corner: usize,
}

/// Out-sides for every face: the face carrying `sink_edge` points out through it and
/// every other face points toward it along the dual tree. Faces in other components
/// are rooted at their first boundary side.
pub fn rooted_out_assignment(s: &TriSurface, sink_edge: usize) -> Result<Vec<usize>> {
    let nf = s.faces().len();
    let mut out = vec![usize::MAX; nf];
    let mut roots: Vec<(usize, usize)> = Vec::new();
    let (root, slot) = *s
        .slots_of(sink_edge)
        .first()
        .ok_or_else(|| Error::InconsistentOutAssignment(format!("edge {sink_edge} has no face")))?;
    if !s.edges()[sink_edge].boundary {
        return Err(Error::InconsistentOutAssignment("sink edge must be a boundary edge".into()));
    }
    roots.push((root, slot));
    for comp in s.components() {
        if comp.contains(&root) {
            continue;
        }
        let f = comp[0];
        let slot = (0..3)
            .find(|&sl| s.edges()[s.faces()[f].sides[sl]].boundary)
            .unwrap_or(0);
        roots.push((f, slot));
    }
    for (root, slot) in roots {
        out[root] = slot;
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            for sl in 0..3 {
                let e = s.faces()[f].sides[sl];
                if s.edges()[e].boundary {
                    continue;
                }
                for (g, gs) in s.slots_of(e) {
                    if g != f && out[g] == usize::MAX {
                        out[g] = gs;
                        queue.push_back(g);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn add3(a: [usize; 3], c: usize) -> [i64; 3] {
    let mut w = [a[0] as i64, a[1] as i64, a[2] as i64];
    w[c] += 1;
    w
}

/// Position (0..n) along an edge of the point `w` on face side `s`.
fn pos_on_side(forward: bool, s: usize, w: [i64; 3]) -> i64 {
    if forward {
        w[(s + 1) % 3]
    } else {
        w[s]
    }
}

impl Network {
    /// Builds the network for a corner arc from `source_edge` to `sink_edge`, two
    /// boundary edges meeting at a marked point, with the source leaving that point and
    /// the sink arriving at it in counterclockwise boundary order (a left turn).
    pub fn corner(lat: &Lattice, source_edge: usize, sink_edge: usize) -> Result<Network> {
        let out = rooted_out_assignment(lat.surface(), sink_edge)?;
        Self::build_left_network(lat, &out, source_edge, sink_edge)
    }

    /// Builds the network for an explicit out-assignment (`out[face]` = slot).
    pub fn build_left_network(
        lat: &Lattice,
        out: &[usize],
        source_edge: usize,
        sink_edge: usize,
    ) -> Result<Network> {
        let s = lat.surface();
        let n = lat.n();
        if out.len() != s.faces().len() || out.iter().any(|&o| o > 2) {
            return Err(Error::InconsistentOutAssignment("one out-side per face required".into()));
        }
        for e in 0..s.edges().len() {
            if s.edges()[e].boundary {
                continue;
            }
            let outs = s
                .slots_of(e)
                .iter()
                .filter(|(f, sl)| out[*f] == *sl)
                .count();
            if outs != 1 {
                return Err(Error::InconsistentOutAssignment(format!(
                    "internal edge {} is the out-side of {outs} faces",
                    s.edges()[e].label
                )));
            }
        }
        let (src_from, src_to) = s
            .boundary_ccw(source_edge)
            .ok_or_else(|| Error::UnsupportedArc("source must be a boundary edge".into()))?;
        let (snk_from, snk_to) = s
            .boundary_ccw(sink_edge)
            .ok_or_else(|| Error::UnsupportedArc("sink must be a boundary edge".into()))?;
        let _ = (src_to, snk_from);
        if src_from != snk_to {
            return Err(Error::UnsupportedArc(format!(
                "edges {} and {} do not form a left turn at a common corner",
                s.edges()[source_edge].label,
                s.edges()[sink_edge].label
            )));
        }
        if out[s.slots_of(sink_edge)[0].0] != s.slots_of(sink_edge)[0].1 {
            return Err(Error::InconsistentOutAssignment("sink edge must be an out-side".into()));
        }
        let corner = src_from;

        let mut index: HashMap<DualVertex, usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut points = Vec::new();
        let mut intern = |v: DualVertex, p: [i64; 2], vertices: &mut Vec<DualVertex>, points: &mut Vec<[i64; 2]>| -> usize {
            *index.entry(v.clone()).or_insert_with(|| {
                vertices.push(v);
                points.push(p);
                vertices.len() - 1
            })
        };
        let planar = |f: usize, w: [i64; 3]| -> Result<[i64; 2]> {
            lat.planar(f, w)
                .ok_or_else(|| Error::DegenerateGeometry("surface has no planar embedding".into()))
        };
        let centroid = |ps: [[i64; 2]; 3]| [(ps[0][0] + ps[1][0] + ps[2][0]) / 3, (ps[0][1] + ps[1][1] + ps[2][1]) / 3];
        let mid = |a: [i64; 2], b: [i64; 2]| [(a[0] + b[0]) / 2, (a[1] + b[1]) / 2];

        let mut edges: Vec<NetEdge> = Vec::new();
        // Small edges on face sides, waiting for their partner across an internal edge:
        // (edge, idx) → (U vertex, is-out, midpoint).
        let mut pending: HashMap<(usize, i64), (usize, bool, [i64; 2])> = HashMap::new();
        for f in 0..s.faces().len() {
            let face = &s.faces()[f];
            let o = out[f];
            for a0 in 0..n {
                for a1 in 0..n - a0 {
                    let a = [a0, a1, n - 1 - a0 - a1];
                    let corners = [add3(a, 0), add3(a, 1), add3(a, 2)];
                    let ps = [planar(f, corners[0])?, planar(f, corners[1])?, planar(f, corners[2])?];
                    let u = intern(DualVertex::Up { face: f, base: a }, centroid(ps), &mut vertices, &mut points);
                    for c in 0..3 {
                        // Side of U opposite its corner c: constant coordinate c, parallel
                        // to face side (c + 1) mod 3.
                        let (p, q) = ((c + 1) % 3, (c + 2) % 3);
                        let m = mid(ps[p], ps[q]);
                        let parallel = (c + 1) % 3;
                        let is_out = parallel == o;
                        if a[c] >= 1 {
                            let mut b = a;
                            b[c] -= 1;
                            let dc = [
                                planar(f, [b[0] as i64, b[1] as i64 + 1, b[2] as i64 + 1])?,
                                planar(f, [b[0] as i64 + 1, b[1] as i64, b[2] as i64 + 1])?,
                                planar(f, [b[0] as i64 + 1, b[1] as i64 + 1, b[2] as i64])?,
                            ];
                            let d = intern(DualVertex::Down { face: f, base: b }, centroid(dc), &mut vertices, &mut points);
                            let (tail, head) = if is_out { (u, d) } else { (d, u) };
                            edges.push(NetEdge { tail, head, mid: m });
                        } else {
                            let side = parallel;
                            let e = face.sides[side];
                            let p1 = pos_on_side(face.forward[side], side, corners[p]);
                            let p2 = pos_on_side(face.forward[side], side, corners[q]);
                            let idx = p1.min(p2);
                            if s.edges()[e].boundary {
                                let bv = intern(DualVertex::Boundary { edge: e, idx: idx as usize }, m, &mut vertices, &mut points);
                                let (tail, head) = if is_out { (u, bv) } else { (bv, u) };
                                edges.push(NetEdge { tail, head, mid: m });
                            } else if let Some((u2, out2, _)) = pending.remove(&(e, idx)) {
                                if out2 == is_out {
                                    return Err(Error::InconsistentOutAssignment(format!(
                                        "edge {} oriented both ways",
                                        s.edges()[e].label
                                    )));
                                }
                                let (tail, head) = if is_out { (u, u2) } else { (u2, u) };
                                edges.push(NetEdge { tail, head, mid: m });
                            } else {
                                pending.insert((e, idx), (u, is_out, m));
                            }
                        }
                    }
                }
            }
        }
        if !pending.is_empty() {
            return Err(Error::InvalidSurface("unmatched small edges across a gluing".into()));
        }
        // Deterministic edge order: by (tail, head) vertex keys.
        edges.sort_by(|x, y| {
            (&vertices[x.tail], &vertices[x.head]).cmp(&(&vertices[y.tail], &vertices[y.head]))
        });
        let nv = vertices.len();
        let mut out_edges = vec![Vec::new(); nv];
        let mut in_degree = vec![0; nv];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.tail].push(i);
            in_degree[e.head] += 1;
        }
        let boundary_vertex = |e: usize, i: usize, from_corner: bool| -> usize {
            // i is 1-based counted from the corner.
            let starts_at_corner = s.edges()[e].ends[0] == corner;
            let idx = if starts_at_corner == from_corner { i - 1 } else { n - i };
            index[&DualVertex::Boundary { edge: e, idx }]
        };
        let sources = (1..=n).map(|i| boundary_vertex(source_edge, i, true)).collect();
        let sinks = (1..=n).map(|j| boundary_vertex(sink_edge, j, true)).collect();
        let net = Network {
            vertices,
            points,
            edges,
            out_edges,
            in_degree,
            out_side: out.to_vec(),
            source_edge,
            sink_edge,
            sources,
            sinks,
            corner,
        };
        if !net.is_acyclic() {
            return Err(Error::InconsistentOutAssignment("network has a directed cycle".into()));
        }
        Ok(net)
    }

    pub fn vertices(&self) -> &[DualVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[NetEdge] {
        &self.edges
    }

    pub fn out_sides(&self) -> &[usize] {
        &self.out_side
    }

    pub fn source_edge(&self) -> usize {
        self.source_edge
    }

    pub fn sink_edge(&self) -> usize {
        self.sink_edge
    }

    /// The marked point the arc turns around.
    pub fn corner_point(&self) -> usize {
        self.corner
    }

    /// `α_i` (1-based), counted from the corner.
    pub fn source(&self, i: usize) -> usize {
        self.sources[i - 1]
    }

    /// `β_j` (1-based), counted from the corner.
    pub fn sink(&self, j: usize) -> usize {
        self.sinks[j - 1]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_degree[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_edges[v].len()
    }

    /// Kahn's algorithm.
    pub fn is_acyclic(&self) -> bool {
        let mut indeg = self.in_degree.clone();
        let mut queue: VecDeque<usize> = (0..self.vertices.len()).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for &e in &self.out_edges[v] {
                let h = self.edges[e].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    queue.push_back(h);
                }
            }
        }
        seen == self.vertices.len()
    }

    /// `U` vertices are 2-in/1-out, `D` vertices 1-in/2-out, boundary vertices have
    /// a single incident edge.
    pub fn degree_pattern_holds(&self) -> bool {
        self.vertices.iter().enumerate().all(|(v, kind)| {
            let (i, o) = (self.in_degree[v], self.out_edges[v].len());
            match kind {
                DualVertex::Up { .. } => (i, o) == (2, 1),
                DualVertex::Down { .. } => (i, o) == (1, 2),
                DualVertex::Boundary { .. } => i + o == 1,
            }
        })
    }

    /// All paths `α_i → β_j`, in lexicographic order of edge ids.
    pub fn enumerate_paths(&self, i: usize, j: usize) -> Vec<NetPath> {
        let n = self.sources.len();
        if i == 0 || j == 0 || i > n || j > n {
            return Vec::new();
        }
        let target = self.sink(j);
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.dfs(self.source(i), target, &mut stack, &mut out);
        out
    }

    fn dfs(&self, v: usize, target: usize, stack: &mut Vec<usize>, out: &mut Vec<NetPath>) {
        if v == target {
            out.push(NetPath { edges: stack.clone() });
            return;
        }
        for &e in &self.out_edges[v] {
            stack.push(e);
            self.dfs(self.edges[e].head, target, stack, out);
            stack.pop();
        }
    }

    /// Number of paths `α_i → β_j` (dynamic programming, no enumeration).
    pub fn count_paths(&self, i: usize, j: usize) -> u128 {
        let mut memo = vec![None; self.vertices.len()];
        self.count_from(self.source(i), self.sink(j), &mut memo)
    }

    fn count_from(&self, v: usize, target: usize, memo: &mut Vec<Option<u128>>) -> u128 {
        if v == target {
            return 1;
        }
        if let Some(c) = memo[v] {
            return c;
        }
        let c = self.out_edges[v]
            .iter()
            .map(|&e| self.count_from(self.edges[e].head, target, memo))
            .sum();
        memo[v] = Some(c);
        c
    }

    /// The planar polyline of a path: vertex points joined through the midpoints of
    /// the crossed small edges.
    pub fn polyline(&self, p: &NetPath) -> Vec<[i64; 2]> {
        let mut pts: Vec<[i64; 2]> = Vec::new();
        let mut push = |q: [i64; 2]| {
            if pts.last() != Some(&q) {
                pts.push(q);
            }
        };
        for &e in &p.edges {
            let ed = &self.edges[e];
            push(self.points[ed.tail]);
            push(ed.mid);
            push(self.points[ed.head]);
        }
        pts
    }

    /// Marked points of the source-edge component's boundary, counterclockwise, as
    /// the list of boundary edges from the sink edge around to the source edge.
    fn closing_edges(&self, s: &TriSurface) -> Result<Vec<usize>> {
        let mut chain = vec![self.sink_edge];
        let mut cur = self.sink_edge;
        let limit = s.edges().len() + 1;
        while cur != self.source_edge {
            let (_, to) = s.boundary_ccw(cur).expect("boundary edge");
            cur = (0..s.edges().len())
                .find(|&e| s.edges()[e].boundary && s.boundary_ccw(e).map(|x| x.0) == Some(to))
                .ok_or_else(|| Error::DegenerateGeometry("boundary is not a cycle".into()))?;
            chain.push(cur);
            if chain.len() > limit {
                return Err(Error::DegenerateGeometry("boundary walk does not close".into()));
            }
        }
        Ok(chain)
    }

    /// Indicator of the lattice vertices strictly to the left of `p`.
    ///
    /// The path is closed into a loop by running from its sink endpoint outward, around
    /// the boundary (pushed outward by a factor 2 about the component's barycenter) in
    /// counterclockwise order to the source edge, and back in; the left region is then
    /// exactly the set of points with winding number one.
    pub fn left_exponent(&self, p: &NetPath, lat: &Lattice) -> Result<ExponentVector> {
        let s = lat.surface();
        let coords = s
            .coords()
            .ok_or_else(|| Error::DegenerateGeometry("surface has no planar embedding".into()))?;
        let scale = crate::surface::POSITION_SCALE * lat.n() as i64;
        let comps = s.components();
        let src_face = s.slots_of(self.source_edge)[0].0;
        let comp = comps.iter().find(|c| c.contains(&src_face)).expect("component");
        let mut marked: Vec<usize> = comp.iter().flat_map(|&f| s.faces()[f].corners).collect();
        marked.sort_unstable();
        marked.dedup();
        let m = marked.len() as i64;
        let center = marked.iter().fold([0i64; 2], |acc, &p| {
            [acc[0] + scale * coords[p][0], acc[1] + scale * coords[p][1]]
        });
        // Everything below is multiplied by m so that the center is integral.
        let up = |q: [i64; 2]| [m * q[0], m * q[1]];
        let push_out = |q: [i64; 2]| [2 * m * q[0] - center[0], 2 * m * q[1] - center[1]];

        let line = self.polyline(p);
        let mut lp: Vec<[i64; 2]> = line.iter().map(|&q| up(q)).collect();
        let a = *line.first().ok_or_else(|| Error::DegenerateGeometry("empty path".into()))?;
        let b = *line.last().expect("nonempty");
        lp.push(push_out(b));
        let chain = self.closing_edges(s)?;
        for &e in &chain[..chain.len() - 1] {
            let (_, to) = s.boundary_ccw(e).expect("boundary edge");
            lp.push(push_out([scale * coords[to][0], scale * coords[to][1]]));
        }
        lp.push(push_out(a));

        let positions = lat
            .vertex_positions()
            .ok_or_else(|| Error::DegenerateGeometry("surface has no planar embedding".into()))?;
        let mut k = ExponentVector::zeros(lat.len());
        for v in 0..lat.len() {
            if !lat.faces_of(v).iter().any(|f| comp.contains(f)) {
                continue;
            }
            let pt = up(positions[v]);
            match winding(&lp, pt) {
                None => {
                    return Err(Error::DegenerateGeometry(format!(
                        "vertex {} lies on the closed path",
                        lat.seed().vertices()[v]
                    )))
                }
                Some(0) => {}
                Some(1) => k[v] = 1,
                Some(w) => {
                    return Err(Error::DegenerateGeometry(format!("winding number {w} around a vertex")))
                }
            }
        }
        Ok(k)
    }

    /// Graphviz rendering with `α`/`β` labels.
    pub fn to_dot(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("digraph network {\n");
        for (v, kind) in self.vertices.iter().enumerate() {
            let label = if let Some(i) = self.sources.iter().position(|&x| x == v) {
                format!("α{}", i + 1)
            } else if let Some(j) = self.sinks.iter().position(|&x| x == v) {
                format!("β{}", j + 1)
            } else {
                match kind {
                    DualVertex::Up { .. } => "U".into(),
                    DualVertex::Down { .. } => "D".into(),
                    DualVertex::Boundary { .. } => "·".into(),
                }
            };
            let [x, y] = self.points[v];
            let _ = writeln!(s, "  v{v} [label=\"{label}\", pos=\"{x},{y}!\"];");
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -> v{};", e.tail, e.head);
        }
        s.push_str("}\n");
        s
    }
}

fn cross(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// Winding number of the closed polyline around `pt`; `None` if `pt` is on it.
fn winding(poly: &[[i64; 2]], pt: [i64; 2]) -> Option<i64> {
    let mut w = 0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let c = cross(a, b, pt);
        let within = |lo: i64, hi: i64, x: i64| lo.min(hi) <= x && x <= lo.max(hi);
        if c == 0 && within(a[0], b[0], pt[0]) && within(a[1], b[1], pt[1]) {
            return None;
        }
        if a[1] <= pt[1] {
            if b[1] > pt[1] && c > 0 {
                w += 1;
            }
        } else if b[1] <= pt[1] && c < 0 {
            w -= 1;
        }
    }
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_polygon, p4, triangulate_polygon};

    fn triangle(n: usize) -> Lattice {
        Lattice::new(&triangulate_polygon(&build_polygon(3).unwrap(), &[]).unwrap(), n).unwrap()
    }

    /// Corner 0 of a triangle: source side (0,1) = e1, sink side (2,0) = e3.
    fn corner0(lat: &Lattice) -> Network {
        let s = lat.surface();
        Network::corner(lat, s.edge_by_label("e1").unwrap(), s.edge_by_label("e3").unwrap()).unwrap()
    }

    #[test]
    fn winding_basics() {
        let sq = [[0, 0], [4, 0], [4, 4], [0, 4]];
        assert_eq!(winding(&sq, [1, 1]), Some(1));
        assert_eq!(winding(&sq, [5, 1]), Some(0));
        assert_eq!(winding(&sq, [4, 2]), None);
    }

    #[test]
    fn triangle_n2_paths() {
        let lat = triangle(2);
        let net = corner0(&lat);
        let kinds = |f: fn(&DualVertex) -> bool| net.vertices().iter().filter(|v| f(v)).count();
        assert_eq!(kinds(|v| matches!(v, DualVertex::Up { .. })), 3);
        assert_eq!(kinds(|v| matches!(v, DualVertex::Down { .. })), 1);
        assert!(net.degree_pattern_holds());
        assert!(net.is_acyclic());
        assert_eq!(net.enumerate_paths(1, 1).len(), 1);
        assert_eq!(net.enumerate_paths(2, 2).len(), 1);
        assert_eq!(net.enumerate_paths(2, 1).len(), 1);
        assert_eq!(net.enumerate_paths(1, 2).len(), 0);
    }

    #[test]
    fn triangle_n2_left_exponents() {
        let lat = triangle(2);
        let net = corner0(&lat);
        let p11 = &net.enumerate_paths(1, 1)[0];
        assert!(net.left_exponent(p11, &lat).unwrap().is_zero());
        let p22 = &net.enumerate_paths(2, 2)[0];
        let k = net.left_exponent(p22, &lat).unwrap();
        let s = lat.surface();
        for (name, expect) in [("e1", 1), ("e3", 1), ("e2", 0)] {
            let v = lat.edge_vertices(s.edge_by_label(name).unwrap())[0];
            assert_eq!(k[v], expect, "midpoint of {name}");
        }
    }

    #[test]
    fn p4_lambda_diagonal_points_into_lower_left_face() {
        let lat = Lattice::new(&p4(false), 4).unwrap();
        let s = lat.surface();
        let net = Network::corner(&lat, s.edge_by_label("e2").unwrap(), s.edge_by_label("e3").unwrap()).unwrap();
        // The lower-left face contains marked point 0.
        let ll = (0..2).find(|&f| s.faces()[f].corners.contains(&0)).unwrap();
        let d = s.edge_by_label("d13").unwrap();
        let mut crossing = 0;
        for e in net.edges() {
            let (t, h) = (&net.vertices()[e.tail], &net.vertices()[e.head]);
            if let (DualVertex::Up { face: ft, .. }, DualVertex::Up { face: fh, .. }) = (t, h) {
                if ft != fh {
                    crossing += 1;
                    assert_eq!(*fh, ll);
                }
            }
        }
        assert_eq!(crossing, 4);
        let _ = d;
    }

    #[test]
    fn inconsistent_out_assignment_rejected() {
        let lat = Lattice::new(&p4(false), 2).unwrap();
        let s = lat.surface();
        let d = s.edge_by_label("d13").unwrap();
        let out: Vec<usize> = (0..2).map(|f| s.slots_of(d).iter().find(|x| x.0 == f).unwrap().1).collect();
        let r = Network::build_left_network(&lat, &out, s.edge_by_label("e2").unwrap(), s.edge_by_label("e3").unwrap());
        assert!(matches!(r, Err(Error::InconsistentOutAssignment(_))));
    }
}
