//! Finite Cayley balls with labeled edges, distances and geodesics.

mod escape;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use escape::{escape_constant, EscapeOracle, EscapeResult, LinearEscape, ProbeEscape};

use crate::error::{Error, Result};
use crate::group::{GeneratingSet, Group, GroupElement};

/// Marker for a missing neighbor or edge.
pub const NONE: u32 = u32::MAX;

pub const DEFAULT_VERTEX_CAP: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: u32,
    pub gen: usize,
    pub dst: u32,
}

/// `B_radius(center)` in the right Cayley graph: edges join `x` and `x·s`.
///
/// Vertices are numbered in BFS order (layer, then discovery by generator
/// order). Each undirected edge is stored once, labeled by the generator at
/// its lower-numbered endpoint; `edge_at(v, s)` finds it from either side.
#[derive(Debug, Clone)]
pub struct Ball {
    group: Group,
    gens: GeneratingSet,
    center: GroupElement,
    radius: u32,
    vertices: Vec<GroupElement>,
    index: HashMap<GroupElement, u32>,
    dist: Vec<u32>,
    nbr: Vec<u32>,
    edge_at: Vec<u32>,
    edges: Vec<Edge>,
}

impl Ball {
    pub fn build(group: &Group, gens: &GeneratingSet, center: &GroupElement, radius: u32) -> Result<Self> {
        Self::build_capped(group, gens, center, radius, DEFAULT_VERTEX_CAP)
    }

    pub fn build_capped(
        group: &Group,
        gens: &GeneratingSet,
        center: &GroupElement,
        radius: u32,
        cap: usize,
    ) -> Result<Self> {
        group.check(center)?;
        for s in gens.elements() {
            group.check(s)?;
        }
        if let Some(size) = predicted_ball_size(group, gens, radius) {
            if size > cap as u128 {
                return Err(Error::CapExceeded { cap, reached: size.min(usize::MAX as u128) as usize, radius });
            }
        }
        let ns = gens.len();
        let mut vertices = vec![center.clone()];
        let mut index = HashMap::from([(center.clone(), 0u32)]);
        let mut dist = vec![0u32];
        let mut layer_start = 0;
        for r in 1..=radius {
            let layer_end = vertices.len();
            for v in layer_start..layer_end {
                for s in gens.elements() {
                    let w = group.mul(&vertices[v], s)?;
                    if !index.contains_key(&w) {
                        if vertices.len() >= cap {
                            return Err(Error::CapExceeded { cap, reached: vertices.len(), radius: r });
                        }
                        index.insert(w.clone(), vertices.len() as u32);
                        vertices.push(w);
                        dist.push(r);
                    }
                }
            }
            if vertices.len() == layer_end {
                break;
            }
            layer_start = layer_end;
        }

        let n = vertices.len();
        let mut nbr = vec![NONE; n * ns];
        for v in 0..n {
            for (si, s) in gens.elements().iter().enumerate() {
                let w = group.mul(&vertices[v], s)?;
                nbr[v * ns + si] = index.get(&w).copied().unwrap_or(NONE);
            }
        }
        let mut edge_at = vec![NONE; n * ns];
        let mut edges = Vec::new();
        for v in 0..n {
            for si in 0..ns {
                let w = nbr[v * ns + si];
                if w == NONE || edge_at[v * ns + si] != NONE {
                    continue;
                }
                let id = edges.len() as u32;
                edges.push(Edge { src: v as u32, gen: si, dst: w });
                edge_at[v * ns + si] = id;
                edge_at[w as usize * ns + gens.inverse_of(si)] = id;
            }
        }
        Ok(Ball {
            group: group.clone(),
            gens: gens.clone(),
            center: center.clone(),
            radius,
            vertices,
            index,
            dist,
            nbr,
            edge_at,
            edges,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn gens(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn center(&self) -> &GroupElement {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, v: u32) -> &GroupElement {
        &self.vertices[v as usize]
    }

    pub fn vertices(&self) -> &[GroupElement] {
        &self.vertices
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<u32> {
        self.index.get(g).copied()
    }

    /// Distance from the center.
    pub fn dist(&self, v: u32) -> u32 {
        self.dist[v as usize]
    }

    /// `v·s` if inside the ball, else [`NONE`].
    #[inline]
    pub fn nbr(&self, v: u32, s: usize) -> u32 {
        self.nbr[v as usize * self.gens.len() + s]
    }

    /// The edge labeled `s` at `v`, else [`NONE`].
    #[inline]
    pub fn edge_at(&self, v: u32, s: usize) -> u32 {
        self.edge_at[v as usize * self.gens.len() + s]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: u32) -> Edge {
        self.edges[e as usize]
    }

    /// Whether all `|S|` edges at `v` lie in the ball.
    pub fn is_full(&self, v: u32) -> bool {
        (0..self.gens.len()).all(|s| self.nbr(v, s) != NONE)
    }

    /// `vertex(v)·g`, if it lies in the ball.
    pub fn translate(&self, v: u32, g: &GroupElement) -> Option<u32> {
        let w = self.group.mul(self.vertex(v), g).ok()?;
        self.index_of(&w)
    }

    /// Vertices at distance exactly `r` from the center.
    pub fn sphere(&self, r: u32) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(move |&v| self.dist(v) == r)
    }

    /// All geodesics from `u` to `v` in lexicographic generator order, at
    /// most `limit` of them. The first is the canonical geodesic.
    pub fn geodesics_between(&self, u: u32, v: u32, limit: usize) -> Result<Vec<Geodesic>> {
        let mut bfs = Bfs::new(self.len());
        bfs.run(self, &[v], self.radius * 2);
        let d = bfs.dist(u).ok_or(Error::BoundaryRisk { distance: u32::MAX, radius: self.radius })?;
        if d + self.dist(u).max(self.dist(v)) > self.radius {
            return Err(Error::BoundaryRisk { distance: d, radius: self.radius });
        }
        let mut out = Vec::new();
        let mut path = Geodesic { vertices: vec![u], gens: Vec::new() };
        self.enumerate_geodesics(&bfs, &mut path, limit, &mut out);
        Ok(out)
    }

    fn enumerate_geodesics(&self, to_target: &Bfs, path: &mut Geodesic, limit: usize, out: &mut Vec<Geodesic>) {
        if out.len() >= limit {
            return;
        }
        let x = *path.vertices.last().expect("nonempty");
        let dx = to_target.dist(x).expect("on a geodesic");
        if dx == 0 {
            out.push(path.clone());
            return;
        }
        for s in 0..self.gens.len() {
            let w = self.nbr(x, s);
            if w != NONE && to_target.dist(w) == Some(dx - 1) {
                path.vertices.push(w);
                path.gens.push(s);
                self.enumerate_geodesics(to_target, path, limit, out);
                path.vertices.pop();
                path.gens.pop();
            }
        }
    }

    /// Lexicographically least geodesic from `u` to `v`, searching paths of
    /// length at most `max_len`; `None` if `v` is farther inside the ball.
    pub fn canonical_geodesic(&self, bfs: &mut Bfs, u: u32, v: u32, max_len: u32) -> Option<Geodesic> {
        bfs.run(self, &[v], max_len);
        let mut d = bfs.dist(u)?;
        let mut path = Geodesic { vertices: vec![u], gens: Vec::new() };
        let mut x = u;
        while d > 0 {
            let (s, w) = (0..self.gens.len())
                .map(|s| (s, self.nbr(x, s)))
                .find(|&(_, w)| w != NONE && bfs.dist(w) == Some(d - 1))
                .expect("distance decreases along some edge");
            path.vertices.push(w);
            path.gens.push(s);
            x = w;
            d -= 1;
        }
        Some(path)
    }

    /// Graphviz rendering; `edge_attr` may add attributes per edge id.
    pub fn to_dot(&self, edge_attr: impl Fn(u32) -> Option<String>) -> String {
        let mut out = String::from("graph ball {\n");
        for (v, g) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{v} [label=\"{}\"];", self.group.format(g));
        }
        for (id, e) in self.edges.iter().enumerate() {
            let extra = edge_attr(id as u32).map(|a| format!(", {a}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "  v{} -- v{} [label=\"{}\"{extra}];",
                e.src,
                e.dst,
                self.gens.name(e.gen)
            );
        }
        out.push_str("}\n");
        out
    }
}

/// A path given by its vertices and the generator taken at each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geodesic {
    pub vertices: Vec<u32>,
    pub gens: Vec<usize>,
}

impl Geodesic {
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

/// Reusable breadth-first search restricted to a ball. Sources may start
/// at nonzero offsets.
#[derive(Debug, Clone)]
pub struct Bfs {
    dist: Vec<u32>,
    stamp: Vec<u32>,
    current: u32,
    order: Vec<u32>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs { dist: vec![0; n], stamp: vec![0; n], current: 0, order: Vec::new() }
    }

    pub fn run(&mut self, ball: &Ball, sources: &[u32], depth: u32) {
        let seeded: Vec<(u32, u32)> = sources.iter().map(|&s| (s, 0)).collect();
        self.run_offsets(ball, &seeded, depth);
    }

    /// Multi-source search where source `v` starts at distance `offset`;
    /// vertices farther than `depth` are not visited.
    pub fn run_offsets(&mut self, ball: &Ball, sources: &[(u32, u32)], depth: u32) {
        if self.current == u32::MAX {
            self.stamp.fill(0);
            self.current = 0;
        }
        self.current += 1;
        self.order.clear();
        let mut pending: Vec<(u32, u32)> = sources.iter().copied().filter(|&(_, o)| o <= depth).collect();
        pending.sort_by_key(|&(v, o)| (std::cmp::Reverse(o), std::cmp::Reverse(v)));
        let mut frontier: Vec<u32> = Vec::new();
        let mut level = 0;
        loop {
            while let Some(&(v, o)) = pending.last() {
                if o != level {
                    break;
                }
                pending.pop();
                if self.visit(v, level) {
                    frontier.push(v);
                }
            }
            if frontier.is_empty() && pending.is_empty() {
                break;
            }
            if level == depth {
                break;
            }
            let mut next = Vec::new();
            for &v in &frontier {
                for s in 0..ball.gens.len() {
                    let w = ball.nbr(v, s);
                    if w != NONE && self.visit(w, level + 1) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
            level += 1;
        }
    }

    fn visit(&mut self, v: u32, d: u32) -> bool {
        let i = v as usize;
        if self.stamp[i] == self.current {
            return false;
        }
        self.stamp[i] = self.current;
        self.dist[i] = d;
        self.order.push(v);
        true
    }

    /// Distance found for `v`; `None` if unvisited or `v` is [`NONE`].
    pub fn dist(&self, v: u32) -> Option<u32> {
        (v != NONE && self.stamp[v as usize] == self.current).then(|| self.dist[v as usize])
    }

    /// Visited vertices in nondecreasing distance order.
    pub fn visited(&self) -> &[u32] {
        &self.order
    }
}

/// Closed-form `|B_r|` for the standard generators of `Z^d` and `F_k`.
pub fn predicted_ball_size(group: &Group, gens: &GeneratingSet, radius: u32) -> Option<u128> {
    if *gens != group.standard_generators() {
        return None;
    }
    let r = radius as u128;
    match group {
        Group::Zd { d } => {
            // Points with exactly j nonzero coordinates: 2^j C(d,j) C(r,j).
            let choose = |n: u128, k: u128| (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1));
            let d = *d as u128;
            Some((0..=d.min(r)).map(|j| (1u128 << j).saturating_mul(choose(d, j)).saturating_mul(choose(r, j))).fold(0, u128::saturating_add))
        }
        Group::Free { rank } => {
            let b = 2 * *rank as u128 - 1;
            // 1 + 2k (1 + b + ... + b^(r-1))
            let mut total = 1u128;
            let mut sphere = 2 * *rank as u128;
            for _ in 0..radius {
                total = total.saturating_add(sphere);
                sphere = sphere.saturating_mul(b);
            }
            Some(total)
        }
        Group::VirtZ(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Growth {
    pub sizes: Vec<usize>,
    /// Sphere sizes are non-increasing over the second half of the range.
    pub linear: bool,
}

/// `|B_0|, ..., |B_max_r|`.
pub fn growth_sequence(group: &Group, gens: &GeneratingSet, max_r: u32, cap: usize) -> Result<Growth> {
    let ball = Ball::build_capped(group, gens, &group.identity(), max_r, cap)?;
    let mut sizes = vec![0usize; max_r as usize + 1];
    for v in 0..ball.len() as u32 {
        sizes[ball.dist(v) as usize] += 1;
    }
    for r in 1..sizes.len() {
        sizes[r] += sizes[r - 1];
    }
    let sphere = |r: usize| sizes[r] - if r == 0 { 0 } else { sizes[r - 1] };
    let m = max_r as usize;
    let linear = m >= 2 && ((m + 1) / 2..m).all(|r| sphere(r + 1) <= sphere(r));
    Ok(Growth { sizes, linear })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::VirtZData;

    fn ball(group: &Group, r: u32) -> Ball {
        Ball::build(group, &group.standard_generators(), &group.identity(), r).unwrap()
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(&Group::free(2), 2).len(), 17);
        assert_eq!(ball(&Group::zd(2), 2).len(), 13);
        let b = ball(&Group::zd(2), 0);
        assert_eq!((b.len(), b.edges().len()), (1, 0));
    }

    #[test]
    fn edges_stored_once() {
        let b = ball(&Group::zd(2), 3);
        // each vertex of Z^2 at distance < 3 has all four edges inside
        let full: usize = (0..b.len() as u32).map(|v| (0..4).filter(|&s| b.nbr(v, s) != NONE).count()).sum();
        assert_eq!(full, 2 * b.edges().len());
        for e in b.edges() {
            assert!(b.dist(e.src).abs_diff(b.dist(e.dst)) <= 1);
        }
        let d = ball(&Group::virtz(VirtZData::infinite_dihedral()), 3);
        let full: usize = (0..d.len() as u32).map(|v| (0..3).filter(|&s| d.nbr(v, s) != NONE).count()).sum();
        assert_eq!(full, 2 * d.edges().len());
    }

    #[test]
    fn cap_exceeded() {
        let g = Group::free(2);
        let r = Ball::build_capped(&g, &g.standard_generators(), &g.identity(), 10, 1000);
        assert!(matches!(r, Err(Error::CapExceeded { cap: 1000, .. })));
    }

    #[test]
    fn geodesic_counts() {
        let g = Group::zd(2);
        let b = ball(&g, 4);
        let o = b.index_of(&GroupElement::Zd(vec![0, 0])).unwrap();
        let t = b.index_of(&GroupElement::Zd(vec![1, 1])).unwrap();
        let geos = b.geodesics_between(o, t, 100).unwrap();
        assert_eq!(geos.len(), 2);
        assert_eq!(geos[0].gens, vec![0, 2]);
        assert_eq!(b.geodesics_between(o, o, 10).unwrap().len(), 1);
        let far = b.index_of(&GroupElement::Zd(vec![3, 0])).unwrap();
        assert!(matches!(b.geodesics_between(far, o, 10), Err(Error::BoundaryRisk { .. })));

        let f = Group::free(2);
        let fb = ball(&f, 4);
        let ab = fb.index_of(&f.parse_free_word("ab").unwrap()).unwrap();
        assert_eq!(fb.geodesics_between(0, ab, 10).unwrap().len(), 1);
    }

    #[test]
    fn canonical_matches_first_geodesic() {
        let g = Group::zd(2);
        let b = ball(&g, 6);
        let mut bfs = Bfs::new(b.len());
        let o = 0;
        let t = b.index_of(&GroupElement::Zd(vec![-2, 1])).unwrap();
        let first = b.geodesics_between(o, t, 1).unwrap().remove(0);
        assert_eq!(b.canonical_geodesic(&mut bfs, o, t, 3).unwrap(), first);
    }

    #[test]
    fn offsets_bfs() {
        let g = Group::zd(1);
        let b = ball(&g, 5);
        let mut bfs = Bfs::new(b.len());
        let at = |k: i64| b.index_of(&GroupElement::Zd(vec![k])).unwrap();
        bfs.run_offsets(&b, &[(at(-3), 2), (at(2), 0)], 10);
        assert_eq!(bfs.dist(at(-3)), Some(2));
        assert_eq!(bfs.dist(at(-1)), Some(3));
        assert_eq!(bfs.dist(at(5)), Some(3));
    }

    #[test]
    fn predicted_sizes_match_balls() {
        for g in [Group::zd(1), Group::zd(2), Group::zd(3), Group::free(2)] {
            let gens = g.standard_generators();
            for r in 0..5 {
                let ball = Ball::build(&g, &gens, &g.identity(), r).unwrap();
                assert_eq!(predicted_ball_size(&g, &gens, r), Some(ball.len() as u128));
            }
        }
        let f2 = Group::free(2);
        let r = Ball::build(&f2, &f2.standard_generators(), &f2.identity(), 36);
        assert!(matches!(r, Err(Error::CapExceeded { radius: 36, .. })));
    }

    #[test]
    fn growth_examples() {
        let z2 = Group::zd(2);
        assert_eq!(growth_sequence(&z2, &z2.standard_generators(), 2, 1000).unwrap().sizes, vec![1, 5, 13]);
        let f2 = Group::free(2);
        assert_eq!(growth_sequence(&f2, &f2.standard_generators(), 2, 1000).unwrap().sizes, vec![1, 5, 17]);
        let z = Group::zd(1);
        let gz = growth_sequence(&z, &z.standard_generators(), 3, 1000).unwrap();
        assert_eq!(gz.sizes, vec![1, 3, 5, 7]);
        assert!(gz.linear);
        assert!(!growth_sequence(&z2, &z2.standard_generators(), 6, 1000).unwrap().linear);
    }

    #[test]
    fn dot_export() {
        let g = Group::zd(1);
        let dot = ball(&g, 1).to_dot(|_| None);
        assert!(dot.contains("v0 -- v1 [label=\"x\"]"));
    }
}
