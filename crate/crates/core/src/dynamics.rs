//! The involutions `A`, `B`, `C` acting on based colorings, word actions,
//! free-subgroup witnesses and local patterns.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cayley::Bfs;
use crate::coloring::{marked_copies, Color, ColoredBall, Word};
use crate::error::{Error, Result};
use crate::group::GroupElement;

/// A coloring seen from a basepoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub cb: Arc<ColoredBall>,
    pub basepoint: u32,
}

impl Configuration {
    pub fn new(cb: Arc<ColoredBall>, basepoint: u32) -> Result<Self> {
        if basepoint as usize >= cb.ball().len() {
            return Err(Error::NotInBall);
        }
        Ok(Configuration { cb, basepoint })
    }

    /// Distance from the basepoint to the edge of the known window.
    pub fn window(&self) -> u32 {
        self.cb.ball().radius() - self.cb.ball().dist(self.basepoint)
    }

    fn moved_to(&self, v: u32) -> Self {
        Configuration { cb: self.cb.clone(), basepoint: v }
    }
}

/// One letter application: `(letter, from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    pub letter: Color,
    pub from: u32,
    pub to: u32,
}

/// Moves the basepoint across its `x`-colored edge, or leaves it in place
/// when there is none. Fails when the basepoint has unseen edges and no
/// visible `x`-edge.
pub fn involution_apply(x: Color, cfg: &Configuration) -> Result<Configuration> {
    if !x.is_letter() {
        return Err(Error::Parse(format!("{x} is not an involution letter")));
    }
    let ball = cfg.cb.ball();
    let v = cfg.basepoint;
    for s in 0..ball.gens().len() {
        if cfg.cb.color_at(v, s) == Some(x) {
            return Ok(cfg.moved_to(ball.nbr(v, s)));
        }
    }
    if ball.is_full(v) {
        Ok(cfg.clone())
    } else {
        Err(Error::InsufficientWindow { vertex: v })
    }
}

/// Applies `w` letter by letter, rightmost first.
pub fn word_apply(w: &Word, cfg: &Configuration) -> Result<(Configuration, Vec<TraceStep>)> {
    let mut cur = cfg.clone();
    let mut trace = Vec::with_capacity(w.len());
    for &letter in w.letters().iter().rev() {
        let next = involution_apply(letter, &cur)?;
        trace.push(TraceStep { letter, from: cur.basepoint, to: next.basepoint });
        cur = next;
    }
    Ok((cur, trace))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// The marked copy used, `v_0, ..., v_L`.
    pub path: Vec<u32>,
    /// Configuration based at `v_L`.
    pub start: Configuration,
    pub end: Configuration,
    pub moved: bool,
    pub trace: Vec<TraceStep>,
}

/// Finds a marked copy of `w` (registry first, then a scan), bases the
/// coloring at its last vertex and applies `w`.
pub fn free_witness(cb: &Arc<ColoredBall>, w: &Word) -> Result<Witness> {
    let from_registry = cb.plan().and_then(|plan| {
        cb.placements()
            .iter()
            .find(|p| plan.steps.get(p.word_index - 1).is_some_and(|s| s.word == *w))
            .map(|p| p.path.clone())
    });
    let path = match from_registry {
        Some(p) => p,
        None => {
            let ball = cb.ball();
            marked_copies(cb, w)
                .into_iter()
                .find(|p| p.iter().all(|&v| ball.is_full(v)))
                .ok_or_else(|| Error::NoMarkedCopy(w.to_string()))?
        }
    };
    let start = Configuration::new(cb.clone(), *path.last().expect("nonempty path"))?;
    let (end, trace) = word_apply(w, &start)?;
    Ok(Witness { moved: end.basepoint != start.basepoint, path, start, end, trace })
}

/// Colored `r`-ball around a vertex in coordinates `u^{-1}x`; each edge is
/// listed from both endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub radius: u32,
    pub entries: Vec<(GroupElement, usize, Color)>,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}:", self.radius)?;
        for (x, s, c) in &self.entries {
            write!(f, " {x}/{s}/{c}")?;
        }
        Ok(())
    }
}

fn pattern_with(cb: &ColoredBall, u: u32, r: u32, bfs: &mut Bfs) -> Result<Pattern> {
    let ball = cb.ball();
    if ball.dist(u) + r > ball.radius() {
        return Err(Error::BoundaryClipped { vertex: u, radius: r });
    }
    let group = ball.group();
    let ui = group.inverse(ball.vertex(u))?;
    bfs.run(ball, &[u], r);
    let mut entries = Vec::new();
    for &x in bfs.visited() {
        let rel = group.mul(&ui, ball.vertex(x))?;
        for s in 0..ball.gens().len() {
            let y = ball.nbr(x, s);
            if bfs.dist(y).is_some() {
                entries.push((rel.clone(), s, cb.color(ball.edge_at(x, s))));
            }
        }
    }
    entries.sort();
    Ok(Pattern { radius: r, entries })
}

pub fn pattern_at(cb: &ColoredBall, u: u32, r: u32) -> Result<Pattern> {
    pattern_with(cb, u, r, &mut Bfs::new(cb.ball().len()))
}

/// Patterns of radius `r` at every interior vertex, with multiplicities.
pub fn pattern_language(cb: &ColoredBall, r: u32) -> Result<BTreeMap<Pattern, usize>> {
    let ball = cb.ball();
    if r > ball.radius() {
        return Err(Error::NoInteriorCenters { radius: r, ball_radius: ball.radius() });
    }
    let mut bfs = Bfs::new(ball.len());
    let mut out = BTreeMap::new();
    for u in (0..ball.len() as u32).filter(|&u| ball.dist(u) + r <= ball.radius()) {
        *out.entry(pattern_with(cb, u, r, &mut bfs)?).or_insert(0) += 1;
    }
    Ok(out)
}

/// Interior vertices `u` whose `r`-pattern equals the one at `u·g`.
pub fn shift_period_scan(cb: &ColoredBall, g: &GroupElement, r: u32) -> Result<Vec<u32>> {
    let ball = cb.ball();
    ball.group().check(g)?;
    if r > ball.radius() {
        return Err(Error::NoInteriorCenters { radius: r, ball_radius: ball.radius() });
    }
    let inside = |v: u32| ball.dist(v) + r <= ball.radius();
    let mut bfs = Bfs::new(ball.len());
    let mut out = Vec::new();
    let mut centers = 0;
    for u in (0..ball.len() as u32).filter(|&u| inside(u)) {
        let Some(ug) = ball.translate(u, g).filter(|&v| inside(v)) else { continue };
        centers += 1;
        if pattern_with(cb, u, r, &mut bfs)? == pattern_with(cb, ug, r, &mut bfs)? {
            out.push(u);
        }
    }
    if centers == 0 {
        return Err(Error::NoInteriorCenters { radius: r, ball_radius: ball.radius() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{Ball, LinearEscape};
    use crate::coloring::{build_range_plan, construct_coloring};
    use crate::group::Group;

    fn constructed() -> Arc<ColoredBall> {
        let g = Group::zd(2);
        let gens = g.standard_generators();
        let plan = build_range_plan(&g, &gens, 1, &mut LinearEscape).unwrap();
        let ball = Ball::build(&g, &gens, &g.identity(), 40).unwrap();
        Arc::new(construct_coloring(ball, &plan).unwrap())
    }

    fn all_f(r: u32) -> Arc<ColoredBall> {
        let g = Group::zd(2);
        Arc::new(ColoredBall::uniform(Ball::build(&g, &g.standard_generators(), &g.identity(), r).unwrap(), Color::F))
    }

    #[test]
    fn involution_moves_and_returns() {
        let cb = constructed();
        let p = &cb.placements()[0];
        let cfg = Configuration::new(cb.clone(), p.t).unwrap();
        let moved = involution_apply(Color::A, &cfg).unwrap();
        assert_eq!(moved.basepoint, p.path[1]);
        assert_eq!(involution_apply(Color::A, &moved).unwrap(), cfg);
        let still = involution_apply(Color::B, &cfg).unwrap();
        assert_eq!(still, cfg);
    }

    #[test]
    fn boundary_is_reported() {
        let cb = all_f(3);
        let edge = cb.ball().sphere(3).next().unwrap();
        let cfg = Configuration::new(cb, edge).unwrap();
        assert!(matches!(involution_apply(Color::A, &cfg), Err(Error::InsufficientWindow { .. })));
    }

    #[test]
    fn witness_on_constructed() {
        let cb = constructed();
        let w: Word = "A".parse().unwrap();
        let wit = free_witness(&cb, &w).unwrap();
        assert!(wit.moved);
        assert_eq!(wit.trace.len(), 1);
        assert_eq!(wit.end.basepoint, wit.path[0]);
        assert!(matches!(free_witness(&all_f(3), &w), Err(Error::NoMarkedCopy(_))));
    }

    #[test]
    fn empty_word_is_identity() {
        let cb = all_f(2);
        let cfg = Configuration::new(cb, 0).unwrap();
        let (out, trace) = word_apply(&"".parse().unwrap(), &cfg).unwrap();
        assert_eq!(out, cfg);
        assert!(trace.is_empty());
    }

    #[test]
    fn patterns() {
        let f = all_f(4);
        assert_eq!(pattern_at(&f, 0, 1).unwrap(), pattern_at(&f, 3, 1).unwrap());
        assert_eq!(pattern_language(&f, 0).unwrap().len(), 1);
        let cb = constructed();
        let t = cb.placements()[0].t;
        let filler = (0..cb.ball().len() as u32)
            .find(|&v| (0..4).all(|s| cb.color_at(v, s) == Some(Color::F)))
            .unwrap();
        assert_ne!(pattern_at(&cb, t, 1).unwrap(), pattern_at(&cb, filler, 1).unwrap());
        assert!(matches!(pattern_at(&f, 0, 5), Err(Error::BoundaryClipped { .. })));
    }

    #[test]
    fn shift_scan() {
        let f = all_f(4);
        let g = GroupElement::Zd(vec![2, 0]);
        let hits = shift_period_scan(&f, &g, 1).unwrap();
        let interior = (0..f.ball().len() as u32)
            .filter(|&u| f.ball().dist(u) <= 3)
            .filter(|&u| f.ball().translate(u, &g).is_some_and(|v| f.ball().dist(v) <= 3))
            .count();
        assert_eq!(hits.len(), interior);
    }
}
