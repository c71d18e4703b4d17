use std::collections::HashMap;

use rayon::prelude::*;

use super::{Color, ColoredBall, Word};
use crate::cayley::{Ball, Bfs, NONE};
use crate::error::{Error, Result};
use crate::group::{GroupElement, WordLength};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperReport {
    pub ok: bool,
    /// A vertex with two incident edges of the same letter color.
    pub violation: Option<(u32, Color)>,
}

/// No vertex has two incident edges sharing a color in `{A,B,C}`.
pub fn verify_3proper(cb: &ColoredBall) -> ProperReport {
    let ball = cb.ball();
    for v in 0..ball.len() as u32 {
        let mut seen = [false; 3];
        for s in 0..ball.gens().len() {
            if let Some(c) = cb.color_at(v, s).filter(|c| c.is_letter()) {
                if std::mem::replace(&mut seen[c as usize], true) {
                    return ProperReport { ok: false, violation: Some((v, c)) };
                }
            }
        }
    }
    ProperReport { ok: true, violation: None }
}

/// Outcome of a sweep over interior centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub radius: u32,
    pub centers: usize,
    pub passed: usize,
    pub first_failure: Option<u32>,
}

impl CoverageReport {
    pub fn ok(&self) -> bool {
        self.passed == self.centers
    }
}

/// A finite configuration that must fit in `B_R(v)`; every vertex lies
/// within `reach` of `anchor`.
struct Object {
    anchor: u32,
    reach: u32,
    verts: Vec<u32>,
}

fn interior_centers(ball: &Ball, r: u32) -> Result<Vec<u32>> {
    if r > ball.radius() {
        return Err(Error::NoInteriorCenters { radius: r, ball_radius: ball.radius() });
    }
    Ok((0..ball.len() as u32).filter(|&v| ball.dist(v) + r <= ball.radius()).collect())
}

/// For each interior center `v`, whether some object lies inside `B_r(v)`.
/// A multi-source search with anchor offsets settles most centers; the rest
/// get an exact search.
fn coverage(ball: &Ball, objects: &[Object], r: u32) -> Result<CoverageReport> {
    let centers = interior_centers(ball, r)?;
    let mut bfs = Bfs::new(ball.len());
    let seeds: Vec<(u32, u32)> = objects.iter().map(|o| (o.anchor, o.reach)).collect();
    bfs.run_offsets(ball, &seeds, r);
    let undecided: Vec<u32> = centers.iter().copied().filter(|&v| bfs.dist(v).is_none()).collect();

    let mut by_anchor: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, o) in objects.iter().enumerate() {
        by_anchor.entry(o.anchor).or_default().push(i);
    }
    let failed: Vec<u32> = if objects.is_empty() {
        undecided
    } else {
        undecided
            .par_iter()
            .map_init(
                || Bfs::new(ball.len()),
                |local, &v| {
                    local.run(ball, &[v], r);
                    let hit = local.visited().iter().any(|a| {
                        by_anchor.get(a).is_some_and(|ids| {
                            ids.iter().any(|&i| objects[i].verts.iter().all(|&x| local.dist(x).is_some()))
                        })
                    });
                    (!hit).then_some(v)
                },
            )
            .flatten()
            .collect()
    };
    Ok(CoverageReport {
        radius: r,
        centers: centers.len(),
        passed: centers.len() - failed.len(),
        first_failure: failed.into_iter().min(),
    })
}

/// Marked copies of `w`: paths spelling `w` whose start has every other
/// edge colored `D` and whose later vertices have every other edge colored
/// `E`. Returned as vertex lists.
pub fn marked_copies(cb: &ColoredBall, w: &Word) -> Vec<Vec<u32>> {
    let ball = cb.ball();
    let mut out = Vec::new();
    for t in 0..ball.len() as u32 {
        let mut stack = vec![(vec![t], Vec::<u32>::new())];
        while let Some((verts, edges)) = stack.pop() {
            let j = edges.len();
            if j == w.len() {
                if is_marked(cb, &verts, &edges) {
                    out.push(verts);
                }
                continue;
            }
            let v = verts[j];
            for s in 0..ball.gens().len() {
                if cb.color_at(v, s) == Some(w.letters()[j]) {
                    let mut nv = verts.clone();
                    nv.push(ball.nbr(v, s));
                    let mut ne = edges.clone();
                    ne.push(ball.edge_at(v, s));
                    stack.push((nv, ne));
                }
            }
        }
    }
    out
}

fn is_marked(cb: &ColoredBall, verts: &[u32], edges: &[u32]) -> bool {
    let ball = cb.ball();
    verts.iter().enumerate().all(|(j, &v)| {
        let mark = if j == 0 { Color::D } else { Color::E };
        (0..ball.gens().len()).all(|s| {
            let e = ball.edge_at(v, s);
            e != NONE && (edges.contains(&e) || cb.color(e) == mark)
        })
    })
}

/// P1 for `w` at range `r`: every interior `B_r(v)` contains a marked copy
/// of `w` together with all edges at its vertices.
pub fn verify_p1(cb: &ColoredBall, w: &Word, r: u32) -> Result<CoverageReport> {
    let ball = cb.ball();
    let objects: Vec<Object> = marked_copies(cb, w)
        .into_iter()
        .map(|path| {
            let mut verts = path.clone();
            for &v in &path {
                verts.extend((0..ball.gens().len()).map(|s| ball.nbr(v, s)));
            }
            verts.sort_unstable();
            verts.dedup();
            Object { anchor: path[0], reach: w.len() as u32 + 1, verts }
        })
        .collect();
    coverage(ball, &objects, r)
}

fn pair_objects(cb: &ColoredBall, g: &GroupElement, keep: impl Fn(Color, Color) -> bool) -> Result<Vec<Object>> {
    let ball = cb.ball();
    ball.group().check(g)?;
    let reach = WordLength::new(ball.group(), ball.gens()).length(g) + 1;
    let mut out = Vec::new();
    for x in 0..ball.len() as u32 {
        let Some(xg) = ball.translate(x, g) else { continue };
        for s in 0..ball.gens().len() {
            let (e1, e2) = (ball.edge_at(x, s), ball.edge_at(xg, s));
            if e1 != NONE && e2 != NONE && keep(cb.color(e1), cb.color(e2)) {
                let verts = vec![x, ball.nbr(x, s), xg, ball.nbr(xg, s)];
                out.push(Object { anchor: x, reach, verts });
            }
        }
    }
    Ok(out)
}

/// P2 for `g` at range `n`: every interior `B_n(v)` contains an `s`-edge at
/// some `x` and the `s`-edge at `x·g`, colored differently.
pub fn verify_p2(cb: &ColoredBall, g: &GroupElement, n: u32) -> Result<CoverageReport> {
    let objects = pair_objects(cb, g, |a, b| a != b)?;
    coverage(cb.ball(), &objects, n)
}

/// As [`verify_p2`], but the first edge must be `D` and its companion `E`.
pub fn verify_marker_pairs(cb: &ColoredBall, g: &GroupElement, n: u32) -> Result<CoverageReport> {
    let objects = pair_objects(cb, g, |a, b| a == Color::D && b == Color::E)?;
    coverage(cb.ball(), &objects, n)
}

/// Protection audit: for each placement of word `i` and each of its word
/// vertices `x`, `B_{R_i'}(x)` contains no word vertex of another placement
/// with index `>= i` and no companion-edge endpoint of a placement with
/// index `> i`. Returns `(placement, vertex)` violations.
pub fn audit_protection(cb: &ColoredBall) -> Vec<(usize, u32)> {
    let Some(plan) = cb.plan() else { return Vec::new() };
    let ball = cb.ball();
    let placements = cb.placements();
    let mut word_owner = vec![NONE; ball.len()];
    let mut comp_owner: Vec<Vec<u32>> = vec![Vec::new(); ball.len()];
    for (p, pl) in placements.iter().enumerate() {
        for &v in &pl.path {
            word_owner[v as usize] = p as u32;
        }
        for v in pl.companion_endpoints(ball) {
            if v != NONE {
                comp_owner[v as usize].push(p as u32);
            }
        }
    }
    let mut bfs = Bfs::new(ball.len());
    let mut out = Vec::new();
    for (p, pl) in placements.iter().enumerate() {
        let i = pl.word_index;
        bfs.run(ball, &pl.path, plan.steps[i - 1].r_prime);
        for &v in bfs.visited() {
            let w = word_owner[v as usize];
            let word_hit = w != NONE && w as usize != p && placements[w as usize].word_index >= i;
            let comp_hit = comp_owner[v as usize].iter().any(|&q| placements[q as usize].word_index > i);
            if word_hit || comp_hit {
                out.push((p, v));
            }
        }
    }
    out
}

/// Per-step conditions: (1) marked copy of `w_i` in every interior
/// `R_i`-ball, (2) a `D`-edge with `E`-colored `g_i`-companion in every
/// interior `R_i`-ball, (3) protection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub word_index: usize,
    pub r: u32,
    pub condition1: CoverageReport,
    pub condition2: CoverageReport,
    pub protection_violations: usize,
}

impl ConditionReport {
    pub fn ok(&self) -> bool {
        self.condition1.ok() && self.condition2.ok() && self.protection_violations == 0
    }
}

pub fn condition_report(cb: &ColoredBall) -> Result<Vec<ConditionReport>> {
    let Some(plan) = cb.plan() else { return Ok(Vec::new()) };
    let violations = audit_protection(cb);
    plan.steps
        .iter()
        .enumerate()
        .map(|(i, step)| {
            Ok(ConditionReport {
                word_index: i + 1,
                r: step.r,
                condition1: verify_p1(cb, &step.word, step.r)?,
                condition2: verify_marker_pairs(cb, &step.g, step.r)?,
                protection_violations: violations
                    .iter()
                    .filter(|&&(p, _)| cb.placements()[p].word_index == i + 1)
                    .count(),
            })
        })
        .collect()
}
