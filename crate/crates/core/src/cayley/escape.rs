use std::collections::{BTreeMap, HashMap};

use super::{Ball, Bfs, NONE};
use crate::error::{Error, Result};
use crate::group::{GeneratingSet, Group, GroupElement, WordLength};

/// Outcome of an escape-constant probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeResult {
    pub n: u32,
    pub probe_radius: u32,
    pub k: u32,
    /// Maximal geodesic segments examined.
    pub segments: usize,
    /// A segment attaining `k`.
    pub worst_segment: Vec<GroupElement>,
    /// Closest vertex at distance exactly `n` from the worst segment.
    pub witness: GroupElement,
}

/// Smallest `K` such that every maximal geodesic segment through the
/// identity inside `B_probe_radius` has a vertex `h` with `d(segment, h) = n`
/// and `|h| <= K`. Only vertices with `|h| + n <= probe_radius` count, so
/// that all distances used are exact.
pub fn escape_constant(group: &Group, gens: &GeneratingSet, n: u32, probe_radius: u32) -> Result<EscapeResult> {
    if n == 0 {
        return Err(Error::Parse("escape distance must be at least 1".into()));
    }
    let ball = Ball::build(group, gens, &group.identity(), probe_radius)?;
    let mut wl = WordLength::new(group, gens);
    let paths = geodesic_paths(&ball);

    let mut pair_dist: HashMap<(u32, u32), u32> = HashMap::new();
    let mut d = |a: u32, b: u32| -> u32 {
        *pair_dist.entry((a, b)).or_insert_with(|| {
            let ai = group.inverse(ball.vertex(a)).expect("same backend");
            wl.length(&group.mul(&ai, ball.vertex(b)).expect("same backend"))
        })
    };

    let mut bfs = Bfs::new(ball.len());
    let mut best: Option<(u32, Vec<u32>, u32)> = None;
    let mut segments = 0;
    for i in 0..paths.len() {
        for j in i..paths.len() {
            let (p, q) = (&paths[i], &paths[j]);
            let (a, b) = (*p.last().unwrap(), *q.last().unwrap());
            let len = (p.len() + q.len() - 2) as u32;
            if len == 0 || d(a, b) != len {
                continue;
            }
            let extendable = |end: u32, other: u32, d: &mut dyn FnMut(u32, u32) -> u32| {
                (0..gens.len()).any(|s| {
                    let w = ball.nbr(end, s);
                    w != NONE && ball.dist(w) == ball.dist(end) + 1 && d(other, w) == len + 1
                })
            };
            if extendable(b, a, &mut d) || extendable(a, b, &mut d) {
                continue;
            }
            segments += 1;
            let segment: Vec<u32> = p.iter().rev().chain(q.iter().skip(1)).copied().collect();
            bfs.run(&ball, &segment, n);
            let reach = bfs
                .visited()
                .iter()
                .copied()
                .filter(|&h| bfs.dist(h) == Some(n) && ball.dist(h) + n <= probe_radius)
                .min_by_key(|&h| (ball.dist(h), h));
            let Some(h) = reach else {
                return Err(Error::NoEscape { n, probe_radius });
            };
            let k = ball.dist(h);
            if best.as_ref().is_none_or(|(bk, _, _)| k > *bk) {
                best = Some((k, segment, h));
            }
        }
    }
    let (k, seg, h) = best.ok_or(Error::NoEscape { n, probe_radius })?;
    Ok(EscapeResult {
        n,
        probe_radius,
        k,
        segments,
        worst_segment: seg.iter().map(|&v| ball.vertex(v).clone()).collect(),
        witness: ball.vertex(h).clone(),
    })
}

/// Every geodesic path leaving the center, as vertex lists starting at 0.
fn geodesic_paths(ball: &Ball) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32]];
    let mut i = 0;
    while i < out.len() {
        let last = *out[i].last().unwrap();
        for s in 0..ball.gens().len() {
            let w = ball.nbr(last, s);
            if w != NONE && ball.dist(w) == ball.dist(last) + 1 {
                let mut p = out[i].clone();
                p.push(w);
                out.push(p);
            }
        }
        i += 1;
    }
    out
}

/// Supplies `K(n)` to the range schedule.
pub trait EscapeOracle {
    fn k(&mut self, n: u32) -> Result<u32>;
    fn describe(&self) -> String;
}

/// `K(n) = n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearEscape;

impl EscapeOracle for LinearEscape {
    fn k(&mut self, n: u32) -> Result<u32> {
        Ok(n)
    }

    fn describe(&self) -> String {
        "linear K(n)=n".to_string()
    }
}

/// Exhaustive probe at radius `2n + margin`, memoized.
#[derive(Debug, Clone)]
pub struct ProbeEscape {
    group: Group,
    gens: GeneratingSet,
    margin: u32,
    cache: BTreeMap<u32, u32>,
}

impl ProbeEscape {
    pub fn new(group: &Group, gens: &GeneratingSet, margin: u32) -> Self {
        ProbeEscape { group: group.clone(), gens: gens.clone(), margin, cache: BTreeMap::new() }
    }
}

impl EscapeOracle for ProbeEscape {
    fn k(&mut self, n: u32) -> Result<u32> {
        if let Some(&k) = self.cache.get(&n) {
            return Ok(k);
        }
        let k = escape_constant(&self.group, &self.gens, n, 2 * n + self.margin)?.k;
        self.cache.insert(n, k);
        Ok(k)
    }

    fn describe(&self) -> String {
        format!("probe K(n) at radius 2n+{}", self.margin)
    }
}
