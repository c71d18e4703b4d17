//! Simple random walks on Cayley and Schreier graphs: exact small-time
//! return probabilities, seeded Monte Carlo estimates and decay profiles.

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::hash::Hash;

use nalgebra::{DMatrix, DVector};
use num_traits::{FromPrimitive, Num, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{Ball, NONE};
use crate::cocycle::{OrbitModel, OrbitPoint};
use crate::error::{Error, Result};
use crate::group::{GeneratingSet, Group, GroupElement};

/// Times up to which exact return probabilities are computed.
pub const EXACT_HORIZON: u32 = 16;

/// A finite graph with one outgoing slot per step; `NONE` marks a slot
/// whose image falls outside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionGraph {
    labels: Vec<String>,
    step_names: Vec<String>,
    nbr: Vec<u32>,
    origin: u32,
}

impl ActionGraph {
    pub fn new(labels: Vec<String>, step_names: Vec<String>, nbr: Vec<u32>, origin: u32) -> Result<Self> {
        let n = labels.len();
        if nbr.len() != n * step_names.len() || origin as usize >= n {
            return Err(Error::Parse("malformed action graph".into()));
        }
        if nbr.iter().any(|&w| w != NONE && w as usize >= n) {
            return Err(Error::Parse("action graph edge leaves the vertex set".into()));
        }
        Ok(ActionGraph { labels, step_names, nbr, origin })
    }

    /// The ball as a graph rooted at its center.
    pub fn from_ball(ball: &Ball) -> Self {
        let s = ball.gens().len();
        let labels = ball.vertices().iter().map(|g| g.to_string()).collect();
        let nbr = (0..ball.len() as u32).flat_map(|v| (0..s).map(move |j| ball.nbr(v, j))).collect();
        let origin = ball.index_of(ball.center()).expect("center in ball");
        ActionGraph { labels, step_names: ball.gens().names().to_vec(), nbr, origin }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.step_names.len()
    }

    pub fn step_names(&self) -> &[String] {
        &self.step_names
    }

    pub fn label(&self, v: u32) -> &str {
        &self.labels[v as usize]
    }

    pub fn origin(&self) -> u32 {
        self.origin
    }

    pub fn nbr(&self, v: u32, s: usize) -> u32 {
        self.nbr[v as usize * self.steps() + s]
    }

    pub fn is_clipped(&self, v: u32) -> bool {
        (0..self.steps()).any(|s| self.nbr(v, s) == NONE)
    }

    /// `(vertex, step, image)` for every slot inside the window.
    pub fn edges(&self) -> Vec<(u32, usize, u32)> {
        (0..self.len() as u32)
            .flat_map(|v| (0..self.steps()).map(move |s| (v, s)))
            .filter_map(|(v, s)| {
                let w = self.nbr(v, s);
                (w != NONE).then_some((v, s, w))
            })
            .collect()
    }

    fn distances(&self) -> Vec<u32> {
        let mut dist = vec![NONE; self.len()];
        dist[self.origin as usize] = 0;
        let mut queue = VecDeque::from([self.origin]);
        while let Some(v) = queue.pop_front() {
            for s in 0..self.steps() {
                let w = self.nbr(v, s);
                if w != NONE && dist[w as usize] == NONE {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances().iter().all(|&d| d != NONE)
    }

    /// Distance from the origin to the nearest clipped vertex, or `None`
    /// when the graph is closed.
    pub fn depth(&self) -> Option<u32> {
        let dist = self.distances();
        (0..self.len() as u32).filter(|&v| dist[v as usize] != NONE && self.is_clipped(v)).map(|v| dist[v as usize]).min()
    }

    /// The same graph with vertex `v` renamed `perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p as usize >= n || std::mem::replace(&mut seen[p as usize], true)) {
            return Err(Error::Parse("relabeling is not a permutation".into()));
        }
        let s = self.steps();
        let mut labels = vec![String::new(); n];
        let mut nbr = vec![NONE; n * s];
        for v in 0..n {
            let pv = perm[v] as usize;
            labels[pv] = self.labels[v].clone();
            for j in 0..s {
                let w = self.nbr[v * s + j];
                nbr[pv * s + j] = if w == NONE { NONE } else { perm[w as usize] };
            }
        }
        Ok(ActionGraph { labels, step_names: self.step_names.clone(), nbr, origin: perm[self.origin as usize] })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph action {\n");
        for (v, l) in self.labels.iter().enumerate() {
            let shape = if v as u32 == self.origin { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  {v} [label=\"{l}\", shape={shape}];");
        }
        for (v, s, w) in self.edges() {
            if v <= w {
                let _ = writeln!(out, "  {v} -- {w} [label=\"{}\"];", self.step_names[s]);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Orbit points `(k, i)` with `|k| <= window`, joined by the Schreier steps
/// of the model, rooted at `(0, line1)`.
pub fn schreier_graph(model: &OrbitModel, window: u32) -> ActionGraph {
    let steps = model.schreier_steps();
    let w = window as i64;
    let width = 2 * w + 1;
    let index = |p: OrbitPoint| -> u32 {
        if p.k.abs() > w {
            NONE
        } else {
            (p.line as i64 * width + p.k + w) as u32
        }
    };
    let mut labels = Vec::new();
    let mut nbr = Vec::new();
    for line in 0..model.lines() {
        for k in -w..=w {
            let p = OrbitPoint::new(k, line);
            labels.push(p.to_string());
            nbr.extend(steps.iter().map(|(_, act)| index(act.apply(p))));
        }
    }
    ActionGraph {
        labels,
        step_names: steps.into_iter().map(|(n, _)| n).collect(),
        nbr,
        origin: index(OrbitPoint::new(0, 0)),
    }
}

/// Where the walk runs.
#[derive(Debug, Clone)]
pub enum GraphSource {
    Cayley { group: Group, gens: GeneratingSet },
    Action(ActionGraph),
}

impl GraphSource {
    pub fn cayley(group: &Group) -> Self {
        GraphSource::Cayley { group: group.clone(), gens: group.standard_generators() }
    }

    pub fn steps(&self) -> usize {
        match self {
            GraphSource::Cayley { gens, .. } => gens.len(),
            GraphSource::Action(g) => g.steps(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GraphSource::Cayley { group, .. } => format!("cayley {}", group.name()),
            GraphSource::Action(g) => format!("action graph ({} vertices)", g.len()),
        }
    }

    /// Fails unless walks of `max_time` steps never feel the window edge.
    fn check_window(&self, max_time: u32) -> Result<()> {
        if let GraphSource::Action(g) = self {
            let needed = max_time / 2 + 1;
            if let Some(depth) = g.depth() {
                if depth < needed {
                    return Err(Error::WindowTooSmall { needed, have: depth });
                }
            }
        }
        Ok(())
    }
}

/// Distributions `P_0, ..., P_m` of the walk from `origin`.
fn distributions<K, T>(origin: K, m: u32, steps: usize, mut next: impl FnMut(&K, usize) -> Option<K>) -> Vec<HashMap<K, T>>
where
    K: Hash + Eq + Clone,
    T: Num + Clone + FromPrimitive,
{
    let weight = T::one() / T::from_usize(steps).expect("step count");
    let mut out = vec![HashMap::from([(origin, T::one())])];
    for _ in 0..m {
        let mut dist: HashMap<K, T> = HashMap::new();
        for (x, p) in out.last().unwrap() {
            let share = p.clone() * weight.clone();
            for s in 0..steps {
                if let Some(y) = next(x, s) {
                    let slot = dist.entry(y).or_insert_with(T::zero);
                    *slot = slot.clone() + share.clone();
                }
            }
        }
        out.push(dist);
    }
    out
}

/// `p_t` for `t <= max_time` from `p_{2n} = sum P_n(x)^2` and
/// `p_{2n+1} = sum P_n(x) P_{n+1}(x)`, valid because the step set is
/// closed under inverses.
fn returns_from<K, T>(dists: &[HashMap<K, T>], max_time: u32) -> Vec<T>
where
    K: Hash + Eq,
    T: Num + Clone,
{
    let dot = |a: &HashMap<K, T>, b: &HashMap<K, T>| {
        a.iter().fold(T::zero(), |acc, (x, p)| match b.get(x) {
            Some(q) => acc + p.clone() * q.clone(),
            None => acc,
        })
    };
    (0..=max_time as usize)
        .map(|t| {
            let n = t / 2;
            if t % 2 == 0 {
                dot(&dists[n], &dists[n])
            } else {
                dot(&dists[n], &dists[n + 1])
            }
        })
        .collect()
}

/// Exact return probabilities `p_0, ..., p_max_time` in any exact or
/// floating scalar.
pub fn exact_return_probabilities<T>(source: &GraphSource, max_time: u32) -> Result<Vec<T>>
where
    T: Num + Clone + FromPrimitive,
{
    source.check_window(max_time)?;
    let m = max_time.div_ceil(2);
    match source {
        GraphSource::Cayley { group, gens } => {
            let mut err = None;
            let dists = distributions::<GroupElement, T>(group.identity(), m, gens.len(), |x, s| {
                group.mul(x, gens.get(s)).map_err(|e| err = Some(e)).ok()
            });
            if let Some(e) = err {
                return Err(e);
            }
            Ok(returns_from(&dists, max_time))
        }
        GraphSource::Action(g) => {
            let dists = distributions::<u32, T>(g.origin(), m, g.steps(), |&x, s| {
                let y = g.nbr(x, s);
                (y != NONE).then_some(y)
            });
            Ok(returns_from(&dists, max_time))
        }
    }
}

/// Monte Carlo return counts plus exact values at small times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub source: String,
    pub step_count: usize,
    pub trials: u64,
    pub seed: u64,
    pub max_time: u32,
    /// Walks at the origin at time `t`, indexed by `t`.
    pub return_counts: Vec<u64>,
    /// Exact `p_t` for `t <= min(max_time, 16)`.
    pub exact: Vec<f64>,
}

impl WalkStats {
    pub fn estimate(&self, t: u32) -> f64 {
        self.return_counts[t as usize] as f64 / self.trials as f64
    }

    /// Binomial standard error of the estimate at time `t`, using `p` as the
    /// success probability.
    pub fn binomial_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn exact_at(&self, t: u32) -> Option<f64> {
        self.exact.get(t as usize).copied()
    }

    /// Largest `|estimate - exact| / sigma` over the exact range, skipping
    /// times where the exact value is 0 or 1 and the estimate agrees.
    pub fn max_deviation(&self) -> f64 {
        (0..self.exact.len() as u32)
            .map(|t| {
                let p = self.exact[t as usize];
                let diff = (self.estimate(t) - p).abs();
                let sigma = self.binomial_sigma(p);
                if sigma == 0.0 {
                    if diff == 0.0 { 0.0 } else { f64::INFINITY }
                } else {
                    diff / sigma
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# source={} steps={} seed={} trials={} max_time={}\ntime,exact,estimate,stderr,count\n",
            self.source, self.step_count, self.seed, self.trials, self.max_time
        );
        for t in 0..=self.max_time {
            let p = self.estimate(t);
            let exact = self.exact_at(t).map(|e| e.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{t},{exact},{p},{},{}", self.binomial_sigma(p), self.return_counts[t as usize]);
        }
        out
    }
}

/// Runs `trials` walks of `max_time` steps. Trial `i` draws from its own
/// ChaCha stream, so counts do not depend on thread scheduling.
pub fn srw_estimate(source: &GraphSource, max_time: u32, trials: u64, seed: u64) -> Result<WalkStats> {
    if max_time % 2 != 0 {
        return Err(Error::PreconditionFailed(format!("max time {max_time} is odd")));
    }
    if trials == 0 {
        return Err(Error::PreconditionFailed("at least one trial is needed".into()));
    }
    source.check_window(max_time)?;
    let exact: Vec<f64> = exact_return_probabilities(source, max_time.min(EXACT_HORIZON))?;
    let steps = source.steps();
    let len = max_time as usize + 1;
    let rng_for = |i: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        rng
    };
    let tally = |i: u64| -> Result<Vec<u64>> {
        let mut rng = rng_for(i);
        let mut hits = vec![0u64; len];
        hits[0] = 1;
        match source {
            GraphSource::Cayley { group, gens } => {
                let e = group.identity();
                let mut x = e.clone();
                for hit in hits.iter_mut().skip(1) {
                    x = group.mul(&x, gens.get(rng.gen_range(0..steps)))?;
                    if x == e {
                        *hit = 1;
                    }
                }
            }
            GraphSource::Action(g) => {
                let mut x = g.origin();
                for hit in hits.iter_mut().skip(1) {
                    x = g.nbr(x, rng.gen_range(0..steps));
                    // Past the window the walk cannot return in time.
                    if x == NONE {
                        break;
                    }
                    if x == g.origin() {
                        *hit = 1;
                    }
                }
            }
        }
        Ok(hits)
    };
    let return_counts = (0..trials).into_par_iter().map(tally).try_reduce(
        || vec![0u64; len],
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            Ok(a)
        },
    )?;
    Ok(WalkStats {
        source: source.describe(),
        step_count: steps,
        trials,
        seed,
        max_time,
        return_counts,
        exact,
    })
}

/// A least-squares fit with standard errors and residual sum of squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub rss: f64,
    pub points: usize,
}

fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<Fit> {
    let (n, p) = (rows.len(), rows.first()?.len());
    if n <= p {
        return None;
    }
    let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(y);
    let xtx_inv = (x.transpose() * &x).try_inverse()?;
    let beta = &xtx_inv * x.transpose() * &yv;
    let resid = &yv - &x * &beta;
    let rss = resid.norm_squared();
    let s2 = rss / (n - p) as f64;
    Some(Fit {
        coefficients: beta.iter().copied().collect(),
        std_errors: (0..p).map(|j| (s2 * xtx_inv[(j, j)]).sqrt()).collect(),
        rss,
        points: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "lowercase")]
pub enum DecayProfile {
    /// `p_{2n} ~ n^{-alpha}`.
    Polynomial { alpha: f64, ci: (f64, f64) },
    /// `p_t ~ rate^t` up to a power correction.
    Exponential { rate: f64, ci: (f64, f64) },
    Inconclusive { reason: String },
}

impl fmt::Display for DecayProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayProfile::Polynomial { alpha, ci } => {
                write!(f, "polynomial alpha={alpha:.4} ci=[{:.4}, {:.4}]", ci.0, ci.1)
            }
            DecayProfile::Exponential { rate, ci } => {
                write!(f, "exponential rate={rate:.4} ci=[{:.4}, {:.4}]", ci.0, ci.1)
            }
            DecayProfile::Inconclusive { reason } => write!(f, "inconclusive ({reason})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub profile: DecayProfile,
    /// `log p_{2n} = c - alpha log n`.
    pub polynomial_fit: Option<Fit>,
    /// `log p_t = c + t log rate - beta log t`.
    pub exponential_fit: Option<Fit>,
    /// `(t, p_t)` pairs used.
    pub points: Vec<(u32, f64)>,
}

/// Monte Carlo points below this count are too noisy to fit.
const MIN_COUNT: u64 = 50;
/// A fitted rate whose interval reaches above this is treated as no
/// exponential decay.
const RATE_CEILING: f64 = 0.98;

/// Fits the even-time return probabilities two ways and reports a profile.
pub fn decay_classify(ws: &WalkStats) -> DecayReport {
    let points: Vec<(u32, f64)> = (1..=ws.max_time / 2)
        .map(|n| 2 * n)
        .filter_map(|t| match ws.exact_at(t) {
            Some(p) if p > 0.0 => Some((t, p)),
            Some(_) => None,
            None => (ws.return_counts[t as usize] >= MIN_COUNT).then(|| (t, ws.estimate(t))),
        })
        .collect();
    let logs: Vec<f64> = points.iter().map(|&(_, p)| p.ln()).collect();
    let poly_rows: Vec<Vec<f64>> = points.iter().map(|&(t, _)| vec![1.0, -((t / 2) as f64).ln()]).collect();
    let exp_rows: Vec<Vec<f64>> = points.iter().map(|&(t, _)| vec![1.0, t as f64, -(t as f64).ln()]).collect();
    let polynomial_fit = least_squares(&poly_rows, &logs);
    let exponential_fit = least_squares(&exp_rows, &logs);

    let profile = if points.len() < 5 {
        DecayProfile::Inconclusive { reason: format!("{} usable even times, need 5", points.len()) }
    } else {
        match (&polynomial_fit, &exponential_fit) {
            (Some(pf), Some(ef)) => {
                let (lr, se) = (ef.coefficients[1], ef.std_errors[1]);
                let rate = lr.exp();
                let ci = ((lr - 2.0 * se).exp(), (lr + 2.0 * se).exp());
                if ci.1 < RATE_CEILING {
                    DecayProfile::Exponential { rate, ci }
                } else if ci.0 > RATE_CEILING {
                    let (a, ase) = (pf.coefficients[1], pf.std_errors[1]);
                    DecayProfile::Polynomial { alpha: a, ci: (a - 2.0 * ase, a + 2.0 * ase) }
                } else {
                    DecayProfile::Inconclusive { reason: format!("rate interval [{:.4}, {:.4}] straddles {RATE_CEILING}", ci.0, ci.1) }
                }
            }
            _ => DecayProfile::Inconclusive { reason: "degenerate fit".into() },
        }
    };
    DecayReport { profile, polynomial_fit, exponential_fit, points }
}

/// `p_t` as `f64`, for scalars that only convert lossily.
pub fn to_f64<T: ToPrimitive>(values: &[T]) -> Vec<f64> {
    values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_bigint::BigInt;
    use num_rational::BigRational;

    use super::*;
    use crate::group::VirtZData;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn dihedral() -> OrbitModel {
        OrbitModel::new(Arc::new(VirtZData::infinite_dihedral()), &[]).unwrap()
    }

    #[test]
    fn dihedral_windows() {
        let m = dihedral();
        let g = schreier_graph(&m, 2);
        assert_eq!(g.len(), 10);
        assert!(g.is_connected());
        let g0 = schreier_graph(&m, 0);
        assert_eq!(g0.len(), 2);
        let s = g.step_names().iter().position(|n| n == "s2").unwrap();
        for k in -2..=2i64 {
            let v = g.labels.iter().position(|l| *l == OrbitPoint::new(k, 0).to_string()).unwrap() as u32;
            assert_eq!(g.label(g.nbr(v, s)), OrbitPoint::new(-k, 1).to_string());
        }
        assert!(g.edges().len() <= 10 * 2 * 3);
    }

    #[test]
    fn exact_small_times() {
        let z: Vec<BigRational> = exact_return_probabilities(&GraphSource::cayley(&Group::zd(1)), 4).unwrap();
        assert_eq!(z[2], ratio(1, 2));
        assert_eq!(z[4], ratio(3, 8));
        assert_eq!(z[3], ratio(0, 1));
        let z2: Vec<BigRational> = exact_return_probabilities(&GraphSource::cayley(&Group::zd(2)), 2).unwrap();
        assert_eq!(z2[2], ratio(1, 4));
        let f2: Vec<BigRational> = exact_return_probabilities(&GraphSource::cayley(&Group::free(2)), 6).unwrap();
        assert_eq!(f2[2], ratio(1, 4));
        assert_eq!(f2[4], ratio(7, 64));
        assert_eq!(f2[6], ratio(29, 512));
    }

    #[test]
    fn float_matches_rational() {
        let src = GraphSource::cayley(&Group::zd(2));
        let q: Vec<BigRational> = exact_return_probabilities(&src, 10).unwrap();
        let f: Vec<f64> = exact_return_probabilities(&src, 10).unwrap();
        for (a, b) in to_f64(&q).iter().zip(&f) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn window_guard() {
        let g = schreier_graph(&dihedral(), 3);
        let src = GraphSource::Action(g);
        assert!(matches!(srw_estimate(&src, 16, 10, 1), Err(Error::WindowTooSmall { .. })));
        assert!(srw_estimate(&src, 4, 10, 1).is_ok());
        assert!(srw_estimate(&src, 3, 10, 1).is_err());
    }

    #[test]
    fn schreier_walk_matches_line() {
        let g = schreier_graph(&dihedral(), 12);
        let p: Vec<f64> = exact_return_probabilities(&GraphSource::Action(g.clone()), 16).unwrap();
        assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let stats = srw_estimate(&GraphSource::Action(g), 16, 20_000, 7).unwrap();
        assert!(stats.max_deviation() < 4.0);
    }

    #[test]
    fn relabeling_preserves_estimates() {
        let g = schreier_graph(&dihedral(), 10);
        let n = g.len() as u32;
        let perm: Vec<u32> = (0..n).map(|v| (v * 5 + 3) % n).collect();
        let h = g.relabel(&perm).unwrap();
        let a = srw_estimate(&GraphSource::Action(g), 16, 2000, 9).unwrap();
        let b = srw_estimate(&GraphSource::Action(h), 16, 2000, 9).unwrap();
        assert_eq!(a.return_counts, b.return_counts);
        assert!(schreier_graph(&dihedral(), 1).relabel(&[0, 0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let src = GraphSource::cayley(&Group::free(2));
        let a = srw_estimate(&src, 20, 3000, 42).unwrap();
        let b = srw_estimate(&src, 20, 3000, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.to_csv().starts_with("# source=cayley"));
    }

    #[test]
    fn few_points_are_inconclusive() {
        let stats = srw_estimate(&GraphSource::cayley(&Group::zd(1)), 6, 100, 1).unwrap();
        assert!(matches!(decay_classify(&stats).profile, DecayProfile::Inconclusive { .. }));
    }
}
