//! Orbit coordinates for virtually-`Z` actions, piecewise elements and the
//! half-line cocycle `c_φ = A △ φ(A)`.

mod model;
mod piecewise;
pub mod sample;

use std::collections::{BTreeSet, HashMap, VecDeque};

pub use model::{LineAffineAction, LineMap, ModelFile, OrbitModel, OrbitPoint};
pub use piecewise::{OrbitSet, Piece, PieceFile, PiecewiseElement, PiecewiseFile};

use crate::epset::EPSet;
use crate::error::{Error, Result};

/// The set `A`: `k >= 0` on lines with `alpha(x_i) = +1`, `k <= 0` otherwise.
pub fn halfline_a(model: &OrbitModel) -> OrbitSet {
    OrbitSet::from_lines(
        (0..model.lines())
            .map(|i| if model.line_sign(i) > 0 { EPSet::at_least(0) } else { EPSet::at_most(0) })
            .collect(),
    )
}

fn finite_points(set: &OrbitSet, what: &str) -> Result<Vec<OrbitPoint>> {
    set.points()
        .ok_or_else(|| Error::InternalInconsistency(format!("{what} is infinite: {set:?}")))
}

/// `gA ∖ A` as a sorted finite point list.
pub fn translate_defect(model: &OrbitModel, g: (i64, usize)) -> Result<Vec<OrbitPoint>> {
    let a = halfline_a(model);
    finite_points(&a.image(&model.line_action(g)).difference(&a), "gA \\ A")
}

/// `c_φ = A △ φ(A)` as an exact set.
pub fn cocycle_set(model: &OrbitModel, phi: &PiecewiseElement) -> OrbitSet {
    let a = halfline_a(model);
    a.symmetric_difference(&phi.image(&a))
}

/// `c_φ` sorted by `(line, k)`.
pub fn cocycle(model: &OrbitModel, phi: &PiecewiseElement) -> Result<Vec<OrbitPoint>> {
    finite_points(&cocycle_set(model, phi), "A △ φ(A)")
}

/// Undirected distance in the Schreier graph on generators
/// `tau, sigma_2, ..., sigma_m`.
pub fn schreier_distance(model: &OrbitModel, from: OrbitPoint, to: OrbitPoint) -> u64 {
    if from == to {
        return 0;
    }
    let steps: Vec<LineAffineAction> = model
        .schreier_generators()
        .into_iter()
        .flat_map(|(_, g)| {
            let a = model.line_action(g);
            let b = a.inverse();
            [a, b]
        })
        .collect();
    let mut dist = HashMap::from([(from, 0u64)]);
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        for s in &steps {
            let q = s.apply(p);
            if q == to {
                return d + 1;
            }
            dist.entry(q).or_insert_with(|| {
                queue.push_back(q);
                d + 1
            });
        }
    }
    unreachable!("Schreier graph of an orbit is connected")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectReport {
    pub window: i64,
    /// `max | |k| - |k'| |` over window points `(k, i) ↦ (k', j)`.
    pub measured_max: i64,
    /// Largest Schreier displacement `d(q, φ(q))` over the window.
    pub displacement: u64,
    pub f0: i64,
    pub l0: i64,
    /// `displacement · max(1, 2 f0 + l0)`.
    pub closed_form_bound: i64,
    /// Every point of `c_φ` has `|k|` at most this.
    pub cocycle_window: i64,
}

/// Coordinate defect of `φ` on the window `|k| <= window`.
pub fn defect_bound(model: &OrbitModel, phi: &PiecewiseElement, window: i64) -> DefectReport {
    let mut measured_max = 0;
    let mut displacement = 0;
    for line in 0..model.lines() {
        for k in -window..=window {
            let p = OrbitPoint::new(k, line);
            let q = phi.apply(p);
            measured_max = measured_max.max((p.k.abs() - q.k.abs()).abs());
            displacement = displacement.max(schreier_distance(model, p, q));
        }
    }
    let f0 = model.data().f_max();
    let l0 = model.stabilizer_height();
    let cocycle_window = phi
        .pieces()
        .iter()
        .flat_map(|p| p.action.maps().iter().map(|m| m.offset.abs()))
        .max()
        .unwrap_or(0);
    DefectReport {
        window,
        measured_max,
        displacement,
        f0,
        l0,
        closed_form_bound: displacement as i64 * (2 * f0 + l0).max(1),
        cocycle_window,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    Orbit(Vec<OrbitPoint>),
    CapHit { reached: usize },
}

/// Closure of `{p}` under `family` and inverses, stopping at `cap` points.
/// Every member of `family` must have empty cocycle.
pub fn stabilizer_orbit_probe(
    model: &OrbitModel,
    family: &[PiecewiseElement],
    p: OrbitPoint,
    cap: usize,
) -> Result<ProbeOutcome> {
    for (i, phi) in family.iter().enumerate() {
        if !cocycle_set(model, phi).is_empty() {
            return Err(Error::PreconditionFailed(format!("element {i} has nonempty cocycle")));
        }
    }
    let moves: Vec<PiecewiseElement> =
        family.iter().flat_map(|phi| [phi.clone(), phi.inverse(model)]).collect();
    let mut seen = BTreeSet::from([p]);
    let mut queue = VecDeque::from([p]);
    while let Some(x) = queue.pop_front() {
        for phi in &moves {
            let y = phi.apply(x);
            if seen.insert(y) {
                if seen.len() >= cap {
                    return Ok(ProbeOutcome::CapHit { reached: seen.len() });
                }
                queue.push_back(y);
            }
        }
    }
    Ok(ProbeOutcome::Orbit(seen.into_iter().collect()))
}
