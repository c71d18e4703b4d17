use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{LineAffineAction, OrbitModel, OrbitPoint};
use crate::epset::{Component, EPSet};
use crate::error::{Error, Result};
use crate::group::GroupElement;

/// A subset of the orbit given by one [`EPSet`] per line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitSet {
    lines: Vec<EPSet>,
}

impl OrbitSet {
    pub fn empty(lines: usize) -> Self {
        OrbitSet { lines: vec![EPSet::empty(); lines] }
    }

    pub fn full(lines: usize) -> Self {
        OrbitSet { lines: vec![EPSet::full(); lines] }
    }

    pub fn from_lines(lines: Vec<EPSet>) -> Self {
        OrbitSet { lines }
    }

    pub fn from_points(lines: usize, points: &[OrbitPoint]) -> Self {
        let mut per: Vec<Vec<i64>> = vec![Vec::new(); lines];
        for p in points {
            per[p.line].push(p.k);
        }
        OrbitSet { lines: per.into_iter().map(EPSet::finite).collect() }
    }

    pub fn line(&self, i: usize) -> &EPSet {
        &self.lines[i]
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn contains(&self, p: OrbitPoint) -> bool {
        self.lines[p.line].contains(p.k)
    }

    fn zip(&self, other: &OrbitSet, op: impl Fn(&EPSet, &EPSet) -> EPSet) -> OrbitSet {
        OrbitSet { lines: self.lines.iter().zip(&other.lines).map(|(a, b)| op(a, b)).collect() }
    }

    pub fn union(&self, other: &OrbitSet) -> OrbitSet {
        self.zip(other, EPSet::union)
    }

    pub fn intersection(&self, other: &OrbitSet) -> OrbitSet {
        self.zip(other, EPSet::intersection)
    }

    pub fn difference(&self, other: &OrbitSet) -> OrbitSet {
        self.zip(other, EPSet::difference)
    }

    pub fn symmetric_difference(&self, other: &OrbitSet) -> OrbitSet {
        self.zip(other, EPSet::symmetric_difference)
    }

    pub fn complement(&self) -> OrbitSet {
        OrbitSet { lines: self.lines.iter().map(EPSet::complement).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.lines.iter().all(EPSet::is_empty)
    }

    pub fn is_finite(&self) -> bool {
        self.lines.iter().all(EPSet::is_finite)
    }

    /// Image under a line action.
    pub fn image(&self, action: &LineAffineAction) -> OrbitSet {
        let mut out = vec![EPSet::empty(); self.lines.len()];
        for (i, set) in self.lines.iter().enumerate() {
            let m = action.map(i);
            out[m.target] = out[m.target].union(&set.affine_image(m.sign, m.offset));
        }
        OrbitSet { lines: out }
    }

    /// Points of a finite set sorted by `(line, k)`; `None` when infinite.
    pub fn points(&self) -> Option<Vec<OrbitPoint>> {
        let mut out = Vec::new();
        for (line, set) in self.lines.iter().enumerate() {
            out.extend(set.finite_points()?.into_iter().map(|k| OrbitPoint { line, k }));
        }
        Some(out)
    }

    /// Some member, preferring small lines and small `|k|`.
    pub fn some_member(&self) -> Option<OrbitPoint> {
        self.lines
            .iter()
            .enumerate()
            .find_map(|(line, s)| s.some_member().map(|k| OrbitPoint { line, k }))
    }

    pub fn to_file(&self) -> BTreeMap<String, Vec<Component>> {
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(i, s)| ((i + 1).to_string(), s.to_components()))
            .collect()
    }

    pub fn from_file(lines: usize, file: &BTreeMap<String, Vec<Component>>) -> Result<Self> {
        let mut out = vec![EPSet::empty(); lines];
        for (key, comps) in file {
            let i: usize = key
                .parse()
                .ok()
                .filter(|&i| (1..=lines).contains(&i))
                .ok_or_else(|| Error::Parse(format!("bad line key {key:?}")))?;
            out[i - 1] = out[i - 1].union(&EPSet::from_components(comps)?);
        }
        Ok(OrbitSet { lines: out })
    }
}

/// One piece of a piecewise map: the element `g` applied on `domain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub domain: OrbitSet,
    pub g: (i64, usize),
    pub action: LineAffineAction,
}

/// A bijection of the orbit given piecewise by group elements on
/// eventually-periodic pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseElement {
    pieces: Vec<Piece>,
}

impl PiecewiseElement {
    /// Builds and validates: domains must partition the orbit and so must
    /// their images.
    pub fn new(model: &OrbitModel, pieces: Vec<(OrbitSet, (i64, usize))>) -> Result<Self> {
        let n = model.data().q().order();
        if let Some(&(_, (_, x))) = pieces.iter().find(|(_, (_, x))| *x >= n) {
            return Err(Error::BackendMismatch(format!("Q index {x} out of range")));
        }
        let el = Self::assemble(model, pieces);
        el.validate(model)?;
        Ok(el)
    }

    /// Merges pieces with equal elements and drops empty ones; no checks.
    fn assemble(model: &OrbitModel, pieces: Vec<(OrbitSet, (i64, usize))>) -> Self {
        let mut merged: Vec<Piece> = Vec::new();
        for (domain, g) in pieces {
            if domain.is_empty() {
                continue;
            }
            match merged.iter_mut().find(|p| p.g == g) {
                Some(p) => p.domain = p.domain.union(&domain),
                None => merged.push(Piece { domain, g, action: model.line_action(g) }),
            }
        }
        PiecewiseElement { pieces: merged }
    }

    pub fn validate(&self, model: &OrbitModel) -> Result<()> {
        let m = model.lines();
        let witness = |set: &OrbitSet, reason: &str| {
            let p = set.some_member().expect("nonempty");
            Error::NotBijective { reason: reason.to_string(), k: p.k, line: p.line + 1 }
        };
        let mut seen = OrbitSet::empty(m);
        let mut seen_img = OrbitSet::empty(m);
        for piece in &self.pieces {
            if piece.domain.num_lines() != m {
                return Err(Error::Parse("piece line count differs from model".into()));
            }
            let overlap = seen.intersection(&piece.domain);
            if !overlap.is_empty() {
                return Err(witness(&overlap, "pieces overlap"));
            }
            seen = seen.union(&piece.domain);
            let img = piece.domain.image(&piece.action);
            let overlap = seen_img.intersection(&img);
            if !overlap.is_empty() {
                return Err(witness(&overlap, "images overlap"));
            }
            seen_img = seen_img.union(&img);
        }
        let missing = seen.complement();
        if !missing.is_empty() {
            return Err(witness(&missing, "pieces do not cover the orbit"));
        }
        let missing = seen_img.complement();
        if !missing.is_empty() {
            return Err(witness(&missing, "images do not cover the orbit"));
        }
        Ok(())
    }

    pub fn identity(model: &OrbitModel) -> Self {
        Self::global(model, (0, model.data().q().identity()))
    }

    /// The element `g` acting on the whole orbit.
    pub fn global(model: &OrbitModel, g: (i64, usize)) -> Self {
        Self::assemble(model, vec![(OrbitSet::full(model.lines()), g)])
    }

    /// Finite permutation given as `(from, to)` pairs, identity elsewhere.
    pub fn finite_permutation(model: &OrbitModel, moves: &[(OrbitPoint, OrbitPoint)]) -> Result<Self> {
        let m = model.lines();
        let mut pieces = Vec::new();
        let mut moved = Vec::new();
        for &(from, to) in moves {
            if from == to {
                continue;
            }
            let g = model.data().mul(model.element_at(to), model.data().inv(model.element_at(from)));
            pieces.push((OrbitSet::from_points(m, &[from]), g));
            moved.push(from);
        }
        let rest = OrbitSet::from_points(m, &moved).complement();
        pieces.push((rest, (0, model.data().q().identity())));
        Self::new(model, pieces)
    }

    /// Swaps `p` and `q`.
    pub fn transposition(model: &OrbitModel, p: OrbitPoint, q: OrbitPoint) -> Result<Self> {
        Self::finite_permutation(model, &[(p, q), (q, p)])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn apply(&self, p: OrbitPoint) -> OrbitPoint {
        self.pieces
            .iter()
            .find(|piece| piece.domain.contains(p))
            .expect("pieces cover the orbit")
            .action
            .apply(p)
    }

    /// Group element used at `p`.
    pub fn element_at(&self, p: OrbitPoint) -> (i64, usize) {
        self.pieces.iter().find(|piece| piece.domain.contains(p)).expect("pieces cover the orbit").g
    }

    /// `self ∘ other`.
    pub fn compose(&self, model: &OrbitModel, other: &PiecewiseElement) -> PiecewiseElement {
        let mut pieces = Vec::new();
        for inner in &other.pieces {
            let back = inner.action.inverse();
            for outer in &self.pieces {
                let dom = inner.domain.intersection(&outer.domain.image(&back));
                if !dom.is_empty() {
                    pieces.push((dom, model.data().mul(outer.g, inner.g)));
                }
            }
        }
        Self::assemble(model, pieces)
    }

    pub fn inverse(&self, model: &OrbitModel) -> PiecewiseElement {
        let pieces = self
            .pieces
            .iter()
            .map(|p| (p.domain.image(&p.action), model.data().inv(p.g)))
            .collect();
        Self::assemble(model, pieces)
    }

    /// Image of a set.
    pub fn image(&self, set: &OrbitSet) -> OrbitSet {
        let mut out = OrbitSet::empty(set.num_lines());
        for p in &self.pieces {
            out = out.union(&p.domain.intersection(set).image(&p.action));
        }
        out
    }

    /// Finite set `S` with `φ(x) ∈ S·x` for every `x`.
    pub fn support_elements(&self) -> Vec<(i64, usize)> {
        self.pieces.iter().map(|p| p.g).collect()
    }

    pub fn to_file(&self, model: &OrbitModel) -> PiecewiseFile {
        PiecewiseFile {
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceFile {
                    domain: p.domain.to_file(),
                    g: model.group().element_to_json(&GroupElement::virtz(p.g.0, p.g.1)),
                })
                .collect(),
        }
    }

    pub fn from_file(model: &OrbitModel, file: &PiecewiseFile) -> Result<Self> {
        let pieces = file
            .pieces
            .iter()
            .map(|p| {
                let g = model.group().element_from_json(&p.g)?;
                let dom = OrbitSet::from_file(model.lines(), &p.domain)?;
                Ok((dom, g.as_virtz().expect("virtz payload")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(model, pieces)
    }
}

/// On-disk piecewise element: pieces keyed by 1-based line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFile {
    pub pieces: Vec<PieceFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceFile {
    #[serde(rename = "line")]
    pub domain: BTreeMap<String, Vec<Component>>,
    pub g: serde_json::Value,
}
