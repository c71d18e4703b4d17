use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement, GroupSpec, VirtZData};

/// A point `(k, x_i)·p` of the orbit, stored with a 0-based line index.
/// Ordering is by `(line, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitPoint {
    pub line: usize,
    pub k: i64,
}

impl OrbitPoint {
    pub fn new(k: i64, line: usize) -> Self {
        OrbitPoint { line, k }
    }
}

impl fmt::Display for OrbitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, line{})", self.k, self.line + 1)
    }
}

/// Per-line affine map `(k, i) ↦ (sign·k + offset, target)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineMap {
    pub target: usize,
    pub sign: i64,
    pub offset: i64,
}

/// The action of one group element on the orbit, one [`LineMap`] per line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineAffineAction {
    maps: Vec<LineMap>,
}

impl LineAffineAction {
    pub fn identity(lines: usize) -> Self {
        LineAffineAction {
            maps: (0..lines).map(|i| LineMap { target: i, sign: 1, offset: 0 }).collect(),
        }
    }

    pub fn maps(&self) -> &[LineMap] {
        &self.maps
    }

    pub fn map(&self, line: usize) -> LineMap {
        self.maps[line]
    }

    #[inline]
    pub fn apply(&self, p: OrbitPoint) -> OrbitPoint {
        let m = self.maps[p.line];
        OrbitPoint { line: m.target, k: m.sign * p.k + m.offset }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LineAffineAction) -> LineAffineAction {
        let maps = other
            .maps
            .iter()
            .map(|inner| {
                let outer = self.maps[inner.target];
                LineMap {
                    target: outer.target,
                    sign: outer.sign * inner.sign,
                    offset: outer.sign * inner.offset + outer.offset,
                }
            })
            .collect();
        LineAffineAction { maps }
    }

    pub fn inverse(&self) -> LineAffineAction {
        let mut maps = vec![LineMap { target: 0, sign: 1, offset: 0 }; self.maps.len()];
        for (i, m) in self.maps.iter().enumerate() {
            // k' = s k + c  =>  k = s (k' - c)
            maps[m.target] = LineMap { target: i, sign: m.sign, offset: -m.sign * m.offset };
        }
        LineAffineAction { maps }
    }

    pub fn is_identity(&self) -> bool {
        self.maps
            .iter()
            .enumerate()
            .all(|(i, m)| m.target == i && m.sign == 1 && m.offset == 0)
    }
}

/// Orbit coordinates for a virtually-`Z` group acting on `G/H`, `H` the
/// finite stabilizer of the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitModel {
    group: Group,
    data: Arc<VirtZData>,
    stabilizer: Vec<(i64, usize)>,
    reps: Vec<usize>,
    // For every x in Q: (line j, h = (t, z) in H) with x·z = x_j.
    canon: Vec<(usize, i64, usize)>,
}

impl OrbitModel {
    /// Validates the stabilizer (finite, a subgroup, commuting with
    /// `Z x {e}`) and picks coset representatives: `x_1 = e`, then the
    /// smallest `Q` index of each remaining coset.
    pub fn new(data: Arc<VirtZData>, stabilizer: &[(i64, usize)]) -> Result<Self> {
        let q = data.q();
        let n = q.order();
        let e = q.identity();
        if let Some(&(_, x)) = stabilizer.iter().find(|&&(_, x)| x >= n) {
            return Err(Error::BackendMismatch(format!("Q index {x} out of range")));
        }
        if let Some(&(a, _)) = stabilizer.iter().find(|&&(a, x)| x == e && a != 0) {
            return Err(Error::InfiniteStabilizer(a));
        }
        let mut h: Vec<(i64, usize)> = stabilizer.to_vec();
        h.push((0, e));
        h.sort_unstable();
        h.dedup();
        for &u in &h {
            let ui = data.inv(u);
            if h.binary_search(&ui).is_err() {
                return Err(Error::NotSubgroup(format!("inverse of ({},{}) missing", u.0, u.1)));
            }
            for &v in &h {
                let p = data.mul(u, v);
                if p.1 == e && p.0 != 0 {
                    return Err(Error::InfiniteStabilizer(p.0));
                }
                if h.binary_search(&p).is_err() {
                    return Err(Error::NotSubgroup(format!(
                        "product ({},{})·({},{}) = ({},{}) missing",
                        u.0, u.1, v.0, v.1, p.0, p.1
                    )));
                }
            }
        }
        let tau = (1, e);
        for &u in &h {
            if data.mul(u, tau) != data.mul(tau, u) {
                return Err(Error::NotCommuting(format!(
                    "({},{}) does not commute with (1,e); rescale the normal Z subgroup",
                    u.0, u.1
                )));
            }
        }

        let mut reps = vec![e];
        let mut coset_of = vec![usize::MAX; n];
        for &(_, z) in &h {
            coset_of[z] = 0;
        }
        for x in 0..n {
            if coset_of[x] == usize::MAX {
                let line = reps.len();
                reps.push(x);
                for &(_, z) in &h {
                    coset_of[q.mul(x, z)] = line;
                }
            }
        }
        let mut canon = vec![(usize::MAX, 0, 0); n];
        for (x, slot) in canon.iter_mut().enumerate() {
            let j = coset_of[x];
            let &(t, z) = h
                .iter()
                .find(|&&(_, z)| q.mul(x, z) == reps[j])
                .expect("coset representative reachable inside the coset");
            *slot = (j, t, z);
        }
        Ok(OrbitModel { group: Group::VirtZ(data.clone()), data, stabilizer: h, reps, canon })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn data(&self) -> &Arc<VirtZData> {
        &self.data
    }

    /// Number of lines `m = |Q| / |H|`.
    pub fn lines(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn stabilizer(&self) -> &[(i64, usize)] {
        &self.stabilizer
    }

    /// `max |t|` over `(t, z)` in the stabilizer.
    pub fn stabilizer_height(&self) -> i64 {
        self.stabilizer.iter().map(|&(t, _)| t.abs()).max().unwrap_or(0)
    }

    /// Sign of line `i`: `alpha(x_i)`.
    pub fn line_sign(&self, line: usize) -> i64 {
        self.data.alpha(self.reps[line])
    }

    /// The group element `(k, x_i) = tau^k sigma_i` carrying the base point
    /// to `p`.
    pub fn element_at(&self, p: OrbitPoint) -> (i64, usize) {
        (p.k, self.reps[p.line])
    }

    /// Orbit point `g·p_0` for an arbitrary element `g = (a, x)`.
    pub fn point_of(&self, (a, x): (i64, usize)) -> OrbitPoint {
        let (j, t, z) = self.canon[x];
        OrbitPoint { line: j, k: self.data.f(x, z) + a + self.data.alpha(x) * t }
    }

    /// Direct evaluation of `g·p` through the group law; independent of
    /// [`OrbitModel::line_action`].
    pub fn act(&self, g: (i64, usize), p: OrbitPoint) -> OrbitPoint {
        self.point_of(self.data.mul(g, self.element_at(p)))
    }

    pub fn line_action(&self, g: (i64, usize)) -> LineAffineAction {
        let (l, y) = g;
        let q = self.data.q();
        let maps = self
            .reps
            .iter()
            .map(|&xi| {
                let yx = q.mul(y, xi);
                let (j, t, z) = self.canon[yx];
                LineMap {
                    target: j,
                    sign: self.data.alpha(y),
                    offset: self.data.f(yx, z) + self.data.f(y, xi) + l + self.data.alpha(yx) * t,
                }
            })
            .collect();
        LineAffineAction { maps }
    }

    pub fn line_action_of(&self, g: &GroupElement) -> Result<LineAffineAction> {
        self.group.check(g)?;
        Ok(self.line_action(g.as_virtz().expect("checked backend")))
    }

    /// Generators `tau, sigma_2, ..., sigma_m` of the Schreier graph, with
    /// names.
    pub fn schreier_generators(&self) -> Vec<(String, (i64, usize))> {
        let e = self.data.q().identity();
        let mut out = vec![("t".to_string(), (1, e))];
        for (i, &x) in self.reps.iter().enumerate().skip(1) {
            out.push((format!("s{}", i + 1), (0, x)));
        }
        out
    }

    /// Symmetric step set for walks on the Schreier graph: each generator
    /// followed by its inverse when that acts differently on the orbit.
    pub fn schreier_steps(&self) -> Vec<(String, LineAffineAction)> {
        let mut out: Vec<(String, LineAffineAction)> = Vec::new();
        for (name, g) in self.schreier_generators() {
            let act = self.line_action(g);
            let inv = act.inverse();
            let differs = inv != act;
            out.push((name.clone(), act));
            if differs {
                out.push((name.to_uppercase(), inv));
            }
        }
        out
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            group: self.group.spec(),
            stabilizer: self.stabilizer.iter().map(|&(t, z)| [t, z as i64]).collect(),
        }
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        let group = Group::from_spec(&file.group)?;
        let data = group
            .virtz_data()
            .ok_or_else(|| Error::Parse("orbit models need a virtz group".into()))?
            .clone();
        let h: Vec<(i64, usize)> = file
            .stabilizer
            .iter()
            .map(|&[t, z]| {
                if z < 0 {
                    Err(Error::Parse(format!("negative Q index {z}")))
                } else {
                    Ok((t, z as usize))
                }
            })
            .collect::<Result<_>>()?;
        OrbitModel::new(data, &h)
    }
}

/// On-disk orbit model: a virtually-`Z` group and the base-point stabilizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub group: GroupSpec,
    #[serde(default)]
    pub stabilizer: Vec<[i64; 2]>,
}
