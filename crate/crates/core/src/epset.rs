//! Eventually periodic subsets of `Z`.
//!
//! A set is stored as an explicit core on `[-B, B)` together with two residue
//! patterns modulo a common period `M`: one describing membership for
//! `k >= B`, the other for `k < -B`. Every constructor returns the canonical
//! form (minimal `M`, then minimal `B`), so structural equality is
//! extensional equality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EPSet {
    period: i64,
    bound: i64,
    core: Vec<bool>,
    pos: Vec<bool>,
    neg: Vec<bool>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

impl EPSet {
    /// Builds the canonical set whose membership is `member`, which must be
    /// `period`-periodic on `[bound, ∞)` and on `(-∞, -bound)`.
    pub fn tabulate(period: i64, bound: i64, member: impl Fn(i64) -> bool) -> Self {
        assert!(period >= 1 && bound >= 0);
        let core = (-bound..bound).map(&member).collect();
        let pos = (0..period)
            .map(|r| member(bound + (r - bound).rem_euclid(period)))
            .collect();
        let neg = (0..period)
            .map(|r| member(-bound - 1 - (-bound - 1 - r).rem_euclid(period)))
            .collect();
        let mut s = EPSet { period, bound, core, pos, neg };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        let m = self.period;
        let mut best = m;
        for d in 1..m {
            if m % d == 0 && (0..m as usize).all(|r| self.pos[r] == self.pos[r % d as usize] && self.neg[r] == self.neg[r % d as usize]) {
                best = d;
                break;
            }
        }
        if best != m {
            self.pos.truncate(best as usize);
            self.neg.truncate(best as usize);
            self.period = best;
        }
        // Shrink the core while the outermost entries agree with the tails.
        let mut b = self.bound;
        while b > 0 {
            let hi = b - 1;
            let lo = -b;
            let core_hi = self.core[(hi + self.bound) as usize];
            let core_lo = self.core[(lo + self.bound) as usize];
            if core_hi == self.pos[hi.rem_euclid(self.period) as usize]
                && core_lo == self.neg[lo.rem_euclid(self.period) as usize]
            {
                b -= 1;
            } else {
                break;
            }
        }
        if b != self.bound {
            let start = (self.bound - b) as usize;
            self.core = self.core[start..start + 2 * b as usize].to_vec();
            self.bound = b;
        }
    }

    pub fn empty() -> Self {
        Self::tabulate(1, 0, |_| false)
    }

    pub fn full() -> Self {
        Self::tabulate(1, 0, |_| true)
    }

    pub fn finite<I: IntoIterator<Item = i64>>(points: I) -> Self {
        let mut pts: Vec<i64> = points.into_iter().collect();
        pts.sort_unstable();
        pts.dedup();
        let bound = pts.iter().map(|&k| if k < 0 { -k } else { k + 1 }).max().unwrap_or(0);
        Self::tabulate(1, bound, |k| pts.binary_search(&k).is_ok())
    }

    pub fn singleton(k: i64) -> Self {
        Self::finite([k])
    }

    /// `{k : k >= from}`.
    pub fn at_least(from: i64) -> Self {
        Self::tabulate(1, from.abs() + 1, |k| k >= from)
    }

    /// `{k : k <= to}`.
    pub fn at_most(to: i64) -> Self {
        Self::tabulate(1, to.abs() + 1, |k| k <= to)
    }

    /// Closed interval `[lo, hi]` (empty when `lo > hi`).
    pub fn interval(lo: i64, hi: i64) -> Self {
        let bound = lo.abs().max(hi.abs()) + 1;
        Self::tabulate(1, bound, |k| lo <= k && k <= hi)
    }

    /// `{k : k ≡ residue (mod modulus)}` intersected with optional bounds.
    pub fn progression(modulus: i64, residue: i64, from: Option<i64>, to: Option<i64>) -> Self {
        assert!(modulus >= 1);
        let bound = from.map_or(0, |a| a.abs() + 1).max(to.map_or(0, |b| b.abs() + 1));
        Self::tabulate(modulus, bound, |k| {
            (k - residue).rem_euclid(modulus) == 0
                && from.is_none_or(|a| k >= a)
                && to.is_none_or(|b| k <= b)
        })
    }

    pub fn period(&self) -> i64 {
        self.period
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    #[inline]
    pub fn contains(&self, k: i64) -> bool {
        if k >= self.bound {
            self.pos[k.rem_euclid(self.period) as usize]
        } else if k < -self.bound {
            self.neg[k.rem_euclid(self.period) as usize]
        } else {
            self.core[(k + self.bound) as usize]
        }
    }

    fn combine(&self, other: &EPSet, op: impl Fn(bool, bool) -> bool) -> EPSet {
        let m = lcm(self.period, other.period);
        let b = self.bound.max(other.bound);
        Self::tabulate(m, b, |k| op(self.contains(k), other.contains(k)))
    }

    pub fn union(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a != b)
    }

    pub fn complement(&self) -> EPSet {
        EPSet {
            period: self.period,
            bound: self.bound,
            core: self.core.iter().map(|b| !b).collect(),
            pos: self.pos.iter().map(|b| !b).collect(),
            neg: self.neg.iter().map(|b| !b).collect(),
        }
    }

    /// Image under `k ↦ sign·k + offset` with `sign ∈ {+1, -1}`.
    pub fn affine_image(&self, sign: i64, offset: i64) -> EPSet {
        debug_assert!(sign == 1 || sign == -1);
        if sign == 1 && offset == 0 {
            return self.clone();
        }
        let b = self.bound + offset.abs() + 1;
        Self::tabulate(self.period, b, |j| self.contains(sign * (j - offset)))
    }

    pub fn translate(&self, offset: i64) -> EPSet {
        self.affine_image(1, offset)
    }

    pub fn negate(&self) -> EPSet {
        self.affine_image(-1, 0)
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && !self.core.iter().any(|&b| b)
    }

    pub fn is_finite(&self) -> bool {
        !self.pos.iter().any(|&b| b) && !self.neg.iter().any(|&b| b)
    }

    /// Members of a finite set in increasing order (`None` if infinite).
    pub fn finite_points(&self) -> Option<Vec<i64>> {
        if !self.is_finite() {
            return None;
        }
        Some(
            (-self.bound..self.bound)
                .filter(|&k| self.core[(k + self.bound) as usize])
                .collect(),
        )
    }

    /// Member of smallest absolute value (ties towards the negative side).
    pub fn some_member(&self) -> Option<i64> {
        if self.is_empty() {
            return None;
        }
        let reach = self.bound + self.period + 1;
        (0..=reach).flat_map(|d| [-d, d]).find(|&k| self.contains(k))
    }

    pub fn members_in(&self, lo: i64, hi: i64) -> impl Iterator<Item = i64> + '_ {
        (lo..=hi).filter(move |&k| self.contains(k))
    }

    /// Decomposes into disjoint on-disk components.
    pub fn to_components(&self) -> Vec<Component> {
        let mut out = Vec::new();
        let core: Vec<i64> = (-self.bound..self.bound)
            .filter(|&k| self.core[(k + self.bound) as usize])
            .collect();
        if !core.is_empty() {
            out.push(Component::Finite { points: core });
        }
        let tail = |pattern: &[bool], upper: bool, out: &mut Vec<Component>| {
            if pattern.iter().all(|&b| b) {
                out.push(Component::Halfline {
                    sign: if upper { 1 } else { -1 },
                    from: if upper { self.bound } else { -self.bound - 1 },
                });
                return;
            }
            for (r, _) in pattern.iter().enumerate().filter(|(_, &b)| b) {
                out.push(Component::Progression {
                    modulus: self.period,
                    residue: r as i64,
                    from: upper.then_some(self.bound),
                    to: (!upper).then_some(-self.bound - 1),
                });
            }
        };
        tail(&self.pos, true, &mut out);
        tail(&self.neg, false, &mut out);
        out
    }

    pub fn from_components(components: &[Component]) -> Result<EPSet> {
        let mut acc = EPSet::empty();
        for c in components {
            acc = acc.union(&c.to_set()?);
        }
        Ok(acc)
    }
}

/// On-disk building block of an [`EPSet`]; a line is the union of its
/// components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Component {
    Progression {
        #[serde(rename = "mod")]
        modulus: i64,
        residue: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        from: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        to: Option<i64>,
    },
    Finite {
        points: Vec<i64>,
    },
    Halfline {
        sign: i8,
        from: i64,
    },
}

impl Component {
    pub fn to_set(&self) -> Result<EPSet> {
        match *self {
            Component::Progression { modulus, residue, from, to } => {
                if modulus < 1 {
                    return Err(Error::Parse(format!("progression modulus {modulus} < 1")));
                }
                Ok(EPSet::progression(modulus, residue, from, to))
            }
            Component::Finite { ref points } => Ok(EPSet::finite(points.iter().copied())),
            Component::Halfline { sign: 1, from } => Ok(EPSet::at_least(from)),
            Component::Halfline { sign: -1, from } => Ok(EPSet::at_most(from)),
            Component::Halfline { sign, .. } => Err(Error::Parse(format!("halfline sign {sign}"))),
        }
    }
}

impl fmt::Debug for EPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EPSet{}", self)
    }
}

impl fmt::Display for EPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        write!(f, "{{")?;
        let core: Vec<String> = (-self.bound..self.bound)
            .filter(|&k| self.core[(k + self.bound) as usize])
            .map(|k| k.to_string())
            .collect();
        write!(f, "core[{}]", core.join(","))?;
        if !self.is_finite() {
            write!(f, "; mod {}: <{} {}>", self.period, bits(&self.neg), bits(&self.pos))?;
        }
        if self.bound > 0 {
            write!(f, "; B={}", self.bound)?;
        }
        write!(f, "}}")
    }
}
