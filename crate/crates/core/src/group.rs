//! Exact group arithmetic for the three supported backends: free abelian
//! groups `Z^d`, free groups `F_k`, and virtually-`Z` extensions given by
//! finite extension data `(Q, f, alpha)`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Multiplication table of a finite group on `[0, order)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroupTable {
    /// Validates the table (closure, identity, inverses, associativity).
    pub fn new(rows: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::GroupLaw { law: "nonempty", indices: vec![] });
        }
        if identity >= order {
            return Err(Error::GroupLaw { law: "identity index in range", indices: vec![identity as i64] });
        }
        let mut mul = Vec::with_capacity(order * order);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::GroupLaw { law: "square table", indices: vec![i as i64] });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(Error::GroupLaw { law: "closure", indices: vec![i as i64, j as i64] });
                }
                mul.push(v);
            }
        }
        let at = |x: usize, y: usize| mul[x * order + y];
        for x in 0..order {
            if at(identity, x) != x || at(x, identity) != x {
                return Err(Error::GroupLaw { law: "identity", indices: vec![x as i64] });
            }
        }
        let mut inverse = vec![usize::MAX; order];
        for x in 0..order {
            match (0..order).find(|&y| at(x, y) == identity && at(y, x) == identity) {
                Some(y) => inverse[x] = y,
                None => return Err(Error::GroupLaw { law: "inverse", indices: vec![x as i64] }),
            }
        }
        for x in 0..order {
            for y in 0..order {
                for z in 0..order {
                    if at(at(x, y), z) != at(x, at(y, z)) {
                        return Err(Error::GroupLaw {
                            law: "associativity",
                            indices: vec![x as i64, y as i64, z as i64],
                        });
                    }
                }
            }
        }
        Ok(FiniteGroupTable { order, mul, identity, inverse })
    }

    /// `Z/n` with identity 0.
    pub fn cyclic(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::new(rows, 0).expect("cyclic table is a group")
    }

    /// Direct product; the pair `(i, j)` has index `i * other.order() + j`.
    pub fn product(&self, other: &FiniteGroupTable) -> Self {
        let (n, m) = (self.order, other.order);
        let rows = (0..n * m)
            .map(|u| {
                (0..n * m)
                    .map(|v| self.mul(u / m, v / m) * m + other.mul(u % m, v % m))
                    .collect()
            })
            .collect();
        Self::new(rows, self.identity * m + other.identity).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order + y]
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(|r| r.to_vec()).collect()
    }
}

/// Extension data of a virtually-`Z` group: the set `Z x Q` with
/// `(a,x)(b,y) = (f(x,y) + a + alpha(x) b, xy)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtZData {
    q: FiniteGroupTable,
    f: Vec<i64>,
    alpha: Vec<i8>,
}

impl VirtZData {
    /// Validates normalization, the homomorphism law for `alpha` and the
    /// cocycle law; the first violated law is reported with its indices.
    pub fn new(q: FiniteGroupTable, f: Vec<Vec<i64>>, alpha: Vec<i8>) -> Result<Self> {
        let n = q.order();
        if f.len() != n || f.iter().any(|r| r.len() != n) {
            return Err(Error::GroupLaw { law: "cocycle table shape", indices: vec![n as i64] });
        }
        if alpha.len() != n {
            return Err(Error::GroupLaw { law: "alpha table shape", indices: vec![alpha.len() as i64] });
        }
        if let Some(x) = alpha.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::GroupLaw { law: "alpha values in {+1,-1}", indices: vec![x as i64] });
        }
        let data = VirtZData { q, f: f.into_iter().flatten().collect(), alpha };
        data.validate()?;
        Ok(data)
    }

    fn validate(&self) -> Result<()> {
        let n = self.q.order();
        let e = self.q.identity();
        for x in 0..n {
            for y in 0..n {
                let xy = self.q.mul(x, y);
                if self.alpha(xy) != self.alpha(x) * self.alpha(y) {
                    return Err(Error::GroupLaw {
                        law: "alpha homomorphism",
                        indices: vec![x as i64, y as i64],
                    });
                }
            }
        }
        for x in 0..n {
            if self.f(e, x) != 0 || self.f(x, e) != 0 {
                return Err(Error::GroupLaw { law: "cocycle normalization", indices: vec![x as i64] });
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.q.mul(x, y);
                for z in 0..n {
                    let yz = self.q.mul(y, z);
                    let lhs = self.f(x, y) + self.f(xy, z);
                    let rhs = self.alpha(x) * self.f(y, z) + self.f(x, yz);
                    if lhs != rhs {
                        return Err(Error::GroupLaw {
                            law: "cocycle",
                            indices: vec![x as i64, y as i64, z as i64],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The infinite dihedral group `Z ⋊ Z/2` (`f = 0`, `alpha(q) = -1`).
    pub fn infinite_dihedral() -> Self {
        Self::new(FiniteGroupTable::cyclic(2), vec![vec![0, 0], vec![0, 0]], vec![1, -1])
            .expect("dihedral data is valid")
    }

    /// `Z` itself viewed as an extension of `Z/2` by its index-two subgroup:
    /// `f(q,q) = 1`, `alpha` trivial.
    pub fn integers_over_even() -> Self {
        Self::new(FiniteGroupTable::cyclic(2), vec![vec![0, 0], vec![0, 1]], vec![1, 1])
            .expect("carry cocycle is valid")
    }

    /// Split extension `Z ⋊ Q` with `f = 0`.
    pub fn semidirect(q: FiniteGroupTable, alpha: Vec<i8>) -> Result<Self> {
        let n = q.order();
        Self::new(q, vec![vec![0; n]; n], alpha)
    }

    /// Changes the section by `b: Q -> Z` (with `b(e) = 0`); the result is an
    /// isomorphic extension whose cocycle is
    /// `f(x,y) + b(x) + alpha(x) b(y) - b(xy)`.
    pub fn with_coboundary(&self, b: &[i64]) -> Result<Self> {
        let n = self.q.order();
        if b.len() != n || b[self.q.identity()] != 0 {
            return Err(Error::Parse("coboundary must have |Q| entries and vanish at e".into()));
        }
        let f = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        self.f(x, y) + b[x] + self.alpha(x) * b[y] - b[self.q.mul(x, y)]
                    })
                    .collect()
            })
            .collect();
        Self::new(self.q.clone(), f, self.alpha.clone())
    }

    pub fn q(&self) -> &FiniteGroupTable {
        &self.q
    }

    #[inline]
    pub fn f(&self, x: usize, y: usize) -> i64 {
        self.f[x * self.q.order() + y]
    }

    #[inline]
    pub fn alpha(&self, x: usize) -> i64 {
        self.alpha[x] as i64
    }

    pub fn alpha_table(&self) -> &[i8] {
        &self.alpha
    }

    pub fn f_rows(&self) -> Vec<Vec<i64>> {
        self.f.chunks(self.q.order()).map(|r| r.to_vec()).collect()
    }

    /// `max |f|`.
    pub fn f_max(&self) -> i64 {
        self.f.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    #[inline]
    pub fn mul(&self, (a, x): (i64, usize), (b, y): (i64, usize)) -> (i64, usize) {
        (self.f(x, y) + a + self.alpha(x) * b, self.q.mul(x, y))
    }

    #[inline]
    pub fn inv(&self, (a, x): (i64, usize)) -> (i64, usize) {
        let xi = self.q.inv(x);
        (-self.alpha(x) * (a + self.f(x, xi)), xi)
    }
}

/// Canonical group element payload.
///
/// Free-group letters are `±(i+1)` for generator `i`; words are always
/// freely reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Zd(Vec<i64>),
    Free(Vec<i32>),
    VirtZ { a: i64, x: usize },
}

impl GroupElement {
    pub fn virtz(a: i64, x: usize) -> Self {
        GroupElement::VirtZ { a, x }
    }

    pub fn as_virtz(&self) -> Option<(i64, usize)> {
        match *self {
            GroupElement::VirtZ { a, x } => Some((a, x)),
            _ => None,
        }
    }
}

fn reduce_into(word: &mut Vec<i32>, letters: &[i32]) {
    for &l in letters {
        if word.last() == Some(&-l) {
            word.pop();
        } else {
            word.push(l);
        }
    }
}

/// A group backend together with its arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum Group {
    Zd { d: usize },
    Free { rank: usize },
    VirtZ(Arc<VirtZData>),
}

impl Group {
    pub fn zd(d: usize) -> Self {
        Group::Zd { d }
    }

    pub fn free(rank: usize) -> Self {
        Group::Free { rank }
    }

    pub fn virtz(data: VirtZData) -> Self {
        Group::VirtZ(Arc::new(data))
    }

    pub fn virtz_data(&self) -> Option<&Arc<VirtZData>> {
        match self {
            Group::VirtZ(d) => Some(d),
            _ => None,
        }
    }

    /// True for the backends whose groups have a finite-index cyclic subgroup.
    pub fn is_virtually_cyclic(&self) -> bool {
        match self {
            Group::Zd { d } => *d <= 1,
            Group::Free { rank } => *rank <= 1,
            Group::VirtZ(_) => true,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            Group::Zd { d } => GroupElement::Zd(vec![0; *d]),
            Group::Free { .. } => GroupElement::Free(Vec::new()),
            Group::VirtZ(data) => GroupElement::virtz(0, data.q().identity()),
        }
    }

    /// Checks that `g` is a canonical element of this backend.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        match (self, g) {
            (Group::Zd { d }, GroupElement::Zd(v)) if v.len() == *d => Ok(()),
            (Group::Free { rank }, GroupElement::Free(w)) => {
                if w.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > *rank) {
                    return Err(Error::BackendMismatch(format!("letter out of range in {w:?}")));
                }
                if w.windows(2).any(|p| p[0] == -p[1]) {
                    return Err(Error::BackendMismatch(format!("unreduced word {w:?}")));
                }
                Ok(())
            }
            (Group::VirtZ(data), GroupElement::VirtZ { x, .. }) if *x < data.q().order() => Ok(()),
            _ => Err(Error::BackendMismatch(format!("{g:?} is not an element of {}", self.name()))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Group::Zd { d } => format!("Z^{d}"),
            Group::Free { rank } => format!("F_{rank}"),
            Group::VirtZ(data) => format!("virtz(|Q|={})", data.q().order()),
        }
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        match (self, g, h) {
            (Group::Zd { d }, GroupElement::Zd(u), GroupElement::Zd(v)) if u.len() == *d && v.len() == *d => {
                Ok(GroupElement::Zd(u.iter().zip(v).map(|(a, b)| a + b).collect()))
            }
            (Group::Free { .. }, GroupElement::Free(u), GroupElement::Free(v)) => {
                let mut w = u.clone();
                reduce_into(&mut w, v);
                Ok(GroupElement::Free(w))
            }
            (Group::VirtZ(data), &GroupElement::VirtZ { a, x }, &GroupElement::VirtZ { a: b, x: y }) => {
                let n = data.q().order();
                if x >= n || y >= n {
                    return Err(Error::BackendMismatch(format!("Q index out of range ({x}, {y})")));
                }
                let (c, z) = data.mul((a, x), (b, y));
                Ok(GroupElement::virtz(c, z))
            }
            _ => Err(Error::BackendMismatch(format!("cannot multiply {g:?} and {h:?} in {}", self.name()))),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(match g {
            GroupElement::Zd(v) => GroupElement::Zd(v.iter().map(|a| -a).collect()),
            GroupElement::Free(w) => GroupElement::Free(w.iter().rev().map(|l| -l).collect()),
            &GroupElement::VirtZ { a, x } => {
                let data = self.virtz_data().expect("checked backend");
                let (b, y) = data.inv((a, x));
                GroupElement::virtz(b, y)
            }
        })
    }

    /// Standard symmetric generating set: unit vectors and their negatives
    /// for `Z^d`; free generators and inverses for `F_k`; `tau^{±1}` followed
    /// by `(0,x)` for `x != e` (and inverses) for virtually-`Z` data.
    pub fn standard_generators(&self) -> GeneratingSet {
        let mut elems = Vec::new();
        let mut names = Vec::new();
        match self {
            Group::Zd { d } => {
                for i in 0..*d {
                    for sign in [1, -1] {
                        let mut v = vec![0; *d];
                        v[i] = sign;
                        elems.push(GroupElement::Zd(v));
                        names.push(zd_generator_name(*d, i, sign));
                    }
                }
            }
            Group::Free { rank } => {
                for i in 0..*rank {
                    for sign in [1, -1] {
                        let l = sign * (i as i32 + 1);
                        elems.push(GroupElement::Free(vec![l]));
                        names.push(free_letter(l).to_string());
                    }
                }
            }
            Group::VirtZ(data) => {
                let e = data.q().identity();
                elems.push(GroupElement::virtz(1, e));
                names.push("t".to_string());
                elems.push(GroupElement::virtz(-1, e));
                names.push("T".to_string());
                for x in (0..data.q().order()).filter(|&x| x != e) {
                    let s = GroupElement::virtz(0, x);
                    if !elems.contains(&s) {
                        elems.push(s.clone());
                        names.push(format!("s{x}"));
                    }
                    let si = self.inverse(&s).expect("own element");
                    if !elems.contains(&si) {
                        elems.push(si);
                        names.push(format!("S{x}"));
                    }
                }
            }
        }
        GeneratingSet::new(self, elems, names).expect("standard generators are symmetric")
    }

    /// Human-readable payload string.
    pub fn format(&self, g: &GroupElement) -> String {
        match g {
            GroupElement::Zd(v) => {
                let parts: Vec<String> = v.iter().map(|a| a.to_string()).collect();
                format!("({})", parts.join(","))
            }
            GroupElement::Free(w) if w.is_empty() => "1".to_string(),
            GroupElement::Free(w) => w.iter().map(|&l| free_letter(l)).collect(),
            GroupElement::VirtZ { a, x } => format!("({a},{x})"),
        }
    }

    pub fn element_to_json(&self, g: &GroupElement) -> Value {
        match g {
            GroupElement::Zd(v) => Value::from(v.clone()),
            GroupElement::Free(_) => Value::from(self.format(g)),
            GroupElement::VirtZ { a, x } => Value::from(vec![*a, *x as i64]),
        }
    }

    pub fn element_from_json(&self, v: &Value) -> Result<GroupElement> {
        let bad = || Error::Parse(format!("bad element payload {v} for {}", self.name()));
        let g = match self {
            Group::Zd { .. } => {
                let arr = v.as_array().ok_or_else(bad)?;
                GroupElement::Zd(arr.iter().map(|a| a.as_i64().ok_or_else(bad)).collect::<Result<_>>()?)
            }
            Group::Free { .. } => {
                let s = v.as_str().ok_or_else(bad)?;
                self.parse_free_word(s)?
            }
            Group::VirtZ(_) => {
                let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let a = arr[0].as_i64().ok_or_else(bad)?;
                let x = arr[1].as_u64().ok_or_else(bad)? as usize;
                GroupElement::virtz(a, x)
            }
        };
        self.check(&g)?;
        Ok(g)
    }

    /// Parses a free-group word (`a`..`z` generators, upper case inverses,
    /// `1` for the identity) and reduces it.
    pub fn parse_free_word(&self, s: &str) -> Result<GroupElement> {
        let mut w = Vec::new();
        if s != "1" {
            for c in s.chars() {
                let l = if c.is_ascii_lowercase() {
                    (c as u8 - b'a') as i32 + 1
                } else if c.is_ascii_uppercase() {
                    -((c as u8 - b'A') as i32 + 1)
                } else {
                    return Err(Error::Parse(format!("bad free-group letter {c:?}")));
                };
                reduce_into(&mut w, &[l]);
            }
        }
        let g = GroupElement::Free(w);
        self.check(&g)?;
        Ok(g)
    }

    pub fn spec(&self) -> GroupSpec {
        match self {
            Group::Zd { d } => GroupSpec::Zd { d: *d },
            Group::Free { rank } => GroupSpec::Free { rank: *rank },
            Group::VirtZ(data) => GroupSpec::Virtz {
                q: data.q().rows(),
                f: data.f_rows(),
                alpha: data.alpha_table().to_vec(),
                identity: data.q().identity(),
            },
        }
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        match spec {
            GroupSpec::Zd { d } if *d >= 1 => Ok(Group::zd(*d)),
            GroupSpec::Free { rank } if (1..=26).contains(rank) => Ok(Group::free(*rank)),
            GroupSpec::Virtz { q, f, alpha, identity } => {
                let table = FiniteGroupTable::new(q.clone(), *identity)?;
                Ok(Group::virtz(VirtZData::new(table, f.clone(), alpha.clone())?))
            }
            _ => Err(Error::Parse(format!("unsupported group spec {spec:?}"))),
        }
    }
}

fn free_letter(l: i32) -> char {
    let i = (l.unsigned_abs() - 1) as u8;
    if l > 0 {
        (b'a' + i) as char
    } else {
        (b'A' + i) as char
    }
}

fn zd_generator_name(d: usize, i: usize, sign: i64) -> String {
    if d <= 3 {
        let c = [b'x', b'y', b'z'][i];
        let c = if sign > 0 { c } else { c.to_ascii_uppercase() };
        (c as char).to_string()
    } else if sign > 0 {
        format!("e{}", i + 1)
    } else {
        format!("E{}", i + 1)
    }
}

/// On-disk group description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
pub enum GroupSpec {
    Zd { d: usize },
    Free { rank: usize },
    Virtz {
        #[serde(rename = "Q")]
        q: Vec<Vec<usize>>,
        f: Vec<Vec<i64>>,
        alpha: Vec<i8>,
        identity: usize,
    },
}

/// Ordered symmetric generating set; the order drives all downstream
/// tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingSet {
    elements: Vec<GroupElement>,
    names: Vec<String>,
    inverse_index: Vec<usize>,
}

impl GeneratingSet {
    pub fn new(group: &Group, elements: Vec<GroupElement>, names: Vec<String>) -> Result<Self> {
        if elements.len() != names.len() || elements.is_empty() {
            return Err(Error::Parse("generator names must match generators".into()));
        }
        let id = group.identity();
        let mut inverse_index = Vec::with_capacity(elements.len());
        for (i, s) in elements.iter().enumerate() {
            group.check(s)?;
            if *s == id {
                return Err(Error::Parse(format!("generator {} is the identity", names[i])));
            }
            if elements[..i].contains(s) {
                return Err(Error::Parse(format!("duplicate generator {}", names[i])));
            }
            let si = group.inverse(s)?;
            match elements.iter().position(|t| *t == si) {
                Some(j) => inverse_index.push(j),
                None => return Err(Error::Parse(format!("generating set not symmetric at {}", names[i]))),
            }
        }
        Ok(GeneratingSet { elements, names, inverse_index })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Index of the inverse generator.
    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse_index[i]
    }
}

/// Outcome of [`subgroup_classify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupClass {
    /// The generated subgroup is finite of the given order.
    Finite { order: usize },
    /// `H ∩ (Z x {e}) = kZ x {e}` and `|G : H| = index`.
    FiniteIndex { k: i64, index: usize },
}

/// Decides which branch of the finite/finite-index dichotomy the subgroup
/// generated by `gens` falls in, with an exact certificate, or returns
/// [`Error::Inconclusive`] if neither is certified within `search_bound`
/// product levels.
pub fn subgroup_classify(data: &VirtZData, gens: &[(i64, usize)], search_bound: usize) -> Result<SubgroupClass> {
    let n = data.q().order();
    if let Some(&(_, x)) = gens.iter().find(|&&(_, x)| x >= n) {
        return Err(Error::BackendMismatch(format!("Q index {x} out of range")));
    }
    let e = data.q().identity();
    let mut steps: Vec<(i64, usize)> = gens.to_vec();
    steps.extend(gens.iter().map(|&g| data.inv(g)));

    let mut seen: HashSet<(i64, usize)> = HashSet::new();
    seen.insert((0, e));
    let mut frontier = vec![(0, e)];
    let mut kernel_gcd: i64 = 0;
    for _ in 0..search_bound {
        let mut next = Vec::new();
        for &g in &frontier {
            for &s in &steps {
                let p = data.mul(g, s);
                if p.1 == e && p.0 != 0 {
                    kernel_gcd = num_integer_gcd(kernel_gcd, p.0.abs());
                }
                if seen.insert(p) {
                    next.push(p);
                }
            }
        }
        if kernel_gcd > 0 {
            break;
        }
        if next.is_empty() {
            return Ok(SubgroupClass::Finite { order: seen.len() });
        }
        frontier = next;
    }
    if kernel_gcd == 0 {
        return Err(Error::Inconclusive { bound: search_bound });
    }

    // Exact closure in G / (k'Z x {e}), which is finite of order k'|Q|.
    let kp = kernel_gcd;
    let reduce = |(a, x): (i64, usize)| (a.rem_euclid(kp), x);
    let mut closure: HashSet<(i64, usize)> = HashSet::new();
    closure.insert((0, e));
    let mut queue: VecDeque<(i64, usize)> = VecDeque::from([(0, e)]);
    while let Some(g) = queue.pop_front() {
        for &s in &steps {
            let p = reduce(data.mul(g, s));
            if closure.insert(p) {
                queue.push_back(p);
            }
        }
    }
    let k = closure
        .iter()
        .filter(|&&(_, x)| x == e)
        .fold(kp, |acc, &(a, _)| num_integer_gcd(acc, a));
    let index = (kp as usize * n) / closure.len();
    Ok(SubgroupClass::FiniteIndex { k, index })
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Lazily computed word length with respect to a generating set, by
/// breadth-first search from the identity (closed forms for the standard
/// generators of `Z^d` and `F_k`).
pub struct WordLength {
    group: Group,
    gens: GeneratingSet,
    standard: bool,
    dist: HashMap<GroupElement, u32>,
    frontier: Vec<GroupElement>,
    radius: u32,
}

impl WordLength {
    pub fn new(group: &Group, gens: &GeneratingSet) -> Self {
        let standard = *gens == group.standard_generators()
            && matches!(group, Group::Zd { .. } | Group::Free { .. });
        let id = group.identity();
        WordLength {
            group: group.clone(),
            gens: gens.clone(),
            standard,
            dist: HashMap::from([(id.clone(), 0)]),
            frontier: vec![id],
            radius: 0,
        }
    }

    pub fn length(&mut self, g: &GroupElement) -> u32 {
        if self.standard {
            return match g {
                GroupElement::Zd(v) => v.iter().map(|a| a.abs() as u32).sum(),
                GroupElement::Free(w) => w.len() as u32,
                GroupElement::VirtZ { .. } => unreachable!(),
            };
        }
        loop {
            if let Some(&d) = self.dist.get(g) {
                return d;
            }
            self.grow();
        }
    }

    fn grow(&mut self) {
        self.radius += 1;
        let mut next = Vec::new();
        for g in &self.frontier {
            for s in self.gens.elements() {
                let p = self.group.mul(g, s).expect("same backend");
                if !self.dist.contains_key(&p) {
                    self.dist.insert(p.clone(), self.radius);
                    next.push(p);
                }
            }
        }
        self.frontier = next;
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Zd(v) => write!(f, "{v:?}"),
            GroupElement::Free(w) if w.is_empty() => write!(f, "1"),
            GroupElement::Free(w) => {
                for &l in w {
                    write!(f, "{}", free_letter(l))?;
                }
                Ok(())
            }
            GroupElement::VirtZ { a, x } => write!(f, "({a},{x})"),
        }
    }
}
