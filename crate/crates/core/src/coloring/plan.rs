use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{enumerate_delta_words, PlanRecord, Word};
use crate::cayley::{escape_constant, Ball, EscapeOracle};
use crate::error::{Error, Result};
use crate::group::{GeneratingSet, Group, GroupElement, WordLength};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    Tight,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Tight => "tight",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanStep {
    pub word: Word,
    pub g: GroupElement,
    pub g_len: u32,
    pub r_prime: u32,
    pub r: u32,
}

/// Words paired with group elements and the ranges used to place them.
#[derive(Debug, Clone, PartialEq)]
pub struct RangePlan {
    pub mode: Mode,
    pub steps: Vec<PlanStep>,
    /// `K(n)` values consulted.
    pub k_values: BTreeMap<u32, u32>,
    pub oracle: String,
}

impl RangePlan {
    pub fn k(&self) -> usize {
        self.steps.len()
    }

    /// Largest `R_i`.
    pub fn max_r(&self) -> u32 {
        self.steps.iter().map(|s| s.r).max().unwrap_or(0)
    }

    pub fn to_records(&self, group: &Group) -> Vec<PlanRecord> {
        self.steps
            .iter()
            .map(|s| PlanRecord {
                word: s.word.to_string(),
                gi: group.element_to_json(&s.g),
                length: s.g_len,
                r_prime: s.r_prime,
                r: s.r,
            })
            .collect()
    }

    pub fn from_records(
        group: &Group,
        mode: Mode,
        oracle: String,
        k_values: BTreeMap<u32, u32>,
        records: &[PlanRecord],
    ) -> Result<Self> {
        let steps = records
            .iter()
            .map(|r| {
                Ok(PlanStep {
                    word: r.word.parse()?,
                    g: group.element_from_json(&r.gi)?,
                    g_len: r.length,
                    r_prime: r.r_prime,
                    r: r.r,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RangePlan { mode, steps, k_values, oracle })
    }
}

/// Rejects groups whose small probe shows no escape at distances 1 or 2.
pub fn check_not_virtually_cyclic(group: &Group, gens: &GeneratingSet) -> Result<()> {
    for n in 1..=2 {
        escape_constant(group, gens, n, 6)?;
    }
    Ok(())
}

/// Pairs each word with the first unused element (in BFS order from the
/// identity) that is strictly longer.
fn pair_elements(group: &Group, gens: &GeneratingSet, words: &[Word]) -> Result<Vec<(GroupElement, u32)>> {
    let longest = words.iter().map(Word::len).max().unwrap_or(0) as u32;
    let mut radius = longest + 1;
    loop {
        let ball = Ball::build(group, gens, &group.identity(), radius)?;
        let mut used = HashSet::new();
        let mut out = Vec::new();
        for w in words {
            let pick = (0..ball.len() as u32).find(|&v| ball.dist(v) > w.len() as u32 && !used.contains(&v));
            match pick {
                Some(v) => {
                    used.insert(v);
                    out.push((ball.vertex(v).clone(), ball.dist(v)));
                }
                None => break,
            }
        }
        if out.len() == words.len() {
            return Ok(out);
        }
        let exhausted = (0..ball.len() as u32).all(|v| ball.dist(v) < radius);
        if radius > longest + 8 || exhausted {
            return Err(Error::Parse("not enough group elements to pair with the words".into()));
        }
        radius += 1;
    }
}

/// The paper-mode schedule: `R_1' = |g_1|+2`,
/// `R_i' = max(|g_i|+2, 2R_{i-1}'+K(2R_{i-1}'+1))`,
/// `R_i = 6R_i'+K(2R_i'+1)+|g_i|+1`.
pub fn build_range_plan(
    group: &Group,
    gens: &GeneratingSet,
    k: usize,
    oracle: &mut dyn EscapeOracle,
) -> Result<RangePlan> {
    check_not_virtually_cyclic(group, gens)?;
    let words: Vec<Word> = (1..).map(enumerate_delta_words).find(|w| w.len() >= k).unwrap()[..k].to_vec();
    let pairs = pair_elements(group, gens, &words)?;
    let mut k_values = BTreeMap::new();
    let mut kk = |n: u32, kv: &mut BTreeMap<u32, u32>| -> Result<u32> {
        let v = oracle.k(n)?;
        kv.insert(n, v);
        Ok(v)
    };
    let mut steps: Vec<PlanStep> = Vec::new();
    for (word, (g, g_len)) in words.into_iter().zip(pairs) {
        let r_prime = match steps.last() {
            None => g_len + 2,
            Some(prev) => (g_len + 2).max(2 * prev.r_prime + kk(2 * prev.r_prime + 1, &mut k_values)?),
        };
        let r = 6 * r_prime + kk(2 * r_prime + 1, &mut k_values)? + g_len + 1;
        steps.push(PlanStep { word, g, g_len, r_prime, r });
    }
    Ok(RangePlan { mode: Mode::Paper, steps, k_values, oracle: oracle.describe() })
}

/// A plan with user-chosen ranges `(R_i', R_i)`. Elements default to the
/// standard pairing; `overrides[i]` replaces `g_i`.
pub fn build_tight_plan(
    group: &Group,
    gens: &GeneratingSet,
    ranges: &[(u32, u32)],
    overrides: &[Option<GroupElement>],
) -> Result<RangePlan> {
    check_not_virtually_cyclic(group, gens)?;
    let k = ranges.len();
    let words: Vec<Word> = (1..).map(enumerate_delta_words).find(|w| w.len() >= k).unwrap()[..k].to_vec();
    let mut pairs = pair_elements(group, gens, &words)?;
    let mut wl = WordLength::new(group, gens);
    for (i, o) in overrides.iter().enumerate().take(k) {
        if let Some(g) = o {
            group.check(g)?;
            let len = wl.length(g);
            if len as usize <= words[i].len() {
                return Err(Error::Parse(format!("element for word {} must be longer than the word", words[i])));
            }
            pairs[i] = (g.clone(), len);
        }
    }
    let steps = words
        .into_iter()
        .zip(pairs)
        .zip(ranges)
        .map(|((word, (g, g_len)), &(r_prime, r))| PlanStep { word, g, g_len, r_prime, r })
        .collect();
    Ok(RangePlan { mode: Mode::Tight, steps, k_values: BTreeMap::new(), oracle: "user ranges".to_string() })
}
