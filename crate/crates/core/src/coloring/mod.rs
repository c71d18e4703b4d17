//! Edge colorings over `{A,B,C,D,E,F}` carrying marked words.

mod construct;
mod plan;
mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use construct::{construct_coloring, Placement};
pub use plan::{build_range_plan, build_tight_plan, check_not_virtually_cyclic, Mode, PlanStep, RangePlan};
pub use verify::{
    audit_protection, condition_report, marked_copies, verify_3proper, verify_marker_pairs, verify_p1, verify_p2, ConditionReport,
    CoverageReport, ProperReport,
};

use crate::cayley::{Ball, NONE};
use crate::error::{Error, Result};
use crate::group::{Group, GroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Color {
    pub const ALL: [Color; 6] = [Color::A, Color::B, Color::C, Color::D, Color::E, Color::F];

    pub fn is_letter(self) -> bool {
        matches!(self, Color::A | Color::B | Color::C)
    }

    pub fn as_char(self) -> char {
        b"ABCDEF"[self as usize] as char
    }

    pub fn from_char(c: char) -> Option<Color> {
        Color::ALL.into_iter().find(|x| x.as_char() == c)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A word over `{A,B,C}` without two equal consecutive letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Color>);

impl Word {
    pub fn new(letters: Vec<Color>) -> Result<Self> {
        if let Some(c) = letters.iter().find(|c| !c.is_letter()) {
            return Err(Error::Parse(format!("{c} is not a word letter")));
        }
        if letters.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::Parse("word repeats a letter consecutively".into()));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[Color] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Color::from_char(c).ok_or_else(|| Error::Parse(format!("bad letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Word::new(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// All words of length `1..=max_len`, by length and then lexicographically.
pub fn enumerate_delta_words(max_len: usize) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut layer: Vec<Vec<Color>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for c in [Color::A, Color::B, Color::C] {
                if w.last() != Some(&c) {
                    let mut v = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned().map(Word));
        layer = next;
    }
    out
}

/// A ball with every edge colored, plus the placement registry.
#[derive(Debug, Clone)]
pub struct ColoredBall {
    ball: Ball,
    colors: Vec<Color>,
    placements: Vec<Placement>,
    plan: Option<RangePlan>,
}

impl PartialEq for ColoredBall {
    fn eq(&self, other: &Self) -> bool {
        self.ball.group() == other.ball.group()
            && self.ball.gens() == other.ball.gens()
            && self.ball.center() == other.ball.center()
            && self.ball.radius() == other.ball.radius()
            && self.colors == other.colors
            && self.placements == other.placements
            && self.plan == other.plan
    }
}

impl ColoredBall {
    /// Every edge gets `color`; no placements.
    pub fn uniform(ball: Ball, color: Color) -> Self {
        let colors = vec![color; ball.edges().len()];
        ColoredBall { ball, colors, placements: Vec::new(), plan: None }
    }

    pub fn from_parts(ball: Ball, colors: Vec<Color>, placements: Vec<Placement>, plan: Option<RangePlan>) -> Self {
        assert_eq!(colors.len(), ball.edges().len());
        ColoredBall { ball, colors, placements, plan }
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn color(&self, edge: u32) -> Color {
        self.colors[edge as usize]
    }

    pub fn set_color(&mut self, edge: u32, c: Color) {
        self.colors[edge as usize] = c;
    }

    /// Color of the `s`-edge at `v`, if that edge is in the ball.
    pub fn color_at(&self, v: u32, s: usize) -> Option<Color> {
        let e = self.ball.edge_at(v, s);
        (e != NONE).then(|| self.colors[e as usize])
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn plan(&self) -> Option<&RangePlan> {
        self.plan.as_ref()
    }

    pub fn mode(&self) -> Option<Mode> {
        self.plan.as_ref().map(|p| p.mode)
    }

    pub fn to_dot(&self) -> String {
        self.ball.to_dot(|e| {
            let c = self.colors[e as usize];
            let col = match c {
                Color::A => "red",
                Color::B => "green",
                Color::C => "blue",
                Color::D => "black",
                Color::E => "orange",
                Color::F => "gray",
            };
            Some(format!("color={col}, xlabel=\"{c}\""))
        })
    }

    pub fn to_file(&self) -> ColoringFile {
        let group = self.ball.group();
        let gens = self.ball.gens();
        let edges = self
            .ball
            .edges()
            .iter()
            .zip(&self.colors)
            .map(|(e, &c)| EdgeRecord {
                src: group.element_to_json(self.ball.vertex(e.src)),
                gen: gens.name(e.gen).to_string(),
                color: c,
            })
            .collect();
        ColoringFile {
            group: group.spec(),
            center: group.element_to_json(self.ball.center()),
            radius: self.ball.radius(),
            mode: self.mode().unwrap_or(Mode::Paper),
            plan: self.plan.as_ref().map(|p| p.to_records(group)).unwrap_or_default(),
            oracle: self.plan.as_ref().map(|p| p.oracle.clone()),
            k_values: self.plan.as_ref().map(|p| p.k_values.clone()).unwrap_or_default(),
            edges,
            placements: self.placements.iter().map(|p| p.to_record(&self.ball)).collect(),
        }
    }

    pub fn from_file(file: &ColoringFile) -> Result<Self> {
        let group = Group::from_spec(&file.group)?;
        let gens = group.standard_generators();
        let center = group.element_from_json(&file.center)?;
        let ball = Ball::build(&group, &gens, &center, file.radius)?;
        let mut colors = vec![None; ball.edges().len()];
        for rec in &file.edges {
            let src = group.element_from_json(&rec.src)?;
            let v = ball.index_of(&src).ok_or_else(|| Error::Parse(format!("edge source {} outside ball", rec.src)))?;
            let s = gens.position(&rec.gen).ok_or_else(|| Error::Parse(format!("unknown generator {}", rec.gen)))?;
            let e = ball.edge_at(v, s);
            if e == NONE {
                return Err(Error::Parse(format!("edge {} {} leaves the ball", rec.src, rec.gen)));
            }
            colors[e as usize] = Some(rec.color);
        }
        let colors = colors
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Parse(format!("edge {i} uncolored"))))
            .collect::<Result<Vec<_>>>()?;
        let plan = if file.plan.is_empty() {
            None
        } else {
            Some(RangePlan::from_records(
                &group,
                file.mode,
                file.oracle.clone().unwrap_or_default(),
                file.k_values.clone(),
                &file.plan,
            )?)
        };
        let placements = file
            .placements
            .iter()
            .map(|r| Placement::from_record(&ball, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(ColoredBall { ball, colors, placements, plan })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: Value,
    pub gen: String,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub word: String,
    pub gi: Value,
    pub length: u32,
    pub r_prime: u32,
    pub r: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub word_index: usize,
    pub t: Value,
    pub path: Vec<Value>,
    pub d_gen: String,
    pub companion: Value,
}

/// On-disk coloring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringFile {
    pub group: GroupSpec,
    pub center: Value,
    pub radius: u32,
    pub mode: Mode,
    pub plan: Vec<PlanRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(default)]
    pub k_values: BTreeMap<u32, u32>,
    pub edges: Vec<EdgeRecord>,
    pub placements: Vec<PlacementRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_words() {
        let w1 = enumerate_delta_words(1);
        assert_eq!(w1.iter().map(|w| w.to_string()).collect::<Vec<_>>(), ["A", "B", "C"]);
        let w3 = enumerate_delta_words(3);
        assert_eq!(w3.iter().filter(|w| w.len() == 2).count(), 6);
        assert_eq!(w3.iter().filter(|w| w.len() == 3).count(), 12);
        assert_eq!(w3.iter().find(|w| w.len() == 3).unwrap().to_string(), "ABA");
    }

    #[test]
    fn word_parsing() {
        assert!("AA".parse::<Word>().is_err());
        assert!("AD".parse::<Word>().is_err());
        assert!("".parse::<Word>().unwrap().is_empty());
        assert_eq!("ABC".parse::<Word>().unwrap().len(), 3);
    }

    #[test]
    fn uniform_file_round_trip() {
        let g = Group::zd(2);
        let ball = Ball::build(&g, &g.standard_generators(), &g.identity(), 3).unwrap();
        let cb = ColoredBall::uniform(ball, Color::F);
        let text = serde_json::to_string(&cb.to_file()).unwrap();
        let back = ColoredBall::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, cb);
    }
}
