//! Dance configurations and schedules.
//!
//! Dancers start on arcs of a code and walk forward until they reach the
//! next start. A schedule ([`Trace`]) is the ordered list of discrete moves;
//! each move advances one dancer through one passage, or two dancers through
//! the two passages of a virtual crossing at once (a rendezvous).

mod engine;
mod oracle;
mod table;
mod transform;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{ArcIndex, CrossingId, DiagramCode, PassageKind};

pub use engine::{try_dance, try_dance_with};
pub use oracle::{oracle_try_dance, OracleLimits, DEFAULT_STATE_LIMIT};
pub use table::render_trace_table;
pub use transform::{coincident_to_smoothing, retrograde_trace, smoothing_to_coincident};

pub type DancerId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DanceError {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("state limit of {limit} exceeded")]
    ResourceLimit { limit: usize },
    #[error("trace has no moves")]
    EmptyTrace,
}

/// Which strand of a classical crossing must be danced first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassicalRule {
    OverFirst,
    UnderFirst,
}

impl ClassicalRule {
    pub fn opposite(self) -> Self {
        match self {
            ClassicalRule::OverFirst => ClassicalRule::UnderFirst,
            ClassicalRule::UnderFirst => ClassicalRule::OverFirst,
        }
    }
}

/// Policy at virtual crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VirtualRule {
    /// Virtual passages are free arcs.
    Unrestricted,
    /// Two distinct dancers pass the crossing together.
    Coincident,
    /// As coincident, but the two dancers exchange their onward paths.
    Smoothing,
}

impl VirtualRule {
    pub fn needs_rendezvous(self) -> bool {
        !matches!(self, VirtualRule::Unrestricted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rule {
    pub classical: ClassicalRule,
    pub virtual_rule: VirtualRule,
}

impl Rule {
    pub const OVER_FIRST: Rule = Rule::new(ClassicalRule::OverFirst, VirtualRule::Unrestricted);
    pub const UNDER_FIRST: Rule = Rule::new(ClassicalRule::UnderFirst, VirtualRule::Unrestricted);
    pub const COINCIDENT: Rule = Rule::new(ClassicalRule::OverFirst, VirtualRule::Coincident);
    pub const SMOOTHING: Rule = Rule::new(ClassicalRule::OverFirst, VirtualRule::Smoothing);

    pub const fn new(classical: ClassicalRule, virtual_rule: VirtualRule) -> Self {
        Rule { classical, virtual_rule }
    }

    pub fn with_virtual(self, virtual_rule: VirtualRule) -> Self {
        Rule { virtual_rule, ..self }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.classical {
            ClassicalRule::OverFirst => "over-first",
            ClassicalRule::UnderFirst => "under-first",
        };
        let v = match self.virtual_rule {
            VirtualRule::Unrestricted => "unrestricted",
            VirtualRule::Coincident => "coincident",
            VirtualRule::Smoothing => "smoothing",
        };
        write!(f, "{c}/{v}")
    }
}

/// Start arcs plus the rule they are danced under.
///
/// Starts are kept sorted; dancer `k` starts at `starts[k]` and, outside the
/// smoothing rule, dances up to `starts[k + 1]` (cyclically).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    starts: Vec<ArcIndex>,
    pub rule: Rule,
}

impl Configuration {
    pub fn new(mut starts: Vec<ArcIndex>, rule: Rule) -> Result<Self, DanceError> {
        if starts.is_empty() {
            return Err(DanceError::InvalidConfiguration("at least one dancer is required".into()));
        }
        starts.sort_unstable();
        if let Some(w) = starts.windows(2).find(|w| w[0] == w[1]) {
            return Err(DanceError::InvalidConfiguration(format!("duplicate start {}", w[0])));
        }
        Ok(Configuration { starts, rule })
    }

    /// The single-dancer configuration used for crossingless codes.
    pub fn trivial(rule: Rule) -> Self {
        Configuration { starts: vec![0], rule }
    }

    pub fn starts(&self) -> &[ArcIndex] {
        &self.starts
    }

    pub fn dancers(&self) -> usize {
        self.starts.len()
    }

    pub fn with_rule(&self, rule: Rule) -> Self {
        Configuration { starts: self.starts.clone(), rule }
    }

    /// Checks the starts against a code. Crossingless codes accept only the
    /// trivial configuration.
    pub fn check_against(&self, code: &DiagramCode) -> Result<(), DanceError> {
        let len = code.len();
        if len == 0 {
            if self.starts != [0] {
                return Err(DanceError::InvalidConfiguration(
                    "a crossingless code admits only the single start 0".into(),
                ));
            }
            return Ok(());
        }
        match self.starts.iter().find(|&&s| s >= len) {
            Some(s) => Err(DanceError::InvalidConfiguration(format!(
                "start {s} out of range for a code of length {len}"
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MoveKind {
    /// One dancer advances through the passage in front of it.
    Single { dancer: DancerId, passage: usize },
    /// Two dancers pass the two visits of a virtual crossing simultaneously.
    Rendezvous { first: DancerId, second: DancerId, crossing: CrossingId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub time: usize,
    #[serde(flatten)]
    pub kind: MoveKind,
}

/// A validated schedule.
///
/// `status[t][j]` is the crossing status of `crossings[j]` after the first
/// `t` moves: over-advances minus under-advances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    config: Configuration,
    moves: Vec<Move>,
    crossings: Vec<CrossingId>,
    status: Vec<Vec<i32>>,
    #[serde(skip)]
    final_positions: Vec<ArcIndex>,
}

impl Trace {
    /// Replay `moves` on `code` and keep them only if every rule is honoured
    /// and the whole diagram is danced.
    pub fn build(code: &DiagramCode, config: Configuration, moves: Vec<MoveKind>) -> Result<Trace, DanceError> {
        config.check_against(code)?;
        let replay = replay(code, &config, &moves).map_err(DanceError::InvalidTrace)?;
        let moves = moves.into_iter().enumerate().map(|(time, kind)| Move { time, kind }).collect();
        Ok(Trace {
            config,
            moves,
            crossings: replay.crossings,
            status: replay.status,
            final_positions: replay.positions,
        })
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn rule(&self) -> Rule {
        self.config.rule
    }

    pub fn dancers(&self) -> usize {
        self.config.dancers()
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn move_kinds(&self) -> Vec<MoveKind> {
        self.moves.iter().map(|m| m.kind).collect()
    }

    pub fn crossings(&self) -> &[CrossingId] {
        &self.crossings
    }

    /// One row per time step, `moves().len() + 1` rows in all.
    pub fn status_table(&self) -> &[Vec<i32>] {
        &self.status
    }

    pub fn status(&self, crossing: CrossingId, time: usize) -> Option<i32> {
        let j = self.crossings.iter().position(|&c| c == crossing)?;
        self.status.get(time).map(|row| row[j])
    }

    pub fn final_positions(&self) -> &[ArcIndex] {
        &self.final_positions
    }

    pub fn rendezvous_count(&self) -> usize {
        self.moves.iter().filter(|m| matches!(m.kind, MoveKind::Rendezvous { .. })).count()
    }

    /// Passage indices in the order they are danced.
    pub fn passage_order(&self, code: &DiagramCode) -> Vec<usize> {
        let mut positions = self.config.starts.clone();
        let mut order = Vec::new();
        let len = code.len().max(1);
        for m in &self.moves {
            match m.kind {
                MoveKind::Single { dancer, passage } => {
                    order.push(passage);
                    positions[dancer] = (passage + 1) % len;
                }
                MoveKind::Rendezvous { first, second, .. } => {
                    let (p, q) = (positions[first], positions[second]);
                    order.push(p);
                    order.push(q);
                    if self.config.rule.virtual_rule == VirtualRule::Smoothing {
                        positions[first] = (q + 1) % len;
                        positions[second] = (p + 1) % len;
                    } else {
                        positions[first] = (p + 1) % len;
                        positions[second] = (q + 1) % len;
                    }
                }
            }
        }
        order
    }
}

struct Replay {
    crossings: Vec<CrossingId>,
    status: Vec<Vec<i32>>,
    positions: Vec<ArcIndex>,
}

/// Independent checker: tracks dancer positions and crossing statuses and
/// tests the sign condition on the status after every move.
fn replay(code: &DiagramCode, config: &Configuration, moves: &[MoveKind]) -> Result<Replay, String> {
    let len = code.len();
    let crossings = code.classical_crossings();
    if len == 0 {
        if !moves.is_empty() {
            return Err("a crossingless code has no passages to advance".into());
        }
        return Ok(Replay { crossings, status: vec![Vec::new()], positions: vec![0] });
    }
    let column = |id: CrossingId| crossings.iter().position(|&c| c == id).expect("classical crossing");
    let rule = config.rule;
    let n = config.dancers();
    let is_start = {
        let mut v = vec![false; len];
        for &s in config.starts() {
            v[s] = true;
        }
        v
    };
    let mut pos = config.starts().to_vec();
    let mut moved = vec![false; n];
    let mut advanced = vec![false; len];
    let mut current = vec![0i32; crossings.len()];
    let mut status = vec![current.clone()];

    let check_dancer = |d: DancerId, pos: &[usize], moved: &[bool]| -> Result<(), String> {
        if d >= n {
            return Err(format!("dancer {d} does not exist"));
        }
        if moved[d] && is_start[pos[d]] {
            return Err(format!("dancer {d} already finished"));
        }
        Ok(())
    };

    for (t, mv) in moves.iter().enumerate() {
        match *mv {
            MoveKind::Single { dancer, passage } => {
                check_dancer(dancer, &pos, &moved)?;
                if pos[dancer] != passage {
                    return Err(format!(
                        "move {t}: dancer {dancer} is before passage {}, not {passage}",
                        pos[dancer]
                    ));
                }
                if advanced[passage] {
                    return Err(format!("move {t}: passage {passage} danced twice"));
                }
                let p = code.passage(passage);
                match p.kind {
                    PassageKind::Over => current[column(p.crossing)] += 1,
                    PassageKind::Under => current[column(p.crossing)] -= 1,
                    PassageKind::Virtual if rule.virtual_rule.needs_rendezvous() => {
                        return Err(format!("move {t}: virtual passage {passage} needs a rendezvous"));
                    }
                    PassageKind::Virtual => {}
                }
                if p.kind.is_classical() {
                    let c = current[column(p.crossing)];
                    let ok = match rule.classical {
                        ClassicalRule::OverFirst => c >= 0,
                        ClassicalRule::UnderFirst => c <= 0,
                    };
                    if !ok {
                        return Err(format!("move {t}: crossing {} status {c} breaks {rule}", p.crossing));
                    }
                }
                advanced[passage] = true;
                pos[dancer] = (passage + 1) % len;
                moved[dancer] = true;
            }
            MoveKind::Rendezvous { first, second, crossing } => {
                if !rule.virtual_rule.needs_rendezvous() {
                    return Err(format!("move {t}: rendezvous under {rule}"));
                }
                if first == second {
                    return Err(format!("move {t}: dancer {first} cannot meet itself"));
                }
                check_dancer(first, &pos, &moved)?;
                check_dancer(second, &pos, &moved)?;
                let (p, q) = (pos[first], pos[second]);
                for idx in [p, q] {
                    let passage = code.passage(idx);
                    if passage.kind != PassageKind::Virtual || passage.crossing != crossing {
                        return Err(format!("move {t}: passage {idx} is not a visit of virtual crossing {crossing}"));
                    }
                    if advanced[idx] {
                        return Err(format!("move {t}: passage {idx} danced twice"));
                    }
                }
                if p == q {
                    return Err(format!("move {t}: both dancers stand before passage {p}"));
                }
                advanced[p] = true;
                advanced[q] = true;
                let (to_first, to_second) = match rule.virtual_rule {
                    VirtualRule::Smoothing => ((q + 1) % len, (p + 1) % len),
                    _ => ((p + 1) % len, (q + 1) % len),
                };
                pos[first] = to_first;
                pos[second] = to_second;
                moved[first] = true;
                moved[second] = true;
            }
        }
        status.push(current.clone());
    }

    if let Some(p) = advanced.iter().position(|&a| !a) {
        return Err(format!("passage {p} is never danced"));
    }
    if let Some(d) = (0..n).find(|&d| !(moved[d] && is_start[pos[d]])) {
        return Err(format!("dancer {d} stops at arc {} instead of a start", pos[d]));
    }
    if rule.virtual_rule != VirtualRule::Smoothing {
        for (d, &end) in pos.iter().enumerate() {
            let expected = config.starts()[(d + 1) % n];
            if end != expected {
                return Err(format!("dancer {d} ends at {end} instead of {expected}"));
            }
        }
    }
    Ok(Replay { crossings, status, positions: pos })
}
