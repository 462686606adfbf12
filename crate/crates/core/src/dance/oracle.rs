use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::{ClassicalRule, Configuration, DanceError, DancerId, MoveKind, Trace, VirtualRule};
use crate::codec::{DiagramCode, PassageKind};

pub const DEFAULT_STATE_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_states: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_states: DEFAULT_STATE_LIMIT }
    }
}

/// Largest code the oracle accepts; states pack the danced passages into a `u64`.
const MAX_LEN: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    pos: Vec<u8>,
    moved: u64,
    danced: u64,
}

/// Breadth-first search over every interleaving of enabled moves.
///
/// Returns a witness schedule iff some complete schedule exists. Meant for
/// small codes; fails with [`DanceError::ResourceLimit`] once more than
/// `limits.max_states` states have been discovered.
pub fn oracle_try_dance(
    code: &DiagramCode,
    config: &Configuration,
    limits: OracleLimits,
) -> Result<Option<Trace>, DanceError> {
    config.check_against(code)?;
    let len = code.len();
    if len == 0 {
        return Trace::build(code, config.clone(), Vec::new()).map(Some);
    }
    if len > MAX_LEN || config.dancers() > MAX_LEN {
        return Err(DanceError::ResourceLimit { limit: MAX_LEN });
    }
    let n = config.dancers();
    let starts = config.starts();
    let rule = config.rule;
    let at_start = |p: u8| starts.contains(&(p as usize));
    let finished = |s: &State, d: DancerId| s.moved & (1 << d) != 0 && at_start(s.pos[d]);
    let all = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };

    // Crossing status read off the danced set: over done minus under done.
    let status_after = |danced: u64, idx: usize| -> i32 {
        let (a, b) = (idx, code.partner(idx));
        let mut c = 0;
        for i in [a, b] {
            if danced & (1 << i) != 0 {
                c += match code.passage(i).kind {
                    PassageKind::Over => 1,
                    PassageKind::Under => -1,
                    PassageKind::Virtual => 0,
                };
            }
        }
        c
    };

    let initial = State {
        pos: starts.iter().map(|&s| s as u8).collect(),
        moved: 0,
        danced: 0,
    };
    let mut seen: HashMap<State, usize> = HashMap::new();
    let mut nodes: Vec<(State, Option<(usize, MoveKind)>)> = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(initial.clone(), 0);
    nodes.push((initial, None));
    queue.push_back(0usize);

    let mut goal = None;
    while let Some(idx) = queue.pop_front() {
        let state = nodes[idx].0.clone();
        if state.danced == all && (0..n).all(|d| finished(&state, d)) {
            goal = Some(idx);
            break;
        }
        let mut successors: Vec<(MoveKind, State)> = Vec::new();
        for d in 0..n {
            if finished(&state, d) {
                continue;
            }
            let p = state.pos[d] as usize;
            if state.danced & (1 << p) != 0 {
                continue;
            }
            let passage = code.passage(p);
            let single_ok = match passage.kind {
                PassageKind::Virtual => rule.virtual_rule == VirtualRule::Unrestricted,
                _ => {
                    let c = status_after(state.danced | (1 << p), p);
                    match rule.classical {
                        ClassicalRule::OverFirst => c >= 0,
                        ClassicalRule::UnderFirst => c <= 0,
                    }
                }
            };
            if single_ok {
                let mut next = state.clone();
                next.danced |= 1 << p;
                next.moved |= 1 << d;
                next.pos[d] = ((p + 1) % len) as u8;
                successors.push((MoveKind::Single { dancer: d, passage: p }, next));
            }
            if passage.kind == PassageKind::Virtual && rule.virtual_rule.needs_rendezvous() {
                for e in (d + 1)..n {
                    if finished(&state, e) {
                        continue;
                    }
                    let q = state.pos[e] as usize;
                    let other = code.passage(q);
                    if q == p || other.kind != PassageKind::Virtual || other.crossing != passage.crossing {
                        continue;
                    }
                    if state.danced & (1 << q) != 0 {
                        continue;
                    }
                    let mut next = state.clone();
                    next.danced |= (1 << p) | (1 << q);
                    next.moved |= (1 << d) | (1 << e);
                    let (to_d, to_e) = if rule.virtual_rule == VirtualRule::Smoothing { (q, p) } else { (p, q) };
                    next.pos[d] = ((to_d + 1) % len) as u8;
                    next.pos[e] = ((to_e + 1) % len) as u8;
                    successors.push((MoveKind::Rendezvous { first: d, second: e, crossing: passage.crossing }, next));
                }
            }
        }
        for (mv, next) in successors {
            if let Entry::Vacant(slot) = seen.entry(next.clone()) {
                if nodes.len() >= limits.max_states {
                    return Err(DanceError::ResourceLimit { limit: limits.max_states });
                }
                slot.insert(nodes.len());
                nodes.push((next, Some((idx, mv))));
                queue.push_back(nodes.len() - 1);
            }
        }
    }

    let Some(mut idx) = goal else {
        return Ok(None);
    };
    let mut moves = Vec::new();
    while let Some((parent, mv)) = nodes[idx].1 {
        moves.push(mv);
        idx = parent;
    }
    moves.reverse();
    Trace::build(code, config.clone(), moves).map(Some)
}
