use super::{Configuration, DanceError, DancerId, MoveKind, Rule, Trace, VirtualRule};
use crate::codec::DiagramCode;

/// Watch the dance backwards on the reversed code.
///
/// The new starts are the images of the old end positions, moves run in
/// reverse order, and the classical rule flips (over-first becomes
/// under-first and back). The result is re-validated.
pub fn retrograde_trace(code: &DiagramCode, trace: &Trace) -> Result<Trace, DanceError> {
    let len = code.len();
    let reversed = code.reversed();
    let rule = trace.rule();
    let flipped = Rule { classical: rule.classical.opposite(), ..rule };
    if len == 0 {
        return Trace::build(&reversed, Configuration::trivial(flipped), Vec::new());
    }
    // Arc i (before passage i) is arc (len - i) % len of the reversed code.
    let arc_image = |arc: usize| (len - arc) % len;
    let ends: Vec<usize> = trace.final_positions().iter().map(|&f| arc_image(f)).collect();
    let config = Configuration::new(ends.clone(), flipped)
        .map_err(|e| DanceError::InvalidTrace(format!("end positions do not form a configuration: {e}")))?;
    let rank: Vec<DancerId> = ends
        .iter()
        .map(|e| config.starts().binary_search(e).expect("start present"))
        .collect();
    let moves = trace
        .moves()
        .iter()
        .rev()
        .map(|m| match m.kind {
            MoveKind::Single { dancer, passage } => MoveKind::Single { dancer: rank[dancer], passage: len - 1 - passage },
            MoveKind::Rendezvous { first, second, crossing } => {
                MoveKind::Rendezvous { first: rank[first], second: rank[second], crossing }
            }
        })
        .collect();
    Trace::build(&reversed, config, moves)
}

/// Turn a coincident schedule into a smoothing one: at every rendezvous the
/// two dancers trade the rest of their paths. The set of (passage, time)
/// events is unchanged; only who dances them changes.
pub fn coincident_to_smoothing(code: &DiagramCode, trace: &Trace) -> Result<Trace, DanceError> {
    exchange_paths(code, trace, VirtualRule::Coincident, VirtualRule::Smoothing)
}

/// Inverse of [`coincident_to_smoothing`].
pub fn smoothing_to_coincident(code: &DiagramCode, trace: &Trace) -> Result<Trace, DanceError> {
    exchange_paths(code, trace, VirtualRule::Smoothing, VirtualRule::Coincident)
}

fn exchange_paths(code: &DiagramCode, trace: &Trace, from: VirtualRule, to: VirtualRule) -> Result<Trace, DanceError> {
    let rule = trace.rule();
    if rule.virtual_rule != from {
        return Err(DanceError::InvalidTrace(format!("expected a {from:?} trace, got {rule}")));
    }
    // label[d]: the output dancer standing where input dancer d stands.
    let mut label: Vec<DancerId> = (0..trace.dancers()).collect();
    let mut moves = Vec::with_capacity(trace.moves().len());
    for m in trace.moves() {
        match m.kind {
            MoveKind::Single { dancer, passage } => moves.push(MoveKind::Single { dancer: label[dancer], passage }),
            MoveKind::Rendezvous { first, second, crossing } => {
                moves.push(MoveKind::Rendezvous { first: label[first], second: label[second], crossing });
                label.swap(first, second);
            }
        }
    }
    Trace::build(code, trace.config().with_rule(rule.with_virtual(to)), moves)
}
