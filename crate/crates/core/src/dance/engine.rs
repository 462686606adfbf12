use super::{ClassicalRule, Configuration, DanceError, DancerId, MoveKind, Trace, VirtualRule};
use crate::codec::{DiagramCode, PassageKind};

/// Greedy saturation: apply enabled moves until none is left; the
/// configuration is valid iff every passage got danced.
///
/// Enabling is monotone (a waiting dancer never loses its move while others
/// advance), so the order of application does not matter for success.
/// Ties go to rendezvous first, then to the lowest-numbered dancer.
pub fn try_dance(code: &DiagramCode, config: &Configuration) -> Result<Option<Trace>, DanceError> {
    try_dance_with(code, config, |_| 0)
}

/// As [`try_dance`], with `choose` picking the index of the move to apply
/// among the currently enabled ones (listed rendezvous first, by dancer).
pub fn try_dance_with<F>(code: &DiagramCode, config: &Configuration, mut choose: F) -> Result<Option<Trace>, DanceError>
where
    F: FnMut(&[MoveKind]) -> usize,
{
    config.check_against(code)?;
    if code.is_empty() {
        return Trace::build(code, config.clone(), Vec::new()).map(Some);
    }
    let mut state = Saturation::new(code, config);
    let mut moves = Vec::with_capacity(code.len());
    let mut enabled = Vec::new();
    loop {
        state.enabled_moves(&mut enabled);
        if enabled.is_empty() {
            break;
        }
        let pick = choose(&enabled).min(enabled.len() - 1);
        let mv = enabled[pick];
        #[cfg(debug_assertions)]
        let before = enabled.clone();
        state.apply(mv);
        moves.push(mv);
        #[cfg(debug_assertions)]
        {
            let mut after = Vec::new();
            state.enabled_moves(&mut after);
            for other in before.iter().filter(|m| !shares_dancer(m, &mv)) {
                debug_assert!(after.contains(other), "move {other:?} lost its enabling after {mv:?}");
            }
        }
    }
    if state.remaining > 0 {
        return Ok(None);
    }
    Trace::build(code, config.clone(), moves).map(Some)
}

#[cfg(debug_assertions)]
fn shares_dancer(a: &MoveKind, b: &MoveKind) -> bool {
    let dancers = |m: &MoveKind| match *m {
        MoveKind::Single { dancer, .. } => [dancer, dancer],
        MoveKind::Rendezvous { first, second, .. } => [first, second],
    };
    let (x, y) = (dancers(a), dancers(b));
    x.iter().any(|d| y.contains(d))
}

struct Saturation<'a> {
    code: &'a DiagramCode,
    config: &'a Configuration,
    is_start: Vec<bool>,
    pos: Vec<usize>,
    moved: Vec<bool>,
    advanced: Vec<bool>,
    /// Active (unfinished) dancer standing before each passage.
    occupant: Vec<Option<DancerId>>,
    remaining: usize,
}

impl<'a> Saturation<'a> {
    fn new(code: &'a DiagramCode, config: &'a Configuration) -> Self {
        let len = code.len();
        let mut is_start = vec![false; len];
        let mut occupant = vec![None; len];
        for (d, &s) in config.starts().iter().enumerate() {
            is_start[s] = true;
            occupant[s] = Some(d);
        }
        Saturation {
            code,
            config,
            is_start,
            pos: config.starts().to_vec(),
            moved: vec![false; config.dancers()],
            advanced: vec![false; len],
            occupant,
            remaining: len,
        }
    }

    fn active(&self, d: DancerId) -> bool {
        !(self.moved[d] && self.is_start[self.pos[d]])
    }

    fn enabled_moves(&self, out: &mut Vec<MoveKind>) {
        out.clear();
        let rule = self.config.rule;
        let n = self.config.dancers();
        if rule.virtual_rule.needs_rendezvous() {
            for d in (0..n).filter(|&d| self.active(d)) {
                let p = self.pos[d];
                let passage = self.code.passage(p);
                if passage.kind != PassageKind::Virtual {
                    continue;
                }
                if let Some(other) = self.occupant[self.code.partner(p)] {
                    if other > d {
                        out.push(MoveKind::Rendezvous { first: d, second: other, crossing: passage.crossing });
                    }
                }
            }
        }
        for d in (0..n).filter(|&d| self.active(d)) {
            let p = self.pos[d];
            let partner_done = || self.advanced[self.code.partner(p)];
            let free = match (self.code.passage(p).kind, rule.classical) {
                (PassageKind::Over, ClassicalRule::OverFirst) => true,
                (PassageKind::Over, ClassicalRule::UnderFirst) => partner_done(),
                (PassageKind::Under, ClassicalRule::OverFirst) => partner_done(),
                (PassageKind::Under, ClassicalRule::UnderFirst) => true,
                (PassageKind::Virtual, _) => rule.virtual_rule == VirtualRule::Unrestricted,
            };
            if free {
                out.push(MoveKind::Single { dancer: d, passage: p });
            }
        }
    }

    fn step(&mut self, d: DancerId, to: usize) {
        let from = self.pos[d];
        if self.occupant[from] == Some(d) {
            self.occupant[from] = None;
        }
        self.pos[d] = to;
        self.moved[d] = true;
        if self.active(d) {
            self.occupant[to] = Some(d);
        }
    }

    fn apply(&mut self, mv: MoveKind) {
        let len = self.code.len();
        match mv {
            MoveKind::Single { dancer, passage } => {
                self.advanced[passage] = true;
                self.remaining -= 1;
                self.step(dancer, (passage + 1) % len);
            }
            MoveKind::Rendezvous { first, second, .. } => {
                let (p, q) = (self.pos[first], self.pos[second]);
                self.advanced[p] = true;
                self.advanced[q] = true;
                self.remaining -= 2;
                let swap = self.config.rule.virtual_rule == VirtualRule::Smoothing;
                let (a, b) = if swap { (q, p) } else { (p, q) };
                // Vacate both squares before re-occupying so a swap cannot clobber.
                self.occupant[p] = None;
                self.occupant[q] = None;
                self.step(first, (a + 1) % len);
                self.step(second, (b + 1) % len);
            }
        }
    }
}
