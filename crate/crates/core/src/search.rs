//! Minimal dancer counts, code enumeration and the property suite.

use std::ops::ControlFlow;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::bridge::bridge_count;
use crate::codec::{ArcIndex, DiagramCode, Passage};
use crate::dance::{
    coincident_to_smoothing, try_dance, ClassicalRule, Configuration, DanceError, Rule, Trace, VirtualRule,
};

pub mod properties;

pub use properties::{check_braid_bound, check_properties, check_with, property, standard_properties, CheckOptions};
pub use properties::{Counterexample, Outcome, Property, PropertyReport, PropertyResult};

/// Largest total crossing count accepted by [`enumerate_codes`].
pub const MAX_ENUMERATED_CROSSINGS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no configuration with up to {tried} dancers is valid under {rule}")]
    Infeasible { rule: Rule, tried: usize },
    #[error("start restriction is only defined for over-first with unrestricted virtual crossings, not {0}")]
    RestrictionUnsupported(Rule),
    #[error("{classical} classical + {virtual_count} virtual crossings exceeds the limit of {limit}")]
    ResourceLimit { classical: usize, virtual_count: usize, limit: usize },
    #[error("inconsistent results: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Dance(#[from] DanceError),
}

impl SearchError {
    /// True when the failure is a size or state budget, not a wrong answer.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, SearchError::ResourceLimit { .. } | SearchError::Dance(DanceError::ResourceLimit { .. }))
    }
}

/// A minimal configuration together with a schedule that dances it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinDance {
    pub dancers: usize,
    pub trace: Trace,
}

impl MinDance {
    pub fn config(&self) -> &Configuration {
        self.trace.config()
    }
}

/// Candidate start arcs for a search.
///
/// With `restrict_starts`, only bridge starts are tried (the over-first
/// rule with free virtual passages); a code without bridges falls back to
/// every arc.
pub fn candidate_starts(code: &DiagramCode, rule: Rule, restrict_starts: bool) -> Result<Vec<ArcIndex>, SearchError> {
    if !restrict_starts {
        return Ok((0..code.len()).collect());
    }
    if rule.classical != ClassicalRule::OverFirst || rule.virtual_rule != VirtualRule::Unrestricted {
        return Err(SearchError::RestrictionUnsupported(rule));
    }
    let starts = bridge_count(code).starts();
    if starts.is_empty() {
        return Ok((0..code.len()).collect());
    }
    Ok(starts)
}

/// Least number of dancers that can dance `code` under `rule`.
///
/// Start sets are tried by size and, within a size, in lexicographic order;
/// the first that dances is returned, so the witness is the lexicographically
/// least minimal configuration.
pub fn min_dancers(code: &DiagramCode, rule: Rule, restrict_starts: bool) -> Result<MinDance, SearchError> {
    if code.is_empty() {
        let trace = try_dance(code, &Configuration::trivial(rule))?.expect("crossingless code is danced");
        return Ok(MinDance { dancers: 1, trace });
    }
    let candidates = candidate_starts(code, rule, restrict_starts)?;
    for n in 1..=candidates.len() {
        for starts in candidates.iter().copied().combinations(n) {
            let config = Configuration::new(starts, rule)?;
            if let Some(trace) = try_dance(code, &config)? {
                return Ok(MinDance { dancers: n, trace });
            }
        }
    }
    if !rule.virtual_rule.needs_rendezvous() {
        // One dancer per arc always dances when no rendezvous is required.
        return Err(SearchError::Inconsistent(format!("no {rule} configuration dances {code}")));
    }
    Err(SearchError::Infeasible { rule, tried: candidates.len() })
}

/// Every dance number of one code.
///
/// `over_first` and `under_first` let virtual passages through freely, so
/// `over_first` and `unrestricted` always agree. Rendezvous rules are
/// `None` when no configuration works.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DanceNumbers {
    pub over_first: MinDance,
    pub under_first: MinDance,
    pub unrestricted: MinDance,
    pub coincident: Option<MinDance>,
    pub smoothing: Option<MinDance>,
}

impl DanceNumbers {
    /// `(unrestricted, coincident, smoothing)`, with `None` for infeasible.
    pub fn virtual_pattern(&self) -> (usize, Option<usize>, Option<usize>) {
        (
            self.unrestricted.dancers,
            self.coincident.as_ref().map(|m| m.dancers),
            self.smoothing.as_ref().map(|m| m.dancers),
        )
    }
}

fn optional(result: Result<MinDance, SearchError>) -> Result<Option<MinDance>, SearchError> {
    match result {
        Ok(m) => Ok(Some(m)),
        Err(SearchError::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn dance_numbers(code: &DiagramCode) -> Result<DanceNumbers, SearchError> {
    let over_first = min_dancers(code, Rule::OVER_FIRST, false)?;
    let under_first = min_dancers(code, Rule::UNDER_FIRST, false)?;
    let unrestricted = min_dancers(code, Rule::OVER_FIRST.with_virtual(VirtualRule::Unrestricted), false)?;
    let coincident = optional(min_dancers(code, Rule::COINCIDENT, false))?;
    let smoothing = optional(min_dancers(code, Rule::SMOOTHING, false))?;

    // The transformed coincident witness must dance under smoothing with the
    // same count the independent search found.
    match (&coincident, &smoothing) {
        (Some(c), Some(s)) => {
            let moved = coincident_to_smoothing(code, &c.trace)?;
            if c.dancers != s.dancers || moved.dancers() != c.dancers {
                return Err(SearchError::Inconsistent(format!(
                    "coincident {} vs smoothing {} on {code}",
                    c.dancers, s.dancers
                )));
            }
        }
        (None, None) => {}
        _ => {
            return Err(SearchError::Inconsistent(format!(
                "only one of coincident and smoothing is feasible on {code}"
            )))
        }
    }
    Ok(DanceNumbers { over_first, under_first, unrestricted, coincident, smoothing })
}

/// Visit every code with exactly `classical` classical and `virtual_count`
/// virtual crossings, one per rotation class (its canonical rotation).
///
/// There is no size guard here; callers stop early through `visit`.
pub fn visit_codes<F>(classical: usize, virtual_count: usize, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&DiagramCode) -> ControlFlow<()>,
{
    let mut gen = Generator {
        classical,
        virtual_count,
        seq: Vec::with_capacity(2 * (classical + virtual_count)),
        open: Vec::new(),
        opened_classical: 0,
        opened_virtual: 0,
    };
    gen.extend(&mut visit)
}

struct Generator {
    classical: usize,
    virtual_count: usize,
    seq: Vec<Passage>,
    /// Crossings visited once so far, with the passage that closes them.
    open: Vec<Passage>,
    opened_classical: usize,
    opened_virtual: usize,
}

impl Generator {
    fn extend<F>(&mut self, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&DiagramCode) -> ControlFlow<()>,
    {
        if self.seq.len() == 2 * (self.classical + self.virtual_count) {
            let code = DiagramCode::new(self.seq.clone()).expect("generated codes are valid");
            return if code.is_canonical() { visit(&code) } else { ControlFlow::Continue(()) };
        }
        let label = (self.opened_classical + self.opened_virtual + 1) as u32;
        // A canonical code with classical crossings starts with an over-passage.
        let first = self.seq.is_empty();
        if self.opened_classical < self.classical {
            self.opened_classical += 1;
            self.push_open(Passage::over(label), Passage::under(label), visit)?;
            if !first {
                self.push_open(Passage::under(label), Passage::over(label), visit)?;
            }
            self.opened_classical -= 1;
        }
        if self.opened_virtual < self.virtual_count && !(first && self.classical > 0) {
            self.opened_virtual += 1;
            self.push_open(Passage::virt(label), Passage::virt(label), visit)?;
            self.opened_virtual -= 1;
        }
        for k in 0..self.open.len() {
            let closing = self.open.remove(k);
            self.seq.push(closing);
            let flow = self.extend(visit);
            self.seq.pop();
            self.open.insert(k, closing);
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn push_open<F>(&mut self, opening: Passage, closing: Passage, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&DiagramCode) -> ControlFlow<()>,
    {
        self.seq.push(opening);
        self.open.push(closing);
        let flow = self.extend(visit);
        self.open.pop();
        self.seq.pop();
        flow
    }
}

/// All codes with exactly the given crossing counts, one per rotation class.
pub fn enumerate_codes(classical: usize, virtual_count: usize) -> Result<Vec<DiagramCode>, SearchError> {
    if classical + virtual_count > MAX_ENUMERATED_CROSSINGS {
        return Err(SearchError::ResourceLimit { classical, virtual_count, limit: MAX_ENUMERATED_CROSSINGS });
    }
    let mut out = Vec::new();
    let _ = visit_codes(classical, virtual_count, |c| {
        out.push(c.clone());
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// All codes with at most the given crossing counts, smallest first.
pub fn corpus(max_classical: usize, max_virtual: usize) -> Result<Vec<DiagramCode>, SearchError> {
    let mut out = Vec::new();
    for total in 0..=max_classical + max_virtual {
        for classical in (0..=max_classical.min(total)).rev() {
            let virtual_count = total - classical;
            if virtual_count <= max_virtual {
                out.extend(enumerate_codes(classical, virtual_count)?);
            }
        }
    }
    Ok(out)
}
