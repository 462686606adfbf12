//! Per-code invariant checks and the report they feed.

use std::fmt::Write;

use itertools::Itertools;
use serde::Serialize;

use super::{candidate_starts, min_dancers, optional, SearchError};
use crate::braid::{braid_schedule, BraidError, BraidWord};
use crate::bridge::{bridge_count, reduce_to_bridge_minimal, BridgeError};
use crate::codec::DiagramCode;
use crate::dance::{
    coincident_to_smoothing, oracle_try_dance, retrograde_trace, smoothing_to_coincident, try_dance,
    try_dance_with, ClassicalRule, Configuration, OracleLimits, Rule, DEFAULT_STATE_LIMIT,
};

/// Limits for the expensive checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub state_limit: usize,
    /// Greedy/oracle comparison only runs on codes up to this many passages.
    pub oracle_max_len: usize,
    pub oracle_max_dancers: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { state_limit: DEFAULT_STATE_LIMIT, oracle_max_len: 10, oracle_max_dancers: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// The property does not apply to this code.
    Skip,
    Fail(String),
}

impl Outcome {
    fn check(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail(detail())
        }
    }
}

pub type CheckFn = fn(&DiagramCode, &CheckOptions) -> Result<Outcome, SearchError>;

/// A named per-code check.
#[derive(Clone, Copy)]
pub struct Property {
    pub name: &'static str,
    pub check: CheckFn,
}

impl std::fmt::Debug for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Property").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub code: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub property: String,
    pub passed: usize,
    pub skipped: usize,
    pub failed: usize,
    /// Codes abandoned because a state or size limit was hit.
    pub limited: usize,
    /// The first few failures, in corpus order.
    pub counterexamples: Vec<Counterexample>,
}

impl PropertyResult {
    fn new(name: &str) -> Self {
        PropertyResult { property: name.to_string(), passed: 0, skipped: 0, failed: 0, limited: 0, counterexamples: Vec::new() }
    }

    fn record(&mut self, code: &str, outcome: Outcome) {
        match outcome {
            Outcome::Pass => self.passed += 1,
            Outcome::Skip => self.skipped += 1,
            Outcome::Fail(detail) => {
                self.failed += 1;
                if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                    self.counterexamples.push(Counterexample { code: code.to_string(), detail });
                }
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.limited == 0
    }
}

const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub codes: usize,
    pub results: Vec<PropertyResult>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(PropertyResult::ok)
    }

    pub fn failures(&self) -> usize {
        self.results.iter().map(|r| r.failed).sum()
    }

    pub fn limited(&self) -> usize {
        self.results.iter().map(|r| r.limited).sum()
    }

    pub fn result(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.property == name)
    }

    pub fn summary(&self) -> String {
        let width = self.results.iter().map(|r| r.property.len()).max().unwrap_or(0);
        let mut out = format!("{} codes\n", self.codes);
        for r in &self.results {
            let verdict = match (r.failed, r.limited) {
                (0, 0) => "ok",
                (0, _) => "LIMIT",
                _ => "FAIL",
            };
            let _ = write!(
                out,
                "{:<width$}  {verdict:<5}  pass {}  skip {}  fail {}",
                r.property, r.passed, r.skipped, r.failed
            );
            if r.limited > 0 {
                let _ = write!(out, "  limited {}", r.limited);
            }
            out.push('\n');
            for c in &r.counterexamples {
                let _ = writeln!(out, "    {}: {}", c.code, c.detail);
            }
        }
        out
    }
}

/// Run every standard property over `corpus`.
pub fn check_properties<'a, I>(corpus: I) -> PropertyReport
where
    I: IntoIterator<Item = &'a DiagramCode>,
{
    check_with(corpus, &standard_properties(), &CheckOptions::default())
}

pub fn check_with<'a, I>(corpus: I, properties: &[Property], options: &CheckOptions) -> PropertyReport
where
    I: IntoIterator<Item = &'a DiagramCode>,
{
    let mut results: Vec<PropertyResult> = properties.iter().map(|p| PropertyResult::new(p.name)).collect();
    let mut codes = 0;
    for code in corpus {
        codes += 1;
        let text = code.to_string();
        for (property, result) in properties.iter().zip(&mut results) {
            match (property.check)(code, options) {
                Ok(outcome) => result.record(&text, outcome),
                Err(e) if e.is_resource_limit() => result.limited += 1,
                Err(e) => result.record(&text, Outcome::Fail(e.to_string())),
            }
        }
    }
    PropertyReport { codes, results }
}

pub fn standard_properties() -> Vec<Property> {
    vec![
        Property { name: "retrograde-duality", check: retrograde_duality },
        Property { name: "start-at-bridge", check: start_at_bridge },
        Property { name: "bridge-upper-bound", check: bridge_upper_bound },
        Property { name: "reduction-pipeline", check: reduction_pipeline },
        Property { name: "rule-ordering", check: rule_ordering },
        Property { name: "coincident-equals-smoothing", check: coincident_equals_smoothing },
        Property { name: "no-virtual-collapse", check: no_virtual_collapse },
        Property { name: "greedy-equals-oracle", check: greedy_equals_oracle },
        Property { name: "order-independence", check: order_independence },
        Property { name: "status-bounds", check: status_bounds },
    ]
}

/// Look up a standard property by name.
pub fn property(name: &str) -> Option<Property> {
    standard_properties().into_iter().find(|p| p.name == name)
}

fn retrograde_duality(code: &DiagramCode, _: &CheckOptions) -> Result<Outcome, SearchError> {
    let over = min_dancers(code, Rule::OVER_FIRST, false)?;
    let under = min_dancers(&code.reversed(), Rule::UNDER_FIRST, false)?;
    if over.dancers != under.dancers {
        return Ok(Outcome::Fail(format!("over-first {} but reversed under-first {}", over.dancers, under.dancers)));
    }
    let back = retrograde_trace(code, &over.trace)?;
    Ok(Outcome::check(back.dancers() == over.dancers, || "retrograde trace changed the dancer count".into()))
}

fn start_at_bridge(code: &DiagramCode, _: &CheckOptions) -> Result<Outcome, SearchError> {
    if bridge_count(code).count == 0 {
        return Ok(Outcome::Skip);
    }
    let all = min_dancers(code, Rule::OVER_FIRST, false)?;
    let restricted = min_dancers(code, Rule::OVER_FIRST, true)?;
    let starts = candidate_starts(code, Rule::OVER_FIRST, true)?;
    Ok(Outcome::check(
        all.dancers == restricted.dancers && restricted.config().starts().iter().all(|s| starts.contains(s)),
        || format!("all starts {} but bridge starts {}", all.dancers, restricted.dancers),
    ))
}

fn bridge_upper_bound(code: &DiagramCode, _: &CheckOptions) -> Result<Outcome, SearchError> {
    let bridges = bridge_count(code);
    if code.classical_count() == 0 {
        return Ok(Outcome::Skip);
    }
    let min = min_dancers(code, Rule::OVER_FIRST, false)?;
    if min.dancers > bridges.count {
        return Ok(Outcome::Fail(format!("{} dancers exceed {} bridges", min.dancers, bridges.count)));
    }
    // One dancer per bridge start is itself a witness.
    let config = Configuration::new(bridges.starts(), Rule::OVER_FIRST)?;
    Ok(Outcome::check(try_dance(code, &config)?.is_some(), || "bridge starts do not dance".into()))
}

fn reduction_pipeline(code: &DiagramCode, _: &CheckOptions) -> Result<Outcome, SearchError> {
    if code.classical_count() == 0 || code.has_virtual() {
        return Ok(Outcome::Skip);
    }
    let reduction = match reduce_to_bridge_minimal(code) {
        Ok(r) => r,
        Err(BridgeError::Search(e)) => return Err(e),
        Err(e) => return Ok(Outcome::Fail(e.to_string())),
    };
    let direct = min_dancers(&reduction.reduced, Rule::OVER_FIRST, false)?;
    Ok(Outcome::check(
        reduction.reduced_bridges == reduction.dancers
            && reduction.dancers == reduction.original_dancers
            && direct.dancers == reduction.dancers,
        || {
            format!(
                "reduced to {} with {} bridges, {} dancers (input {})",
                reduction.reduced, reduction.reduced_bridges, direct.dancers, reduction.original_dancers
            )
        },
    ))
}

fn rule_ordering(code: &DiagramCode, _: &CheckOptions) -> Result<Outcome, SearchError> {
    let Some(coincident) = optional(min_dancers(code, Rule::COINCIDENT, false))? else {
        return Ok(Outcome::Skip);
    };
    let unrestricted = min_dancers(code, Rule::OVER_FIRST, false)?;
    Ok(Outcome::check(unrestricted.dancers <= coincident.dancers, || {
        format!("unrestricted {} > coincident {}", unrestricted.dancers, coincident.dancers)
    }))
}

fn coincident_equals_smoothing(code: &DiagramCode, _: &CheckOptions) -> Result<Outcome, SearchError> {
    let coincident = optional(min_dancers(code, Rule::COINCIDENT, false))?;
    let smoothing = optional(min_dancers(code, Rule::SMOOTHING, false))?;
    let (c, s) = match (coincident, smoothing) {
        (None, None) => return Ok(Outcome::Pass),
        (Some(c), Some(s)) => (c, s),
        (c, s) => {
            return Ok(Outcome::Fail(format!(
                "coincident {:?} vs smoothing {:?}",
                c.map(|m| m.dancers),
                s.map(|m| m.dancers)
            )))
        }
    };
    if c.dancers != s.dancers {
        return Ok(Outcome::Fail(format!("coincident {} vs smoothing {}", c.dancers, s.dancers)));
    }
    let there = coincident_to_smoothing(code, &c.trace)?;
    let back = smoothing_to_coincident(code, &there)?;
    let other_way = coincident_to_smoothing(code, &smoothing_to_coincident(code, &s.trace)?)?;
    Ok(Outcome::check(back == c.trace && other_way == s.trace, || "transform does not round-trip".into()))
}

fn no_virtual_collapse(code: &DiagramCode, _: &CheckOptions) -> Result<Outcome, SearchError> {
    if code.has_virtual() {
        return Ok(Outcome::Skip);
    }
    let over = min_dancers(code, Rule::OVER_FIRST, false)?.dancers;
    let coincident = min_dancers(code, Rule::COINCIDENT, false)?.dancers;
    let smoothing = min_dancers(code, Rule::SMOOTHING, false)?.dancers;
    Ok(Outcome::check(over == coincident && coincident == smoothing, || {
        format!("over-first {over}, coincident {coincident}, smoothing {smoothing}")
    }))
}

const ALL_RULES: [Rule; 4] = [Rule::OVER_FIRST, Rule::UNDER_FIRST, Rule::COINCIDENT, Rule::SMOOTHING];

fn configurations(code: &DiagramCode, max_dancers: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1..=max_dancers.min(code.len())).flat_map(move |n| (0..code.len()).combinations(n))
}

fn greedy_equals_oracle(code: &DiagramCode, options: &CheckOptions) -> Result<Outcome, SearchError> {
    if code.len() > options.oracle_max_len || code.is_empty() {
        return Ok(Outcome::Skip);
    }
    let limits = OracleLimits { max_states: options.state_limit };
    for starts in configurations(code, options.oracle_max_dancers) {
        for rule in ALL_RULES {
            let config = Configuration::new(starts.clone(), rule)?;
            let greedy = try_dance(code, &config)?.is_some();
            let oracle = oracle_try_dance(code, &config, limits)?.is_some();
            if greedy != oracle {
                return Ok(Outcome::Fail(format!("starts {starts:?} under {rule}: greedy {greedy}, oracle {oracle}")));
            }
        }
    }
    Ok(Outcome::Pass)
}

fn order_independence(code: &DiagramCode, options: &CheckOptions) -> Result<Outcome, SearchError> {
    if code.len() > options.oracle_max_len || code.is_empty() {
        return Ok(Outcome::Skip);
    }
    for starts in configurations(code, options.oracle_max_dancers) {
        for rule in ALL_RULES {
            let config = Configuration::new(starts.clone(), rule)?;
            let first = try_dance(code, &config)?.is_some();
            let last = try_dance_with(code, &config, |enabled| enabled.len() - 1)?.is_some();
            if first != last {
                return Ok(Outcome::Fail(format!("starts {starts:?} under {rule} depends on move order")));
            }
        }
    }
    Ok(Outcome::Pass)
}

fn status_bounds(code: &DiagramCode, _: &CheckOptions) -> Result<Outcome, SearchError> {
    for rule in [Rule::OVER_FIRST, Rule::UNDER_FIRST] {
        let trace = min_dancers(code, rule, false)?.trace;
        let range = match rule.classical {
            ClassicalRule::OverFirst => 0..=1,
            ClassicalRule::UnderFirst => -1..=0,
        };
        let inside = trace.status_table().iter().flatten().all(|c| range.contains(c));
        let settled = trace.status_table().last().is_none_or(|row| row.iter().all(|&c| c == 0));
        if !inside || !settled {
            return Ok(Outcome::Fail(format!("{rule} statuses leave {range:?} or do not return to 0")));
        }
    }
    Ok(Outcome::Pass)
}

/// The constructive schedule validates and the coincident number of the
/// closure is at most the strand count, for every single-component word.
pub fn check_braid_bound<'a, I>(words: I) -> PropertyResult
where
    I: IntoIterator<Item = &'a BraidWord>,
{
    let mut result = PropertyResult::new("braid-bound");
    for word in words {
        let outcome = match braid_schedule(word) {
            Err(BraidError::NotAKnot { .. }) => Outcome::Skip,
            Err(e) => Outcome::Fail(e.to_string()),
            Ok((code, trace)) => match min_dancers(&code, Rule::COINCIDENT, false) {
                Ok(min) => Outcome::check(trace.dancers() == word.strands() && min.dancers <= word.strands(), || {
                    format!("coincident {} on {} strands", min.dancers, word.strands())
                }),
                Err(e) => Outcome::Fail(e.to_string()),
            },
        };
        result.record(&word.to_string(), outcome);
    }
    result
}
