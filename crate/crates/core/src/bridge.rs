//! Bridges, the bridge slide, and reduction to a bridge-minimal code.
//!
//! A bridge is a maximal cyclic run of passages with no classical
//! under-passage and at least one over-passage. Virtual passages never break
//! a run, so on codes with virtual crossings the same count gives the
//! over-bridges.

use serde::Serialize;
use thiserror::Error;

use crate::codec::{ArcIndex, CrossingId, DiagramCode, Passage, PassageKind};
use crate::dance::{ClassicalRule, DanceError, DancerId, Rule, Trace};
use crate::search::{min_dancers, SearchError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error("code has no classical crossings")]
    NoClassicalCrossings,
    #[error(transparent)]
    Dance(#[from] DanceError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// The bridges of a code, each as the list of its passage indices in
/// traversal order. Runs are ordered by their first index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeReport {
    pub bridges: Vec<Vec<usize>>,
    pub count: usize,
}

impl BridgeReport {
    /// Arc at the start of each bridge (just after the preceding under-passage).
    pub fn starts(&self) -> Vec<ArcIndex> {
        let mut starts: Vec<ArcIndex> = self.bridges.iter().map(|b| b[0]).collect();
        starts.sort_unstable();
        starts
    }
}

pub fn bridge_count(code: &DiagramCode) -> BridgeReport {
    let len = code.len();
    let unders: Vec<usize> = (0..len).filter(|&i| code.passage(i).kind == PassageKind::Under).collect();
    let mut bridges = Vec::new();
    for (j, &u) in unders.iter().enumerate() {
        let next = unders[(j + 1) % unders.len()];
        let gap = (next + len - u - 1) % len;
        // A lone under-passage bounds a run covering the rest of the circle.
        let gap = if unders.len() == 1 { len - 1 } else { gap };
        let run: Vec<usize> = (1..=gap).map(|k| (u + k) % len).collect();
        if run.iter().any(|&i| code.passage(i).kind == PassageKind::Over) {
            bridges.push(run);
        }
    }
    bridges.sort_by_key(|b| b[0]);
    BridgeReport { count: bridges.len(), bridges }
}

/// Passage indices of one dancer's stretch, in walking order.
fn segment(code: &DiagramCode, starts: &[ArcIndex], dancer: DancerId) -> Vec<usize> {
    let len = code.len();
    let s = starts[dancer];
    let e = starts[(dancer + 1) % starts.len()];
    let m = if starts.len() == 1 { len } else { (e + len - s) % len };
    (0..m).map(|k| (s + k) % len).collect()
}

/// Bridges lying wholly inside the dancer's stretch, in walking order, as
/// offsets into that stretch.
fn covered_bridges(code: &DiagramCode, report: &BridgeReport, seg: &[usize]) -> Vec<(usize, usize)> {
    let len = code.len();
    let mut offset = vec![None; len];
    for (k, &i) in seg.iter().enumerate() {
        offset[i] = Some(k);
    }
    let mut covered: Vec<(usize, usize)> = report
        .bridges
        .iter()
        .filter_map(|b| {
            let first = offset[b[0]]?;
            let last = offset[*b.last().expect("bridges are non-empty")]?;
            (last + 1 == first + b.len()).then_some((first, last))
        })
        .collect();
    covered.sort_unstable();
    covered
}

/// How many bridges lie wholly inside each dancer's stretch.
pub fn bridges_per_dancer(code: &DiagramCode, trace: &Trace) -> Vec<usize> {
    let report = bridge_count(code);
    (0..trace.dancers())
        .map(|d| covered_bridges(code, &report, &segment(code, trace.config().starts(), d)).len())
        .collect()
}

/// Slide the under-pass between the dancer's first two bridges forward past
/// the second bridge, merging the two bridges.
///
/// The dancer's under-pass (the passages between its first and second bridge)
/// is moved to just after its second bridge. Every strand crossing that
/// under-pass then also crosses every strand passing the second bridge: for
/// each such pair a fresh crossing is added, over on the sliding strand and
/// under on the other (virtual when the sliding strand met the dancer at a
/// virtual crossing). New over-passages go immediately before the sliding
/// strand's old passage, in the order of the second bridge; new
/// under-passages go immediately after the crossed strand's old passage, in
/// the order of the under-pass.
pub fn bridge_slide(code: &DiagramCode, trace: &Trace, dancer: DancerId) -> Result<DiagramCode, BridgeError> {
    if trace.rule().classical != ClassicalRule::OverFirst {
        return Err(BridgeError::PreconditionViolated(format!("expected an over-first trace, got {}", trace.rule())));
    }
    if dancer >= trace.dancers() {
        return Err(BridgeError::PreconditionViolated(format!("dancer {dancer} does not exist")));
    }
    // The trace must dance this very code.
    Trace::build(code, trace.config().clone(), trace.move_kinds())?;
    slide_stretch(code, trace.config().starts(), dancer)
}

/// The rewrite itself, for the stretch of `dancer` given by `starts`.
fn slide_stretch(code: &DiagramCode, starts: &[ArcIndex], dancer: DancerId) -> Result<DiagramCode, BridgeError> {
    let len = code.len();
    let report = bridge_count(code);
    let seg = segment(code, starts, dancer);
    let covered = covered_bridges(code, &report, &seg);
    if covered.len() < 2 {
        return Err(BridgeError::PreconditionViolated(format!(
            "dancer {dancer} covers {} bridge(s), at least two are needed",
            covered.len()
        )));
    }
    let (_, end1) = covered[0];
    let (start2, end2) = covered[1];
    let underpass: Vec<usize> = seg[end1 + 1..start2].to_vec();
    let overpass: Vec<usize> = seg[start2..=end2].to_vec();

    let crossings = |idx: &[usize]| -> Vec<CrossingId> { idx.iter().map(|&i| code.passage(i).crossing).collect() };
    let over_ids = crossings(&overpass);
    if let Some(shared) = crossings(&underpass).into_iter().find(|c| over_ids.contains(c)) {
        return Err(BridgeError::PreconditionViolated(format!(
            "crossing {shared} lies both in the under-pass and in the second bridge"
        )));
    }

    let mut before: Vec<Vec<Passage>> = vec![Vec::new(); len];
    let mut after: Vec<Vec<Passage>> = vec![Vec::new(); len];
    let mut fresh = code.max_crossing();
    // The second bridge may contain only over- and virtual passages; the
    // under-pass only under- and virtual passages.
    for &x in &underpass {
        let sliding = code.partner(x);
        let virtual_slider = code.passage(x).kind == PassageKind::Virtual;
        for &y in &overpass {
            let crossed = code.partner(y);
            fresh += 1;
            let (top, bottom) = if virtual_slider {
                (Passage::virt(fresh), Passage::virt(fresh))
            } else {
                (Passage::over(fresh), Passage::under(fresh))
            };
            before[sliding].push(top);
            after[crossed].push(bottom);
        }
    }

    let block = |i: usize| -> Vec<Passage> {
        let mut b = before[i].clone();
        b.push(code.passage(i));
        b.extend_from_slice(&after[i]);
        b
    };
    let relocate_after = *overpass.last().expect("bridges are non-empty");
    let mut passages = Vec::with_capacity(len + 2 * underpass.len() * overpass.len());
    for i in 0..len {
        if underpass.contains(&i) {
            continue;
        }
        passages.extend(block(i));
        if i == relocate_after {
            for &u in &underpass {
                passages.extend(block(u));
            }
        }
    }
    let slid = DiagramCode::new(passages)
        .map_err(|e| BridgeError::PostconditionFailed(format!("slide produced an invalid code: {e}")))?;

    let (old, new) = (report.count, bridge_count(&slid).count);
    if new + 1 != old {
        return Err(BridgeError::PostconditionFailed(format!(
            "bridge count went from {old} to {new} on {code} -> {slid}"
        )));
    }
    Ok(slid)
}

/// Result of sliding bridges until every bridge holds a dancer's start.
#[derive(Debug, Clone, Serialize)]
pub struct Reduction {
    pub original: DiagramCode,
    pub original_bridges: usize,
    /// Minimal over-first dancer count of the original code.
    pub original_dancers: usize,
    pub reduced: DiagramCode,
    pub reduced_bridges: usize,
    pub dancers: usize,
    /// Codes after each slide, in order.
    pub steps: Vec<DiagramCode>,
    pub trace: Trace,
}

impl Reduction {
    pub fn already_minimal(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Repeatedly take a minimal over-first dance starting on bridge starts and
/// slide away a bridge without a start, until bridges and dancers agree.
/// Terminates because every slide removes one bridge.
pub fn reduce_to_bridge_minimal(code: &DiagramCode) -> Result<Reduction, BridgeError> {
    if code.classical_count() == 0 {
        return Err(BridgeError::NoClassicalCrossings);
    }
    let rule = Rule::OVER_FIRST;
    let first = min_dancers(code, rule, true)?;
    let original_dancers = first.dancers;
    let original_bridges = bridge_count(code).count;
    let mut current = code.clone();
    let mut witness = first;
    let mut steps = Vec::new();
    loop {
        let bridges = bridge_count(&current).count;
        if bridges == witness.dancers {
            return Ok(Reduction {
                original: code.clone(),
                original_bridges,
                original_dancers,
                reduced_bridges: bridges,
                dancers: witness.dancers,
                reduced: current,
                steps,
                trace: witness.trace,
            });
        }
        let per_dancer = bridges_per_dancer(&current, &witness.trace);
        let Some(dancer) = per_dancer.iter().position(|&b| b >= 2) else {
            return Err(BridgeError::PostconditionFailed(format!(
                "{bridges} bridges but {} dancers and none covers two bridges on {current}",
                witness.dancers
            )));
        };
        current = bridge_slide(&current, &witness.trace, dancer)?;
        steps.push(current.clone());
        witness = min_dancers(&current, rule, true)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_code;
    use crate::dance::{try_dance, Configuration};
    use proptest::prelude::*;

    fn code(text: &str) -> DiagramCode {
        parse_code(text).unwrap()
    }

    /// Count passages that open a bridge: an over-passage whose nearest
    /// classical predecessor (walking backwards past virtual passages) is an
    /// under-passage.
    fn bridges_by_backward_scan(c: &DiagramCode) -> usize {
        let len = c.len();
        (0..len)
            .filter(|&i| c.passage(i).kind == PassageKind::Over)
            .filter(|&i| {
                (1..=len)
                    .map(|k| c.passage((i + len - k) % len).kind)
                    .find(|&k| k != PassageKind::Virtual)
                    == Some(PassageKind::Under)
            })
            .count()
    }

    #[test]
    fn counts_named_examples() {
        assert_eq!(bridge_count(&code("1+ 2- 3+ 1- 2+ 3-")).count, 3);
        let vt = bridge_count(&code("1+ 2+ 1- 2-"));
        assert_eq!(vt.count, 1);
        assert_eq!(vt.bridges, vec![vec![0, 1]]);
        assert_eq!(bridge_count(&DiagramCode::empty()).count, 0);
        assert_eq!(bridge_count(&code("v1 v1")).count, 0);
        assert_eq!(bridge_count(&code("1+ 1-")).count, 1);
    }

    #[test]
    fn virtual_passages_do_not_break_runs() {
        // Unders at 1 and 3; {v3} alone has no over, {2+, v3, 1+} wraps round.
        let c = code("1+ 2- v3 1- 2+ v3");
        let report = bridge_count(&c);
        assert_eq!(report.count, 1);
        assert_eq!(report.bridges, vec![vec![4, 5, 0]]);
        assert_eq!(report.starts(), vec![4]);
        assert_eq!(bridges_by_backward_scan(&c), 1);
    }

    #[test]
    fn trefoil_slide_gives_expected_code() {
        let t = code("1+ 2- 3+ 1- 2+ 3-");
        let tr = try_dance(&t, &Configuration::new(vec![0, 2], Rule::OVER_FIRST).unwrap()).unwrap().unwrap();
        assert_eq!(bridges_per_dancer(&t, &tr), vec![1, 2]);
        let slid = bridge_slide(&t, &tr, 1).unwrap();
        assert_eq!(slid, code("4+ 1+ 2- 4- 3+ 2+ 1- 3-"));
        assert_eq!(bridge_count(&slid).count, 2);
        let starts = bridge_count(&slid).starts();
        assert!(try_dance(&slid, &Configuration::new(starts, Rule::OVER_FIRST).unwrap()).unwrap().is_some());
    }

    #[test]
    fn slide_needs_two_bridges() {
        let t = code("1+ 2- 3+ 1- 2+ 3-");
        let tr = try_dance(&t, &Configuration::new(vec![0, 2], Rule::OVER_FIRST).unwrap()).unwrap().unwrap();
        assert!(matches!(bridge_slide(&t, &tr, 0), Err(BridgeError::PreconditionViolated(_))));
    }

    #[test]
    fn slide_rejects_non_over_first_trace() {
        let e = code("1+ 2- 2+ 1-");
        let tr = try_dance(&e, &Configuration::new(vec![1], Rule::UNDER_FIRST).unwrap()).unwrap().unwrap();
        assert!(matches!(bridge_slide(&e, &tr, 0), Err(BridgeError::PreconditionViolated(_))));
    }

    #[test]
    fn slide_rejects_shared_crossing() {
        // Dancer 0 walks 1+ | 2- | 2+: the under-pass and the second bridge
        // share crossing 2. No valid over-first dance has this shape, so the
        // guard is exercised below the trace check.
        let c = code("1+ 2- 2+ 1-");
        let err = slide_stretch(&c, &[0, 3], 0).unwrap_err();
        assert!(matches!(err, BridgeError::PreconditionViolated(ref m) if m.contains("crossing 2")), "{err}");
        assert!(try_dance(&c, &Configuration::new(vec![0, 3], Rule::OVER_FIRST).unwrap()).unwrap().is_none());
    }

    #[test]
    fn reduces_trefoil() {
        let t = code("1+ 2- 3+ 1- 2+ 3-");
        let r = reduce_to_bridge_minimal(&t).unwrap();
        assert_eq!(r.original_bridges, 3);
        assert_eq!(r.original_dancers, 2);
        assert_eq!(r.reduced_bridges, 2);
        assert_eq!(r.dancers, 2);
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.trace.dancers(), 2);
    }

    #[test]
    fn minimal_codes_are_left_alone() {
        let e = code("1+ 2- 2+ 1-");
        let r = reduce_to_bridge_minimal(&e).unwrap();
        assert!(r.already_minimal());
        assert_eq!((r.reduced_bridges, r.dancers), (2, 2));
        assert_eq!(r.reduced, e);
        let k = code("1+ 1-");
        let r = reduce_to_bridge_minimal(&k).unwrap();
        assert!(r.already_minimal());
        assert_eq!((r.reduced_bridges, r.dancers), (1, 1));
        assert_eq!(reduce_to_bridge_minimal(&code("v1 v1")).unwrap_err(), BridgeError::NoClassicalCrossings);
    }

    proptest! {
        #[test]
        fn count_matches_backward_scan(c in crate::codec::tests::arb_code()) {
            let report = bridge_count(&c);
            prop_assert_eq!(report.count, bridges_by_backward_scan(&c));
            prop_assert_eq!(report.count == 0, c.classical_count() == 0);
            for run in &report.bridges {
                prop_assert!(run.iter().all(|&i| c.passage(i).kind != PassageKind::Under));
            }
        }
    }
}
