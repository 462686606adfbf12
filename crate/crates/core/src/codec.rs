//! Extended Gauss codes.
//!
//! A code is the cyclic sequence of crossing visits met while walking once
//! around an oriented diagram. Classical crossings are visited twice, once on
//! the over-strand (`3+`) and once on the under-strand (`3-`); virtual
//! crossings are visited twice as `v3`. Writhe signs are not part of the
//! grammar.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a crossing inside one code. Only identity matters.
pub type CrossingId = u32;

/// Position of an arc: the arc immediately before the passage with the same index.
pub type ArcIndex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("malformed token `{token}` at position {position}")]
    Syntax { token: String, position: usize },
    #[error("crossing {crossing}: {reason}")]
    Validation { crossing: CrossingId, reason: String },
}

/// How the traversal meets a crossing.
///
/// The declaration order is the order used when comparing codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PassageKind {
    Over,
    Under,
    Virtual,
}

impl PassageKind {
    pub fn is_classical(self) -> bool {
        !matches!(self, PassageKind::Virtual)
    }
}

/// One visit of the traversal to a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Passage {
    pub crossing: CrossingId,
    pub kind: PassageKind,
}

impl Passage {
    pub const fn over(crossing: CrossingId) -> Self {
        Passage { crossing, kind: PassageKind::Over }
    }

    pub const fn under(crossing: CrossingId) -> Self {
        Passage { crossing, kind: PassageKind::Under }
    }

    pub const fn virt(crossing: CrossingId) -> Self {
        Passage { crossing, kind: PassageKind::Virtual }
    }
}

impl fmt::Display for Passage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PassageKind::Over => write!(f, "{}+", self.crossing),
            PassageKind::Under => write!(f, "{}-", self.crossing),
            PassageKind::Virtual => write!(f, "v{}", self.crossing),
        }
    }
}

impl FromStr for Passage {
    type Err = CodecError;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        parse_token(token, 0)
    }
}

fn parse_id(digits: &str) -> Option<CrossingId> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<CrossingId>().ok().filter(|&id| id > 0)
}

fn parse_token(token: &str, position: usize) -> Result<Passage, CodecError> {
    let parsed = if let Some(rest) = token.strip_prefix('v') {
        parse_id(rest).map(Passage::virt)
    } else if let Some(rest) = token.strip_suffix('+') {
        parse_id(rest).map(Passage::over)
    } else if let Some(rest) = token.strip_suffix('-') {
        parse_id(rest).map(Passage::under)
    } else {
        None
    };
    parsed.ok_or_else(|| CodecError::Syntax { token: token.to_string(), position })
}

/// A validated extended Gauss code.
///
/// Every classical crossing occurs exactly once as `Over` and once as `Under`;
/// every virtual crossing occurs exactly twice as `Virtual`. The sequence is
/// cyclic, but equality (`==`) compares element-wise from index 0; use
/// [`DiagramCode::cyclically_eq`] for rotation-invariant comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DiagramCode {
    passages: Vec<Passage>,
    partner: Vec<usize>,
}

impl DiagramCode {
    /// The crossingless code.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(passages: Vec<Passage>) -> Result<Self, CodecError> {
        let partner = validate(&passages)?;
        Ok(DiagramCode { passages, partner })
    }

    pub fn passages(&self) -> &[Passage] {
        &self.passages
    }

    pub fn len(&self) -> usize {
        self.passages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passages.is_empty()
    }

    pub fn passage(&self, index: usize) -> Passage {
        self.passages[index]
    }

    /// Index of the other visit to the same crossing.
    pub fn partner(&self, index: usize) -> usize {
        self.partner[index]
    }

    pub fn classical_count(&self) -> usize {
        self.passages.iter().filter(|p| p.kind == PassageKind::Over).count()
    }

    pub fn virtual_count(&self) -> usize {
        self.passages.iter().filter(|p| p.kind == PassageKind::Virtual).count() / 2
    }

    pub fn has_virtual(&self) -> bool {
        self.passages.iter().any(|p| p.kind == PassageKind::Virtual)
    }

    /// Classical crossing identifiers in order of first appearance.
    pub fn classical_crossings(&self) -> Vec<CrossingId> {
        let mut seen = Vec::new();
        for p in &self.passages {
            if p.kind.is_classical() && !seen.contains(&p.crossing) {
                seen.push(p.crossing);
            }
        }
        seen
    }

    pub fn max_crossing(&self) -> CrossingId {
        self.passages.iter().map(|p| p.crossing).max().unwrap_or(0)
    }

    /// The same diagram traversed in the opposite direction.
    pub fn reversed(&self) -> DiagramCode {
        let passages: Vec<Passage> = self.passages.iter().rev().copied().collect();
        let len = passages.len();
        let partner = self.partner.iter().rev().map(|&q| len - 1 - q).collect();
        DiagramCode { passages, partner }
    }

    /// The code read starting at `start`.
    pub fn rotated(&self, start: usize) -> DiagramCode {
        let len = self.len();
        if len == 0 {
            return self.clone();
        }
        let start = start % len;
        let passages = (0..len).map(|i| self.passages[(start + i) % len]).collect();
        let partner = (0..len)
            .map(|i| (self.partner[(start + i) % len] + len - start) % len)
            .collect();
        DiagramCode { passages, partner }
    }

    /// Lexicographically least rotation after relabelling crossings
    /// `1, 2, ...` in order of first appearance.
    pub fn canonical_rotation(&self) -> DiagramCode {
        let len = self.len();
        if len == 0 {
            return self.clone();
        }
        let mut best = relabelled(&self.passages, 0);
        let mut best_start = 0;
        let mut scratch = Vec::with_capacity(len);
        for start in 1..len {
            relabel_into(&self.passages, start, &mut scratch);
            if scratch < best {
                std::mem::swap(&mut best, &mut scratch);
                best_start = start;
            }
        }
        let rotated = self.rotated(best_start);
        DiagramCode { passages: best, partner: rotated.partner }
    }

    /// True when this code is its own canonical rotation.
    pub fn is_canonical(&self) -> bool {
        let len = self.len();
        if len == 0 {
            return true;
        }
        let base = relabelled(&self.passages, 0);
        if base != self.passages {
            return false;
        }
        let mut scratch = Vec::with_capacity(len);
        (1..len).all(|start| {
            relabel_into(&self.passages, start, &mut scratch);
            scratch >= base
        })
    }

    pub fn cyclically_eq(&self, other: &DiagramCode) -> bool {
        self.len() == other.len() && self.canonical_rotation() == other.canonical_rotation()
    }
}

fn relabelled(passages: &[Passage], start: usize) -> Vec<Passage> {
    let mut out = Vec::with_capacity(passages.len());
    relabel_into(passages, start, &mut out);
    out
}

fn relabel_into(passages: &[Passage], start: usize, out: &mut Vec<Passage>) {
    out.clear();
    let len = passages.len();
    // Codes are small; a linear map beats hashing here.
    let mut map: Vec<(CrossingId, CrossingId)> = Vec::with_capacity(len / 2);
    for i in 0..len {
        let p = passages[(start + i) % len];
        let label = match map.iter().find(|(old, _)| *old == p.crossing) {
            Some(&(_, new)) => new,
            None => {
                let new = map.len() as CrossingId + 1;
                map.push((p.crossing, new));
                new
            }
        };
        out.push(Passage { crossing: label, kind: p.kind });
    }
}

fn validate(passages: &[Passage]) -> Result<Vec<usize>, CodecError> {
    #[derive(Default)]
    struct Seen {
        over: Vec<usize>,
        under: Vec<usize>,
        virt: Vec<usize>,
    }
    let mut order = Vec::new();
    let mut seen: HashMap<CrossingId, Seen> = HashMap::new();
    for (i, p) in passages.iter().enumerate() {
        let entry = seen.entry(p.crossing).or_insert_with(|| {
            order.push(p.crossing);
            Seen::default()
        });
        match p.kind {
            PassageKind::Over => entry.over.push(i),
            PassageKind::Under => entry.under.push(i),
            PassageKind::Virtual => entry.virt.push(i),
        }
    }
    let mut partner = vec![0; passages.len()];
    for id in order {
        let s = &seen[&id];
        let fail = |reason: String| Err(CodecError::Validation { crossing: id, reason });
        let classical = s.over.len() + s.under.len();
        if classical > 0 && !s.virt.is_empty() {
            return fail("used both as a classical and as a virtual crossing".into());
        }
        if classical > 0 {
            if s.over.len() != 1 || s.under.len() != 1 {
                return fail(format!(
                    "expected one over and one under passage, found {} over and {} under",
                    s.over.len(),
                    s.under.len()
                ));
            }
            partner[s.over[0]] = s.under[0];
            partner[s.under[0]] = s.over[0];
        } else {
            if s.virt.len() != 2 {
                return fail(format!("expected two virtual passages, found {}", s.virt.len()));
            }
            partner[s.virt[0]] = s.virt[1];
            partner[s.virt[1]] = s.virt[0];
        }
    }
    Ok(partner)
}

/// Parse whitespace-separated tokens `<n>+`, `<n>-` and `v<n>`.
pub fn parse_code(text: &str) -> Result<DiagramCode, CodecError> {
    let passages = text
        .split_whitespace()
        .enumerate()
        .map(|(i, tok)| parse_token(tok, i))
        .collect::<Result<Vec<_>, _>>()?;
    DiagramCode::new(passages)
}

pub fn serialize_code(code: &DiagramCode) -> String {
    code.to_string()
}

pub fn reverse_code(code: &DiagramCode) -> DiagramCode {
    code.reversed()
}

pub fn canonical_rotation(code: &DiagramCode) -> DiagramCode {
    code.canonical_rotation()
}

impl FromStr for DiagramCode {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_code(s)
    }
}

impl fmt::Display for DiagramCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.passages.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl Serialize for DiagramCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DiagramCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_code(&text).map_err(serde::de::Error::custom)
    }
}

/// Iterate the code lines of a corpus file: blank lines and lines starting
/// with `#` are skipped. Yields `(line_number, result)` with 1-based numbers.
pub fn parse_corpus(text: &str) -> impl Iterator<Item = (usize, Result<DiagramCode, CodecError>)> + '_ {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, parse_code(trimmed)))
        }
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn code(text: &str) -> DiagramCode {
        parse_code(text).unwrap()
    }

    #[test]
    fn parses_trefoil() {
        let t = code("1+ 2- 3+ 1- 2+ 3-");
        assert_eq!(t.len(), 6);
        assert_eq!(t.classical_count(), 3);
        assert_eq!(t.virtual_count(), 0);
        assert_eq!(t.passage(0), Passage::over(1));
        assert_eq!(t.partner(0), 3);
        assert_eq!(t.partner(3), 0);
    }

    #[test]
    fn parses_empty_and_virtual_kink() {
        assert!(code("").is_empty());
        assert!(code("   \n ").is_empty());
        let k = code("v1 v1");
        assert_eq!((k.len(), k.classical_count(), k.virtual_count()), (2, 0, 1));
        assert_eq!(k.partner(0), 1);
    }

    #[test]
    fn pairing_violation_names_crossing() {
        match parse_code("1+ 2- 1+ 1- 2+") {
            Err(CodecError::Validation { crossing, .. }) => assert_eq!(crossing, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_code("1+ v1 1- v1"), Err(CodecError::Validation { crossing: 1, .. })));
        assert!(matches!(parse_code("v2"), Err(CodecError::Validation { crossing: 2, .. })));
        assert!(matches!(parse_code("3+ 3+"), Err(CodecError::Validation { crossing: 3, .. })));
    }

    #[test]
    fn rejects_malformed_tokens() {
        for bad in ["1a+", "x", "+", "v", "0+", "v0", "1+-", "-1-", "1", "V1", "1 +"] {
            assert!(
                matches!(parse_code(bad), Err(CodecError::Syntax { .. })),
                "{bad} should be a syntax error"
            );
        }
        match parse_code("1+ 1a- 1-") {
            Err(CodecError::Syntax { token, position }) => {
                assert_eq!(token, "1a-");
                assert_eq!(position, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn serializes() {
        assert_eq!(code("1+   2- 3+ 1- 2+ 3-").to_string(), "1+ 2- 3+ 1- 2+ 3-");
        assert_eq!(serialize_code(&DiagramCode::empty()), "");
        assert_eq!(serialize_code(&code("v1 v1")), "v1 v1");
    }

    #[test]
    fn reverses() {
        let t = code("1+ 2- 3+ 1- 2+ 3-");
        assert_eq!(reverse_code(&t), code("3- 2+ 1- 3+ 2- 1+"));
        assert_eq!(reverse_code(&DiagramCode::empty()), DiagramCode::empty());
        assert_eq!(reverse_code(&code("1+ 2- 2+ 1-")), code("1- 2+ 2- 1+"));
        let r = t.reversed();
        for i in 0..r.len() {
            assert_eq!(r.passage(r.partner(i)).crossing, r.passage(i).crossing);
        }
    }

    #[test]
    fn canonical_examples() {
        let t = code("1+ 2- 3+ 1- 2+ 3-");
        let rot = code("2- 3+ 1- 2+ 3- 1+");
        assert_eq!(canonical_rotation(&rot), canonical_rotation(&t));
        assert!(rot.cyclically_eq(&t));
        assert_eq!(canonical_rotation(&code("v1 v1")), code("v1 v1"));
        assert_eq!(canonical_rotation(&code("5+ 5-")), code("1+ 1-"));
        assert_eq!(canonical_rotation(&code("5- 5+")), code("1+ 1-"));
        assert!(t.cyclically_eq(&t.reversed()));
        let e = code("1+ 2- 2+ 1-");
        assert!(!e.cyclically_eq(&e.reversed()));
    }

    #[test]
    fn corpus_lines() {
        let text = "# comment\n1+ 1-\n\n  v1 v1\nbad\n";
        let lines: Vec<_> = parse_corpus(text).collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].0, 2);
        assert_eq!(lines[1].0, 4);
        assert_eq!(lines[2].0, 5);
        assert!(lines[2].1.is_err());
    }

    /// Random valid codes: shuffle the passages of `c` classical and `v`
    /// virtual crossings with arbitrary identifiers.
    pub(crate) fn arb_code() -> impl Strategy<Value = DiagramCode> {
        (0usize..5, 0usize..3, any::<u64>()).prop_flat_map(|(c, v, salt)| {
            let mut items = Vec::new();
            for i in 0..c {
                let id = (i as u32 + 1) * 7 + (salt % 5) as u32;
                items.push(Passage::over(id));
                items.push(Passage::under(id));
            }
            for i in 0..v {
                let id = 1000 + i as u32;
                items.push(Passage::virt(id));
                items.push(Passage::virt(id));
            }
            Just(items).prop_shuffle().prop_map(|p| DiagramCode::new(p).unwrap())
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_round_trip(c in arb_code()) {
            prop_assert_eq!(parse_code(&serialize_code(&c)).unwrap(), c);
        }

        #[test]
        fn reverse_is_involution(c in arb_code()) {
            prop_assert_eq!(c.reversed().reversed(), c);
        }

        #[test]
        fn canonical_is_rotation_invariant(c in arb_code(), k in 0usize..20) {
            let canon = c.canonical_rotation();
            prop_assert_eq!(canon.canonical_rotation(), canon.clone());
            prop_assert!(canon.is_canonical());
            prop_assert_eq!(c.rotated(k).canonical_rotation(), canon);
        }

        #[test]
        fn classical_passages_balance(c in arb_code()) {
            let overs = c.passages().iter().filter(|p| p.kind == PassageKind::Over).count();
            let unders = c.passages().iter().filter(|p| p.kind == PassageKind::Under).count();
            prop_assert_eq!(overs, unders);
            prop_assert_eq!(c.len(), 2 * c.classical_count() + 2 * c.virtual_count());
        }
    }
}
