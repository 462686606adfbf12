//! Virtual braid words, their closures, and the level-by-level coincident
//! schedule on a closure.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::codec::{ArcIndex, CrossingId, DiagramCode, Passage};
use crate::dance::{Configuration, DanceError, DancerId, MoveKind, Rule, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("bad braid token {token:?}: {reason}")]
    Syntax { token: String, reason: String },
    #[error("letter index {index} out of range for {strands} strands")]
    IndexOutOfRange { index: usize, strands: usize },
    #[error("closure is not a knot: it has {components} components")]
    NotAKnot { components: usize },
    #[error(transparent)]
    Dance(#[from] DanceError),
}

/// One generator. Indices are 1-based: letter `i` acts on positions `i` and `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BraidLetter {
    Sigma(usize),
    SigmaInv(usize),
    Tau(usize),
}

impl BraidLetter {
    pub fn index(self) -> usize {
        match self {
            BraidLetter::Sigma(i) | BraidLetter::SigmaInv(i) | BraidLetter::Tau(i) => i,
        }
    }
}

impl fmt::Display for BraidLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BraidLetter::Sigma(i) => write!(f, "s{i}"),
            BraidLetter::SigmaInv(i) => write!(f, "S{i}"),
            BraidLetter::Tau(i) => write!(f, "v{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<BraidLetter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<BraidLetter>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::Syntax { token: "n=0".into(), reason: "need at least one strand".into() });
        }
        if let Some(bad) = letters.iter().find(|l| l.index() == 0 || l.index() >= strands) {
            return Err(BraidError::IndexOutOfRange { index: bad.index(), strands });
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[BraidLetter] {
        &self.letters
    }

    /// Number of components of the closure.
    pub fn components(&self) -> usize {
        let perm = self.permutation();
        let mut seen = vec![false; self.strands];
        let mut cycles = 0;
        for s in 0..self.strands {
            if seen[s] {
                continue;
            }
            cycles += 1;
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                p = perm[p];
            }
        }
        cycles
    }

    /// `perm[p]`: top position (0-based) of the strand entering at bottom position `p`.
    fn permutation(&self) -> Vec<usize> {
        (0..self.strands)
            .map(|start| self.letters.iter().fold(start, |p, l| step(p, l.index() - 1)))
            .collect()
    }
}

/// Position after a letter acting on 0-based positions `i` and `i + 1`.
fn step(p: usize, i: usize) -> usize {
    if p == i {
        i + 1
    } else if p == i + 1 {
        i
    } else {
        p
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.strands)?;
        for l in &self.letters {
            write!(f, " {l}")?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = BraidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_braid(s)
    }
}

/// Parse `n=<k>` followed by `s<i>`, `S<i>` (inverse) and `v<i>` tokens.
/// Without `n=`, the strand count is one more than the largest index.
pub fn parse_braid(text: &str) -> Result<BraidWord, BraidError> {
    let mut strands = None;
    let mut letters = Vec::new();
    for (k, token) in text.split_whitespace().enumerate() {
        let syntax = |reason: &str| BraidError::Syntax { token: token.to_string(), reason: reason.to_string() };
        if let Some(n) = token.strip_prefix("n=") {
            if k != 0 {
                return Err(syntax("strand count must come first"));
            }
            strands = Some(n.parse::<usize>().map_err(|_| syntax("expected a strand count"))?);
            continue;
        }
        let mut chars = token.chars();
        let head = chars.next().expect("tokens are nonempty");
        let index: usize = chars.as_str().parse().map_err(|_| syntax("expected a letter index"))?;
        letters.push(match head {
            's' => BraidLetter::Sigma(index),
            'S' => BraidLetter::SigmaInv(index),
            'v' => BraidLetter::Tau(index),
            _ => return Err(syntax("expected s<i>, S<i>, v<i> or n=<k>")),
        });
    }
    let strands = strands.unwrap_or_else(|| letters.iter().map(|l| l.index() + 1).max().unwrap_or(1));
    BraidWord::new(strands, letters)
}

/// A traversed closure and the arc at the bottom of each position.
struct Closure {
    code: DiagramCode,
    bottom_arcs: Vec<ArcIndex>,
}

fn traverse(word: &BraidWord) -> Result<Closure, BraidError> {
    let components = word.components();
    if components != 1 {
        return Err(BraidError::NotAKnot { components });
    }
    let mut passages = Vec::with_capacity(2 * word.letters.len());
    let mut bottom_arcs = vec![0; word.strands];
    let mut relabel: HashMap<usize, CrossingId> = HashMap::new();
    let mut p = 0;
    for _ in 0..word.strands {
        bottom_arcs[p] = passages.len();
        for (level, letter) in word.letters.iter().enumerate() {
            let i = letter.index() - 1;
            if p != i && p != i + 1 {
                continue;
            }
            let next = relabel.len() as CrossingId + 1;
            let id = *relabel.entry(level).or_insert(next);
            let rising = p == i;
            passages.push(match letter {
                BraidLetter::Sigma(_) if rising => Passage::over(id),
                BraidLetter::Sigma(_) => Passage::under(id),
                BraidLetter::SigmaInv(_) if rising => Passage::under(id),
                BraidLetter::SigmaInv(_) => Passage::over(id),
                BraidLetter::Tau(_) => Passage::virt(id),
            });
            p = step(p, i);
        }
    }
    debug_assert_eq!(p, 0);
    let code = DiagramCode::new(passages).expect("closure passages pair up");
    let len = code.len().max(1);
    for arc in &mut bottom_arcs {
        *arc %= len;
    }
    Ok(Closure { code, bottom_arcs })
}

/// Closure of a single-component word, traversed upwards from the bottom
/// of the first strand. Crossings are numbered by first appearance.
pub fn braid_closure(word: &BraidWord) -> Result<DiagramCode, BraidError> {
    Ok(traverse(word)?.code)
}

/// The closure together with a coincident schedule using one dancer per
/// strand. Dancers climb level by level; at a classical letter the dancer
/// on the over-strand moves first, at a virtual letter the two meet.
pub fn braid_schedule(word: &BraidWord) -> Result<(DiagramCode, Trace), BraidError> {
    let Closure { code, bottom_arcs } = traverse(word)?;
    if code.is_empty() {
        let trace = Trace::build(&code, Configuration::trivial(Rule::COINCIDENT), Vec::new())?;
        return Ok((code, trace));
    }
    let config = Configuration::new(bottom_arcs.clone(), Rule::COINCIDENT)?;
    // at[p]: dancer on position p; arc[d]: where dancer d stands.
    let mut at: Vec<DancerId> = bottom_arcs
        .iter()
        .map(|a| config.starts().binary_search(a).expect("bottom arc is a start"))
        .collect();
    let mut arc: Vec<ArcIndex> = config.starts().to_vec();
    let len = code.len();
    let mut moves = Vec::with_capacity(len);
    for letter in &word.letters {
        let i = letter.index() - 1;
        let (low, high) = (at[i], at[i + 1]);
        match letter {
            BraidLetter::Tau(_) => {
                let crossing = code.passage(arc[low]).crossing;
                moves.push(MoveKind::Rendezvous { first: low, second: high, crossing });
            }
            _ => {
                let (first, second) = if code.passage(arc[low]).kind == crate::codec::PassageKind::Over {
                    (low, high)
                } else {
                    (high, low)
                };
                moves.push(MoveKind::Single { dancer: first, passage: arc[first] });
                moves.push(MoveKind::Single { dancer: second, passage: arc[second] });
            }
        }
        arc[low] = (arc[low] + 1) % len;
        arc[high] = (arc[high] + 1) % len;
        at.swap(i, i + 1);
    }
    let trace = Trace::build(&code, config, moves)?;
    Ok((code, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_code;
    use crate::dance::{oracle_try_dance, OracleLimits};
    use proptest::prelude::*;

    fn word(text: &str) -> BraidWord {
        parse_braid(text).unwrap()
    }

    #[test]
    fn parsing() {
        let w = word("n=2 s1 s1 s1");
        assert_eq!((w.strands(), w.letters().len()), (2, 3));
        assert_eq!(word("n=2 s1 v1").letters(), &[BraidLetter::Sigma(1), BraidLetter::Tau(1)]);
        assert_eq!(word("S2 v1").strands(), 3);
        assert_eq!(word("").strands(), 1);
        assert_eq!(parse_braid("n=2 s5"), Err(BraidError::IndexOutOfRange { index: 5, strands: 2 }));
        assert!(matches!(parse_braid("n=2 s0"), Err(BraidError::IndexOutOfRange { .. })));
        assert!(matches!(parse_braid("n=2 x1"), Err(BraidError::Syntax { .. })));
        assert!(matches!(parse_braid("s1 n=2"), Err(BraidError::Syntax { .. })));
        assert!(matches!(parse_braid("n=0"), Err(BraidError::Syntax { .. })));
        assert_eq!(word("n=3 s1 S2 v1").to_string(), "n=3 s1 S2 v1");
    }

    #[test]
    fn trefoil_closure() {
        let t = braid_closure(&word("n=2 s1 s1 s1")).unwrap();
        assert_eq!(t, parse_code("1+ 2- 3+ 1- 2+ 3-").unwrap());
        let mirror = braid_closure(&word("n=2 S1 S1 S1")).unwrap();
        assert_eq!(mirror, parse_code("1- 2+ 3- 1+ 2- 3+").unwrap());
    }

    #[test]
    fn closures_of_small_words() {
        assert_eq!(braid_closure(&word("n=1")).unwrap(), DiagramCode::empty());
        assert_eq!(braid_closure(&word("n=2 s1 s1")), Err(BraidError::NotAKnot { components: 2 }));
        assert_eq!(braid_closure(&word("n=3 s1")), Err(BraidError::NotAKnot { components: 2 }));
        assert_eq!(braid_closure(&word("n=2 v1 s1")), Err(BraidError::NotAKnot { components: 2 }));
        assert_eq!(braid_closure(&word("n=2 v1")).unwrap(), parse_code("v1 v1").unwrap());
        assert_eq!(braid_closure(&word("n=2 v1 s1 s1")).unwrap(), parse_code("v1 2- 3+ v1 2+ 3-").unwrap());
    }

    #[test]
    fn schedules_validate() {
        for text in ["n=2 s1 s1 s1", "n=2 v1", "n=2 v1 s1 s1", "n=3 s1 v2", "n=3 s1 S2 s1 v2", "n=1"] {
            let (code, trace) = braid_schedule(&word(text)).unwrap();
            assert_eq!(trace.rule(), Rule::COINCIDENT);
            assert_eq!(trace.dancers(), word(text).strands(), "{text}");
            let oracle = oracle_try_dance(&code, trace.config(), OracleLimits::default()).unwrap();
            assert!(oracle.is_some(), "{text}");
        }
        let (_, trace) = braid_schedule(&word("n=2 v1")).unwrap();
        assert_eq!(trace.rendezvous_count(), 1);
    }

    fn arb_word() -> impl Strategy<Value = BraidWord> {
        (1usize..=3).prop_flat_map(|n| {
            let letter = (0u8..3, 1..n.max(2)).prop_map(|(k, i)| match k {
                0 => BraidLetter::Sigma(i),
                1 => BraidLetter::SigmaInv(i),
                _ => BraidLetter::Tau(i),
            });
            let letters = if n == 1 { Just(Vec::new()).boxed() } else { proptest::collection::vec(letter, 0..7).boxed() };
            letters.prop_map(move |l| BraidWord::new(n, l).unwrap())
        })
    }

    proptest! {
        #[test]
        fn closure_passage_counts(w in arb_word()) {
            match braid_closure(&w) {
                Ok(code) => {
                    prop_assert_eq!(code.len(), 2 * w.letters().len());
                    prop_assert!(code.is_empty() || code.passages()[0].crossing == 1);
                    let (_, trace) = braid_schedule(&w).unwrap();
                    prop_assert_eq!(trace.dancers(), w.strands());
                }
                Err(BraidError::NotAKnot { components }) => prop_assert!(components > 1),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}
