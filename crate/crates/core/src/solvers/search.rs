//! Shared search machinery: the (intermediate strings, cascade) state, the
//! lexicographic scoring tuple, safety filtering, and dynamic candidate
//! extraction from intermediate states.

use std::cmp::Ordering;

use crate::diff::{extract_candidates, CandidateSet};
use crate::dsl::{ReplaceOp, Task};
use crate::metrics::levenshtein;

/// Matched context width used when extracting candidates during search.
pub(crate) const EXTRACT_CONTEXT: usize = 2;

/// One point in the search: per-example intermediate strings plus the ops
/// applied so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct State {
    pub currents: Vec<String>,
    pub ops: Vec<ReplaceOp>,
}

impl State {
    pub fn initial(task: &Task) -> State {
        State {
            currents: task.examples.iter().map(|ex| ex.input.clone()).collect(),
            ops: Vec::new(),
        }
    }

    pub fn apply(&self, op: &ReplaceOp) -> State {
        let mut next = self.clone();
        for s in &mut next.currents {
            *s = op.apply(s);
        }
        next.ops.push(op.clone());
        next
    }

    /// True when the op leaves every current string untouched.
    pub fn op_is_inert(&self, op: &ReplaceOp) -> bool {
        self.currents.iter().all(|s| op.is_inert_on(s))
    }
}

/// Lexicographic score: more solved examples, then smaller total residual
/// edit distance, then fewer ops. `Ord` is arranged so that greater is
/// better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Score {
    pub solved: usize,
    pub residual: u64,
    pub len: usize,
}

impl Score {
    pub fn of(state: &State, targets: &[&str]) -> Score {
        let mut solved = 0usize;
        let mut residual = 0u64;
        for (cur, tgt) in state.currents.iter().zip(targets) {
            if cur == tgt {
                solved += 1;
            } else {
                residual += levenshtein(cur, tgt) as u64;
            }
        }
        Score { solved, residual, len: state.ops.len() }
    }

    pub fn is_perfect(&self, n_examples: usize) -> bool {
        self.solved == n_examples
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        self.solved
            .cmp(&other.solved)
            .then_with(|| other.residual.cmp(&self.residual))
            .then_with(|| other.len.cmp(&self.len))
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The search context: task targets plus the evaluation counter every
/// strategy reports.
pub(crate) struct SearchCtx<'a> {
    pub task: &'a Task,
    pub targets: Vec<&'a str>,
    pub evaluated: u64,
}

impl<'a> SearchCtx<'a> {
    pub fn new(task: &'a Task) -> SearchCtx<'a> {
        SearchCtx {
            task,
            targets: task.examples.iter().map(|ex| ex.output.as_str()).collect(),
            evaluated: 0,
        }
    }

    pub fn n_examples(&self) -> usize {
        self.targets.len()
    }

    pub fn score(&mut self, state: &State) -> Score {
        self.evaluated += 1;
        Score::of(state, &self.targets)
    }

    /// Candidates extracted from the state's mismatched (current, target)
    /// pairs.
    pub fn candidates(&self, state: &State) -> CandidateSet {
        let pairs: Vec<(String, String)> = state
            .currents
            .iter()
            .zip(&self.targets)
            .filter(|(cur, tgt)| cur.as_str() != **tgt)
            .map(|(cur, tgt)| (cur.clone(), (*tgt).to_owned()))
            .collect();
        extract_candidates(&pairs, EXTRACT_CONTEXT)
    }

    /// An op is safe at a state when its pattern occurs in no already-solved
    /// example's current string.
    pub fn is_safe(&self, op: &ReplaceOp, state: &State) -> bool {
        state
            .currents
            .iter()
            .zip(&self.targets)
            .filter(|(cur, tgt)| cur.as_str() == **tgt)
            .all(|(cur, _)| op.is_inert_on(cur))
    }
}

/// Lexicographic permutations of `0..n`, at most `cap` of them, starting
/// from the identity.
pub(crate) fn permutations_capped(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![perm.clone()];
    while out.len() < cap {
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
        out.push(perm.clone());
    }
    out
}
