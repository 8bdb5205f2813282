//! The string-rewrite DSL: single `replace(A, B)` operations, ordered
//! cascades of them, and the tasks they are synthesized from.
//!
//! Execution semantics are the replace-all of mainstream string libraries:
//! left-to-right, non-overlapping, and text inserted by a replacement is not
//! rescanned within the same operation. All lengths are counted in Unicode
//! scalar values, not bytes.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::taskgen::BfccLabel;

/// Pattern length bounds: `|A| in [1, 3]`.
pub const MAX_PATTERN_LEN: usize = 3;
/// Replacement length bounds: `|B| in [0, 3]`.
pub const MAX_REPLACEMENT_LEN: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("pattern length {0} outside [1, {MAX_PATTERN_LEN}] scalar values")]
    PatternLength(usize),
    #[error("replacement length {0} outside [0, {MAX_REPLACEMENT_LEN}] scalar values")]
    ReplacementLength(usize),
    #[error("identity op: pattern and replacement are both {0:?}")]
    IdentityOp(String),
    #[error("task {0:?} has no examples")]
    EmptyTask(String),
    #[error("task {task:?}: character {ch:?} appears in examples but not in the alphabet")]
    AlphabetGap { task: String, ch: char },
    #[error("task {0:?}: max_programs must be positive")]
    ZeroBudget(String),
}

/// A single literal rewrite `replace(pattern, replacement)`.
///
/// Construction enforces the DSL bounds and rejects identity ops.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReplaceOp {
    pattern: String,
    replacement: String,
}

impl ReplaceOp {
    pub fn new(pattern: impl Into<String>, replacement: impl Into<String>) -> Result<Self, DslError> {
        let pattern = pattern.into();
        let replacement = replacement.into();
        let plen = pattern.chars().count();
        let rlen = replacement.chars().count();
        if plen == 0 || plen > MAX_PATTERN_LEN {
            return Err(DslError::PatternLength(plen));
        }
        if rlen > MAX_REPLACEMENT_LEN {
            return Err(DslError::ReplacementLength(rlen));
        }
        if pattern == replacement {
            return Err(DslError::IdentityOp(pattern));
        }
        Ok(ReplaceOp { pattern, replacement })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn replacement(&self) -> &str {
        &self.replacement
    }

    /// Replaces all non-overlapping occurrences of the pattern, scanning left
    /// to right; scanning resumes after inserted text, so a replacement is
    /// never rescanned within one application.
    pub fn apply(&self, s: &str) -> String {
        s.replace(&self.pattern, &self.replacement)
    }

    /// True when applying this op to `s` would leave it unchanged.
    pub fn is_inert_on(&self, s: &str) -> bool {
        !s.contains(&self.pattern)
    }
}

impl fmt::Display for ReplaceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} -> {:?})", self.pattern, self.replacement)
    }
}

impl Serialize for ReplaceOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.pattern, &self.replacement).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ReplaceOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (pattern, replacement) = <(String, String)>::deserialize(deserializer)?;
        ReplaceOp::new(pattern, replacement).map_err(D::Error::custom)
    }
}

/// An ordered sequence of rewrite ops, applied left to right.
///
/// Serializes as a JSON array of two-element arrays: `[["ab","x"],["b",""]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cascade {
    ops: Vec<ReplaceOp>,
}

impl Cascade {
    pub fn new(ops: Vec<ReplaceOp>) -> Self {
        Cascade { ops }
    }

    pub fn empty() -> Self {
        Cascade { ops: Vec::new() }
    }

    pub fn ops(&self) -> &[ReplaceOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The complexity measure: number of ops.
    pub fn complexity(&self) -> usize {
        self.ops.len()
    }

    /// Folds every op over `s` in order; the empty cascade is the identity.
    pub fn apply(&self, s: &str) -> String {
        self.ops.iter().fold(s.to_owned(), |acc, op| op.apply(&acc))
    }

    /// Intermediate states of applying the cascade to `s`: the returned
    /// vector starts with `s` itself and has one entry per op thereafter.
    pub fn trace(&self, s: &str) -> Vec<String> {
        let mut states = Vec::with_capacity(self.ops.len() + 1);
        states.push(s.to_owned());
        for op in &self.ops {
            let next = op.apply(states.last().expect("trace is never empty"));
            states.push(next);
        }
        states
    }
}

impl From<Vec<ReplaceOp>> for Cascade {
    fn from(ops: Vec<ReplaceOp>) -> Self {
        Cascade::new(ops)
    }
}

/// One input-output pair of a task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub input: String,
    pub output: String,
}

impl Example {
    pub fn new(input: impl Into<String>, output: impl Into<String>) -> Self {
        Example { input: input.into(), output: output.into() }
    }

    pub fn is_identity(&self) -> bool {
        self.input == self.output
    }
}

/// Optional ground-truth metadata attached to generated tasks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TaskMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<Cascade>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cascade_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bfcc: Option<BfccLabel>,
}

impl TaskMeta {
    pub fn is_empty(&self) -> bool {
        self.ground_truth.is_none() && self.cascade_length.is_none() && self.bfcc.is_none()
    }
}

/// A programming-by-example instance: examples, a program budget, and the
/// alphabet the strings are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub task_id: String,
    pub examples: Vec<Example>,
    pub max_programs: usize,
    pub alphabet: Vec<char>,
    pub meta: Option<TaskMeta>,
}

impl Task {
    /// Builds a task, checking the alphabet covers every example character.
    pub fn new(
        task_id: impl Into<String>,
        examples: Vec<Example>,
        max_programs: usize,
        alphabet: Vec<char>,
        meta: Option<TaskMeta>,
    ) -> Result<Self, DslError> {
        let task_id = task_id.into();
        if examples.is_empty() {
            return Err(DslError::EmptyTask(task_id));
        }
        if max_programs == 0 {
            return Err(DslError::ZeroBudget(task_id));
        }
        let set: BTreeSet<char> = alphabet.iter().copied().collect();
        for ex in &examples {
            for ch in ex.input.chars().chain(ex.output.chars()) {
                if !set.contains(&ch) {
                    return Err(DslError::AlphabetGap { task: task_id, ch });
                }
            }
        }
        Ok(Task { task_id, examples, max_programs, alphabet, meta })
    }

    /// Builds a task deriving the alphabet from the examples themselves
    /// (sorted, deduplicated). Used when ingesting task files, which do not
    /// carry an explicit alphabet.
    pub fn with_derived_alphabet(
        task_id: impl Into<String>,
        examples: Vec<Example>,
        max_programs: usize,
        meta: Option<TaskMeta>,
    ) -> Result<Self, DslError> {
        let alphabet: Vec<char> = examples
            .iter()
            .flat_map(|ex| ex.input.chars().chain(ex.output.chars()))
            .collect::<BTreeSet<char>>()
            .into_iter()
            .collect();
        Task::new(task_id, examples, max_programs, alphabet, meta)
    }

    /// True when every example already maps input to itself.
    pub fn is_degenerate(&self) -> bool {
        self.examples.iter().all(Example::is_identity)
    }

    pub fn ground_truth(&self) -> Option<&Cascade> {
        self.meta.as_ref().and_then(|m| m.ground_truth.as_ref())
    }

    pub fn gt_complexity(&self) -> Option<usize> {
        self.meta.as_ref().and_then(|m| m.cascade_length)
    }
}

/// Exact count of distinct `replace(A, B)` programs over an alphabet of size
/// `alphabet_size`: `(V + V^2 + V^3) * (1 + V + V^2 + V^3)`, minus nothing —
/// the count includes identity ops, matching the published table.
pub fn count_programs(alphabet_size: u64) -> u64 {
    assert!(alphabet_size >= 1, "alphabet size must be positive");
    let v = alphabet_size;
    let patterns = v + v * v + v * v * v;
    let replacements = 1 + patterns;
    patterns * replacements
}

/// Size of the cascade search space up to `max_len` programs: the sum over
/// cascade lengths `k = 1..=max_len` of `count_programs(V)^k`. Exponential in
/// `k`, hence arbitrary precision.
pub fn cascade_search_space(alphabet_size: u64, max_len: u32) -> BigUint {
    assert!(max_len >= 1, "max_len must be positive");
    let c = BigUint::from(count_programs(alphabet_size));
    let mut total = BigUint::from(0u32);
    let mut power = BigUint::from(1u32);
    for _ in 0..max_len {
        power *= &c;
        total += &power;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn op(p: &str, r: &str) -> ReplaceOp {
        ReplaceOp::new(p, r).unwrap()
    }

    #[test]
    fn op_construction_bounds() {
        assert!(ReplaceOp::new("", "x").is_err());
        assert!(ReplaceOp::new("abcd", "x").is_err());
        assert!(ReplaceOp::new("a", "wxyz").is_err());
        assert!(ReplaceOp::new("ab", "ab").is_err());
        assert!(ReplaceOp::new("abc", "").is_ok());
        // lengths are in scalar values, not bytes
        assert!(ReplaceOp::new("αβγ", "δε").is_ok());
    }

    #[test]
    fn apply_op_semantics() {
        assert_eq!(op("ab", "x").apply("abab"), "xx");
        assert_eq!(op("aa", "b").apply("aaa"), "ba");
        assert_eq!(op("a", "aa").apply("aa"), "aaaa");
    }

    #[test]
    fn apply_cascade_composes_in_order() {
        assert_eq!(Cascade::empty().apply("abc"), "abc");
        let feeding = Cascade::new(vec![op("a", "b"), op("b", "c")]);
        assert_eq!(feeding.apply("a"), "c");
        let counterfeeding = Cascade::new(vec![op("b", "c"), op("a", "b")]);
        assert_eq!(counterfeeding.apply("a"), "b");
    }

    #[test]
    fn trace_records_intermediates() {
        let c = Cascade::new(vec![op("a", "b"), op("b", "c")]);
        assert_eq!(c.trace("a"), vec!["a", "b", "c"]);
    }

    #[test]
    fn cascade_serialization_form() {
        let c = Cascade::new(vec![op("ab", "x"), op("b", "")]);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"[["ab","x"],["b",""]]"#);
        let back: Cascade = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn cascade_deserialization_rejects_invalid_ops() {
        assert!(serde_json::from_str::<Cascade>(r#"[["",""]]"#).is_err());
        assert!(serde_json::from_str::<Cascade>(r#"[["aaaa","x"]]"#).is_err());
        assert!(serde_json::from_str::<Cascade>(r#"[["a","a"]]"#).is_err());
    }

    #[test]
    fn count_programs_table_values() {
        assert_eq!(count_programs(13), 5_662_020);
        assert_eq!(count_programs(17), 27_243_180);
        assert_eq!(count_programs(52), 20_553_379_860);
    }

    #[test]
    fn count_programs_matches_enumeration_small() {
        // brute force over all (pattern, replacement) pairs for V = 1..=4
        for v in 1usize..=4 {
            let alphabet: Vec<char> = ('a'..).take(v).collect();
            let mut patterns: Vec<String> = Vec::new();
            let mut atoms: Vec<String> = vec![String::new()];
            for _ in 0..MAX_PATTERN_LEN {
                let mut next = Vec::new();
                for s in &atoms {
                    for &c in &alphabet {
                        let mut t = s.clone();
                        t.push(c);
                        next.push(t);
                    }
                }
                patterns.extend(next.iter().cloned());
                atoms = next;
            }
            let mut replacements = vec![String::new()];
            replacements.extend(patterns.iter().cloned());
            let count = patterns.len() * replacements.len();
            assert_eq!(count_programs(v as u64), count as u64, "V = {v}");
        }
    }

    #[test]
    fn cascade_search_space_values() {
        assert_eq!(cascade_search_space(13, 1), BigUint::from(5_662_020u64));
        // c = (2+4+8)(1+2+4+8) = 210; 210 + 210^2 = 44310
        assert_eq!(cascade_search_space(2, 2), BigUint::from(44_310u64));
        // independent route: explicit powers of the program count
        let c = BigUint::from(5_662_020u64);
        let expected: BigUint = (1..=5u32).map(|k| c.pow(k)).sum();
        let got = cascade_search_space(13, 5);
        assert_eq!(got, expected);
        // reported magnitude: ~5.8e33
        let digits = got.to_string();
        assert_eq!(digits.len(), 34);
        assert!(digits.starts_with("58"));
    }

    #[test]
    fn task_alphabet_validation() {
        let ex = vec![Example::new("ab", "b")];
        assert!(Task::new("t", ex.clone(), 5, vec!['a', 'b'], None).is_ok());
        let err = Task::new("t", ex.clone(), 5, vec!['a'], None).unwrap_err();
        assert!(matches!(err, DslError::AlphabetGap { ch: 'b', .. }));
        assert!(matches!(Task::new("t", vec![], 5, vec![], None), Err(DslError::EmptyTask(_))));
        assert!(matches!(Task::new("t", ex, 0, vec!['a', 'b'], None), Err(DslError::ZeroBudget(_))));
    }

    proptest! {
        #[test]
        fn empty_cascade_is_identity(s in "[a-c#]{0,20}") {
            prop_assert_eq!(Cascade::empty().apply(&s), s);
        }

        #[test]
        fn cascade_concatenation_composes(
            s in "[a-c]{0,16}",
            ops1 in proptest::collection::vec(("[a-c]{1,3}", "[a-c]{0,3}"), 0..3),
            ops2 in proptest::collection::vec(("[a-c]{1,3}", "[a-c]{0,3}"), 0..3),
        ) {
            let build = |pairs: &[(String, String)]| {
                Cascade::new(
                    pairs
                        .iter()
                        .filter_map(|(p, r)| ReplaceOp::new(p.clone(), r.clone()).ok())
                        .collect(),
                )
            };
            let c1 = build(&ops1);
            let c2 = build(&ops2);
            let mut joined = c1.ops().to_vec();
            joined.extend(c2.ops().iter().cloned());
            let joined = Cascade::new(joined);
            prop_assert_eq!(joined.apply(&s), c2.apply(&c1.apply(&s)));
        }

        // Single-character patterns cannot straddle replacement boundaries,
        // so any op whose replacement omits the pattern char is idempotent.
        #[test]
        fn single_char_ops_idempotent(s in "[a-c]{0,20}", r in "[b-c]{0,3}") {
            let op = ReplaceOp::new("a", r).unwrap();
            let once = op.apply(&s);
            prop_assert_eq!(op.apply(&once), once);
        }

        // Multi-char patterns are idempotent when the replacement is
        // nonempty and shares no characters with the pattern: no occurrence
        // survives and no new adjacency can recreate one.
        #[test]
        fn disjoint_replacement_idempotent(s in "[a-d]{0,20}", r in "[x-z]{1,3}") {
            let op = ReplaceOp::new("ab", r).unwrap();
            let once = op.apply(&s);
            prop_assert_eq!(op.apply(&once), once);
        }
    }
}
