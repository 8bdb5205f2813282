//! Scoring: task-level reward, normalized edit similarity, the complexity
//! gap between predicted and ground-truth programs, and corpus-level report
//! aggregation with per-group breakdowns.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsl::{Cascade, Task};

/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Fraction of examples the cascade maps exactly to their outputs.
pub fn reward(cascade: &Cascade, task: &Task) -> f64 {
    let solved = task
        .examples
        .iter()
        .filter(|ex| cascade.apply(&ex.input) == ex.output)
        .count();
    solved as f64 / task.examples.len() as f64
}

/// Similarity of one prediction to its target: 1 when both are empty,
/// otherwise `1 - levenshtein / max(len)`.
pub fn string_similarity(pred: &str, target: &str) -> f64 {
    let pl = pred.chars().count();
    let tl = target.chars().count();
    if pl == 0 && tl == 0 {
        return 1.0;
    }
    1.0 - levenshtein(pred, target) as f64 / pl.max(tl) as f64
}

/// Mean per-example similarity of the cascade's predictions to the outputs.
pub fn edit_similarity(cascade: &Cascade, task: &Task) -> f64 {
    let total: f64 = task
        .examples
        .iter()
        .map(|ex| string_similarity(&cascade.apply(&ex.input), &ex.output))
        .sum();
    total / task.examples.len() as f64
}

/// Per-task scoring summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub reward: f64,
    pub success: bool,
    pub edit_similarity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_complexity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_complexity: Option<usize>,
}

impl TaskScore {
    /// Scores a candidate cascade against a task.
    pub fn evaluate(cascade: &Cascade, task: &Task) -> TaskScore {
        let r = reward(cascade, task);
        TaskScore {
            reward: r,
            success: r == 1.0,
            edit_similarity: edit_similarity(cascade, task),
            predicted_complexity: Some(cascade.complexity()),
            gt_complexity: task.gt_complexity(),
        }
    }
}

/// Outcome of the complexity-gap computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaComplexity {
    /// Mean of predicted minus ground-truth complexity over solved tasks;
    /// absent when no task was solved.
    pub mean: Option<f64>,
    /// Solved tasks skipped because they carry no ground-truth complexity.
    pub skipped_missing_gt: usize,
}

/// Mean (predicted - ground-truth) complexity over solved tasks only.
pub fn delta_complexity(scores: &[TaskScore]) -> DeltaComplexity {
    let mut sum = 0.0;
    let mut n = 0usize;
    let mut skipped = 0usize;
    for score in scores.iter().filter(|s| s.success) {
        match (score.predicted_complexity, score.gt_complexity) {
            (Some(p), Some(g)) => {
                sum += p as f64 - g as f64;
                n += 1;
            }
            _ => skipped += 1,
        }
    }
    DeltaComplexity {
        mean: (n > 0).then(|| sum / n as f64),
        skipped_missing_gt: skipped,
    }
}

/// Breakdown group key. Orders numerically when both keys parse as
/// integers (so cascade-length groups come out as 2, 3, ..., 10 rather than
/// lexicographically), numeric before non-numeric, strings otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupKey(pub String);

impl GroupKey {
    fn numeric(&self) -> Option<u64> {
        self.0.parse().ok()
    }
}

impl From<&str> for GroupKey {
    fn from(s: &str) -> Self {
        GroupKey(s.to_owned())
    }
}

impl From<usize> for GroupKey {
    fn from(n: usize) -> Self {
        GroupKey(n.to_string())
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Ord for GroupKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for GroupKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The four aggregate fields, repeated per group in breakdowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub accuracy: f64,
    pub mean_reward: f64,
    pub edit_sim: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_complexity: Option<f64>,
}

/// Corpus-level report: overall means plus per-group breakdowns in
/// ascending key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub accuracy: f64,
    pub mean_reward: f64,
    pub edit_sim: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_complexity: Option<f64>,
    pub n_tasks: usize,
    pub breakdowns: BTreeMap<GroupKey, Breakdown>,
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

fn summarize(scores: &[TaskScore]) -> Breakdown {
    let n = scores.len() as f64;
    let solved = scores.iter().filter(|s| s.success).count() as f64;
    let mean_reward: f64 = scores.iter().map(|s| s.reward).sum::<f64>() / n;
    let edit: f64 = scores.iter().map(|s| s.edit_similarity).sum::<f64>() / n;
    Breakdown {
        accuracy: round1(100.0 * solved / n),
        mean_reward: round4(mean_reward),
        edit_sim: round1(100.0 * edit),
        delta_complexity: delta_complexity(scores).mean.map(round4),
    }
}

/// Aggregates per-task scores into a corpus report. `group_key` assigns each
/// score (by position) to an optional breakdown group; ungrouped scores
/// still contribute to the corpus totals.
///
/// Panics on an empty score slice.
pub fn aggregate(
    scores: &[TaskScore],
    group_key: impl Fn(usize, &TaskScore) -> Option<GroupKey>,
) -> CorpusReport {
    assert!(!scores.is_empty(), "cannot aggregate zero scores");
    let overall = summarize(scores);
    let mut groups: BTreeMap<GroupKey, Vec<TaskScore>> = BTreeMap::new();
    for (i, score) in scores.iter().enumerate() {
        if let Some(key) = group_key(i, score) {
            groups.entry(key).or_default().push(score.clone());
        }
    }
    let breakdowns = groups
        .into_iter()
        .map(|(key, members)| (key, summarize(&members)))
        .collect();
    CorpusReport {
        accuracy: overall.accuracy,
        mean_reward: overall.mean_reward,
        edit_sim: overall.edit_sim,
        delta_complexity: overall.delta_complexity,
        n_tasks: scores.len(),
        breakdowns,
    }
}

impl CorpusReport {
    /// Renders the report as an aligned plain-text table.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        let delta = |d: Option<f64>| match d {
            Some(v) => format!("{v:+.4}"),
            None => "—".to_owned(),
        };
        out.push_str(&format!(
            "{:<12} {:>8} {:>12} {:>9} {:>9} {:>8}\n",
            "group", "acc%", "mean_reward", "edit_sim", "delta", "n"
        ));
        out.push_str(&format!(
            "{:<12} {:>8.1} {:>12.4} {:>9.1} {:>9} {:>8}\n",
            "all",
            self.accuracy,
            self.mean_reward,
            self.edit_sim,
            delta(self.delta_complexity),
            self.n_tasks
        ));
        for (key, b) in &self.breakdowns {
            out.push_str(&format!(
                "{:<12} {:>8.1} {:>12.4} {:>9.1} {:>9} {:>8}\n",
                key.to_string(),
                b.accuracy,
                b.mean_reward,
                b.edit_sim,
                delta(b.delta_complexity),
                ""
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{Example, ReplaceOp};
    use proptest::prelude::*;

    fn task(pairs: &[(&str, &str)]) -> Task {
        let examples = pairs.iter().map(|(i, o)| Example::new(*i, *o)).collect();
        Task::with_derived_alphabet("t", examples, 5, None).unwrap()
    }

    fn score(reward: f64, pred: Option<usize>, gt: Option<usize>) -> TaskScore {
        TaskScore {
            reward,
            success: reward == 1.0,
            edit_similarity: if reward == 1.0 { 1.0 } else { reward },
            predicted_complexity: pred,
            gt_complexity: gt,
        }
    }

    #[test]
    fn reward_fractions() {
        let t = task(&[("a", "a"), ("b", "b"), ("c", "x"), ("d", "x"), ("e", "x")]);
        assert_eq!(reward(&Cascade::empty(), &t), 0.4);
        let t2 = task(&[("a", "b"), ("c", "b"), ("d", "b"), ("e", "b"), ("f", "f")]);
        let c = Cascade::new(vec![
            ReplaceOp::new("a", "b").unwrap(),
            ReplaceOp::new("c", "b").unwrap(),
        ]);
        // solves a, c, and the identity pair f: 3 of 5
        assert_eq!(reward(&c, &t2), 0.6);
    }

    #[test]
    fn gt_reward_is_one() {
        let gt = Cascade::new(vec![ReplaceOp::new("ab", "x").unwrap()]);
        let inputs = ["abab", "cab", "bbb"];
        let examples: Vec<Example> =
            inputs.iter().map(|i| Example::new(*i, gt.apply(i))).collect();
        let t = Task::with_derived_alphabet("t", examples, 5, None).unwrap();
        assert_eq!(reward(&gt, &t), 1.0);
    }

    #[test]
    fn edit_similarity_values() {
        let t = task(&[("abc", "abd")]);
        let sim = edit_similarity(&Cascade::empty(), &t);
        assert!((sim - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(string_similarity("", ""), 1.0);
        let solved = task(&[("ab", "ab")]);
        assert_eq!(edit_similarity(&Cascade::empty(), &solved), 1.0);
    }

    #[test]
    fn delta_complexity_conventions() {
        let scores = [score(1.0, Some(4), Some(2)), score(1.0, Some(5), Some(3))];
        assert_eq!(delta_complexity(&scores).mean, Some(2.0));
        let none = [score(0.5, Some(4), Some(2))];
        assert_eq!(delta_complexity(&none).mean, None);
        let undershoot = [score(1.0, Some(2), Some(4))];
        assert_eq!(delta_complexity(&undershoot).mean, Some(-2.0));
        let missing = [score(1.0, Some(2), None), score(1.0, Some(3), Some(3))];
        let d = delta_complexity(&missing);
        assert_eq!(d.mean, Some(0.0));
        assert_eq!(d.skipped_missing_gt, 1);
    }

    #[test]
    fn aggregate_basics() {
        let scores = [
            score(1.0, None, None),
            score(1.0, None, None),
            score(1.0, None, None),
            score(0.5, None, None),
        ];
        let report = aggregate(&scores, |_, _| None);
        assert_eq!(report.accuracy, 75.0);
        assert_eq!(report.n_tasks, 4);
        assert!(report.breakdowns.is_empty());

        let perfect = [score(1.0, None, None), score(1.0, None, None)];
        let report = aggregate(&perfect, |_, _| None);
        assert_eq!(report.mean_reward, 1.0);
        assert_eq!(report.edit_sim, 100.0);
    }

    #[test]
    fn aggregate_groups_in_key_order() {
        let scores = [
            score(1.0, None, None),
            score(0.0, None, None),
            score(1.0, None, None),
            score(1.0, None, None),
        ];
        let keys = ["10", "2", "10", "2"];
        let report = aggregate(&scores, |i, _| Some(GroupKey::from(keys[i])));
        let ordered: Vec<String> = report.breakdowns.keys().map(|k| k.0.clone()).collect();
        assert_eq!(ordered, vec!["2", "10"]);
        assert_eq!(report.breakdowns.len(), 2);
    }

    #[test]
    fn report_field_names() {
        let report = aggregate(&[score(1.0, Some(2), Some(2))], |_, _| Some(GroupKey::from(2usize)));
        let json = serde_json::to_value(&report).unwrap();
        for field in ["accuracy", "mean_reward", "edit_sim", "delta_complexity", "n_tasks", "breakdowns"] {
            assert!(json.get(field).is_some(), "missing field {field}");
        }
    }

    proptest! {
        #[test]
        fn levenshtein_symmetric(a in "[a-d]{0,12}", b in "[a-d]{0,12}") {
            prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        }

        #[test]
        fn levenshtein_triangle(
            a in "[a-d]{0,10}",
            b in "[a-d]{0,10}",
            c in "[a-d]{0,10}",
        ) {
            prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        }

        #[test]
        fn levenshtein_zero_iff_equal(a in "[a-d]{0,12}", b in "[a-d]{0,12}") {
            prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
        }

        #[test]
        fn perfect_reward_implies_perfect_similarity(
            inputs in proptest::collection::vec("[a-c]{0,8}", 1..5),
        ) {
            let op = ReplaceOp::new("a", "b").unwrap();
            let c = Cascade::new(vec![op]);
            let examples: Vec<Example> =
                inputs.iter().map(|i| Example::new(i.clone(), c.apply(i))).collect();
            let t = Task::with_derived_alphabet("t", examples, 5, None).unwrap();
            prop_assert_eq!(reward(&c, &t), 1.0);
            prop_assert_eq!(edit_similarity(&c, &t), 1.0);
        }

        #[test]
        fn aggregate_permutation_invariant(
            rewards in proptest::collection::vec(0..=4usize, 1..12),
            rotation in 0..12usize,
        ) {
            let scores: Vec<TaskScore> = rewards
                .iter()
                .map(|&r| score(r as f64 / 4.0, Some(r), Some(2)))
                .collect();
            let mut rotated = scores.clone();
            let split = rotation % rotated.len();
            rotated.rotate_left(split);
            let a = aggregate(&scores, |_, s| Some(GroupKey::from(s.predicted_complexity.unwrap())));
            let b = aggregate(&rotated, |_, s| Some(GroupKey::from(s.predicted_complexity.unwrap())));
            prop_assert_eq!(a, b);
        }
    }
}
