//! Relational rule induction over train descriptions: the five-predicate
//! fact DSL, a local evaluator emulating Prolog existential semantics, and
//! layered ascending-complexity search that prefers the simplest rule
//! consistent with the labels.

mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::{
    normalize, parse_facts, render_train_facts, Atom, CarRecord, Fact, NormalizeError, Predicate,
    SlrParseError, TrainModel,
};

macro_rules! atom_enum {
    ($name:ident { $($variant:ident => $atom:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn atom(&self) -> &'static str {
                match self {
                    $($name::$variant => $atom),+
                }
            }

            pub fn from_atom(s: &str) -> Option<$name> {
                match s {
                    $($atom => Some($name::$variant),)+
                    _ => None,
                }
            }
        }
    };
}

atom_enum!(Color {
    Red => "red",
    Blue => "blue",
    Green => "green",
    Yellow => "yellow",
    White => "white",
});

atom_enum!(CarLength {
    Short => "short",
    Long => "long",
});

atom_enum!(WallType {
    Full => "full",
    Railing => "railing",
});

/// Car attributes in the fixed enumeration order used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Attribute {
    Color,
    Len,
    Wall,
    Num,
}

impl Attribute {
    pub fn predicate_name(&self) -> &'static str {
        match self {
            Attribute::Color => "car_color",
            Attribute::Len => "car_len",
            Attribute::Wall => "has_wall",
            Attribute::Num => "car_num",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AttrValue {
    Color(Color),
    Len(CarLength),
    Wall(WallType),
    Num(u32),
}

impl AttrValue {
    pub fn atom(&self) -> String {
        match self {
            AttrValue::Color(c) => c.atom().to_owned(),
            AttrValue::Len(l) => l.atom().to_owned(),
            AttrValue::Wall(w) => w.atom().to_owned(),
            AttrValue::Num(n) => n.to_string(),
        }
    }

    pub fn attribute(&self) -> Attribute {
        match self {
            AttrValue::Color(_) => Attribute::Color,
            AttrValue::Len(_) => Attribute::Len,
            AttrValue::Wall(_) => Attribute::Wall,
            AttrValue::Num(_) => Attribute::Num,
        }
    }
}

/// A body literal: either an attribute test on a bound car variable, or
/// negation-as-failure over an existential block ("no car has this value").
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Literal {
    Positive { var: usize, value: AttrValue },
    NegatedExists { value: AttrValue },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule has no literals")]
    Empty,
    #[error("car variable {0} is never referenced by a positive literal")]
    UnreferencedVar(usize),
}

/// A candidate classification rule: `eastbound(T) :- Body.`
///
/// Complexity is the number of body literals, excluding the implicit
/// `has_car` bindings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    car_vars: usize,
    literals: Vec<Literal>,
}

impl Rule {
    /// Builds a rule; car variables are numbered 0.. and every one must be
    /// referenced by at least one positive literal.
    pub fn new(literals: Vec<Literal>) -> Result<Rule, RuleError> {
        if literals.is_empty() {
            return Err(RuleError::Empty);
        }
        let mut max_var: Option<usize> = None;
        for lit in &literals {
            if let Literal::Positive { var, .. } = lit {
                max_var = Some(max_var.map_or(*var, |m: usize| m.max(*var)));
            }
        }
        let car_vars = max_var.map_or(0, |m| m + 1);
        for var in 0..car_vars {
            let referenced = literals
                .iter()
                .any(|lit| matches!(lit, Literal::Positive { var: v, .. } if *v == var));
            if !referenced {
                return Err(RuleError::UnreferencedVar(var));
            }
        }
        Ok(Rule { car_vars, literals })
    }

    pub fn car_vars(&self) -> usize {
        self.car_vars
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn complexity(&self) -> usize {
        self.literals.len()
    }
}

/// True iff some assignment of distinct cars to the rule's variables
/// satisfies every positive literal, and no car at all satisfies any
/// negated block (negation-as-failure over the ground model).
pub fn eval_rule(rule: &Rule, train: &TrainModel) -> bool {
    for lit in &rule.literals {
        if let Literal::NegatedExists { value } = lit {
            let exists = train
                .cars
                .iter()
                .any(|car| car.value(value.attribute()) == Some(*value));
            if exists {
                return false;
            }
        }
    }
    if rule.car_vars == 0 {
        return true;
    }
    // requirements per variable
    let mut requirements: Vec<Vec<AttrValue>> = vec![Vec::new(); rule.car_vars];
    for lit in &rule.literals {
        if let Literal::Positive { var, value } = lit {
            requirements[*var].push(*value);
        }
    }
    fn assign(
        requirements: &[Vec<AttrValue>],
        train: &TrainModel,
        var: usize,
        used: &mut Vec<usize>,
    ) -> bool {
        if var == requirements.len() {
            return true;
        }
        for (idx, car) in train.cars.iter().enumerate() {
            if used.contains(&idx) {
                continue;
            }
            let fits = requirements[var]
                .iter()
                .all(|value| car.value(value.attribute()) == Some(*value));
            if fits {
                used.push(idx);
                if assign(requirements, train, var + 1, used) {
                    return true;
                }
                used.pop();
            }
        }
        false
    }
    assign(&requirements, train, 0, &mut Vec::new())
}

/// Canonical rendering: `eastbound(T) :- has_car(T,C1), car_color(C1,red).`
/// Negated blocks use fresh variables numbered after the positive ones.
pub fn render_rule(rule: &Rule) -> String {
    let mut parts: Vec<String> = (1..=rule.car_vars).map(|v| format!("has_car(T,C{v})")).collect();
    let mut fresh = rule.car_vars;
    for lit in &rule.literals {
        match lit {
            Literal::Positive { var, value } => {
                parts.push(format!(
                    "{}(C{},{})",
                    value.attribute().predicate_name(),
                    var + 1,
                    value.atom()
                ));
            }
            Literal::NegatedExists { value } => {
                fresh += 1;
                parts.push(format!(
                    "\\+ (has_car(T,C{fresh}), {}(C{fresh},{}))",
                    value.attribute().predicate_name(),
                    value.atom()
                ));
            }
        }
    }
    format!("eastbound(T) :- {}.", parts.join(", "))
}

/// Exact count of candidate rules with up to 4 body literals drawn from `L`
/// ground literals: `C(L,1) + C(L,2) + C(L,3) + C(L,4)`.
pub fn count_rule_candidates(literal_count: u64) -> u64 {
    assert!(literal_count >= 1, "literal count must be positive");
    (1..=4u64)
        .map(|k| {
            if k > literal_count {
                0
            } else {
                // C(L, k) without overflow for the table's range
                let mut num = 1u64;
                for i in 0..k {
                    num = num * (literal_count - i) / (i + 1);
                }
                num
            }
        })
        .sum()
}

/// Train direction label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Eastbound,
    Westbound,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Eastbound => "eastbound",
            Label::Westbound => "westbound",
        })
    }
}

/// One classification task: labeled fact texts, one per train.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlrTask {
    pub task_id: String,
    pub examples: Vec<(String, Label)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlrError {
    #[error("task {task_id}: example {index}: {source}")]
    Parse { task_id: String, index: usize, source: SlrParseError },
    #[error("task {task_id}: example {index}: {source}")]
    Normalize { task_id: String, index: usize, source: NormalizeError },
    #[error("task {0} has no examples")]
    EmptyTask(String),
}

/// A scored candidate rule.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedRule {
    pub rule: Rule,
    pub score: f64,
}

/// Result of rule induction.
#[derive(Debug, Clone, PartialEq)]
pub struct Induction {
    /// Ranked candidates: best first. A perfect rule, when found, is alone.
    pub candidates: Vec<InducedRule>,
    /// All examples carry the same label; the search degenerates to
    /// constant-behavior rules.
    pub single_class: bool,
}

/// Parses and normalizes every example of a task.
pub fn load_trains(task: &SlrTask) -> Result<Vec<(TrainModel, bool)>, SlrError> {
    if task.examples.is_empty() {
        return Err(SlrError::EmptyTask(task.task_id.clone()));
    }
    let mut trains = Vec::with_capacity(task.examples.len());
    for (index, (text, label)) in task.examples.iter().enumerate() {
        let facts = parse_facts(text).map_err(|source| SlrError::Parse {
            task_id: task.task_id.clone(),
            index,
            source,
        })?;
        let train = normalize(&facts).map_err(|source| SlrError::Normalize {
            task_id: task.task_id.clone(),
            index,
            source,
        })?;
        trains.push((train, *label == Label::Eastbound));
    }
    Ok(trains)
}

/// The attribute-value vocabulary actually present in the trains, in the
/// fixed (attribute, domain-declaration) order.
pub fn literal_vocabulary(trains: &[(TrainModel, bool)]) -> Vec<AttrValue> {
    let mut vocab = Vec::new();
    let present = |value: AttrValue| {
        trains.iter().any(|(train, _)| {
            train.cars.iter().any(|car| car.value(value.attribute()) == Some(value))
        })
    };
    for &color in Color::ALL {
        if present(AttrValue::Color(color)) {
            vocab.push(AttrValue::Color(color));
        }
    }
    for &len in CarLength::ALL {
        if present(AttrValue::Len(len)) {
            vocab.push(AttrValue::Len(len));
        }
    }
    for &wall in WallType::ALL {
        if present(AttrValue::Wall(wall)) {
            vocab.push(AttrValue::Wall(wall));
        }
    }
    let max_pos = trains
        .iter()
        .flat_map(|(train, _)| train.cars.iter().map(|c| c.position))
        .max()
        .unwrap_or(0);
    for n in 1..=max_pos {
        if present(AttrValue::Num(n)) {
            vocab.push(AttrValue::Num(n));
        }
    }
    vocab
}

fn rule_score(rule: &Rule, trains: &[(TrainModel, bool)]) -> f64 {
    let correct = trains
        .iter()
        .filter(|(train, is_east)| eval_rule(rule, train) == *is_east)
        .count();
    correct as f64 / trains.len() as f64
}

/// Signed vocabulary entry: positive literal template or universal negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SignedItem {
    Positive(AttrValue),
    Negated(AttrValue),
}

/// Restricted-growth strings of length `n`: every canonical assignment of
/// positions to variables (first occurrence order).
fn partition_patterns(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max_used: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=max_used + 1 {
            prefix.push(v);
            extend(prefix, max_used.max(v), n, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut prefix = vec![0];
    extend(&mut prefix, 0, n, &mut out);
    out
}

fn combinations(pool: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    if k > pool {
        return out;
    }
    loop {
        out.push(combo.clone());
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] != i + pool - k {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Layered ascending-complexity rule search with a local evaluator.
///
/// Layers are searched in order of rule complexity 1, 2, ... up to
/// `max_literals`; the first rule scoring 1.0 is returned alone, so the
/// simplest perfect rule wins. Otherwise the `top_k` best candidates are
/// ranked by (score desc, complexity asc, enumeration order).
pub fn induce_rule(task: &SlrTask, max_literals: usize, top_k: usize) -> Result<Induction, SlrError> {
    let trains = load_trains(task)?;
    let single_class =
        trains.iter().all(|(_, e)| *e) || trains.iter().all(|(_, e)| !*e);
    let vocab = literal_vocabulary(&trains);

    let mut signed: Vec<SignedItem> = Vec::with_capacity(vocab.len() * 2);
    signed.extend(vocab.iter().map(|&v| SignedItem::Positive(v)));
    signed.extend(vocab.iter().map(|&v| SignedItem::Negated(v)));

    // ranked leaderboard: (score desc, complexity asc, enumeration order asc)
    let mut leaderboard: Vec<(f64, usize, usize, Rule)> = Vec::new();
    let mut enumeration_index = 0usize;

    for complexity in 1..=max_literals {
        for combo in combinations(signed.len(), complexity) {
            let items: Vec<SignedItem> = combo.iter().map(|&i| signed[i]).collect();
            let positive_positions: Vec<usize> = items
                .iter()
                .enumerate()
                .filter_map(|(i, item)| matches!(item, SignedItem::Positive(_)).then_some(i))
                .collect();
            for pattern in partition_patterns(positive_positions.len()) {
                // same attribute twice on the same variable is unsatisfiable
                // for these functional attributes
                let mut conflict = false;
                for (a, &pa) in positive_positions.iter().enumerate() {
                    for (b, &pb) in positive_positions.iter().enumerate().skip(a + 1) {
                        if pattern[a] == pattern[b] {
                            let (SignedItem::Positive(va), SignedItem::Positive(vb)) =
                                (items[pa], items[pb])
                            else {
                                unreachable!()
                            };
                            if va.attribute() == vb.attribute() {
                                conflict = true;
                            }
                        }
                    }
                }
                if conflict {
                    continue;
                }
                let mut positive_idx = 0usize;
                let literals: Vec<Literal> = items
                    .iter()
                    .map(|item| match item {
                        SignedItem::Positive(value) => {
                            let var = pattern[positive_idx];
                            positive_idx += 1;
                            Literal::Positive { var, value: *value }
                        }
                        SignedItem::Negated(value) => Literal::NegatedExists { value: *value },
                    })
                    .collect();
                let Ok(rule) = Rule::new(literals) else { continue };
                let score = rule_score(&rule, &trains);
                enumeration_index += 1;
                if score == 1.0 && !single_class {
                    return Ok(Induction {
                        candidates: vec![InducedRule { rule, score }],
                        single_class,
                    });
                }
                leaderboard.push((score, rule.complexity(), enumeration_index, rule));
            }
        }
        // keep the leaderboard bounded between layers
        leaderboard.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("scores are finite")
                .then_with(|| a.1.cmp(&b.1))
                .then_with(|| a.2.cmp(&b.2))
        });
        leaderboard.truncate(top_k.max(1));
    }

    Ok(Induction {
        candidates: leaderboard
            .into_iter()
            .map(|(score, _, _, rule)| InducedRule { rule, score })
            .collect(),
        single_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn train(cars: &[(u32, Color, CarLength, WallType)]) -> TrainModel {
        TrainModel {
            cars: cars
                .iter()
                .map(|&(position, color, len, wall)| CarRecord {
                    position,
                    color: Some(color),
                    len: Some(len),
                    wall: Some(wall),
                })
                .collect(),
        }
    }

    fn slr_task(trains: &[(&TrainModel, Label)]) -> SlrTask {
        SlrTask {
            task_id: "t".into(),
            examples: trains
                .iter()
                .enumerate()
                .map(|(i, (train, label))| (render_train_facts(train, &format!("t{i}")), *label))
                .collect(),
        }
    }

    fn red_rule() -> Rule {
        Rule::new(vec![Literal::Positive { var: 0, value: AttrValue::Color(Color::Red) }]).unwrap()
    }

    #[test]
    fn eval_existential_semantics() {
        let has_red = train(&[
            (1, Color::Red, CarLength::Short, WallType::Full),
            (2, Color::Blue, CarLength::Long, WallType::Railing),
        ]);
        let no_red = train(&[(1, Color::Blue, CarLength::Short, WallType::Full)]);
        assert!(eval_rule(&red_rule(), &has_red));
        assert!(!eval_rule(&red_rule(), &no_red));
    }

    #[test]
    fn conjunction_binds_one_car() {
        let rule = Rule::new(vec![
            Literal::Positive { var: 0, value: AttrValue::Color(Color::Red) },
            Literal::Positive { var: 0, value: AttrValue::Len(CarLength::Long) },
        ])
        .unwrap();
        // red-short and blue-long cars: no single car is red and long
        let split = train(&[
            (1, Color::Red, CarLength::Short, WallType::Full),
            (2, Color::Blue, CarLength::Long, WallType::Full),
        ]);
        assert!(!eval_rule(&rule, &split));
        let joined = train(&[(1, Color::Red, CarLength::Long, WallType::Full)]);
        assert!(eval_rule(&rule, &joined));
    }

    #[test]
    fn distinct_cars_for_distinct_vars() {
        let rule = Rule::new(vec![
            Literal::Positive { var: 0, value: AttrValue::Color(Color::Red) },
            Literal::Positive { var: 1, value: AttrValue::Color(Color::Red) },
        ])
        .unwrap();
        let one_red = train(&[(1, Color::Red, CarLength::Short, WallType::Full)]);
        let two_red = train(&[
            (1, Color::Red, CarLength::Short, WallType::Full),
            (2, Color::Red, CarLength::Long, WallType::Railing),
        ]);
        assert!(!eval_rule(&rule, &one_red));
        assert!(eval_rule(&rule, &two_red));
    }

    #[test]
    fn negation_as_failure_is_universal() {
        let rule =
            Rule::new(vec![Literal::NegatedExists { value: AttrValue::Color(Color::Red) }]).unwrap();
        let no_red = train(&[(1, Color::Blue, CarLength::Short, WallType::Full)]);
        let has_red = train(&[
            (1, Color::Blue, CarLength::Short, WallType::Full),
            (2, Color::Red, CarLength::Long, WallType::Full),
        ]);
        assert!(eval_rule(&rule, &no_red));
        assert!(!eval_rule(&rule, &has_red));
    }

    #[test]
    fn render_canonical_forms() {
        assert_eq!(
            render_rule(&red_rule()),
            "eastbound(T) :- has_car(T,C1), car_color(C1,red)."
        );
        let negated =
            Rule::new(vec![Literal::NegatedExists { value: AttrValue::Color(Color::Red) }]).unwrap();
        assert_eq!(
            render_rule(&negated),
            "eastbound(T) :- \\+ (has_car(T,C1), car_color(C1,red))."
        );
        let two_var = Rule::new(vec![
            Literal::Positive { var: 0, value: AttrValue::Color(Color::Red) },
            Literal::Positive { var: 1, value: AttrValue::Num(2) },
        ])
        .unwrap();
        assert_eq!(
            render_rule(&two_var),
            "eastbound(T) :- has_car(T,C1), has_car(T,C2), car_color(C1,red), car_num(C2,2)."
        );
    }

    #[test]
    fn candidate_count_table() {
        assert_eq!(count_rule_candidates(5), 30);
        assert_eq!(count_rule_candidates(11), 561);
        assert_eq!(count_rule_candidates(19), 5_035);
        assert_eq!(count_rule_candidates(33), 46_937);
        assert_eq!(count_rule_candidates(50), 251_175);
        assert_eq!(count_rule_candidates(1), 1);
    }

    #[test]
    fn candidate_count_matches_enumeration() {
        for l in 1usize..=12 {
            let explicit: usize =
                (1..=4).map(|k| combinations(l, k).len()).sum();
            assert_eq!(count_rule_candidates(l as u64), explicit as u64, "L = {l}");
        }
    }

    #[test]
    fn induce_single_literal_early_exit() {
        let east1 = train(&[(1, Color::Red, CarLength::Short, WallType::Full)]);
        let east2 = train(&[
            (1, Color::Blue, CarLength::Long, WallType::Full),
            (2, Color::Red, CarLength::Short, WallType::Railing),
        ]);
        let west1 = train(&[(1, Color::Blue, CarLength::Short, WallType::Full)]);
        let west2 = train(&[(1, Color::Green, CarLength::Long, WallType::Railing)]);
        let task = slr_task(&[
            (&east1, Label::Eastbound),
            (&east2, Label::Eastbound),
            (&west1, Label::Westbound),
            (&west2, Label::Westbound),
        ]);
        let induction = induce_rule(&task, 4, 3).unwrap();
        assert!(!induction.single_class);
        assert_eq!(induction.candidates.len(), 1);
        let best = &induction.candidates[0];
        assert_eq!(best.score, 1.0);
        assert_eq!(best.rule.complexity(), 1);
        assert_eq!(render_rule(&best.rule), "eastbound(T) :- has_car(T,C1), car_color(C1,red).");
    }

    #[test]
    fn induce_needs_two_literals() {
        // every train shares the same car count, positions, wall layout, and
        // color/length multisets; only the red+long conjunction on one car
        // separates east from west
        let east = train(&[
            (1, Color::Red, CarLength::Long, WallType::Full),
            (2, Color::Blue, CarLength::Short, WallType::Railing),
        ]);
        let west1 = train(&[
            (1, Color::Red, CarLength::Short, WallType::Full),
            (2, Color::Blue, CarLength::Long, WallType::Railing),
        ]);
        let west2 = train(&[
            (1, Color::Blue, CarLength::Long, WallType::Full),
            (2, Color::Red, CarLength::Short, WallType::Railing),
        ]);
        let task = slr_task(&[
            (&east, Label::Eastbound),
            (&west1, Label::Westbound),
            (&west2, Label::Westbound),
        ]);
        let induction = induce_rule(&task, 4, 3).unwrap();
        let best = &induction.candidates[0];
        assert_eq!(best.score, 1.0, "rule: {}", render_rule(&best.rule));
        assert_eq!(best.rule.complexity(), 2);

        // exhaustive check: no complexity-1 rule separates the task
        let trains = load_trains(&task).unwrap();
        for value in literal_vocabulary(&trains) {
            for rule in [
                Rule::new(vec![Literal::Positive { var: 0, value }]).unwrap(),
                Rule::new(vec![Literal::NegatedExists { value }]).unwrap(),
            ] {
                let correct = trains
                    .iter()
                    .filter(|(t, e)| eval_rule(&rule, t) == *e)
                    .count();
                assert!(correct < trains.len(), "complexity-1 rule {} separates", render_rule(&rule));
            }
        }
    }

    #[test]
    fn unsatisfiable_labels_stay_below_ceiling() {
        let t = train(&[(1, Color::Red, CarLength::Short, WallType::Full)]);
        let task = slr_task(&[(&t, Label::Eastbound), (&t, Label::Westbound)]);
        let induction = induce_rule(&task, 3, 5).unwrap();
        // identical trains with opposite labels: every rule scores 0.5
        for candidate in &induction.candidates {
            assert_eq!(candidate.score, 0.5);
        }
    }

    #[test]
    fn single_class_flagged() {
        let t = train(&[(1, Color::Red, CarLength::Short, WallType::Full)]);
        let task = slr_task(&[(&t, Label::Eastbound), (&t, Label::Eastbound)]);
        let induction = induce_rule(&task, 2, 2).unwrap();
        assert!(induction.single_class);
        assert!(!induction.candidates.is_empty());
        assert_eq!(induction.candidates[0].score, 1.0);
    }

    #[test]
    fn induction_is_deterministic() {
        let east = train(&[(1, Color::Red, CarLength::Long, WallType::Full)]);
        let west = train(&[(1, Color::Blue, CarLength::Short, WallType::Railing)]);
        let task = slr_task(&[(&east, Label::Eastbound), (&west, Label::Westbound)]);
        let a = induce_rule(&task, 3, 5).unwrap();
        let b = induce_rule(&task, 3, 5).unwrap();
        assert_eq!(a, b);
        let rendered: Vec<String> =
            a.candidates.iter().map(|c| render_rule(&c.rule)).collect();
        let again: Vec<String> =
            b.candidates.iter().map(|c| render_rule(&c.rule)).collect();
        assert_eq!(rendered, again);
    }
}
