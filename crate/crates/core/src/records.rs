//! Canonical JSONL record types shared by the file formats and the
//! external-process protocols, plus line-oriented read/write helpers.

use std::fmt;
use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::dsl::{Cascade, DslError, Example, Task, TaskMeta};

/// One task line: `{"task_id":..., "examples":[["in","out"],...],
/// "max_programs":N, "meta":{...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskFileRecord {
    pub task_id: String,
    pub examples: Vec<(String, String)>,
    pub max_programs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<TaskMeta>,
}

impl TaskFileRecord {
    pub fn from_task(task: &Task) -> TaskFileRecord {
        TaskFileRecord {
            task_id: task.task_id.clone(),
            examples: task
                .examples
                .iter()
                .map(|ex| (ex.input.clone(), ex.output.clone()))
                .collect(),
            max_programs: task.max_programs,
            meta: task.meta.clone().filter(|m| !m.is_empty()),
        }
    }

    /// Builds the in-memory task, deriving the alphabet from the examples.
    /// `wrap_boundaries` marks every string as `#s#` at ingestion.
    pub fn into_task(self, wrap_boundaries: bool) -> Result<Task, DslError> {
        let wrap = |s: String| if wrap_boundaries { format!("#{s}#") } else { s };
        let examples = self
            .examples
            .into_iter()
            .map(|(input, output)| Example::new(wrap(input), wrap(output)))
            .collect();
        Task::with_derived_alphabet(self.task_id, examples, self.max_programs, self.meta)
    }
}

/// Exact micro-unit currency amount, serialized as a decimal number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Money {
    micro: u64,
}

impl Money {
    pub fn from_micro(micro: u64) -> Money {
        Money { micro }
    }

    /// Parses a currency amount like `0.039` into micro units.
    pub fn from_decimal(amount: f64) -> Money {
        assert!(amount >= 0.0 && amount.is_finite(), "currency amounts are nonnegative");
        Money { micro: (amount * 1_000_000.0).round() as u64 }
    }

    pub fn micro(&self) -> u64 {
        self.micro
    }

    pub fn as_decimal(&self) -> f64 {
        self.micro as f64 / 1_000_000.0
    }

    pub fn saturating_add(self, other: Money) -> Money {
        Money { micro: self.micro.saturating_add(other.micro) }
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.micro / 1_000_000;
        let frac = self.micro % 1_000_000;
        if frac == 0 {
            return write!(f, "{whole}.00");
        }
        let digits = format!("{frac:06}");
        write!(f, "{whole}.{}", digits.trim_end_matches('0'))
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_decimal())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Money::from_decimal(f64::deserialize(deserializer)?))
    }
}

/// Token tallies for one task or one aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenCounts {
    pub input: u64,
    pub output: u64,
}

impl TokenCounts {
    pub fn add(&mut self, other: TokenCounts) {
        self.input += other.input;
        self.output += other.output;
    }

    pub fn is_zero(&self) -> bool {
        self.input == 0 && self.output == 0
    }
}

/// One result line of `solve`-style runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFileRecord {
    pub task_id: String,
    pub success: bool,
    pub reward: f64,
    pub program: Cascade,
    pub complexity: usize,
    pub strategy_id: String,
    pub tokens: TokenCounts,
    pub cost: Money,
}

/// One result line of `slr` runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlrResultRecord {
    pub task_id: String,
    pub success: bool,
    pub score: f64,
    pub rule: String,
    pub complexity: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<RankedRule>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub single_class: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRule {
    pub rule: String,
    pub score: f64,
    pub complexity: usize,
}

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads one record per line, reporting the 1-based line number on failure.
pub fn read_jsonl<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>, JsonlError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|source| JsonlError::Parse { line: idx + 1, source })?;
        out.push(record);
    }
    Ok(out)
}

/// Writes one record per line.
pub fn write_jsonl<T: Serialize>(
    mut writer: impl Write,
    records: impl IntoIterator<Item = T>,
) -> std::io::Result<()> {
    for record in records {
        let line = serde_json::to_string(&record).expect("records serialize infallibly");
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::ReplaceOp;

    #[test]
    fn task_record_round_trip() {
        let json = r#"{"task_id":"t1","examples":[["ab","x"],["b","b"]],"max_programs":5,"meta":{"ground_truth":[["ab","x"]],"cascade_length":1}}"#;
        let record: TaskFileRecord = serde_json::from_str(json).unwrap();
        let task = record.clone().into_task(false).unwrap();
        assert_eq!(task.examples.len(), 2);
        assert_eq!(task.ground_truth().unwrap().ops().len(), 1);
        let back = TaskFileRecord::from_task(&task);
        assert_eq!(back, record);
    }

    #[test]
    fn wrapping_at_ingestion() {
        let record = TaskFileRecord {
            task_id: "t".into(),
            examples: vec![("ab".into(), "b".into())],
            max_programs: 3,
            meta: None,
        };
        let task = record.into_task(true).unwrap();
        assert_eq!(task.examples[0].input, "#ab#");
        assert_eq!(task.examples[0].output, "#b#");
    }

    #[test]
    fn money_exactness() {
        assert_eq!(Money::from_decimal(0.039).micro(), 39_000);
        assert_eq!(Money::from_decimal(0.190).micro(), 190_000);
        assert_eq!(Money::from_decimal(2.0).micro(), 2_000_000);
        assert_eq!(Money::from_micro(229_000).to_string(), "0.229");
        assert_eq!(Money::from_micro(2_000_000).to_string(), "2.00");
        let json = serde_json::to_string(&Money::from_micro(229_000)).unwrap();
        assert_eq!(json, "0.229");
        let back: Money = serde_json::from_str(&json).unwrap();
        assert_eq!(back.micro(), 229_000);
    }

    #[test]
    fn result_record_round_trips_byte_identical() {
        let record = ResultFileRecord {
            task_id: "t-0".into(),
            success: true,
            reward: 1.0,
            program: Cascade::new(vec![ReplaceOp::new("ab", "x").unwrap()]),
            complexity: 1,
            strategy_id: "two_phase_beam".into(),
            tokens: TokenCounts::default(),
            cost: Money::default(),
        };
        let line = serde_json::to_string(&record).unwrap();
        let parsed: ResultFileRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(serde_json::to_string(&parsed).unwrap(), line);
    }

    #[test]
    fn jsonl_reports_line_numbers() {
        let data = "{\"task_id\":\"a\",\"examples\":[[\"x\",\"y\"]],\"max_programs\":1}\nnot json\n";
        let err = read_jsonl::<TaskFileRecord>(data.as_bytes()).unwrap_err();
        match err {
            JsonlError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }
}
