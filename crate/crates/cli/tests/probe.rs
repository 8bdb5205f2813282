//! Development probe for solver coverage on the oracle-equivalence corpus.
//! Run with: cargo test -p synth-cli --test probe -- --nocapture --ignored

use synth_core::dsl::Task;
use synth_core::records::TaskFileRecord;
use synth_core::solvers::{solve, solve_ensemble, StrategyConfig, StrategyId};
use synth_core::taskgen::{generate_task, GenSpec};

/// Brute-force witnesses: up to `limit` perfect cascades of length <= 2.
fn witnesses(task: &Task, limit: usize) -> Vec<String> {
    let inputs: Vec<&str> = task.examples.iter().map(|e| e.input.as_str()).collect();
    let targets: Vec<&str> = task.examples.iter().map(|e| e.output.as_str()).collect();
    let mut grams: Vec<String> = vec![String::new()];
    let mut layer: Vec<String> = vec![String::new()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for p in &layer {
            for &c in &task.alphabet {
                let mut s = p.clone();
                s.push(c);
                next.push(s);
            }
        }
        grams.extend(next.iter().cloned());
        layer = next;
    }
    let patterns: Vec<&String> = grams.iter().filter(|g| !g.is_empty()).collect();
    let apply = |state: &[String], p: &str, r: &str| -> Vec<String> {
        state.iter().map(|s| s.replace(p, r)).collect()
    };
    let solved = |state: &[String]| state.iter().zip(&targets).all(|(s, t)| s == t);
    let initial: Vec<String> = inputs.iter().map(|s| s.to_string()).collect();
    let mut found = Vec::new();
    for p1 in &patterns {
        for r1 in &grams {
            if *p1 == r1 {
                continue;
            }
            let mid = apply(&initial, p1, r1);
            if solved(&mid) {
                found.push(format!("[{p1:?}->{r1:?}]"));
            }
            if mid == initial {
                continue;
            }
            for p2 in &patterns {
                for r2 in &grams {
                    if *p2 == r2 {
                        continue;
                    }
                    let end = apply(&mid, p2, r2);
                    if end != mid && solved(&end) {
                        found.push(format!("[{p1:?}->{r1:?}, {p2:?}->{r2:?}]"));
                        if found.len() >= limit {
                            return found;
                        }
                    }
                }
            }
            if found.len() >= limit {
                return found;
            }
        }
    }
    found
}

#[test]
#[ignore]
fn dump_oracle_equivalence_failures() {
    let spec = GenSpec {
        alphabet: "abc".chars().collect(),
        cascade_length_range: (1, 1),
        n_examples: 5,
        string_length_range: (2, 6),
        seed: 0x5EED_0003,
        wrap_boundaries: false,
    };
    let cfg = StrategyConfig::default();
    let mut failures = 0;
    for index in 0..400u64 {
        let mut task = generate_task(&spec, index).unwrap();
        task.max_programs = 2;
        let result = solve_ensemble(&task, &StrategyId::ALL, &cfg);
        if result.reward < 1.0 {
            failures += 1;
            println!(
                "== index {index} reward {:.2} gt {:?}",
                result.reward,
                serde_json::to_string(task.ground_truth().unwrap()).unwrap()
            );
            println!("   record: {}", serde_json::to_string(&TaskFileRecord::from_task(&task)).unwrap());
            for id in StrategyId::ALL {
                let r = solve(&task, id, &cfg);
                println!("   {:<20} reward {:.2} program {}", id.to_string(), r.reward,
                    serde_json::to_string(&r.program).unwrap());
            }
            println!("   witnesses: {:?}", witnesses(&task, 12));
            if failures >= 8 {
                break;
            }
        }
    }
    println!("total shown: {failures}");
}
