//! Permutation-based strategies: forced-op permutation search and
//! multi-start greedy construction with permutation reordering.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsl::{ReplaceOp, Task};

use super::search::{permutations_capped, Score, SearchCtx, State};
use super::{
    degenerate_result, finish, SafetyMode, SolveResult, StrategyConfig, StrategyId,
    PERMUTATION_CAP,
};

fn factorial_leq(n: usize, cap: usize) -> bool {
    let mut f = 1usize;
    for k in 2..=n {
        f = match f.checked_mul(k) {
            Some(v) if v <= cap => v,
            _ => return false,
        };
    }
    f <= cap
}

/// Applies `ops` in the given index order from the initial state; in strict
/// mode, returns None when some step would alter an already-solved example.
fn apply_order(
    ctx: &mut SearchCtx<'_>,
    ops: &[ReplaceOp],
    order: &[usize],
    max_len: usize,
    strict: bool,
) -> Option<(State, Score)> {
    let mut state = State::initial(ctx.task);
    for &idx in order.iter().take(max_len) {
        let op = &ops[idx];
        if strict && !ctx.is_safe(op, &state) {
            return None;
        }
        state = state.apply(op);
    }
    let score = ctx.score(&state);
    Some((state, score))
}

/// Greedy single-op extension used after a permutation prefix; optionally
/// finishes with one ordered pair probe for residual pairs.
fn greedy_extend(
    ctx: &mut SearchCtx<'_>,
    mut state: State,
    mut score: Score,
    cfg: &StrategyConfig,
    strict: bool,
    try_pairs: bool,
) -> (State, Score) {
    let n = ctx.n_examples();
    loop {
        if state.ops.len() >= ctx.task.max_programs || score.is_perfect(n) {
            break;
        }
        let candidates = ctx.candidates(&state);
        let mut best: Option<(State, Score)> = None;
        for op in candidates.ops().iter().take(cfg.max_candidates_per_step) {
            if strict && !ctx.is_safe(op, &state) {
                continue;
            }
            if state.op_is_inert(op) {
                continue;
            }
            let child = state.apply(op);
            let child_score = ctx.score(&child);
            if child_score > score && best.as_ref().map_or(true, |(_, b)| child_score > *b) {
                best = Some((child, child_score));
            }
        }
        match best {
            Some((next, next_score)) => {
                state = next;
                score = next_score;
            }
            None => break,
        }
    }

    // explicit 2-op sequences for residual pairs
    if try_pairs && !score.is_perfect(n) && ctx.task.max_programs - state.ops.len() >= 2 {
        let first_ops: Vec<ReplaceOp> =
            ctx.candidates(&state).ops().iter().take(16).cloned().collect();
        let mut best: Option<(State, Score)> = None;
        for op1 in &first_ops {
            if strict && !ctx.is_safe(op1, &state) {
                continue;
            }
            if state.op_is_inert(op1) {
                continue;
            }
            let mid = state.apply(op1);
            let second_ops: Vec<ReplaceOp> =
                ctx.candidates(&mid).ops().iter().take(16).cloned().collect();
            for op2 in &second_ops {
                if strict && !ctx.is_safe(op2, &mid) {
                    continue;
                }
                if mid.op_is_inert(op2) {
                    continue;
                }
                let child = mid.apply(op2);
                let child_score = ctx.score(&child);
                if child_score > score && best.as_ref().map_or(true, |(_, b)| child_score > *b) {
                    best = Some((child, child_score));
                }
            }
        }
        if let Some((next, next_score)) = best {
            state = next;
            score = next_score;
        }
    }
    (state, score)
}

/// Separates forced from optional operations: an op is forced when its
/// minimal (uncontexted) form is proposed by every mismatched pair.
/// Permutations of the forced ops are enumerated (capped), and the best
/// ordering is extended greedily with optional candidates and explicit 2-op
/// sequences.
pub fn solve_unique_op_permutations(task: &Task, cfg: &StrategyConfig) -> SolveResult {
    if let Some(result) = degenerate_result(task, StrategyId::UniquePerm) {
        return result;
    }
    let strict = cfg.safety_mode == SafetyMode::Strict;
    let mut ctx = SearchCtx::new(task);
    let initial = State::initial(task);
    let n_mismatched = initial
        .currents
        .iter()
        .zip(&ctx.targets)
        .filter(|(cur, tgt)| cur.as_str() != **tgt)
        .count();

    let minimal_pairs: Vec<(String, String)> = initial
        .currents
        .iter()
        .zip(&ctx.targets)
        .filter(|(cur, tgt)| cur.as_str() != **tgt)
        .map(|(cur, tgt)| (cur.clone(), (*tgt).to_owned()))
        .collect();
    let minimal = crate::diff::extract_candidates(&minimal_pairs, 0);
    let forced: Vec<ReplaceOp> = minimal
        .ops()
        .iter()
        .filter(|op| minimal.origin_count(op) == n_mismatched)
        .cloned()
        .take(task.max_programs)
        .collect();

    let initial_score = ctx.score(&initial);
    let mut best_state = initial.clone();
    let mut best_score = initial_score;

    let orders: Vec<Vec<usize>> = if factorial_leq(forced.len(), PERMUTATION_CAP) {
        permutations_capped(forced.len(), PERMUTATION_CAP)
    } else {
        // cap exceeded: identity permutation only
        vec![(0..forced.len()).collect()]
    };
    for order in &orders {
        if let Some((state, score)) = apply_order(&mut ctx, &forced, order, task.max_programs, strict)
        {
            if score > best_score {
                best_score = score;
                best_state = state;
            }
        }
    }

    let (state, _) = greedy_extend(&mut ctx, best_state, best_score, cfg, strict, true);
    finish(task, &state, StrategyId::UniquePerm, ctx.evaluated)
}

/// Multi-start greedy with seeded-shuffled tie-breaking, followed by a
/// permutation search over each constructed op multiset; construction and
/// ordering are separated, and the global best wins.
pub fn solve_multistart_reorder(task: &Task, cfg: &StrategyConfig) -> SolveResult {
    if let Some(result) = degenerate_result(task, StrategyId::MultistartReorder) {
        return result;
    }
    let strict = cfg.safety_mode == SafetyMode::Strict;
    let mut ctx = SearchCtx::new(task);
    let n = ctx.n_examples();
    let initial = State::initial(task);
    let mut best_score = ctx.score(&initial);
    let mut best_state = initial;

    for restart in 0..cfg.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(restart as u64);

        // greedy construction with randomized tie-breaking
        let mut state = State::initial(task);
        let mut score = Score::of(&state, &ctx.targets);
        while state.ops.len() < task.max_programs && !score.is_perfect(n) {
            let candidates = ctx.candidates(&state);
            let mut ties: Vec<(State, Score)> = Vec::new();
            for op in candidates.ops().iter().take(cfg.max_candidates_per_step) {
                if strict && !ctx.is_safe(op, &state) {
                    continue;
                }
                if state.op_is_inert(op) {
                    continue;
                }
                let child = state.apply(op);
                let child_score = ctx.score(&child);
                if child_score <= score {
                    continue;
                }
                match ties.first() {
                    Some((_, top)) if child_score > *top => {
                        ties.clear();
                        ties.push((child, child_score));
                    }
                    Some((_, top)) if child_score == *top => ties.push((child, child_score)),
                    None => ties.push((child, child_score)),
                    _ => {}
                }
            }
            if ties.is_empty() {
                break;
            }
            let pick = rng.gen_range(0..ties.len());
            let (next, next_score) = ties.swap_remove(pick);
            state = next;
            score = next_score;
        }
        if score > best_score {
            best_score = score;
            best_state = state.clone();
        }

        // reorder the constructed multiset; enumeration is capped, so long
        // cascades only see a lexicographic prefix of their orderings
        let ops = state.ops.clone();
        if ops.len() >= 2 {
            for order in &permutations_capped(ops.len(), PERMUTATION_CAP) {
                if let Some((candidate, cand_score)) =
                    apply_order(&mut ctx, &ops, order, task.max_programs, strict)
                {
                    if cand_score > best_score {
                        best_score = cand_score;
                        best_state = candidate;
                    }
                }
            }
        }
    }
    finish(task, &best_state, StrategyId::MultistartReorder, ctx.evaluated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{Cascade, Example};
    use crate::metrics;

    fn op(p: &str, r: &str) -> ReplaceOp {
        ReplaceOp::new(p, r).unwrap()
    }

    /// Counterbleeding construction: both ops are proposed by every example
    /// pair's minimal regions (each input keeps matched separators around
    /// the two substitution sites), and only the reversed-lexicographic
    /// order [("b"->"c"), ("a"->"b")] is perfect: applying ("a"->"b") first
    /// feeds the pre-existing "b" slots into ("b"->"c").
    fn order_sensitive_task() -> Task {
        let gt = Cascade::new(vec![op("b", "c"), op("a", "b")]);
        let inputs = ["a1b2", "a3b4", "a5b6"];
        let examples: Vec<Example> =
            inputs.iter().map(|i| Example::new(*i, gt.apply(i))).collect();
        Task::with_derived_alphabet("t", examples, 3, None).unwrap()
    }

    #[test]
    fn order_sensitive_task_is_order_sensitive() {
        let task = order_sensitive_task();
        let right = Cascade::new(vec![op("b", "c"), op("a", "b")]);
        let wrong = Cascade::new(vec![op("a", "b"), op("b", "c")]);
        assert_eq!(metrics::reward(&right, &task), 1.0);
        assert!(metrics::reward(&wrong, &task) < 1.0);
    }

    #[test]
    fn unique_perm_finds_correct_ordering() {
        let task = order_sensitive_task();
        let r = solve_unique_op_permutations(&task, &StrategyConfig::default());
        assert_eq!(r.reward, 1.0, "got {:?}", r.program);
    }

    #[test]
    fn multistart_reorder_finds_correct_ordering() {
        let task = order_sensitive_task();
        let r = solve_multistart_reorder(&task, &StrategyConfig::default());
        assert_eq!(r.reward, 1.0, "got {:?}", r.program);
    }

    #[test]
    fn identity_task_empty_cascade() {
        let task = Task::with_derived_alphabet(
            "t",
            vec![Example::new("ab", "ab")],
            4,
            None,
        )
        .unwrap();
        for solve in [solve_unique_op_permutations, solve_multistart_reorder] {
            let r = solve(&task, &StrategyConfig::default());
            assert!(r.success && r.program.is_empty());
        }
    }

    #[test]
    fn single_restart_is_deterministic() {
        let task = order_sensitive_task();
        let cfg = StrategyConfig { restarts: 1, ..Default::default() };
        assert_eq!(
            solve_multistart_reorder(&task, &cfg),
            solve_multistart_reorder(&task, &cfg)
        );
    }

    #[test]
    fn factorial_cap() {
        assert!(factorial_leq(5, 120));
        assert!(!factorial_leq(6, 120));
        assert!(factorial_leq(0, 120));
    }

    #[test]
    fn budget_respected_with_many_forced_ops() {
        // six distinct single-char edits in every example; 6! > 120 triggers
        // the identity-permutation fallback, and the budget still binds
        let gt = Cascade::new(vec![
            op("a", "z"),
            op("b", "y"),
            op("c", "x"),
            op("d", "w"),
            op("e", "v"),
            op("f", "u"),
        ]);
        let inputs = ["abcdef", "fedcba"];
        let examples: Vec<Example> =
            inputs.iter().map(|i| Example::new(*i, gt.apply(i))).collect();
        let task = Task::with_derived_alphabet("t", examples, 4, None).unwrap();
        let r = solve_unique_op_permutations(&task, &StrategyConfig::default());
        assert!(r.complexity <= 4);
    }
}
