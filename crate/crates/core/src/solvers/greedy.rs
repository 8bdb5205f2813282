//! Greedy strategies: safety-first greedy with two-step lookahead, and
//! greedy construction with multi-pass residual fixing.

use crate::diff::extract_candidates;
use crate::dsl::{ReplaceOp, Task};

use super::search::{Score, SearchCtx, State, EXTRACT_CONTEXT};
use super::{degenerate_result, finish, SafetyMode, SolveResult, StrategyConfig, StrategyId};

/// Per-side cap when enumerating ordered candidate pairs in lookahead.
const PAIR_CAP: usize = 32;

/// Best single extension of `state` under the filter, if any strictly
/// improves on `current`.
fn best_single_step(
    ctx: &mut SearchCtx<'_>,
    state: &State,
    current: Score,
    cap: usize,
    safe_only: bool,
) -> Option<(State, Score)> {
    let candidates = ctx.candidates(state);
    let mut best: Option<(State, Score)> = None;
    for op in candidates.ops().iter().take(cap) {
        if safe_only && !ctx.is_safe(op, state) {
            continue;
        }
        if state.op_is_inert(op) {
            continue;
        }
        let child = state.apply(op);
        let score = ctx.score(&child);
        if score > current && best.as_ref().map_or(true, |(_, b)| score > *b) {
            best = Some((child, score));
        }
    }
    best
}

/// Best ordered pair of extensions; the second step draws candidates
/// re-extracted from the intermediate state, so feeding pairs are reachable.
fn best_pair_step(
    ctx: &mut SearchCtx<'_>,
    state: &State,
    current: Score,
    safe_only: bool,
) -> Option<(State, Score)> {
    let first_ops: Vec<ReplaceOp> =
        ctx.candidates(state).ops().iter().take(PAIR_CAP).cloned().collect();
    let mut best: Option<(State, Score)> = None;
    for op1 in &first_ops {
        if safe_only && !ctx.is_safe(op1, state) {
            continue;
        }
        if state.op_is_inert(op1) {
            continue;
        }
        let mid = state.apply(op1);
        let second_ops: Vec<ReplaceOp> =
            ctx.candidates(&mid).ops().iter().take(PAIR_CAP).cloned().collect();
        for op2 in &second_ops {
            if safe_only && !ctx.is_safe(op2, &mid) {
                continue;
            }
            if mid.op_is_inert(op2) {
                continue;
            }
            let child = mid.apply(op2);
            let score = ctx.score(&child);
            if score > current && best.as_ref().map_or(true, |(_, b)| score > *b) {
                best = Some((child, score));
            }
        }
    }
    best
}

/// Safety-first greedy: appends the best candidate under the hard constraint
/// that no already-correct example is altered; when no single op improves
/// the score, evaluates ordered candidate pairs (2-step lookahead).
pub fn solve_safety_greedy_lookahead(task: &Task, cfg: &StrategyConfig) -> SolveResult {
    if let Some(result) = degenerate_result(task, StrategyId::SafetyGreedy) {
        return result;
    }
    let mut ctx = SearchCtx::new(task);
    let mut state = State::initial(task);
    let mut score = ctx.score(&state);
    let n = ctx.n_examples();

    while state.ops.len() < task.max_programs && !score.is_perfect(n) {
        if let Some((next, next_score)) =
            best_single_step(&mut ctx, &state, score, cfg.max_candidates_per_step, true)
        {
            state = next;
            score = next_score;
            continue;
        }
        if cfg.lookahead >= 2 && task.max_programs - state.ops.len() >= 2 {
            if let Some((next, next_score)) = best_pair_step(&mut ctx, &state, score, true) {
                debug_assert!(next_score.solved >= score.solved);
                state = next;
                score = next_score;
                continue;
            }
        }
        break;
    }
    finish(task, &state, StrategyId::SafetyGreedy, ctx.evaluated)
}

/// Greedy pass maximizing net fixes, then repeated residual passes that
/// re-extract candidates from each remaining mismatched pair until the
/// budget is exhausted or nothing improves.
pub fn solve_greedy_residual(task: &Task, cfg: &StrategyConfig) -> SolveResult {
    if let Some(result) = degenerate_result(task, StrategyId::GreedyResidual) {
        return result;
    }
    let safe_only = cfg.safety_mode == SafetyMode::Strict;
    let mut ctx = SearchCtx::new(task);
    let mut state = State::initial(task);
    let mut score = ctx.score(&state);
    let n = ctx.n_examples();

    // main greedy pass
    while state.ops.len() < task.max_programs && !score.is_perfect(n) {
        match best_single_step(&mut ctx, &state, score, cfg.max_candidates_per_step, safe_only) {
            Some((next, next_score)) => {
                debug_assert!(next_score.solved >= score.solved);
                state = next;
                score = next_score;
            }
            None => break,
        }
    }

    // residual passes: focus extraction on one mismatched pair at a time
    loop {
        if state.ops.len() >= task.max_programs || score.is_perfect(n) {
            break;
        }
        let mut improved = false;
        for i in 0..n {
            if state.ops.len() >= task.max_programs {
                break;
            }
            if state.currents[i] == ctx.targets[i] {
                continue;
            }
            let pair = vec![(state.currents[i].clone(), ctx.targets[i].to_owned())];
            let candidates = extract_candidates(&pair, EXTRACT_CONTEXT);
            let mut best: Option<(State, Score)> = None;
            for op in candidates.ops().iter().take(cfg.max_candidates_per_step) {
                if safe_only && !ctx.is_safe(op, &state) {
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
            if let Some((next, next_score)) = best {
                state = next;
                score = next_score;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    finish(task, &state, StrategyId::GreedyResidual, ctx.evaluated)
}
