//! Beam-search strategies: the two-phase safe/unrestricted beam and the
//! adaptive-width beam with a last-op diversity constraint.

use std::collections::BTreeMap;

use crate::dsl::Task;

use super::search::{Score, SearchCtx, State};
use super::{degenerate_result, finish, SafetyMode, SolveResult, StrategyConfig, StrategyId};

struct BeamParams {
    width: usize,
    safe_only: bool,
    adaptive_max_width: Option<usize>,
    diversity: bool,
}

/// One beam run from the initial state; returns the best state seen.
fn run_beam(ctx: &mut SearchCtx<'_>, cfg: &StrategyConfig, params: &BeamParams) -> (State, Score) {
    let n = ctx.n_examples();
    let initial = State::initial(ctx.task);
    let mut best_score = ctx.score(&initial);
    let mut best = initial.clone();
    let mut beam = vec![(initial, best_score)];
    let mut width = params.width;

    for _depth in 0..ctx.task.max_programs {
        // Children keyed by resulting strings; only the best-scoring (then
        // lexicographically smallest) cascade per distinct outcome survives.
        let mut children: BTreeMap<Vec<String>, (State, Score)> = BTreeMap::new();
        for (state, _) in &beam {
            let candidates = ctx.candidates(state);
            for op in candidates.ops().iter().take(cfg.max_candidates_per_step) {
                if params.safe_only && !ctx.is_safe(op, state) {
                    continue;
                }
                if state.op_is_inert(op) {
                    continue;
                }
                let child = state.apply(op);
                let score = ctx.score(&child);
                match children.get_mut(&child.currents) {
                    Some(slot) => {
                        if score > slot.1 || (score == slot.1 && child.ops < slot.0.ops) {
                            *slot = (child, score);
                        }
                    }
                    None => {
                        children.insert(child.currents.clone(), (child, score));
                    }
                }
            }
        }
        if children.is_empty() {
            break;
        }
        let mut ranked: Vec<(State, Score)> = children.into_values().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.ops.cmp(&b.0.ops)));
        if params.diversity {
            // No two beam entries may share the same last op.
            let mut seen_last = Vec::new();
            ranked.retain(|(state, _)| {
                let last = state.ops.last().cloned();
                if seen_last.contains(&last) {
                    false
                } else {
                    seen_last.push(last);
                    true
                }
            });
        }
        ranked.truncate(width);

        let depth_best = ranked[0].1;
        if depth_best > best_score {
            best_score = depth_best;
            best = ranked[0].0.clone();
        } else if let Some(max_width) = params.adaptive_max_width {
            width = (width * 2).min(max_width);
        }
        if best_score.is_perfect(n) {
            break;
        }
        beam = ranked;
    }
    (best, best_score)
}

/// Two-phase beam search. Phase 1 discards candidates whose pattern occurs
/// in an already-solved example's current string; if it ends imperfect,
/// phase 2 reruns without the filter and the better-scoring result wins.
pub fn solve_two_phase_beam(task: &Task, cfg: &StrategyConfig) -> SolveResult {
    if let Some(result) = degenerate_result(task, StrategyId::TwoPhaseBeam) {
        return result;
    }
    let mut ctx = SearchCtx::new(task);
    let base = BeamParams {
        width: cfg.beam_width,
        safe_only: true,
        adaptive_max_width: None,
        diversity: false,
    };
    let (state, score) = match cfg.safety_mode {
        SafetyMode::Strict => run_beam(&mut ctx, cfg, &base),
        SafetyMode::Off => run_beam(&mut ctx, cfg, &BeamParams { safe_only: false, ..base }),
        SafetyMode::TwoPhase => {
            let (safe_state, safe_score) = run_beam(&mut ctx, cfg, &base);
            if safe_score.is_perfect(ctx.n_examples()) {
                (safe_state, safe_score)
            } else {
                let (free_state, free_score) =
                    run_beam(&mut ctx, cfg, &BeamParams { safe_only: false, ..base });
                if free_score > safe_score {
                    (free_state, free_score)
                } else {
                    (safe_state, safe_score)
                }
            }
        }
    };
    let _ = score;
    finish(task, &state, StrategyId::TwoPhaseBeam, ctx.evaluated)
}

/// Beam search whose width doubles (up to 4x the configured width) when the
/// best score stagnates for a depth, with no two beam entries sharing the
/// same last op. Searches unrestricted except in strict safety mode.
pub fn solve_adaptive_beam(task: &Task, cfg: &StrategyConfig) -> SolveResult {
    if let Some(result) = degenerate_result(task, StrategyId::AdaptiveBeam) {
        return result;
    }
    let mut ctx = SearchCtx::new(task);
    let params = BeamParams {
        width: cfg.beam_width,
        safe_only: cfg.safety_mode == SafetyMode::Strict,
        adaptive_max_width: Some(cfg.beam_width * 4),
        diversity: true,
    };
    let (state, _) = run_beam(&mut ctx, cfg, &params);
    finish(task, &state, StrategyId::AdaptiveBeam, ctx.evaluated)
}
