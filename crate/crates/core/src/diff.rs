//! Candidate-op extraction from (current, target) string pairs.
//!
//! Alignment is recursive longest-matching-block (the sequence-matcher
//! family, not a minimal edit script): the longest common block splits both
//! strings, recursion handles the flanks, and the leftover unmatched spans
//! become edit regions. Candidates are the minimal rewrites for each region
//! plus context-extended variants, with oversized regions split into chains
//! of ops that fit the DSL length bounds.

use std::collections::{BTreeMap, BTreeSet};

use crate::dsl::{ReplaceOp, MAX_PATTERN_LEN, MAX_REPLACEMENT_LEN};

/// At most this many candidates survive one extraction call.
pub const CANDIDATE_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    Substitute,
    Insert,
    Delete,
}

/// One unmatched span pair between source and target, in char offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditRegion {
    pub src_span: (usize, usize),
    pub dst_span: (usize, usize),
    pub kind: EditKind,
}

impl EditRegion {
    fn new(src_span: (usize, usize), dst_span: (usize, usize)) -> Option<Self> {
        let kind = match (src_span.0 < src_span.1, dst_span.0 < dst_span.1) {
            (true, true) => EditKind::Substitute,
            (false, true) => EditKind::Insert,
            (true, false) => EditKind::Delete,
            (false, false) => return None,
        };
        Some(EditRegion { src_span, dst_span, kind })
    }
}

/// Longest matching block of `a[alo..ahi]` and `b[blo..bhi]`. Ties go to the
/// smallest source index (then target index); with `rightmost` set, to the
/// largest instead. Repeated characters make the longest block ambiguous,
/// and the two tie-breaks expose different edit regions.
fn longest_match(
    a: &[char],
    b: &[char],
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
    rightmost: bool,
) -> (usize, usize, usize) {
    let mut best = (alo, blo, 0usize);
    let mut j2len: BTreeMap<usize, usize> = BTreeMap::new();
    for i in alo..ahi {
        let mut new_j2len: BTreeMap<usize, usize> = BTreeMap::new();
        for j in blo..bhi {
            if b[j] != a[i] {
                continue;
            }
            let k = if j > blo { j2len.get(&(j - 1)).copied().unwrap_or(0) + 1 } else { 1 };
            new_j2len.insert(j, k);
            if k > best.2 || (rightmost && k == best.2) {
                best = (i + 1 - k, j + 1 - k, k);
            }
        }
        j2len = new_j2len;
    }
    best
}

fn align_ranges(
    a: &[char],
    b: &[char],
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
    rightmost: bool,
    out: &mut Vec<EditRegion>,
) {
    let (i, j, size) = longest_match(a, b, alo, ahi, blo, bhi, rightmost);
    if size == 0 {
        if let Some(region) = EditRegion::new((alo, ahi), (blo, bhi)) {
            out.push(region);
        }
        return;
    }
    align_ranges(a, b, alo, i, blo, j, rightmost, out);
    align_ranges(a, b, i + size, ahi, j + size, bhi, rightmost, out);
}

fn align_chars(a: &[char], b: &[char], rightmost: bool) -> Vec<EditRegion> {
    let mut out = Vec::new();
    align_ranges(a, b, 0, a.len(), 0, b.len(), rightmost, &mut out);
    out
}

/// Aligns `a` to `b`, returning the edit regions in source order. Identical
/// strings yield no regions; replaying the regions over `a` reconstructs `b`.
pub fn align(a: &str, b: &str) -> Vec<EditRegion> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    align_chars(&a, &b, false)
}

/// Rebuilds the target from the source and its edit regions.
pub fn replay(a: &str, b: &str, regions: &[EditRegion]) -> String {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut out = String::new();
    let mut cursor = 0usize;
    for region in regions {
        out.extend(&a[cursor..region.src_span.0]);
        out.extend(&b[region.dst_span.0..region.dst_span.1]);
        cursor = region.src_span.1;
    }
    out.extend(&a[cursor..]);
    out
}

/// Deduplicated, deterministically ordered candidate ops: descending count
/// of proposing pairs, then pattern, then replacement.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateSet {
    ops: Vec<ReplaceOp>,
    origin: BTreeMap<ReplaceOp, usize>,
}

impl CandidateSet {
    pub fn ops(&self) -> &[ReplaceOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Number of example pairs that proposed `op`.
    pub fn origin_count(&self, op: &ReplaceOp) -> usize {
        self.origin.get(op).copied().unwrap_or(0)
    }
}

fn valid_op(pattern: &[char], replacement: &[char]) -> Option<ReplaceOp> {
    if pattern.is_empty() || pattern.len() > MAX_PATTERN_LEN || replacement.len() > MAX_REPLACEMENT_LEN {
        return None;
    }
    ReplaceOp::new(pattern.iter().collect::<String>(), replacement.iter().collect::<String>()).ok()
}

/// Greedy length-3 chunks; the final chunk holds the remainder.
fn chunks3(text: &[char]) -> Vec<&[char]> {
    if text.is_empty() {
        return Vec::new();
    }
    text.chunks(MAX_PATTERN_LEN).collect()
}

fn region_candidates(cur: &[char], tgt: &[char], region: &EditRegion, max_context: usize, out: &mut BTreeSet<ReplaceOp>) {
    let (s0, s1) = region.src_span;
    let (d0, d1) = region.dst_span;
    let src_txt = &cur[s0..s1];
    let dst_txt = &tgt[d0..d1];

    // Minimal op and context-extended variants. The matched text flanking a
    // region is identical in source and target, so any prefix/suffix of it
    // can extend the pattern and the replacement independently; asymmetric
    // extensions capture rewrites that consume or duplicate context. Insert
    // regions have an empty source span, so they need at least one matched
    // anchor character; allow that even when max_context is 0.
    let ctx = if region.kind == EditKind::Insert { max_context.max(1) } else { max_context };
    for pre_pat in 0..=ctx.min(s0) {
        for suf_pat in 0..=ctx.min(cur.len() - s1) {
            for pre_rep in 0..=ctx.min(s0) {
                for suf_rep in 0..=ctx.min(cur.len() - s1) {
                    let mut pattern: Vec<char> = cur[s0 - pre_pat..s0].to_vec();
                    pattern.extend(src_txt);
                    pattern.extend(&cur[s1..s1 + suf_pat]);
                    let mut replacement: Vec<char> = cur[s0 - pre_rep..s0].to_vec();
                    replacement.extend(dst_txt);
                    replacement.extend(&cur[s1..s1 + suf_rep]);
                    if let Some(op) = valid_op(&pattern, &replacement) {
                        out.insert(op);
                    }
                }
            }
        }
    }

    // Oversized regions: split into a chain of ops within the length bounds.
    if src_txt.len() > MAX_PATTERN_LEN || dst_txt.len() > MAX_REPLACEMENT_LEN {
        let src_chunks = chunks3(src_txt);
        let dst_chunks = chunks3(dst_txt);
        let n = src_chunks.len().max(dst_chunks.len());
        for i in 0..n {
            let p = src_chunks.get(i).copied().unwrap_or(&[]);
            let r = dst_chunks.get(i).copied().unwrap_or(&[]);
            if let Some(op) = valid_op(p, r) {
                out.insert(op);
            }
        }
    }

    // Long insertions: anchored chain walking through the inserted text.
    if region.kind == EditKind::Insert && dst_txt.len() > MAX_REPLACEMENT_LEN - 1 {
        let mut anchor: Option<char> = if s0 > 0 { Some(cur[s0 - 1]) } else { None };
        let mut idx = 0usize;
        while idx < dst_txt.len() {
            let take = (dst_txt.len() - idx).min(MAX_REPLACEMENT_LEN - 1);
            let piece = &dst_txt[idx..idx + take];
            if let Some(a) = anchor {
                let pattern = vec![a];
                let mut replacement = vec![a];
                replacement.extend(piece);
                if let Some(op) = valid_op(&pattern, &replacement) {
                    out.insert(op);
                }
            }
            anchor = piece.last().copied();
            idx += take;
        }
    }
}

/// Candidates from one alignment's region list: per-region rewrites, merges
/// of adjacent regions across their matched infix, and pairings of deleted
/// text with inserted text (repairs substitutions the block matcher tore
/// apart).
fn alignment_candidates(
    cur: &[char],
    tgt: &[char],
    regions: &[EditRegion],
    max_context: usize,
    out: &mut BTreeSet<ReplaceOp>,
) {
    for region in regions {
        region_candidates(cur, tgt, region, max_context, out);
    }
    for pair in regions.windows(2) {
        let src = &cur[pair[0].src_span.0..pair[1].src_span.1];
        let dst = &tgt[pair[0].dst_span.0..pair[1].dst_span.1];
        if let Some(op) = valid_op(src, dst) {
            out.insert(op);
        }
    }
    for deletion in regions.iter().filter(|r| r.kind == EditKind::Delete) {
        for insertion in regions.iter().filter(|r| r.kind == EditKind::Insert) {
            let src = &cur[deletion.src_span.0..deletion.src_span.1];
            let dst = &tgt[insertion.dst_span.0..insertion.dst_span.1];
            if let Some(op) = valid_op(src, dst) {
                out.insert(op);
            }
        }
    }
}

/// Extracts candidate rewrite ops from (current, target) pairs, with matched
/// context up to `max_context` characters on each side.
pub fn extract_candidates(pairs: &[(String, String)], max_context: usize) -> CandidateSet {
    let mut origin: BTreeMap<ReplaceOp, usize> = BTreeMap::new();
    for (cur, tgt) in pairs {
        if cur == tgt {
            continue;
        }
        let cur_chars: Vec<char> = cur.chars().collect();
        let tgt_chars: Vec<char> = tgt.chars().collect();
        let mut proposed: BTreeSet<ReplaceOp> = BTreeSet::new();
        for rightmost in [false, true] {
            let regions = align_chars(&cur_chars, &tgt_chars, rightmost);
            alignment_candidates(&cur_chars, &tgt_chars, &regions, max_context, &mut proposed);
        }
        for op in proposed {
            *origin.entry(op).or_insert(0) += 1;
        }
    }

    // Drop candidates that change no pair's current string.
    origin.retain(|op, _| pairs.iter().any(|(cur, _)| !op.is_inert_on(cur)));

    let mut ops: Vec<ReplaceOp> = origin.keys().cloned().collect();
    ops.sort_by(|a, b| {
        origin[b]
            .cmp(&origin[a])
            .then_with(|| a.pattern().cmp(b.pattern()))
            .then_with(|| a.replacement().cmp(b.replacement()))
    });
    ops.truncate(CANDIDATE_CAP);
    let retained: BTreeSet<ReplaceOp> = ops.iter().cloned().collect();
    origin.retain(|op, _| retained.contains(op));
    CandidateSet { ops, origin }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn op(p: &str, r: &str) -> ReplaceOp {
        ReplaceOp::new(p, r).unwrap()
    }

    #[test]
    fn align_identical_is_empty() {
        assert!(align("abc", "abc").is_empty());
        assert!(align("", "").is_empty());
    }

    #[test]
    fn align_substitution() {
        let regions = align("cat", "cut");
        assert_eq!(
            regions,
            vec![EditRegion { src_span: (1, 2), dst_span: (1, 2), kind: EditKind::Substitute }]
        );
    }

    #[test]
    fn align_insertion() {
        let regions = align("abc", "abcd");
        assert_eq!(
            regions,
            vec![EditRegion { src_span: (3, 3), dst_span: (3, 4), kind: EditKind::Insert }]
        );
    }

    #[test]
    fn align_deletion() {
        let regions = align("aaaa", "");
        assert_eq!(
            regions,
            vec![EditRegion { src_span: (0, 4), dst_span: (0, 0), kind: EditKind::Delete }]
        );
    }

    #[test]
    fn extract_context_extensions() {
        let pairs = vec![("cat".to_owned(), "cut".to_owned())];
        let set = extract_candidates(&pairs, 1);
        for expected in [op("a", "u"), op("ca", "cu"), op("at", "ut"), op("cat", "cut")] {
            assert!(set.ops().contains(&expected), "missing {expected}");
            assert_eq!(set.origin_count(&expected), 1);
        }
    }

    #[test]
    fn extract_identical_pairs_empty() {
        let pairs = vec![("ab".to_owned(), "ab".to_owned()), ("x".to_owned(), "x".to_owned())];
        assert!(extract_candidates(&pairs, 2).is_empty());
    }

    #[test]
    fn extract_splits_long_deletion() {
        let pairs = vec![("aaaa".to_owned(), String::new())];
        let set = extract_candidates(&pairs, 0);
        assert!(set.ops().contains(&op("aaa", "")));
        assert!(set.ops().contains(&op("a", "")));
    }

    #[test]
    fn extract_orders_by_count_then_lexicographic() {
        // "a" -> "u" is proposed by both pairs, the contexted variants by one
        let pairs = vec![
            ("cat".to_owned(), "cut".to_owned()),
            ("xay".to_owned(), "xuy".to_owned()),
        ];
        let set = extract_candidates(&pairs, 1);
        assert_eq!(set.ops()[0], op("a", "u"));
        assert_eq!(set.origin_count(&op("a", "u")), 2);
    }

    #[test]
    fn extract_is_deterministic() {
        let pairs = vec![
            ("abcabc".to_owned(), "xbcxbc".to_owned()),
            ("aaa".to_owned(), "bbb".to_owned()),
        ];
        let a = extract_candidates(&pairs, 2);
        let b = extract_candidates(&pairs, 2);
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn align_reconstructs_target(a in "[a-d]{0,40}", b in "[a-d]{0,40}") {
            let regions = align(&a, &b);
            prop_assert_eq!(replay(&a, &b, &regions), b);
        }

        #[test]
        fn no_inert_candidates(
            pairs in proptest::collection::vec(("[a-c]{0,10}", "[a-c]{0,10}"), 1..4),
            ctx in 0..3usize,
        ) {
            let pairs: Vec<(String, String)> = pairs;
            let set = extract_candidates(&pairs, ctx);
            for op in set.ops() {
                prop_assert!(
                    pairs.iter().any(|(cur, _)| !op.is_inert_on(cur)),
                    "inert candidate {} survived", op
                );
            }
        }
    }
}
