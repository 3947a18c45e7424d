//! Maximum spanning arborescence decoding (Chu-Liu/Edmonds).
//!
//! Nodes are numbered with 0 as the artificial root and `i + 1` for token `i`.

use super::{argmax, ArcScores, DecodeError, LabelScores};
use crate::doc::DepArc;

const NEG_INF: f64 = f64::NEG_INFINITY;

// Dense matrix: m[dep][head].
type Matrix = Vec<Vec<f64>>;

fn best_heads(m: &Matrix) -> Vec<usize> {
    let mut heads = vec![0; m.len()];
    for (d, row) in m.iter().enumerate().skip(1) {
        heads[d] = argmax(row).expect("non-empty row");
    }
    heads
}

/// Returns the nodes of some cycle in `heads`, if any, in ascending order.
fn find_cycle(heads: &[usize]) -> Option<Vec<usize>> {
    let n = heads.len();
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n];
    state[0] = 2;
    for start in 1..n {
        let mut path = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = heads[v];
        }
        if state[v] == 1 {
            let at = path.iter().position(|&p| p == v).expect("cycle node on path");
            let mut cycle = path[at..].to_vec();
            cycle.sort_unstable();
            return Some(cycle);
        }
        for p in path {
            state[p] = 2;
        }
    }
    None
}

fn chu_liu_edmonds(m: &Matrix) -> Vec<usize> {
    let heads = best_heads(m);
    let cycle = match find_cycle(&heads) {
        None => return heads,
        Some(c) => c,
    };

    let n = m.len();
    let mut in_cycle = vec![false; n];
    for &c in &cycle {
        in_cycle[c] = true;
    }
    // Nodes outside the cycle keep their relative order; the contracted node
    // goes last.
    let outside: Vec<usize> = (0..n).filter(|&v| !in_cycle[v]).collect();
    let contracted = outside.len();
    let size = contracted + 1;

    let mut sub = vec![vec![NEG_INF; size]; size];
    // For arcs from an outside head into the cycle: which cycle node it enters.
    let mut enters = vec![usize::MAX; size];
    // For arcs from the cycle to an outside dependent: which cycle node is the head.
    let mut leaves_from = vec![usize::MAX; size];

    for (nd, &d) in outside.iter().enumerate() {
        for (nh, &h) in outside.iter().enumerate() {
            sub[nd][nh] = m[d][h];
        }
        if d != 0 {
            let mut best = NEG_INF;
            let mut from = cycle[0];
            for &c in &cycle {
                if m[d][c] > best {
                    best = m[d][c];
                    from = c;
                }
            }
            sub[nd][contracted] = best;
            leaves_from[nd] = from;
        }
    }
    for (nh, &h) in outside.iter().enumerate() {
        let mut best = NEG_INF;
        let mut into = cycle[0];
        for &c in &cycle {
            let gain = m[c][h] - m[c][heads[c]];
            if gain > best {
                best = gain;
                into = c;
            }
        }
        sub[contracted][nh] = best;
        enters[nh] = into;
    }
    for (i, row) in sub.iter_mut().enumerate() {
        row[i] = NEG_INF;
    }
    // nothing may point back at the root
    sub[0] = vec![NEG_INF; size];

    let sub_heads = chu_liu_edmonds(&sub);

    let mut result = heads.clone();
    for (nd, &d) in outside.iter().enumerate().skip(1) {
        let nh = sub_heads[nd];
        result[d] = if nh == contracted { leaves_from[nd] } else { outside[nh] };
    }
    let entry_head = outside[sub_heads[contracted]];
    let entered = enters[sub_heads[contracted]];
    result[entered] = entry_head;
    result
}

fn to_matrix(scores: &ArcScores) -> Matrix {
    let n = scores.tokens() + 1;
    let mut m = vec![vec![NEG_INF; n]; n];
    for d in 1..n {
        for h in 0..n {
            if h != d {
                m[d][h] = scores.get(h, d - 1);
            }
        }
    }
    m
}

/// Sum of the arc scores of a head assignment as produced by [`mst_decode`].
pub fn tree_score(scores: &ArcScores, heads: &[usize]) -> f64 {
    heads.iter().enumerate().map(|(d, &h)| scores.get(h, d)).sum()
}

/// Decodes the highest-scoring dependency tree in which exactly one token
/// attaches to the root. Returns the head of every token, `0` meaning root and
/// `i + 1` meaning token `i`.
///
/// The unconstrained arborescence is used when it already has a single root
/// child; otherwise every token is tried as the sole root child and the best
/// resulting tree is kept, the lower token index winning ties.
pub fn mst_decode(scores: &ArcScores) -> Result<Vec<usize>, DecodeError> {
    scores.validate()?;
    let n = scores.tokens();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = to_matrix(scores);
    let heads = chu_liu_edmonds(&m);
    if heads.iter().skip(1).filter(|&&h| h == 0).count() == 1 {
        return Ok(heads[1..].to_vec());
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for root_child in 1..=n {
        let mut masked = m.clone();
        for (d, row) in masked.iter_mut().enumerate().skip(1) {
            if d != root_child {
                row[0] = NEG_INF;
            }
        }
        let heads = chu_liu_edmonds(&masked)[1..].to_vec();
        let score = tree_score(scores, &heads);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, heads));
        }
    }
    Ok(best.expect("at least one token").1)
}

/// Tree decoding followed by the best label for every chosen arc. Heads in the
/// result are token offsets with `-1` for the root.
pub fn decode_dep(arcs: &ArcScores, labels: &LabelScores) -> Result<Vec<DepArc>, DecodeError> {
    labels.validate(arcs.tokens())?;
    let heads = mst_decode(arcs)?;
    Ok(heads
        .iter()
        .enumerate()
        .map(|(d, &h)| {
            let label = argmax(labels.get(h, d)).expect("non-empty label set");
            DepArc::new(h as i64 - 1, labels.labels[label].clone())
        })
        .collect())
}
