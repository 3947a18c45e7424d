use mtnlp_core::sampler::{build_batches, pack_in_order, restore_order, BatchAssignment, BatchSpec};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn check_caps(a: &BatchAssignment, lengths: &[usize], spec: BatchSpec) {
    let mut seen = vec![false; lengths.len()];
    for b in &a.batches {
        assert!(!b.indices.is_empty());
        assert!(b.indices.len() <= spec.batch_size, "{} > batch_size", b.indices.len());
        let longest = b.indices.iter().map(|&i| lengths[i]).max().unwrap();
        assert_eq!(b.max_len, longest);
        assert!(b.indices.len() * longest <= spec.batch_max_tokens);
        for &i in &b.indices {
            assert!(!seen[i], "index {} assigned twice", i);
            seen[i] = true;
        }
    }
    assert!(seen.iter().all(|&s| s), "not every index assigned");
}

fn random_case(rng: &mut StdRng) -> (Vec<usize>, BatchSpec) {
    let spec = if rng.random_bool(0.25) {
        BatchSpec::new(128, 12800).unwrap()
    } else {
        BatchSpec::new(rng.random_range(1..=16), rng.random_range(8..=400)).unwrap()
    };
    let n = rng.random_range(0..=400);
    let cap = spec.batch_max_tokens.min(512);
    let lengths = (0..n).map(|_| rng.random_range(1..=cap)).collect();
    (lengths, spec)
}

/// Against a shuffled greedy baseline the sorted split never uses more
/// batches, and never pads more unless the baseline spends extra batches to
/// avoid padding. Returns how many cases the baseline padded less.
pub fn compare_with_random_order(cases: usize, seed: u64) -> usize {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut more_padded = 0;
    for case in 0..cases {
        let (lengths, spec) = random_case(&mut rng);
        let sorted = build_batches(&lengths, spec).unwrap();
        check_caps(&sorted, &lengths, spec);

        let mut order: Vec<usize> = (0..lengths.len()).collect();
        order.shuffle(&mut rng);
        let baseline = pack_in_order(&order, &lengths, spec).unwrap();
        check_caps(&baseline, &lengths, spec);

        let ours = (sorted.batches.len(), sorted.padded_tokens());
        let theirs = (baseline.batches.len(), baseline.padded_tokens());
        assert!(ours <= theirs, "case {}: {:?} > {:?}", case, ours, theirs);
        if ours.1 > theirs.1 {
            assert!(ours.0 < theirs.0);
            assert_ne!(spec, BatchSpec::default(), "case {}", case);
            more_padded += 1;
        }

        let outputs: Vec<Vec<usize>> = sorted.batches.iter().map(|b| b.indices.clone()).collect();
        let restored = restore_order(outputs, &sorted).unwrap();
        assert_eq!(restored, (0..lengths.len()).collect::<Vec<_>>());
    }
    more_padded
}

#[test]
fn caps_permutation_and_padding() {
    let exceptions = compare_with_random_order(1000, 2024);
    assert!(exceptions < 50, "{} cases", exceptions);
}

/// Best (batches, padded tokens) over every set partition that respects the
/// caps.
fn brute_force(lengths: &[usize], spec: BatchSpec) -> (usize, usize) {
    fn go(i: usize, lengths: &[usize], spec: BatchSpec, groups: &mut Vec<(usize, usize)>, best: &mut (usize, usize)) {
        if i == lengths.len() {
            let total = groups.iter().map(|&(c, m)| c * m).sum();
            *best = (*best).min((groups.len(), total));
            return;
        }
        for g in 0..groups.len() {
            let (c, m) = groups[g];
            let m2 = m.max(lengths[i]);
            if c < spec.batch_size && (c + 1) * m2 <= spec.batch_max_tokens {
                groups[g] = (c + 1, m2);
                go(i + 1, lengths, spec, groups, best);
                groups[g] = (c, m);
            }
        }
        groups.push((1, lengths[i]));
        go(i + 1, lengths, spec, groups, best);
        groups.pop();
    }
    let mut best = (usize::MAX, usize::MAX);
    go(0, lengths, spec, &mut Vec::new(), &mut best);
    best
}

/// Small random inputs: the split is optimal by (batches, padded tokens).
pub fn brute_force_agreement(cases: usize, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    for case in 0..cases {
        let spec = BatchSpec::new(rng.random_range(1..=4), rng.random_range(1..=24)).unwrap();
        let n = rng.random_range(1..=7);
        let lengths: Vec<usize> = (0..n).map(|_| rng.random_range(1..=spec.batch_max_tokens)).collect();
        let a = build_batches(&lengths, spec).unwrap();
        let got = (a.batches.len(), a.padded_tokens());
        assert_eq!(got, brute_force(&lengths, spec), "case {}: {:?} {:?}", case, lengths, spec);
    }
}

#[test]
fn batches_then_padding_are_minimal_for_small_inputs() {
    brute_force_agreement(1000, 99);
}

pub fn check_reference_configuration() {
    let spec = BatchSpec::default();
    assert_eq!((spec.batch_size, spec.batch_max_tokens), (128, 12800));
    let a = build_batches(&vec![100; 300], spec).unwrap();
    let sizes: Vec<usize> = a.batches.iter().map(|b| b.indices.len()).collect();
    assert_eq!(sizes, vec![128, 128, 44]);
}

#[test]
fn reference_configuration() {
    check_reference_configuration();
}

#[test]
fn similar_lengths_share_batches() {
    let lengths = [2, 50, 3, 49, 1, 51];
    let a = build_batches(&lengths, BatchSpec::new(3, 1000).unwrap()).unwrap();
    let groups: Vec<Vec<usize>> = a.batches.iter().map(|b| b.indices.clone()).collect();
    assert_eq!(groups, vec![vec![4, 0, 2], vec![3, 1, 5]]);
}
