//! Frozen instances whose outcomes must not change.

use gt_core::generators::gen_general;
use gt_core::subset::Subset;
use gt_core::verify::{check_pair_prop2, Criterion};
use gt_core::{verify_prop2, verify_sequence, AdversaryModel, FeedbackKind, FeedbackSpec, Params, QuerySequence};

/// Smallest instance found where the honest adversary is beaten but the
/// sufficient criterion still reports a failure.
fn honest_gap_fixture() -> (QuerySequence, FeedbackSpec) {
    let params = Params {
        n: 4,
        k: 2,
        alpha: 1,
        beta: 1,
    };
    let queries = [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4]].iter().map(|q| Subset::of(q)).collect();
    let seq = QuerySequence::manual(params, queries).unwrap();
    (seq, FeedbackSpec::par(4, 1).unwrap())
}

#[test]
fn honest_gap_fixture_is_solved_under_honest() {
    let (seq, spec) = honest_gap_fixture();
    let r = verify_sequence(&seq, &spec, &AdversaryModel::honest(), 2).unwrap();
    assert!(r.solved);
    assert_eq!(r.criterion, Criterion::Definition6);
    assert!(r.witness.is_none());
    assert_eq!(r.pairs_checked, 55);
}

#[test]
fn honest_gap_fixture_fails_the_sufficient_criterion() {
    let (seq, spec) = honest_gap_fixture();
    let r = verify_prop2(&seq, &spec, 2).unwrap();
    assert!(!r.solved);
    let w = r.witness.unwrap();
    assert_eq!((w.k1, w.k2), (Subset::of(&[3, 4]), Subset::of(&[1, 2])));
    assert!(!check_pair_prop2(&seq, &spec, w.k1, w.k2).unwrap());
}

#[test]
fn honest_gap_fixture_fails_under_malicious() {
    let (seq, spec) = honest_gap_fixture();
    assert!(!verify_sequence(&seq, &spec, &AdversaryModel::malicious(), 2).unwrap().solved);
}

#[test]
fn general_with_order_one_budget_uses_order_one() {
    // an order-one code over 12 elements needs 4 bits, so beta = 5 leaves exactly that
    let (seq, spec) = gen_general(&Params { n: 12, k: 4, alpha: 2, beta: 5 }, 0, 1).unwrap();
    let notes = &seq.provenance().notes;
    assert_eq!(notes["beta_prime"], "1");
    assert_eq!(notes["code_width"], "4");
    assert_eq!(spec.kind(), FeedbackKind::GenFeed);
    assert_eq!(spec.width(), 5);
}

#[test]
fn general_records_both_part_lengths() {
    let (seq, _) = gen_general(&Params { n: 12, k: 4, alpha: 4, beta: 16 }, 0, 2).unwrap();
    let notes = &seq.provenance().notes;
    assert_eq!(notes["beta_prime"], "4");
    let binary: usize = notes["binary_length"].parse().unwrap();
    let full: usize = notes["full_length"].parse().unwrap();
    assert_eq!(binary + full, seq.len());
    let last = seq.provenance().parts.last().unwrap();
    assert_eq!(last.name, "full[k=8]");
    assert_eq!(last.length, full);
}
