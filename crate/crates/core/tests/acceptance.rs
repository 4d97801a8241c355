//! Prints one line per acceptance criterion and checks each status against the
//! expected one. Expected failures are listed with their reason; if one starts
//! passing, this test fails so the list gets revisited.

use rado_walk::verify::{run_criterion, Status, CRITERIA};

/// Criteria whose literal statement does not hold, with the measured reason.
const KNOWN_FAILURES: [(u8, &str); 2] = [
    (
        3,
        "with tops restricted to children of the root, c <= 16 b breaks: a weak edge below a root child is \
         always paired with a strong sibling edge; over every admissible subtree the sandwich holds on all trees",
    ),
    (
        4,
        "nu_n(T) >= nu(T_n) breaks when completion adds parallel branches, and b_n can exceed b; \
         c monotonicity, terminal equality and the mu comparison all hold",
    ),
];

fn expected(id: u8) -> Status {
    if KNOWN_FAILURES.iter().any(|k| k.0 == id) {
        Status::Fail
    } else {
        Status::Pass
    }
}

#[test]
fn acceptance_criteria() {
    let mut mismatches = Vec::new();
    for &(id, _, _) in CRITERIA.iter() {
        let r = run_criterion(id).expect("criterion runs");
        println!("{}", r.line());
        if let Some((_, why)) = KNOWN_FAILURES.iter().find(|k| k.0 == id) {
            println!("      known failure: {why}");
        }
        if r.status != expected(id) {
            mismatches.push(format!("criterion {id}: expected {:?}, got {:?}", expected(id), r.status));
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}
