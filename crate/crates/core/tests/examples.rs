//! Every example runs to completion.

#[path = "../examples/approx_to_pure.rs"]
mod approx_to_pure;
#[path = "../examples/audit_randomized_response.rs"]
mod audit_randomized_response;
#[path = "../examples/central_audit.rs"]
mod central_audit;
#[path = "../examples/compose_randomizers.rs"]
mod compose_randomizers;
#[path = "../examples/deletion_counterexample.rs"]
mod deletion_counterexample;
#[path = "../examples/grouposition.rs"]
mod grouposition;
#[path = "../examples/purification_bounds.rs"]
mod purification_bounds;
#[path = "../examples/rr_decomposition.rs"]
mod rr_decomposition;
#[path = "../examples/shuffle_amplification.rs"]
mod shuffle_amplification;
#[path = "../examples/shuffle_to_ldp.rs"]
mod shuffle_to_ldp;
#[path = "../examples/subsample_tightness.rs"]
mod subsample_tightness;
#[path = "../examples/symmetrize_protocol.rs"]
mod symmetrize_protocol;
#[path = "../examples/trim_deletion.rs"]
mod trim_deletion;
#[path = "../examples/verify_suite.rs"]
mod verify_suite;

#[test]
fn examples_run() {
    approx_to_pure::run_example().unwrap();
    audit_randomized_response::run_example().unwrap();
    central_audit::run_example().unwrap();
    compose_randomizers::run_example().unwrap();
    deletion_counterexample::run_example().unwrap();
    grouposition::run_example().unwrap();
    purification_bounds::run_example().unwrap();
    rr_decomposition::run_example().unwrap();
    shuffle_amplification::run_example().unwrap();
    shuffle_to_ldp::run_example().unwrap();
    subsample_tightness::run_example().unwrap();
    symmetrize_protocol::run_example().unwrap();
    trim_deletion::run_example().unwrap();
    verify_suite::run_example().unwrap();
}
