//! Closed-form renormalisation constants, exhaustive checks of the
//! correlation inequalities, the averaged DLR counterexample and the Monte
//! Carlo estimators built on the samplers.

mod constants;
mod dlr;
mod experiments;
mod inequalities;
mod upsets;

pub use constants::{lss_threshold, r_lss, r_prime};
pub use dlr::{
    averaged_conditional, demonstrate_dlr_failure, dlr_conditional_formula, dlr_margin, DlrFailure,
};
pub use experiments::{
    crossing_experiment, density_experiment, domination_test, estimate_magnetization,
    estimate_theta, phase_label_experiment, psi_domination, slab_probe, standard_events, BcPolicy,
    CrossingResult, DensityResult, DominationOutcome, DominationReport, LabelRunResult,
    PsiDominationResult, SlabResult, ThetaPoint, DOMINATION_BATCHES,
};
pub use inequalities::{
    bond_animals, verify_corpus, verify_inequalities, CorpusOptions, VerificationReport,
    VerifyOptions,
};
pub use upsets::{
    domination_margin, fkg_pairs_margin, holley_margin, is_up_set, lattice_condition_margin,
    product_table, up_sets, MonotoneEvent, SetMeasure, MAX_UPSET_EDGES,
};
