//! Combinatorics of Joyal's categories Θ_n and the posets of n-orderings,
//! with exact tools for comparing their classifying spaces to configuration
//! spaces of labelled points in ℝ^n.

pub mod fox_neuwirth;
pub mod gamma;
pub mod homology;
pub mod nord;
pub mod poset;
pub mod theta;
pub mod theta_a;
pub mod tree;
pub mod verify;

pub use fox_neuwirth::{cell_of, in_cell, witness, CellError, Configuration};
pub use gamma::{enumerate_delta, enumerate_gamma, segal, DeltaMorphism, GammaError, GammaMorphism};
pub use homology::{
    homology, order_complex, poset_homology, ChainComplex, HomologyError, HomologyResult, OrderComplex,
};
pub use nord::{enumerate_nord, leq, nord_count, NOrdering, NordError, PosetView};
pub use poset::Poset;
pub use theta::{
    assemble_morphism, assemble_object, branching_condition_holds, enumerate_hom_bruteforce, lift_active,
    theta_compose, theta_is_active, ThetaError, ThetaMorphism,
};
pub use theta_a::{embed, retract, LabelledThetaObject, ThetaAError};
pub use tree::{LeafId, ParseError, PlanarLevelTree, TreeError};
pub use verify::{run_suite, Caps, Report, Suite, SuiteConfig, VerifyError};
