//! Formal-term algebra for Whittaker vectors and orbit coefficients, rewrite rules,
//! representation filters and the rule checker.

pub mod engine;
pub mod poly;
pub mod polymatrix;
pub mod render;
pub mod rules;
pub mod term;
pub mod verify;

pub use engine::{
    apply_representation_filter, expand_coefficient, expand_eisenstein, expand_f212, expand_f22_partial, partial_sum_form,
    rewrite, sl3_fmin_min_rep, sl3_fu_min_rep, sl4_min_rep, sl4_ntm, whittaker_to_orbit, Coefficient, Rep, Strategy,
};
pub use poly::Poly;
pub use polymatrix::PolyMatrix;
pub use term::{
    canonicalize, orbit_of_term, orbit_of_whittaker_charges, Domain, FormalExpansion, FormalTerm, Kind, Slot,
};
pub use render::{expansion_latex, matrix_latex, poly_latex, term_latex};
pub use rules::{find_rule, levi_22, levi_31, levi_sl3, parse_slot, parse_term, registry};
pub use verify::{verify_rewrite_rule, CheckReport, RewriteRule, RuleFamily, Step};
