//! Information measures and the bounds that sandwich the macrofraction
//! information. All quantities are in bits.

mod bounds;
mod counterexample;
mod measures;

pub use bounds::{appendix_bound, appendix_bound_clamped, appendix_bound_ln, fuchs_lower_bound, theorem_bound, BoundValue};
pub use counterexample::{counterexample_state, counterexample_state_unchecked};
pub use measures::{holevo_chi, mutual_information, pointer_entropy, shannon, EnsembleCQ};
