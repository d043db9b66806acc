//! Local interaction polynomials and the Taylor-localisation operator.

pub mod couplings;
pub mod extract;
pub mod loc;

pub use couplings::{
    build_v, build_v_torus, minus_laplacian_generator, tau, tau_delta, tau_grad_grad, v_at_site,
    Couplings, ObservablePoints,
};
pub use extract::{extract_couplings, solve_in_span};
pub use loc::{jet_expand, loc, loc_data, loc_remainder_form, one_minus_loc, LocRules};
