//! Special functions, quadrature and combinatorics behind the outage
//! expressions.

pub mod compositions;
pub mod gamma;
pub mod laplace;
pub mod mixture;
pub mod quadrature;
pub mod residues;

pub use compositions::{compositions, Composition, Compositions};
pub use gamma::{beta_fn, lower_inc_gamma};
pub use laplace::{laplace_derivatives, scaled_laplace_derivatives, tau, tau_derivatives};
pub use mixture::{chebyshev_nodes, cluster_gain_mixture, coop_gain_mixture, ExpMixture, MixtureKind};
pub use residues::{residues, ResidueTable};
