//! Certified lower bounds for the connectivity measure atoms mu(0) and mu(1)
//! of the monochromatic random plane wave, together with a Monte Carlo
//! simulator that measures nodal-domain topology empirically.
//!
//! The crate is organized around three pipelines:
//!
//! * [`barrier`] — the C^1-approximation route: hypothesis validation, the
//!   maximal tolerance epsilon, the certified series sum S, and a probability
//!   bound that turns into mu(0)/mu(1) lower bounds;
//! * [`symmetrize`] — the radial-symmetrization route: radii validation,
//!   optimal threshold solving, and Kac-Rice crossing bounds;
//! * [`simulate`] — a reproducible sampler of the wave with nodal-domain
//!   extraction (hole counts, nesting trees) for cross-validation.
//!
//! Supporting modules: [`specfun`] (Bessel J, log-domain incomplete gamma),
//! [`rootfind`] (bracketed solving, level bands, interval extrema), and
//! [`logmag`] (sign + log10 arithmetic for magnitudes like 10^-4535).

pub mod barrier;
pub mod logmag;
pub mod rootfind;
pub mod simulate;
pub mod specfun;
pub mod symmetrize;

pub use logmag::LogMagnitude;
