//! Sum-rate capacities, capacity-region constraint sets, and unified outer
//! bounds for single-hop interference networks.
//!
//! The crate models networks of `k1` transmitters and `k2` receivers whose
//! messages are labelled by (transmitter set, receiver set) pairs. On top of
//! that model it provides:
//!
//! - superposition-structure graphs over message sets and their codeword
//!   twins ([`graph`]);
//! - capacity-region constraint enumeration for single-receiver networks and
//!   the message-pruning pipeline that yields the exact sum-rate of degraded
//!   networks ([`sumrate`]);
//! - unified sum-rate and capacity-region outer bounds for arbitrary
//!   networks, with structure classifiers that recognize regimes where the
//!   bounds are tight ([`bounds`]);
//! - closed-form Gaussian evaluation and the rank-one degradedness test
//!   ([`gauss`]);
//! - a brute-force discrete verification engine ([`oracle`]).
//!
//! The `ifnet` binary exposes all of it over JSON network files; see the
//! README and the guide under `book/` for a tour.

pub mod bounds;
pub mod error;
pub mod expr;
pub mod gauss;
pub mod graph;
pub mod net;
pub mod oracle;
pub mod set;
pub mod sumrate;

pub use error::{Error, Result};
pub use net::{parse_network_spec, MessageLabel, NetworkSpec};

/// Book chapters double as doc-tests so the guide's snippets stay compiling.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/sum-rate.md")]
    mod sum_rate {}
    #[doc = include_str!("../../../book/src/outer-bounds.md")]
    mod outer_bounds {}
    #[doc = include_str!("../../../book/src/gaussian.md")]
    mod gaussian {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
}
