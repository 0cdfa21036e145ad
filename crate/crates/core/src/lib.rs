//! Lattice-coded amplify-and-forward relaying for Gaussian relay networks.
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`]: finite-dimensional lattices with exact nearest-point
//!   quantization and Voronoi-cell figures of merit.
//! - [`codec`]: self-similar nested lattice pairs with dithered modulo
//!   encoding and MMSE-scaled lattice decoding.
//! - [`network`]: layered relay networks under amplify-and-forward, with
//!   exact noise propagation and the equivalent point-to-point channel.
//! - [`isi`]: non-layered networks as ISI channels. Covers capacity, the
//!   MMSE-DFE front end and lattice precoding of post-cursor interference.
//! - [`harness`]: the experiment driver behind the `latticeaf` binary.

pub mod codec;
pub mod error;
pub mod harness;
pub mod isi;
pub mod lattice;
pub mod network;
pub mod stats;

pub use codec::{mmse_alpha, AlphaMode, Codeword, DitherSign, NestedPair};
pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeKind, LatticeMetrics};
pub use network::{EquivalentChannel, RelayNetwork};
