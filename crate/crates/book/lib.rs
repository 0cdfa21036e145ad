//! The guide in `book/src`, compiled so that every listing runs as a doctest.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../book/src/lattices.md")]
pub mod lattices {}

#[doc = include_str!("../../book/src/nested-codes.md")]
pub mod nested_codes {}

#[doc = include_str!("../../book/src/relay-networks.md")]
pub mod relay_networks {}

#[doc = include_str!("../../book/src/isi.md")]
pub mod isi {}

#[doc = include_str!("../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../README.md")]
pub mod readme {}
