//! Doc-test anchors for the mdbook guide.
//!
//! Each chapter of `book/` is included here as rustdoc so that the code
//! snippets in the guide are compiled and executed by `cargo test --doc`.
//! Keeping the includes in one module means a chapter rename fails loudly.

#[doc = include_str!("../../../README.md")]
mod readme {}

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/potentials.md")]
mod potentials {}

#[doc = include_str!("../../../book/src/exact-references.md")]
mod exact_references {}

#[doc = include_str!("../../../book/src/perturbation.md")]
mod perturbation {}

#[doc = include_str!("../../../book/src/eikonal.md")]
mod eikonal {}

#[doc = include_str!("../../../book/src/quantum-mean.md")]
mod quantum_mean {}

#[doc = include_str!("../../../book/src/unitary.md")]
mod unitary {}

#[doc = include_str!("../../../book/src/monte-carlo.md")]
mod monte_carlo {}

#[doc = include_str!("../../../book/src/figures.md")]
mod figures {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
