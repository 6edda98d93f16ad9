//! The guide in `book/` is compiled into this crate one chapter per module,
//! so `cargo test --doc` runs every Rust snippet in it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/prescribed-functions.md")]
pub mod prescribed_functions {}
#[doc = include_str!("../../../book/src/phase-plane.md")]
pub mod phase_plane {}
#[doc = include_str!("../../../book/src/integrating.md")]
pub mod integrating {}
#[doc = include_str!("../../../book/src/radial.md")]
pub mod radial {}
#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}
#[doc = include_str!("../../../book/src/export.md")]
pub mod export {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
