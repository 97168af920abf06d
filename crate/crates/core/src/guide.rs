//! The user guide. Chapters live in `book/src` and their examples run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/affine-bases.md")]
pub mod affine_bases {}

#[doc = include_str!("../../../book/src/superpotentials.md")]
pub mod superpotentials {}

#[doc = include_str!("../../../book/src/wall-crossing.md")]
pub mod wall_crossing {}

#[doc = include_str!("../../../book/src/rays.md")]
pub mod rays {}

#[doc = include_str!("../../../book/src/special-lagrangians.md")]
pub mod special_lagrangians {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
