//! Runs every code snippet in the guide (`book/src`) as a doctest, so the
//! book stays in sync with the crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction_chapter {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model_chapter {}

#[doc = include_str!("../../../book/src/generation.md")]
pub mod generation_chapter {}

#[doc = include_str!("../../../book/src/theory.md")]
pub mod theory_chapter {}

#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis_chapter {}

#[doc = include_str!("../../../book/src/auditing.md")]
pub mod auditing_chapter {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli_chapter {}
