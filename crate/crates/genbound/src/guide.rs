// The book chapters double as doctests: every fenced Rust block below
// compiles against this crate under `cargo test --doc`, so the guide cannot
// drift from the API. (mdbook itself cannot run snippets with external
// dependencies; including the markdown into rustdoc is the workaround.)

#[doc = include_str!("../../../book/src/function-classes.md")]
pub mod function_classes {}

#[doc = include_str!("../../../book/src/data-sources.md")]
pub mod data_sources {}

#[doc = include_str!("../../../book/src/objectives.md")]
pub mod objectives {}

#[doc = include_str!("../../../book/src/training.md")]
pub mod training {}

#[doc = include_str!("../../../book/src/rademacher.md")]
pub mod rademacher_estimation {}

#[doc = include_str!("../../../book/src/bounds.md")]
pub mod closed_form_bounds {}
