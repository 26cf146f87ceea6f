//! The user guide, mirrored from `book/src/` so that every code block in
//! the book compiles and runs as a doc-test. Each submodule is one
//! chapter; the rendered book (`mdbook build book/`) is the comfortable
//! way to read them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/differential-polynomials.md")]
pub mod differential_polynomials {}

#[doc = include_str!("../../../book/src/rankings-and-reduction.md")]
pub mod rankings_and_reduction {}

#[doc = include_str!("../../../book/src/order-and-degree-bounds.md")]
pub mod order_and_degree_bounds {}

#[doc = include_str!("../../../book/src/searching-for-the-chow-form.md")]
pub mod searching_for_the_chow_form {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}
