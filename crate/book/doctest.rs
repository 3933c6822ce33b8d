//! Compiles the book's code blocks as doctests, one module per chapter.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/model.md")]
pub mod model {}
#[doc = include_str!("src/equilibrium.md")]
pub mod equilibrium {}
#[doc = include_str!("src/welfare.md")]
pub mod welfare {}
#[doc = include_str!("src/oracles.md")]
pub mod oracles {}
#[doc = include_str!("src/verify.md")]
pub mod verify {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
