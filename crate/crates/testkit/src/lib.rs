//! Test support: a seeded Go codebase generator, scripted refactorings with
//! their ground truth, and throwaway git repositories.

pub mod corpus;
pub mod fixtures;
pub mod repo;

pub use corpus::{Codebase, Expected, Instance, Script};
pub use repo::FixtureRepo;
