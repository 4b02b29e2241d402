//! Schur rings over small finite abelian groups.
//!
//! The crate is layered bottom-up: [`group`] (abelian groups, subgroups,
//! sections, automorphisms), [`perm`] (permutation groups), [`sring`]
//! (S-rings and their structure), [`build`] (constructions and
//! classifiers) and [`iso`] (canonical labeling and CI testing).

pub mod build;
pub mod error;
pub mod group;
pub mod iso;
pub mod perm;
pub mod sring;

pub use error::{Error, Result};
pub use group::{ElemSet, Group, Section, Subgroup};
