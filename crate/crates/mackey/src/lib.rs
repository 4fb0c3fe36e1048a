//! Exact computations with Mackey and Tambara functors over finite groups.
//!
//! The crate is layered: [`groups`] and [`gsets`] provide the finite group
//! and G-set calculus, [`abelian`] the integer linear algebra, [`mackey`] and
//! [`tambara`] the functors themselves, and [`free_tambara`] and
//! [`norm_power`] the presented constructions built from them.

pub mod abelian;
pub mod groups;
pub mod gsets;
pub mod mackey;
pub mod tambara;
pub mod free_tambara;
pub mod norm_power;
