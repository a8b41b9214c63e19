//! Free perm algebras, their (p,q)-mutations, and exact tools for studying the
//! identities of those mutations.

pub mod findim;
pub mod identities;
pub mod linalg;
pub mod mutation;
pub mod perm;
pub mod report;
pub mod speciality;
pub mod symmetric;
pub mod terms;
pub mod verify;
