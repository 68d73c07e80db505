//! Exact computational group theory for a family of noncompact ball-quotient
//! surfaces: finitely presented groups, coset enumeration, subgroup
//! presentations, integer normal forms, matrix groups over Z/n and Q(zeta),
//! and the intersection-theory bookkeeping for the associated branched covers.
//!
//! Everything here is exact arithmetic; there is no floating point anywhere
//! in the library.

pub mod abelian;
pub mod claims;
pub mod cosets;
pub mod data;
pub mod dm;
pub mod eisenstein;
pub mod geometry;
pub mod group;
pub mod hirzebruch;
pub mod matgroups;
pub mod perm;
pub mod subgroups;
pub mod words;
