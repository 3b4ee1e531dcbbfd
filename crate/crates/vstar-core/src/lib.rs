//! Finite p-groups, their group algebras over finite fields, and the unitary
//! units inside the normalized unit group.
//!
//! The crate builds small 2-groups and odd p-groups as explicit Cayley tables
//! ([`groups`]), equips KG with exact coefficient arithmetic over GF(p^m)
//! ([`field`], [`algebra`]), and computes the order of the unitary subgroup
//! V_*(KG) by three independent routes that can be cross-checked against each
//! other ([`unitary`], [`formulas`]):
//!
//! * brute-force enumeration of all normalized units,
//! * the index of the symmetric subgroup S_K(G) = { x·x* } in V(KG),
//! * closed-form order formulas per group family.

pub mod algebra;
pub mod field;
pub mod formulas;
pub mod groups;
pub mod unitary;

mod linalg;
mod num_util;

pub use algebra::{AlgebraElement, GroupAlgebra};
pub use field::{FieldElement, FieldSpec};
pub use groups::{Group, GroupDescriptor};
pub use unitary::report::{FactoredOrder, Method, UnitSetReport};
