//! The unitary subgroup V_*(KG): membership, the map φ(x) = x·x*, Cayley
//! units in odd characteristic, and three routes to |V_*(KG)| — exhaustive
//! enumeration, the symmetric-subgroup quotient, and structural composition.

mod closure;
mod enumerate;
mod normality;
pub mod report;
mod rsubgroup;

pub use closure::{
    symmetric_subgroup_closure, unitary_order_via_quotient, ClosureOptions, SubgroupSet,
    SymmetricSubgroup,
};
pub use enumerate::{
    bruteforce_unitary, enumerate_normalized_units, normalized_unit_at, normalized_unit_total,
    normalized_units_range, BruteforceOptions, DEFAULT_BUDGET,
};
pub use normality::{normality_check, NormalityOptions, NormalityReport};
pub use rsubgroup::r_subgroup;

use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError, GroupAlgebra};
use crate::field::FieldElement;
use crate::linalg::nullspace_basis;
use report::FactoredOrder;

#[derive(Debug, Error)]
pub enum UnitaryError {
    #[error("element is not a normalized unit")]
    NotNormalized,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("operation requires odd characteristic")]
    OddCharacteristicRequired,
    #[error("element is not skew-symmetric")]
    NotSkew,
    #[error("enumerating {required} candidates exceeds the budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("the quotient method requires a covered normality class; {0} is not covered")]
    NotInCoveredClass(String),
    #[error("closure grew past the budget {0}")]
    ClosureBudget(u64),
    #[error("group shape mismatch: {0}")]
    WrongShape(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// True iff x·x* = 1. Requires a normalized unit.
pub fn is_unitary(x: &AlgebraElement) -> Result<bool, UnitaryError> {
    if !x.is_normalized_unit() {
        return Err(UnitaryError::NotNormalized);
    }
    Ok(x.mul(&x.star())?.is_one())
}

/// φ(x) = x·x*. Requires a unit.
pub fn phi(x: &AlgebraElement) -> Result<AlgebraElement, UnitaryError> {
    if !x.is_unit() {
        return Err(UnitaryError::NotAUnit);
    }
    Ok(x.mul(&x.star())?)
}

/// Dimension over K of the skew-symmetric part of the augmentation ideal,
/// {x ∈ I : x* = -x}, by exact linear algebra on the coefficient space.
pub fn skew_space_dimension(alg: &GroupAlgebra) -> usize {
    skew_space_basis(alg).len()
}

/// A K-basis of {x ∈ I : x* = -x}.
pub fn skew_space_basis(alg: &GroupAlgebra) -> Vec<AlgebraElement> {
    let group = alg.group();
    let field = alg.field();
    let n = group.order();
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();

    // α_{g^{-1}} = -α_g : one row per {g, g^{-1}} pair, a 2·α_g row on
    // self-inverse elements (vacuous in characteristic 2)
    let two = field.add(field.one(), field.one());
    for g in 0..n as u16 {
        let gi = group.inverse_of(g);
        if g == gi {
            if !two.is_zero() {
                let mut row = vec![FieldElement::ZERO; n];
                row[g as usize] = two;
                rows.push(row);
            }
        } else if g < gi {
            let mut row = vec![FieldElement::ZERO; n];
            row[g as usize] = field.one();
            row[gi as usize] = field.one();
            rows.push(row);
        }
    }
    // augmentation-ideal membership
    rows.push(vec![field.one(); n]);

    nullspace_basis(field, rows, n)
        .into_iter()
        .map(|coeffs| alg.from_coeffs(coeffs).expect("length n"))
        .collect()
}

/// All skew elements of the augmentation ideal, by spanning the basis.
/// Intended for small dimensions (the element count is q^dim).
pub fn skew_space_elements(alg: &GroupAlgebra, budget: u64) -> Result<Vec<AlgebraElement>, UnitaryError> {
    let basis = skew_space_basis(alg);
    let q = alg.field().order();
    let total = (q as u128)
        .checked_pow(basis.len() as u32)
        .unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(UnitaryError::BudgetExceeded {
            required: total,
            budget,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    for rank in 0..total as u64 {
        let mut acc = alg.zero();
        let mut rest = rank;
        for b in &basis {
            let digit = rest % q;
            rest /= q;
            if digit != 0 {
                let c = alg.field().element(digit).expect("digit < q");
                acc = acc.add(&b.scale(c))?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// The Cayley transform x ↦ (1-x)(1+x)^{-1}; defined whenever 1+x is a unit.
/// Applying it twice is the identity.
pub fn cayley_transform(x: &AlgebraElement) -> Result<AlgebraElement, UnitaryError> {
    let one = x.algebra().one();
    let denom = one.add(x)?;
    if !denom.is_unit() {
        return Err(UnitaryError::NotAUnit);
    }
    let numer = one.sub(x)?;
    Ok(numer.mul(&denom.inverse()?)?)
}

/// Cayley unitary unit of a skew element: u = (1-k)(1+k)^{-1}. Requires odd
/// characteristic and a skew-symmetric argument.
pub fn cayley_unit(k: &AlgebraElement) -> Result<AlgebraElement, UnitaryError> {
    if k.algebra().field().characteristic() == 2 {
        return Err(UnitaryError::OddCharacteristicRequired);
    }
    if !k.is_skew() {
        return Err(UnitaryError::NotSkew);
    }
    cayley_transform(k)
}

/// |V_*(KG)| = q^{(|G|-1)/2} in odd characteristic.
pub fn unitary_order_oddchar(alg: &GroupAlgebra) -> Result<FactoredOrder, UnitaryError> {
    if alg.field().characteristic() == 2 {
        return Err(UnitaryError::OddCharacteristicRequired);
    }
    let n = alg.group().order() as u64;
    Ok(FactoredOrder::pow_of(alg.field().order(), (n - 1) / 2))
}
