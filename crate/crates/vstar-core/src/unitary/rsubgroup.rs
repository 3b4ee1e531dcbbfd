//! The subgroup R = { 1 + (1+b²)z·b : z ∈ KA } inside KG for groups with an
//! abelian subgroup A of index 2 inverted by an element b of order 4.
//!
//! R is elementary abelian of order q^{|A|/2}: a product of one-parameter
//! families 1 + λu(1+b²)b over a transversal of ⟨b²⟩ in A, and every member
//! is a unitary unit that squares to 1.

use crate::algebra::GroupAlgebra;
use crate::field::FieldElement;
use crate::groups::GroupDescriptor;

use super::closure::SubgroupSet;
use super::UnitaryError;

/// Builds R by spanning the λ-tuples over the transversal. The carrier's
/// group must be an inversion extension with b of order 4 (quaternion, or
/// SDI(...; b=4)), laid out with A at indices 0..|A| and b at index |A|.
pub fn r_subgroup(alg: &GroupAlgebra, budget: u64) -> Result<SubgroupSet, UnitaryError> {
    let group = alg.group();
    let field = alg.field();
    let descriptor_ok = matches!(
        group.descriptor(),
        GroupDescriptor::Quaternion(_)
            | GroupDescriptor::SemidirectInversion { b_order: 4, .. }
    );
    if !descriptor_ok {
        return Err(UnitaryError::WrongShape(format!(
            "{} is not an order-4 inversion extension",
            group.descriptor()
        )));
    }
    let n = group.order();
    let na = n / 2;
    let b = na as u16;
    // verify the layout instead of trusting the descriptor
    if group.element_order(b) != 4 {
        return Err(UnitaryError::WrongShape("b does not have order 4".into()));
    }
    for a in 0..na as u16 {
        for a2 in 0..na as u16 {
            if group.mul(a, a2) as usize >= na || !group.commutes(a, a2) {
                return Err(UnitaryError::WrongShape(
                    "indices below |A| do not form an abelian subgroup".into(),
                ));
            }
        }
        if group.conjugate(a, b) != group.inverse_of(a) {
            return Err(UnitaryError::WrongShape("b does not invert A".into()));
        }
    }
    let b2 = group.mul(b, b);
    debug_assert!((b2 as usize) < na);

    // transversal of ⟨b²⟩ in A: least index from each pair {u, u·b²}
    let transversal: Vec<u16> = (0..na as u16)
        .filter(|&u| u < group.mul(u, b2))
        .collect();
    debug_assert_eq!(transversal.len(), na / 2);

    let q = field.order();
    let total = (q as u128)
        .checked_pow(transversal.len() as u32)
        .unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(UnitaryError::BudgetExceeded {
            required: total,
            budget,
        });
    }

    // member for a λ-tuple: 1 + Σ_u λ_u (u·b + u·b²·b)
    let mut order: Vec<Vec<u32>> = Vec::with_capacity(total as usize);
    let mut seen = std::collections::HashSet::new();
    for rank in 0..total as u64 {
        let mut coeffs = vec![FieldElement::ZERO; n];
        coeffs[0] = field.one();
        let mut rest = rank;
        for &u in &transversal {
            let lambda = field.element(rest % q).expect("digit");
            rest /= q;
            if lambda.is_zero() {
                continue;
            }
            let i1 = group.mul(u, b) as usize;
            let i2 = group.mul(group.mul(u, b2), b) as usize;
            coeffs[i1] = field.add(coeffs[i1], lambda);
            coeffs[i2] = field.add(coeffs[i2], lambda);
        }
        let key: Vec<u32> = coeffs.iter().map(|c| c.code()).collect();
        if !seen.insert(key.clone()) {
            return Err(UnitaryError::Invariant(
                "λ-tuples did not give distinct members of R".into(),
            ));
        }
        order.push(key);
    }

    let set = SubgroupSet::from_dense(alg.clone(), order);

    // product closure, exhaustively for small R
    if set.len() <= 256 {
        let members: Vec<_> = set.iter().collect();
        for x in &members {
            for y in &members {
                if !set.contains(&x.mul(y)?) {
                    return Err(UnitaryError::Invariant(
                        "R is not closed under products".into(),
                    ));
                }
            }
        }
    }
    Ok(set)
}
