//! Arithmetic in the group algebra KG: dense coefficient vectors over a
//! [`FieldSpec`] indexed by the elements of a [`Group`], with the involution
//! x ↦ x*, the augmentation map, and unit testing/inversion.
//!
//! The carrier pairs a group with a field of matching characteristic (the
//! group order must be a power of char K), which is exactly the modular case
//! where "unit ⟺ augmentation ≠ 0" holds and the augmentation ideal is
//! nilpotent.

mod gf2;
mod text;

pub(crate) use gf2::Gf2Kernel;

use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldElement, FieldSpec};
use crate::groups::Group;
use crate::num_util::factorize;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("elements belong to different group-algebra carriers")]
    CarrierMismatch,
    #[error("group order {order} is not a power of the field characteristic {p}")]
    CharacteristicMismatch { order: usize, p: u64 },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("element is not a unit (augmentation is zero)")]
    NotAUnit,
    #[error("element is not a normalized unit (augmentation ≠ 1)")]
    NotNormalized,
    #[error("inversion series exceeded the nilpotency cap; carrier is corrupt")]
    InverseSeriesDiverged,
    #[error("cannot parse {input:?} as an algebra element: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
}

struct AlgebraCtx {
    group: Arc<Group>,
    field: Arc<FieldSpec>,
    /// prod_inv[i·n + j] = index of g_i · g_j^{-1}; the x·x* hot table.
    prod_inv: Vec<u16>,
    gf2: Option<Gf2Kernel>,
}

/// A shared KG carrier; cheap to clone, immutable, safe across threads.
#[derive(Clone)]
pub struct GroupAlgebra {
    ctx: Arc<AlgebraCtx>,
}

impl GroupAlgebra {
    pub fn new(group: Arc<Group>, field: Arc<FieldSpec>) -> Result<GroupAlgebra, AlgebraError> {
        let n = group.order();
        let p = field.characteristic();
        let factors = factorize(n as u64);
        let ok = matches!(factors.as_slice(), [(q, _)] if *q == p) || n == 1;
        if !ok {
            return Err(AlgebraError::CharacteristicMismatch { order: n, p });
        }
        let mut prod_inv = vec![0u16; n * n];
        for i in 0..n as u16 {
            for j in 0..n as u16 {
                prod_inv[i as usize * n + j as usize] = group.mul(i, group.inverse_of(j));
            }
        }
        let gf2 = (field.order() == 2 && n <= 64).then(|| Gf2Kernel::new(&group));
        Ok(GroupAlgebra {
            ctx: Arc::new(AlgebraCtx {
                group,
                field,
                prod_inv,
                gf2,
            }),
        })
    }

    pub fn group(&self) -> &Group {
        &self.ctx.group
    }

    pub fn field(&self) -> &FieldSpec {
        &self.ctx.field
    }

    pub fn same_carrier(&self, other: &GroupAlgebra) -> bool {
        Arc::ptr_eq(&self.ctx.group, &other.ctx.group) && self.ctx.field == other.ctx.field
    }

    pub(crate) fn gf2(&self) -> Option<&Gf2Kernel> {
        self.ctx.gf2.as_ref()
    }

    pub(crate) fn prod_inv(&self) -> &[u16] {
        &self.ctx.prod_inv
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            alg: self.clone(),
            coeffs: vec![FieldElement::ZERO; self.group().order()],
        }
    }

    pub fn one(&self) -> AlgebraElement {
        self.group_element(0)
    }

    /// The basis element 1·g for a group element index.
    pub fn group_element(&self, g: u16) -> AlgebraElement {
        let mut coeffs = vec![FieldElement::ZERO; self.group().order()];
        coeffs[g as usize] = self.field().one();
        AlgebraElement {
            alg: self.clone(),
            coeffs,
        }
    }

    pub fn from_coeffs(&self, coeffs: Vec<FieldElement>) -> Result<AlgebraElement, AlgebraError> {
        if coeffs.len() != self.group().order() {
            return Err(AlgebraError::CoefficientCount {
                expected: self.group().order(),
                got: coeffs.len(),
            });
        }
        Ok(AlgebraElement {
            alg: self.clone(),
            coeffs,
        })
    }

    /// Parses the textual element syntax, e.g. `1 + a + b*a^2` or
    /// `(x+1)*a + x*b` over GF(4).
    pub fn parse_element(&self, input: &str) -> Result<AlgebraElement, AlgebraError> {
        text::parse_element(self, input)
    }

    /// Packs a GF(2) element into a bitmask (bit i = coefficient of g_i).
    pub(crate) fn to_gf2_mask(&self, x: &AlgebraElement) -> u64 {
        debug_assert!(self.gf2().is_some());
        let mut mask = 0u64;
        for (i, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                mask |= 1u64 << i;
            }
        }
        mask
    }

    pub(crate) fn from_gf2_mask(&self, mask: u64) -> AlgebraElement {
        let n = self.group().order();
        let mut coeffs = vec![FieldElement::ZERO; n];
        for (i, c) in coeffs.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                *c = FieldElement::ONE;
            }
        }
        AlgebraElement {
            alg: self.clone(),
            coeffs,
        }
    }
}

impl std::fmt::Debug for GroupAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}[{}]", self.field().name(), self.group().descriptor())
    }
}

/// An element of KG. Immutable value; all operations are pure.
#[derive(Clone)]
pub struct AlgebraElement {
    alg: GroupAlgebra,
    coeffs: Vec<FieldElement>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same_carrier(&other.alg) && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraElement {}

impl AlgebraElement {
    pub fn algebra(&self) -> &GroupAlgebra {
        &self.alg
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, g: u16) -> FieldElement {
        self.coeffs[g as usize]
    }

    fn check_carrier(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.alg.same_carrier(&other.alg) {
            Ok(())
        } else {
            Err(AlgebraError::CarrierMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_carrier(other)?;
        let f = self.alg.field();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_carrier(other)?;
        let f = self.alg.field();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let f = self.alg.field();
        AlgebraElement {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().map(|&a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, k: FieldElement) -> Self {
        let f = self.alg.field();
        AlgebraElement {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().map(|&a| f.mul(k, a)).collect(),
        }
    }

    /// Convolution product over the Cayley table.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_carrier(other)?;
        let g = self.alg.group();
        let f = self.alg.field();
        let n = g.order();
        let mut out = vec![FieldElement::ZERO; n];
        for i in 0..n as u16 {
            let a = self.coeffs[i as usize];
            if a.is_zero() {
                continue;
            }
            for j in 0..n as u16 {
                let b = other.coeffs[j as usize];
                if b.is_zero() {
                    continue;
                }
                let k = g.mul(i, j) as usize;
                out[k] = f.add(out[k], f.mul(a, b));
            }
        }
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coeffs: out,
        })
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("same carrier")
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.alg.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same carrier");
            }
            base = base.square();
            k >>= 1;
        }
        acc
    }

    /// The involution x ↦ x*: the coefficient of g in x* is the coefficient
    /// of g^{-1} in x.
    pub fn star(&self) -> Self {
        let g = self.alg.group();
        let n = g.order();
        let mut out = vec![FieldElement::ZERO; n];
        for i in 0..n as u16 {
            out[i as usize] = self.coeffs[g.inverse_of(i) as usize];
        }
        AlgebraElement {
            alg: self.alg.clone(),
            coeffs: out,
        }
    }

    /// Coefficient sum; a ring homomorphism onto K.
    pub fn augmentation(&self) -> FieldElement {
        let f = self.alg.field();
        self.coeffs
            .iter()
            .fold(FieldElement::ZERO, |acc, &c| f.add(acc, c))
    }

    pub fn support(&self) -> Vec<u16> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i as u16)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == FieldElement::ONE && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// In this carrier a unit is exactly an element of nonzero augmentation.
    pub fn is_unit(&self) -> bool {
        !self.augmentation().is_zero()
    }

    pub fn is_normalized_unit(&self) -> bool {
        self.augmentation() == FieldElement::ONE
    }

    pub fn is_symmetric(&self) -> bool {
        let g = self.alg.group();
        (0..g.order() as u16).all(|i| self.coeffs[i as usize] == self.coeffs[g.inverse_of(i) as usize])
    }

    pub fn is_skew(&self) -> bool {
        let g = self.alg.group();
        let f = self.alg.field();
        (0..g.order() as u16)
            .all(|i| self.coeffs[i as usize] == f.neg(self.coeffs[g.inverse_of(i) as usize]))
    }

    /// Inverse by the nilpotent geometric series: write x = s(1 − y) with
    /// χ(y) = 0 and sum Σ y^i until the power vanishes.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let f = self.alg.field();
        let s = self.augmentation();
        if s.is_zero() {
            return Err(AlgebraError::NotAUnit);
        }
        let s_inv = f.inv(s).expect("nonzero");
        // y = 1 − s^{-1}·x
        let y = self.alg.one().sub(&self.scale(s_inv))?;
        let cap = self.alg.group().order() as u64
            * self.alg.field().degree() as u64
            * self.alg.field().characteristic();
        let mut acc = self.alg.one();
        let mut pow = y.clone();
        let mut steps = 0u64;
        while !pow.is_zero() {
            acc = acc.add(&pow)?;
            pow = pow.mul(&y)?;
            steps += 1;
            if steps > cap {
                return Err(AlgebraError::InverseSeriesDiverged);
            }
        }
        Ok(acc.scale(s_inv))
    }

    pub fn format(&self) -> String {
        text::format_element(self)
    }
}

impl std::fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.format())
    }
}

impl std::fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.format())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups;
    use crate::num_util::SplitMix64;

    fn carrier(desc: &str, field: &str) -> GroupAlgebra {
        let g = groups::GroupDescriptor::parse(desc).unwrap().build().unwrap();
        let f = FieldSpec::parse_name(field).unwrap();
        GroupAlgebra::new(Arc::new(g), Arc::new(f)).unwrap()
    }

    fn random_element(alg: &GroupAlgebra, rng: &mut SplitMix64) -> AlgebraElement {
        let q = alg.field().order();
        let coeffs = (0..alg.group().order())
            .map(|_| alg.field().element(rng.below(q)).unwrap())
            .collect();
        alg.from_coeffs(coeffs).unwrap()
    }

    #[test]
    fn carrier_requires_matching_characteristic() {
        let g = groups::cyclic(3).unwrap();
        let f = FieldSpec::gf(2).unwrap();
        assert!(matches!(
            GroupAlgebra::new(Arc::new(g), Arc::new(f)),
            Err(AlgebraError::CharacteristicMismatch { .. })
        ));
    }

    #[test]
    fn group_multiplication_embeds() {
        let alg = carrier("Q(8)", "GF(2)");
        let g = alg.group();
        for i in 0..8u16 {
            for j in 0..8u16 {
                let x = alg.group_element(i);
                let y = alg.group_element(j);
                let prod = x.mul(&y).unwrap();
                assert_eq!(prod, alg.group_element(g.mul(i, j)));
            }
        }
    }

    #[test]
    fn char_two_binomials() {
        // (1+g)² = 1+g² = 0 when g² = 1
        let alg = carrier("C(2)", "GF(2)");
        let x = alg.one().add(&alg.group_element(1)).unwrap();
        assert!(x.square().is_zero());

        // (1+a)² = 1+a² in GF(2)C4
        let alg = carrier("C(4)", "GF(2)");
        let a = alg.group_element(1);
        let x = alg.one().add(&a).unwrap();
        let expect = alg.one().add(&alg.group_element(2)).unwrap();
        assert_eq!(x.square(), expect);
    }

    #[test]
    fn star_examples() {
        let alg = carrier("Q(8)", "GF(2)");
        let g = alg.group();
        // g* = g^{-1}
        for i in 0..8u16 {
            assert_eq!(
                alg.group_element(i).star(),
                alg.group_element(g.inverse_of(i))
            );
        }
        // x = 1+a+b → x* = 1+a^3+b^3 (b^3 = a^2*b in this table)
        let x = alg.parse_element("1 + a + b").unwrap();
        let expect = alg.parse_element("1 + a^3 + a^2*b").unwrap();
        assert_eq!(x.star(), expect);
        let b = alg.group_element(g.element_by_name("b").unwrap());
        assert_eq!(b.pow(3), alg.parse_element("a^2*b").unwrap());
    }

    #[test]
    fn involution_laws_exhaustive_q8_gf2() {
        let alg = carrier("Q(8)", "GF(2)");
        let els: Vec<AlgebraElement> = (0u64..256)
            .map(|mask| alg.from_gf2_mask(mask))
            .collect();
        for x in &els {
            assert_eq!(x.star().star(), *x);
        }
        for x in &els {
            for y in &els {
                assert_eq!(
                    x.mul(y).unwrap().star(),
                    y.star().mul(&x.star()).unwrap()
                );
                assert_eq!(
                    x.add(y).unwrap().star(),
                    x.star().add(&y.star()).unwrap()
                );
            }
        }
    }

    #[test]
    fn augmentation_is_multiplicative() {
        let alg = carrier("D(8)", "GF(4)");
        let f = alg.field();
        let mut rng = SplitMix64::new(11);
        for _ in 0..200 {
            let x = random_element(&alg, &mut rng);
            let y = random_element(&alg, &mut rng);
            assert_eq!(
                x.mul(&y).unwrap().augmentation(),
                f.mul(x.augmentation(), y.augmentation())
            );
        }
        assert_eq!(alg.group_element(3).augmentation(), f.one());
    }

    #[test]
    fn unit_iff_nonzero_augmentation_exhaustive() {
        let alg = carrier("Q(8)", "GF(2)");
        for mask in 0u64..256 {
            let x = alg.from_gf2_mask(mask);
            let unit = x.is_unit();
            assert_eq!(unit, !x.augmentation().is_zero());
            match x.inverse() {
                Ok(inv) => {
                    assert!(unit);
                    assert!(x.mul(&inv).unwrap().is_one());
                    assert!(inv.mul(&x).unwrap().is_one());
                }
                Err(_) => assert!(!unit),
            }
        }
    }

    #[test]
    fn inverse_example() {
        let alg = carrier("C(4)", "GF(2)");
        let x = alg.parse_element("1 + a + a^2").unwrap();
        assert!(x.is_unit());
        let inv = x.inverse().unwrap();
        assert!(inv.mul(&x).unwrap().is_one());
    }

    #[test]
    fn non_units() {
        let alg = carrier("C(4)", "GF(2)");
        let x = alg.parse_element("1 + a").unwrap();
        assert!(!x.is_unit());
        assert!(matches!(x.inverse(), Err(AlgebraError::NotAUnit)));
        assert!(alg.zero().support().is_empty());
        assert!(!alg.zero().is_unit());
    }

    #[test]
    fn support_of_phi_omits_involutions() {
        let alg = carrier("Q(8)", "GF(2)");
        let g = alg.group();
        let x = alg.parse_element("1 + a + b").unwrap();
        let xxs = x.mul(&x.star()).unwrap();
        for i in xxs.support() {
            if i != 0 {
                assert_eq!(g.element_order(i), 4);
            }
        }
        assert!(!xxs.is_one());
    }

    #[test]
    fn symmetric_and_skew() {
        let alg = carrier("C(9)", "GF(3)");
        let g1 = alg.group_element(1);
        let sym = g1.add(&g1.star()).unwrap();
        assert!(sym.is_symmetric());
        let skew = g1.sub(&g1.star()).unwrap();
        assert!(skew.is_skew());
        assert!(!skew.is_symmetric());

        // characteristic 2: symmetric ⟺ skew
        let alg2 = carrier("C(4)", "GF(2)");
        let mut rng = SplitMix64::new(3);
        for _ in 0..100 {
            let x = random_element(&alg2, &mut rng);
            assert_eq!(x.is_symmetric(), x.is_skew());
        }
    }

    #[test]
    fn symmetric_skew_decomposition_odd_char() {
        let alg = carrier("C(9)", "GF(3)");
        let f = alg.field();
        let half = f.inv(f.element(2).unwrap()).unwrap();
        let mut rng = SplitMix64::new(9);
        for _ in 0..100 {
            let y = random_element(&alg, &mut rng);
            let sym = y.add(&y.star()).unwrap().scale(half);
            let skew = y.sub(&y.star()).unwrap().scale(half);
            assert!(sym.is_symmetric());
            assert!(skew.is_skew());
            assert_eq!(sym.add(&skew).unwrap(), y);
            if y.augmentation().is_zero() {
                assert!(sym.augmentation().is_zero());
                assert!(skew.augmentation().is_zero());
            }
        }
    }

    #[test]
    fn normalized_unit_count_by_full_scan() {
        // |{x : χ(x)=1}| = q^{|G|-1}
        let alg = carrier("Q(8)", "GF(2)");
        let count = (0u64..256)
            .filter(|&mask| alg.from_gf2_mask(mask).is_normalized_unit())
            .count();
        assert_eq!(count, 128);

        let alg = carrier("C(2)", "GF(4)");
        let f = alg.field();
        let mut count = 0;
        for c0 in 0..4u64 {
            for c1 in 0..4u64 {
                let x = alg
                    .from_coeffs(vec![f.element(c0).unwrap(), f.element(c1).unwrap()])
                    .unwrap();
                if x.is_normalized_unit() {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 4);
    }

    #[test]
    fn carrier_mismatch_is_rejected() {
        let a1 = carrier("C(4)", "GF(2)");
        let a2 = carrier("C(4)", "GF(2)");
        let x = a1.one();
        let y = a2.one();
        assert!(matches!(x.add(&y), Err(AlgebraError::CarrierMismatch)));
    }
}
