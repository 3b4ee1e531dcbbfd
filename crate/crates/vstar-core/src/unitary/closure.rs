//! The symmetric subgroup S_K(G) = { x·x* : x ∈ V(KG) } by product closure,
//! and |V_*(KG)| as the index [V(KG) : S_K(G)].
//!
//! Valid in characteristic 2 for the group classes where x ↦ x·x* is a
//! homomorphism (see [`NormalityClass`]); the descriptor gate is
//! conservative. The closure starts from a concrete generator family — φ
//! images of 1 + α(g+h) over all element pairs and a K-basis of α, plus
//! φ(1 + αg(1+h)) for h in the commutator subgroup, plus 1 + α(b + w_b) for
//! each order-4 transversal element b with a non-commuting involution w_b —
//! and stops when stable. If the closed order misses an expected target, the
//! family is enlarged with φ images of seeded-random normalized units before
//! the discrepancy is reported; it is never silently accepted.

use std::collections::HashSet;
use std::hash::Hash;

use crate::algebra::{AlgebraElement, GroupAlgebra};
use crate::field::FieldElement;
use crate::groups::NormalityClass;
use crate::num_util::SplitMix64;

use super::report::{FactoredOrder, Method, UnitSetReport};
use super::{UnitaryError, DEFAULT_BUDGET};

#[derive(Clone, Debug)]
pub struct ClosureOptions {
    /// cap on the closed subgroup size
    pub budget: u64,
    /// seed for the fallback sampling of extra generators
    pub seed: u64,
    /// how many φ(random normalized unit) generators to add when short
    pub random_fallback: u32,
    /// target order, when a formula provides one
    pub expected: Option<FactoredOrder>,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            budget: DEFAULT_BUDGET,
            seed: 42,
            random_fallback: 128,
            expected: None,
        }
    }
}

/// A finite subgroup of the unit group, stored as a deduplicated set of
/// elements in insertion order. GF(2) carriers with a bit kernel store
/// masks; everything else stores packed coefficient keys.
pub struct SubgroupSet {
    alg: GroupAlgebra,
    repr: Repr,
}

enum Repr {
    Masks { set: HashSet<u64>, order: Vec<u64> },
    Dense { set: HashSet<Vec<u32>>, order: Vec<Vec<u32>> },
}

impl SubgroupSet {
    pub(crate) fn from_masks(alg: GroupAlgebra, order: Vec<u64>) -> SubgroupSet {
        let set = order.iter().copied().collect();
        SubgroupSet {
            alg,
            repr: Repr::Masks { set, order },
        }
    }

    pub(crate) fn from_dense(alg: GroupAlgebra, order: Vec<Vec<u32>>) -> SubgroupSet {
        let set = order.iter().cloned().collect();
        SubgroupSet {
            alg,
            repr: Repr::Dense { set, order },
        }
    }

    pub fn algebra(&self) -> &GroupAlgebra {
        &self.alg
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Masks { order, .. } => order.len(),
            Repr::Dense { order, .. } => order.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        match &self.repr {
            Repr::Masks { set, .. } => set.contains(&self.alg.to_gf2_mask(x)),
            Repr::Dense { set, .. } => set.contains(&dense_key(x)),
        }
    }

    /// Elements in insertion order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = AlgebraElement> + '_> {
        match &self.repr {
            Repr::Masks { order, .. } => {
                Box::new(order.iter().map(|&m| self.alg.from_gf2_mask(m)))
            }
            Repr::Dense { order, .. } => Box::new(order.iter().map(|key| {
                let coeffs = key
                    .iter()
                    .map(|&c| self.alg.field().element(c as u64).expect("stored code"))
                    .collect();
                self.alg.from_coeffs(coeffs).expect("stored length")
            })),
        }
    }

    pub fn first(&self, k: usize) -> Vec<AlgebraElement> {
        self.iter().take(k).collect()
    }
}

impl std::fmt::Debug for SubgroupSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SubgroupSet[{} elements of {:?}]", self.len(), self.alg)
    }
}

fn dense_key(x: &AlgebraElement) -> Vec<u32> {
    x.coeffs().iter().map(|c| c.code()).collect()
}

/// S_K(G) with the provenance of the generators that actually grew it.
#[derive(Debug)]
pub struct SymmetricSubgroup {
    pub elements: SubgroupSet,
    pub generators_used: Vec<String>,
    /// set when the closed order differs from the expected target
    pub shortfall: Option<String>,
}

impl SymmetricSubgroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }
}

/// Product closure of commuting generators, with verification.
///
/// Grows S by coset expansion one new generator at a time (correct when the
/// generators commute with everything generated, which holds for central
/// elements), then verifies stability under every essential generator. On
/// verification failure it falls back to a plain breadth-first orbit closure
/// that assumes nothing.
fn close_commuting<T, F>(
    identity: T,
    gens: &[(T, String)],
    mul: F,
    budget: u64,
) -> Result<(Vec<T>, HashSet<T>, Vec<String>), UnitaryError>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut order = vec![identity.clone()];
    let mut set: HashSet<T> = HashSet::new();
    set.insert(identity.clone());
    let mut essential: Vec<(T, String)> = Vec::new();

    for (d, provenance) in gens {
        if set.contains(d) {
            continue;
        }
        essential.push((d.clone(), provenance.clone()));
        // S ← S·⟨d⟩ : append cosets S·d^k until d^k lands back in S
        let mut power = d.clone();
        while !set.contains(&power) {
            let prior: Vec<T> = order.clone();
            for s in prior {
                let e = mul(&s, &power);
                if set.insert(e.clone()) {
                    order.push(e);
                }
            }
            if order.len() as u64 > budget {
                return Err(UnitaryError::ClosureBudget(budget));
            }
            power = mul(&power, d);
        }
    }

    // stability check; on failure rebuild by plain BFS over all generators
    let stable = essential
        .iter()
        .all(|(d, _)| order.iter().all(|s| set.contains(&mul(s, d))));
    if !stable {
        let mut order = vec![identity.clone()];
        let mut set: HashSet<T> = HashSet::new();
        set.insert(identity);
        let mut head = 0usize;
        while head < order.len() {
            let s = order[head].clone();
            head += 1;
            for (d, _) in gens {
                let e = mul(&s, d);
                if set.insert(e.clone()) {
                    order.push(e);
                    if order.len() as u64 > budget {
                        return Err(UnitaryError::ClosureBudget(budget));
                    }
                }
            }
        }
        let provenance = gens.iter().map(|(_, p)| p.clone()).collect();
        return Ok((order, set, provenance));
    }

    for (g, p) in gens {
        if !set.contains(g) {
            return Err(UnitaryError::Invariant(format!(
                "closure lost generator {p}"
            )));
        }
    }
    let provenance = essential.into_iter().map(|(_, p)| p).collect();
    Ok((order, set, provenance))
}

/// `1 + Σ coeff·g` built directly on the coefficient vector.
fn one_plus(alg: &GroupAlgebra, parts: &[(u16, FieldElement)]) -> AlgebraElement {
    let field = alg.field();
    let mut coeffs = vec![FieldElement::ZERO; alg.group().order()];
    coeffs[0] = field.one();
    for &(g, c) in parts {
        coeffs[g as usize] = field.add(coeffs[g as usize], c);
    }
    alg.from_coeffs(coeffs).expect("length n")
}

/// The deterministic generator family: φ images with provenance strings.
fn generator_family(alg: &GroupAlgebra) -> Vec<(AlgebraElement, String)> {
    let group = alg.group();
    let field = alg.field();
    let n = group.order() as u16;
    let basis: Vec<FieldElement> = field.basis().collect();
    let mut out: Vec<(AlgebraElement, String)> = Vec::new();

    let mut push_phi = |x: AlgebraElement| {
        debug_assert!(x.is_normalized_unit());
        let image = x.mul(&x.star()).expect("same carrier");
        out.push((image, format!("phi({x})")));
    };

    for i in 0..n {
        for j in (i + 1)..n {
            for &alpha in &basis {
                push_phi(one_plus(alg, &[(i, alpha), (j, alpha)]));
            }
        }
    }

    // 1 + αg(1+h) for h in the commutator subgroup
    let comm = group.commutator_subgroup();
    for &h in comm.members() {
        if h == 0 {
            continue;
        }
        for g in 0..n {
            let gh = group.mul(g, h);
            for &alpha in &basis {
                push_phi(one_plus(alg, &[(g, alpha), (gh, alpha)]));
            }
        }
    }

    // 1 + α(b + w_b) for b in the order-4 transversal, w_b an involution
    // that fails to commute with b (skipped where none exists)
    if let Ok(transversal) = group.order4_transversal() {
        for b in transversal {
            let w = (0..n).find(|&w| group.element_order(w) == 2 && !group.commutes(w, b));
            if let Some(w) = w {
                debug_assert_eq!(group.element_order(w), 2);
                debug_assert!(!group.commutes(w, b));
                for &alpha in &basis {
                    push_phi(one_plus(alg, &[(b, alpha), (w, alpha)]));
                }
            }
        }
    }

    out
}

fn random_normalized_unit(alg: &GroupAlgebra, rng: &mut SplitMix64) -> AlgebraElement {
    let field = alg.field();
    let q = field.order();
    let n = alg.group().order();
    let mut coeffs = vec![FieldElement::ZERO; n];
    let mut sum = FieldElement::ZERO;
    for c in coeffs.iter_mut().skip(1) {
        *c = field.element(rng.below(q)).expect("below q");
        sum = field.add(sum, *c);
    }
    coeffs[0] = field.sub(field.one(), sum);
    alg.from_coeffs(coeffs).expect("length n")
}

fn covered_class(alg: &GroupAlgebra) -> Result<NormalityClass, UnitaryError> {
    if alg.field().characteristic() != 2 {
        return Err(UnitaryError::OddCharacteristicRequired);
    }
    alg.group()
        .descriptor()
        .normality_class()
        .ok_or_else(|| UnitaryError::NotInCoveredClass(alg.group().descriptor().to_string()))
}

/// Computes S_K(G) as the product closure of the φ generator family.
pub fn symmetric_subgroup_closure(
    alg: &GroupAlgebra,
    opts: &ClosureOptions,
) -> Result<SymmetricSubgroup, UnitaryError> {
    covered_class(alg)?;
    let family = generator_family(alg);
    let mut rng = SplitMix64::new(opts.seed);

    let close =
        |family: &[(AlgebraElement, String)]| -> Result<(SubgroupSet, Vec<String>), UnitaryError> {
            if let Some(kernel) = alg.gf2() {
                let gens: Vec<(u64, String)> = family
                    .iter()
                    .map(|(x, p)| (alg.to_gf2_mask(x), p.clone()))
                    .collect();
                let (order, _, provenance) = close_commuting(
                    kernel.identity(),
                    &gens,
                    |a, b| kernel.mul(*a, *b),
                    opts.budget,
                )?;
                Ok((SubgroupSet::from_masks(alg.clone(), order), provenance))
            } else {
                let gens: Vec<(Vec<u32>, String)> = family
                    .iter()
                    .map(|(x, p)| (dense_key(x), p.clone()))
                    .collect();
                let mul = |a: &Vec<u32>, b: &Vec<u32>| -> Vec<u32> {
                    let xa = alg
                        .from_coeffs(
                            a.iter()
                                .map(|&c| alg.field().element(c as u64).expect("code"))
                                .collect(),
                        )
                        .expect("length");
                    let xb = alg
                        .from_coeffs(
                            b.iter()
                                .map(|&c| alg.field().element(c as u64).expect("code"))
                                .collect(),
                        )
                        .expect("length");
                    dense_key(&xa.mul(&xb).expect("same carrier"))
                };
                let identity = dense_key(&alg.one());
                let (order, _, provenance) = close_commuting(identity, &gens, mul, opts.budget)?;
                Ok((SubgroupSet::from_dense(alg.clone(), order), provenance))
            }
        };

    let mut family = family;
    let (mut elements, mut generators_used) = close(&family)?;

    let expected_len = opts.expected.as_ref().and_then(|e| e.decimal());
    if let Some(target) = expected_len {
        if (elements.len() as u64) < target {
            for _ in 0..opts.random_fallback {
                let x = random_normalized_unit(alg, &mut rng);
                let image = x.mul(&x.star())?;
                family.push((image, format!("phi({x})")));
            }
            (elements, generators_used) = close(&family)?;
        }
    }

    let shortfall = match expected_len {
        Some(target) if elements.len() as u64 != target => Some(format!(
            "closed subgroup has order {} but the formula expects {}",
            elements.len(),
            target
        )),
        _ => None,
    };

    verify_symmetric_central(alg, &elements)?;

    Ok(SymmetricSubgroup {
        elements,
        generators_used,
        shortfall,
    })
}

/// Every member must be symmetric, and (sampled) central in KG; centrality
/// against group elements suffices since they span the algebra.
fn verify_symmetric_central(
    alg: &GroupAlgebra,
    elements: &SubgroupSet,
) -> Result<(), UnitaryError> {
    let group = alg.group();
    let n = group.order() as u16;
    let len = elements.len();
    let stride = (len / 2048).max(1);

    if let (Some(kernel), Repr::Masks { order, .. }) = (alg.gf2(), &elements.repr) {
        for (idx, &m) in order.iter().enumerate() {
            if kernel.star(m) != m {
                return Err(UnitaryError::Invariant(format!(
                    "closure member {} is not symmetric",
                    alg.from_gf2_mask(m)
                )));
            }
            if idx % stride != 0 {
                continue;
            }
            for g in 0..n {
                let ge = 1u64 << g;
                if kernel.mul(m, ge) != kernel.mul(ge, m) {
                    return Err(UnitaryError::Invariant(format!(
                        "closure member {} is not central (fails at {})",
                        alg.from_gf2_mask(m),
                        group.name(g)
                    )));
                }
            }
        }
        return Ok(());
    }

    for (idx, y) in elements.iter().enumerate() {
        if y.star() != y {
            return Err(UnitaryError::Invariant(format!(
                "closure member {y} is not symmetric"
            )));
        }
        if idx % stride != 0 {
            continue;
        }
        for g in 0..n {
            let ge = alg.group_element(g);
            if y.mul(&ge)? != ge.mul(&y)? {
                return Err(UnitaryError::Invariant(format!(
                    "closure member {y} is not central (fails at {})",
                    group.name(g)
                )));
            }
        }
    }
    Ok(())
}

/// |V_*(KG)| = q^{|G|-1} / |S_K(G)|.
pub fn unitary_order_via_quotient(
    alg: &GroupAlgebra,
    opts: &ClosureOptions,
) -> Result<(UnitSetReport, SymmetricSubgroup), UnitaryError> {
    let start = std::time::Instant::now();
    let sk = symmetric_subgroup_closure(alg, opts)?;
    let q = alg.field().order();
    let n = alg.group().order() as u64;
    let v_order = FactoredOrder::pow_of(q, n - 1);
    let sk_order = FactoredOrder::rebase(sk.order(), q);
    let order = v_order.divide_exact(&sk_order, q).ok_or_else(|| {
        UnitaryError::Invariant(format!(
            "|S_K| = {} does not divide |V| = {}",
            sk_order, v_order
        ))
    })?;

    let mut notes = Vec::new();
    if let Some(s) = &sk.shortfall {
        notes.push(s.clone());
    }
    let report = UnitSetReport {
        descriptor: alg.group().descriptor().to_string(),
        field: alg.field().name(),
        method: Method::ClosureQuotient,
        order_decimal: order.decimal(),
        order,
        witnesses: Vec::new(),
        elapsed_s: Some(start.elapsed().as_secs_f64()),
        agreement: None,
        sk_order: Some(sk_order),
        notes,
    };
    Ok((report, sk))
}

#[cfg(test)]
mod tests {
    use super::super::tests::carrier;
    use super::*;

    fn closure_order(desc: &str, field: &str) -> u64 {
        let alg = carrier(desc, field);
        symmetric_subgroup_closure(&alg, &ClosureOptions::default())
            .unwrap()
            .order()
    }

    #[test]
    fn known_symmetric_subgroup_orders() {
        assert_eq!(closure_order("D(8)", "GF(2)"), 2);
        assert_eq!(closure_order("Q(8)", "GF(2)"), 2);
        assert_eq!(closure_order("ES(2)", "GF(2)"), 64);
        assert_eq!(closure_order("ESC4(1)", "GF(2)"), 16);
        assert_eq!(closure_order("D(16)", "GF(2)"), 8);
        assert_eq!(closure_order("SDI(A(2,4); b=2)", "GF(2)"), 4);
        assert_eq!(closure_order("D(8)", "GF(4)"), 4);
    }

    #[test]
    fn quotient_orders() {
        let alg = carrier("ES(2)", "GF(2)");
        let (report, sk) = unitary_order_via_quotient(&alg, &ClosureOptions::default()).unwrap();
        assert_eq!(report.order, FactoredOrder::pow_of(2, 25));
        assert_eq!(sk.order(), 64);
        assert!(report.notes.is_empty());

        let alg = carrier("D(8)", "GF(2)");
        let (report, _) = unitary_order_via_quotient(&alg, &ClosureOptions::default()).unwrap();
        assert_eq!(report.order, FactoredOrder::pow_of(2, 6));
        assert_eq!(report.order_decimal, Some(64));

        let alg = carrier("ESC4(1)", "GF(2)");
        let (report, _) = unitary_order_via_quotient(&alg, &ClosureOptions::default()).unwrap();
        assert_eq!(report.order, FactoredOrder::pow_of(2, 11));
    }

    #[test]
    fn quotient_matches_gf4() {
        let alg = carrier("D(8)", "GF(4)");
        let (report, _) = unitary_order_via_quotient(&alg, &ClosureOptions::default()).unwrap();
        assert_eq!(report.order, FactoredOrder::pow_of(4, 6));
        assert_eq!(report.order_decimal, Some(4096));
    }

    #[test]
    fn uncovered_classes_are_rejected() {
        let alg = carrier("Q(16)", "GF(2)");
        assert!(matches!(
            symmetric_subgroup_closure(&alg, &ClosureOptions::default()),
            Err(UnitaryError::NotInCoveredClass(_))
        ));
        let alg = carrier("C(3)", "GF(3)");
        assert!(matches!(
            symmetric_subgroup_closure(&alg, &ClosureOptions::default()),
            Err(UnitaryError::OddCharacteristicRequired)
        ));
    }

    #[test]
    fn closure_budget_is_enforced() {
        let alg = carrier("ESC4(2)", "GF(2)");
        let err = symmetric_subgroup_closure(
            &alg,
            &ClosureOptions {
                budget: 1 << 10,
                ..ClosureOptions::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, UnitaryError::ClosureBudget(_)));
    }

    #[test]
    fn members_are_phi_images() {
        // every member of the closed S_K is symmetric and φ of sampled units
        // lands inside it
        let alg = carrier("ES(2)", "GF(2)");
        let sk = symmetric_subgroup_closure(&alg, &ClosureOptions::default()).unwrap();
        let mut rng = SplitMix64::new(7);
        for _ in 0..200 {
            let x = random_normalized_unit(&alg, &mut rng);
            let image = x.mul(&x.star()).unwrap();
            assert!(sk.elements.contains(&image));
        }
    }

    #[test]
    fn expected_mismatch_is_reported_not_swallowed() {
        let alg = carrier("D(8)", "GF(2)");
        let sk = symmetric_subgroup_closure(
            &alg,
            &ClosureOptions {
                expected: Some(FactoredOrder::pow_of(2, 5)), // wrong on purpose
                random_fallback: 8,
                ..ClosureOptions::default()
            },
        )
        .unwrap();
        assert_eq!(sk.order(), 2);
        assert!(sk.shortfall.is_some());
    }
}
