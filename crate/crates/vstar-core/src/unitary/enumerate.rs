//! Exhaustive enumeration of normalized units and the brute-force unitary
//! count.
//!
//! The q^{|G|-1} normalized units are ranked lexicographically by their
//! coefficients on the non-identity group elements (element 1 most
//! significant); the identity coefficient is forced by the augmentation
//! constraint. Ranks make partitioning trivial: worker w of W takes one
//! contiguous rank range, and merged results do not depend on scheduling.

use std::time::Instant;

use crate::algebra::{AlgebraElement, GroupAlgebra};
use crate::field::FieldElement;

use super::report::{FactoredOrder, Method, UnitSetReport};
use super::UnitaryError;

pub const DEFAULT_BUDGET: u64 = 1 << 22;

const MAX_WITNESSES: usize = 8;

/// q^{|G|-1}, saturating at u128::MAX.
pub fn normalized_unit_total(alg: &GroupAlgebra) -> u128 {
    let q = alg.field().order() as u128;
    let n = alg.group().order() as u32;
    q.checked_pow(n - 1).unwrap_or(u128::MAX)
}

/// The normalized unit at a given rank.
pub fn normalized_unit_at(alg: &GroupAlgebra, rank: u64) -> AlgebraElement {
    let field = alg.field();
    let n = alg.group().order();
    let q = field.order();
    let mut coeffs = vec![FieldElement::ZERO; n];
    let mut rest = rank;
    let mut sum = FieldElement::ZERO;
    // least-significant digit is the last element; element 1 most significant
    for i in (1..n).rev() {
        let c = field.element(rest % q).expect("digit below q");
        rest /= q;
        coeffs[i] = c;
        sum = field.add(sum, c);
    }
    debug_assert_eq!(rest, 0, "rank out of range");
    coeffs[0] = field.sub(field.one(), sum);
    alg.from_coeffs(coeffs).expect("length n")
}

/// A contiguous rank slice of the enumeration, for partitioned iteration.
pub fn normalized_units_range(
    alg: &GroupAlgebra,
    lo: u64,
    hi: u64,
) -> impl Iterator<Item = AlgebraElement> + '_ {
    (lo..hi).map(move |rank| normalized_unit_at(alg, rank))
}

/// Iterator over every normalized unit, budget-checked.
pub fn enumerate_normalized_units(
    alg: &GroupAlgebra,
    budget: u64,
) -> Result<impl Iterator<Item = AlgebraElement> + '_, UnitaryError> {
    let total = normalized_unit_total(alg);
    if total > budget as u128 {
        return Err(UnitaryError::BudgetExceeded {
            required: total,
            budget,
        });
    }
    Ok(normalized_units_range(alg, 0, total as u64))
}

#[derive(Clone, Copy, Debug)]
pub struct BruteforceOptions {
    /// maximum candidate count q^{|G|-1}
    pub budget: u64,
    pub workers: usize,
}

impl Default for BruteforceOptions {
    fn default() -> Self {
        BruteforceOptions {
            budget: DEFAULT_BUDGET,
            workers: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

/// Counts x with χ(x) = 1 and x·x* = 1 over one rank range; also returns the
/// first few non-identity witness ranks.
fn count_range(alg: &GroupAlgebra, lo: u64, hi: u64) -> (u64, Vec<u64>) {
    let mut count = 0u64;
    let mut witnesses = Vec::new();

    if let Some(kernel) = alg.gf2() {
        let n = kernel.n();
        for rank in lo..hi {
            // bit i of the mask = coefficient of g_i; rank digit (n-1-i) feeds
            // element i, identity bit forced by parity
            let mut mask = 0u64;
            for i in 1..n {
                if rank >> (n - 1 - i) & 1 == 1 {
                    mask |= 1u64 << i;
                }
            }
            mask |= 1 ^ (mask.count_ones() as u64 & 1);
            if kernel.xx_star(mask) == 1 {
                count += 1;
                if rank != 0 && witnesses.len() < MAX_WITNESSES {
                    witnesses.push(rank);
                }
            }
        }
        return (count, witnesses);
    }

    let field = alg.field();
    let group = alg.group();
    let n = group.order();
    let q = field.order();
    let prod_inv = alg.prod_inv();
    let mut coeffs = vec![FieldElement::ZERO; n];
    let mut scratch = vec![FieldElement::ZERO; n];
    let mut support = Vec::with_capacity(n);

    for rank in lo..hi {
        let mut rest = rank;
        let mut sum = FieldElement::ZERO;
        for i in (1..n).rev() {
            let c = field.element(rest % q).expect("digit below q");
            rest /= q;
            coeffs[i] = c;
            sum = field.add(sum, c);
        }
        coeffs[0] = field.sub(field.one(), sum);

        scratch.iter_mut().for_each(|c| *c = FieldElement::ZERO);
        support.clear();
        support.extend((0..n).filter(|&i| !coeffs[i].is_zero()));
        for &i in &support {
            let ci = coeffs[i];
            let row = &prod_inv[i * n..(i + 1) * n];
            for &j in &support {
                let k = row[j] as usize;
                scratch[k] = field.add(scratch[k], field.mul(ci, coeffs[j]));
            }
        }
        let unitary = scratch[0] == FieldElement::ONE
            && scratch[1..].iter().all(|c| c.is_zero());
        if unitary {
            count += 1;
            if rank != 0 && witnesses.len() < MAX_WITNESSES {
                witnesses.push(rank);
            }
        }
    }
    (count, witnesses)
}

/// Exact |V_*(KG)| by filtering every normalized unit, partitioned across
/// workers; counts are summed and witnesses merged in rank order.
pub fn bruteforce_unitary(
    alg: &GroupAlgebra,
    opts: &BruteforceOptions,
) -> Result<UnitSetReport, UnitaryError> {
    let start = Instant::now();
    let total = normalized_unit_total(alg);
    if total > opts.budget as u128 {
        return Err(UnitaryError::BudgetExceeded {
            required: total,
            budget: opts.budget,
        });
    }
    let total = total as u64;
    let workers = opts.workers.clamp(1, 64).min(total.max(1) as usize);

    let chunk = total.div_ceil(workers as u64);
    let ranges: Vec<(u64, u64)> = (0..workers as u64)
        .map(|w| (w * chunk, ((w + 1) * chunk).min(total)))
        .filter(|(lo, hi)| lo < hi)
        .collect();

    let results: Vec<(u64, Vec<u64>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(lo, hi)| scope.spawn(move || count_range(alg, lo, hi)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker")).collect()
    });

    let mut count = 0u64;
    let mut witness_ranks = Vec::new();
    for (c, ws) in results {
        count += c;
        for w in ws {
            if witness_ranks.len() < MAX_WITNESSES {
                witness_ranks.push(w);
            }
        }
    }

    let witnesses = witness_ranks
        .into_iter()
        .map(|rank| normalized_unit_at(alg, rank).format())
        .collect();

    let q = alg.field().order();
    Ok(UnitSetReport {
        descriptor: alg.group().descriptor().to_string(),
        field: alg.field().name(),
        method: Method::Bruteforce,
        order: FactoredOrder::rebase(count, q),
        order_decimal: Some(count),
        witnesses,
        elapsed_s: Some(start.elapsed().as_secs_f64()),
        agreement: None,
        sk_order: None,
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::carrier;
    use super::*;

    fn brute(desc: &str, field: &str) -> u64 {
        let alg = carrier(desc, field);
        bruteforce_unitary(&alg, &BruteforceOptions::default())
            .unwrap()
            .order_decimal
            .unwrap()
    }

    #[test]
    fn enumeration_counts_are_forced() {
        let alg = carrier("Q(8)", "GF(2)");
        assert_eq!(normalized_unit_total(&alg), 128);
        let mut seen = std::collections::HashSet::new();
        for x in enumerate_normalized_units(&alg, 1 << 10).unwrap() {
            assert!(x.is_normalized_unit());
            seen.insert(alg.to_gf2_mask(&x));
        }
        assert_eq!(seen.len(), 128);

        assert_eq!(normalized_unit_total(&carrier("D(8)", "GF(4)")), 16384);
        let c2 = carrier("C(2)", "GF(2)");
        let units: Vec<_> = enumerate_normalized_units(&c2, 16).unwrap().collect();
        assert_eq!(units.len(), 2);
        assert!(units[0].is_one());
        assert_eq!(units[1], c2.group_element(1));
    }

    #[test]
    fn budget_is_enforced() {
        let alg = carrier("ES(2)", "GF(2)");
        let err = bruteforce_unitary(
            &alg,
            &BruteforceOptions {
                budget: DEFAULT_BUDGET,
                workers: 2,
            },
        )
        .unwrap_err();
        assert!(matches!(err, UnitaryError::BudgetExceeded { required, .. }
            if required == 1u128 << 31));
    }

    #[test]
    fn dihedral_counts() {
        assert_eq!(brute("D(8)", "GF(2)"), 64);
        assert_eq!(brute("D(16)", "GF(2)"), 4096);
    }

    #[test]
    fn quaternion_counts() {
        assert_eq!(brute("Q(8)", "GF(2)"), 64);
        assert_eq!(brute("Q(16)", "GF(2)"), 1024);
    }

    #[test]
    fn odd_characteristic_counts() {
        assert_eq!(brute("C(3)", "GF(3)"), 3);
        assert_eq!(brute("C(9)", "GF(3)"), 81);
    }

    #[test]
    fn abelian_counts() {
        assert_eq!(brute("C(2)", "GF(2)"), 2);
        assert_eq!(brute("C(4)", "GF(2)"), 8);
        assert_eq!(brute("A(2,2)", "GF(2)"), 8);
    }

    #[test]
    fn worker_split_does_not_change_results() {
        let alg = carrier("D(8)", "GF(2)");
        let base = bruteforce_unitary(
            &alg,
            &BruteforceOptions {
                budget: 1 << 20,
                workers: 1,
            },
        )
        .unwrap();
        for workers in [2, 3, 7, 64] {
            let r = bruteforce_unitary(
                &alg,
                &BruteforceOptions {
                    budget: 1 << 20,
                    workers,
                },
            )
            .unwrap();
            assert_eq!(r.order_decimal, base.order_decimal);
            assert_eq!(r.witnesses, base.witnesses);
        }
    }

    #[test]
    fn general_path_agrees_with_kernel_path() {
        // same group once over GF(2) (kernel) and once over GF(4) general;
        // also checks the GF(2) general path on a kernel-free carrier built
        // by exceeding the mask width is unnecessary: instead compare D(8)
        // counts against the documented values per field
        assert_eq!(brute("D(8)", "GF(4)"), 4096); // 4^6
        let alg = carrier("D(8)", "GF(2)");
        // force the general path by calling count_range logic through
        // elements: recompute the unitary count without the kernel
        let mut count = 0;
        for x in enumerate_normalized_units(&alg, 1 << 10).unwrap() {
            if x.mul(&x.star()).unwrap().is_one() {
                count += 1;
            }
        }
        assert_eq!(count, 64);
    }

    #[test]
    fn witnesses_are_nonidentity_unitaries() {
        let alg = carrier("Q(8)", "GF(2)");
        let report = bruteforce_unitary(&alg, &BruteforceOptions::default()).unwrap();
        assert_eq!(report.witnesses.len(), 8);
        for w in &report.witnesses {
            let x = alg.parse_element(w).unwrap();
            assert!(!x.is_one());
            assert!(super::super::is_unitary(&x).unwrap());
        }
    }
}
