//! Gaussian elimination over a runtime field, just enough to solve the
//! homogeneous systems that come up when slicing coefficient spaces.

use crate::field::{FieldElement, FieldSpec};

/// Basis of the nullspace of the homogeneous system `rows · x = 0` with
/// `nvars` unknowns. Rows are dense; the basis is returned in a deterministic
/// order (one vector per free column, ascending).
pub fn nullspace_basis(
    field: &FieldSpec,
    mut rows: Vec<Vec<FieldElement>>,
    nvars: usize,
) -> Vec<Vec<FieldElement>> {
    debug_assert!(rows.iter().all(|r| r.len() == nvars));
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;

    for col in 0..nvars {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = field
            .inv(rows[rank][col])
            .expect("pivot is nonzero by selection");
        for c in col..nvars {
            rows[rank][c] = field.mul(rows[rank][c], inv);
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col];
                for c in col..nvars {
                    let delta = field.mul(factor, rows[rank][c]);
                    rows[r][c] = field.sub(rows[r][c], delta);
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }

    let mut basis = Vec::with_capacity(nvars - rank);
    let is_pivot = {
        let mut v = vec![false; nvars];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    for free in 0..nvars {
        if is_pivot[free] {
            continue;
        }
        let mut vec = vec![FieldElement::ZERO; nvars];
        vec[free] = field.one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            // pivot var = -(row coefficient at the free column)
            vec[pc] = field.neg(rows[r][free]);
        }
        basis.push(vec);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solution_count_by_enumeration(
        field: &FieldSpec,
        rows: &[Vec<FieldElement>],
        nvars: usize,
    ) -> u64 {
        let q = field.order();
        let total = q.pow(nvars as u32);
        let mut count = 0;
        for t in 0..total {
            let mut x = Vec::with_capacity(nvars);
            let mut rest = t;
            for _ in 0..nvars {
                x.push(field.element(rest % q).unwrap());
                rest /= q;
            }
            let ok = rows.iter().all(|row| {
                let mut acc = FieldElement::ZERO;
                for (c, &v) in row.iter().zip(&x) {
                    acc = field.add(acc, field.mul(*c, v));
                }
                acc.is_zero()
            });
            if ok {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn nullspace_dimension_matches_enumeration() {
        let f3 = FieldSpec::gf(3).unwrap();
        let e = |v: u64| f3.element(v).unwrap();
        // α0 = 0, α1 + α2 = 0, α0 + α1 + α2 = 0  over GF(3)
        let rows = vec![
            vec![e(2), e(0), e(0)],
            vec![e(0), e(1), e(1)],
            vec![e(1), e(1), e(1)],
        ];
        let basis = nullspace_basis(&f3, rows.clone(), 3);
        assert_eq!(basis.len(), 1);
        assert_eq!(solution_count_by_enumeration(&f3, &rows, 3), 3);
    }

    #[test]
    fn random_systems_agree_with_enumeration() {
        let f4 = FieldSpec::gf(4).unwrap();
        let mut rng = crate::num_util::SplitMix64::new(7);
        for _ in 0..40 {
            let nvars = 1 + (rng.below(5) as usize);
            let nrows = rng.below(5) as usize;
            let rows: Vec<Vec<FieldElement>> = (0..nrows)
                .map(|_| {
                    (0..nvars)
                        .map(|_| f4.element(rng.below(4)).unwrap())
                        .collect()
                })
                .collect();
            let basis = nullspace_basis(&f4, rows.clone(), nvars);
            let expect = solution_count_by_enumeration(&f4, &rows, nvars);
            assert_eq!(4u64.pow(basis.len() as u32), expect);
            // every basis vector solves the system
            for b in &basis {
                for row in &rows {
                    let mut acc = FieldElement::ZERO;
                    for (c, v) in row.iter().zip(b) {
                        acc = f4.add(acc, f4.mul(*c, *v));
                    }
                    assert!(acc.is_zero());
                }
            }
        }
    }
}
