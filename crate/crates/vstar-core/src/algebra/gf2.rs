//! Bit-packed kernel for GF(2) coefficients on groups of order ≤ 64.
//!
//! An element is a u64 mask (bit i = coefficient of g_i); one row of the
//! Cayley table becomes a bit permutation, applied bytewise through
//! precomputed tables, so a product is an XOR accumulation over the set bits
//! of the left factor. This is the throughput path for unit enumeration.

use crate::groups::Group;

pub(crate) struct Gf2Kernel {
    n: usize,
    nbytes: usize,
    /// mul_tab[(i·nbytes + bpos)·256 + byte] = mask of g_i · {g_j : j ∈ byte}
    mul_tab: Vec<u64>,
    /// same layout for rows of g_i · g_j^{-1}
    mulinv_tab: Vec<u64>,
    /// star_tab[bpos·256 + byte] = mask of {g_j^{-1} : j ∈ byte}
    star_tab: Vec<u64>,
}

impl Gf2Kernel {
    pub fn new(group: &Group) -> Gf2Kernel {
        let n = group.order();
        assert!(n <= 64);
        let nbytes = n.div_ceil(8);

        let build_rows = |map: &dyn Fn(u16, u16) -> u16| -> Vec<u64> {
            let mut tab = vec![0u64; n * nbytes * 256];
            for i in 0..n as u16 {
                for bpos in 0..nbytes {
                    for byte in 0..256usize {
                        let mut mask = 0u64;
                        for bit in 0..8 {
                            let j = bpos * 8 + bit;
                            if j < n && byte >> bit & 1 == 1 {
                                mask |= 1u64 << map(i, j as u16);
                            }
                        }
                        tab[(i as usize * nbytes + bpos) * 256 + byte] = mask;
                    }
                }
            }
            tab
        };

        let mul_tab = build_rows(&|i, j| group.mul(i, j));
        let mulinv_tab = build_rows(&|i, j| group.mul(i, group.inverse_of(j)));

        let mut star_tab = vec![0u64; nbytes * 256];
        for bpos in 0..nbytes {
            for byte in 0..256usize {
                let mut mask = 0u64;
                for bit in 0..8 {
                    let j = bpos * 8 + bit;
                    if j < n && byte >> bit & 1 == 1 {
                        mask |= 1u64 << group.inverse_of(j as u16);
                    }
                }
                star_tab[bpos * 256 + byte] = mask;
            }
        }

        Gf2Kernel {
            n,
            nbytes,
            mul_tab,
            mulinv_tab,
            star_tab,
        }
    }

    #[inline]
    fn apply_row(&self, tab: &[u64], row: usize, mask: u64) -> u64 {
        let base = row * self.nbytes * 256;
        let mut out = 0u64;
        for bpos in 0..self.nbytes {
            let byte = (mask >> (8 * bpos)) & 0xFF;
            out ^= tab[base + bpos * 256 + byte as usize];
        }
        out
    }

    pub fn identity(&self) -> u64 {
        1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// x · y as masks.
    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out ^= self.apply_row(&self.mul_tab, i, y);
        }
        out
    }

    /// x · x* in one pass: XOR of the g_i·g_j^{-1} rows over the set bits.
    #[inline]
    pub fn xx_star(&self, x: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out ^= self.apply_row(&self.mulinv_tab, i, x);
        }
        out
    }

    #[inline]
    pub fn star(&self, x: u64) -> u64 {
        let mut out = 0u64;
        for bpos in 0..self.nbytes {
            let byte = (x >> (8 * bpos)) & 0xFF;
            out ^= self.star_tab[bpos * 256 + byte as usize];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use crate::algebra::GroupAlgebra;
    use crate::field::FieldSpec;
    use crate::groups::{self, GroupDescriptor};
    use crate::num_util::SplitMix64;

    fn carrier(desc: &str) -> GroupAlgebra {
        let g = GroupDescriptor::parse(desc).unwrap().build().unwrap();
        let f = FieldSpec::gf(2).unwrap();
        GroupAlgebra::new(Arc::new(g), Arc::new(f)).unwrap()
    }

    #[test]
    fn kernel_agrees_with_general_path() {
        for desc in ["C(4)", "D(8)", "Q(8)", "A(2,4)", "ESC4(1)", "ES(2)"] {
            let alg = carrier(desc);
            let k = alg.gf2().expect("kernel available");
            let n = alg.group().order();
            let mut rng = SplitMix64::new(0xBEEF);
            let bound = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
            for _ in 0..200 {
                let xm = rng.next_u64() & bound;
                let ym = rng.next_u64() & bound;
                let x = alg.from_gf2_mask(xm);
                let y = alg.from_gf2_mask(ym);

                let prod = x.mul(&y).unwrap();
                assert_eq!(alg.to_gf2_mask(&prod), k.mul(xm, ym), "{desc}");

                let xxs = x.mul(&x.star()).unwrap();
                assert_eq!(alg.to_gf2_mask(&xxs), k.xx_star(xm), "{desc}");

                assert_eq!(alg.to_gf2_mask(&x.star()), k.star(xm), "{desc}");
            }
        }
    }

    #[test]
    fn groups_by_elements_roundtrip() {
        let alg = carrier("Q(8)");
        let k = alg.gf2().unwrap();
        let g = alg.group();
        for i in 0..8u16 {
            for j in 0..8u16 {
                assert_eq!(k.mul(1 << i, 1 << j), 1u64 << g.mul(i, j));
            }
        }
        assert_eq!(k.identity(), 1);
    }

    #[test]
    fn kernel_only_for_small_gf2() {
        let g = groups::cyclic(4).unwrap();
        let f9 = FieldSpec::gf(3).unwrap();
        let alg = GroupAlgebra::new(Arc::new(groups::cyclic(9).unwrap()), Arc::new(f9)).unwrap();
        assert!(alg.gf2().is_none());
        let f2 = FieldSpec::gf(2).unwrap();
        let alg = GroupAlgebra::new(Arc::new(g), Arc::new(f2)).unwrap();
        assert!(alg.gf2().is_some());
    }
}
