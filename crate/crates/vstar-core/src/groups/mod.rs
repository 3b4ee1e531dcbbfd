//! Finite groups as explicit Cayley tables.
//!
//! Every group is an indexed multiplication table with the identity at index
//! 0, plus cached inverses, element orders, and display names. Tables are
//! validated on construction (identity, two-sided inverses, associativity —
//! exhaustive up to order 256, sampled above), which keeps every structural
//! query downstream exhaustive and exact.

mod build;
mod descriptor;

pub use build::{
    abelian, central_product, cyclic, dihedral, extraspecial_q8_power,
    extraspecial_q8_power_y_c4, heisenberg, quaternion, semidirect_inversion, CentralProduct,
    IteratedCentralProduct,
};
pub use descriptor::{parse_group_word, DescriptorParseError, GroupDescriptor, NormalityClass};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::num_util::SplitMix64;

/// Groups beyond this order are out of scope for the whole tool.
pub const MAX_GROUP_ORDER: usize = 1024;

const ASSOC_EXHAUSTIVE_LIMIT: usize = 256;
const ASSOC_SAMPLES: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("group order {0} exceeds the supported maximum {MAX_GROUP_ORDER}")]
    OrderTooLarge(usize),
    #[error("multiplication table is not a group: {0}")]
    BadTable(String),
    #[error("operation requires an abelian group")]
    NotAbelian,
    #[error("element index {0} out of range for a group of order {1}")]
    IndexOutOfRange(u16, usize),
    #[error("amalgamated element must be central: index {0}")]
    NonCentralAmalgam(u16),
    #[error("amalgamated elements must share an order of 2 or 4 (got {left} and {right})")]
    AmalgamOrderMismatch { left: u32, right: u32 },
    #[error("commutator subgroup has order {0}, expected order 2")]
    CommutatorNotOrderTwo(usize),
    #[error("b^2 must be an involution of the base group for an order-4 extension")]
    BadBSquare,
    #[error("extension element order must be 2 or 4, got {0}")]
    BadBOrder(u8),
    #[error("no element named {0:?} in this group")]
    UnknownElementName(String),
    #[error(transparent)]
    Parse(#[from] DescriptorParseError),
}

/// A finite group as a Cayley table. Immutable after construction; all
/// queries are pure and safe to share across threads.
#[derive(Clone)]
pub struct Group {
    n: usize,
    table: Vec<u16>,
    inverse: Vec<u16>,
    order_of: Vec<u32>,
    names: Vec<String>,
    descriptor: GroupDescriptor,
}

/// A subgroup given by its sorted member indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupHandle {
    members: Vec<u16>,
}

impl SubgroupHandle {
    pub fn members(&self) -> &[u16] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: u16) -> bool {
        self.members.binary_search(&g).is_ok()
    }
}

/// Square-root-of-identity counts used by the order formulas:
/// `a2` is |A[2]| and `squares2` is |A²[2]|.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbelianStats {
    pub a2: usize,
    pub squares2: usize,
}

impl Group {
    /// Validates a raw table and computes the cached structure.
    pub(crate) fn from_parts(
        table: Vec<u16>,
        names: Vec<String>,
        descriptor: GroupDescriptor,
    ) -> Result<Group, GroupError> {
        let n = names.len();
        if n == 0 {
            return Err(GroupError::BadTable("empty element set".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(GroupError::OrderTooLarge(n));
        }
        if table.len() != n * n {
            return Err(GroupError::BadTable("table size is not n*n".into()));
        }
        if table.iter().any(|&x| x as usize >= n) {
            return Err(GroupError::BadTable("entry out of range".into()));
        }

        let at = |i: usize, j: usize| table[i * n + j] as usize;

        for i in 0..n {
            if at(0, i) != i || at(i, 0) != i {
                return Err(GroupError::BadTable("index 0 is not an identity".into()));
            }
        }
        // rows and columns are permutations
        let mut seen_row = vec![false; n];
        let mut seen_col = vec![false; n];
        for i in 0..n {
            seen_row.iter_mut().for_each(|s| *s = false);
            seen_col.iter_mut().for_each(|s| *s = false);
            for j in 0..n {
                let r = at(i, j);
                let c = at(j, i);
                if seen_row[r] || seen_col[c] {
                    return Err(GroupError::BadTable(format!(
                        "row or column {i} repeats an entry"
                    )));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }

        if n <= ASSOC_EXHAUSTIVE_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = at(a, b);
                    for c in 0..n {
                        if at(ab, c) != at(a, at(b, c)) {
                            return Err(GroupError::BadTable(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = SplitMix64::new(0x5EED_0001);
            for _ in 0..ASSOC_SAMPLES {
                let a = rng.below(n as u64) as usize;
                let b = rng.below(n as u64) as usize;
                let c = rng.below(n as u64) as usize;
                if at(at(a, b), c) != at(a, at(b, c)) {
                    return Err(GroupError::BadTable(format!(
                        "associativity fails at ({a},{b},{c})"
                    )));
                }
            }
        }

        let mut inverse = vec![0u16; n];
        for i in 0..n {
            let j = (0..n)
                .find(|&j| at(i, j) == 0 && at(j, i) == 0)
                .ok_or_else(|| GroupError::BadTable(format!("no two-sided inverse for {i}")))?;
            inverse[i] = j as u16;
        }

        let mut order_of = vec![0u32; n];
        for i in 0..n {
            let mut x = i;
            let mut k = 1u32;
            while x != 0 {
                x = at(x, i);
                k += 1;
                if k as usize > n + 1 {
                    return Err(GroupError::BadTable(format!("element {i} has no order")));
                }
            }
            order_of[i] = k;
        }

        Ok(Group {
            n,
            table,
            inverse,
            order_of,
            names,
            descriptor,
        })
    }

    pub(crate) fn set_descriptor(&mut self, d: GroupDescriptor) {
        self.descriptor = d;
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> u16 {
        0
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.table[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn inverse_of(&self, a: u16) -> u16 {
        self.inverse[a as usize]
    }

    pub fn element_order(&self, a: u16) -> u32 {
        self.order_of[a as usize]
    }

    pub fn power(&self, a: u16, mut k: i64) -> u16 {
        let ord = self.element_order(a) as i64;
        k = k.rem_euclid(ord);
        let mut acc = 0u16;
        for _ in 0..k {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn name(&self, a: u16) -> &str {
        &self.names[a as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_by_name(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        (0..self.n as u16).map(|i| i)
    }

    pub fn commutes(&self, a: u16, b: u16) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n as u16).all(|a| (0..a).all(|b| self.commutes(a, b)))
    }

    /// h^{-1} g h
    pub fn conjugate(&self, g: u16, h: u16) -> u16 {
        self.mul(self.mul(self.inverse_of(h), g), h)
    }

    /// [g, h] = g^{-1} h^{-1} g h
    pub fn commutator(&self, g: u16, h: u16) -> u16 {
        self.mul(
            self.mul(self.inverse_of(g), self.inverse_of(h)),
            self.mul(g, h),
        )
    }

    pub fn center(&self) -> SubgroupHandle {
        let members = (0..self.n as u16)
            .filter(|&a| (0..self.n as u16).all(|b| self.commutes(a, b)))
            .collect();
        SubgroupHandle { members }
    }

    pub fn commutator_subgroup(&self) -> SubgroupHandle {
        let mut gens = Vec::new();
        for g in 0..self.n as u16 {
            for h in 0..self.n as u16 {
                let c = self.commutator(g, h);
                if c != 0 {
                    gens.push(c);
                }
            }
        }
        gens.sort_unstable();
        gens.dedup();
        self.subgroup_closure(&gens)
    }

    /// Frattini subgroup of a p-group: the closure of commutators and p-th
    /// powers. Only meaningful when the order is a prime power.
    pub fn frattini_subgroup(&self) -> Result<SubgroupHandle, GroupError> {
        let factors = crate::num_util::factorize(self.n as u64);
        let [(p, _)] = factors.as_slice() else {
            return Err(GroupError::InvalidParameter(
                "Frattini computation requires a prime-power order".into(),
            ));
        };
        let mut gens: Vec<u16> = self.commutator_subgroup().members().to_vec();
        for g in 0..self.n as u16 {
            gens.push(self.power(g, *p as i64));
        }
        gens.retain(|&g| g != 0);
        gens.sort_unstable();
        gens.dedup();
        Ok(self.subgroup_closure(&gens))
    }

    pub fn order_histogram(&self) -> BTreeMap<u32, usize> {
        let mut hist = BTreeMap::new();
        for &o in &self.order_of {
            *hist.entry(o).or_insert(0) += 1;
        }
        hist
    }

    pub fn exponent(&self) -> u32 {
        self.order_of.iter().fold(1u32, |acc, &o| {
            let g = gcd(acc as u64, o as u64) as u32;
            acc / g * o
        })
    }

    /// Smallest subgroup containing the generators: breadth-first closure of
    /// the identity under right multiplication.
    pub fn subgroup_closure(&self, generators: &[u16]) -> SubgroupHandle {
        let mut member = vec![false; self.n];
        member[0] = true;
        let mut queue = vec![0u16];
        while let Some(x) = queue.pop() {
            for &g in generators {
                let y = self.mul(x, g);
                if !member[y as usize] {
                    member[y as usize] = true;
                    queue.push(y);
                }
            }
        }
        let members = (0..self.n as u16).filter(|&i| member[i as usize]).collect();
        SubgroupHandle { members }
    }

    /// A transversal of the order-4 elements under translation by the
    /// commutator generator c: picks the smaller index from each pair {x, xc}.
    /// Requires the commutator subgroup to have order exactly 2.
    pub fn order4_transversal(&self) -> Result<Vec<u16>, GroupError> {
        let comm = self.commutator_subgroup();
        if comm.len() != 2 {
            return Err(GroupError::CommutatorNotOrderTwo(comm.len()));
        }
        let c = comm.members()[1];
        debug_assert_eq!(self.element_order(c), 2);
        let mut transversal = Vec::new();
        let mut total4 = 0usize;
        for x in 0..self.n as u16 {
            if self.element_order(x) != 4 {
                continue;
            }
            total4 += 1;
            let xc = self.mul(x, c);
            debug_assert_eq!(self.element_order(xc), 4);
            if x < xc {
                transversal.push(x);
            }
        }
        debug_assert_eq!(transversal.len() * 2, total4);
        Ok(transversal)
    }

    /// |A[2]| and |A²[2]| for an abelian group.
    pub fn abelian_stats(&self) -> Result<AbelianStats, GroupError> {
        if !self.is_abelian() {
            return Err(GroupError::NotAbelian);
        }
        let a2 = (0..self.n as u16)
            .filter(|&a| self.mul(a, a) == 0)
            .count();
        let mut squares: Vec<u16> = (0..self.n as u16).map(|a| self.mul(a, a)).collect();
        squares.sort_unstable();
        squares.dedup();
        let squares2 = squares
            .iter()
            .filter(|&&s| self.mul(s, s) == 0)
            .count();
        Ok(AbelianStats { a2, squares2 })
    }
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Group[{} of order {}]", self.descriptor, self.n)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_orders() {
        let c4 = cyclic(4).unwrap();
        let orders: Vec<u32> = (0..4).map(|i| c4.element_order(i)).collect();
        assert_eq!(orders, vec![1, 4, 2, 4]);
        assert_eq!(cyclic(2).unwrap().order(), 2);
        let c8 = cyclic(8).unwrap();
        let involutions = (0..8).filter(|&i| c8.element_order(i) == 2).count();
        assert_eq!(involutions, 1);
    }

    #[test]
    fn abelian_square_root_counts() {
        // independent oracle: walk the table directly
        let count_sqrt1 = |g: &Group| (0..g.order() as u16).filter(|&a| g.mul(a, a) == 0).count();

        let a24 = abelian(&[2, 4]).unwrap();
        assert_eq!(count_sqrt1(&a24), 4);
        assert_eq!(a24.abelian_stats().unwrap(), AbelianStats { a2: 4, squares2: 2 });

        let c4 = abelian(&[4]).unwrap();
        assert_eq!(count_sqrt1(&c4), 2);

        let klein = abelian(&[2, 2]).unwrap();
        assert_eq!(count_sqrt1(&klein), 4);
        assert_eq!(klein.abelian_stats().unwrap(), AbelianStats { a2: 4, squares2: 1 });

        let c8 = cyclic(8).unwrap();
        assert_eq!(c8.abelian_stats().unwrap(), AbelianStats { a2: 2, squares2: 2 });
    }

    #[test]
    fn abelian_stats_rejects_nonabelian() {
        let d8 = dihedral(8).unwrap();
        assert!(matches!(d8.abelian_stats(), Err(GroupError::NotAbelian)));
    }

    #[test]
    fn known_centers_and_commutators() {
        let q8 = quaternion(8).unwrap();
        let z = q8.center();
        let c = q8.commutator_subgroup();
        assert_eq!(z.len(), 2);
        assert_eq!(c.len(), 2);
        assert_eq!(z.members(), c.members());

        let d8 = dihedral(8).unwrap();
        assert_eq!(d8.center().len(), 2);
        assert_eq!(d8.commutator_subgroup().len(), 2);

        let c4 = cyclic(4).unwrap();
        assert_eq!(c4.center().len(), 4);
        assert_eq!(c4.commutator_subgroup().len(), 1);
    }

    #[test]
    fn closure_examples() {
        let q8 = quaternion(8).unwrap();
        let a = q8.element_by_name("a").unwrap();
        assert_eq!(q8.subgroup_closure(&[a]).len(), 4);
        assert_eq!(q8.subgroup_closure(&[]).members(), &[0]);

        // D8 with generators a^2 and b closes to the Klein subgroup {1, a^2, b, a^2*b}
        let d8 = dihedral(8).unwrap();
        let a2 = d8.element_by_name("a^2").unwrap();
        let b = d8.element_by_name("b").unwrap();
        let klein = d8.subgroup_closure(&[a2, b]);
        let expected = vec![
            0,
            a2,
            b,
            d8.mul(a2, b),
        ];
        let mut expected_sorted = expected.clone();
        expected_sorted.sort_unstable();
        assert_eq!(klein.members(), expected_sorted.as_slice());
    }

    #[test]
    fn transversal_of_q8() {
        let q8 = quaternion(8).unwrap();
        let l = q8.order4_transversal().unwrap();
        assert_eq!(l.len(), 3);
        // defining equations: L ∩ Lc = ∅ and L ∪ Lc = all order-4 elements
        let c = q8.commutator_subgroup().members()[1];
        let lc: Vec<u16> = l.iter().map(|&x| q8.mul(x, c)).collect();
        for x in &lc {
            assert!(!l.contains(x));
        }
        let mut union: Vec<u16> = l.iter().chain(lc.iter()).copied().collect();
        union.sort_unstable();
        let all4: Vec<u16> = (0..8).filter(|&i| q8.element_order(i) == 4).collect();
        assert_eq!(union, all4);
    }

    #[test]
    fn transversal_requires_order_two_commutator() {
        let c4 = cyclic(4).unwrap();
        assert!(c4.order4_transversal().is_err());
        let q16 = quaternion(16).unwrap();
        // commutator subgroup of Q16 is ⟨a^2⟩ of order 4
        assert!(matches!(
            q16.order4_transversal(),
            Err(GroupError::CommutatorNotOrderTwo(4))
        ));
    }

    #[test]
    fn bad_tables_are_rejected() {
        // constant table: not a group
        let table = vec![0u16; 4];
        let names = vec!["1".into(), "g".into()];
        assert!(Group::from_parts(table, names, GroupDescriptor::Cyclic(2)).is_err());

        // identity ok but associativity broken:
        // build C3 then corrupt one entry away from a latin-square violation
        let mut t = vec![0u16; 25];
        for i in 0..5u16 {
            for j in 0..5u16 {
                t[(i * 5 + j) as usize] = (i + j) % 5;
            }
        }
        t[2 * 5 + 3] = 1; // now row 2 repeats entry 1
        let names: Vec<String> = (0..5).map(|i| format!("g{i}")).collect();
        assert!(Group::from_parts(t, names, GroupDescriptor::Cyclic(5)).is_err());
    }

    #[test]
    fn exponent_and_histogram() {
        let q16 = quaternion(16).unwrap();
        let hist = q16.order_histogram();
        assert_eq!(hist[&1], 1);
        assert_eq!(hist[&2], 1);
        assert_eq!(hist[&4], 10);
        assert_eq!(hist[&8], 4);
        assert_eq!(q16.exponent(), 8);
    }
}
