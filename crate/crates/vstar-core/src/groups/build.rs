//! Group constructors: cyclic and abelian building blocks, inversion
//! extensions, central products, and the iterated quaternion products.

use super::descriptor::GroupDescriptor;
use super::{Group, GroupError, MAX_GROUP_ORDER};

/// Cyclic group of order n, generator at index 1.
pub fn cyclic(n: u32) -> Result<Group, GroupError> {
    cyclic_named(n, "a", GroupDescriptor::Cyclic(n))
}

pub(crate) fn cyclic_named(
    n: u32,
    generator: &str,
    descriptor: GroupDescriptor,
) -> Result<Group, GroupError> {
    if n == 0 {
        return Err(GroupError::InvalidParameter("cyclic order must be >= 1".into()));
    }
    let n = n as usize;
    if n > MAX_GROUP_ORDER {
        return Err(GroupError::OrderTooLarge(n));
    }
    let mut table = vec![0u16; n * n];
    for i in 0..n {
        for j in 0..n {
            table[i * n + j] = ((i + j) % n) as u16;
        }
    }
    let names = (0..n).map(|i| power_name(generator, i)).collect();
    Group::from_parts(table, names, descriptor)
}

fn power_name(generator: &str, exp: usize) -> String {
    match exp {
        0 => "1".to_string(),
        1 => generator.to_string(),
        e => format!("{generator}^{e}"),
    }
}

/// Direct product of cyclic groups of the given orders.
pub fn abelian(invariants: &[u32]) -> Result<Group, GroupError> {
    if invariants.is_empty() {
        return Err(GroupError::InvalidParameter(
            "abelian group needs at least one invariant".into(),
        ));
    }
    if invariants.iter().any(|&k| k < 2) {
        return Err(GroupError::InvalidParameter(
            "abelian invariants must be >= 2".into(),
        ));
    }
    let n: usize = invariants.iter().map(|&k| k as usize).product();
    if n > MAX_GROUP_ORDER {
        return Err(GroupError::OrderTooLarge(n));
    }
    let k = invariants.len();
    let gen_name = |f: usize| {
        if k == 1 {
            "a".to_string()
        } else {
            format!("a{}", f + 1)
        }
    };

    // mixed-radix indexing, factor 0 least significant
    let decode = |mut idx: usize| -> Vec<usize> {
        invariants
            .iter()
            .map(|&m| {
                let d = idx % m as usize;
                idx /= m as usize;
                d
            })
            .collect()
    };
    let encode = |digits: &[usize]| -> usize {
        let mut idx = 0;
        for (f, &d) in digits.iter().enumerate().rev() {
            idx = idx * invariants[f] as usize + d;
        }
        idx
    };

    let mut table = vec![0u16; n * n];
    for i in 0..n {
        let di = decode(i);
        for j in 0..n {
            let dj = decode(j);
            let sum: Vec<usize> = di
                .iter()
                .zip(&dj)
                .zip(invariants)
                .map(|((&a, &b), &m)| (a + b) % m as usize)
                .collect();
            table[i * n + j] = encode(&sum) as u16;
        }
    }
    let names = (0..n)
        .map(|i| {
            let digits = decode(i);
            let parts: Vec<String> = digits
                .iter()
                .enumerate()
                .filter(|&(_, &d)| d > 0)
                .map(|(f, &d)| power_name(&gen_name(f), d))
                .collect();
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("*")
            }
        })
        .collect();
    Group::from_parts(table, names, GroupDescriptor::Abelian(invariants.to_vec()))
}

/// Extension of an abelian group A by an element b that inverts every element
/// of A. Elements are pairs (a, b^i) with i in {0, 1}; index = i·|A| + a.
///
/// `b_order` 2 forces b² = 1; `b_order` 4 requires `b_square` to be a
/// nonidentity involution of A.
pub fn semidirect_inversion(
    base: &Group,
    b_order: u8,
    b_square: u16,
) -> Result<Group, GroupError> {
    let descriptor = GroupDescriptor::SemidirectInversion {
        base: Box::new(base.descriptor().clone()),
        b_order,
        b_square: (b_order == 4).then(|| base.name(b_square).to_string()),
    };
    semidirect_inversion_named(base, b_order, b_square, "b", descriptor)
}

pub(crate) fn semidirect_inversion_named(
    base: &Group,
    b_order: u8,
    b_square: u16,
    b_name: &str,
    descriptor: GroupDescriptor,
) -> Result<Group, GroupError> {
    if !base.is_abelian() {
        return Err(GroupError::NotAbelian);
    }
    let na = base.order();
    if b_square as usize >= na {
        return Err(GroupError::IndexOutOfRange(b_square, na));
    }
    match b_order {
        2 => {
            if b_square != 0 {
                return Err(GroupError::BadBSquare);
            }
        }
        4 => {
            if b_square == 0 || base.mul(b_square, b_square) != 0 {
                return Err(GroupError::BadBSquare);
            }
        }
        other => return Err(GroupError::BadBOrder(other)),
    }
    let n = 2 * na;
    if n > MAX_GROUP_ORDER {
        return Err(GroupError::OrderTooLarge(n));
    }

    // (a, b^i)(a', b^j) = (a · a'^(±1) · b_square^⌊(i+j)/2⌋, b^((i+j) mod 2))
    let mut table = vec![0u16; n * n];
    for i in 0..2usize {
        for a in 0..na {
            for j in 0..2usize {
                for a2 in 0..na {
                    let rhs = if i == 1 {
                        base.inverse_of(a2 as u16)
                    } else {
                        a2 as u16
                    };
                    let mut part = base.mul(a as u16, rhs);
                    if i + j == 2 {
                        part = base.mul(part, b_square);
                    }
                    let idx = (i * na + a) * n + (j * na + a2);
                    table[idx] = (((i + j) % 2) * na + part as usize) as u16;
                }
            }
        }
    }

    let mut names: Vec<String> = base.names().to_vec();
    for a in 0..na {
        let an = base.name(a as u16);
        names.push(if an == "1" {
            b_name.to_string()
        } else {
            format!("{an}*{b_name}")
        });
    }

    let group = Group::from_parts(table, names, descriptor)?;
    // the factor-set construction must yield an inverting extension
    debug_assert!((0..na as u16).all(|a| {
        let b = na as u16;
        group.conjugate(a, b) == group.inverse_of(a)
    }));
    Ok(group)
}

/// Dihedral group of order 2^k (k >= 2): an inversion extension of C_{2^{k-1}}
/// by an element of order 2.
pub fn dihedral(order: u32) -> Result<Group, GroupError> {
    if order < 4 || !order.is_power_of_two() {
        return Err(GroupError::InvalidParameter(format!(
            "dihedral order must be a power of two >= 4, got {order}"
        )));
    }
    let base = cyclic(order / 2)?;
    semidirect_inversion_named(&base, 2, 0, "b", GroupDescriptor::Dihedral(order))
}

/// Generalized quaternion group of order 2^k (k >= 3): the inversion
/// extension of C_{2^{k-1}} with b² = a^{2^{k-2}}.
pub fn quaternion(order: u32) -> Result<Group, GroupError> {
    if order < 8 || !order.is_power_of_two() {
        return Err(GroupError::InvalidParameter(format!(
            "quaternion order must be a power of two >= 8, got {order}"
        )));
    }
    quaternion_named(order, "a", "b", GroupDescriptor::Quaternion(order))
}

fn quaternion_named(
    order: u32,
    a_name: &str,
    b_name: &str,
    descriptor: GroupDescriptor,
) -> Result<Group, GroupError> {
    let half = order / 2;
    let base = cyclic_named(half, a_name, GroupDescriptor::Cyclic(half))?;
    let b_square = (half / 2) as u16; // a^{2^{k-2}}, the unique involution of the base
    semidirect_inversion_named(&base, 4, b_square, b_name, descriptor)
}

/// A central product G Y H with the factor embeddings retained.
pub struct CentralProduct {
    pub group: Group,
    /// index in the product of each element of the left factor
    pub left_embedding: Vec<u16>,
    /// index in the product of each element of the right factor
    pub right_embedding: Vec<u16>,
}

/// Quotient of G×H by the diagonal ⟨(z_g, z_h^{-1})⟩, identifying the two
/// designated central elements. Coset representatives are the pairs of least
/// direct-product index, which fixes the element numbering.
pub fn central_product(
    g: &Group,
    h: &Group,
    z_g: u16,
    z_h: u16,
) -> Result<CentralProduct, GroupError> {
    let (ng, nh) = (g.order(), h.order());
    if z_g as usize >= ng {
        return Err(GroupError::IndexOutOfRange(z_g, ng));
    }
    if z_h as usize >= nh {
        return Err(GroupError::IndexOutOfRange(z_h, nh));
    }
    let (og, oh) = (g.element_order(z_g), h.element_order(z_h));
    if og != oh || !(og == 2 || og == 4) {
        return Err(GroupError::AmalgamOrderMismatch { left: og, right: oh });
    }
    if !g.center().contains(z_g) {
        return Err(GroupError::NonCentralAmalgam(z_g));
    }
    if !h.center().contains(z_h) {
        return Err(GroupError::NonCentralAmalgam(z_h));
    }
    let n = ng * nh / og as usize;
    if n > MAX_GROUP_ORDER {
        return Err(GroupError::OrderTooLarge(n));
    }

    let pair = |a: u16, b: u16| a as usize * nh + b as usize;
    let z_h_inv = h.inverse_of(z_h);
    // canonical representative of the coset of (a, b)
    let canon = |a: u16, b: u16| -> usize {
        let mut best = pair(a, b);
        let (mut x, mut y) = (a, b);
        for _ in 1..og {
            x = g.mul(x, z_g);
            y = h.mul(y, z_h_inv);
            best = best.min(pair(x, y));
        }
        best
    };

    let mut reps: Vec<usize> = Vec::with_capacity(n);
    for a in 0..ng as u16 {
        for b in 0..nh as u16 {
            let key = canon(a, b);
            if key == pair(a, b) {
                reps.push(key);
            }
        }
    }
    reps.sort_unstable();
    if reps.len() != n {
        return Err(GroupError::BadTable(format!(
            "central product rep count {} != {}",
            reps.len(),
            n
        )));
    }
    let mut rep_index = vec![u16::MAX; ng * nh];
    for (i, &r) in reps.iter().enumerate() {
        rep_index[r] = i as u16;
    }
    let index_of = |a: u16, b: u16| rep_index[canon(a, b)];

    let mut table = vec![0u16; n * n];
    for (i, &ri) in reps.iter().enumerate() {
        let (ai, bi) = ((ri / nh) as u16, (ri % nh) as u16);
        for (j, &rj) in reps.iter().enumerate() {
            let (aj, bj) = ((rj / nh) as u16, (rj % nh) as u16);
            table[i * n + j] = index_of(g.mul(ai, aj), h.mul(bi, bj));
        }
    }

    let names = reps
        .iter()
        .map(|&r| {
            let (a, b) = ((r / nh) as u16, (r % nh) as u16);
            let (an, bn) = (g.name(a), h.name(b));
            match (an, bn) {
                ("1", "1") => "1".to_string(),
                (an, "1") => an.to_string(),
                ("1", bn) => bn.to_string(),
                (an, bn) => format!("{an}*{bn}"),
            }
        })
        .collect();

    let descriptor = GroupDescriptor::CentralProduct {
        left: Box::new(g.descriptor().clone()),
        right: Box::new(h.descriptor().clone()),
        z_left: Some(g.name(z_g).to_string()),
        z_right: Some(h.name(z_h).to_string()),
    };
    let group = Group::from_parts(table, names, descriptor)?;
    let left_embedding = (0..ng as u16).map(|a| index_of(a, 0)).collect();
    let right_embedding = (0..nh as u16).map(|b| index_of(0, b)).collect();
    Ok(CentralProduct {
        group,
        left_embedding,
        right_embedding,
    })
}

/// An iterated central product with the embedding of every factor retained.
pub struct IteratedCentralProduct {
    pub group: Group,
    pub factor_embeddings: Vec<Vec<u16>>,
}

/// The unique nonidentity central involution, when there is exactly one.
fn central_involution(g: &Group) -> Result<u16, GroupError> {
    let center = g.center();
    let invs: Vec<u16> = center
        .members()
        .iter()
        .copied()
        .filter(|&z| g.element_order(z) == 2)
        .collect();
    match invs.as_slice() {
        [z] => Ok(*z),
        _ => Err(GroupError::InvalidParameter(format!(
            "expected a unique central involution, found {}",
            invs.len()
        ))),
    }
}

/// The central product of n copies of the quaternion group of order 8 over
/// their shared central involution; order 2^{2n+1}, center = commutator
/// subgroup of order 2.
pub fn extraspecial_q8_power(n: u32) -> Result<IteratedCentralProduct, GroupError> {
    if n == 0 {
        return Err(GroupError::InvalidParameter("need at least one factor".into()));
    }
    let named = |k: u32| -> (String, String) {
        if n == 1 {
            ("a".into(), "b".into())
        } else {
            (format!("a{k}"), format!("b{k}"))
        }
    };
    let (an, bn) = named(1);
    let mut acc = quaternion_named(8, &an, &bn, GroupDescriptor::ExtraspecialQ8(1))?;
    let mut embeddings: Vec<Vec<u16>> = vec![(0..8u16).collect()];
    for k in 2..=n {
        let (an, bn) = named(k);
        let factor = quaternion_named(8, &an, &bn, GroupDescriptor::Quaternion(8))?;
        let z_acc = central_involution(&acc)?;
        let z_factor = central_involution(&factor)?;
        let cp = central_product(&acc, &factor, z_acc, z_factor)?;
        for emb in &mut embeddings {
            for idx in emb.iter_mut() {
                *idx = cp.left_embedding[*idx as usize];
            }
        }
        embeddings.push(cp.right_embedding);
        acc = cp.group;
    }
    acc.set_descriptor(GroupDescriptor::ExtraspecialQ8(n));
    Ok(IteratedCentralProduct {
        group: acc,
        factor_embeddings: embeddings,
    })
}

/// Q8^{Yn} Y C4: the extraspecial product amalgamated with a cyclic group
/// ⟨d⟩ of order 4, identifying the central involution with d². The last
/// embedding is the C4 factor.
pub fn extraspecial_q8_power_y_c4(n: u32) -> Result<IteratedCentralProduct, GroupError> {
    let es = extraspecial_q8_power(n)?;
    let c4 = cyclic_named(4, "d", GroupDescriptor::Cyclic(4))?;
    let z_es = central_involution(&es.group)?;
    let cp = central_product(&es.group, &c4, z_es, 2)?;
    let mut embeddings = es.factor_embeddings;
    for emb in &mut embeddings {
        for idx in emb.iter_mut() {
            *idx = cp.left_embedding[*idx as usize];
        }
    }
    embeddings.push(cp.right_embedding);
    let mut group = cp.group;
    group.set_descriptor(GroupDescriptor::ExtraspecialQ8YC4(n));
    Ok(IteratedCentralProduct {
        group,
        factor_embeddings: embeddings,
    })
}

/// The extraspecial group of order p³ and exponent p for an odd prime p:
/// triples (a, b, c) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a·b').
pub fn heisenberg(p: u32) -> Result<Group, GroupError> {
    if !crate::num_util::is_prime(p as u64) || p == 2 {
        return Err(GroupError::InvalidParameter(format!(
            "heisenberg construction needs an odd prime, got {p}"
        )));
    }
    let n = (p as usize).pow(3);
    if n > MAX_GROUP_ORDER {
        return Err(GroupError::OrderTooLarge(n));
    }
    let p = p as usize;
    let encode = |a: usize, b: usize, c: usize| (a * p + b) * p + c;
    let mut table = vec![0u16; n * n];
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                let i = encode(a, b, c);
                for a2 in 0..p {
                    for b2 in 0..p {
                        for c2 in 0..p {
                            let j = encode(a2, b2, c2);
                            let k = encode((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p);
                            table[i * n + j] = k as u16;
                        }
                    }
                }
            }
        }
    }
    let names = (0..n)
        .map(|i| {
            let (a, b, c) = (i / (p * p), (i / p) % p, i % p);
            let mut parts = Vec::new();
            if a > 0 {
                parts.push(power_name("a", a));
            }
            if b > 0 {
                parts.push(power_name("b", b));
            }
            if c > 0 {
                parts.push(power_name("c", c));
            }
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("*")
            }
        })
        .collect();
    Group::from_parts(table, names, GroupDescriptor::Heisenberg(p as u32))
}
