//! Symbolic group recipes and their mini-language.
//!
//! The grammar, as accepted on the command line and in config files:
//!
//! ```text
//! C(n)                          cyclic of order n
//! A(n1,n2,...)                  direct product of cyclics
//! D(2^k)                        dihedral of order 2^k        (k >= 2)
//! Q(2^k)                        generalized quaternion       (k >= 3)
//! ES(n)                         central product of n copies of Q(8)
//! ESC4(n)                       ES(n) Y C(4), identifying c with d^2
//! SDI(<abelian>; b=2)           inversion extension, b^2 = 1
//! SDI(<abelian>; b=4, sq=EXPR)  inversion extension, b^2 = EXPR in the base
//! Y(<desc>, <desc>)             central product over the unique central
//!                               involutions; z1=EXPR, z2=EXPR to override
//! HEIS(p)                       extraspecial of order p^3, exponent p (p odd)
//! ```
//!
//! `EXPR` is a product of element names with optional powers, e.g. `a^2` or
//! `a1*a2^3`.

use std::fmt;

use thiserror::Error;

use super::{build, Group, GroupError};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("descriptor parse error at byte {pos}: {msg}")]
pub struct DescriptorParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDescriptor {
    Cyclic(u32),
    Abelian(Vec<u32>),
    Dihedral(u32),
    Quaternion(u32),
    SemidirectInversion {
        base: Box<GroupDescriptor>,
        b_order: u8,
        /// element expression in the base group; required when b_order = 4
        b_square: Option<String>,
    },
    ExtraspecialQ8(u32),
    ExtraspecialQ8YC4(u32),
    CentralProduct {
        left: Box<GroupDescriptor>,
        right: Box<GroupDescriptor>,
        z_left: Option<String>,
        z_right: Option<String>,
    },
    Heisenberg(u32),
}

/// The structural classes for which the map x ↦ x·x* is a homomorphism and
/// the symmetric-subgroup quotient is valid in characteristic 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalityClass {
    Abelian,
    /// abelian subgroup of index 2 inverted by an element of order 2
    InversionOrder2,
    /// extraspecial 2-group, or its central product with C4, possibly times
    /// an elementary abelian factor
    Extraspecial,
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Cyclic(n) => write!(f, "C({n})"),
            GroupDescriptor::Abelian(invs) => {
                let parts: Vec<String> = invs.iter().map(|k| k.to_string()).collect();
                write!(f, "A({})", parts.join(","))
            }
            GroupDescriptor::Dihedral(n) => write!(f, "D({n})"),
            GroupDescriptor::Quaternion(n) => write!(f, "Q({n})"),
            GroupDescriptor::SemidirectInversion {
                base,
                b_order,
                b_square,
            } => match b_square {
                Some(sq) => write!(f, "SDI({base}; b={b_order}, sq={sq})"),
                None => write!(f, "SDI({base}; b={b_order})"),
            },
            GroupDescriptor::ExtraspecialQ8(n) => write!(f, "ES({n})"),
            GroupDescriptor::ExtraspecialQ8YC4(n) => write!(f, "ESC4({n})"),
            GroupDescriptor::CentralProduct {
                left,
                right,
                z_left,
                z_right,
            } => match (z_left, z_right) {
                (Some(z1), Some(z2)) => write!(f, "Y({left}, {right}; z1={z1}, z2={z2})"),
                _ => write!(f, "Y({left}, {right})"),
            },
            GroupDescriptor::Heisenberg(p) => write!(f, "HEIS({p})"),
        }
    }
}

impl std::str::FromStr for GroupDescriptor {
    type Err = DescriptorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupDescriptor::parse(s)
    }
}

impl GroupDescriptor {
    pub fn parse(input: &str) -> Result<GroupDescriptor, DescriptorParseError> {
        let mut p = Parser {
            bytes: input.as_bytes(),
            pos: 0,
        };
        let d = p.descriptor()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("trailing input"));
        }
        Ok(d)
    }

    /// Builds the concrete Cayley-table group.
    pub fn build(&self) -> Result<Group, GroupError> {
        match self {
            GroupDescriptor::Cyclic(n) => build::cyclic(*n),
            GroupDescriptor::Abelian(invs) => build::abelian(invs),
            GroupDescriptor::Dihedral(n) => build::dihedral(*n),
            GroupDescriptor::Quaternion(n) => build::quaternion(*n),
            GroupDescriptor::SemidirectInversion {
                base,
                b_order,
                b_square,
            } => {
                let base_group = base.build()?;
                let sq = match (b_order, b_square) {
                    (2, None) => 0u16,
                    (2, Some(expr)) => {
                        let idx = parse_group_word(&base_group, expr)?;
                        if idx != 0 {
                            return Err(GroupError::BadBSquare);
                        }
                        0
                    }
                    (4, Some(expr)) => parse_group_word(&base_group, expr)?,
                    (4, None) => return Err(GroupError::BadBSquare),
                    (other, _) => return Err(GroupError::BadBOrder(*other)),
                };
                let mut g = build::semidirect_inversion(&base_group, *b_order, sq)?;
                g.set_descriptor(self.clone());
                Ok(g)
            }
            GroupDescriptor::ExtraspecialQ8(n) => Ok(build::extraspecial_q8_power(*n)?.group),
            GroupDescriptor::ExtraspecialQ8YC4(n) => {
                Ok(build::extraspecial_q8_power_y_c4(*n)?.group)
            }
            GroupDescriptor::CentralProduct {
                left,
                right,
                z_left,
                z_right,
            } => {
                let lg = left.build()?;
                let rg = right.build()?;
                let z1 = resolve_amalgam(&lg, z_left.as_deref())?;
                let z2 = resolve_amalgam(&rg, z_right.as_deref())?;
                let mut g = build::central_product(&lg, &rg, z1, z2)?.group;
                g.set_descriptor(self.clone());
                Ok(g)
            }
            GroupDescriptor::Heisenberg(p) => build::heisenberg(*p),
        }
    }

    /// Group order, without building the Cayley table (except that central
    /// products with explicit amalgam expressions build their factors to
    /// resolve the element orders).
    pub fn order(&self) -> Result<u64, GroupError> {
        match self {
            GroupDescriptor::Cyclic(n) => Ok(*n as u64),
            GroupDescriptor::Abelian(invs) => Ok(invs.iter().map(|&k| k as u64).product()),
            GroupDescriptor::Dihedral(n) | GroupDescriptor::Quaternion(n) => Ok(*n as u64),
            GroupDescriptor::SemidirectInversion { base, .. } => Ok(2 * base.order()?),
            GroupDescriptor::ExtraspecialQ8(n) => Ok(1u64 << (2 * n + 1)),
            GroupDescriptor::ExtraspecialQ8YC4(n) => Ok(1u64 << (2 * n + 2)),
            GroupDescriptor::CentralProduct {
                left,
                right,
                z_left,
                z_right,
            } => {
                let lo = left.order()?;
                let ro = right.order()?;
                let amalgam = match (z_left, z_right) {
                    (None, None) => 2,
                    _ => {
                        let lg = left.build()?;
                        let z1 = resolve_amalgam(&lg, z_left.as_deref())?;
                        lg.element_order(z1) as u64
                    }
                };
                Ok(lo * ro / amalgam)
            }
            GroupDescriptor::Heisenberg(p) => Ok((*p as u64).pow(3)),
        }
    }

    /// Whether the family is abelian by construction.
    pub fn is_abelian_family(&self) -> bool {
        matches!(
            self,
            GroupDescriptor::Cyclic(_) | GroupDescriptor::Abelian(_) | GroupDescriptor::Dihedral(4)
        )
    }

    /// Invariant factors when the family is abelian.
    pub fn abelian_invariants(&self) -> Option<Vec<u32>> {
        match self {
            GroupDescriptor::Cyclic(n) => Some(vec![*n]),
            GroupDescriptor::Abelian(invs) => Some(invs.clone()),
            GroupDescriptor::Dihedral(4) => Some(vec![2, 2]),
            _ => None,
        }
    }

    /// Classifies descriptors whose built groups are known to make x ↦ x·x*
    /// a homomorphism over characteristic 2. Conservative: families without
    /// that guarantee (generalized quaternion beyond Q8, free-form central
    /// products, odd-order groups) return None.
    pub fn normality_class(&self) -> Option<NormalityClass> {
        match self {
            d if d.is_abelian_family() => {
                let invs = d.abelian_invariants()?;
                invs.iter().all(|k| k.is_power_of_two()).then_some(NormalityClass::Abelian)
            }
            GroupDescriptor::Dihedral(_) => Some(NormalityClass::InversionOrder2),
            GroupDescriptor::Quaternion(8) | GroupDescriptor::ExtraspecialQ8(_) => {
                Some(NormalityClass::Extraspecial)
            }
            GroupDescriptor::ExtraspecialQ8YC4(_) => Some(NormalityClass::Extraspecial),
            GroupDescriptor::SemidirectInversion {
                base,
                b_order,
                b_square,
            } => {
                let invs = base.abelian_invariants()?;
                if !invs.iter().all(|k| k.is_power_of_two()) {
                    return None;
                }
                match b_order {
                    2 => {
                        if invs.iter().all(|&k| k <= 2) {
                            Some(NormalityClass::Abelian)
                        } else {
                            Some(NormalityClass::InversionOrder2)
                        }
                    }
                    // b of order 4: only the C2^j × C4 shape with b² equal to
                    // the square of an order-4 base element is the
                    // elementary-abelian-times-Q8 class; anything else (e.g.
                    // b² an independent involution, which yields C4⋊C4) is
                    // left unclassified
                    4 => {
                        let fours = invs.iter().filter(|&&k| k == 4).count();
                        let twos = invs.iter().filter(|&&k| k == 2).count();
                        if fours != 1 || fours + twos != invs.len() {
                            return None;
                        }
                        let base_group = base.build().ok()?;
                        let sq = parse_group_word(&base_group, b_square.as_deref()?).ok()?;
                        (0..base_group.order() as u16)
                            .any(|x| base_group.mul(x, x) == sq)
                            .then_some(NormalityClass::Extraspecial)
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

fn resolve_amalgam(g: &Group, expr: Option<&str>) -> Result<u16, GroupError> {
    match expr {
        Some(e) => parse_group_word(g, e),
        None => {
            // default: the unique central involution
            let center = g.center();
            let invs: Vec<u16> = center
                .members()
                .iter()
                .copied()
                .filter(|&z| g.element_order(z) == 2)
                .collect();
            match invs.as_slice() {
                [z] => Ok(*z),
                _ => Err(GroupError::InvalidParameter(
                    "no unique central involution; specify z1=/z2= explicitly".into(),
                )),
            }
        }
    }
}

/// Resolves a product of element names with optional powers against a group's
/// name table, e.g. `a^2*b` or `a1*a2^3`.
pub fn parse_group_word(g: &Group, expr: &str) -> Result<u16, GroupError> {
    let mut acc = 0u16;
    for raw in expr.split('*') {
        let token = raw.trim();
        if token.is_empty() {
            return Err(GroupError::UnknownElementName(expr.to_string()));
        }
        let idx = if let Some(idx) = g.element_by_name(token) {
            idx
        } else if let Some((base, pow)) = token.split_once('^') {
            let base_idx = g
                .element_by_name(base.trim())
                .ok_or_else(|| GroupError::UnknownElementName(token.to_string()))?;
            let k: i64 = pow
                .trim()
                .parse()
                .map_err(|_| GroupError::UnknownElementName(token.to_string()))?;
            g.power(base_idx, k)
        } else {
            return Err(GroupError::UnknownElementName(token.to_string()));
        };
        acc = g.mul(acc, idx);
    }
    Ok(acc)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> DescriptorParseError {
        DescriptorParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), DescriptorParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {:?}", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, DescriptorParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a family name"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn uint(&mut self) -> Result<u32, DescriptorParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    /// Raw token up to the next delimiter, used for element expressions.
    fn word(&mut self) -> Result<String, DescriptorParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|&b| b != b',' && b != b';' && b != b')')
        {
            self.pos += 1;
        }
        let w = std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .trim()
            .to_string();
        if w.is_empty() {
            return Err(self.err("expected an element expression"));
        }
        Ok(w)
    }

    fn keyvalue(&mut self, key: &str) -> Result<String, DescriptorParseError> {
        let id = self.ident()?;
        if id != key {
            return Err(self.err(&format!("expected {key}=")));
        }
        self.expect(b'=')?;
        self.word()
    }

    fn descriptor(&mut self) -> Result<GroupDescriptor, DescriptorParseError> {
        let fam = self.ident()?;
        self.expect(b'(')?;
        let d = match fam.as_str() {
            "C" => GroupDescriptor::Cyclic(self.uint()?),
            "A" => {
                let mut invs = vec![self.uint()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    invs.push(self.uint()?);
                }
                GroupDescriptor::Abelian(invs)
            }
            "D" => GroupDescriptor::Dihedral(self.uint()?),
            "Q" => GroupDescriptor::Quaternion(self.uint()?),
            "ES" => GroupDescriptor::ExtraspecialQ8(self.uint()?),
            "ESC4" => GroupDescriptor::ExtraspecialQ8YC4(self.uint()?),
            "HEIS" => GroupDescriptor::Heisenberg(self.uint()?),
            "SDI" => {
                let base = self.descriptor()?;
                self.expect(b';')?;
                let id = self.ident()?;
                if id != "b" {
                    return Err(self.err("expected b="));
                }
                self.expect(b'=')?;
                let b_order = self.uint()? as u8;
                let b_square = if self.peek() == Some(b',') {
                    self.pos += 1;
                    Some(self.keyvalue("sq")?)
                } else {
                    None
                };
                GroupDescriptor::SemidirectInversion {
                    base: Box::new(base),
                    b_order,
                    b_square,
                }
            }
            "Y" => {
                let left = self.descriptor()?;
                self.expect(b',')?;
                let right = self.descriptor()?;
                let (z_left, z_right) = if self.peek() == Some(b';') {
                    self.pos += 1;
                    let z1 = self.keyvalue("z1")?;
                    self.expect(b',')?;
                    let z2 = self.keyvalue("z2")?;
                    (Some(z1), Some(z2))
                } else {
                    (None, None)
                };
                GroupDescriptor::CentralProduct {
                    left: Box::new(left),
                    right: Box::new(right),
                    z_left,
                    z_right,
                }
            }
            other => return Err(self.err(&format!("unknown family {other:?}"))),
        };
        self.expect(b')')?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        let cases = [
            "C(4)",
            "A(2,4)",
            "D(16)",
            "Q(8)",
            "ES(2)",
            "ESC4(1)",
            "HEIS(3)",
            "SDI(A(2,4); b=2)",
            "SDI(C(8); b=4, sq=a^4)",
            "Y(Q(8), Q(8))",
            "Y(Q(8), C(4); z1=a^2, z2=a^2)",
        ];
        for case in cases {
            let d = GroupDescriptor::parse(case).unwrap();
            assert_eq!(d.to_string(), case);
            let again = GroupDescriptor::parse(&d.to_string()).unwrap();
            assert_eq!(again, d);
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = GroupDescriptor::parse("X(4)").unwrap_err();
        assert!(err.msg.contains("unknown family"));
        let err = GroupDescriptor::parse("C(4").unwrap_err();
        assert_eq!(err.pos, 3);
        let err = GroupDescriptor::parse("C(4) extra").unwrap_err();
        assert!(err.msg.contains("trailing"));
        assert!(GroupDescriptor::parse("SDI(C(4); q=2)").is_err());
    }

    #[test]
    fn descriptor_orders_match_built_groups() {
        let cases = [
            "C(8)",
            "A(2,4)",
            "D(16)",
            "Q(16)",
            "ES(2)",
            "ESC4(1)",
            "HEIS(3)",
            "SDI(A(2,4); b=2)",
            "Y(Q(8), Q(8))",
            "Y(Q(8), C(4); z1=a^2, z2=a^2)",
        ];
        for case in cases {
            let d = GroupDescriptor::parse(case).unwrap();
            let g = d.build().unwrap();
            assert_eq!(g.order() as u64, d.order().unwrap(), "{case}");
        }
    }

    #[test]
    fn descriptor_builds_match_direct_constructors() {
        let q8 = GroupDescriptor::parse("Q(8)").unwrap().build().unwrap();
        let direct = build::quaternion(8).unwrap();
        assert_eq!(q8.order_histogram(), direct.order_histogram());

        // Y(Q(8), C(4)) with the canonical identification equals ESC4(1)
        let via_y = GroupDescriptor::parse("Y(Q(8), C(4); z1=a^2, z2=a^2)")
            .unwrap()
            .build()
            .unwrap();
        let esc = GroupDescriptor::parse("ESC4(1)").unwrap().build().unwrap();
        assert_eq!(via_y.order(), esc.order());
        assert_eq!(via_y.order_histogram(), esc.order_histogram());
    }

    #[test]
    fn group_words_resolve() {
        let q16 = build::quaternion(16).unwrap();
        let a = q16.element_by_name("a").unwrap();
        assert_eq!(parse_group_word(&q16, "a^4").unwrap(), q16.power(a, 4));
        assert_eq!(parse_group_word(&q16, "a^-1").unwrap(), q16.inverse_of(a));
        let ab = parse_group_word(&q16, "a*b").unwrap();
        assert_eq!(q16.name(ab), "a*b");
        assert!(parse_group_word(&q16, "z").is_err());
    }

    #[test]
    fn normality_classes() {
        use NormalityClass::*;
        let class = |s: &str| GroupDescriptor::parse(s).unwrap().normality_class();
        assert_eq!(class("C(4)"), Some(Abelian));
        assert_eq!(class("A(2,4)"), Some(Abelian));
        assert_eq!(class("D(4)"), Some(Abelian));
        assert_eq!(class("D(8)"), Some(InversionOrder2));
        assert_eq!(class("SDI(A(2,4); b=2)"), Some(InversionOrder2));
        assert_eq!(class("SDI(A(2,2); b=2)"), Some(Abelian));
        assert_eq!(class("Q(8)"), Some(Extraspecial));
        assert_eq!(class("Q(16)"), None);
        assert_eq!(class("ES(3)"), Some(Extraspecial));
        assert_eq!(class("ESC4(2)"), Some(Extraspecial));
        assert_eq!(class("SDI(A(2,4); b=4, sq=a2^2)"), Some(Extraspecial));
        // b² an involution outside the square subgroup gives C4⋊C4, not covered
        assert_eq!(class("SDI(A(2,4); b=4, sq=a1)"), None);
        assert_eq!(class("SDI(C(8); b=4, sq=a^4)"), None);
        assert_eq!(class("Y(Q(8), Q(8))"), None);
        assert_eq!(class("HEIS(3)"), None);
        assert_eq!(class("C(3)"), None);
    }
}
