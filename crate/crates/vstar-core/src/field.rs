//! Exact arithmetic in GF(p^m).
//!
//! Elements are polynomials over GF(p) in a fixed degree-m modulus, stored as
//! base-p digits packed into one machine word. The packed code of
//! `c0 + c1·x + …` is `c0 + c1·p + …`, so codes run over `0..q` and an element
//! doubles as a table index. Multiplication and inversion go through
//! log/antilog tables whenever `q <= 2^16`; larger fields fall back to direct
//! polynomial arithmetic.

use std::fmt;

use thiserror::Error;

use crate::num_util::{factorize, is_prime};

/// Hard cap so that packed codes always fit a `u32`.
const MAX_FIELD_SIZE: u64 = 1 << 31;
/// Log/antilog tables are built up to this size.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{m} exceeds the supported element width")]
    SizeOverflow { p: u64, m: u32 },
    #[error("modulus must be a monic polynomial of degree {expected} with coefficients below {p}")]
    BadModulusShape { expected: u32, p: u64 },
    #[error("modulus {0} is reducible over GF({1})")]
    ReducibleModulus(String, u64),
    #[error("inverse of zero in {0}")]
    ZeroInverse(String),
    #[error("code {0} is not an element of {1}")]
    NotAnElement(u64, String),
    #[error("cannot parse {input:?} as an element of {field}: {reason}")]
    ElementParse {
        input: String,
        field: String,
        reason: String,
    },
    #[error("cannot parse field name {0:?}: expected \"GF(q)\" with q a prime power")]
    BadFieldName(String),
}

/// An element of a finite field, as a packed base-p digit code.
///
/// Codes are canonical: two elements are equal iff their codes are equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

/// A concrete GF(p^m): characteristic, degree, reduction modulus, and
/// multiplication tables. Immutable after construction; all arithmetic is
/// pure, so a spec can be shared read-only across threads.
pub struct FieldSpec {
    p: u64,
    m: u32,
    q: u64,
    /// Little-endian coefficients, length m+1, monic.
    modulus: Vec<u32>,
    /// log[code] = discrete log base the chosen generator; log[0] unused.
    log: Vec<u32>,
    /// alog[i] = generator^i, doubled in length so `log a + log b` indexes directly.
    alog: Vec<u32>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (modulus {})", self.name(), self.modulus_string())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FieldSpec {
    /// Builds GF(p^m). When `modulus` is `None` the lexicographically least
    /// monic irreducible of degree m is chosen, so the same (p, m) always
    /// yields the same field.
    pub fn new(p: u64, m: u32, modulus: Option<&[u64]>) -> Result<FieldSpec, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::CompositeCharacteristic(p));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or(FieldError::SizeOverflow { p, m })?;

        let modulus = match modulus {
            Some(coeffs) => {
                let ok = coeffs.len() == m as usize + 1
                    && coeffs[m as usize] == 1
                    && coeffs.iter().all(|&c| c < p);
                if !ok {
                    return Err(FieldError::BadModulusShape { expected: m, p });
                }
                let digits: Vec<u32> = coeffs.iter().map(|&c| c as u32).collect();
                if !poly_is_irreducible(&digits, p) {
                    return Err(FieldError::ReducibleModulus(
                        poly_string(&digits),
                        p,
                    ));
                }
                digits
            }
            None => default_modulus(p, m),
        };

        let mut spec = FieldSpec {
            p,
            m,
            q,
            modulus,
            log: Vec::new(),
            alog: Vec::new(),
        };
        if q <= TABLE_LIMIT {
            spec.build_tables();
        }
        Ok(spec)
    }

    /// Builds the field of the given order, e.g. `gf(9)` is GF(3^2).
    pub fn gf(q: u64) -> Result<FieldSpec, FieldError> {
        let factors = factorize(q);
        match factors.as_slice() {
            [(p, m)] => FieldSpec::new(*p, *m, None),
            _ => Err(FieldError::BadFieldName(format!("GF({q})"))),
        }
    }

    /// Parses "GF(q)" or "GF(p^m)".
    pub fn parse_name(name: &str) -> Result<FieldSpec, FieldError> {
        let bad = || FieldError::BadFieldName(name.to_string());
        let inner = name
            .trim()
            .strip_prefix("GF(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(bad)?
            .trim();
        if let Some((base, exp)) = inner.split_once('^') {
            let p: u64 = base.trim().parse().map_err(|_| bad())?;
            let m: u32 = exp.trim().parse().map_err(|_| bad())?;
            FieldSpec::new(p, m, None)
        } else {
            let q: u64 = inner.parse().map_err(|_| bad())?;
            FieldSpec::gf(q).map_err(|_| bad())
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn name(&self) -> String {
        format!("GF({})", self.q)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The element with the given packed code.
    pub fn element(&self, code: u64) -> Result<FieldElement, FieldError> {
        if code < self.q {
            Ok(FieldElement(code as u32))
        } else {
            Err(FieldError::NotAnElement(code, self.name()))
        }
    }

    /// All q elements, in code order, no duplicates.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|c| FieldElement(c as u32))
    }

    /// The GF(p)-basis 1, x, …, x^{m-1}.
    pub fn basis(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.m).map(|i| FieldElement(self.p.pow(i) as u32))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let p = self.p;
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut out = 0u64;
        let mut mult = 1u64;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * mult;
            mult *= p;
            x /= p;
            y /= p;
        }
        FieldElement(out as u32)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut x = a.0 as u64;
        let mut out = 0u64;
        let mut mult = 1u64;
        while x > 0 {
            let d = x % p;
            if d != 0 {
                out += (p - d) * mult;
            }
            mult *= p;
            x /= p;
        }
        FieldElement(out as u32)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if !self.log.is_empty() {
            let idx = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
            return FieldElement(self.alog[idx]);
        }
        self.mul_slow(a, b)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse(self.name()));
        }
        if !self.log.is_empty() {
            let ord = (self.q - 1) as usize;
            let idx = (ord - self.log[a.0 as usize] as usize) % ord;
            return Ok(FieldElement(self.alog[idx]));
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `k·a` for an integer k, i.e. a added to itself k times.
    pub fn int_mul(&self, k: u64, a: FieldElement) -> FieldElement {
        let k = k % self.p;
        let scalar = FieldElement((k % self.p) as u32);
        // k < p, so the code k is the constant polynomial k.
        self.mul(scalar, a)
    }

    fn mul_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let da = unpack(a.0 as u64, self.p);
        let db = unpack(b.0 as u64, self.p);
        let prod = poly_mul(&da, &db, self.p);
        let rem = poly_rem(prod, &self.modulus, self.p);
        FieldElement(pack(&rem, self.p) as u32)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        if q == 2 {
            self.alog = vec![1, 1];
            self.log = vec![0, 0];
            return;
        }
        let ord = q - 1;
        let prime_parts: Vec<u64> = factorize(ord).into_iter().map(|(p, _)| p).collect();
        let mut generator = FieldElement::ZERO;
        'search: for code in 2..q {
            let cand = FieldElement(code as u32);
            for &f in &prime_parts {
                if self.pow_slow(cand, ord / f) == FieldElement::ONE {
                    continue 'search;
                }
            }
            generator = cand;
            break;
        }
        assert!(!generator.is_zero(), "no generator found for GF({q})");

        let mut alog = vec![0u32; 2 * ord as usize];
        let mut log = vec![0u32; q as usize];
        let mut acc = FieldElement::ONE;
        for i in 0..ord as usize {
            alog[i] = acc.0;
            alog[i + ord as usize] = acc.0;
            log[acc.0 as usize] = i as u32;
            acc = self.mul_slow(acc, generator);
        }
        assert_eq!(acc, FieldElement::ONE, "generator order mismatch");
        self.alog = alog;
        self.log = log;
    }

    fn pow_slow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn modulus_string(&self) -> String {
        poly_string(&self.modulus)
    }

    /// Renders an element in the polynomial basis: "0", "1", "2", "x", "x+1",
    /// "2*x^2+1", …  Prime fields render as plain digits.
    pub fn format_element(&self, a: FieldElement) -> String {
        if self.m == 1 {
            return a.0.to_string();
        }
        let digits = unpack(a.0 as u64, self.p);
        poly_string(&digits)
    }

    /// Parses what `format_element` produces (plus harmless whitespace).
    pub fn parse_element(&self, input: &str) -> Result<FieldElement, FieldError> {
        let err = |reason: &str| FieldError::ElementParse {
            input: input.to_string(),
            field: self.name(),
            reason: reason.to_string(),
        };
        let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err("empty element"));
        }
        let mut acc = FieldElement::ZERO;
        for term in cleaned.split('+') {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            // term := INT | [INT '*'] 'x' ['^' INT]
            let (coeff_str, power) = match term.find('x') {
                None => (term, None),
                Some(i) => {
                    let coeff = term[..i].strip_suffix('*').unwrap_or(&term[..i]);
                    let rest = &term[i + 1..];
                    let exp: u32 = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .ok_or_else(|| err("expected ^ after x"))?
                            .parse()
                            .map_err(|_| err("bad exponent"))?
                    };
                    (coeff, Some(exp))
                }
            };
            let coeff: u64 = if coeff_str.is_empty() {
                1
            } else {
                coeff_str.parse().map_err(|_| err("bad coefficient"))?
            };
            let coeff = coeff % self.p;
            let exp = power.unwrap_or(0);
            if exp >= self.m && coeff != 0 {
                return Err(err("exponent not below the field degree"));
            }
            let mono = if coeff == 0 {
                FieldElement::ZERO
            } else {
                FieldElement((coeff * self.p.pow(exp)) as u32)
            };
            acc = self.add(acc, mono);
        }
        Ok(acc)
    }
}

fn pack(digits: &[u32], p: u64) -> u64 {
    let mut out = 0u64;
    for &d in digits.iter().rev() {
        out = out * p + d as u64;
    }
    out
}

fn unpack(mut code: u64, p: u64) -> Vec<u32> {
    let mut out = Vec::new();
    while code > 0 {
        out.push((code % p) as u32);
        code /= p;
    }
    out
}

fn poly_trim(f: &mut Vec<u32>) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

fn poly_mul(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai as u64 * bj as u64) % p;
        }
    }
    out.into_iter().map(|c| c as u32).collect()
}

/// Remainder of `a` modulo the monic polynomial `b`.
fn poly_rem(mut a: Vec<u32>, b: &[u32], p: u64) -> Vec<u32> {
    poly_trim(&mut a);
    let db = b.len() - 1;
    while a.len() > db {
        let lead = *a.last().unwrap() as u64;
        let shift = a.len() - 1 - db;
        if lead != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let idx = i + shift;
                let sub = (lead * bi as u64) % p;
                let cur = a[idx] as u64;
                a[idx] = ((cur + p - sub) % p) as u32;
            }
        }
        a.pop();
        poly_trim(&mut a);
    }
    a
}

/// Trial factorization: no monic divisor of degree 1..=deg/2.
fn poly_is_irreducible(f: &[u32], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    if f[0] == 0 {
        return false; // divisible by x
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for t in 0..count {
            let mut g = unpack(t, p);
            g.resize(d, 0);
            g.push(1);
            if poly_rem(f.to_vec(), &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree m over GF(p); least in
/// the packed-code order of the non-leading coefficients.
fn default_modulus(p: u64, m: u32) -> Vec<u32> {
    if m == 1 {
        return vec![0, 1]; // x
    }
    let count = p.pow(m);
    for t in 0..count {
        let mut g = unpack(t, p);
        g.resize(m as usize, 0);
        g.push(1);
        if poly_is_irreducible(&g, p) {
            return g;
        }
    }
    unreachable!("an irreducible of each degree exists")
}

fn poly_string(f: &[u32]) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (i, &c) in f.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let t = match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}*x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}*x^{i}"),
        };
        terms.push(t);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields() {
        let f2 = FieldSpec::new(2, 1, None).unwrap();
        assert_eq!(f2.order(), 2);
        assert_eq!(f2.add(f2.one(), f2.one()), f2.zero());

        let f3 = FieldSpec::new(3, 1, None).unwrap();
        let two = f3.element(2).unwrap();
        assert_eq!(f3.inv(two).unwrap(), two); // 2·2 = 4 ≡ 1
    }

    #[test]
    fn gf4_is_the_unique_quadratic_extension() {
        let f4 = FieldSpec::new(2, 2, None).unwrap();
        assert_eq!(f4.modulus_string(), "x^2+x+1");
        let x = f4.element(2).unwrap();
        let x_plus_1 = f4.element(3).unwrap();
        assert_eq!(f4.mul(x, x), x_plus_1); // x·x = x+1 mod x^2+x+1
    }

    #[test]
    fn default_moduli_are_deterministic() {
        assert_eq!(FieldSpec::new(2, 3, None).unwrap().modulus_string(), "x^3+x+1");
        assert_eq!(FieldSpec::new(3, 2, None).unwrap().modulus_string(), "x^2+1");
        let a = FieldSpec::new(2, 8, None).unwrap();
        let b = FieldSpec::new(2, 8, None).unwrap();
        assert_eq!(a.modulus_string(), b.modulus_string());
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            FieldSpec::new(6, 1, None),
            Err(FieldError::CompositeCharacteristic(6))
        ));
        assert!(matches!(FieldSpec::new(2, 0, None), Err(FieldError::ZeroDegree)));
        // x^2+1 = (x+1)^2 over GF(2)
        assert!(matches!(
            FieldSpec::new(2, 2, Some(&[1, 0, 1])),
            Err(FieldError::ReducibleModulus(..))
        ));
        assert!(matches!(
            FieldSpec::new(2, 2, Some(&[1, 1])),
            Err(FieldError::BadModulusShape { .. })
        ));
        let f2 = FieldSpec::new(2, 1, None).unwrap();
        assert!(f2.inv(f2.zero()).is_err());
    }

    #[test]
    fn names_parse_and_render() {
        for (name, p, m) in [("GF(2)", 2, 1), ("GF(4)", 2, 2), ("GF(9)", 3, 2), ("GF(27)", 3, 3)] {
            let f = FieldSpec::parse_name(name).unwrap();
            assert_eq!(f.characteristic(), p);
            assert_eq!(f.degree(), m);
            assert_eq!(f.name(), name);
        }
        let f = FieldSpec::parse_name("GF(2^4)").unwrap();
        assert_eq!(f.order(), 16);
        assert!(FieldSpec::parse_name("GF(6)").is_err());
        assert!(FieldSpec::parse_name("Zmod(4)").is_err());
    }

    fn check_axioms_exhaustively(f: &FieldSpec) {
        let q = f.order();
        let els: Vec<FieldElement> = f.elements().collect();
        assert_eq!(els.len() as u64, q);
        // enumerate yields distinct codes
        for w in els.windows(2) {
            assert!(w[0] < w[1]);
        }
        for &a in &els {
            // characteristic law p·a = 0
            let mut acc = FieldElement::ZERO;
            for _ in 0..f.characteristic() {
                acc = f.add(acc, a);
            }
            assert!(acc.is_zero());
            if !a.is_zero() {
                let ai = f.inv(a).unwrap();
                assert_eq!(f.mul(a, ai), f.one());
            }
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &els {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                }
            }
        }
    }

    #[test]
    fn axioms_hold_in_small_fields() {
        for q in [2u64, 3, 4, 5, 8, 9, 16, 25, 27] {
            let f = FieldSpec::gf(q).unwrap();
            check_axioms_exhaustively(&f);
        }
    }

    #[test]
    fn axioms_hold_in_gf256() {
        check_axioms_exhaustively(&FieldSpec::gf(256).unwrap());
    }

    #[test]
    fn slow_path_agrees_with_tables() {
        let f = FieldSpec::gf(81).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(a, b), f.mul_slow(a, b));
            }
        }
    }

    #[test]
    fn element_text_roundtrip() {
        let f9 = FieldSpec::gf(9).unwrap();
        for a in f9.elements() {
            let s = f9.format_element(a);
            assert_eq!(f9.parse_element(&s).unwrap(), a, "{s}");
        }
        assert_eq!(f9.format_element(f9.element(5).unwrap()), "x+2");
        let f4 = FieldSpec::gf(4).unwrap();
        assert_eq!(f4.parse_element("x+1").unwrap(), f4.element(3).unwrap());
        assert!(f4.parse_element("y").is_err());
        assert!(f4.parse_element("x^2").is_err());
    }

    #[test]
    fn basis_spans_by_scaling() {
        let f8 = FieldSpec::gf(8).unwrap();
        let basis: Vec<FieldElement> = f8.basis().collect();
        assert_eq!(basis.len(), 3);
        // every element is a unique GF(2) combination of the basis
        let mut seen = std::collections::HashSet::new();
        for mask in 0u32..8 {
            let mut acc = FieldElement::ZERO;
            for (i, &b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc = f8.add(acc, b);
                }
            }
            seen.insert(acc);
        }
        assert_eq!(seen.len(), 8);
    }
}
