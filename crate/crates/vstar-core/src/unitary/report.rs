//! Exact orders in factored form and the per-run report type.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::num_util::factorize;

/// An exact order `cofactor · base^exponent`. Orders can exceed any native
/// width (q^2047 is in range for predictions), so equality and division work
/// on prime-exponent maps rather than on evaluated values.
#[derive(Clone, Debug, Serialize)]
pub struct FactoredOrder {
    pub base: u64,
    pub exponent: u64,
    pub cofactor: u64,
}

impl FactoredOrder {
    pub fn pow_of(base: u64, exponent: u64) -> FactoredOrder {
        FactoredOrder {
            base,
            exponent,
            cofactor: 1,
        }
    }

    pub fn with_cofactor(cofactor: u64, base: u64, exponent: u64) -> FactoredOrder {
        FactoredOrder {
            base,
            exponent,
            cofactor,
        }
    }

    /// Expresses a counted value as `cofactor · base^e` with the largest
    /// possible e.
    pub fn rebase(value: u64, base: u64) -> FactoredOrder {
        assert!(value > 0 && base > 1);
        let mut cofactor = value;
        let mut exponent = 0;
        while cofactor % base == 0 {
            cofactor /= base;
            exponent += 1;
        }
        FactoredOrder {
            base,
            exponent,
            cofactor,
        }
    }

    fn prime_exponents(&self) -> BTreeMap<u64, u64> {
        let mut map = BTreeMap::new();
        if self.exponent > 0 {
            for (p, e) in factorize(self.base) {
                *map.entry(p).or_insert(0) += e as u64 * self.exponent;
            }
        }
        for (p, e) in factorize(self.cofactor) {
            *map.entry(p).or_insert(0) += e as u64;
        }
        map
    }

    fn from_prime_exponents(map: BTreeMap<u64, u64>, display_base: u64) -> FactoredOrder {
        let base_map: Vec<(u64, u64)> = factorize(display_base)
            .into_iter()
            .map(|(p, e)| (p, e as u64))
            .collect();
        // how many copies of display_base divide the value
        let exponent = base_map
            .iter()
            .map(|(p, e)| map.get(p).copied().unwrap_or(0) / e)
            .min()
            .unwrap_or(0);
        let mut cofactor = 1u64;
        for (p, e) in &map {
            let used = base_map
                .iter()
                .find(|(bp, _)| bp == p)
                .map(|(_, be)| be * exponent)
                .unwrap_or(0);
            cofactor *= p.pow((e - used) as u32);
        }
        FactoredOrder {
            base: display_base,
            exponent,
            cofactor,
        }
    }

    /// Exact quotient, rendered over `display_base`; `None` when the division
    /// does not come out exact.
    pub fn divide_exact(&self, other: &FactoredOrder, display_base: u64) -> Option<FactoredOrder> {
        let mut map = self.prime_exponents();
        for (p, e) in other.prime_exponents() {
            let have = map.entry(p).or_insert(0);
            if *have < e {
                return None;
            }
            *have -= e;
        }
        map.retain(|_, e| *e > 0);
        Some(FactoredOrder::from_prime_exponents(map, display_base))
    }

    pub fn multiply(&self, other: &FactoredOrder, display_base: u64) -> FactoredOrder {
        let mut map = self.prime_exponents();
        for (p, e) in other.prime_exponents() {
            *map.entry(p).or_insert(0) += e;
        }
        FactoredOrder::from_prime_exponents(map, display_base)
    }

    pub fn value_u128(&self) -> Option<u128> {
        let mut acc: u128 = self.cofactor as u128;
        for _ in 0..self.exponent {
            acc = acc.checked_mul(self.base as u128)?;
        }
        Some(acc)
    }

    /// Decimal value when it fits 64 bits.
    pub fn decimal(&self) -> Option<u64> {
        self.value_u128().and_then(|v| u64::try_from(v).ok())
    }
}

impl PartialEq for FactoredOrder {
    fn eq(&self, other: &Self) -> bool {
        self.prime_exponents() == other.prime_exponents()
    }
}

impl Eq for FactoredOrder {}

impl fmt::Display for FactoredOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.cofactor, self.exponent) {
            (c, 0) => write!(f, "{c}"),
            (1, 1) => write!(f, "{}", self.base),
            (1, e) => write!(f, "{}^{}", self.base, e),
            (c, 1) => write!(f, "{c}*{}", self.base),
            (c, e) => write!(f, "{c}*{}^{}", self.base, e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "bruteforce")]
    Bruteforce,
    #[serde(rename = "closure-quotient")]
    ClosureQuotient,
    #[serde(rename = "structural")]
    Structural,
    #[serde(rename = "formula")]
    Formula,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Bruteforce => "bruteforce",
            Method::ClosureQuotient => "closure-quotient",
            Method::Structural => "structural",
            Method::Formula => "formula",
        };
        f.write_str(s)
    }
}

/// Which other methods this report's order agrees with.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Agreement {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bruteforce: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structural: Option<bool>,
}

/// Result of one unitary-order computation.
#[derive(Clone, Debug, Serialize)]
pub struct UnitSetReport {
    pub descriptor: String,
    pub field: String,
    pub method: Method,
    pub order: FactoredOrder,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_decimal: Option<u64>,
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<Agreement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sk_order: Option<FactoredOrder>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}
