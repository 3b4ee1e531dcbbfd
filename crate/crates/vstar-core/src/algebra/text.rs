//! Textual element syntax: a sum of `coeff*name` terms, e.g. `1 + a + b*a^2`.
//! Coefficients use the field's own syntax, parenthesized when they contain a
//! sum: `(x+1)*a` over GF(4). A `-` sign negates the following term, which
//! only matters in odd characteristic.

use crate::field::FieldElement;

use super::{AlgebraElement, AlgebraError, GroupAlgebra};

pub(super) fn format_element(x: &AlgebraElement) -> String {
    let alg = x.algebra();
    let field = alg.field();
    let group = alg.group();
    let mut terms = Vec::new();
    for (i, &c) in x.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cs = field.format_element(c);
        let cs = if cs.contains('+') {
            format!("({cs})")
        } else {
            cs
        };
        let term = if i == 0 {
            cs
        } else if c == FieldElement::ONE {
            group.name(i as u16).to_string()
        } else {
            format!("{cs}*{}", group.name(i as u16))
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

pub(super) fn parse_element(
    alg: &GroupAlgebra,
    input: &str,
) -> Result<AlgebraElement, AlgebraError> {
    let err = |reason: &str| AlgebraError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let group = alg.group();
    let field = alg.field();

    let terms = split_terms(input).map_err(|r| err(&r))?;
    if terms.is_empty() {
        return Err(err("empty element"));
    }
    let mut acc = alg.zero();
    for (term, negated) in terms {
        let term = term.trim();
        if term.is_empty() {
            return Err(err("empty term"));
        }
        if term == "0" {
            continue;
        }
        let mut coeff = field.one();
        let mut element = 0u16;
        for atom in split_atoms(term) {
            let atom = atom.trim();
            if atom.is_empty() {
                return Err(err("empty factor"));
            }
            if let Some(inner) = atom.strip_prefix('(') {
                let inner = inner.strip_suffix(')').ok_or_else(|| err("unbalanced parens"))?;
                let c = field.parse_element(inner)?;
                coeff = field.mul(coeff, c);
            } else if let Some(idx) = group.element_by_name(atom) {
                element = group.mul(element, idx);
            } else if let Some((base, pow)) = atom.split_once('^') {
                let base_idx = group
                    .element_by_name(base)
                    .ok_or_else(|| err(&format!("unknown name {base:?}")))?;
                let k: i64 = pow.parse().map_err(|_| err("bad exponent"))?;
                element = group.mul(element, group.power(base_idx, k));
            } else if let Ok(c) = field.parse_element(atom) {
                coeff = field.mul(coeff, c);
            } else {
                return Err(err(&format!("unknown factor {atom:?}")));
            }
        }
        if negated {
            coeff = field.neg(coeff);
        }
        let term_el = alg.group_element(element).scale(coeff);
        acc = acc.add(&term_el).expect("same carrier");
    }
    Ok(acc)
}

/// Splits on top-level `+`/`-`, keeping the sign with each term. A leading
/// minus is allowed; dangling or doubled signs are not.
fn split_terms(input: &str) -> Result<Vec<(String, bool)>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut negated = false;
    let mut depth = 0i32;
    let mut pending_sign = false;
    for ch in input.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parens".into());
                }
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if cur.trim().is_empty() {
                    if ch == '-' && out.is_empty() && !negated && !pending_sign {
                        negated = true;
                    } else {
                        return Err("empty term".into());
                    }
                } else {
                    out.push((std::mem::take(&mut cur), negated));
                    negated = ch == '-';
                    pending_sign = true;
                }
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err("unbalanced parens".into());
    }
    if !cur.trim().is_empty() {
        out.push((cur, negated));
    } else if pending_sign || negated {
        return Err("dangling sign".into());
    }
    Ok(out)
}

/// Splits a term on top-level `*`.
fn split_atoms(term: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in term.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            '*' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    // composite group names like "a^2*b" arrive as separate atoms and are
    // multiplied back together by the caller
    out
}
