//! Report envelopes and the three emitters (json, csv, text).
//!
//! Reports are byte-stable for a fixed configuration: wall-clock timings are
//! only embedded when `--timings` is passed.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use vstar_core::formulas::OrderPrediction;
use vstar_core::unitary::report::{Method, UnitSetReport};

#[derive(Clone, Serialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<String>,
    pub field: String,
    pub budget: u64,
    pub workers: usize,
    pub seed: u64,
    pub format: String,
    pub timings: bool,
}

#[derive(Serialize)]
pub struct GroupInfo {
    pub descriptor: String,
    pub order: usize,
    pub abelian: bool,
    pub exponent: u32,
    pub center_order: usize,
    pub commutator_order: usize,
    pub order_histogram: BTreeMap<u32, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frattini_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order4_transversal: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square_roots_of_identity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square_subgroup_involutions: Option<usize>,
}

#[derive(Serialize)]
pub struct ElementInfo {
    pub input: String,
    pub canonical: String,
    pub star: String,
    pub square: String,
    pub augmentation: String,
    pub support_size: usize,
    pub is_unit: bool,
    pub is_normalized_unit: bool,
    pub is_symmetric: bool,
    pub is_skew: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_unitary: Option<bool>,
}

/// One table row: a descriptor with its prediction and computed methods;
/// failures are recorded in-row.
#[derive(Serialize)]
pub struct TableEntry {
    pub descriptor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<OrderPrediction>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub reports: Vec<UnitSetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct Envelope {
    pub version: &'static str,
    pub command: String,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<OrderPrediction>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub reports: Vec<UnitSetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<ElementInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub table: Vec<TableEntry>,
}

impl Envelope {
    pub fn new(command: &str, config: ConfigEcho) -> Envelope {
        Envelope {
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            prediction: None,
            reports: Vec::new(),
            all_agree: None,
            group: None,
            element: None,
            table: Vec::new(),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    descriptor: &'a str,
    q: u64,
    method: String,
    order_base: u64,
    order_exponent: u64,
    order_cofactor: u64,
    agrees: Option<bool>,
    elapsed_s: Option<f64>,
}

fn report_rows<'a>(
    q: u64,
    prediction: Option<&'a OrderPrediction>,
    reports: &'a [UnitSetReport],
    all_agree: Option<bool>,
    rows: &mut Vec<CsvRow<'a>>,
) {
    if let Some(p) = prediction {
        if let Some(vstar) = &p.vstar_order {
            rows.push(CsvRow {
                descriptor: &p.descriptor,
                q,
                method: Method::Formula.to_string(),
                order_base: vstar.base,
                order_exponent: vstar.exponent,
                order_cofactor: vstar.cofactor,
                agrees: all_agree,
                elapsed_s: None,
            });
        }
    }
    for r in reports {
        if r.method == Method::Formula {
            continue; // the prediction row already covers it
        }
        let agrees = r
            .agreement
            .as_ref()
            .map(|a| {
                [a.formula, a.bruteforce, a.closure, a.structural]
                    .into_iter()
                    .flatten()
                    .all(|x| x)
            })
            .or(all_agree);
        rows.push(CsvRow {
            descriptor: &r.descriptor,
            q,
            method: r.method.to_string(),
            order_base: r.order.base,
            order_exponent: r.order.exponent,
            order_cofactor: r.order.cofactor,
            agrees,
            elapsed_s: r.elapsed_s,
        });
    }
}

pub fn to_csv(envelope: &Envelope, q: u64) -> Result<String, String> {
    let mut rows = Vec::new();
    report_rows(
        q,
        envelope.prediction.as_ref(),
        &envelope.reports,
        envelope.all_agree,
        &mut rows,
    );
    for entry in &envelope.table {
        report_rows(
            q,
            entry.prediction.as_ref(),
            &entry.reports,
            entry.all_agree,
            &mut rows,
        );
    }
    if rows.is_empty() {
        return Err("this command produced no method rows; use --format json or text".into());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

pub fn to_json(envelope: &Envelope) -> String {
    let mut s = serde_json::to_string_pretty(envelope).expect("serializable");
    s.push('\n');
    s
}

pub fn to_text(envelope: &Envelope) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: &str| {
        out.push_str(line);
        out.push('\n');
    };

    if let Some(g) = &envelope.group {
        push(&mut out, &format!("group {} of order {}", g.descriptor, g.order));
        push(
            &mut out,
            &format!(
                "  abelian: {}   exponent: {}   |center| = {}   |commutator| = {}",
                g.abelian, g.exponent, g.center_order, g.commutator_order
            ),
        );
        let hist: Vec<String> = g
            .order_histogram
            .iter()
            .map(|(o, c)| format!("{c} of order {o}"))
            .collect();
        push(&mut out, &format!("  element orders: {}", hist.join(", ")));
        if let Some(f) = g.frattini_order {
            push(&mut out, &format!("  |Frattini| = {f}"));
        }
        if let Some(l) = &g.order4_transversal {
            push(
                &mut out,
                &format!("  |L_G| = {}: {}", l.len(), l.join(", ")),
            );
        }
        if let (Some(a2), Some(sq2)) = (g.square_roots_of_identity, g.square_subgroup_involutions)
        {
            push(&mut out, &format!("  |A[2]| = {a2}   |A²[2]| = {sq2}"));
        }
    }

    if let Some(e) = &envelope.element {
        push(&mut out, &format!("element {}", e.canonical));
        push(&mut out, &format!("  star: {}", e.star));
        push(&mut out, &format!("  square: {}", e.square));
        push(
            &mut out,
            &format!(
                "  augmentation: {}   support size: {}",
                e.augmentation, e.support_size
            ),
        );
        push(
            &mut out,
            &format!(
                "  unit: {}   normalized: {}   symmetric: {}   skew: {}",
                e.is_unit, e.is_normalized_unit, e.is_symmetric, e.is_skew
            ),
        );
        if let Some(u) = e.is_unitary {
            push(&mut out, &format!("  unitary: {u}"));
        }
    }

    let render_block = |out: &mut String,
                        prediction: Option<&OrderPrediction>,
                        reports: &[UnitSetReport],
                        all_agree: Option<bool>| {
        if let Some(p) = prediction {
            let vstar = p
                .vstar_order
                .as_ref()
                .map(|o| match o.decimal() {
                    Some(d) => format!("{o} (= {d})"),
                    None => o.to_string(),
                })
                .unwrap_or_else(|| "unknown".into());
            push(
                out,
                &format!(
                    "{} over {}: |V| = {}   |V_*| = {vstar}   [{}]",
                    p.descriptor, p.field, p.v_order, p.source
                ),
            );
            if let Some(lg) = p.lg_size {
                push(out, &format!("  |L_G| = {lg}"));
            }
            if let Some(sk) = &p.sk_order {
                push(out, &format!("  |S_K| = {sk}"));
            }
            for c in &p.caveats {
                push(out, &format!("  caveat: {c}"));
            }
        }
        for r in reports {
            let decimal = r
                .order_decimal
                .map(|d| format!(" (= {d})"))
                .unwrap_or_default();
            let elapsed = r
                .elapsed_s
                .map(|t| format!("   {t:.3}s"))
                .unwrap_or_default();
            let sk = r
                .sk_order
                .as_ref()
                .map(|o| format!("   |S_K| = {o}"))
                .unwrap_or_default();
            push(
                out,
                &format!("  {:17} |V_*| = {}{decimal}{sk}{elapsed}", r.method.to_string(), r.order),
            );
            for n in &r.notes {
                push(out, &format!("    note: {n}"));
            }
            if !r.witnesses.is_empty() {
                push(out, &format!("    witnesses: {}", r.witnesses.join("; ")));
            }
        }
        if let Some(a) = all_agree {
            push(
                out,
                if a {
                    "  all methods agree"
                } else {
                    "  METHODS DISAGREE"
                },
            );
        }
    };

    render_block(
        &mut out,
        envelope.prediction.as_ref(),
        &envelope.reports,
        envelope.all_agree,
    );
    for entry in &envelope.table {
        if let Some(err) = &entry.error {
            push(&mut out, &format!("{}: error: {err}", entry.descriptor));
            continue;
        }
        render_block(
            &mut out,
            entry.prediction.as_ref(),
            &entry.reports,
            entry.all_agree,
        );
    }
    out
}

pub fn emit(path: Option<&std::path::Path>, payload: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, payload),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(payload.as_bytes())
        }
    }
}
