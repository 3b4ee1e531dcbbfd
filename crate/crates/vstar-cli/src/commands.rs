//! Command implementations: each returns an [`Envelope`] plus the agreement
//! verdict that drives the exit code.

use std::sync::Arc;

use vstar_core::algebra::{AlgebraError, GroupAlgebra};
use vstar_core::field::FieldSpec;
use vstar_core::formulas::{self, FormulaError, OrderPrediction};
use vstar_core::groups::{GroupDescriptor, GroupError};
use vstar_core::unitary::report::{Agreement, FactoredOrder, Method, UnitSetReport};
use vstar_core::unitary::{
    self, bruteforce_unitary, normalized_unit_total, r_subgroup, unitary_order_via_quotient,
    BruteforceOptions, ClosureOptions, UnitaryError,
};

use crate::output::{ConfigEcho, ElementInfo, Envelope, GroupInfo, TableEntry};
use crate::Failure;

pub struct Ctx {
    pub descriptor: GroupDescriptor,
    pub field: Arc<FieldSpec>,
    pub config: ConfigEcho,
    pub budget: u64,
    pub workers: usize,
    pub seed: u64,
    pub timings: bool,
}

impl Ctx {
    fn algebra(&self) -> Result<Option<GroupAlgebra>, Failure> {
        let group = match self.descriptor.build() {
            Ok(g) => g,
            Err(GroupError::OrderTooLarge(_)) => return Ok(None),
            Err(e) => return Err(Failure::Usage(e.to_string())),
        };
        match GroupAlgebra::new(Arc::new(group), self.field.clone()) {
            Ok(alg) => Ok(Some(alg)),
            Err(e @ AlgebraError::CharacteristicMismatch { .. }) => {
                Err(Failure::Usage(e.to_string()))
            }
            Err(e) => Err(Failure::Error(e.to_string())),
        }
    }

    fn scrub(&self, report: &mut UnitSetReport) {
        if !self.timings {
            report.elapsed_s = None;
        }
    }

    fn closure_options(&self, expected: Option<FactoredOrder>) -> ClosureOptions {
        ClosureOptions {
            budget: self.budget,
            seed: self.seed,
            random_fallback: 128,
            expected,
        }
    }
}

fn formula_report(prediction: &OrderPrediction) -> Option<UnitSetReport> {
    let vstar = prediction.vstar_order.clone()?;
    Some(UnitSetReport {
        descriptor: prediction.descriptor.clone(),
        field: prediction.field.clone(),
        method: Method::Formula,
        order_decimal: vstar.decimal(),
        order: vstar,
        witnesses: Vec::new(),
        elapsed_s: None,
        agreement: None,
        sk_order: prediction.sk_order.clone(),
        notes: prediction.caveats.clone(),
    })
}

fn usage_from(e: FormulaError) -> Failure {
    Failure::Usage(e.to_string())
}

fn map_unitary_err(e: UnitaryError) -> Failure {
    match e {
        UnitaryError::BudgetExceeded { .. } | UnitaryError::ClosureBudget(_) => {
            Failure::Budget(e.to_string())
        }
        UnitaryError::NotInCoveredClass(_) | UnitaryError::OddCharacteristicRequired => {
            Failure::Usage(e.to_string())
        }
        other => Failure::Error(other.to_string()),
    }
}

/// Fills each report's agreement matrix and returns whether all orders match.
fn reconcile(reports: &mut [UnitSetReport]) -> bool {
    let orders: Vec<(Method, FactoredOrder)> = reports
        .iter()
        .map(|r| (r.method, r.order.clone()))
        .collect();
    let find = |m: Method| orders.iter().find(|(om, _)| *om == m).map(|(_, o)| o);
    for r in reports.iter_mut() {
        let mut agreement = Agreement::default();
        let mine = r.order.clone();
        if r.method != Method::Formula {
            agreement.formula = find(Method::Formula).map(|o| *o == mine);
        }
        if r.method != Method::Bruteforce {
            agreement.bruteforce = find(Method::Bruteforce).map(|o| *o == mine);
        }
        if r.method != Method::ClosureQuotient {
            agreement.closure = find(Method::ClosureQuotient).map(|o| *o == mine);
        }
        if r.method != Method::Structural {
            agreement.structural = find(Method::Structural).map(|o| *o == mine);
        }
        r.agreement = Some(agreement);
    }
    orders.windows(2).all(|w| w[0].1 == w[1].1)
}

pub fn run_predict(ctx: &Ctx) -> Result<(Envelope, bool), Failure> {
    let prediction = formulas::predict(&ctx.descriptor, &ctx.field).map_err(usage_from)?;
    let mut envelope = Envelope::new("predict", ctx.config.clone());
    envelope.prediction = Some(prediction);
    Ok((envelope, true))
}

pub fn run_bruteforce(ctx: &Ctx) -> Result<(Envelope, bool), Failure> {
    let alg = ctx.algebra()?.ok_or_else(|| {
        Failure::Budget(format!(
            "{} is too large to construct, let alone enumerate",
            ctx.descriptor
        ))
    })?;
    let mut report = bruteforce_unitary(
        &alg,
        &BruteforceOptions {
            budget: ctx.budget,
            workers: ctx.workers,
        },
    )
    .map_err(map_unitary_err)?;
    ctx.scrub(&mut report);

    let mut envelope = Envelope::new("bruteforce", ctx.config.clone());
    let prediction = formulas::predict(&ctx.descriptor, &ctx.field).ok();
    let mut reports = Vec::new();
    if let Some(p) = &prediction {
        if let Some(f) = formula_report(p) {
            reports.push(f);
        }
    }
    reports.push(report);
    let agree = reconcile(&mut reports);
    envelope.prediction = prediction;
    envelope.reports = reports;
    envelope.all_agree = Some(agree);
    Ok((envelope, agree))
}

pub fn run_closure(ctx: &Ctx) -> Result<(Envelope, bool), Failure> {
    let alg = ctx.algebra()?.ok_or_else(|| {
        Failure::Budget(format!("{} is too large to construct", ctx.descriptor))
    })?;
    let prediction = formulas::predict(&ctx.descriptor, &ctx.field).ok();
    let expected = prediction.as_ref().and_then(|p| p.sk_order.clone());
    let (mut report, _sk) = unitary_order_via_quotient(&alg, &ctx.closure_options(expected))
        .map_err(map_unitary_err)?;
    ctx.scrub(&mut report);

    let mut envelope = Envelope::new("closure", ctx.config.clone());
    let mut reports = Vec::new();
    if let Some(p) = &prediction {
        if let Some(f) = formula_report(p) {
            reports.push(f);
        }
    }
    let shortfall = !report.notes.is_empty();
    reports.push(report);
    let agree = reconcile(&mut reports) && !shortfall;
    envelope.prediction = prediction;
    envelope.reports = reports;
    envelope.all_agree = Some(agree);
    Ok((envelope, agree))
}

/// |V_*| composed as |G| · |R| · |U| with U the non-group part of V_*(KA);
/// only for order-4 inversion extensions and only when both sub-counts fit
/// the budget.
fn structural_report(ctx: &Ctx, alg: &GroupAlgebra) -> Result<Option<UnitSetReport>, Failure> {
    let base = match &ctx.descriptor {
        GroupDescriptor::Quaternion(size) => GroupDescriptor::Cyclic(size / 2),
        GroupDescriptor::SemidirectInversion {
            base, b_order: 4, ..
        } => base.as_ref().clone(),
        _ => return Ok(None),
    };
    let start = std::time::Instant::now();
    let q = ctx.field.order();
    let group_order = alg.group().order() as u64;
    let a_order = group_order / 2;
    let r_size = (q as u128)
        .checked_pow((a_order / 2) as u32)
        .unwrap_or(u128::MAX);
    let a_candidates = (q as u128)
        .checked_pow((a_order - 1) as u32)
        .unwrap_or(u128::MAX);
    if r_size > ctx.budget as u128 || a_candidates > ctx.budget as u128 {
        return Ok(None);
    }

    let r = r_subgroup(alg, ctx.budget).map_err(map_unitary_err)?;
    for x in r.iter() {
        let ok = unitary::is_unitary(&x).map_err(map_unitary_err)? && x.square().is_one();
        if !ok {
            return Err(Failure::Error(format!(
                "member {x} of R is not a unitary involution"
            )));
        }
    }

    let a_group = base
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let a_alg = GroupAlgebra::new(Arc::new(a_group), ctx.field.clone())
        .map_err(|e| Failure::Error(e.to_string()))?;
    let a_report = bruteforce_unitary(
        &a_alg,
        &BruteforceOptions {
            budget: ctx.budget,
            workers: ctx.workers,
        },
    )
    .map_err(map_unitary_err)?;
    let a_vstar = a_report
        .order_decimal
        .ok_or_else(|| Failure::Error("abelian count overflow".into()))?;
    if a_vstar % a_order != 0 {
        return Err(Failure::Error(format!(
            "|V_*(KA)| = {a_vstar} is not divisible by |A| = {a_order}"
        )));
    }
    let u_size = a_vstar / a_order;
    let total = group_order * r.len() as u64 * u_size;

    let mut report = UnitSetReport {
        descriptor: ctx.descriptor.to_string(),
        field: ctx.field.name(),
        method: Method::Structural,
        order: FactoredOrder::rebase(total, q),
        order_decimal: Some(total),
        witnesses: r.first(4).iter().map(|x| x.format()).collect(),
        elapsed_s: Some(start.elapsed().as_secs_f64()),
        agreement: None,
        sk_order: None,
        notes: vec![format!(
            "composed as |G|·|R|·|U| = {group_order}·{}·{u_size}, |R| = q^(|A|/2), \
             |U| = |V_*(KA)|/|A|",
            r.len()
        )],
    };
    ctx.scrub(&mut report);
    Ok(Some(report))
}

/// Runs every applicable method under the budget and reconciles.
pub fn run_verify(ctx: &Ctx) -> Result<(Envelope, bool), Failure> {
    let prediction = formulas::predict(&ctx.descriptor, &ctx.field).map_err(usage_from)?;
    let mut reports = Vec::new();
    if let Some(f) = formula_report(&prediction) {
        reports.push(f);
    }

    if let Some(alg) = ctx.algebra()? {
        if normalized_unit_total(&alg) <= ctx.budget as u128 {
            let mut r = bruteforce_unitary(
                &alg,
                &BruteforceOptions {
                    budget: ctx.budget,
                    workers: ctx.workers,
                },
            )
            .map_err(map_unitary_err)?;
            ctx.scrub(&mut r);
            reports.push(r);
        }

        if ctx.descriptor.normality_class().is_some() {
            let expected = prediction.sk_order.clone();
            let feasible = match &expected {
                Some(o) => o.decimal().is_some_and(|v| v <= ctx.budget),
                None => true,
            };
            if feasible {
                match unitary_order_via_quotient(&alg, &ctx.closure_options(expected)) {
                    Ok((mut r, _)) => {
                        ctx.scrub(&mut r);
                        reports.push(r);
                    }
                    Err(UnitaryError::ClosureBudget(_)) => {}
                    Err(e) => return Err(map_unitary_err(e)),
                }
            }
        }

        if let Some(r) = structural_report(ctx, &alg)? {
            reports.push(r);
        }
    }

    let agree = reconcile(&mut reports);
    let mut envelope = Envelope::new("verify", ctx.config.clone());
    envelope.prediction = Some(prediction);
    envelope.reports = reports;
    envelope.all_agree = Some(agree);
    Ok((envelope, agree))
}

/// One verify-style block per descriptor in the family range; failures land
/// in the row instead of aborting the table.
pub fn run_table(
    ctx: &Ctx,
    family: &str,
    range: (u32, u32),
) -> Result<(Envelope, bool), Failure> {
    let mut envelope = Envelope::new("table", ctx.config.clone());
    let mut all = true;
    for n in range.0..=range.1 {
        let descriptor = match family {
            "D" => GroupDescriptor::Dihedral(1 << (n + 1)),
            "Q" => GroupDescriptor::Quaternion(1 << (n + 1)),
            "ES" => GroupDescriptor::ExtraspecialQ8(n),
            "ESC4" => GroupDescriptor::ExtraspecialQ8YC4(n),
            other => {
                return Err(Failure::Usage(format!(
                    "unknown table family {other:?}; expected D, Q, ES or ESC4"
                )))
            }
        };
        let row_ctx = Ctx {
            descriptor: descriptor.clone(),
            field: ctx.field.clone(),
            config: ctx.config.clone(),
            budget: ctx.budget,
            workers: ctx.workers,
            seed: ctx.seed,
            timings: ctx.timings,
        };
        match run_verify(&row_ctx) {
            Ok((row, agree)) => {
                all &= agree;
                envelope.table.push(TableEntry {
                    descriptor: descriptor.to_string(),
                    prediction: row.prediction,
                    reports: row.reports,
                    all_agree: row.all_agree,
                    error: None,
                });
            }
            Err(failure) => {
                all = false;
                envelope.table.push(TableEntry {
                    descriptor: descriptor.to_string(),
                    prediction: None,
                    reports: Vec::new(),
                    all_agree: None,
                    error: Some(failure.message().to_string()),
                });
            }
        }
    }
    Ok((envelope, all))
}

pub fn run_inspect(ctx: &Ctx, element: Option<&str>) -> Result<(Envelope, bool), Failure> {
    let group = ctx
        .descriptor
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let stats = group.abelian_stats().ok();
    let info = GroupInfo {
        descriptor: group.descriptor().to_string(),
        order: group.order(),
        abelian: group.is_abelian(),
        exponent: group.exponent(),
        center_order: group.center().len(),
        commutator_order: group.commutator_subgroup().len(),
        order_histogram: group.order_histogram(),
        frattini_order: group.frattini_subgroup().ok().map(|s| s.len()),
        order4_transversal: group.order4_transversal().ok().map(|l| {
            l.iter().map(|&i| group.name(i).to_string()).collect()
        }),
        square_roots_of_identity: stats.map(|s| s.a2),
        square_subgroup_involutions: stats.map(|s| s.squares2),
    };

    let mut envelope = Envelope::new("inspect", ctx.config.clone());
    if let Some(expr) = element {
        let alg = ctx.algebra()?.ok_or_else(|| {
            Failure::Budget(format!("{} is too large to construct", ctx.descriptor))
        })?;
        let x = alg
            .parse_element(expr)
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let is_unitary = x
            .is_normalized_unit()
            .then(|| unitary::is_unitary(&x).expect("normalized"));
        envelope.element = Some(ElementInfo {
            input: expr.to_string(),
            canonical: x.format(),
            star: x.star().format(),
            square: x.square().format(),
            augmentation: alg.field().format_element(x.augmentation()),
            support_size: x.support().len(),
            is_unit: x.is_unit(),
            is_normalized_unit: x.is_normalized_unit(),
            is_symmetric: x.is_symmetric(),
            is_skew: x.is_skew(),
            is_unitary,
        });
    }
    envelope.group = Some(info);
    Ok((envelope, true))
}
