//! Subcommand implementations. Each fills the report's stages and
//! conclusion and returns whether the outcome is definite.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use branch_lab_core::algebra::{
    branching_demo, delta_square_demo, embed_distribution, gf_derive, gf_equal, gf_mul, AlgebraConfig,
    DistributionTag, Equality, GeneralizedFunction,
};
use branch_lab_core::expr::parse_outer;
use branch_lab_core::ideals::{
    derivation_closure, membership, no_largest_ideal_demo, off_diagonality, IdealSpec, MembershipScan,
    MembershipVerdict, OffDiagParams, OffDiagVerdict,
};
use branch_lab_core::pairing::Panel;
use branch_lab_core::sequences::{independence_certificate, FiniteSpan, GridSpec, IndependenceVerdict};
use branch_lab_core::weaklimit::{classify_membership, nosquare_demo, Classification, Schedule};
use branch_lab_core::{DomainInterval, SmoothSequence};
use serde_json::{json, to_value};

use crate::literal::{parse_sequence, sequence_file, sequence_list};
use crate::report::{summarize, trace_rows, Report, Stage};
use crate::{Command, DemoCommand, GfCommand, IdealCommand, SpanCommand};

/// The bare tail when there is nothing else to show.
fn show(s: &SmoothSequence) -> String {
    if s.exceptional().is_empty() && s.start() == 1 {
        s.tail().to_string()
    } else {
        s.to_literal()
    }
}

fn symmetric() -> DomainInterval {
    DomainInterval::new(-PI, PI).expect("constant domain")
}

fn periodic() -> DomainInterval {
    DomainInterval::new(0.0, 2.0 * PI).expect("constant domain")
}

/// Domain, panel and schedule for the weak-limit based commands.
struct Sweep {
    dom: DomainInterval,
    panel: Panel,
    schedule: Schedule,
    tol: f64,
}

fn sweep(report: &mut Report) -> Result<Sweep> {
    let dom = report.config.resolve_domain(symmetric());
    Ok(Sweep { dom, panel: report.config.panel.build(&dom)?, schedule: report.config.schedule()?, tol: report.config.tol })
}

fn off_diag_params(report: &mut Report, fallback: DomainInterval) -> OffDiagParams {
    let domain = report.config.resolve_domain(fallback);
    OffDiagParams {
        domain,
        cell_width: report.config.cell_width,
        nu_max: report.config.certificate_nu_max,
        unit: report.config.unit.clone(),
    }
}

pub fn dispatch(command: &Command, report: &mut Report) -> Result<bool> {
    match command {
        Command::Limit(a) => limit(&a.seq, report, true),
        Command::Classify(a) => limit(&a.seq, report, false),
        Command::Ideal(IdealCommand::Check(a)) => ideal_check(a, report),
        Command::Span(SpanCommand::Independence(a)) => span_independence(a, report),
        Command::Gf(g) => gf(g, report),
        Command::Demo(d) => demo(d, report),
    }
}

fn limit(seq: &str, report: &mut Report, per_member: bool) -> Result<bool> {
    let s = parse_sequence(seq)?;
    let sw = sweep(report)?;
    let v = classify_membership(&s, &sw.panel, &sw.schedule, sw.tol)?;
    let verdict = if per_member { summarize(&v) } else { json!({ "classification": v.classification }) };
    let definite = v.classification != Classification::Mixed;
    report.stages.push(Stage::new("classify", definite, verdict).with_pairings(trace_rows("s", &v.per_test_function)));
    report.conclusion = format!("{} classifies as {}", show(&s), to_value(v.classification)?.as_str().unwrap_or("?"));
    Ok(definite)
}

fn ideal_check(a: &crate::IdealCheckArgs, report: &mut Report) -> Result<bool> {
    let params = off_diag_params(report, periodic());
    let ideal = if a.eventually_zero {
        IdealSpec::EventuallyZero
    } else {
        IdealSpec::generated(sequence_list(&a.generators)?)
    };
    let verdict = off_diagonality(&ideal, &params)?;
    let off_definite = !matches!(verdict, OffDiagVerdict::Inconclusive { .. });
    report.stages.push(Stage::new("off_diagonality", off_definite, json!({ "ideal": ideal, "result": verdict })));

    let scan = MembershipScan::new(params.domain);
    let closure = derivation_closure(&ideal, 1, &scan);
    report.stages.push(Stage::new("derivation_closure", true, to_value(&closure)?));

    let mut definite = off_definite;
    let mut conclusion = match &verdict {
        OffDiagVerdict::OffDiagonal { .. } => "the ideal is off-diagonal".to_string(),
        OffDiagVerdict::ContainsUnit { witness, .. } => format!("the ideal contains the unit {}", show(witness)),
        OffDiagVerdict::Inconclusive { reason } => format!("off-diagonality inconclusive: {reason}"),
    };
    if let Some(m) = &a.member {
        let s = parse_sequence(m)?;
        let mv = membership(&s, &ideal, &scan);
        let decided = !matches!(mv, MembershipVerdict::Unknown);
        definite &= decided;
        let word = match mv {
            MembershipVerdict::InIdeal { .. } => "in the ideal",
            MembershipVerdict::NotInIdeal { .. } => "not in the ideal",
            MembershipVerdict::Unknown => "of unknown membership",
        };
        conclusion = format!("{conclusion}; {} is {word}", show(&s));
        report.stages.push(Stage::new("membership", decided, json!({ "sequence": s, "result": mv })));
    }
    report.conclusion = conclusion;
    Ok(definite)
}

fn span_independence(a: &crate::SpanArgs, report: &mut Report) -> Result<bool> {
    let dom = report.config.resolve_domain(periodic());
    let first = FiniteSpan::new(sequence_list(&a.first)?)?;
    let second = FiniteSpan::new(sequence_list(&a.second)?)?;
    let grid = GridSpec { nu_values: (1..=a.grid_nu).collect(), x_count: a.grid_x };
    let v = independence_certificate(&first, &second, &dom, &grid)?;
    let trivial = v.is_trivial_intersection();
    report.stages.push(Stage::new("independence", trivial, json!({ "first": first, "second": second, "result": v })));
    report.conclusion = match v {
        IndependenceVerdict::TrivialIntersection { .. } => "the spans meet only in zero".into(),
        IndependenceVerdict::Inconclusive { .. } => "sampled bases are rank deficient; no certificate".into(),
    };
    Ok(trivial)
}

fn algebra(spec: &str, report: &mut Report) -> Result<AlgebraConfig> {
    if spec.trim() == "eventually-zero" {
        let dom = report.config.resolve_domain(symmetric());
        return Ok(AlgebraConfig::eventually_zero(dom));
    }
    let params = off_diag_params(report, symmetric());
    let ideal = IdealSpec::generated(sequence_list(&[spec.to_string()])?);
    Ok(AlgebraConfig::new(ideal, params.domain, &params)?)
}

/// `delta`, `heaviside`, `delta:K` or a sequence literal.
fn element(text: &str, algebra: &AlgebraConfig) -> Result<GeneralizedFunction> {
    let t = text.trim();
    let tag = match t {
        "delta" => Some(DistributionTag::Delta),
        "heaviside" => Some(DistributionTag::Heaviside),
        _ => match t.strip_prefix("delta:") {
            Some(k) => {
                let order: u32 = k.trim().parse().with_context(|| format!("derivative order in {t:?}"))?;
                Some(if order == 0 { DistributionTag::Delta } else { DistributionTag::DeltaDerivative { order } })
            }
            None => None,
        },
    };
    Ok(match tag {
        Some(tag) => embed_distribution(&tag, algebra)?,
        None => GeneralizedFunction::new(parse_sequence(t)?, algebra)?,
    })
}

fn gf(g: &GfCommand, report: &mut Report) -> Result<bool> {
    match g {
        GfCommand::Mul(a) => {
            let alg = algebra(&a.algebra.algebra, report)?;
            let (f, h) = (element(&a.lhs, &alg)?, element(&a.rhs, &alg)?);
            let p = gf_mul(&f, &h)?;
            report.stages.push(Stage::new(
                "mul",
                true,
                json!({ "lhs": f.representative(), "rhs": h.representative(), "product": p.representative() }),
            ));
            report.conclusion = format!("product representative {}", show(p.representative()));
            Ok(true)
        }
        GfCommand::Derive(a) => {
            let alg = algebra(&a.algebra.algebra, report)?;
            let f = element(&a.lhs, &alg)?;
            let d = gf_derive(&f, a.order)?;
            report.stages.push(Stage::new(
                "derive",
                true,
                json!({ "lhs": f.representative(), "order": a.order, "derivative": d.representative() }),
            ));
            report.conclusion = format!("derivative representative {}", show(d.representative()));
            Ok(true)
        }
        GfCommand::Equal(a) => {
            let alg = algebra(&a.algebra.algebra, report)?;
            let (f, h) = (element(&a.lhs, &alg)?, element(&a.rhs, &alg)?);
            let eq = gf_equal(&f, &h)?;
            let definite = !matches!(eq, Equality::Unknown);
            report.stages.push(Stage::new(
                "equal",
                definite,
                json!({ "lhs": f.representative(), "rhs": h.representative(), "result": eq }),
            ));
            report.conclusion = match eq {
                Equality::Equal => "the representatives define the same element".into(),
                Equality::NotEqual { .. } => "the representatives define different elements".into(),
                Equality::Unknown => "equality could not be decided".into(),
            };
            Ok(definite)
        }
    }
}

fn demo(d: &DemoCommand, report: &mut Report) -> Result<bool> {
    match d {
        DemoCommand::Nosquare { seq } => {
            let v = parse_sequence(seq)?;
            let sw = sweep(report)?;
            let r = nosquare_demo(&v, &sw.dom, &sw.panel, &sw.schedule, sw.tol)?;
            let passed = r.counterexample_confirmed && r.half_mass_checks.iter().all(|c| c.within_tolerance);
            report.stages.push(
                Stage::new("v", r.v_verdict.classification == Classification::EvidenceV, summarize(&r.v_verdict))
                    .with_pairings(trace_rows("v", &r.v_verdict.per_test_function)),
            );
            report.stages.push(
                Stage::new(
                    "v_squared",
                    r.v_squared_verdict.classification == Classification::EvidenceS,
                    summarize(&r.v_squared_verdict),
                )
                .with_pairings(trace_rows("v^2", &r.v_squared_verdict.per_test_function)),
            );
            report.stages.push(Stage::new(
                "half_mass",
                r.half_mass_checks.iter().all(|c| c.within_tolerance),
                to_value(&r.half_mass_checks)?,
            ));
            report.conclusion = r.conclusion;
            Ok(passed)
        }
        DemoCommand::NoLargestIdeal { first, second } => {
            let params = off_diag_params(report, periodic());
            let r = no_largest_ideal_demo(&parse_sequence(first)?, &parse_sequence(second)?, &params)?;
            let details = [
                to_value(&r.first_verdict)?,
                to_value(&r.second_verdict)?,
                to_value(&r.sum)?,
                to_value(&r.unit)?,
            ];
            for (stage, detail) in r.stages.iter().zip(details) {
                report.stages.push(Stage::new(
                    stage.name.clone(),
                    stage.passed,
                    json!({ "summary": stage.summary, "result": detail }),
                ));
            }
            report.conclusion = r.conclusion;
            Ok(r.applicable && r.stages.iter().all(|s| s.passed))
        }
        DemoCommand::Branching { reps, rep, op } => {
            let mut list: Vec<SmoothSequence> = match reps {
                Some(path) => sequence_file(path)?,
                None => Vec::new(),
            };
            for r in rep {
                list.push(parse_sequence(r)?);
            }
            if list.is_empty() {
                list = vec![parse_sequence("cos(nu*x)")?, SmoothSequence::zero()];
            }
            let operation = parse_outer(op).with_context(|| format!("in operation {op:?}"))?;
            let sw = sweep(report)?;
            let r = branching_demo(&list, &operation, &sw.dom, &sw.panel, &sw.schedule, sw.tol)?;
            for (i, e) in r.entries.iter().enumerate() {
                let series = format!("rep[{i}]");
                report.stages.push(
                    Stage::new(
                        series.clone(),
                        e.representative_verdict.classification == Classification::EvidenceV,
                        json!({
                            "representative": e.representative,
                            "representative_verdict": summarize(&e.representative_verdict),
                            "image": e.image,
                            "image_verdict": summarize(&e.image_verdict),
                        }),
                    )
                    .with_pairings(trace_rows(&format!("{series}.image"), &e.image_verdict.per_test_function)),
                );
            }
            report.stages.push(Stage::new(
                "branching",
                r.branching_witnessed,
                json!({ "operation": r.operation, "all_null": r.all_null, "distinct_pairs": r.distinct_pairs }),
            ));
            report.conclusion = r.conclusion;
            Ok(r.branching_witnessed)
        }
        DemoCommand::DeltaSquare => {
            let sw = sweep(report)?;
            let r = delta_square_demo(&sw.dom, &sw.panel, &sw.schedule, sw.tol)?;
            if r.checks.is_empty() {
                bail!("no panel member has 0 in its support; the delta square check needs one");
            }
            report.stages.push(
                Stage::new(
                    "delta_squared",
                    r.verdict.classification == Classification::EvidenceDivergent,
                    json!({ "delta": r.delta, "delta_squared": r.delta_squared, "verdict": summarize(&r.verdict) }),
                )
                .with_pairings(trace_rows("delta^2", &r.verdict.per_test_function)),
            );
            report.stages.push(Stage::new("growth_checks", r.checks.iter().all(|c| c.passed), to_value(&r.checks)?));
            report.conclusion = r.conclusion;
            Ok(r.passed)
        }
    }
}
