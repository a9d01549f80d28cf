use std::path::Path;

use anyhow::{Context, Result};
use monolab::doc::Document;
use monolab::locality::{self, Ceilings, Extension};
use monolab::model::{self, Assignment};
use monolab::scenario::{build_nkr, scan_predicate};
use monolab::{BellFunctional, Rational, EmpiricalModel, MultipartiteSpec, Scenario, SimplicialComplex, VertexPartition};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::ScenarioArg;

/// What a subcommand produced: exit status, both report renderings and an
/// optional document for `--out`.
pub struct Report {
    pub status: u8,
    pub text: String,
    pub json: Value,
    pub document: Option<String>,
}

impl Report {
    fn new(status: u8, text: String, json: Value) -> Self {
        Report {
            status,
            text,
            json,
            document: None,
        }
    }

    fn with_document(mut self, doc: String) -> Self {
        self.document = Some(doc);
        self
    }
}

fn read<T: Document>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    T::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn parse_spec(lit: &str) -> Result<MultipartiteSpec> {
    lit.parse().with_context(|| format!("spec `{lit}`"))
}

fn scenario_of(target: &ScenarioArg) -> Result<Scenario> {
    match (&target.scenario, &target.spec) {
        (Some(path), _) => read(path),
        (None, Some(lit)) => Ok(build_nkr(&parse_spec(lit)?).0),
        (None, None) => unreachable!("clap requires one of --scenario/--spec"),
    }
}

/// Left-aligned columns separated by two spaces.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Report rendering of a rational: integers without a denominator.
fn q(r: &Rational) -> String {
    r.to_string()
}

fn set(v: &[String]) -> String {
    format!("{{{}}}", v.join(","))
}

fn assignment(a: &Assignment) -> String {
    a.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

fn functional_table(f: &BellFunctional) -> String {
    let rows: Vec<Vec<String>> = f
        .terms()
        .iter()
        .map(|t| vec![q(&t.coeff), assignment(&t.outcome)])
        .collect();
    table(&rows)
}

pub fn check_acyclic(path: &Path) -> Result<Report> {
    let c: SimplicialComplex = read(path)?;
    let trace = c.graham_reduce();
    let mut text = String::from(if trace.acyclic { "ACYCLIC\n" } else { "NOT ACYCLIC\n" });
    let order = trace.elimination_order();
    text.push_str(&format!("elimination order: {}\n", if order.is_empty() { "-".into() } else { order.join(",") }));
    let rows: Vec<Vec<String>> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| vec![format!("{}", i + 1), set(&s.face), format!("removes {}", s.removed.join(","))])
        .collect();
    text.push_str(&table(&rows));
    text.push_str(&format!("residual: {}\n", trace.residual));
    let json = json!({
        "acyclic": trace.acyclic,
        "elimination_order": order,
        "steps": trace.steps.iter().map(|s| json!({"face": s.face, "removed": s.removed})).collect::<Vec<_>>(),
        "residual": trace.residual.to_json(),
    });
    Ok(Report::new(u8::from(!trace.acyclic), text, json))
}

pub fn quotient(scenario: &Path, partition: &Path) -> Result<Report> {
    let s: Scenario = read(scenario)?;
    let p: VertexPartition = read(partition)?;
    let (qs, q) = s.quotient(&p)?;
    let doc = qs.to_pretty();
    let json = json!({
        "scenario": qs.to_json(),
        "lifts": q.lifts,
        "vertex_map": q.vertex_map,
    });
    Ok(Report::new(0, doc.clone(), json).with_document(doc))
}

pub fn check_model(path: &Path, ceilings: Ceilings) -> Result<Report> {
    let m: EmpiricalModel = read(path)?;
    let violations = m.validate();
    if !violations.is_empty() {
        let mut text = String::from("NO-SIGNALLING VIOLATION\n");
        for v in &violations {
            text.push_str(&format!("  {v}\n"));
        }
        let json = json!({
            "verdict": "signalling",
            "violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
        });
        return Ok(Report::new(1, text, json));
    }
    Ok(match locality::global_extension(&m, ceilings.global)? {
        Extension::Local(g) => {
            let mut text = format!("LOCAL\nglobal distribution with {} atoms:\n", g.support_size());
            let rows: Vec<Vec<String>> = g
                .cells()
                .map(|(o, p)| {
                    let a: Assignment = g.vertices().iter().cloned().zip(o.iter().copied()).collect();
                    vec![q(p), assignment(&a)]
                })
                .collect();
            text.push_str(&table(&rows));
            let json = json!({"verdict": "local", "witness": g.to_json()});
            Report::new(0, text, json).with_document(g.to_pretty())
        }
        Extension::Nonlocal { functional, .. } => {
            let value = locality::evaluate(&functional, &m)?;
            let bound = functional.bound().cloned().expect("certificate functionals carry a bound");
            let mut text = format!("NONLOCAL\nviolated functional: value {} > local bound {}\n", q(&value), q(&bound));
            text.push_str(&functional_table(&functional));
            let json = json!({
                "verdict": "nonlocal",
                "value": q(&value),
                "functional": functional.to_json(),
            });
            Report::new(1, text, json).with_document(functional.to_pretty())
        }
    })
}

pub fn average(model: &Path, partition: &Path) -> Result<Report> {
    let m: EmpiricalModel = read(model)?;
    let p: VertexPartition = read(partition)?;
    let avg = model::average_quotient(&m, &p)?;
    let doc = avg.to_pretty();
    Ok(Report::new(0, doc.clone(), avg.to_json()).with_document(doc))
}

pub fn bell_eval(functional: &Path, model: &Path) -> Result<Report> {
    let f: BellFunctional = read(functional)?;
    let m: EmpiricalModel = read(model)?;
    let value = locality::evaluate(&f, &m)?;
    let violated = f.bound().map(|b| value > *b);
    let text = match (f.bound(), violated) {
        (Some(b), Some(true)) => format!("value {} > bound {}: VIOLATED\n", q(&value), q(b)),
        (Some(b), _) => format!("value {} <= bound {}\n", q(&value), q(b)),
        _ => format!("value {}\n", q(&value)),
    };
    let json = json!({
        "value": q(&value),
        "bound": f.bound().map(q),
        "violated": violated,
    });
    Ok(Report::new(0, text, json))
}

pub fn local_bound(functional: &Path, target: &ScenarioArg, ceilings: Ceilings) -> Result<Report> {
    let f: BellFunctional = read(functional)?;
    let s = scenario_of(target)?;
    let (value, arg) = locality::local_bound(&f, &s, ceilings.global)?;
    let text = format!("local bound {}\nfirst maximiser: {}\n", q(&value), assignment(&arg));
    let json = json!({"local_bound": q(&value), "maximiser": arg});
    Ok(Report::new(0, text, json))
}

pub fn ns_max(functional: &Path, target: &ScenarioArg, ceilings: Ceilings) -> Result<Report> {
    let f: BellFunctional = read(functional)?;
    let s = scenario_of(target)?;
    let (value, m) = locality::ns_max(&f, &s, ceilings.ns)?;
    let text = format!("no-signalling maximum {}\noptimal model on {} contexts\n", q(&value), m.contexts().len());
    let json = json!({"ns_max": q(&value), "model": m.to_json()});
    Ok(Report::new(0, text, json).with_document(m.to_pretty()))
}

pub fn monogamy(functional: &Path, spec: &str, ceilings: Ceilings) -> Result<Report> {
    let f: BellFunctional = read(functional)?;
    let spec = parse_spec(spec)?;
    let r = locality::monogamy_check(&f, &spec, ceilings)?;
    let verdict = if r.holds { "HOLDS" } else { "FAILS" };
    let relation = if r.holds { "<=" } else { ">" };
    let mut text = format!("{verdict}  {} {relation} {}\n", q(&r.ns_max), q(&r.bound));
    let copies: usize = spec.r().iter().product();
    text.push_str(&table(&[
        vec!["spec".into(), spec.to_string()],
        vec!["R".into(), q(r.base.bound().expect("bound resolved"))],
        vec!["copy tuples".into(), copies.to_string()],
        vec!["lifted terms".into(), r.lifted.terms().len().to_string()],
        vec!["bound".into(), q(&r.bound)],
        vec!["ns max".into(), q(&r.ns_max)],
    ]));
    let json = json!({
        "verdict": verdict.to_lowercase(),
        "spec": spec.to_string(),
        "base": r.base.to_json(),
        "lifted": r.lifted.to_json(),
        "bound": q(&r.bound),
        "ns_max": q(&r.ns_max),
        "witness": r.witness.to_json(),
    });
    Ok(Report::new(u8::from(!r.holds), text, json).with_document(r.witness.to_pretty()))
}

pub fn scan(n: usize, k: usize, r: usize) -> Report {
    let report = scan_predicate(n, k, r);
    let yes = |b: bool| if b { "true" } else { "false" }.to_string();
    let mut rows = vec![vec!["spec".into(), "computed".into(), "predicted".into(), "agree".into()]];
    rows.extend(report.rows.iter().map(|row| {
        vec![
            row.spec.to_string(),
            yes(row.computed),
            yes(row.predicted),
            if row.agree() { "yes" } else { "NO" }.into(),
        ]
    }));
    let disagreements = report.disagreements().count();
    let mut text = table(&rows);
    text.push_str(&format!(
        "rows {}, ordered specs {}, disagreements {disagreements}\n",
        report.rows.len(),
        report.raw_count
    ));
    let json = json!({
        "rows": report.rows.iter().map(|row| json!({
            "spec": row.spec.to_string(),
            "computed": row.computed,
            "predicted": row.predicted,
            "agree": row.agree(),
        })).collect::<Vec<_>>(),
        "ordered_specs": report.raw_count.to_string(),
        "disagreements": disagreements,
    });
    Report::new(u8::from(disagreements > 0), text, json)
}

pub fn witness(spec: &str, ceilings: Ceilings) -> Result<Report> {
    let spec = parse_spec(spec)?;
    Ok(match locality::nonlocal_average_witness(&spec, None, ceilings)? {
        None => Report::new(1, "none\n".into(), json!({"found": false})),
        Some(w) => {
            let bound = w.functional.bound().cloned().expect("catalog functionals carry a bound");
            let mut text = format!(
                "FOUND\naverage value {} > local bound {} for the quotient functional:\n",
                q(&w.value),
                q(&bound)
            );
            text.push_str(&functional_table(&w.functional));
            text.push_str(&format!(
                "microscopic model on the semiregularised scenario: {} contexts\n",
                w.model.contexts().len()
            ));
            let json = json!({
                "found": true,
                "value": q(&w.value),
                "functional": w.functional.to_json(),
                "model": w.model.to_json(),
                "average": w.average.to_json(),
            });
            Report::new(0, text, json).with_document(w.model.to_pretty())
        }
    })
}

pub fn random_model(target: &ScenarioArg, seed: u64, ceilings: Ceilings) -> Result<Report> {
    let s = scenario_of(target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = locality::random_ns_model(&s, &mut rng, ceilings.ns)?;
    let doc = m.to_pretty();
    Ok(Report::new(0, doc.clone(), m.to_json()).with_document(doc))
}
