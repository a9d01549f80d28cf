//! The shipped fixture library, regenerated by `monolab fixtures <dir>`.

use std::path::Path;

use anyhow::{Context, Result};
use monolab::doc::Document;
use monolab::locality::{xor_chsh, BellFunctional, DEFAULT_GLOBAL_CEILING};
use monolab::model::{self, ContextDistribution};
use monolab::rational::ratio;
use monolab::scenario::{build_nkr, MultipartiteSpec};
use monolab::{EmpiricalModel, Scenario, SimplicialComplex, VertexPartition};
use serde_json::json;

use crate::commands::Report;

fn spec(lit: &str) -> MultipartiteSpec {
    lit.parse().expect("literal spec")
}

fn letters(faces: &[&str]) -> SimplicialComplex {
    SimplicialComplex::from_maximal_faces(faces.iter().map(|f| f.chars().map(String::from).collect::<Vec<_>>()))
        .expect("literal complex")
}

fn quotient_of(lit: &str) -> Scenario {
    let (s, sym) = build_nkr(&spec(lit));
    s.quotient(sym.partition()).expect("copy symmetry").0
}

/// PR box with one context moved from 1/2,1/2 to 1/4,1/4,1/2.
fn signalling_pr() -> EmpiricalModel {
    let pr = model::pr_box();
    let mut contexts = pr.contexts().to_vec();
    let face = contexts[0].face().to_vec();
    contexts[0] = ContextDistribution::new(
        face,
        [(vec![0, 0], ratio(1, 4)), (vec![0, 1], ratio(1, 4)), (vec![1, 1], ratio(1, 2))],
    )
    .expect("well-formed cells");
    EmpiricalModel::new(pr.scenario().clone(), contexts).expect("same shape as the PR box")
}

/// Relative path and contents of every fixture.
pub fn library() -> Result<Vec<(String, String)>> {
    let octa = spec("n=2;k=2,2;r=1,2");
    let (octa_scenario, octa_sym) = build_nkr(&octa);
    let base = build_nkr(&spec("n=2;k=2,2;r=1,1")).0;
    let chsh = xor_chsh();
    let chsh_bound = monolab::locality::local_bound(&chsh, &base, DEFAULT_GLOBAL_CEILING)?.0;
    let w = model::rationalize(&model::w_state_zx(), 64)?;

    let mut files = vec![
        ("complexes/octahedron.json", octa_scenario.complex().to_pretty()),
        ("complexes/quotient_322.json", quotient_of("n=2;k=2,2;r=1,2").complex().to_pretty()),
        ("complexes/hollow_bipyramid.json", quotient_of("n=2;k=2,3;r=1,2").complex().to_pretty()),
        ("complexes/solid_bipyramid.json", quotient_of("n=2;k=2,3;r=1,3").complex().to_pretty()),
        ("complexes/path_of_triangles.json", letters(&["abc", "bcd", "cde"]).to_pretty()),
        ("complexes/stuck_cycle.json", letters(&["abc", "cde", "bd"]).to_pretty()),
        ("complexes/triangle_cycle.json", letters(&["ab", "bc", "ca"]).to_pretty()),
        ("complexes/empty.json", SimplicialComplex::empty().to_pretty()),
        ("scenarios/bipyramid_source.json", build_nkr(&spec("n=2;k=2,3;r=1,2")).0.to_pretty()),
        ("partitions/octahedron_copies.json", octa_sym.partition().to_pretty()),
        (
            "partitions/octahedron_identity.json",
            VertexPartition::singletons(octa_scenario.complex()).to_pretty(),
        ),
        (
            "partitions/bipyramid_copies.json",
            build_nkr(&spec("n=2;k=2,3;r=1,2")).1.partition().to_pretty(),
        ),
        ("models/pr_box.json", model::pr_box().to_pretty()),
        ("models/mixed.json", model::totally_mixed(&base).to_pretty()),
        ("models/svetlichny.json", model::svetlichny_box().to_pretty()),
        ("models/pr_times_uniform.json", model::pr_times_uniform().to_pretty()),
        ("models/w_zx.json", w.to_pretty()),
        (
            "models/anticorrelated_triangle.json",
            model::anticorrelated_cycle(&["a", "b", "c"])?.to_pretty(),
        ),
        ("models/signalling_pr.json", signalling_pr().to_pretty()),
        ("functionals/xor_chsh.json", chsh.clone().with_bound(Some(chsh_bound)).to_pretty()),
        ("functionals/zero.json", BellFunctional::zero().to_pretty()),
    ];
    files.sort_by(|a, b| a.0.cmp(b.0));
    Ok(files.into_iter().map(|(p, c)| (p.to_string(), c)).collect())
}

pub fn write_library(dir: &Path) -> Result<Report> {
    let files = library()?;
    for (rel, contents) in &files {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    let names: Vec<&str> = files.iter().map(|(p, _)| p.as_str()).collect();
    let mut text = format!("wrote {} fixtures to {}\n", files.len(), dir.display());
    for n in &names {
        text.push_str(&format!("  {n}\n"));
    }
    Ok(Report {
        status: 0,
        text,
        json: json!({"dir": dir.display().to_string(), "files": names}),
        document: None,
    })
}
