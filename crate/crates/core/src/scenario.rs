//! Measurement scenarios and the multipartite family `Σ(n, k, r)`.
//!
//! `Σ(n, k, r)` has `n` sites; site `i` offers `k[i]` settings and is present
//! in `r[i]` copies. Copy `m` of site `i` is the discrete complex on its
//! settings, and the scenario is the join of all copies. Measurement labels
//! are `Site.copy.jSetting` (e.g. `B.2.j3`), and the copy symmetry names the
//! identified measurement `Site.jSetting`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::complex::{Quotient, SimplicialComplex, VertexPartition};
use crate::error::{Error, Result};

/// A complex of compatible measurements plus the outcome count of each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    complex: SimplicialComplex,
    outcomes: BTreeMap<String, usize>,
}

impl Scenario {
    pub fn new(complex: SimplicialComplex, outcomes: BTreeMap<String, usize>) -> Result<Self> {
        for v in complex.vertices() {
            match outcomes.get(v) {
                None => {
                    return Err(Error::InvalidScenario(format!(
                        "no outcome count for `{v}`"
                    )))
                }
                Some(0) => {
                    return Err(Error::InvalidScenario(format!("`{v}` has no outcomes")))
                }
                _ => {}
            }
        }
        if let Some(extra) = outcomes.keys().find(|k| complex.index_of(k).is_none()) {
            return Err(Error::InvalidScenario(format!(
                "outcome count given for unknown measurement `{extra}`"
            )));
        }
        Ok(Scenario { complex, outcomes })
    }

    /// Every measurement gets `outcomes` outcomes.
    pub fn uniform(complex: SimplicialComplex, outcomes: usize) -> Result<Self> {
        let map = complex
            .vertices()
            .iter()
            .map(|v| (v.clone(), outcomes))
            .collect();
        Self::new(complex, map)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn outcomes(&self) -> &BTreeMap<String, usize> {
        &self.outcomes
    }

    pub fn cardinality(&self, vertex: &str) -> Option<usize> {
        self.outcomes.get(vertex).copied()
    }

    /// Number of joint outcomes on `vertices`.
    pub fn joint_outcome_count<S: AsRef<str>>(&self, vertices: &[S]) -> u128 {
        vertices
            .iter()
            .map(|v| self.outcomes[v.as_ref()] as u128)
            .product()
    }

    /// Join of two scenarios with disjoint measurement labels.
    pub fn join(&self, other: &Self) -> Result<Self> {
        let complex = self.complex.join(&other.complex)?;
        let mut outcomes = self.outcomes.clone();
        outcomes.extend(other.outcomes.iter().map(|(k, v)| (k.clone(), *v)));
        Self::new(complex, outcomes)
    }

    /// Same scenario with every measurement renamed by `f`.
    pub fn relabel<F: Fn(&str) -> String>(&self, f: F) -> Result<Self> {
        let complex = SimplicialComplex::from_maximal_faces(
            self.complex
                .maximal_faces()
                .into_iter()
                .map(|face| face.into_iter().map(|v| f(&v)).collect::<Vec<_>>()),
        )?;
        let outcomes: BTreeMap<String, usize> =
            self.outcomes.iter().map(|(k, v)| (f(k), *v)).collect();
        if outcomes.len() != self.outcomes.len() {
            return Err(Error::InvalidScenario("relabelling merges measurements".into()));
        }
        Self::new(complex, outcomes)
    }

    /// Quotient scenario under `partition`, with the face map used for
    /// averaging. Identified measurements must share their outcome count.
    pub fn quotient(&self, partition: &VertexPartition) -> Result<(Scenario, Quotient)> {
        let q = self.complex.quotient(partition)?;
        let mut outcomes = BTreeMap::new();
        for block in &partition.blocks {
            let mut cards = block.members.iter().filter_map(|v| self.cardinality(v));
            let first = cards.next().ok_or_else(|| {
                Error::InvalidPartition(format!("block `{}` has no measurements", block.name))
            })?;
            if cards.any(|c| c != first) {
                return Err(Error::InvalidPartition(format!(
                    "block `{}` mixes outcome counts",
                    block.name
                )));
            }
            outcomes.insert(block.name.clone(), first);
        }
        let scenario = Scenario::new(q.complex.clone(), outcomes)?;
        Ok((scenario, q))
    }
}

pub fn quotient_scenario(s: &Scenario, sym: &SiteSymmetry) -> Result<(Scenario, Quotient)> {
    s.quotient(sym.partition())
}

pub fn site_name(site: usize) -> String {
    if site < 26 {
        char::from(b'A' + site as u8).to_string()
    } else {
        format!("S{}", site + 1)
    }
}

/// `Site.copy.jSetting`, all 1-based.
pub fn measurement_label(site: usize, copy: usize, setting: usize) -> String {
    format!("{}.{}.j{}", site_name(site), copy, setting)
}

/// Name of a measurement after identifying copies: `Site.jSetting`.
pub fn macroscopic_label(site: usize, setting: usize) -> String {
    format!("{}.j{}", site_name(site), setting)
}

/// Parses `Site.copy.jSetting` into `(site name, copy, setting)`.
pub fn parse_measurement_label(label: &str) -> Option<(&str, usize, usize)> {
    let mut parts = label.split('.');
    let site = parts.next()?;
    let copy = parts.next()?.parse().ok()?;
    let setting = parts.next()?.strip_prefix('j')?.parse().ok()?;
    if parts.next().is_some() || site.is_empty() {
        return None;
    }
    Some((site, copy, setting))
}

/// Parameters `(n, k, r)` of a multipartite scenario, plus the outcome
/// count at each site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultipartiteSpec {
    k: Vec<usize>,
    r: Vec<usize>,
    outcomes: Vec<usize>,
}

impl MultipartiteSpec {
    pub fn new(k: Vec<usize>, r: Vec<usize>) -> Result<Self> {
        let outcomes = vec![2; k.len()];
        Self::with_outcomes(k, r, outcomes)
    }

    pub fn with_outcomes(k: Vec<usize>, r: Vec<usize>, outcomes: Vec<usize>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidSpec("at least one site is required".into()));
        }
        if k.len() != r.len() || k.len() != outcomes.len() {
            return Err(Error::InvalidSpec(format!(
                "k has {} entries, r has {}, outcomes has {}",
                k.len(),
                r.len(),
                outcomes.len()
            )));
        }
        if k.iter().chain(&r).chain(&outcomes).any(|&x| x == 0) {
            return Err(Error::InvalidSpec("all entries must be at least 1".into()));
        }
        Ok(MultipartiteSpec { k, r, outcomes })
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }

    pub fn k(&self) -> &[usize] {
        &self.k
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    /// The same sites with a single copy each.
    pub fn base(&self) -> Self {
        MultipartiteSpec {
            k: self.k.clone(),
            r: vec![1; self.n()],
            outcomes: self.outcomes.clone(),
        }
    }

    pub fn with_copies(&self, r: Vec<usize>) -> Result<Self> {
        Self::with_outcomes(self.k.clone(), r, self.outcomes.clone())
    }

    /// Sites sorted by `(k, r, outcomes)`; isomorphic specs share it.
    pub fn canonical(&self) -> Self {
        let mut sites: Vec<(usize, usize, usize)> = (0..self.n())
            .map(|i| (self.k[i], self.r[i], self.outcomes[i]))
            .collect();
        sites.sort();
        MultipartiteSpec {
            k: sites.iter().map(|s| s.0).collect(),
            r: sites.iter().map(|s| s.1).collect(),
            outcomes: sites.iter().map(|s| s.2).collect(),
        }
    }

    /// Sites reordered by `order` (a permutation of `0..n`).
    pub fn permuted(&self, order: &[usize]) -> Self {
        MultipartiteSpec {
            k: order.iter().map(|&i| self.k[i]).collect(),
            r: order.iter().map(|&i| self.r[i]).collect(),
            outcomes: order.iter().map(|&i| self.outcomes[i]).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.k.iter().zip(&self.r).map(|(k, r)| k * r).sum()
    }

    pub fn maximal_face_count(&self) -> u128 {
        self.k
            .iter()
            .zip(&self.r)
            .map(|(&k, &r)| (k as u128).pow(r as u32))
            .product()
    }
}

impl fmt::Display for MultipartiteSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "n={};k={};r={}", self.n(), join(&self.k), join(&self.r))?;
        if self.outcomes.iter().any(|&o| o != 2) {
            write!(f, ";o={}", join(&self.outcomes))?;
        }
        Ok(())
    }
}

impl FromStr for MultipartiteSpec {
    type Err = Error;

    /// `n=2;k=2,3;r=1,2`, optionally followed by `;o=2,2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidSpec(format!("`{s}`: {msg}"));
        let list = |v: &str| -> Result<Vec<usize>> {
            v.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| bad("expected integers")))
                .collect()
        };
        let (mut n, mut k, mut r, mut o) = (None, None, None, None);
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match key.trim() {
                "n" => n = Some(value.trim().parse::<usize>().map_err(|_| bad("bad n"))?),
                "k" => k = Some(list(value)?),
                "r" => r = Some(list(value)?),
                "o" => o = Some(list(value)?),
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let k = k.ok_or_else(|| bad("missing k"))?;
        let r = r.ok_or_else(|| bad("missing r"))?;
        if let Some(n) = n {
            if n != k.len() {
                return Err(bad("n does not match the length of k"));
            }
        }
        let o = o.unwrap_or_else(|| vec![2; k.len()]);
        Self::with_outcomes(k, r, o)
    }
}

/// The copy symmetry of `Σ(n, k, r)`, represented by its orbit partition:
/// one block per (site, setting) holding that setting on every copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteSymmetry {
    partition: VertexPartition,
}

impl SiteSymmetry {
    pub fn partition(&self) -> &VertexPartition {
        &self.partition
    }

    pub fn for_spec(spec: &MultipartiteSpec) -> Self {
        let mut blocks = Vec::new();
        for site in 0..spec.n() {
            for setting in 1..=spec.k[site] {
                let members: Vec<String> = (1..=spec.r[site])
                    .map(|copy| measurement_label(site, copy, setting))
                    .collect();
                blocks.push((macroscopic_label(site, setting), members));
            }
        }
        SiteSymmetry {
            partition: VertexPartition::new(blocks).expect("site symmetry blocks are disjoint"),
        }
    }
}

/// Builds `Σ(n, k, r)` and its copy symmetry.
pub fn build_nkr(spec: &MultipartiteSpec) -> (Scenario, SiteSymmetry) {
    let mut complex = SimplicialComplex::empty();
    let mut outcomes = BTreeMap::new();
    for site in 0..spec.n() {
        for copy in 1..=spec.r[site] {
            let labels: Vec<String> = (1..=spec.k[site])
                .map(|j| measurement_label(site, copy, j))
                .collect();
            for l in &labels {
                outcomes.insert(l.clone(), spec.outcomes[site]);
            }
            let d = SimplicialComplex::discrete(&labels).expect("labels are distinct");
            complex = complex.join(&d).expect("copies carry distinct labels");
        }
    }
    let scenario = Scenario::new(complex, outcomes).expect("every measurement has outcomes");
    (scenario, SiteSymmetry::for_spec(spec))
}

/// Whether the quotient of `sr(Σ(n, k, r))` by the copy symmetry is
/// acyclic: either every site has at least as many copies as settings, or
/// one site has a single copy and all others do.
pub fn predicted_acyclic(spec: &MultipartiteSpec) -> bool {
    let enough = |i: usize| spec.k[i] <= spec.r[i];
    let n = spec.n();
    (0..n).all(enough) || (0..n).any(|i0| spec.r[i0] == 1 && (0..n).filter(|&i| i != i0).all(enough))
}

/// Graham-reduction verdict on the quotient of `Σ(n, k, r)`.
pub fn computed_acyclic(spec: &MultipartiteSpec) -> bool {
    let (scenario, sym) = build_nkr(spec);
    scenario
        .complex()
        .quotient_complex(sym.partition())
        .expect("symmetry partitions the scenario")
        .is_acyclic()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub spec: MultipartiteSpec,
    pub computed: bool,
    pub predicted: bool,
}

impl ScanRow {
    pub fn agree(&self) -> bool {
        self.computed == self.predicted
    }
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Ordered specs the canonical rows stand for.
    pub raw_count: u128,
}

impl ScanReport {
    pub fn disagreements(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| !r.agree())
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements().next().is_none()
    }
}

/// Canonical specs (site pairs `(k, r)` in nondecreasing order) with
/// `1 <= n <= n_max`, `k_i <= k_max`, `r_i <= r_max`, binary outcomes.
pub fn canonical_specs(n_max: usize, k_max: usize, r_max: usize) -> Vec<MultipartiteSpec> {
    let pairs: Vec<(usize, usize)> = (1..=k_max)
        .flat_map(|k| (1..=r_max).map(move |r| (k, r)))
        .collect();
    let mut out = Vec::new();
    for n in 1..=n_max {
        // nondecreasing index sequences of length n
        let mut idx = vec![0usize; n];
        loop {
            let k = idx.iter().map(|&i| pairs[i].0).collect();
            let r = idx.iter().map(|&i| pairs[i].1).collect();
            out.push(MultipartiteSpec::new(k, r).expect("bounds are positive"));
            let mut pos = n;
            while pos > 0 && idx[pos - 1] == pairs.len() - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            let v = idx[pos - 1];
            for slot in idx.iter_mut().skip(pos) {
                *slot = v;
            }
        }
    }
    out
}

pub fn scan_row(spec: &MultipartiteSpec) -> ScanRow {
    ScanRow {
        spec: spec.clone(),
        computed: computed_acyclic(spec),
        predicted: predicted_acyclic(spec),
    }
}

/// Compares the reduction verdict with the predicate on every canonical
/// spec in range. Rows are evaluated in parallel and returned in order.
pub fn scan_predicate(n_max: usize, k_max: usize, r_max: usize) -> ScanReport {
    let specs = canonical_specs(n_max, k_max, r_max);
    let rows = specs.par_iter().map(scan_row).collect();
    let per_site = (k_max * r_max) as u128;
    let raw_count = (1..=n_max as u32).map(|n| per_site.pow(n)).sum();
    ScanReport { rows, raw_count }
}
