//! Locality and its failures.
//!
//! * [`global_extension`] decides whether a model has a global distribution
//!   by exact LP, returning either the distribution or a separating
//!   [`BellFunctional`] read off the Farkas certificate.
//! * [`local_bound`] and [`ns_max`] bound a functional over deterministic
//!   and no-signalling models.
//! * [`lift_functional`] and [`monogamy_check`] sum a base inequality over
//!   all copy tuples of `Σ(n, k, r)`.
//! * [`nonlocal_average_witness`] searches for a microscopic model whose
//!   macroscopic average is non-local.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::complex::Quotient;
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::model::{self, joint_outcomes, Assignment, ContextDistribution, EmpiricalModel};
use crate::rational::Rational;
use crate::scenario::{build_nkr, parse_measurement_label, site_name, MultipartiteSpec, Scenario};

/// Default ceiling on the number of global assignments `|O^X|`.
pub const DEFAULT_GLOBAL_CEILING: u128 = 1 << 14;
/// Default ceiling on the number of context cells in a no-signalling LP.
pub const DEFAULT_NS_CEILING: u128 = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ceilings {
    pub global: u128,
    pub ns: u128,
}

impl Default for Ceilings {
    fn default() -> Self {
        Ceilings {
            global: DEFAULT_GLOBAL_CEILING,
            ns: DEFAULT_NS_CEILING,
        }
    }
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cards.len()];
    for p in (0..cards.len().saturating_sub(1)).rev() {
        s[p] = s[p + 1] * cards[p + 1];
    }
    s
}

fn cards_of(s: &Scenario, face: &[String]) -> Vec<usize> {
    face.iter().map(|v| s.cardinality(v).expect("vertex of the scenario")).collect()
}

/// One weighted indicator: `coeff · p(outcome)` on the face `outcome.keys()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub outcome: Assignment,
    pub coeff: Rational,
}

impl Term {
    pub fn face(&self) -> Vec<String> {
        self.outcome.keys().cloned().collect()
    }
}

/// A rational linear form on context probabilities, with an optional bound.
///
/// Terms with the same face and outcome are merged and zero terms dropped,
/// so equal functionals compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BellFunctional {
    terms: Vec<Term>,
    bound: Option<Rational>,
}

impl BellFunctional {
    pub fn new<I>(terms: I, bound: Option<Rational>) -> Self
    where
        I: IntoIterator<Item = (Assignment, Rational)>,
    {
        let mut merged: BTreeMap<Assignment, Rational> = BTreeMap::new();
        for (a, c) in terms {
            *merged.entry(a).or_insert_with(Rational::zero) += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(outcome, coeff)| Term { outcome, coeff })
            .collect();
        BellFunctional { terms, bound }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn bound(&self) -> Option<&Rational> {
        self.bound.as_ref()
    }

    pub fn with_bound(mut self, bound: Option<Rational>) -> Self {
        self.bound = bound;
        self
    }

    /// Multiplies coefficients and bound by `k`.
    pub fn scaled(&self, k: &Rational) -> Self {
        Self::new(
            self.terms.iter().map(|t| (t.outcome.clone(), &t.coeff * k)),
            self.bound.as_ref().map(|b| b * k),
        )
    }

    pub fn relabel<F: Fn(&str) -> String>(&self, f: F) -> Self {
        Self::new(
            self.terms.iter().map(|t| {
                let a = t.outcome.iter().map(|(k, v)| (f(k), *v)).collect();
                (a, t.coeff.clone())
            }),
            self.bound.clone(),
        )
    }

    /// Measurements mentioned by some term.
    pub fn vertices(&self) -> BTreeSet<String> {
        self.terms.iter().flat_map(|t| t.outcome.keys().cloned()).collect()
    }

    /// Every term lives on a face of `s` with outcomes in range.
    pub fn check_on(&self, s: &Scenario) -> Result<()> {
        for t in &self.terms {
            let face = t.face();
            if !face.is_empty() && !s.complex().is_face(&face) {
                return Err(Error::InvalidFunctional(format!(
                    "{{{}}} is not a face of the scenario",
                    face.join(",")
                )));
            }
            for (v, &o) in &t.outcome {
                if o >= s.cardinality(v).unwrap_or(0) {
                    return Err(Error::InvalidFunctional(format!("outcome {o} out of range for `{v}`")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for BellFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let cell: Vec<String> = t.outcome.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "{}·p({})", t.coeff, cell.join(","))?;
        }
        if let Some(b) = &self.bound {
            write!(f, " <= {b}")?;
        }
        Ok(())
    }
}

/// `Σ coeff · p(outcome)` over the terms, with marginals taken from `m`.
pub fn evaluate(f: &BellFunctional, m: &EmpiricalModel) -> Result<Rational> {
    f.check_on(m.scenario())?;
    let mut cache: HashMap<Vec<String>, ContextDistribution> = HashMap::new();
    let mut total = Rational::zero();
    for t in &f.terms {
        let face = t.face();
        if !cache.contains_key(&face) {
            let d = m.marginal(&face)?;
            cache.insert(face.clone(), d);
        }
        let p = cache[&face].probability_of(&t.outcome).expect("assignment covers the face");
        total += &t.coeff * p;
    }
    Ok(total)
}

/// Maximum of `f` over deterministic models of `s`, with the first maximising
/// global assignment in lexicographic order (measurements that `f` ignores
/// are set to outcome 0).
pub fn local_bound(f: &BellFunctional, s: &Scenario, ceiling: u128) -> Result<(Rational, Assignment)> {
    f.check_on(s)?;
    let vars: Vec<String> = f.vertices().into_iter().collect();
    let cards = cards_of(s, &vars);
    let needed: u128 = cards.iter().map(|&c| c as u128).product();
    if needed > ceiling {
        return Err(Error::Ceiling {
            what: "deterministic assignments",
            needed,
            ceiling,
        });
    }
    let pos: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let terms: Vec<(Vec<(usize, usize)>, &Rational)> = f
        .terms
        .iter()
        .map(|t| (t.outcome.iter().map(|(v, &o)| (pos[v.as_str()], o)).collect(), &t.coeff))
        .collect();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for s_vals in joint_outcomes(&cards) {
        let value: Rational = terms
            .iter()
            .filter(|(cond, _)| cond.iter().all(|&(p, o)| s_vals[p] == o))
            .map(|(_, c)| *c)
            .sum();
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, s_vals));
        }
    }
    let (value, s_vals) = best.expect("at least one assignment");
    let mut global: Assignment = s.complex().vertices().iter().map(|v| (v.clone(), 0)).collect();
    for (v, o) in vars.into_iter().zip(s_vals) {
        global.insert(v, o);
    }
    Ok((value, global))
}

/// A probability distribution on joint outcomes of all measurements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalDistribution {
    dist: ContextDistribution,
}

impl GlobalDistribution {
    pub fn new(vertices: Vec<String>, cells: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Result<Self> {
        let dist = ContextDistribution::new(vertices, cells)?;
        if dist.cells().any(|(_, p)| p.is_negative()) || !dist.total().is_one() {
            return Err(Error::InvalidModel("global distribution must be nonnegative and sum to 1".into()));
        }
        Ok(GlobalDistribution { dist })
    }

    pub fn vertices(&self) -> &[String] {
        self.dist.face()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&[usize], &Rational)> {
        self.dist.cells()
    }

    pub fn support_size(&self) -> usize {
        self.dist.support_size()
    }

    pub fn probability_of(&self, a: &Assignment) -> Option<Rational> {
        self.dist.probability_of(a)
    }

    pub fn marginal<S: AsRef<str>>(&self, onto: &[S]) -> Result<ContextDistribution> {
        self.dist.marginal(onto)
    }
}

/// Whether `g` marginalises exactly to every context distribution of `m`.
pub fn check_global_witness(g: &GlobalDistribution, m: &EmpiricalModel) -> bool {
    if g.vertices() != m.scenario().complex().vertices() {
        return false;
    }
    let in_range = g.cells().all(|(o, _)| {
        g.vertices()
            .iter()
            .zip(o)
            .all(|(v, &x)| x < m.scenario().cardinality(v).unwrap_or(0))
    });
    in_range
        && m.contexts()
            .iter()
            .all(|c| g.marginal(c.face()).is_ok_and(|d| d == *c))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    Local(GlobalDistribution),
    /// The Farkas certificate (one multiplier per context cell) and the
    /// functional derived from it.
    Nonlocal {
        functional: BellFunctional,
        certificate: Vec<Rational>,
    },
}

impl Extension {
    pub fn is_local(&self) -> bool {
        matches!(self, Extension::Local(_))
    }
}

/// The extension LP: one variable per global assignment, one row per
/// (maximal context, joint outcome) in model order.
fn extension_lp(m: &EmpiricalModel, ceiling: u128) -> Result<LinearProgram> {
    let s = m.scenario();
    let vertices = s.complex().vertices();
    let cards = cards_of(s, vertices);
    let needed: u128 = cards.iter().map(|&c| c as u128).product();
    if needed > ceiling {
        return Err(Error::Ceiling {
            what: "global assignments",
            needed,
            ceiling,
        });
    }
    let pos: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut rows: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut rhs = Vec::new();
    let mut layout = Vec::new();
    for c in m.contexts() {
        let cpos: Vec<usize> = c.face().iter().map(|v| pos[v.as_str()]).collect();
        let ccards: Vec<usize> = cpos.iter().map(|&p| cards[p]).collect();
        layout.push((cpos, strides(&ccards), rows.len()));
        for o in joint_outcomes(&ccards) {
            rhs.push(c.probability(&o));
            rows.push(Vec::new());
        }
    }
    for (var, g) in joint_outcomes(&cards).enumerate() {
        for (cpos, st, offset) in &layout {
            let idx: usize = cpos.iter().zip(st).map(|(&p, &k)| g[p] * k).sum();
            rows[offset + idx].push((var, Rational::one()));
        }
    }
    let mut lp = LinearProgram::new(needed as usize);
    for (row, b) in rows.into_iter().zip(rhs) {
        lp.add_equality(row, b);
    }
    Ok(lp)
}

/// Decides extendability of a valid model exactly.
pub fn global_extension(m: &EmpiricalModel, ceiling: u128) -> Result<Extension> {
    m.ensure_valid()?;
    let lp = extension_lp(m, ceiling)?;
    match lp::solve_feasibility(&lp)? {
        LpOutcome::Feasible { x } => {
            let vertices = m.scenario().complex().vertices().to_vec();
            let cards = cards_of(m.scenario(), &vertices);
            let g = GlobalDistribution::new(vertices, joint_outcomes(&cards).zip(x))?;
            debug_assert!(check_global_witness(&g, m));
            Ok(Extension::Local(g))
        }
        LpOutcome::Infeasible { certificate } => {
            let functional = functional_from_rows(&certificate, m)?;
            Ok(Extension::Nonlocal { functional, certificate })
        }
        other => Err(Error::Verification(format!("unexpected feasibility outcome {other:?}"))),
    }
}

/// Turns a Farkas certificate of the extension LP of `m` into a Bell
/// functional with its local bound, after checking that it is one.
///
/// The multipliers of each context are shifted so the smallest is zero and
/// all are divided by the largest; both moves change value and local bound
/// alike, so the separation survives.
pub fn certificate_to_functional(certificate: &[Rational], m: &EmpiricalModel) -> Result<BellFunctional> {
    let lp = extension_lp(m, u128::MAX)?;
    LpOutcome::Infeasible {
        certificate: certificate.to_vec(),
    }
    .verify(&lp)
    .map_err(Error::Verification)?;
    functional_from_rows(certificate, m)
}

/// Nonzero cells of one context with their certificate multipliers.
type RowCells = Vec<(Vec<usize>, Rational)>;

fn functional_from_rows(y: &[Rational], m: &EmpiricalModel) -> Result<BellFunctional> {
    let s = m.scenario();
    let mut per_context: Vec<(RowCells, &ContextDistribution)> = Vec::new();
    let mut row = 0;
    for c in m.contexts() {
        let cells: RowCells = joint_outcomes(&cards_of(s, c.face()))
            .map(|o| {
                row += 1;
                (o, y[row - 1].clone())
            })
            .collect();
        per_context.push((cells, c));
    }
    if row != y.len() {
        return Err(Error::Verification("certificate length does not match the model".into()));
    }
    let mut terms = Vec::new();
    for (cells, c) in &per_context {
        let min = cells.iter().map(|(_, v)| v).min().cloned().unwrap_or_else(Rational::zero);
        for (o, v) in cells {
            terms.push((c.assignment(o), v - &min));
        }
    }
    let max = terms.iter().map(|(_, v)| v).max().cloned().unwrap_or_else(Rational::zero);
    if !max.is_positive() {
        return Err(Error::Verification("certificate does not separate the model".into()));
    }
    let f = BellFunctional::new(terms.into_iter().map(|(a, v)| (a, v / &max)), None);
    let (bound, _) = local_bound(&f, s, u128::MAX)?;
    let f = f.with_bound(Some(bound.clone()));
    if evaluate(&f, m)? <= bound {
        return Err(Error::Verification("certificate does not separate the model".into()));
    }
    Ok(f)
}

/// The no-signalling polytope of a scenario as LP constraints over context
/// cells, contexts in maximal-face order and cells in joint-outcome order.
struct NsPolytope {
    faces: Vec<Vec<String>>,
    cards: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    lp: LinearProgram,
}

impl NsPolytope {
    fn new(s: &Scenario, ceiling: u128) -> Result<Self> {
        let faces = s.complex().maximal_faces();
        let cards: Vec<Vec<usize>> = faces.iter().map(|f| cards_of(s, f)).collect();
        let sizes: Vec<usize> = cards.iter().map(|c| c.iter().product()).collect();
        let needed: u128 = sizes.iter().map(|&n| n as u128).sum();
        if needed > ceiling {
            return Err(Error::Ceiling {
                what: "no-signalling cells",
                needed,
                ceiling,
            });
        }
        let mut offsets = Vec::with_capacity(faces.len());
        let mut total = 0;
        for n in &sizes {
            offsets.push(total);
            total += n;
        }
        let mut lp = LinearProgram::new(total);
        for (i, n) in sizes.iter().enumerate() {
            lp.add_equality((0..*n).map(|t| (offsets[i] + t, Rational::one())), Rational::one());
        }
        let mut shared: BTreeSet<Vec<String>> = BTreeSet::new();
        for i in 0..faces.len() {
            for j in i + 1..faces.len() {
                let sigma: Vec<String> = faces[i].iter().filter(|v| faces[j].binary_search(v).is_ok()).cloned().collect();
                if !sigma.is_empty() {
                    shared.insert(sigma);
                }
            }
        }
        for sigma in &shared {
            let holders: Vec<usize> = (0..faces.len())
                .filter(|&i| sigma.iter().all(|v| faces[i].binary_search(v).is_ok()))
                .collect();
            let scards = cards_of(s, sigma);
            let n_sigma: usize = scards.iter().product();
            let sst = strides(&scards);
            let marginal_rows = |c: usize, sign: i64| -> Vec<Vec<(usize, Rational)>> {
                let pos: Vec<usize> = sigma.iter().map(|v| faces[c].binary_search(v).unwrap()).collect();
                let mut rows = vec![Vec::new(); n_sigma];
                for (t, o) in joint_outcomes(&cards[c]).enumerate() {
                    let idx: usize = pos.iter().zip(&sst).map(|(&p, &k)| o[p] * k).sum();
                    rows[idx].push((offsets[c] + t, Rational::from_integer(sign.into())));
                }
                rows
            };
            let reference = marginal_rows(holders[0], -1);
            for &c in &holders[1..] {
                for (mut row, r) in marginal_rows(c, 1).into_iter().zip(&reference) {
                    row.extend(r.iter().cloned());
                    lp.add_equality(row, Rational::zero());
                }
            }
        }
        Ok(NsPolytope { faces, cards, offsets, lp })
    }

    /// Objective vector for `f` plus the constant from empty-face terms.
    fn objective(&self, f: &BellFunctional) -> Result<(Vec<Rational>, Rational)> {
        let mut c = vec![Rational::zero(); self.lp.num_vars()];
        let mut constant = Rational::zero();
        for t in f.terms() {
            if t.outcome.is_empty() {
                constant += &t.coeff;
                continue;
            }
            let face = t.face();
            let i = (0..self.faces.len())
                .find(|&i| face.iter().all(|v| self.faces[i].binary_search(v).is_ok()))
                .ok_or_else(|| Error::InvalidFunctional(format!("{{{}}} is not a face", face.join(","))))?;
            for (k, o) in joint_outcomes(&self.cards[i]).enumerate() {
                if self.faces[i].iter().zip(&o).all(|(v, x)| t.outcome.get(v).is_none_or(|y| y == x)) {
                    c[self.offsets[i] + k] += &t.coeff;
                }
            }
        }
        Ok((c, constant))
    }

    fn model(&self, s: &Scenario, x: &[Rational]) -> Result<EmpiricalModel> {
        let contexts = self
            .faces
            .iter()
            .enumerate()
            .map(|(i, face)| {
                let cells = joint_outcomes(&self.cards[i])
                    .enumerate()
                    .map(|(k, o)| (o, x[self.offsets[i] + k].clone()));
                ContextDistribution::new(face.clone(), cells)
            })
            .collect::<Result<Vec<_>>>()?;
        EmpiricalModel::checked(s.clone(), contexts)
    }
}

/// Maximum of `f` over the no-signalling models of `s`, with an optimal
/// model (a vertex of the polytope).
pub fn ns_max(f: &BellFunctional, s: &Scenario, ceiling: u128) -> Result<(Rational, EmpiricalModel)> {
    f.check_on(s)?;
    let mut poly = NsPolytope::new(s, ceiling)?;
    let (c, constant) = poly.objective(f)?;
    poly.lp.set_objective(c);
    match lp::maximize(&poly.lp)? {
        LpOutcome::Optimal { value, x, .. } => {
            let m = poly.model(s, &x)?;
            Ok((value + constant, m))
        }
        other => Err(Error::Verification(format!(
            "no-signalling LP must have an optimum, got {other:?}"
        ))),
    }
}

/// (site, setting, outcome) triples of one base term.
type SiteEntries = Vec<(usize, usize, usize)>;

/// Sums `f`, written on the base labels `Site.1.jS`, over every copy tuple
/// of `Π [r_i]`. The bound, if present, is multiplied by `Π r_i`.
pub fn lift_functional(f: &BellFunctional, r: &[usize]) -> Result<BellFunctional> {
    if r.is_empty() || r.contains(&0) {
        return Err(Error::InvalidFunctional("copy counts must be positive".into()));
    }
    let sites: HashMap<String, usize> = (0..r.len()).map(|i| (site_name(i), i)).collect();
    let mut parsed: Vec<(SiteEntries, &Rational)> = Vec::new();
    for t in f.terms() {
        let mut entries = Vec::new();
        for (v, &o) in &t.outcome {
            let (site, copy, j) = parse_measurement_label(v)
                .ok_or_else(|| Error::InvalidFunctional(format!("`{v}` is not a measurement label")))?;
            let &i = sites
                .get(site)
                .ok_or_else(|| Error::InvalidFunctional(format!("site `{site}` is beyond {} sites", r.len())))?;
            if copy != 1 {
                return Err(Error::InvalidFunctional(format!("`{v}` is not on the base scenario")));
            }
            entries.push((i, j, o));
        }
        parsed.push((entries, &t.coeff));
    }
    let copies: u64 = r.iter().map(|&x| x as u64).product();
    let mut terms = Vec::new();
    for tuple in joint_outcomes(r) {
        for (entries, coeff) in &parsed {
            let a: Assignment = entries
                .iter()
                .map(|&(i, j, o)| (crate::scenario::measurement_label(i, tuple[i] + 1, j), o))
                .collect();
            terms.push((a, (*coeff).clone()));
        }
    }
    let bound = f.bound().map(|b| b * Rational::from_integer(copies.into()));
    Ok(BellFunctional::new(terms, bound))
}

#[derive(Clone, Debug)]
pub struct MonogamyReport {
    pub base: BellFunctional,
    pub spec: MultipartiteSpec,
    pub lifted: BellFunctional,
    /// `Π r_i · R`.
    pub bound: Rational,
    pub ns_max: Rational,
    pub witness: EmpiricalModel,
    pub holds: bool,
}

/// Checks the lifted inequality of `f` over the no-signalling models of
/// `Σ(n, k, r)`. `R` is `f`'s bound, or its local bound when it has none.
pub fn monogamy_check(f: &BellFunctional, spec: &MultipartiteSpec, ceilings: Ceilings) -> Result<MonogamyReport> {
    let (base_scenario, _) = build_nkr(&spec.base());
    f.check_on(&base_scenario)?;
    let r_bound = match f.bound() {
        Some(b) => b.clone(),
        None => local_bound(f, &base_scenario, ceilings.global)?.0,
    };
    let base = f.clone().with_bound(Some(r_bound));
    let lifted = lift_functional(&base, spec.r())?;
    let bound = lifted.bound().cloned().expect("lift keeps the bound");
    let (scenario, _) = build_nkr(spec);
    let (value, witness) = ns_max(&lifted, &scenario, ceilings.ns)?;
    Ok(MonogamyReport {
        holds: value <= bound,
        base,
        spec: spec.clone(),
        lifted,
        bound,
        ns_max: value,
        witness,
    })
}

/// CHSH in parity form on `n=2;k=2,2;r=1,1`: one unit of weight on each
/// outcome of `{A.1.ji, B.1.jj}` with `x ⊕ y = [i=2][j=2]`.
pub fn xor_chsh() -> BellFunctional {
    let mut terms = Vec::new();
    for i in 1..=2 {
        for j in 1..=2 {
            let target = usize::from(i == 2 && j == 2);
            for x in 0..2 {
                let a: Assignment = [(format!("A.1.j{i}"), x), (format!("B.1.j{j}"), x ^ target)].into();
                terms.push((a, Rational::one()));
            }
        }
    }
    BellFunctional::new(terms, None)
}

/// Parity functional around a cycle of binary measurements: edge
/// `(c[i], c[i+1])` scores when its outcomes differ by `parity[i]`.
pub fn cycle_functional<S: AsRef<str>>(cycle: &[S], parity: &[usize]) -> BellFunctional {
    let n = cycle.len();
    let mut terms = Vec::new();
    for i in 0..n {
        let (u, v) = (cycle[i].as_ref(), cycle[(i + 1) % n].as_ref());
        for x in 0..2 {
            let a: Assignment = [(u.to_string(), x), (v.to_string(), x ^ parity[i])].into();
            terms.push((a, Rational::one()));
        }
    }
    BellFunctional::new(terms, None)
}

/// Odd-parity cycle functionals on the 3- and 4-cycles of the 1-skeleton of
/// `q` whose vertex sets are not faces: triangles first, then 4-cycles, each
/// with every odd parity pattern. Empty unless all outcomes are binary.
pub fn cycle_catalog(q: &Scenario) -> Vec<BellFunctional> {
    if q.outcomes().values().any(|&c| c != 2) {
        log::warn!("cycle catalog needs binary outcomes; returning no functionals");
        return Vec::new();
    }
    let complex = q.complex();
    let v = complex.vertices();
    let edge = |a: &str, b: &str| complex.is_face(&[a, b]);
    let mut cycles: Vec<Vec<&str>> = Vec::new();
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            for c in b + 1..v.len() {
                let t = [v[a].as_str(), v[b].as_str(), v[c].as_str()];
                if edge(t[0], t[1]) && edge(t[1], t[2]) && edge(t[0], t[2]) && !complex.is_face(&t) {
                    cycles.push(t.to_vec());
                }
            }
        }
    }
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            for c in b + 1..v.len() {
                for d in c + 1..v.len() {
                    let [a, b, c, d] = [a, b, c, d].map(|i| v[i].as_str());
                    if complex.is_face(&[a, b, c, d]) {
                        continue;
                    }
                    for cyc in [[a, b, c, d], [a, b, d, c], [a, c, b, d]] {
                        if (0..4).all(|i| edge(cyc[i], cyc[(i + 1) % 4])) {
                            cycles.push(cyc.to_vec());
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for cyc in cycles {
        let len = cyc.len();
        for parity in joint_outcomes(&vec![2; len]).filter(|p| p.iter().sum::<usize>() % 2 == 1) {
            let f = cycle_functional(&cyc, &parity);
            out.push(f.with_bound(Some(Rational::from_integer((len as i64 - 1).into()))));
        }
    }
    out
}

/// Pulls a functional on the quotient back along averaging: each term is
/// read on the first quotient maximal face containing it and spread
/// uniformly over that face's lifts. For every valid microscopic model `m`,
/// `evaluate(pullback, m) = evaluate(g, average)`.
pub fn pullback(g: &BellFunctional, q: &Quotient) -> Result<BellFunctional> {
    let mut terms = Vec::new();
    for t in g.terms() {
        if t.outcome.is_empty() {
            terms.push((Assignment::new(), t.coeff.clone()));
            continue;
        }
        let face = t.face();
        let tau = q
            .complex
            .containing_face(&face)
            .ok_or_else(|| Error::InvalidFunctional(format!("{{{}}} is not a quotient face", face.join(","))))?;
        let lifts = &q.lifts[tau];
        let w = &t.coeff / Rational::from_integer((lifts.len() as i64).into());
        for lift in lifts {
            let a: Assignment = lift
                .iter()
                .filter_map(|micro| t.outcome.get(q.image(micro)).map(|&o| (micro.clone(), o)))
                .collect();
            terms.push((a, w.clone()));
        }
    }
    Ok(BellFunctional::new(terms, None))
}

/// A microscopic model whose macroscopic average violates `functional`.
#[derive(Clone, Debug)]
pub struct AverageWitness {
    /// Quotient functional, with its local bound.
    pub functional: BellFunctional,
    /// Value of the functional on the average.
    pub value: Rational,
    /// Optimal model on the semiregularised scenario.
    pub model: EmpiricalModel,
    pub average: EmpiricalModel,
}

/// The semiregularised scenario of `Σ(n, k, r)` with its quotient.
pub fn semiregular_setting(spec: &MultipartiteSpec) -> Result<(Scenario, Scenario, Quotient)> {
    let (scenario, sym) = build_nkr(spec);
    let sr = scenario.complex().semiregularise(sym.partition())?;
    let outcomes = sr
        .vertices()
        .iter()
        .map(|v| (v.clone(), scenario.cardinality(v).unwrap()))
        .collect();
    let sr = Scenario::new(sr, outcomes)?;
    let (qs, q) = sr.quotient(sym.partition())?;
    Ok((sr, qs, q))
}

/// For each catalog functional `g` (default: [`cycle_catalog`] of the
/// quotient), maximises its pullback over the no-signalling models of the
/// semiregularised scenario and returns the first model whose average beats
/// the local bound of `g`. Functionals are tried in parallel; the result is
/// the first success in catalog order.
pub fn nonlocal_average_witness(
    spec: &MultipartiteSpec,
    catalog: Option<&[BellFunctional]>,
    ceilings: Ceilings,
) -> Result<Option<AverageWitness>> {
    let (sr, qs, q) = semiregular_setting(spec)?;
    let sym = crate::scenario::SiteSymmetry::for_spec(spec);
    let default;
    let catalog = match catalog {
        Some(c) => c,
        None => {
            default = cycle_catalog(&qs);
            &default
        }
    };
    // fail fast on the ceiling instead of once per functional
    NsPolytope::new(&sr, ceilings.ns)?;
    let found = catalog.par_iter().find_map_first(|g| {
        let attempt = || -> Result<Option<(BellFunctional, Rational, EmpiricalModel)>> {
            let (bound, _) = local_bound(g, &qs, ceilings.global)?;
            let pb = pullback(g, &q)?;
            let (value, m) = ns_max(&pb, &sr, ceilings.ns)?;
            log::debug!("catalog functional: pullback optimum {value} vs local bound {bound}");
            Ok((value > bound).then(|| (g.clone().with_bound(Some(bound)), value, m)))
        };
        attempt().transpose()
    });
    match found {
        None => Ok(None),
        Some(Err(e)) => Err(e),
        Some(Ok((functional, value, model))) => {
            let average = model::average_quotient(&model, sym.partition())?;
            let direct = evaluate(&functional, &average)?;
            if direct != value {
                return Err(Error::Verification(format!(
                    "pullback value {value} differs from the average's value {direct}"
                )));
            }
            Ok(Some(AverageWitness {
                functional,
                value,
                model,
                average,
            }))
        }
    }
}

/// Random integer coefficients in `-3..=3` on every cell of every maximal
/// context of `s`.
pub fn random_functional<R: Rng + ?Sized>(s: &Scenario, rng: &mut R) -> BellFunctional {
    let mut terms = Vec::new();
    for face in s.complex().maximal_faces() {
        for o in joint_outcomes(&cards_of(s, &face)) {
            let c: i64 = rng.gen_range(-3..=3);
            let a: Assignment = face.iter().cloned().zip(o).collect();
            terms.push((a, Rational::from_integer(c.into())));
        }
    }
    BellFunctional::new(terms, None)
}

/// A random mixture of three no-signalling vertices found by maximising
/// random functionals, with random positive weights.
pub fn random_ns_model<R: Rng + ?Sized>(s: &Scenario, rng: &mut R, ceiling: u128) -> Result<EmpiricalModel> {
    let mut vertices = Vec::new();
    let mut weights = Vec::new();
    for _ in 0..3 {
        let f = random_functional(s, rng);
        vertices.push(ns_max(&f, s, ceiling)?.1);
        weights.push(rng.gen_range(1..=9i64));
    }
    let total: i64 = weights.iter().sum();
    let parts: Vec<(Rational, &EmpiricalModel)> = weights
        .iter()
        .zip(&vertices)
        .map(|(&w, m)| (Rational::new(w.into(), total.into()), m))
        .collect();
    model::mixture(&parts)
}
