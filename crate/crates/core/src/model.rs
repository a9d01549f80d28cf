//! Empirical models: one exact probability distribution per maximal context.
//!
//! Distributions are stored sparsely, keyed by outcome tuples aligned with
//! the sorted labels of their face; zero cells are never stored, so derived
//! equality is semantic equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::complex::{SimplicialComplex, VertexPartition};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::scenario::{build_nkr, parse_measurement_label, MultipartiteSpec, Scenario};

/// Outcome index per measurement of a face.
pub type Assignment = BTreeMap<String, usize>;

/// Every tuple in `0..cards[0] × 0..cards[1] × …`, last position fastest.
pub(crate) fn joint_outcomes(cards: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let empty = cards.contains(&0);
    let mut next = if empty { None } else { Some(vec![0usize; cards.len()]) };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut pos = cards.len();
        while pos > 0 {
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < cards[pos] {
                next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextDistribution {
    face: Vec<String>,
    cells: BTreeMap<Vec<usize>, Rational>,
}

impl ContextDistribution {
    /// `face` is sorted here and cell tuples permuted to match; zero
    /// cells are dropped and duplicate tuples summed.
    pub fn new<I>(face: Vec<String>, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut order: Vec<usize> = (0..face.len()).collect();
        order.sort_by(|&a, &b| face[a].cmp(&face[b]));
        let sorted: Vec<String> = order.iter().map(|&i| face[i].clone()).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidModel(format!("face {sorted:?} repeats a measurement")));
        }
        let mut map: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (tuple, p) in cells {
            if tuple.len() != face.len() {
                return Err(Error::InvalidModel(format!(
                    "outcome tuple {tuple:?} does not fit face {face:?}"
                )));
            }
            let key: Vec<usize> = order.iter().map(|&i| tuple[i]).collect();
            *map.entry(key).or_insert_with(Rational::zero) += p;
        }
        map.retain(|_, p| !p.is_zero());
        Ok(ContextDistribution { face: sorted, cells: map })
    }

    /// The distribution on the empty face.
    pub fn trivial() -> Self {
        ContextDistribution {
            face: Vec::new(),
            cells: [(Vec::new(), Rational::one())].into(),
        }
    }

    pub fn face(&self) -> &[String] {
        &self.face
    }

    /// Nonzero cells.
    pub fn cells(&self) -> impl Iterator<Item = (&[usize], &Rational)> {
        self.cells.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn support_size(&self) -> usize {
        self.cells.len()
    }

    pub fn probability(&self, outcome: &[usize]) -> Rational {
        self.cells.get(outcome).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn probability_of(&self, assignment: &Assignment) -> Option<Rational> {
        if assignment.len() != self.face.len() {
            return None;
        }
        let tuple: Option<Vec<usize>> = self.face.iter().map(|v| assignment.get(v).copied()).collect();
        Some(self.probability(&tuple?))
    }

    pub fn assignment(&self, outcome: &[usize]) -> Assignment {
        self.face.iter().cloned().zip(outcome.iter().copied()).collect()
    }

    pub fn total(&self) -> Rational {
        self.cells.values().sum()
    }

    /// Marginal onto `onto`, which must be a subset of the face.
    pub fn marginal<S: AsRef<str>>(&self, onto: &[S]) -> Result<ContextDistribution> {
        let mut target: Vec<String> = onto.iter().map(|s| s.as_ref().to_string()).collect();
        target.sort();
        target.dedup();
        let pos: Vec<usize> = target
            .iter()
            .map(|v| {
                self.face
                    .binary_search(v)
                    .map_err(|_| Error::NotAFace(target.clone()))
            })
            .collect::<Result<_>>()?;
        let mut cells: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (tuple, p) in &self.cells {
            let key: Vec<usize> = pos.iter().map(|&i| tuple[i]).collect();
            *cells.entry(key).or_insert_with(Rational::zero) += p;
        }
        cells.retain(|_, p| !p.is_zero());
        Ok(ContextDistribution { face: target, cells })
    }

    /// Renames the measurements; `f` must be injective on the face.
    pub fn relabel<F: Fn(&str) -> String>(&self, f: F) -> Result<ContextDistribution> {
        let face: Vec<String> = self.face.iter().map(|v| f(v)).collect();
        Self::new(face, self.cells.iter().map(|(k, v)| (k.clone(), v.clone())))
    }

    fn scaled(&self, w: &Rational) -> Vec<(Vec<usize>, Rational)> {
        self.cells.iter().map(|(k, v)| (k.clone(), v * w)).collect()
    }
}

/// A failed check reported by [`EmpiricalModel::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Negative {
        context: Vec<String>,
        assignment: Assignment,
        p: Rational,
    },
    NotNormalised {
        context: Vec<String>,
        total: Rational,
    },
    Signalling {
        contexts: (Vec<String>, Vec<String>),
        shared: Vec<String>,
        assignment: Assignment,
        left: Rational,
        right: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |v: &[String]| format!("{{{}}}", v.join(","));
        let asg = |a: &Assignment| {
            a.iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Violation::Negative { context, assignment, p } => {
                write!(f, "context {} has negative cell [{}] = {}", set(context), asg(assignment), rational::format(p))
            }
            Violation::NotNormalised { context, total } => {
                write!(f, "context {} sums to {}", set(context), rational::format(total))
            }
            Violation::Signalling { contexts, shared, assignment, left, right } => write!(
                f,
                "contexts {} and {} disagree on {} at [{}]: {} vs {}",
                set(&contexts.0),
                set(&contexts.1),
                set(shared),
                asg(assignment),
                rational::format(left),
                rational::format(right)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: Scenario,
    /// Aligned with the scenario's maximal faces.
    contexts: Vec<ContextDistribution>,
}

impl EmpiricalModel {
    /// Structural checks only: one distribution per maximal context with
    /// outcomes in range. Probabilities are checked by [`Self::validate`].
    pub fn new(scenario: Scenario, contexts: Vec<ContextDistribution>) -> Result<Self> {
        let complex = scenario.complex();
        let mut slots: Vec<Option<ContextDistribution>> = vec![None; complex.face_count()];
        for ctx in contexts {
            let i = complex.maximal_index(&ctx.face).ok_or_else(|| {
                Error::InvalidModel(format!("{:?} is not a maximal context", ctx.face))
            })?;
            if slots[i].is_some() {
                return Err(Error::InvalidModel(format!("context {:?} given twice", ctx.face)));
            }
            for tuple in ctx.cells.keys() {
                for (v, &o) in ctx.face.iter().zip(tuple) {
                    if o >= scenario.cardinality(v).unwrap_or(0) {
                        return Err(Error::InvalidModel(format!("outcome {o} out of range for `{v}`")));
                    }
                }
            }
            slots[i] = Some(ctx);
        }
        let contexts = slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    Error::InvalidModel(format!("missing context {:?}", complex.face_labels(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EmpiricalModel { scenario, contexts })
    }

    /// Builds a model cell by cell from `p(face, outcome)`.
    pub fn from_fn<F>(scenario: Scenario, mut p: F) -> Result<Self>
    where
        F: FnMut(&[String], &[usize]) -> Rational,
    {
        let mut contexts = Vec::new();
        for face in scenario.complex().maximal_faces() {
            let cards: Vec<usize> = face.iter().map(|v| scenario.cardinality(v).unwrap()).collect();
            let cells: Vec<(Vec<usize>, Rational)> = joint_outcomes(&cards)
                .map(|o| {
                    let q = p(&face, &o);
                    (o, q)
                })
                .collect();
            contexts.push(ContextDistribution::new(face, cells)?);
        }
        Self::new(scenario, contexts)
    }

    /// [`Self::new`] followed by [`Self::validate`].
    pub fn checked(scenario: Scenario, contexts: Vec<ContextDistribution>) -> Result<Self> {
        let m = Self::new(scenario, contexts)?;
        m.ensure_valid()?;
        Ok(m)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn contexts(&self) -> &[ContextDistribution] {
        &self.contexts
    }

    pub fn context(&self, i: usize) -> &ContextDistribution {
        &self.contexts[i]
    }

    /// Normalisation, nonnegativity and exact pairwise marginal agreement.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for ctx in &self.contexts {
            for (tuple, p) in &ctx.cells {
                if p.is_negative() {
                    out.push(Violation::Negative {
                        context: ctx.face.clone(),
                        assignment: ctx.assignment(tuple),
                        p: p.clone(),
                    });
                }
            }
            let total = ctx.total();
            if !total.is_one() {
                out.push(Violation::NotNormalised {
                    context: ctx.face.clone(),
                    total,
                });
            }
        }
        let complex = self.scenario.complex();
        let sets = complex.face_sets();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let mut shared = sets[i].clone();
                shared.difference_with(&{
                    let mut d = sets[i].clone();
                    d.difference_with(&sets[j]);
                    d
                });
                if shared.is_empty() {
                    continue;
                }
                let shared = complex.labels(&shared);
                let left = self.contexts[i].marginal(&shared).expect("subset of face");
                let right = self.contexts[j].marginal(&shared).expect("subset of face");
                if left == right {
                    continue;
                }
                let cards: Vec<usize> = shared.iter().map(|v| self.scenario.cardinality(v).unwrap()).collect();
                let first = joint_outcomes(&cards).find(|o| left.probability(o) != right.probability(o));
                if let Some(o) = first {
                    out.push(Violation::Signalling {
                        contexts: (self.contexts[i].face.clone(), self.contexts[j].face.clone()),
                        assignment: left.assignment(&o),
                        left: left.probability(&o),
                        right: right.probability(&o),
                        shared,
                    });
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Signalling(v))
        }
    }

    /// Marginal onto a face, read from the first maximal context containing it.
    pub fn marginal<S: AsRef<str>>(&self, face: &[S]) -> Result<ContextDistribution> {
        if face.is_empty() {
            return Ok(ContextDistribution::trivial());
        }
        let complex = self.scenario.complex();
        let owned = || face.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        let s = complex.set_of(face).ok_or_else(|| Error::NotAFace(owned()))?;
        let mut hits = complex.face_sets().iter().enumerate().filter(|(_, f)| s.is_subset(f));
        let (first, _) = hits.next().ok_or_else(|| Error::NotAFace(owned()))?;
        let m = self.contexts[first].marginal(face)?;
        if cfg!(debug_assertions) {
            for (i, _) in hits {
                debug_assert_eq!(self.contexts[i].marginal(face)?, m, "model signals on {:?}", owned());
            }
        }
        Ok(m)
    }

    /// The model seen on a coarser scenario whose maximal faces are faces
    /// of this one (with the same outcome counts).
    pub fn restrict(&self, s: &Scenario) -> Result<Self> {
        for (v, &n) in s.outcomes() {
            if self.scenario.cardinality(v) != Some(n) {
                return Err(Error::InvalidScenario(format!("`{v}` has a different outcome count")));
            }
        }
        let contexts = s
            .complex()
            .maximal_faces()
            .iter()
            .map(|f| self.marginal(f))
            .collect::<Result<Vec<_>>>()?;
        Self::new(s.clone(), contexts)
    }

    pub fn relabel<F: Fn(&str) -> String>(&self, f: F) -> Result<Self> {
        let scenario = self.scenario.relabel(&f)?;
        let contexts = self
            .contexts
            .iter()
            .map(|c| c.relabel(&f))
            .collect::<Result<Vec<_>>>()?;
        Self::new(scenario, contexts)
    }
}

/// Averages `m` along the identification `partition`.
///
/// Each quotient maximal face receives the uniform average of the marginals
/// of `m` on its lifts, carried over along the lift's bijection.
pub fn average_quotient(m: &EmpiricalModel, partition: &VertexPartition) -> Result<EmpiricalModel> {
    m.ensure_valid()?;
    let (scenario, q) = m.scenario.quotient(partition)?;
    let mut contexts = Vec::with_capacity(q.lifts.len());
    for (t, lifts) in q.lifts.iter().enumerate() {
        let tau = q.complex.face_labels(t);
        let weight = Rational::new(1.into(), (lifts.len() as i64).into());
        let mut cells: Vec<(Vec<usize>, Rational)> = Vec::new();
        for lift in lifts {
            let moved = m.marginal(lift)?.relabel(|v| q.image(v).to_string())?;
            debug_assert_eq!(moved.face, tau);
            cells.extend(moved.scaled(&weight));
        }
        contexts.push(ContextDistribution::new(tau, cells)?);
    }
    EmpiricalModel::checked(scenario, contexts)
}

/// Independent composition on the join of the two scenarios.
pub fn product(m1: &EmpiricalModel, m2: &EmpiricalModel) -> Result<EmpiricalModel> {
    let scenario = m1.scenario.join(&m2.scenario)?;
    let mut contexts = Vec::with_capacity(m1.contexts.len() * m2.contexts.len());
    for c1 in &m1.contexts {
        for c2 in &m2.contexts {
            let face: Vec<String> = c1.face.iter().chain(&c2.face).cloned().collect();
            let mut cells = Vec::with_capacity(c1.cells.len() * c2.cells.len());
            for (t1, p1) in &c1.cells {
                for (t2, p2) in &c2.cells {
                    let t: Vec<usize> = t1.iter().chain(t2).copied().collect();
                    cells.push((t, p1 * p2));
                }
            }
            contexts.push(ContextDistribution::new(face, cells)?);
        }
    }
    EmpiricalModel::new(scenario, contexts)
}

/// Convex combination `Σ wᵢ·mᵢ` of models on one scenario. The weights
/// must be nonnegative and sum to 1.
pub fn mixture(parts: &[(Rational, &EmpiricalModel)]) -> Result<EmpiricalModel> {
    let (_, first) = parts
        .first()
        .ok_or_else(|| Error::InvalidModel("empty mixture".into()))?;
    if parts.iter().any(|(w, m)| w.is_negative() || m.scenario != first.scenario) {
        return Err(Error::InvalidModel("mixture needs nonnegative weights on one scenario".into()));
    }
    if parts.iter().map(|(w, _)| w).sum::<Rational>() != Rational::one() {
        return Err(Error::InvalidModel("mixture weights must sum to 1".into()));
    }
    let contexts = (0..first.contexts.len())
        .map(|i| {
            let cells = parts.iter().flat_map(|(w, m)| m.contexts[i].scaled(w));
            ContextDistribution::new(first.contexts[i].face.clone(), cells)
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalModel::new(first.scenario.clone(), contexts)
}

/// Binary measurements on a cycle `v0 - v1 - … - v0` where every edge gives
/// perfectly anti-correlated uniform outcomes.
pub fn anticorrelated_cycle<S: AsRef<str>>(labels: &[S]) -> Result<EmpiricalModel> {
    let n = labels.len();
    if n < 3 {
        return Err(Error::InvalidModel("a cycle needs at least 3 vertices".into()));
    }
    let edges = (0..n).map(|i| vec![labels[i].as_ref(), labels[(i + 1) % n].as_ref()]);
    let complex = SimplicialComplex::from_maximal_faces(edges)?;
    let scenario = Scenario::uniform(complex, 2)?;
    EmpiricalModel::from_fn(scenario, |_, o| {
        if o[0] != o[1] {
            Rational::new(1.into(), 2.into())
        } else {
            Rational::zero()
        }
    })
}

/// Uniform distribution on every maximal context.
pub fn totally_mixed(s: &Scenario) -> EmpiricalModel {
    EmpiricalModel::from_fn(s.clone(), |face, _| {
        Rational::new(1.into(), s.joint_outcome_count(face).into())
    })
    .expect("uniform model is well formed")
}

/// Deterministic model of a global assignment.
pub fn deterministic(s: &Scenario, global: &Assignment) -> Result<EmpiricalModel> {
    for v in s.complex().vertices() {
        match global.get(v) {
            Some(&o) if o < s.cardinality(v).unwrap() => {}
            _ => return Err(Error::InvalidModel(format!("no valid outcome for `{v}`"))),
        }
    }
    EmpiricalModel::from_fn(s.clone(), |face, o| {
        if face.iter().zip(o).all(|(v, x)| global[v] == *x) {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

fn setting_of(label: &str) -> usize {
    parse_measurement_label(label).map(|(_, _, j)| j).unwrap_or(0)
}

fn nkr_scenario(lit: &str) -> Scenario {
    let spec: MultipartiteSpec = lit.parse().expect("literal spec");
    build_nkr(&spec).0
}

fn pr_cell(i: usize, j: usize, x: usize, y: usize) -> Rational {
    let target = usize::from(i == 2 && j == 2);
    if (x ^ y) == target {
        Rational::new(1.into(), 2.into())
    } else {
        Rational::zero()
    }
}

/// PR box on `n=2;k=2,2;r=1,1`: outcomes of `A.1.ji`, `B.1.jj` have parity
/// `[i=2][j=2]`, each allowed pair with probability 1/2.
pub fn pr_box() -> EmpiricalModel {
    EmpiricalModel::from_fn(nkr_scenario("n=2;k=2,2;r=1,1"), |face, o| {
        pr_cell(setting_of(&face[0]), setting_of(&face[1]), o[0], o[1])
    })
    .expect("PR box is well formed")
}

/// Tripartite parity box on `n=2;k=2,2;r=1,2` (sites `A`, `B.1`, `B.2`):
/// `x⊕y⊕z = [i=2][j=2] ⊕ [i=2][k=2] ⊕ [j=2][k=2]`, each allowed triple 1/4.
pub fn svetlichny_box() -> EmpiricalModel {
    EmpiricalModel::from_fn(nkr_scenario("n=2;k=2,2;r=1,2"), |face, o| {
        let [i, j, k] = [0, 1, 2].map(|p| usize::from(setting_of(&face[p]) == 2));
        let target = (i & j) ^ (i & k) ^ (j & k);
        if o[0] ^ o[1] ^ o[2] == target {
            Rational::new(1.into(), 4.into())
        } else {
            Rational::zero()
        }
    })
    .expect("Svetlichny box is well formed")
}

/// PR box between `A` and `B.1`, with `B.2` uniformly random and independent.
pub fn pr_times_uniform() -> EmpiricalModel {
    EmpiricalModel::from_fn(nkr_scenario("n=2;k=2,2;r=1,2"), |face, o| {
        pr_cell(setting_of(&face[0]), setting_of(&face[1]), o[0], o[1]) / Rational::from_integer(2.into())
    })
    .expect("PR x uniform is well formed")
}

/// `p(a,b=x,y)/N + (1 - 1/N)·p(a=x)·p(b=y)` for a two-site model.
pub fn diluted_pair_average(p: &EmpiricalModel, n: u32) -> Result<EmpiricalModel> {
    if n == 0 {
        return Err(Error::InvalidModel("N must be at least 1".into()));
    }
    p.ensure_valid()?;
    let complex = p.scenario.complex();
    if complex.maximal_faces().iter().any(|f| f.len() != 2) {
        return Err(Error::InvalidModel("expected a bipartite model".into()));
    }
    let w = Rational::new(1.into(), n.into());
    let rest = Rational::one() - &w;
    let mut contexts = Vec::new();
    for ctx in &p.contexts {
        let (a, b) = (&ctx.face[0], &ctx.face[1]);
        let pa = p.marginal(&[a])?;
        let pb = p.marginal(&[b])?;
        let cards = [
            p.scenario.cardinality(a).unwrap(),
            p.scenario.cardinality(b).unwrap(),
        ];
        let cells: Vec<(Vec<usize>, Rational)> = joint_outcomes(&cards)
            .map(|o| {
                let v = &w * ctx.probability(&o) + &rest * pa.probability(&o[..1]) * pb.probability(&o[1..]);
                (o, v)
            })
            .collect();
        contexts.push(ContextDistribution::new(ctx.face.clone(), cells)?);
    }
    EmpiricalModel::checked(p.scenario.clone(), contexts)
}

/// Floating-point counterpart of [`EmpiricalModel`], produced by the
/// quantum oracle and turned exact by [`rationalize`].
#[derive(Clone, Debug)]
pub struct FloatModel {
    pub scenario: Scenario,
    /// Dense cells per maximal context, in [`joint_outcomes`] order.
    pub contexts: Vec<(Vec<String>, Vec<f64>)>,
    pub tolerance: f64,
}

impl FloatModel {
    /// Normalisation and marginal agreement within the tolerance.
    pub fn check(&self) -> std::result::Result<(), String> {
        let tol = self.tolerance;
        let mut marginals: Vec<HashMap<String, Vec<f64>>> = Vec::new();
        for (face, cells) in &self.contexts {
            let total: f64 = cells.iter().sum();
            if (total - 1.0).abs() > tol || cells.iter().any(|&c| c < -tol) {
                return Err(format!("context {face:?} is not a distribution (sum {total})"));
            }
            let cards: Vec<usize> = face.iter().map(|v| self.scenario.cardinality(v).unwrap()).collect();
            let mut single: HashMap<String, Vec<f64>> = HashMap::new();
            for (o, p) in joint_outcomes(&cards).zip(cells) {
                for (pos, v) in face.iter().enumerate() {
                    single.entry(v.clone()).or_insert_with(|| vec![0.0; cards[pos]])[o[pos]] += p;
                }
            }
            marginals.push(single);
        }
        // pairwise marginals on every shared subset
        for i in 0..self.contexts.len() {
            for j in i + 1..self.contexts.len() {
                let shared: Vec<&String> = self.contexts[i].0.iter().filter(|v| self.contexts[j].0.contains(v)).collect();
                if shared.is_empty() {
                    continue;
                }
                let a = self.float_marginal(i, &shared);
                let b = self.float_marginal(j, &shared);
                if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > tol) {
                    return Err(format!(
                        "contexts {:?} and {:?} disagree on {:?}",
                        self.contexts[i].0, self.contexts[j].0, shared
                    ));
                }
            }
        }
        Ok(())
    }

    fn float_marginal(&self, i: usize, onto: &[&String]) -> Vec<f64> {
        let (face, cells) = &self.contexts[i];
        let cards: Vec<usize> = face.iter().map(|v| self.scenario.cardinality(v).unwrap()).collect();
        let pos: Vec<usize> = onto.iter().map(|v| face.iter().position(|f| f == *v).unwrap()).collect();
        let sub: Vec<usize> = pos.iter().map(|&p| cards[p]).collect();
        let mut out = vec![0.0; sub.iter().product()];
        for (o, p) in joint_outcomes(&cards).zip(cells) {
            let idx = pos.iter().zip(&sub).fold(0, |acc, (&q, &c)| acc * c + o[q]);
            out[idx] += p;
        }
        out
    }
}

/// One site of a pure multipartite state: its local dimension and, per
/// setting, a measurement label and an orthonormal basis (one vector per
/// outcome).
#[derive(Clone, Debug)]
pub struct QuantumSite {
    pub dim: usize,
    pub settings: Vec<(String, Vec<Vec<Complex64>>)>,
}

/// Born-rule model of `state` measured in the given bases, one setting per
/// site in every maximal context.
pub fn quantum_model(state: &[Complex64], sites: &[QuantumSite], tolerance: f64) -> Result<FloatModel> {
    let total_dim: usize = sites.iter().map(|s| s.dim).product();
    if total_dim != state.len() {
        return Err(Error::Quantum(format!(
            "state has {} amplitudes but the sites span {total_dim}",
            state.len()
        )));
    }
    let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > tolerance {
        return Err(Error::Quantum(format!("state norm² is {norm}")));
    }
    let mut locate: HashMap<String, (usize, usize)> = HashMap::new();
    let mut scenario: Option<Scenario> = None;
    for (si, site) in sites.iter().enumerate() {
        let mut outcomes = BTreeMap::new();
        for (t, (label, basis)) in site.settings.iter().enumerate() {
            if basis.len() != site.dim || basis.iter().any(|v| v.len() != site.dim) {
                return Err(Error::Quantum(format!("basis of `{label}` is not {0}x{0}", site.dim)));
            }
            for a in 0..basis.len() {
                for b in 0..basis.len() {
                    let ip: Complex64 = basis[a].iter().zip(&basis[b]).map(|(x, y)| x.conj() * y).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    if (ip - expect).norm() > tolerance {
                        return Err(Error::Quantum(format!("basis of `{label}` is not orthonormal")));
                    }
                }
            }
            outcomes.insert(label.clone(), basis.len());
            if locate.insert(label.clone(), (si, t)).is_some() {
                return Err(Error::Quantum(format!("label `{label}` used twice")));
            }
        }
        let labels: Vec<&String> = outcomes.keys().collect();
        let part = Scenario::new(SimplicialComplex::discrete(&labels)?, outcomes.clone())?;
        scenario = Some(match scenario {
            None => part,
            Some(s) => s.join(&part)?,
        });
    }
    let scenario = scenario.ok_or_else(|| Error::Quantum("no sites".into()))?;
    let dims: Vec<usize> = sites.iter().map(|s| s.dim).collect();
    let mut contexts = Vec::new();
    for face in scenario.complex().maximal_faces() {
        // basis per site for this context
        let mut chosen: Vec<&Vec<Vec<Complex64>>> = vec![&sites[0].settings[0].1; sites.len()];
        let mut site_of_pos = Vec::with_capacity(face.len());
        for v in &face {
            let (si, t) = locate[v];
            chosen[si] = &sites[si].settings[t].1;
            site_of_pos.push(si);
        }
        let cards: Vec<usize> = face.iter().map(|v| scenario.cardinality(v).unwrap()).collect();
        let cells: Vec<f64> = joint_outcomes(&cards)
            .map(|o| {
                let mut per_site = vec![0usize; sites.len()];
                for (pos, &si) in site_of_pos.iter().enumerate() {
                    per_site[si] = o[pos];
                }
                let amp: Complex64 = joint_outcomes(&dims)
                    .zip(state)
                    .map(|(idx, psi)| {
                        let coeff = idx
                            .iter()
                            .enumerate()
                            .fold(Complex64::new(1.0, 0.0), |acc, (si, &d)| acc * chosen[si][per_site[si]][d].conj());
                        coeff * psi
                    })
                    .sum();
                amp.norm_sqr()
            })
            .collect();
        contexts.push((face, cells));
    }
    Ok(FloatModel {
        scenario,
        contexts,
        tolerance,
    })
}

/// Rounds every cell to the best rational with denominator at most
/// `max_denominator`, pushes each context's rounding residual onto its
/// largest cell and re-validates exactly. Failures are errors, not repairs.
pub fn rationalize(f: &FloatModel, max_denominator: u64) -> Result<EmpiricalModel> {
    f.check().map_err(Error::InvalidModel)?;
    let mut contexts = Vec::new();
    for (face, cells) in &f.contexts {
        let cards: Vec<usize> = face.iter().map(|v| f.scenario.cardinality(v).unwrap()).collect();
        let mut exact: Vec<Rational> = cells
            .iter()
            .map(|&p| rational::best_approximation(p.max(0.0), max_denominator))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidModel("non-finite probability".into()))?;
        let largest = cells
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if *p > cells[best] { i } else { best });
        let residual = Rational::one() - exact.iter().sum::<Rational>();
        exact[largest] += residual;
        contexts.push(ContextDistribution::new(face.clone(), joint_outcomes(&cards).zip(exact))?);
    }
    EmpiricalModel::checked(f.scenario.clone(), contexts)
}

/// Qubit sites with the computational (`Z`) and Hadamard (`X`) bases.
pub fn zx_qubit_site(z_label: String, x_label: String) -> QuantumSite {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64| Complex64::new(re, 0.0);
    QuantumSite {
        dim: 2,
        settings: vec![
            (z_label, vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]]),
            (x_label, vec![vec![c(s), c(s)], vec![c(s), c(-s)]]),
        ],
    }
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w_state() -> Vec<Complex64> {
    let a = 1.0 / 3f64.sqrt();
    (0..8)
        .map(|i: u32| Complex64::new(if i.count_ones() == 1 { a } else { 0.0 }, 0.0))
        .collect()
}

/// W state with `Z` (setting 1) and `X` (setting 2) on each qubit, labelled
/// as `n=2;k=2,2;r=1,2` so that qubits 2 and 3 are the two copies of `B`.
pub fn w_state_zx() -> FloatModel {
    let sites: Vec<QuantumSite> = [("A", 1), ("B", 1), ("B", 2)]
        .iter()
        .map(|(s, c)| zx_qubit_site(format!("{s}.{c}.j1"), format!("{s}.{c}.j2")))
        .collect();
    quantum_model(&w_state(), &sites, 1e-12).expect("W state inputs are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::scenario::SiteSymmetry;

    fn octa_symmetry() -> VertexPartition {
        SiteSymmetry::for_spec(&"n=2;k=2,2;r=1,2".parse().unwrap())
            .partition()
            .clone()
    }

    fn asg(pairs: &[(&str, usize)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn joint_outcome_order() {
        let all: Vec<Vec<usize>> = joint_outcomes(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(joint_outcomes(&[]).count(), 1);
    }

    #[test]
    fn pr_box_cells() {
        let pr = pr_box();
        assert!(pr.validate().is_empty());
        let c11 = pr.marginal(&["A.1.j1", "B.1.j1"]).unwrap();
        assert_eq!(c11.probability(&[0, 0]), ratio(1, 2));
        let c22 = pr.marginal(&["A.1.j2", "B.1.j2"]).unwrap();
        assert_eq!(c22.probability(&[0, 0]), int(0));
        assert_eq!(c22.probability(&[0, 1]), ratio(1, 2));
        for v in ["A.1.j1", "A.1.j2", "B.1.j1", "B.1.j2"] {
            let m = pr.marginal(&[v]).unwrap();
            assert_eq!(m.probability(&[0]), ratio(1, 2));
        }
    }

    #[test]
    fn mixed_models_validate() {
        let (s, _) = build_nkr(&"n=2;k=2,3;r=1,2".parse().unwrap());
        let m = totally_mixed(&s);
        assert!(m.validate().is_empty());
        assert!(m.contexts().iter().all(|c| c.cells().all(|(_, p)| *p == ratio(1, 8))));
        let m = totally_mixed(&nkr_scenario("n=2;k=2,2;r=1,1"));
        assert!(m.contexts().iter().all(|c| c.cells().all(|(_, p)| *p == ratio(1, 4))));
    }

    #[test]
    fn tampered_pr_box_signals() {
        let pr = pr_box();
        let mut contexts = pr.contexts().to_vec();
        // context {A.1.j1, B.1.j1}: move mass 1/4 from 00 to 01; still sums to 1
        let c = &contexts[0];
        assert_eq!(c.face(), ["A.1.j1", "B.1.j1"]);
        let cells = vec![
            (vec![0, 0], ratio(1, 4)),
            (vec![0, 1], ratio(1, 4)),
            (vec![1, 1], ratio(1, 2)),
        ];
        contexts[0] = ContextDistribution::new(c.face().to_vec(), cells).unwrap();
        let bad = EmpiricalModel::new(pr.scenario().clone(), contexts).unwrap();
        let v = bad.validate();
        assert!(!v.is_empty());
        assert!(v.iter().any(|x| matches!(x,
            Violation::Signalling { shared, .. } if shared == &vec!["B.1.j1".to_string()]
        )));
        assert!(v.iter().all(|x| match x {
            Violation::Signalling { contexts, .. } =>
                contexts.0 == ["A.1.j1", "B.1.j1"] || contexts.1 == ["A.1.j1", "B.1.j1"],
            _ => false,
        }));
    }

    #[test]
    fn not_normalised_is_reported() {
        let s = nkr_scenario("n=1;k=1;r=1");
        let c = ContextDistribution::new(vec!["A.1.j1".into()], [(vec![0], ratio(1, 2))]).unwrap();
        let m = EmpiricalModel::new(s, vec![c]).unwrap();
        assert!(matches!(m.validate()[0], Violation::NotNormalised { .. }));
    }

    #[test]
    fn marginals_of_pr_times_uniform() {
        let m = pr_times_uniform();
        assert!(m.validate().is_empty());
        let ab = m.marginal(&["A.1.j1", "B.1.j1"]).unwrap();
        assert_eq!(ab, pr_box().marginal(&["A.1.j1", "B.1.j1"]).unwrap());
        let ac = m.marginal(&["A.1.j1", "B.2.j2"]).unwrap();
        assert!(ac.cells().all(|(_, p)| *p == ratio(1, 4)));
        assert_eq!(ac.support_size(), 4);
        let empty = m.marginal::<&str>(&[]).unwrap();
        assert_eq!(empty.probability(&[]), int(1));
        assert!(m.marginal(&["B.1.j1", "B.1.j2"]).is_err());
    }

    #[test]
    fn svetlichny_structure() {
        let s = svetlichny_box();
        assert!(s.validate().is_empty());
        let c = s.marginal(&["A.1.j1", "B.1.j1", "B.2.j1"]).unwrap();
        assert_eq!(c.probability(&[0, 0, 0]), ratio(1, 4));
        assert!(s.contexts().iter().all(|c| c.support_size() == 4));
        for pair in [["A.1.j2", "B.1.j2"], ["A.1.j1", "B.2.j2"], ["B.1.j2", "B.2.j2"]] {
            let m = s.marginal(&pair).unwrap();
            assert_eq!(m.support_size(), 4);
            assert!(m.cells().all(|(_, p)| *p == ratio(1, 4)));
        }
    }

    /// `{A.ji, B.jj}` with macroscopic labels.
    fn macro_pair() -> Scenario {
        nkr_scenario("n=2;k=2,2;r=1,1")
            .relabel(|v| {
                let (site, _, j) = parse_measurement_label(v).unwrap();
                format!("{site}.j{j}")
            })
            .unwrap()
    }

    #[test]
    fn svetlichny_averages_to_mixed() {
        let avg = average_quotient(&svetlichny_box(), &octa_symmetry()).unwrap();
        let pair = macro_pair();
        assert_eq!(avg.restrict(&pair).unwrap(), totally_mixed(&pair));
        // the triangles themselves keep the parity constraint
        assert!(avg.contexts().iter().all(|c| c.support_size() == 4));
    }

    #[test]
    fn restrict_rejects_non_faces() {
        let pr = pr_box();
        let s = Scenario::uniform(SimplicialComplex::from_maximal_faces([["A.1.j1", "A.1.j2"]]).unwrap(), 2).unwrap();
        assert!(pr.restrict(&s).is_err());
    }

    #[test]
    fn pr_times_uniform_average() {
        let avg = average_quotient(&pr_times_uniform(), &octa_symmetry()).unwrap();
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let a = format!("A.j{i}");
            let b = format!("B.j{j}");
            let m = avg.marginal(&[&a, &b]).unwrap();
            let parity = usize::from(i == 2 && j == 2);
            for o in joint_outcomes(&[2, 2]) {
                let want = if o[0] ^ o[1] == parity { ratio(3, 8) } else { ratio(1, 8) };
                assert_eq!(m.probability(&o), want, "{a},{b} {o:?}");
            }
        }
    }

    #[test]
    fn identity_partition_average_is_relabel_free() {
        let pr = pr_box();
        let id = VertexPartition::singletons(pr.scenario().complex());
        assert_eq!(average_quotient(&pr, &id).unwrap(), pr);
    }

    #[test]
    fn products() {
        let s1 = nkr_scenario("n=1;k=2;r=1");
        let s2 = s1.relabel(|v| v.replace('A', "B")).unwrap();
        let mixed = product(&totally_mixed(&s1), &totally_mixed(&s2)).unwrap();
        assert_eq!(mixed, totally_mixed(mixed.scenario()));

        let pr2 = pr_box().relabel(|v| v.replace("A.1", "C.1").replace("B.1", "D.1")).unwrap();
        let pp = product(&pr_box(), &pr2).unwrap();
        assert!(pp.validate().is_empty());
        assert_eq!(
            pp.marginal(&["A.1.j2", "B.1.j2"]).unwrap(),
            pr_box().marginal(&["A.1.j2", "B.1.j2"]).unwrap()
        );

        let g1 = asg(&[("A.1.j1", 1), ("A.1.j2", 0)]);
        let g2 = asg(&[("B.1.j1", 0), ("B.1.j2", 1)]);
        let d = product(&deterministic(&s1, &g1).unwrap(), &deterministic(&s2, &g2).unwrap()).unwrap();
        let mut g = g1.clone();
        g.extend(g2);
        assert_eq!(d, deterministic(d.scenario(), &g).unwrap());
        assert!(product(&pr_box(), &pr_box()).is_err());
    }

    #[test]
    fn dilution_identity_and_arithmetic() {
        let pr = pr_box();
        assert_eq!(diluted_pair_average(&pr, 1).unwrap(), pr);
        let d = diluted_pair_average(&pr, 2).unwrap();
        let c = d.marginal(&["A.1.j1", "B.1.j1"]).unwrap();
        assert_eq!(c.probability(&[0, 0]), ratio(3, 8));
        assert_eq!(c.probability(&[0, 1]), ratio(1, 8));
        assert!(diluted_pair_average(&pr, 0).is_err());
    }

    #[test]
    fn w_state_born_rule() {
        let f = w_state_zx();
        f.check().unwrap();
        let zzz = f
            .contexts
            .iter()
            .find(|(face, _)| face == &["A.1.j1", "B.1.j1", "B.2.j1"])
            .unwrap();
        let want = [0.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0, 0.0, 0.0, 0.0];
        for (p, w) in zzz.1.iter().zip(want) {
            assert!((p - w).abs() < 1e-12);
        }
        for (_, cells) in &f.contexts {
            assert!((cells.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_is_deterministic_in_z() {
        let mut psi = vec![Complex64::new(0.0, 0.0); 8];
        psi[0] = Complex64::new(1.0, 0.0);
        let sites: Vec<QuantumSite> = ["A", "B", "C"]
            .iter()
            .map(|s| zx_qubit_site(format!("{s}z"), format!("{s}x")))
            .collect();
        let f = quantum_model(&psi, &sites, 1e-12).unwrap();
        let zzz = f.contexts.iter().find(|(face, _)| face == &["Az", "Bz", "Cz"]).unwrap();
        assert!((zzz.1[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quantum_input_errors() {
        let sites = vec![zx_qubit_site("a".into(), "b".into())];
        assert!(quantum_model(&w_state(), &sites, 1e-12).is_err());
        let psi = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(quantum_model(&psi, &sites, 1e-12).is_err());
        let mut skew = zx_qubit_site("a".into(), "b".into());
        skew.settings[1].1[1][1] = Complex64::new(0.5, 0.0);
        let psi = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(quantum_model(&psi, &[skew], 1e-12).is_err());
    }

    #[test]
    fn rationalize_w_state() {
        let m = rationalize(&w_state_zx(), 64).unwrap();
        assert!(m.validate().is_empty());
        for c in m.contexts() {
            for (_, p) in c.cells() {
                assert!((int(24) / p.denom()).is_integer(), "{p}");
            }
        }
        let xxx = m.marginal(&["A.1.j2", "B.1.j2", "B.2.j2"]).unwrap();
        assert_eq!(xxx.probability(&[0, 0, 0]), ratio(3, 8));
    }

    #[test]
    fn rationalize_exact_halves_is_identity() {
        let s = nkr_scenario("n=1;k=2;r=1");
        let f = FloatModel {
            contexts: s.complex().maximal_faces().into_iter().map(|f| (f, vec![0.5, 0.5])).collect(),
            scenario: s.clone(),
            tolerance: 1e-12,
        };
        assert_eq!(rationalize(&f, 10).unwrap(), totally_mixed(&s));
    }

    #[test]
    fn rationalize_rejects_noise() {
        let mut f = w_state_zx();
        f.contexts[0].1[1] += 1e-3;
        f.contexts[0].1[2] -= 1e-3;
        assert!(f.check().is_err());
        assert!(rationalize(&f, 1_000_000).is_err());
        // with a loose float tolerance the exact gate still refuses it
        f.tolerance = 1e-2;
        assert!(matches!(rationalize(&f, 1_000_000), Err(Error::Signalling(_))));
    }
}
