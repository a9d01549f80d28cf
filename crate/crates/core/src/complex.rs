//! Abstract simplicial complexes given by their maximal faces.
//!
//! A complex is stored as a sorted vertex list and an antichain of maximal
//! faces; faces are bitsets over vertex indices. Because vertex indices
//! follow label order, comparing faces as sorted index lists is the same as
//! comparing their sorted labels, which is the order Graham reduction scans.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

mod bits;
pub(crate) use bits::VertexSet;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    faces: Vec<VertexSet>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.maximal_faces()).finish()
    }
}

impl fmt::Display for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let faces: Vec<String> = self
            .maximal_faces()
            .into_iter()
            .map(|face| format!("{{{}}}", face.join(",")))
            .collect();
        write!(f, "{}", faces.join(" "))
    }
}

impl SimplicialComplex {
    /// The empty complex.
    pub fn empty() -> Self {
        SimplicialComplex {
            vertices: Vec::new(),
            faces: Vec::new(),
        }
    }

    /// Builds the complex generated by `faces`, dropping duplicates and
    /// faces contained in others. An empty face is rejected.
    pub fn from_maximal_faces<I, F, S>(faces: I) -> Result<Self>
    where
        I: IntoIterator<Item = F>,
        F: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let faces: Vec<BTreeSet<String>> = faces
            .into_iter()
            .map(|f| f.into_iter().map(Into::into).collect())
            .collect();
        if faces.iter().any(|f| f.is_empty()) {
            return Err(Error::MalformedComplex("empty face in a nonempty face list".into()));
        }
        let vertices: Vec<String> = faces
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let n = vertices.len();
        let sets = faces
            .iter()
            .map(|f| VertexSet::from_indices(n, f.iter().map(|v| index[v.as_str()])))
            .collect();
        Ok(Self::from_parts(vertices, sets))
    }

    /// `vertices` must be sorted and unique; faces are normalised and any
    /// vertex left uncovered is dropped.
    pub(crate) fn from_parts(vertices: Vec<String>, faces: Vec<VertexSet>) -> Self {
        let faces = antichain(faces);
        let mut covered = VertexSet::new(vertices.len());
        for f in &faces {
            covered.union_with(f);
        }
        if covered.len() == vertices.len() {
            return SimplicialComplex { vertices, faces };
        }
        // re-index onto the covered vertices
        let keep: Vec<usize> = covered.iter().collect();
        let mut remap = vec![usize::MAX; vertices.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let n = keep.len();
        let faces = faces
            .iter()
            .map(|f| VertexSet::from_indices(n, f.iter().map(|v| remap[v])))
            .collect::<Vec<_>>();
        let vertices = keep.into_iter().map(|i| vertices[i].clone()).collect();
        SimplicialComplex {
            vertices,
            faces: sort_faces(faces),
        }
    }

    /// The discrete complex: one isolated vertex per label.
    pub fn discrete<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut seen = HashSet::new();
        for l in labels {
            if !seen.insert(l.as_ref()) {
                return Err(Error::DuplicateLabel(l.as_ref().to_string()));
            }
        }
        Self::from_maximal_faces(labels.iter().map(|l| [l.as_ref().to_string()]))
    }

    /// Simplicial join; vertex labels must be disjoint.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        let left: HashSet<&str> = self.vertices.iter().map(String::as_str).collect();
        let clashes: Vec<String> = other
            .vertices
            .iter()
            .filter(|v| left.contains(v.as_str()))
            .cloned()
            .collect();
        if !clashes.is_empty() {
            return Err(Error::LabelClash(clashes));
        }
        let mut vertices: Vec<String> = self.vertices.iter().chain(&other.vertices).cloned().collect();
        vertices.sort();
        let index: HashMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let n = vertices.len();
        let lift = |c: &Self| -> Vec<VertexSet> {
            let map: Vec<usize> = c.vertices.iter().map(|v| index[v.as_str()]).collect();
            c.faces
                .iter()
                .map(|f| VertexSet::from_indices(n, f.iter().map(|i| map[i])))
                .collect()
        };
        let (a, b) = (lift(self), lift(other));
        let mut faces = Vec::with_capacity(a.len() * b.len());
        for fa in &a {
            for fb in &b {
                let mut u = fa.clone();
                u.union_with(fb);
                faces.push(u);
            }
        }
        // unions of faces over disjoint vertex sets already form an antichain
        Ok(SimplicialComplex {
            vertices,
            faces: sort_faces(faces),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Maximal faces as sorted label lists, in lexicographic order.
    pub fn maximal_faces(&self) -> Vec<Vec<String>> {
        (0..self.faces.len()).map(|i| self.face_labels(i)).collect()
    }

    pub fn face_labels(&self, i: usize) -> Vec<String> {
        self.labels(&self.faces[i])
    }

    pub(crate) fn face_sets(&self) -> &[VertexSet] {
        &self.faces
    }

    pub(crate) fn labels(&self, set: &VertexSet) -> Vec<String> {
        set.iter().map(|i| self.vertices[i].clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_str().cmp(label)).ok()
    }

    pub(crate) fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Option<VertexSet> {
        let mut idx = Vec::with_capacity(labels.len());
        for l in labels {
            idx.push(self.index_of(l.as_ref())?);
        }
        Some(VertexSet::from_indices(self.vertices.len(), idx))
    }

    /// Whether `labels` spans a face (the empty set always does).
    pub fn is_face<S: AsRef<str>>(&self, labels: &[S]) -> bool {
        match self.set_of(labels) {
            Some(s) => s.is_empty() || self.faces.iter().any(|f| s.is_subset(f)),
            None => false,
        }
    }

    /// Index of the first maximal face containing `labels`.
    pub fn containing_face<S: AsRef<str>>(&self, labels: &[S]) -> Option<usize> {
        let s = self.set_of(labels)?;
        self.faces.iter().position(|f| s.is_subset(f))
    }

    pub fn maximal_index<S: AsRef<str>>(&self, labels: &[S]) -> Option<usize> {
        let s = self.set_of(labels)?;
        self.faces.iter().position(|f| *f == s)
    }

    fn require_maximal<S: AsRef<str>>(&self, face: &[S]) -> Result<usize> {
        self.maximal_index(face).ok_or_else(|| {
            Error::NotMaximal(face.iter().map(|s| s.as_ref().to_string()).collect())
        })
    }

    fn proper_set(&self, i: usize) -> VertexSet {
        let mut p = self.faces[i].clone();
        for (j, g) in self.faces.iter().enumerate() {
            if j != i {
                p.difference_with(g);
            }
        }
        p
    }

    /// Vertices of the maximal face `face` that lie in no other maximal face.
    pub fn proper_vertices<S: AsRef<str>>(&self, face: &[S]) -> Result<Vec<String>> {
        let i = self.require_maximal(face)?;
        Ok(self.labels(&self.proper_set(i)))
    }

    /// One Graham-reduction step at the maximal face `face`.
    pub fn graham_step<S: AsRef<str>>(&self, face: &[S]) -> Result<Self> {
        let i = self.require_maximal(face)?;
        let proper = self.proper_set(i);
        if proper.is_empty() {
            return Err(Error::NoReductionStep(
                face.iter().map(|s| s.as_ref().to_string()).collect(),
            ));
        }
        Ok(self.remove_proper(i, &proper))
    }

    fn remove_proper(&self, i: usize, proper: &VertexSet) -> Self {
        // only face i meets its proper set; it either shrinks or vanishes
        let mut shrunk = self.faces[i].clone();
        shrunk.difference_with(proper);
        let absorbed = shrunk.is_empty()
            || self
                .faces
                .iter()
                .enumerate()
                .any(|(j, g)| j != i && shrunk.is_subset(g));
        let keep: Vec<usize> = (0..self.vertices.len()).filter(|v| !proper.contains(*v)).collect();
        let mut remap = vec![usize::MAX; self.vertices.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let n = keep.len();
        let faces: Vec<VertexSet> = self
            .faces
            .iter()
            .enumerate()
            .filter_map(|(j, g)| {
                let src = if j == i {
                    if absorbed {
                        return None;
                    }
                    &shrunk
                } else {
                    g
                };
                Some(VertexSet::from_indices(n, src.iter().map(|v| remap[v])))
            })
            .collect();
        SimplicialComplex {
            vertices: keep.into_iter().map(|v| self.vertices[v].clone()).collect(),
            faces: sort_faces(faces),
        }
    }

    /// Graham reduction that always steps at the lexicographically first
    /// maximal face with a nonempty proper set.
    pub fn graham_reduce(&self) -> ReductionTrace {
        self.graham_reduce_by(|candidates| candidates[0])
    }

    /// Graham reduction with a caller-supplied face choice. `choose` receives
    /// the indices (into the current maximal faces) of every face with a
    /// nonempty proper set and returns one of them.
    pub fn graham_reduce_by<F>(&self, mut choose: F) -> ReductionTrace
    where
        F: FnMut(&[usize]) -> usize,
    {
        let mut current = self.clone();
        let mut steps = Vec::new();
        loop {
            if current.is_empty() {
                break;
            }
            let candidates: Vec<usize> = (0..current.faces.len())
                .filter(|&i| !current.proper_set(i).is_empty())
                .collect();
            if candidates.is_empty() {
                break;
            }
            let i = choose(&candidates);
            assert!(candidates.contains(&i), "chosen face has no proper vertices");
            let proper = current.proper_set(i);
            steps.push(ReductionStep {
                face: current.face_labels(i),
                removed: current.labels(&proper),
            });
            current = current.remove_proper(i, &proper);
        }
        ReductionTrace {
            acyclic: current.is_empty(),
            steps,
            residual: current,
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.graham_reduce().acyclic
    }

    /// Keeps the faces meeting every block in at most one vertex.
    pub fn semiregularise(&self, partition: &VertexPartition) -> Result<Self> {
        let blocks = partition.block_index(self)?;
        let n = self.vertices.len();
        let mut faces = HashSet::new();
        for f in &self.faces {
            for t in transversals(f, &blocks) {
                faces.insert(VertexSet::from_indices(n, t));
            }
        }
        Ok(Self::from_parts(self.vertices.clone(), faces.into_iter().collect()))
    }

    /// Quotient complex only: images of the maximal faces under the block map.
    ///
    /// Every maximal face of the semiregularised complex sits inside some
    /// maximal face `F` and the image of `F` is realised by a transversal of
    /// `F`, so the image faces generate the quotient.
    pub fn quotient_complex(&self, partition: &VertexPartition) -> Result<Self> {
        let blocks = partition.block_index(self)?;
        let names = partition.sorted_names();
        let name_pos: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let block_pos: Vec<usize> = partition
            .blocks
            .iter()
            .map(|b| name_pos[b.name.as_str()])
            .collect();
        let m = names.len();
        let images: HashSet<VertexSet> = self
            .faces
            .iter()
            .map(|f| VertexSet::from_indices(m, f.iter().map(|v| block_pos[blocks[v]])))
            .collect();
        Ok(Self::from_parts(names, images.into_iter().collect()))
    }

    /// Quotient by `partition` together with the lifts of every quotient
    /// maximal face: the faces of the semiregularisation that the block map
    /// sends bijectively onto it.
    pub fn quotient(&self, partition: &VertexPartition) -> Result<Quotient> {
        let complex = self.quotient_complex(partition)?;
        let blocks = partition.block_index(self)?;
        let names = complex.vertices.clone();
        let name_pos: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let block_pos: Vec<usize> = partition
            .blocks
            .iter()
            .map(|b| name_pos[b.name.as_str()])
            .collect();
        let m = names.len();
        let target: HashMap<&VertexSet, usize> =
            complex.faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut lifts: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); complex.faces.len()];
        for f in &self.faces {
            let image = VertexSet::from_indices(m, f.iter().map(|v| block_pos[blocks[v]]));
            if let Some(&t) = target.get(&image) {
                lifts[t].extend(transversals(f, &blocks));
            }
        }
        let lifts = lifts
            .into_iter()
            .map(|set| {
                set.into_iter()
                    .map(|t| t.into_iter().map(|v| self.vertices[v].clone()).collect())
                    .collect()
            })
            .collect();
        Ok(Quotient {
            complex,
            lifts,
            vertex_map: partition.vertex_map(),
        })
    }
}

/// Quotient complex plus the face map used for averaging.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub complex: SimplicialComplex,
    /// `lifts[i]`: faces of the semiregularised complex mapping bijectively
    /// onto quotient maximal face `i`, each as sorted labels.
    pub lifts: Vec<Vec<Vec<String>>>,
    /// Original vertex to quotient vertex.
    pub vertex_map: BTreeMap<String, String>,
}

impl Quotient {
    pub fn image(&self, vertex: &str) -> &str {
        &self.vertex_map[vertex]
    }
}

/// All ways of choosing one vertex from each block that meets `face`.
fn transversals(face: &VertexSet, blocks: &[usize]) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in face.iter() {
        groups.entry(blocks[v]).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for members in groups.values() {
        out = out
            .into_iter()
            .flat_map(|t| {
                members.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    for t in &mut out {
        t.sort_unstable();
    }
    out
}

fn sort_faces(mut faces: Vec<VertexSet>) -> Vec<VertexSet> {
    faces.sort_by(|a, b| a.iter().cmp(b.iter()));
    faces
}

/// Drops empty faces, duplicates and faces contained in other faces.
fn antichain(faces: Vec<VertexSet>) -> Vec<VertexSet> {
    let mut faces: Vec<VertexSet> = faces.into_iter().filter(|f| !f.is_empty()).collect();
    faces.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.iter().cmp(b.iter())));
    faces.dedup();
    let mut kept: Vec<VertexSet> = Vec::with_capacity(faces.len());
    for f in faces {
        let size = f.len();
        if !kept.iter().take_while(|k| k.len() > size).any(|k| f.is_subset(k)) {
            kept.push(f);
        }
    }
    sort_faces(kept)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub face: Vec<String>,
    pub removed: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub residual: SimplicialComplex,
    pub acyclic: bool,
}

impl ReductionTrace {
    /// Vertices in the order they were removed.
    pub fn elimination_order(&self) -> Vec<String> {
        self.steps.iter().flat_map(|s| s.removed.iter().cloned()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub members: BTreeSet<String>,
}

/// Disjoint blocks covering a vertex set; each block is named by the
/// vertex it becomes in the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    pub blocks: Vec<Block>,
}

impl VertexPartition {
    pub fn new<I, N, M, S>(blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, M)>,
        N: Into<String>,
        M: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let blocks: Vec<Block> = blocks
            .into_iter()
            .map(|(n, m)| Block {
                name: n.into(),
                members: m.into_iter().map(Into::into).collect(),
            })
            .collect();
        let mut names = HashSet::new();
        let mut seen = HashSet::new();
        for b in &blocks {
            if b.members.is_empty() {
                return Err(Error::InvalidPartition(format!("block `{}` is empty", b.name)));
            }
            if !names.insert(b.name.clone()) {
                return Err(Error::InvalidPartition(format!("block name `{}` repeated", b.name)));
            }
            for v in &b.members {
                if !seen.insert(v.clone()) {
                    return Err(Error::InvalidPartition(format!("`{v}` is in two blocks")));
                }
            }
        }
        Ok(VertexPartition { blocks })
    }

    /// Every vertex in its own block, keeping its name.
    pub fn singletons(complex: &SimplicialComplex) -> Self {
        VertexPartition {
            blocks: complex
                .vertices
                .iter()
                .map(|v| Block {
                    name: v.clone(),
                    members: [v.clone()].into(),
                })
                .collect(),
        }
    }

    pub fn vertex_map(&self) -> BTreeMap<String, String> {
        self.blocks
            .iter()
            .flat_map(|b| b.members.iter().map(move |v| (v.clone(), b.name.clone())))
            .collect()
    }

    fn sorted_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.blocks.iter().map(|b| b.name.clone()).collect();
        names.sort();
        names
    }

    /// Block index of every vertex of `complex`; errors unless the blocks
    /// partition exactly its vertex set.
    fn block_index(&self, complex: &SimplicialComplex) -> Result<Vec<usize>> {
        let mut idx = vec![usize::MAX; complex.vertices.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            for v in &block.members {
                let i = complex.index_of(v).ok_or_else(|| {
                    Error::InvalidPartition(format!("`{v}` is not a vertex of the complex"))
                })?;
                idx[i] = b;
            }
        }
        if let Some(i) = idx.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "vertex `{}` is in no block",
                complex.vertices[i]
            )));
        }
        Ok(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cx(faces: &[&str]) -> SimplicialComplex {
        SimplicialComplex::from_maximal_faces(
            faces.iter().map(|f| f.chars().map(|c| c.to_string()).collect::<Vec<_>>()),
        )
        .unwrap()
    }

    fn labels(faces: &[&[&str]]) -> Vec<Vec<String>> {
        faces
            .iter()
            .map(|f| f.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    fn octahedron() -> SimplicialComplex {
        let mut faces = Vec::new();
        for i in 1..=2 {
            for j in 1..=2 {
                for k in 1..=2 {
                    faces.push(vec![format!("a{i}"), format!("b{j}"), format!("c{k}")]);
                }
            }
        }
        SimplicialComplex::from_maximal_faces(faces).unwrap()
    }

    fn bc_partition() -> VertexPartition {
        VertexPartition::new([
            ("a1", vec!["a1"]),
            ("a2", vec!["a2"]),
            ("m1", vec!["b1", "c1"]),
            ("m2", vec!["b2", "c2"]),
        ])
        .unwrap()
    }

    #[test]
    fn antichain_normalisation() {
        let c = cx(&["ab", "b"]);
        assert_eq!(c.maximal_faces(), labels(&[&["a", "b"]]));
        let c = cx(&["ab", "ba", "abc", "d"]);
        assert_eq!(c.maximal_faces(), labels(&[&["a", "b", "c"], &["d"]]));
    }

    #[test]
    fn empty_complex() {
        let c = SimplicialComplex::from_maximal_faces(Vec::<Vec<String>>::new()).unwrap();
        assert!(c.is_empty());
        assert_eq!(c, SimplicialComplex::empty());
        assert!(c.is_acyclic());
    }

    #[test]
    fn empty_face_rejected() {
        let faces: Vec<Vec<String>> = vec![vec!["a".into()], vec![]];
        assert!(SimplicialComplex::from_maximal_faces(faces).is_err());
    }

    #[test]
    fn octahedron_shape() {
        let o = octahedron();
        assert_eq!(o.vertex_count(), 6);
        assert_eq!(o.face_count(), 8);
    }

    #[test]
    fn discrete_complexes() {
        let d = SimplicialComplex::discrete(&["x"]).unwrap();
        assert_eq!(d.maximal_faces(), labels(&[&["x"]]));
        let d = SimplicialComplex::discrete(&["b1", "b2", "b3"]).unwrap();
        assert_eq!(d.face_count(), 3);
        assert!(matches!(
            SimplicialComplex::discrete(&["a", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn joins() {
        let a = SimplicialComplex::discrete(&["a1", "a2"]).unwrap();
        let b = SimplicialComplex::discrete(&["b1", "b2"]).unwrap();
        let c = SimplicialComplex::discrete(&["c1", "c2"]).unwrap();
        let square = a.join(&b).unwrap();
        assert_eq!(square.vertex_count(), 4);
        assert_eq!(square.face_count(), 4);
        assert!(square.maximal_faces().iter().all(|f| f.len() == 2));
        assert_eq!(a.join(&b.join(&c).unwrap()).unwrap(), octahedron());
        assert_eq!(a.join(&SimplicialComplex::empty()).unwrap(), a);
        assert_eq!(SimplicialComplex::empty().join(&a).unwrap(), a);
        match a.join(&a) {
            Err(Error::LabelClash(v)) => assert_eq!(v, vec!["a1", "a2"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn proper_vertices_examples() {
        let c = cx(&["abc", "bcd", "cde"]);
        assert_eq!(c.proper_vertices(&["a", "b", "c"]).unwrap(), vec!["a"]);
        let cyc = cx(&["bc", "cd", "bd"]);
        assert!(cyc.proper_vertices(&["b", "c"]).unwrap().is_empty());
        let single = cx(&["abc"]);
        assert_eq!(single.proper_vertices(&["a", "b", "c"]).unwrap(), vec!["a", "b", "c"]);
        assert!(matches!(c.proper_vertices(&["a", "b"]), Err(Error::NotMaximal(_))));
    }

    #[test]
    fn graham_steps() {
        let c = cx(&["abc", "bcd", "cde"]);
        let s = c.graham_step(&["a", "b", "c"]).unwrap();
        assert_eq!(s, cx(&["bcd", "cde"]));
        let s = s.graham_step(&["c", "d", "e"]).unwrap();
        assert_eq!(s, cx(&["bcd"]));
        assert!(cx(&["abc"]).graham_step(&["a", "b", "c"]).unwrap().is_empty());
        assert!(matches!(
            cx(&["bc", "cd", "bd"]).graham_step(&["b", "c"]),
            Err(Error::NoReductionStep(_))
        ));
    }

    #[test]
    fn reduction_traces() {
        let t = cx(&["abc", "bcd", "cde"]).graham_reduce();
        assert!(t.acyclic);
        assert!(t.residual.is_empty());
        assert_eq!(t.elimination_order(), vec!["a", "b", "c", "d", "e"]);

        let t = cx(&["abc", "cde", "bd"]).graham_reduce();
        assert!(!t.acyclic);
        assert_eq!(t.residual, cx(&["bc", "cd", "bd"]));

        let o = octahedron();
        let t = o.graham_reduce();
        assert!(!t.acyclic);
        assert!(t.steps.is_empty());
        assert_eq!(t.residual, o);
    }

    #[test]
    fn acyclicity_fixtures() {
        let q = SimplicialComplex::from_maximal_faces([["a1", "m1", "m2"], ["a2", "m1", "m2"]]).unwrap();
        assert!(q.is_acyclic());
        let bipyramid = SimplicialComplex::from_maximal_faces([
            ["a1", "m1", "m2"],
            ["a1", "m2", "m3"],
            ["a1", "m3", "m1"],
            ["a2", "m1", "m2"],
            ["a2", "m2", "m3"],
            ["a2", "m3", "m1"],
        ])
        .unwrap();
        assert!(!bipyramid.is_acyclic());
        let solid = SimplicialComplex::from_maximal_faces([
            ["a1", "m1", "m2", "m3"],
            ["a2", "m1", "m2", "m3"],
        ])
        .unwrap();
        assert!(solid.is_acyclic());
    }

    #[test]
    fn semiregularise_octahedron() {
        let sr = octahedron().semiregularise(&bc_partition()).unwrap();
        let expected = SimplicialComplex::from_maximal_faces([
            ["a1", "b1", "c2"],
            ["a1", "b2", "c1"],
            ["a2", "b1", "c2"],
            ["a2", "b2", "c1"],
        ])
        .unwrap();
        assert_eq!(sr, expected);
        let id = VertexPartition::singletons(&octahedron());
        assert_eq!(octahedron().semiregularise(&id).unwrap(), octahedron());
    }

    #[test]
    fn quotient_octahedron() {
        let q = octahedron().quotient(&bc_partition()).unwrap();
        let expected =
            SimplicialComplex::from_maximal_faces([["a1", "m1", "m2"], ["a2", "m1", "m2"]]).unwrap();
        assert_eq!(q.complex, expected);
        assert_eq!(
            q.lifts[0],
            labels(&[&["a1", "b1", "c2"], &["a1", "b2", "c1"]])
        );
        assert_eq!(q.image("c2"), "m2");
    }

    #[test]
    fn partition_errors() {
        assert!(VertexPartition::new([("m", vec!["a"]), ("m", vec!["b"])]).is_err());
        assert!(VertexPartition::new([("m", vec!["a"]), ("n", vec!["a"])]).is_err());
        assert!(VertexPartition::new([("m", Vec::<String>::new())]).is_err());
        let p = VertexPartition::new([("m", vec!["a1"])]).unwrap();
        assert!(matches!(
            octahedron().semiregularise(&p),
            Err(Error::InvalidPartition(_))
        ));
        let p = VertexPartition::new([("m", vec!["zz"])]).unwrap();
        assert!(octahedron().quotient_complex(&p).is_err());
    }

    #[test]
    fn isolated_vertices_allowed() {
        let c = cx(&["ab", "c"]);
        assert_eq!(c.vertex_count(), 3);
        assert!(c.is_acyclic());
    }
}
