//! Orthogonality graphs, covering sets of measurement bases, and independence
//! numbers.

use std::collections::{BTreeMap, VecDeque};
use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::states::{
    hadamard_family_with_cap, is_orthogonal, make_state, same_ray, PureState, SignVector,
    DEFAULT_ENUMERATION_CAP, ORTHO_TOL,
};

/// Largest vertex count for which an adjacency matrix is materialized.
pub const DEFAULT_GRAPH_CAP: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub enum Vertex {
    Sign(SignVector),
    State(PureState),
}

impl Vertex {
    pub fn state(&self) -> PureState {
        match self {
            Vertex::Sign(s) => s.to_state(),
            Vertex::State(s) => s.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Vertex::Sign(s) => s.dim(),
            Vertex::State(s) => s.dim(),
        }
    }
}

/// How `orthogonality_graph_with` treats two inputs on the same ray.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DuplicatePolicy {
    Reject,
    /// Keep both as separate vertices. The Hadamard family contains every
    /// sign vector together with its negation, so it needs this.
    Allow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityGraph {
    dim: usize,
    vertices: Vec<Vertex>,
    adjacency: Vec<BitSet>,
}

impl OrthogonalityGraph {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_state(&self, i: usize) -> PureState {
        self.vertices[i].state()
    }

    pub fn states(&self) -> Vec<PureState> {
        self.vertices.iter().map(Vertex::state).collect()
    }

    pub fn neighbors(&self, i: usize) -> &BitSet {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BitSet::count).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, adj) in self.adjacency.iter().enumerate() {
            out.extend(adj.iter().filter(|&j| j > i).map(|j| (i, j)));
        }
        out
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = BitSet::new(self.len());
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen.contains(start) {
                continue;
            }
            seen.insert(start);
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for v in self.adjacency[u].iter() {
                    if !seen.contains(v) {
                        seen.insert(v);
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// True when no two of `indices` are adjacent (and all are in range).
    pub fn is_independent(&self, indices: &[usize]) -> bool {
        if indices.iter().any(|&i| i >= self.len()) {
            return false;
        }
        let set = BitSet::from_indices(self.len(), indices.iter().copied());
        indices.iter().all(|&i| self.adjacency[i].is_disjoint(&set))
    }

    /// Subgraph induced by `indices`, in the given order.
    pub fn induced(&self, indices: &[usize]) -> Result<OrthogonalityGraph> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::IndexOutOfRange {
                what: "vertex",
                index: bad,
                len: self.len(),
            });
        }
        let n = indices.len();
        let adjacency = indices
            .iter()
            .map(|&u| {
                BitSet::from_indices(
                    n,
                    indices
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| self.has_edge(u, v))
                        .map(|(k, _)| k),
                )
            })
            .collect();
        Ok(OrthogonalityGraph {
            dim: self.dim,
            vertices: indices.iter().map(|&i| self.vertices[i].clone()).collect(),
            adjacency,
        })
    }

    /// Degree -> number of vertices with that degree.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for i in 0..self.len() {
            *h.entry(self.degree(i)).or_insert(0) += 1;
        }
        h
    }

    pub fn write_degree_histogram_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["degree", "count"])?;
        for (deg, count) in self.degree_histogram() {
            w.write_record([deg.to_string(), count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            d: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| match v {
                    Vertex::Sign(s) => VertexJson::Bits(s.to_string()),
                    Vertex::State(s) => VertexJson::State(s.clone()),
                })
                .collect(),
            edges: self.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }

    /// Rebuilds a graph from its JSON form, recomputing adjacency from the
    /// vertices and rejecting files whose edge list disagrees.
    pub fn from_json(json: &GraphJson) -> Result<OrthogonalityGraph> {
        let vertices = json
            .vertices
            .iter()
            .map(|v| match v {
                VertexJson::Bits(b) => SignVector::from_bit_string(b).map(Vertex::Sign),
                VertexJson::State(s) => Ok(Vertex::State(s.clone())),
            })
            .collect::<Result<Vec<_>>>()?;
        let graph = build_graph(vertices, DuplicatePolicy::Allow, Execution::default())?;
        if graph.dim != json.d {
            return Err(Error::DimensionMismatch {
                left: graph.dim,
                right: json.d,
            });
        }
        let mut listed: Vec<(usize, usize)> = json
            .edges
            .iter()
            .map(|&[i, j]| (i.min(j), i.max(j)))
            .collect();
        listed.sort_unstable();
        listed.dedup();
        if listed != graph.edges() {
            return Err(Error::InvariantViolation(
                "edge list does not match vertex orthogonality".into(),
            ));
        }
        Ok(graph)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexJson {
    Bits(String),
    State(PureState),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub d: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
}

fn check_graph_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::capacity("graph vertices", n as u128, cap as u128));
    }
    Ok(())
}

fn build_graph(
    vertices: Vec<Vertex>,
    policy: DuplicatePolicy,
    exec: Execution,
) -> Result<OrthogonalityGraph> {
    let Some(first) = vertices.first() else {
        return Err(Error::InvalidParameter(
            "graph needs at least one vertex".into(),
        ));
    };
    let dim = first.dim();
    if let Some(v) = vertices.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: v.dim(),
        });
    }
    check_graph_cap(vertices.len(), DEFAULT_GRAPH_CAP)?;
    let states: Vec<PureState> = vertices.iter().map(Vertex::state).collect();
    let n = states.len();

    if policy == DuplicatePolicy::Reject {
        let dup = exec.map_indexed(n, |i| {
            ((i + 1)..n).find(|&j| same_ray(&states[i], &states[j]).unwrap_or(false))
        });
        if let Some((i, j)) = dup.iter().enumerate().find_map(|(i, j)| j.map(|j| (i, j))) {
            return Err(Error::DuplicateStates {
                first: i,
                second: j,
            });
        }
    }

    let adjacency = exec.map_indexed(n, |i| {
        BitSet::from_indices(
            n,
            (0..n).filter(|&j| j != i && is_orthogonal(&states[i], &states[j]).unwrap_or(false)),
        )
    });
    Ok(OrthogonalityGraph {
        dim,
        vertices,
        adjacency,
    })
}

/// Orthogonality graph of `states`; rejects inputs containing the same ray
/// twice.
pub fn orthogonality_graph(states: &[PureState]) -> Result<OrthogonalityGraph> {
    orthogonality_graph_with(states, DuplicatePolicy::Reject, Execution::default())
}

pub fn orthogonality_graph_with(
    states: &[PureState],
    policy: DuplicatePolicy,
    exec: Execution,
) -> Result<OrthogonalityGraph> {
    build_graph(
        states.iter().cloned().map(Vertex::State).collect(),
        policy,
        exec,
    )
}

/// Orthogonality graph over sign vectors; two sign vectors are orthogonal
/// exactly when their Hamming distance is `d/2`.
pub fn sign_graph(signs: &[SignVector], exec: Execution) -> Result<OrthogonalityGraph> {
    let Some(first) = signs.first() else {
        return Err(Error::InvalidParameter(
            "graph needs at least one vertex".into(),
        ));
    };
    let dim = first.dim();
    if let Some(v) = signs.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: v.dim(),
        });
    }
    check_graph_cap(signs.len(), DEFAULT_GRAPH_CAP)?;
    let half = (dim / 2) as u32;
    let odd = dim % 2 == 1;
    let n = signs.len();
    let adjacency = exec.map_indexed(n, |i| {
        let mut row = BitSet::new(n);
        if !odd {
            for (j, s) in signs.iter().enumerate() {
                if signs[i].hamming(s) == half {
                    row.insert(j);
                }
            }
        }
        row
    });
    Ok(OrthogonalityGraph {
        dim,
        vertices: signs.iter().copied().map(Vertex::Sign).collect(),
        adjacency,
    })
}

/// The Hadamard graph on all `2^d` sign vectors.
pub fn hadamard_graph(d: usize) -> Result<OrthogonalityGraph> {
    hadamard_graph_with(
        d,
        DEFAULT_ENUMERATION_CAP,
        DEFAULT_GRAPH_CAP,
        Execution::default(),
    )
}

pub fn hadamard_graph_with(
    d: usize,
    enumeration_cap: usize,
    graph_cap: usize,
    exec: Execution,
) -> Result<OrthogonalityGraph> {
    if d % 2 == 1 {
        return Err(Error::OddDimension(d));
    }
    let family = hadamard_family_with_cap(d, enumeration_cap)?;
    check_graph_cap(family.len(), graph_cap)?;
    sign_graph(&family, exec)
}

/// Sign vectors of one bit-weight parity. For `d` divisible by 4 each parity
/// class is a connected component of the Hadamard graph.
pub fn hadamard_parity_class(d: usize, odd_weight: bool) -> Result<Vec<SignVector>> {
    Ok(hadamard_family_with_cap(d, DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .filter(|v| (v.weight() % 2 == 1) == odd_weight)
        .collect())
}

/// An orthonormal basis of C^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub id: usize,
    elements: Vec<PureState>,
}

impl MeasurementBasis {
    pub fn new(id: usize, elements: Vec<PureState>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidParameter("empty basis".into()));
        };
        let d = first.dim();
        if elements.len() != d {
            return Err(Error::InvalidParameter(format!(
                "basis in C^{d} needs {d} elements, got {}",
                elements.len()
            )));
        }
        for (i, a) in elements.iter().enumerate() {
            if (a.norm_sqr() - 1.0).abs() > ORTHO_TOL {
                return Err(Error::InvariantViolation(format!(
                    "basis element {i} is not unit norm"
                )));
            }
            for (j, b) in elements.iter().enumerate().skip(i + 1) {
                if !is_orthogonal(a, b)? {
                    return Err(Error::InvariantViolation(format!(
                        "basis elements {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        Ok(MeasurementBasis { id, elements })
    }

    pub fn computational(id: usize, d: usize) -> Result<Self> {
        let elements = (0..d)
            .map(|i| PureState::basis_vector(d, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(id, elements)
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[PureState] {
        &self.elements
    }

    /// Outcome index of `state` in this basis, up to global phase.
    pub fn position_of(&self, state: &PureState) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| same_ray(e, state).unwrap_or(false))
    }

    pub fn contains(&self, state: &PureState) -> bool {
        self.position_of(state).is_some()
    }
}

/// A family of bases such that every graph edge lies inside one of them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringSet {
    pub bases: Vec<MeasurementBasis>,
    /// Graph vertices placed in each basis, parallel to `bases`.
    pub members: Vec<Vec<usize>>,
    /// Edge `(i, j)`, `i < j`, to the id of a basis holding both endpoints.
    #[serde(serialize_with = "serialize_edge_cover")]
    pub edge_cover: BTreeMap<(usize, usize), usize>,
}

fn serialize_edge_cover<S: serde::Serializer>(
    map: &BTreeMap<(usize, usize), usize>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(map.len()))?;
    for (&(i, j), &b) in map {
        seq.serialize_element(&[i, j, b])?;
    }
    seq.end()
}

impl CoveringSet {
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// Checks that every edge of `graph` is mapped to a basis that contains
    /// both endpoint states.
    pub fn verify(&self, graph: &OrthogonalityGraph) -> Result<()> {
        for (i, j) in graph.edges() {
            let Some(&id) = self.edge_cover.get(&(i, j)) else {
                return Err(Error::InvariantViolation(format!(
                    "edge ({i}, {j}) is not covered"
                )));
            };
            let basis = self.bases.iter().find(|b| b.id == id).ok_or_else(|| {
                Error::InvariantViolation(format!("edge ({i}, {j}) maps to unknown basis {id}"))
            })?;
            if !basis.contains(&graph.vertex_state(i)) || !basis.contains(&graph.vertex_state(j)) {
                return Err(Error::InvariantViolation(format!(
                    "basis {id} does not contain both endpoints of edge ({i}, {j})"
                )));
            }
        }
        Ok(())
    }
}

/// Extends an orthonormal list to a full basis with modified Gram-Schmidt
/// over the standard vectors, orthogonalizing twice per candidate.
fn complete_basis(partial: &[PureState], d: usize) -> Option<Vec<PureState>> {
    let mut ortho: Vec<Vec<Complex64>> = partial.iter().map(PureState::amplitudes).collect();
    let mut out: Vec<PureState> = partial.to_vec();
    for k in 0..d {
        if out.len() == d {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        for _pass in 0..2 {
            for q in &ortho {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= norm;
            if z.re.abs() < 1e-15 {
                z.re = 0.0;
            }
            if z.im.abs() < 1e-15 {
                z.im = 0.0;
            }
        }
        let state = make_state(&v).ok()?;
        ortho.push(state.amplitudes());
        out.push(state);
    }
    (out.len() == d).then_some(out)
}

/// Greedy covering set. Each uncovered edge, in lexicographic order, seeds a
/// basis that is first grown with common neighbours (lowest index first) and
/// then completed with Gram-Schmidt; all edges among the graph vertices
/// placed in it are marked covered.
pub fn covering_set(graph: &OrthogonalityGraph) -> Result<CoveringSet> {
    let d = graph.dim();
    let mut bases = Vec::new();
    let mut members_all = Vec::new();
    let mut edge_cover = BTreeMap::new();
    for (i, j) in graph.edges() {
        if edge_cover.contains_key(&(i, j)) {
            continue;
        }
        let mut members = vec![i, j];
        let mut candidates = graph.neighbors(i).intersection(graph.neighbors(j));
        while members.len() < d {
            let Some(k) = candidates.first() else { break };
            members.push(k);
            candidates.intersect_with(graph.neighbors(k));
        }
        let partial: Vec<PureState> = members.iter().map(|&m| graph.vertex_state(m)).collect();
        let elements = complete_basis(&partial, d).ok_or(Error::DegenerateCompletion(i, j))?;
        let id = bases.len();
        let basis =
            MeasurementBasis::new(id, elements).map_err(|_| Error::DegenerateCompletion(i, j))?;
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                edge_cover.entry((a.min(b), a.max(b))).or_insert(id);
            }
        }
        bases.push(basis);
        members.sort_unstable();
        members_all.push(members);
    }
    Ok(CoveringSet {
        bases,
        members: members_all,
        edge_cover,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaStatus {
    Exact,
    LowerBound,
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceResult {
    pub value: u64,
    pub status: AlphaStatus,
    pub witness: Option<Vec<usize>>,
    /// Wall time; left out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl IndependenceResult {
    /// Re-checks the witness against `graph`.
    pub fn verify(&self, graph: &OrthogonalityGraph) -> bool {
        match &self.witness {
            Some(w) => w.len() as u64 == self.value && graph.is_independent(w),
            None => true,
        }
    }
}

/// Branch-and-bound state for maximum independent set, solved as maximum
/// clique in the complement with greedy colouring bounds on bitsets.
struct MisSearch<'a> {
    /// Complement adjacency in search order.
    co_adj: Vec<BitSet>,
    order: &'a [usize],
    best: Vec<usize>,
    deadline: Option<Instant>,
    nodes: u64,
    timed_out: bool,
}

impl MisSearch<'_> {
    fn color_sort(&self, p: &BitSet) -> Vec<(usize, usize)> {
        let mut uncolored = p.clone();
        let mut out = Vec::with_capacity(p.count());
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.difference_with(&self.co_adj[v]);
                uncolored.remove(v);
                out.push((v, color));
            }
        }
        out
    }

    fn expand(&mut self, current: &mut Vec<usize>, mut p: BitSet) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        let colored = self.color_sort(&p);
        for &(v, color) in colored.iter().rev() {
            if current.len() + color <= self.best.len() {
                return;
            }
            current.push(v);
            let next = p.intersection(&self.co_adj[v]);
            if next.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            p.remove(v);
            if self.timed_out {
                return;
            }
        }
    }
}

/// Search order: ascending degree, ties by lowest index.
fn search_order(graph: &OrthogonalityGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..graph.len()).collect();
    order.sort_by_key(|&v| (graph.degree(v), v));
    order
}

fn complement_in_order(graph: &OrthogonalityGraph, order: &[usize]) -> Vec<BitSet> {
    let n = order.len();
    order
        .iter()
        .enumerate()
        .map(|(p, &u)| {
            BitSet::from_indices(
                n,
                order
                    .iter()
                    .enumerate()
                    .filter(|&(q, &v)| q != p && !graph.has_edge(u, v))
                    .map(|(q, _)| q),
            )
        })
        .collect()
}

/// Greedy independent set: repeatedly take the lowest-degree remaining vertex.
pub fn greedy_independent_set(graph: &OrthogonalityGraph) -> Vec<usize> {
    let mut remaining = BitSet::full(graph.len());
    let mut out = Vec::new();
    for v in search_order(graph) {
        if remaining.contains(v) {
            out.push(v);
            remaining.remove(v);
            remaining.difference_with(graph.neighbors(v));
        }
    }
    out.sort_unstable();
    out
}

/// Upper bound on the independence number from a greedy clique cover.
pub fn clique_cover_bound(graph: &OrthogonalityGraph) -> IndependenceResult {
    let start = Instant::now();
    let mut uncovered = BitSet::full(graph.len());
    let mut cliques = 0u64;
    while let Some(v) = uncovered.first() {
        cliques += 1;
        let mut cand = uncovered.intersection(graph.neighbors(v));
        uncovered.remove(v);
        while let Some(u) = cand.first() {
            uncovered.remove(u);
            cand.remove(u);
            cand.intersect_with(graph.neighbors(u));
        }
    }
    IndependenceResult {
        value: cliques,
        status: AlphaStatus::UpperBound,
        witness: None,
        elapsed: start.elapsed(),
    }
}

/// Exact independence number by branch and bound. If `budget` runs out, the
/// best independent set found so far is returned with status `lower_bound`.
pub fn independence_number(graph: &OrthogonalityGraph, budget: Duration) -> IndependenceResult {
    let start = Instant::now();
    let order = search_order(graph);
    let co_adj = complement_in_order(graph, &order);
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(p, &v)| (v, p)).collect();
    let greedy: Vec<usize> = greedy_independent_set(graph)
        .into_iter()
        .map(|v| position[&v])
        .collect();
    let mut search = MisSearch {
        co_adj,
        order: &order,
        best: greedy,
        deadline: start.checked_add(budget),
        nodes: 0,
        timed_out: false,
    };
    if !graph.is_empty() {
        let mut current = Vec::new();
        search.expand(&mut current, BitSet::full(graph.len()));
    }
    let mut witness: Vec<usize> = search.best.iter().map(|&p| search.order[p]).collect();
    witness.sort_unstable();
    IndependenceResult {
        value: witness.len() as u64,
        status: if search.timed_out {
            AlphaStatus::LowerBound
        } else {
            AlphaStatus::Exact
        },
        witness: Some(witness),
        elapsed: start.elapsed(),
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Weight-shell independent set of the Hadamard graph: every sign vector of
/// weight `< d/4` or `> 3d/4`. Two low vectors differ in fewer than `d/2`
/// places and a low/high pair in more than `d/2`, so no pair is adjacent.
/// Witness indices (= bit patterns) are listed when the set fits under
/// `cap`.
pub fn independent_set_lower_bound(d: usize) -> Result<IndependenceResult> {
    independent_set_lower_bound_with_cap(d, DEFAULT_ENUMERATION_CAP)
}

pub fn independent_set_lower_bound_with_cap(d: usize, cap: usize) -> Result<IndependenceResult> {
    let start = Instant::now();
    if d % 2 == 1 {
        return Err(Error::OddDimension(d));
    }
    if !(2..=SignVector::MAX_DIM).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "weight shell needs 2 <= d <= {}",
            SignVector::MAX_DIM
        )));
    }
    let low = |w: usize| 4 * w < d;
    let high = |w: usize| 4 * w > 3 * d;
    let size: u128 = (0..=d)
        .filter(|&w| low(w) || high(w))
        .map(|w| binomial(d as u64, w as u64))
        .sum();
    let witness = if size <= cap as u128 && (1u128 << d) <= DEFAULT_ENUMERATION_CAP as u128 {
        let w: Vec<usize> = (0..(1usize << d))
            .filter(|&b| {
                let wt = b.count_ones() as usize;
                low(wt) || high(wt)
            })
            .collect();
        let half = (d / 2) as u32;
        let ok = w.iter().enumerate().all(|(x, &a)| {
            w[x + 1..]
                .iter()
                .all(|&b| ((a ^ b) as u64).count_ones() != half)
        });
        if !ok {
            return Err(Error::InvariantViolation(
                "weight-shell set contains an orthogonal pair".into(),
            ));
        }
        Some(w)
    } else {
        None
    };
    Ok(IndependenceResult {
        value: size as u64,
        status: AlphaStatus::LowerBound,
        witness,
        elapsed: start.elapsed(),
    })
}

/// `(2 - epsilon)^d`, the parametric Frankl-Rödl cap on the Hadamard-graph
/// independence number.
pub fn frankl_rodl_bound(d: usize, epsilon: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    check_epsilon(epsilon)?;
    Ok((2.0 - epsilon).powi(d as i32))
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 2), got {epsilon}"
        )));
    }
    Ok(())
}
