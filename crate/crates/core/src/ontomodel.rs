//! Finite ontological models over deterministic response assignments.
//!
//! An ontic point is one definite outcome per measurement basis; the
//! response function it induces is the indicator of that outcome, so the
//! responses for each basis sum to one. Preparations carry probability
//! measures over the (finite) ontic space, and the power set plays the role
//! of the sigma-algebra.
//!
//! Restricting to deterministic assignments loses nothing when maximizing
//! overlaps: any model maps onto assignments through the stochastic map
//! `lambda -> prod_M xi_M(f(M)|lambda)`, which keeps every Born statistic and
//! can only shrink total-variation distance. [`max_total_overlap_lp`] is
//! therefore the exact supremum of the total classical overlap over all
//! models that reproduce the quantum statistics of the given bases.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Serialize, Serializer};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{orthogonality_graph_with, DuplicatePolicy, MeasurementBasis};
use crate::lp::{self, LinearProgram, LpScalar, Relation, SolverOptions};
use crate::states::{
    born_probability, exact_born, inner_product, is_orthogonal, make_state, quantum_overlap,
    PureState, ORTHO_TOL,
};

pub const DEFAULT_ASSIGNMENT_CAP: usize = 1 << 22;
/// Measures must sum to one within this tolerance.
pub const MEASURE_TOL: f64 = 1e-9;
/// Measures over larger ontic spaces are stored sparsely.
pub const SPARSE_THRESHOLD: usize = 1 << 16;

/// All assignments `f: bases -> outcomes`, indexed in mixed-radix order with
/// the first basis as the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnticSpace {
    dim: usize,
    strides: Vec<usize>,
    len: usize,
}

impl OnticSpace {
    pub fn new(dim: usize, n_bases: usize, cap: usize) -> Result<Self> {
        if n_bases == 0 {
            return Err(Error::InvalidParameter(
                "at least one basis is required".into(),
            ));
        }
        let count = (dim as u128)
            .checked_pow(n_bases as u32)
            .unwrap_or(u128::MAX);
        if count > cap as u128 {
            return Err(Error::capacity(
                "deterministic assignments",
                count,
                cap as u128,
            ));
        }
        let mut strides = vec![1; n_bases];
        for m in (0..n_bases.saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * dim;
        }
        Ok(OnticSpace {
            dim,
            strides,
            len: count as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_bases(&self) -> usize {
        self.strides.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn outcome(&self, lambda: usize, basis_pos: usize) -> usize {
        (lambda / self.strides[basis_pos]) % self.dim
    }

    pub fn assignment(&self, lambda: usize) -> DeterministicAssignment {
        DeterministicAssignment {
            outcomes: (0..self.n_bases())
                .map(|m| self.outcome(lambda, m))
                .collect(),
        }
    }

    pub fn index_of(&self, outcomes: &[usize]) -> usize {
        outcomes.iter().zip(&self.strides).map(|(o, s)| o * s).sum()
    }
}

/// One outcome per basis, indexed by the basis position in its model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterministicAssignment {
    pub outcomes: Vec<usize>,
}

impl DeterministicAssignment {
    /// Induced response `xi_M(a|lambda)`: 1 for the assigned outcome, else 0.
    pub fn response(&self, basis_pos: usize, outcome: usize) -> f64 {
        if self.outcomes[basis_pos] == outcome {
            1.0
        } else {
            0.0
        }
    }
}

pub fn enumerate_assignments(bases: &[MeasurementBasis]) -> Result<Vec<DeterministicAssignment>> {
    enumerate_assignments_with_cap(bases, DEFAULT_ASSIGNMENT_CAP)
}

pub fn enumerate_assignments_with_cap(
    bases: &[MeasurementBasis],
    cap: usize,
) -> Result<Vec<DeterministicAssignment>> {
    let dim = common_basis_dim(bases)?;
    let space = OnticSpace::new(dim, bases.len(), cap)?;
    Ok((0..space.len()).map(|l| space.assignment(l)).collect())
}

fn common_basis_dim(bases: &[MeasurementBasis]) -> Result<usize> {
    let Some(first) = bases.first() else {
        return Err(Error::InvalidParameter(
            "at least one basis is required".into(),
        ));
    };
    let d = first.dim();
    if let Some(b) = bases.iter().find(|b| b.dim() != d) {
        return Err(Error::DimensionMismatch {
            left: d,
            right: b.dim(),
        });
    }
    Ok(d)
}

/// Probability vector over an ontic space.
#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    Dense(Vec<f64>),
    Sparse {
        len: usize,
        entries: Vec<(usize, f64)>,
    },
}

impl Measure {
    pub fn from_weights(weights: Vec<f64>) -> Self {
        if weights.len() > SPARSE_THRESHOLD {
            let len = weights.len();
            let entries = weights
                .into_iter()
                .enumerate()
                .filter(|(_, w)| *w != 0.0)
                .collect();
            Measure::Sparse { len, entries }
        } else {
            Measure::Dense(weights)
        }
    }

    /// Entries must be sorted by index without repeats.
    pub fn from_entries(len: usize, entries: Vec<(usize, f64)>) -> Self {
        if len > SPARSE_THRESHOLD {
            Measure::Sparse { len, entries }
        } else {
            let mut w = vec![0.0; len];
            for (i, v) in entries {
                w[i] = v;
            }
            Measure::Dense(w)
        }
    }

    pub fn point(len: usize, at: usize) -> Self {
        Self::from_entries(len, vec![(at, 1.0)])
    }

    pub fn len(&self) -> usize {
        match self {
            Measure::Dense(w) => w.len(),
            Measure::Sparse { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            Measure::Dense(w) => w[i],
            Measure::Sparse { entries, .. } => entries
                .binary_search_by_key(&i, |e| e.0)
                .map(|k| entries[k].1)
                .unwrap_or(0.0),
        }
    }

    /// Nonzero `(index, weight)` pairs in index order.
    pub fn entries(&self) -> Vec<(usize, f64)> {
        match self {
            Measure::Dense(w) => w
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .collect(),
            Measure::Sparse { entries, .. } => entries.clone(),
        }
    }

    pub fn total(&self) -> f64 {
        self.entries().iter().map(|e| e.1).sum()
    }

    pub fn mass(&self, subset: &BitSet) -> f64 {
        self.entries()
            .iter()
            .filter(|(i, _)| subset.contains(*i))
            .map(|e| e.1)
            .sum()
    }

    pub fn support(&self) -> BitSet {
        BitSet::from_indices(self.len(), self.entries().into_iter().map(|e| e.0))
    }
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct SparseJson<'a> {
            len: usize,
            entries: &'a [(usize, f64)],
        }
        match self {
            Measure::Dense(w) => w.serialize(s),
            Measure::Sparse { len, entries } => SparseJson { len: *len, entries }.serialize(s),
        }
    }
}

/// Finite ontic space, bases, and one measure per preparation.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteOntModel {
    space: OnticSpace,
    bases: Vec<MeasurementBasis>,
    preparations: Vec<PureState>,
    measures: Vec<Measure>,
}

impl FiniteOntModel {
    pub fn new(
        bases: Vec<MeasurementBasis>,
        preparations: Vec<PureState>,
        measures: Vec<Measure>,
    ) -> Result<Self> {
        Self::with_cap(bases, preparations, measures, DEFAULT_ASSIGNMENT_CAP)
    }

    pub fn with_cap(
        bases: Vec<MeasurementBasis>,
        preparations: Vec<PureState>,
        measures: Vec<Measure>,
        cap: usize,
    ) -> Result<Self> {
        let dim = common_basis_dim(&bases)?;
        let space = OnticSpace::new(dim, bases.len(), cap)?;
        if let Some(p) = preparations.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: p.dim(),
            });
        }
        if preparations.len() != measures.len() {
            return Err(Error::InvalidParameter(format!(
                "{} preparations but {} measures",
                preparations.len(),
                measures.len()
            )));
        }
        for (k, m) in measures.iter().enumerate() {
            if m.len() != space.len() {
                return Err(Error::InvalidParameter(format!(
                    "measure {k} has length {}, ontic space has {}",
                    m.len(),
                    space.len()
                )));
            }
            if m.entries().iter().any(|e| e.1 < 0.0 || !e.1.is_finite()) {
                return Err(Error::InvariantViolation(format!(
                    "measure {k} has a negative or non-finite weight"
                )));
            }
            let total = m.total();
            if (total - 1.0).abs() > MEASURE_TOL {
                return Err(Error::InvariantViolation(format!(
                    "measure {k} sums to {total}"
                )));
            }
        }
        Ok(FiniteOntModel {
            space,
            bases,
            preparations,
            measures,
        })
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn bases(&self) -> &[MeasurementBasis] {
        &self.bases
    }

    pub fn preparations(&self) -> &[PureState] {
        &self.preparations
    }

    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    pub fn measure(&self, i: usize) -> Result<&Measure> {
        self.measures.get(i).ok_or(Error::IndexOutOfRange {
            what: "preparation",
            index: i,
            len: self.measures.len(),
        })
    }

    pub fn assignment_count(&self) -> usize {
        self.space.len()
    }

    fn basis_position(&self, id: usize) -> Result<usize> {
        self.bases
            .iter()
            .position(|b| b.id == id)
            .ok_or(Error::IndexOutOfRange {
                what: "basis id",
                index: id,
                len: self.bases.len(),
            })
    }

    pub fn to_json(&self) -> ModelJson<'_> {
        ModelJson {
            bases: &self.bases,
            assignment_count: self.space.len(),
            preparations: &self.preparations,
            measures: &self.measures,
        }
    }
}

#[derive(Serialize)]
pub struct ModelJson<'a> {
    pub bases: &'a [MeasurementBasis],
    pub assignment_count: usize,
    pub preparations: &'a [PureState],
    pub measures: &'a [Measure],
}

/// `Gamma^a_M`: ontic points that answer `outcome` for basis `basis_id`.
pub fn gamma_set(model: &FiniteOntModel, basis_id: usize, outcome: usize) -> Result<BitSet> {
    let pos = model.basis_position(basis_id)?;
    if outcome >= model.space.dim() {
        return Err(Error::IndexOutOfRange {
            what: "outcome",
            index: outcome,
            len: model.space.dim(),
        });
    }
    Ok(BitSet::from_indices(
        model.space.len(),
        (0..model.space.len()).filter(|&l| model.space.outcome(l, pos) == outcome),
    ))
}

/// Intersection of `Gamma^a_M` over every basis `M` of the model that
/// contains `a` (up to phase).
pub fn gamma_cap(model: &FiniteOntModel, a: &PureState) -> Result<BitSet> {
    let hits: Vec<(usize, usize)> = model
        .bases
        .iter()
        .enumerate()
        .filter_map(|(m, b)| b.position_of(a).map(|o| (m, o)))
        .collect();
    if hits.is_empty() {
        return Err(Error::NotInBasis);
    }
    Ok(BitSet::from_indices(
        model.space.len(),
        (0..model.space.len())
            .filter(|&l| hits.iter().all(|&(m, o)| model.space.outcome(l, m) == o)),
    ))
}

/// Largest deviation between a model marginal and the Born probability,
/// over all (preparation, basis, outcome).
pub fn born_check(model: &FiniteOntModel) -> f64 {
    let d = model.space.dim();
    let nb = model.bases.len();
    let mut worst: f64 = 0.0;
    for (prep, measure) in model.preparations.iter().zip(&model.measures) {
        let mut marginals = vec![0.0; nb * d];
        for (l, w) in measure.entries() {
            for m in 0..nb {
                marginals[m * d + model.space.outcome(l, m)] += w;
            }
        }
        for (m, basis) in model.bases.iter().enumerate() {
            for (o, e) in basis.elements().iter().enumerate() {
                let p = born_probability(e, prep).unwrap_or(f64::NAN);
                worst = worst.max((marginals[m * d + o] - p).abs());
            }
        }
    }
    worst
}

fn merged(a: &Measure, b: &Measure, mut f: impl FnMut(f64, f64)) {
    let (ea, eb) = (a.entries(), b.entries());
    let (mut i, mut j) = (0, 0);
    while i < ea.len() || j < eb.len() {
        let ia = ea.get(i).map_or(usize::MAX, |e| e.0);
        let ib = eb.get(j).map_or(usize::MAX, |e| e.0);
        if ia == ib {
            f(ea[i].1, eb[j].1);
            i += 1;
            j += 1;
        } else if ia < ib {
            f(ea[i].1, 0.0);
            i += 1;
        } else {
            f(0.0, eb[j].1);
            j += 1;
        }
    }
}

/// `L_C = sum_lambda min(mu_i, mu_j)`.
pub fn classical_overlap(model: &FiniteOntModel, i: usize, j: usize) -> Result<f64> {
    let (a, b) = (model.measure(i)?, model.measure(j)?);
    let mut total = 0.0;
    merged(a, b, |x, y| total += x.min(y));
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VariationalDistance {
    /// `sup_Gamma [mu_i(Gamma) - mu_j(Gamma)]`.
    pub distance: f64,
    /// Best probability of naming the preparation from the ontic state,
    /// `(1 + distance) / 2`.
    pub guessing_probability: f64,
}

pub fn variational_distance(
    model: &FiniteOntModel,
    i: usize,
    j: usize,
) -> Result<VariationalDistance> {
    let (a, b) = (model.measure(i)?, model.measure(j)?);
    let mut total = 0.0;
    merged(a, b, |x, y| total += (x - y).max(0.0));
    Ok(VariationalDistance {
        distance: total,
        guessing_probability: (1.0 + total) / 2.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proposition1Check {
    pub holds: bool,
    /// `mu_psi(Gamma) - L_C(psi, phi)`.
    pub slack: f64,
    pub overlap: f64,
    pub mass: f64,
}

/// For `gamma` of full `mu_phi` measure, checks `L_C(psi, phi) <=
/// mu_psi(gamma)` (tolerance 1e-9).
pub fn proposition1_check(
    model: &FiniteOntModel,
    psi: usize,
    phi: usize,
    gamma: &BitSet,
) -> Result<Proposition1Check> {
    if gamma.capacity() != model.space.len() {
        return Err(Error::InvalidParameter(
            "subset has the wrong universe size".into(),
        ));
    }
    let phi_mass = model.measure(phi)?.mass(gamma);
    if (phi_mass - 1.0).abs() > MEASURE_TOL {
        return Err(Error::NotMeasureOne { mass: phi_mass });
    }
    let mass = model.measure(psi)?.mass(gamma);
    let overlap = classical_overlap(model, psi, phi)?;
    Ok(Proposition1Check {
        holds: overlap <= mass + 1e-9,
        slack: mass - overlap,
        overlap,
        mass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Float,
    /// Exact rationals; every state and basis element must be exact.
    Exact,
}

#[derive(Clone, Copy, Debug)]
pub struct LpOptions {
    pub arithmetic: Arithmetic,
    pub assignment_cap: usize,
    pub solver: SolverOptions,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            arithmetic: Arithmetic::Float,
            assignment_cap: DEFAULT_ASSIGNMENT_CAP,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LpStats {
    pub arithmetic: Arithmetic,
    pub iterations: usize,
    pub duality_gap: f64,
    pub dual_infeasibility: f64,
    pub assignments: usize,
    pub variables: usize,
    pub constraints: usize,
    /// Measure entries fixed to zero because a Born probability vanishes.
    pub presolve_fixed: usize,
    /// Input bases dropped because an earlier basis has the same rays.
    pub merged_bases: usize,
}

#[derive(Clone, Debug)]
pub struct LpOutcome {
    pub value: f64,
    pub exact_value: Option<BigRational>,
    /// Witness model; preparation 0 is `psi`, preparation `k + 1` is the
    /// `k`-th family state.
    pub model: FiniteOntModel,
    /// `L_C(psi, a)` in the witness, per family state.
    pub pair_overlaps: Vec<f64>,
    pub exact_pair_overlaps: Option<Vec<BigRational>>,
    pub stats: LpStats,
}

/// Checks that every orthogonal pair in `family` shares one of `bases`.
pub fn check_covering(family: &[PureState], bases: &[MeasurementBasis]) -> Result<()> {
    let graph = orthogonality_graph_with(family, DuplicatePolicy::Allow, Execution::default())?;
    for (i, j) in graph.edges() {
        let covered = bases
            .iter()
            .any(|b| b.contains(&family[i]) && b.contains(&family[j]));
        if !covered {
            return Err(Error::InvalidParameter(format!(
                "no basis contains both states of orthogonal pair ({i}, {j})"
            )));
        }
    }
    Ok(())
}

/// Maximum of `sum_a L_C(psi, a)` over all finite models whose preparations
/// reproduce the Born statistics of `bases`.
///
/// Variables are `mu_p(lambda)` for every preparation plus auxiliaries
/// `t_{a,lambda} <= min(mu_psi(lambda), mu_a(lambda))`; the objective is
/// `sum t`. Entries forced to zero by a vanishing Born probability are
/// removed before solving.
pub fn max_total_overlap_lp(
    psi: &PureState,
    family: &[PureState],
    bases: &[MeasurementBasis],
    options: LpOptions,
) -> Result<LpOutcome> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("state family is empty".into()));
    }
    let dim = common_basis_dim(bases)?;
    for s in std::iter::once(psi).chain(family) {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: s.dim(),
            });
        }
    }
    check_covering(family, bases)?;
    let distinct = distinct_measurements(bases);
    let merged_bases = bases.len() - distinct.len();
    let bases = &distinct[..];
    let space = OnticSpace::new(dim, bases.len(), options.assignment_cap)?;
    let mut preps = Vec::with_capacity(family.len() + 1);
    preps.push(psi.clone());
    preps.extend_from_slice(family);

    match options.arithmetic {
        Arithmetic::Float => {
            let born = born_table(&preps, bases, |e, p| {
                let v = born_probability(e, p)?;
                let zero = exact_born(e, p)?
                    .map_or(inner_product(e, p)?.norm() < ORTHO_TOL, |r| r.is_zero());
                Ok(if zero { 0.0 } else { v })
            })?;
            solve_overlap_lp(space, bases, preps, born, options.solver, merged_bases)
        }
        Arithmetic::Exact => {
            let born = born_table(&preps, bases, |e, p| {
                let r = exact_born(e, p)?.ok_or(Error::InexactState)?;
                Ok(BigRational::new(
                    BigInt::from(*r.numer()),
                    BigInt::from(*r.denom()),
                ))
            })?;
            solve_overlap_lp(space, bases, preps, born, options.solver, merged_bases)
        }
    }
}

/// Keeps the first basis of every group whose elements agree up to phase
/// (in any order): they describe the same measurement, so their responses
/// and Born constraints coincide.
pub fn distinct_measurements(bases: &[MeasurementBasis]) -> Vec<MeasurementBasis> {
    let mut kept: Vec<MeasurementBasis> = Vec::new();
    for b in bases {
        if !kept
            .iter()
            .any(|k| b.elements().iter().all(|e| k.contains(e)))
        {
            kept.push(b.clone());
        }
    }
    kept
}

/// `table[p][m][o] = |<M_o|p>|^2`.
fn born_table<T>(
    preps: &[PureState],
    bases: &[MeasurementBasis],
    f: impl Fn(&PureState, &PureState) -> Result<T>,
) -> Result<Vec<Vec<Vec<T>>>> {
    preps
        .iter()
        .map(|p| {
            bases
                .iter()
                .map(|b| b.elements().iter().map(|e| f(e, p)).collect())
                .collect()
        })
        .collect()
}

fn solve_overlap_lp<T: LpScalar + Send + Sync + 'static>(
    space: OnticSpace,
    bases: &[MeasurementBasis],
    preps: Vec<PureState>,
    born: Vec<Vec<Vec<T>>>,
    solver: SolverOptions,
    merged_bases: usize,
) -> Result<LpOutcome> {
    let nb = bases.len();
    let n_preps = preps.len();

    // Presolve: mu_p(lambda) = 0 whenever lambda answers an outcome that p
    // can never produce.
    let allowed: Vec<Vec<usize>> = Execution::default().map_indexed(n_preps, |p| {
        (0..space.len())
            .filter(|&l| (0..nb).all(|m| !born[p][m][space.outcome(l, m)].is_exact_zero()))
            .collect()
    });
    let presolve_fixed = n_preps * space.len() - allowed.iter().map(Vec::len).sum::<usize>();

    let mut offsets = Vec::with_capacity(n_preps);
    let mut n_vars = 0;
    for a in &allowed {
        offsets.push(n_vars);
        n_vars += a.len();
    }
    // Overlap auxiliaries: (family index, position in allowed[0], position in allowed[a]).
    let mut aux: Vec<(usize, usize, usize)> = Vec::new();
    for a in 1..n_preps {
        let (x, y) = (&allowed[0], &allowed[a]);
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Equal => {
                    aux.push((a, i, j));
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
            }
        }
    }
    let aux_offset = n_vars;
    n_vars += aux.len();

    let mut program = LinearProgram::<T>::new(n_vars);
    for k in 0..aux.len() {
        program.objective[aux_offset + k] = T::one();
    }
    for p in 0..n_preps {
        let vars: Vec<(usize, T)> = (0..allowed[p].len())
            .map(|k| (offsets[p] + k, T::one()))
            .collect();
        program.add(vars, Relation::Eq, T::one());
        for m in 0..nb {
            let mut buckets: Vec<Vec<(usize, T)>> = vec![Vec::new(); space.dim()];
            for (k, &l) in allowed[p].iter().enumerate() {
                buckets[space.outcome(l, m)].push((offsets[p] + k, T::one()));
            }
            for (o, coeffs) in buckets.into_iter().enumerate() {
                let rhs = born[p][m][o].clone();
                if rhs.is_exact_zero() {
                    continue;
                }
                program.add(coeffs, Relation::Eq, rhs);
            }
        }
    }
    for (k, &(a, i, j)) in aux.iter().enumerate() {
        let t = aux_offset + k;
        program.add(
            vec![(t, T::one()), (offsets[0] + i, -T::one())],
            Relation::Le,
            T::zero(),
        );
        program.add(
            vec![(t, T::one()), (offsets[a] + j, -T::one())],
            Relation::Le,
            T::zero(),
        );
    }

    let solution = lp::solve(&program, solver)?;

    let measures: Vec<Measure> = (0..n_preps)
        .map(|p| {
            let entries = allowed[p]
                .iter()
                .enumerate()
                .map(|(k, &l)| (l, solution.x[offsets[p] + k].to_f64().max(0.0)))
                .filter(|e| e.1 != 0.0)
                .collect();
            Measure::from_entries(space.len(), entries)
        })
        .collect();
    let exact_pair_overlaps = T::EXACT.then(|| {
        (1..n_preps)
            .map(|a| {
                let (x, y) = (&allowed[0], &allowed[a]);
                let mut total = T::zero();
                let mut j = 0;
                for (i, &l) in x.iter().enumerate() {
                    while j < y.len() && y[j] < l {
                        j += 1;
                    }
                    if j < y.len() && y[j] == l {
                        let u = solution.x[offsets[0] + i].clone();
                        let v = solution.x[offsets[a] + j].clone();
                        total = total + if u < v { u } else { v };
                    }
                }
                to_big_rational(&total)
            })
            .collect::<Vec<_>>()
    });
    let assignments = space.len();
    let model = FiniteOntModel {
        space,
        bases: bases.to_vec(),
        preparations: preps,
        measures,
    };
    let pair_overlaps = (1..n_preps)
        .map(|a| classical_overlap(&model, 0, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(LpOutcome {
        value: solution.objective.to_f64(),
        exact_value: T::EXACT.then(|| to_big_rational(&solution.objective)),
        model,
        pair_overlaps,
        exact_pair_overlaps,
        stats: LpStats {
            arithmetic: if T::EXACT {
                Arithmetic::Exact
            } else {
                Arithmetic::Float
            },
            iterations: solution.iterations,
            duality_gap: solution.duality_gap,
            dual_infeasibility: solution.dual_infeasibility,
            assignments,
            variables: program.n_vars,
            constraints: program.constraints.len(),
            presolve_fixed,
            merged_bases,
        },
    })
}

fn to_big_rational<T: LpScalar + 'static>(v: &T) -> BigRational {
    // Only called when T is exact, where T = BigRational.
    let any: &dyn std::any::Any = v as &dyn std::any::Any;
    any.downcast_ref::<BigRational>()
        .cloned()
        .unwrap_or_else(|| {
            BigRational::from_float(v.to_f64()).unwrap_or_else(<BigRational as Zero>::zero)
        })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairOverlap {
    pub psi: usize,
    pub phi: usize,
    pub classical: f64,
    pub quantum: f64,
    /// `L_C / L_Q`; `None` for orthogonal pairs (`L_Q = 0`).
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapReport {
    pub pairs: Vec<PairOverlap>,
    pub total_classical: f64,
    pub alpha_bound: Option<f64>,
    /// Mean ratio over the pairs with `L_Q > 0`.
    pub kbar: Option<f64>,
}

/// Per-pair classical and quantum overlaps between preparation `psi` and
/// each preparation in `family`.
pub fn overlap_report(
    model: &FiniteOntModel,
    psi: usize,
    family: &[usize],
    alpha_bound: Option<f64>,
) -> Result<OverlapReport> {
    let psi_state = model.preparations.get(psi).ok_or(Error::IndexOutOfRange {
        what: "preparation",
        index: psi,
        len: model.preparations.len(),
    })?;
    let mut pairs = Vec::with_capacity(family.len());
    for &phi in family {
        let classical = classical_overlap(model, psi, phi)?;
        let phi_state = &model.preparations[phi];
        let quantum = quantum_overlap(psi_state, phi_state)?;
        let ratio = if is_orthogonal(psi_state, phi_state)? {
            None
        } else {
            Some(classical / quantum)
        };
        pairs.push(PairOverlap {
            psi,
            phi,
            classical,
            quantum,
            ratio,
        });
    }
    let ratios: Vec<f64> = pairs.iter().filter_map(|p| p.ratio).collect();
    Ok(OverlapReport {
        total_classical: pairs.iter().map(|p| p.classical).sum(),
        kbar: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
        alpha_bound,
        pairs,
    })
}

/// Product of the Born distributions of every basis; always reproduces the
/// quantum statistics.
pub fn product_measure(
    space: &OnticSpace,
    bases: &[MeasurementBasis],
    prep: &PureState,
) -> Result<Measure> {
    let probs: Vec<Vec<f64>> = bases
        .iter()
        .map(|b| {
            b.elements()
                .iter()
                .map(|e| born_probability(e, prep))
                .collect()
        })
        .collect::<Result<_>>()?;
    let weights = (0..space.len())
        .map(|l| {
            (0..bases.len())
                .map(|m| probs[m][space.outcome(l, m)])
                .product()
        })
        .collect();
    Ok(Measure::from_weights(weights))
}

/// Comonotone coupling of the per-basis outcome distributions, with outcomes
/// stacked on [0, 1] in the order given by `orders[m]`.
fn comonotone_coupling(space: &OnticSpace, probs: &[Vec<f64>], orders: &[Vec<usize>]) -> Vec<f64> {
    let mut cuts: Vec<Vec<f64>> = Vec::with_capacity(probs.len());
    let mut all = vec![0.0, 1.0];
    for (p, order) in probs.iter().zip(orders) {
        let total: f64 = p.iter().sum();
        let mut acc = 0.0;
        let mut c = Vec::with_capacity(order.len());
        for &o in order {
            acc += p[o] / total;
            c.push(acc.min(1.0));
        }
        *c.last_mut().unwrap() = 1.0;
        all.extend_from_slice(&c);
        cuts.push(c);
    }
    all.sort_by(f64::total_cmp);
    all.dedup();
    let mut weights = vec![0.0; space.len()];
    for w in all.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let outcomes: Vec<usize> = cuts
            .iter()
            .zip(orders)
            .map(|(c, order)| order[c.iter().position(|&x| mid < x).unwrap_or(c.len() - 1)])
            .collect();
        weights[space.index_of(&outcomes)] += hi - lo;
    }
    weights
}

fn random_state<R: Rng>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = make_state(&amps) {
            return s;
        }
    }
}

/// Haar-like random basis from Gram-Schmidt on Gaussian vectors.
pub fn random_basis<R: Rng>(rng: &mut R, id: usize, dim: usize) -> Result<MeasurementBasis> {
    loop {
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut v = random_state(rng, dim).amplitudes();
            for _pass in 0..2 {
                for q in &out {
                    let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= proj * qi;
                    }
                }
            }
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n < 1e-6 {
                break;
            }
            out.push(v.iter().map(|z| z / n).collect());
        }
        if out.len() == dim {
            let elements = out
                .iter()
                .map(|v| make_state(v))
                .collect::<Result<Vec<_>>>()?;
            if let Ok(b) = MeasurementBasis::new(id, elements) {
                return Ok(b);
            }
        }
    }
}

/// Random Born-reproducing model: random bases, preparations that are either
/// random states or basis elements, and measures that mix the product
/// measure with random comonotone couplings.
pub fn random_model<R: Rng>(
    rng: &mut R,
    dim: usize,
    n_bases: usize,
    n_preps: usize,
) -> Result<FiniteOntModel> {
    let bases = (0..n_bases)
        .map(|id| random_basis(rng, id, dim))
        .collect::<Result<Vec<_>>>()?;
    let space = OnticSpace::new(dim, n_bases, DEFAULT_ASSIGNMENT_CAP)?;
    let mut preparations = Vec::with_capacity(n_preps);
    for _ in 0..n_preps {
        if rng.gen_bool(0.5) {
            let b = &bases[rng.gen_range(0..n_bases)];
            preparations.push(b.elements()[rng.gen_range(0..dim)].clone());
        } else {
            preparations.push(random_state(rng, dim));
        }
    }
    let mut measures = Vec::with_capacity(n_preps);
    for prep in &preparations {
        let probs: Vec<Vec<f64>> = bases
            .iter()
            .map(|b| {
                b.elements()
                    .iter()
                    .map(|e| born_probability(e, prep))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let parts = rng.gen_range(1..=3);
        let mut weights = vec![0.0; space.len()];
        let mix: Vec<f64> = (0..=parts).map(|_| rng.gen_range(0.05..1.0)).collect();
        let mix_total: f64 = mix.iter().sum();
        for (k, &w) in mix.iter().enumerate() {
            let component = if k == parts && rng.gen_bool(0.5) {
                match product_measure(&space, &bases, prep)? {
                    Measure::Dense(v) => v,
                    m => (0..space.len()).map(|l| m.get(l)).collect(),
                }
            } else {
                let orders: Vec<Vec<usize>> = (0..n_bases)
                    .map(|_| {
                        let mut o: Vec<usize> = (0..dim).collect();
                        o.shuffle(rng);
                        o
                    })
                    .collect();
                comonotone_coupling(&space, &probs, &orders)
            };
            for (acc, c) in weights.iter_mut().zip(component) {
                *acc += w / mix_total * c;
            }
        }
        let total: f64 = weights.iter().sum();
        measures.push(Measure::from_weights(
            weights.iter().map(|w| w / total).collect(),
        ));
    }
    FiniteOntModel::new(bases, preparations, measures)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomModelShape {
    pub dims: RangeInclusive<usize>,
    pub bases: RangeInclusive<usize>,
    pub preparations: RangeInclusive<usize>,
}

impl Default for RandomModelShape {
    fn default() -> Self {
        RandomModelShape {
            dims: 2..=3,
            bases: 1..=3,
            preparations: 2..=4,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Proposition1Summary {
    pub models: usize,
    pub checks: usize,
    pub violations: usize,
    /// Largest `L_C - mu_psi(Gamma)` seen (negative when every check had
    /// slack).
    pub max_excess: f64,
    pub max_born_deviation: f64,
}

/// Randomized search for counterexamples to `L_C(psi, phi) <= mu_psi(Gamma)`
/// over measure-one sets `Gamma` of `mu_phi`: the full space, the support of
/// `mu_phi`, random supersets of it, and `Gamma^phi` intersections when
/// `phi` is a basis element. Model `k` is generated from stream `k` of a
/// ChaCha generator seeded with `seed`.
pub fn proposition1_search(
    seed: u64,
    n_models: usize,
    shape: &RandomModelShape,
    exec: Execution,
) -> Result<Proposition1Summary> {
    let per_model = exec.map_indexed(n_models, |k| -> Result<Proposition1Summary> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let dim = rng.gen_range(shape.dims.clone());
        let nb = rng.gen_range(shape.bases.clone());
        let np = rng.gen_range(shape.preparations.clone());
        let model = random_model(&mut rng, dim, nb, np)?;
        let mut s = Proposition1Summary {
            models: 1,
            max_excess: f64::NEG_INFINITY,
            max_born_deviation: born_check(&model),
            ..Default::default()
        };
        let n = model.space.len();
        for phi in 0..np {
            let support = model.measures[phi].support();
            let mut candidates = vec![BitSet::full(n), support.clone()];
            for _ in 0..3 {
                let mut g = support.clone();
                for l in 0..n {
                    if rng.gen_bool(0.3) {
                        g.insert(l);
                    }
                }
                candidates.push(g);
            }
            if let Ok(g) = gamma_cap(&model, &model.preparations[phi]) {
                candidates.push(g);
            }
            for psi in 0..np {
                for gamma in &candidates {
                    let check = proposition1_check(&model, psi, phi, gamma)?;
                    s.checks += 1;
                    if !check.holds {
                        s.violations += 1;
                    }
                    s.max_excess = s.max_excess.max(-check.slack);
                }
            }
        }
        Ok(s)
    });
    let mut total = Proposition1Summary {
        max_excess: f64::NEG_INFINITY,
        ..Default::default()
    };
    for s in per_model {
        let s = s?;
        total.models += s.models;
        total.checks += s.checks;
        total.violations += s.violations;
        total.max_excess = total.max_excess.max(s.max_excess);
        total.max_born_deviation = total.max_born_deviation.max(s.max_born_deviation);
    }
    Ok(total)
}
