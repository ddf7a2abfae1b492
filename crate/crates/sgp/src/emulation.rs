//! Implementation and modelling relations between structures.
//!
//! The checkers verify the defining clauses directly and report the
//! first violation with a witness. [`find_division`] searches for an
//! emulation witness by enumerating subsemigroups of the target and
//! looking for surjective homomorphisms onto the source; a returned
//! witness is always re-verified before it leaves the searcher, and a
//! `None` answer means the search space was exhausted, never that a
//! limit was hit (limits raise a resource error instead).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::constructions::{Cascade, FiniteFunction};
use crate::enumeration::closed_subsets;
use crate::error::{Error, Result};
use crate::table::MulTable;
use crate::transform::Transformation;

/// A relation from the elements of a source structure to subsets of a
/// target structure's elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    source_order: usize,
    target_order: usize,
    images: Vec<BTreeSet<usize>>,
}

impl Relation {
    pub fn new(
        source_order: usize,
        target_order: usize,
        images: Vec<BTreeSet<usize>>,
    ) -> Result<Self> {
        if images.len() != source_order {
            return Err(Error::Domain(format!(
                "relation has {} image sets, expected {source_order}",
                images.len()
            )));
        }
        for (s, set) in images.iter().enumerate() {
            if let Some(&bad) = set.iter().find(|&&t| t >= target_order) {
                return Err(Error::Domain(format!(
                    "image {bad} of source {s} outside target order {target_order}"
                )));
            }
        }
        Ok(Relation {
            source_order,
            target_order,
            images,
        })
    }

    pub fn identity(order: usize) -> Self {
        Relation {
            source_order: order,
            target_order: order,
            images: (0..order).map(|i| BTreeSet::from([i])).collect(),
        }
    }

    pub fn source_order(&self) -> usize {
        self.source_order
    }

    pub fn target_order(&self) -> usize {
        self.target_order
    }

    pub fn image(&self, s: usize) -> &BTreeSet<usize> {
        &self.images[s]
    }

    /// Re-dimensions the target side (parsed relations infer it from the
    /// largest index seen).
    pub fn with_target_order(mut self, target_order: usize) -> Result<Self> {
        let max = self.images.iter().flatten().max().copied();
        if let Some(max) = max {
            if max >= target_order {
                return Err(Error::Domain(format!(
                    "relation mentions target element {max}, beyond order {target_order}"
                )));
            }
        }
        self.target_order = target_order;
        Ok(self)
    }

    /// Relational inverse: `u ∈ inv(s)` iff `s ∈ self(u)`.
    pub fn invert(&self) -> Relation {
        let mut images = vec![BTreeSet::new(); self.target_order];
        for (s, set) in self.images.iter().enumerate() {
            for &t in set {
                images[t].insert(s);
            }
        }
        Relation {
            source_order: self.target_order,
            target_order: self.source_order,
            images,
        }
    }

    /// Relational composition `self: S -> T` then `other: T -> V`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        if self.target_order != other.source_order {
            return Err(Error::Domain(format!(
                "composing relations with middle orders {} vs {}",
                self.target_order, other.source_order
            )));
        }
        let images = self
            .images
            .iter()
            .map(|set| {
                set.iter()
                    .flat_map(|&t| other.images[t].iter().copied())
                    .collect()
            })
            .collect();
        Relation::new(self.source_order, other.target_order, images)
    }

    /// One `s: t1 t2 ...` line per source element, in source order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, set) in self.images.iter().enumerate() {
            out.push_str(&s.to_string());
            out.push(':');
            for &t in set {
                out.push(' ');
                out.push_str(&t.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses `s: t1 t2 ...` lines; sources must appear in order. The
    /// target order is inferred as one past the largest index.
    pub fn parse(text: &str) -> Result<Self> {
        let mut images = Vec::new();
        for line in crate::table::data_lines(text) {
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("expected `s: t...`: {line:?}")))?;
            let s: usize = lhs
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad source index {lhs:?}")))?;
            if s != images.len() {
                return Err(Error::Format(format!(
                    "source {s} out of order; expected {}",
                    images.len()
                )));
            }
            let set: BTreeSet<usize> = crate::table::parse_index_row(rhs.trim(), s)?
                .into_iter()
                .collect();
            images.push(set);
        }
        if images.is_empty() {
            return Err(Error::Format("empty relation file".into()));
        }
        let target_order = images.iter().flatten().max().map_or(1, |&m| m + 1);
        Relation::new(images.len(), target_order, images)
    }
}

/// A total function from target elements to source elements (the carrier
/// of a modelling).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementMap {
    codomain_order: usize,
    images: Vec<usize>,
}

impl ElementMap {
    pub fn new(images: Vec<usize>, codomain_order: usize) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::Domain("element map with empty domain".into()));
        }
        if let Some(&bad) = images.iter().find(|&&v| v >= codomain_order) {
            return Err(Error::Domain(format!(
                "map image {bad} outside codomain order {codomain_order}"
            )));
        }
        Ok(ElementMap {
            codomain_order,
            images,
        })
    }

    pub fn domain_order(&self) -> usize {
        self.images.len()
    }

    pub fn codomain_order(&self) -> usize {
        self.codomain_order
    }

    pub fn apply(&self, u: usize) -> usize {
        self.images[u]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_onto(&self) -> bool {
        let hit: BTreeSet<usize> = self.images.iter().copied().collect();
        hit.len() == self.codomain_order
    }

    /// The relational inverse as a relation from the codomain back to
    /// the domain: `inv(s) = { u : map(u) = s }`.
    pub fn invert(&self) -> Relation {
        let mut images = vec![BTreeSet::new(); self.codomain_order];
        for (u, &s) in self.images.iter().enumerate() {
            images[s].insert(u);
        }
        Relation {
            source_order: self.codomain_order,
            target_order: self.images.len(),
            images,
        }
    }

    /// One `u -> s` line per domain element, in domain order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (u, &s) in self.images.iter().enumerate() {
            out.push_str(&format!("{u} -> {s}\n"));
        }
        out
    }

    /// Parses `u -> s` lines; every domain index must appear exactly
    /// once. The codomain order is inferred as one past the largest
    /// image.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for line in crate::table::data_lines(text) {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Format(format!("expected `u -> s`: {line:?}")))?;
            let u: usize = lhs
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad index {lhs:?}")))?;
            let s: usize = rhs
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad index {rhs:?}")))?;
            if pairs.insert(u, s).is_some() {
                return Err(Error::Format(format!("duplicate domain index {u}")));
            }
        }
        let n = pairs.len();
        if n == 0 {
            return Err(Error::Format("empty map file".into()));
        }
        let mut images = Vec::with_capacity(n);
        for u in 0..n {
            images.push(*pairs.get(&u).ok_or_else(|| {
                Error::Format(format!("domain index {u} missing; map must be total"))
            })?);
        }
        let codomain = images.iter().max().copied().unwrap_or(0) + 1;
        ElementMap::new(images, codomain)
    }

    /// Re-dimensions the codomain after parsing.
    pub fn with_codomain_order(mut self, codomain_order: usize) -> Result<Self> {
        if let Some(&bad) = self.images.iter().find(|&&v| v >= codomain_order) {
            return Err(Error::Domain(format!(
                "map image {bad} outside codomain order {codomain_order}"
            )));
        }
        self.codomain_order = codomain_order;
        Ok(self)
    }
}

/// Outcome of the isomorphic-relation check, clause by clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationVerdict {
    Ok,
    /// `phi(x)phi(y) ⊆ phi(xy)` fails: the product `u v` of the listed
    /// members is not in the image of `xy`.
    NotHomomorphic {
        x: usize,
        y: usize,
        u: usize,
        v: usize,
        product: usize,
    },
    /// `phi(x)` is empty.
    NotFullyDefined {
        x: usize,
    },
    /// Distinct sources share a target element.
    NotLossless {
        x: usize,
        y: usize,
        shared: usize,
    },
}

impl RelationVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, RelationVerdict::Ok)
    }
}

impl fmt::Display for RelationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationVerdict::Ok => write!(f, "ok"),
            RelationVerdict::NotHomomorphic {
                x,
                y,
                u,
                v,
                product,
            } => write!(
                f,
                "not-homomorphic x={x} y={y} u={u} v={v} product={product}"
            ),
            RelationVerdict::NotFullyDefined { x } => write!(f, "not-fully-defined x={x}"),
            RelationVerdict::NotLossless { x, y, shared } => {
                write!(f, "not-lossless x={x} y={y} shared={shared}")
            }
        }
    }
}

/// Checks the three clauses of an isomorphic relation (division) from
/// `s` into `t`: homomorphic, fully defined, lossless. Clauses are
/// checked in that order and the first failure is reported with a
/// witness.
pub fn is_isomorphic_relation(
    phi: &Relation,
    s: &MulTable,
    t: &MulTable,
) -> Result<RelationVerdict> {
    if phi.source_order != s.order() || phi.target_order != t.order() {
        return Err(Error::Domain(format!(
            "relation is {}->{}, structures are {}->{}",
            phi.source_order,
            phi.target_order,
            s.order(),
            t.order()
        )));
    }
    for x in 0..s.order() {
        for y in 0..s.order() {
            let target_image = phi.image(s.get(x, y));
            for &u in phi.image(x) {
                for &v in phi.image(y) {
                    let product = t.get(u, v);
                    if !target_image.contains(&product) {
                        return Ok(RelationVerdict::NotHomomorphic {
                            x,
                            y,
                            u,
                            v,
                            product,
                        });
                    }
                }
            }
        }
    }
    for x in 0..s.order() {
        if phi.image(x).is_empty() {
            return Ok(RelationVerdict::NotFullyDefined { x });
        }
    }
    for x in 0..s.order() {
        for y in (x + 1)..s.order() {
            if let Some(&shared) = phi.image(x).intersection(phi.image(y)).next() {
                return Ok(RelationVerdict::NotLossless { x, y, shared });
            }
        }
    }
    Ok(RelationVerdict::Ok)
}

/// Outcome of the modelling (surjective homomorphism) check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModellingVerdict {
    Ok,
    /// `mu(u)mu(v) != mu(uv)` for the listed pair.
    NotHomomorphism {
        u: usize,
        v: usize,
    },
    /// No element maps onto the listed source element.
    NotOnto {
        missing: usize,
    },
}

impl ModellingVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, ModellingVerdict::Ok)
    }
}

impl fmt::Display for ModellingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModellingVerdict::Ok => write!(f, "ok"),
            ModellingVerdict::NotHomomorphism { u, v } => {
                write!(f, "not-homomorphism u={u} v={v}")
            }
            ModellingVerdict::NotOnto { missing } => write!(f, "not-onto missing={missing}"),
        }
    }
}

/// Checks that `mu: T -> S` is a surjective homomorphism; the first
/// violating pair (or first missed source element) is reported.
pub fn is_modelling(mu: &ElementMap, t: &MulTable, s: &MulTable) -> Result<ModellingVerdict> {
    if mu.domain_order() != t.order() || mu.codomain_order() != s.order() {
        return Err(Error::Domain(format!(
            "map is {}->{}, structures are {}->{}",
            mu.domain_order(),
            mu.codomain_order(),
            t.order(),
            s.order()
        )));
    }
    for u in 0..t.order() {
        for v in 0..t.order() {
            if s.get(mu.apply(u), mu.apply(v)) != mu.apply(t.get(u, v)) {
                return Ok(ModellingVerdict::NotHomomorphism { u, v });
            }
        }
    }
    let hit: BTreeSet<usize> = mu.images().iter().copied().collect();
    for missing in 0..s.order() {
        if !hit.contains(&missing) {
            return Ok(ModellingVerdict::NotOnto { missing });
        }
    }
    Ok(ModellingVerdict::Ok)
}

// ---------------------------------------------------------------------
// Surjective homomorphism search
// ---------------------------------------------------------------------

/// Greedy ascending generator sequence of a table: repeatedly adjoin the
/// smallest element outside the closure so far.
fn greedy_generators(u: &MulTable) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut closed: BTreeSet<usize> = BTreeSet::new();
    while closed.len() < u.order() {
        let g = (0..u.order()).find(|x| !closed.contains(x)).unwrap();
        gens.push(g);
        closed = u
            .closure_in_table(&gens.iter().copied().collect())
            .expect("generators are valid indices");
    }
    gens
}

/// Forces images of products of assigned elements; returns false on a
/// contradiction with the homomorphism law.
fn propagate(u: &MulTable, s: &MulTable, partial: &mut [Option<usize>]) -> bool {
    loop {
        let mut changed = false;
        for a in 0..u.order() {
            let Some(ma) = partial[a] else { continue };
            for b in 0..u.order() {
                let Some(mb) = partial[b] else { continue };
                let c = u.get(a, b);
                let forced = s.get(ma, mb);
                match partial[c] {
                    None => {
                        partial[c] = Some(forced);
                        changed = true;
                    }
                    Some(mc) if mc != forced => return false,
                    Some(_) => {}
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

struct HomSearch<'a> {
    u: &'a MulTable,
    s: &'a MulTable,
    gens: Vec<usize>,
    nodes: u64,
    budget: u64,
    stopped: bool,
}

impl HomSearch<'_> {
    fn run(
        &mut self,
        partial: &[Option<usize>],
        gi: usize,
        visit: &mut dyn FnMut(&ElementMap) -> bool,
    ) -> Result<()> {
        if gi == self.gens.len() {
            let images: Vec<usize> = partial
                .iter()
                .map(|m| m.expect("generator images force every element"))
                .collect();
            let map = ElementMap::new(images, self.s.order())?;
            if map.is_onto() {
                debug_assert!(is_modelling(&map, self.u, self.s)?.is_ok());
                if !visit(&map) {
                    self.stopped = true;
                }
            }
            return Ok(());
        }
        let g = self.gens[gi];
        for cand in 0..self.s.order() {
            if self.nodes >= self.budget {
                return Err(Error::Resource(format!(
                    "homomorphism search exceeded {} nodes",
                    self.budget
                )));
            }
            self.nodes += 1;
            let mut next: Vec<Option<usize>> = partial.to_vec();
            if next[g].is_some_and(|fixed| fixed != cand) {
                continue;
            }
            next[g] = Some(cand);
            if !propagate(self.u, self.s, &mut next) {
                continue;
            }
            self.run(&next, gi + 1, visit)?;
            if self.stopped {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Streams surjective homomorphisms `u -> s` to `visit` in a
/// deterministic order (generator images ascending); returns the number
/// of search nodes used. `visit` returns false to stop early.
pub(crate) fn search_surjective_homomorphisms(
    u: &MulTable,
    s: &MulTable,
    budget: u64,
    visit: &mut dyn FnMut(&ElementMap) -> bool,
) -> Result<u64> {
    if u.order() < s.order() {
        return Ok(0);
    }
    let mut search = HomSearch {
        u,
        s,
        gens: greedy_generators(u),
        nodes: 0,
        budget,
        stopped: false,
    };
    let partial = vec![None; u.order()];
    search.run(&partial, 0, visit)?;
    Ok(search.nodes)
}

/// All surjective homomorphisms from `u` onto `s`, exhaustively, in a
/// deterministic order. Every returned map passes [`is_modelling`].
pub fn find_surjective_homomorphisms(u: &MulTable, s: &MulTable) -> Vec<ElementMap> {
    let mut out = Vec::new();
    search_surjective_homomorphisms(u, s, u64::MAX, &mut |m| {
        out.push(m.clone());
        true
    })
    .expect("unbounded budget cannot be exhausted");
    out
}

// ---------------------------------------------------------------------
// Division search
// ---------------------------------------------------------------------

/// Explicit search budgets, reported back with every outcome so that a
/// negative answer can be trusted as exhaustive.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Ceiling on closed subsets of the target enumerated or visited.
    pub max_subsemigroups: usize,
    /// Ceiling on homomorphism backtracking nodes, summed over
    /// candidates.
    pub max_homomorphism_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_subsemigroups: 100_000,
            max_homomorphism_nodes: 5_000_000,
        }
    }
}

/// Work actually performed by a division search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub subsemigroups_enumerated: usize,
    pub subsemigroups_tested: usize,
    pub homomorphism_nodes: u64,
}

/// A verified emulation witness: `T` implements `S` through the
/// subsemigroup `U <= T` and the modelling `mu: U -> S`; `relation` is
/// the inverted modelling, re-based onto `T`'s element indices.
#[derive(Debug, Clone)]
pub struct DivisionWitness {
    /// Sorted element indices of `U` inside `T`.
    pub subsemigroup: Vec<usize>,
    /// Surjective homomorphism from `U` (local indices) onto `S`.
    pub modelling: ElementMap,
    /// The division `phi: S -> T`.
    pub relation: Relation,
}

impl DivisionWitness {
    /// The witness subsemigroup's own table over its local element
    /// order, the structure `modelling` is a homomorphism from.
    pub fn subsemigroup_table(&self, t: &MulTable) -> MulTable {
        sub_table(t, &self.subsemigroup)
    }
}

/// Result of a completed (not resource-limited) division search.
#[derive(Debug, Clone)]
pub enum DivisionOutcome {
    Found(Box<DivisionWitness>),
    /// Every subsemigroup of size >= |S| was tested; no witness exists.
    NoDivision,
}

/// Local multiplication table of a closed subset of `t`.
fn sub_table(t: &MulTable, members: &[usize]) -> MulTable {
    let pos: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let rows = members
        .iter()
        .map(|&x| {
            members
                .iter()
                .map(|&y| pos[&t.get(x, y)])
                .collect::<Vec<_>>()
        })
        .collect();
    MulTable::new(rows).expect("closed subset yields a well-formed table")
}

/// Searches for a division witness of `s` inside `t`.
///
/// Subsemigroups of `t` are tried in ascending size (ties broken
/// lexicographically), so the first witness is the smallest; inside one
/// subsemigroup, homomorphisms are tried with generator images
/// ascending. `Ok(NoDivision)` is an exhaustive negative; exceeding a
/// limit is an error, not a negative.
pub fn find_division(
    s: &MulTable,
    t: &MulTable,
    limits: &SearchLimits,
) -> Result<(DivisionOutcome, SearchStats)> {
    let mut stats = SearchStats::default();
    let mut candidates = closed_subsets(t, limits.max_subsemigroups)?;
    if candidates.len() > limits.max_subsemigroups {
        return Err(Error::Resource(format!(
            "target has more than {} subsemigroups",
            limits.max_subsemigroups
        )));
    }
    stats.subsemigroups_enumerated = candidates.len();
    candidates.retain(|c| c.len() >= s.order());
    candidates.sort_by_key(|c| c.len()); // stable: lex order within one size

    for candidate in &candidates {
        stats.subsemigroups_tested += 1;
        let members = candidate.indices();
        let local = sub_table(t, &members);
        let mut witness: Option<ElementMap> = None;
        let remaining = limits.max_homomorphism_nodes - stats.homomorphism_nodes;
        let nodes = search_surjective_homomorphisms(&local, s, remaining, &mut |m| {
            witness = Some(m.clone());
            false
        })?;
        stats.homomorphism_nodes += nodes;
        if let Some(mu) = witness {
            let mut images = vec![BTreeSet::new(); s.order()];
            for (local_idx, &global) in members.iter().enumerate() {
                images[mu.apply(local_idx)].insert(global);
            }
            let relation = Relation::new(s.order(), t.order(), images)?;
            let verdict = is_isomorphic_relation(&relation, s, t)?;
            assert!(verdict.is_ok(), "witness soundness violated: {verdict}");
            return Ok((
                DivisionOutcome::Found(Box::new(DivisionWitness {
                    subsemigroup: members,
                    modelling: mu,
                    relation,
                })),
                stats,
            ));
        }
    }
    Ok((DivisionOutcome::NoDivision, stats))
}

// ---------------------------------------------------------------------
// Running programs: does a structure implement a function?
// ---------------------------------------------------------------------

/// Injective encodings of a function's domain into start states and of
/// its codomain into result states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    input: BTreeMap<String, usize>,
    output: BTreeMap<String, usize>,
}

impl Encoding {
    pub fn new(input: Vec<(String, usize)>, output: Vec<(String, usize)>) -> Result<Self> {
        let build = |pairs: Vec<(String, usize)>, which: &str| -> Result<BTreeMap<String, usize>> {
            let mut map = BTreeMap::new();
            let mut hit = BTreeSet::new();
            for (label, state) in pairs {
                if map.insert(label.clone(), state).is_some() {
                    return Err(Error::Domain(format!(
                        "{which} encoding repeats label {label:?}"
                    )));
                }
                if !hit.insert(state) {
                    return Err(Error::Domain(format!(
                        "{which} encoding is not injective: state {state} reused"
                    )));
                }
            }
            Ok(map)
        };
        Ok(Encoding {
            input: build(input, "input")?,
            output: build(output, "output")?,
        })
    }

    pub fn encode_input(&self, label: &str) -> Option<usize> {
        self.input.get(label).copied()
    }

    pub fn decode_output(&self, label: &str) -> Option<usize> {
        self.output.get(label).copied()
    }

    /// Sections INPUT and OUTPUT, `label -> state-index` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut input = Vec::new();
        let mut output = Vec::new();
        let mut section: Option<bool> = None;
        for line in crate::table::data_lines(text) {
            match line {
                "INPUT" => section = Some(true),
                "OUTPUT" => section = Some(false),
                _ => {
                    let (label, idx) = line.split_once("->").ok_or_else(|| {
                        Error::Format(format!("expected `label -> index`: {line:?}"))
                    })?;
                    let label = label.trim().to_string();
                    let idx: usize = idx
                        .trim()
                        .parse()
                        .map_err(|_| Error::Format(format!("bad state index in {line:?}")))?;
                    match section {
                        Some(true) => input.push((label, idx)),
                        Some(false) => output.push((label, idx)),
                        None => {
                            return Err(Error::Format(
                                "encoding data before INPUT/OUTPUT section".into(),
                            ))
                        }
                    }
                }
            }
        }
        Encoding::new(input, output).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("INPUT\n");
        for (label, idx) in &self.input {
            out.push_str(&format!("{label} -> {idx}\n"));
        }
        out.push_str("OUTPUT\n");
        for (label, idx) in &self.output {
            out.push_str(&format!("{label} -> {idx}\n"));
        }
        out
    }
}

/// A structure that can run event words: either a flat set of named
/// transformations on one state set, or a cascade whose output is read
/// from the bottom coordinate.
#[derive(Debug, Clone)]
pub enum Machine {
    Flat {
        degree: usize,
        events: Vec<(String, Transformation)>,
    },
    Cascade(Cascade),
}

impl Machine {
    /// State-event machine of an abstract table via its right action:
    /// one event per element, acting on the element set (plus a fresh
    /// start point when the table has no identity). Event names default
    /// to the element indices.
    pub fn from_table(table: &MulTable, labels: Option<&[String]>) -> Result<Machine> {
        if !table.is_associative() {
            return Err(Error::Domain("machine from a non-associative table".into()));
        }
        let n = table.order();
        if let Some(labels) = labels {
            if labels.len() != n {
                return Err(Error::Domain(format!(
                    "{} labels for {} elements",
                    labels.len(),
                    n
                )));
            }
        }
        let adjoin = table.identity_element().is_none();
        let mut events = Vec::with_capacity(n);
        for x in 0..n {
            let mut images: Vec<usize> = (0..n).map(|p| table.get(p, x)).collect();
            if adjoin {
                images.push(x);
            }
            let name = match labels {
                Some(labels) => labels[x].clone(),
                None => x.to_string(),
            };
            events.push((name, Transformation::new(images)?));
        }
        Ok(Machine::Flat {
            degree: if adjoin { n + 1 } else { n },
            events,
        })
    }

    pub fn from_cascade(c: Cascade) -> Machine {
        Machine::Cascade(c)
    }

    /// Number of start states the input encoding may point at.
    pub fn input_state_count(&self) -> usize {
        match self {
            Machine::Flat { degree, .. } => *degree,
            // Cascade input is set in the top component.
            Machine::Cascade(c) => c.top().degree(),
        }
    }

    /// Number of result states the output encoding may point at.
    pub fn output_state_count(&self) -> usize {
        match self {
            Machine::Flat { degree, .. } => *degree,
            // Cascade output is read from the bottom component.
            Machine::Cascade(c) => c.bottom().degree(),
        }
    }

    pub fn event_names(&self) -> Vec<&str> {
        match self {
            Machine::Flat { events, .. } => events.iter().map(|(n, _)| n.as_str()).collect(),
            Machine::Cascade(c) => c.events().iter().map(|e| e.name.as_str()).collect(),
        }
    }
}

/// Verdict of a program run against a function specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImplementsVerdict {
    Ok,
    /// Running the program from `start_state` (encoding `input`) ended
    /// in `got` instead of `expected`.
    Mismatch {
        input: String,
        start_state: usize,
        expected: usize,
        got: usize,
    },
}

impl ImplementsVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, ImplementsVerdict::Ok)
    }
}

impl fmt::Display for ImplementsVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImplementsVerdict::Ok => write!(f, "ok"),
            ImplementsVerdict::Mismatch {
                input,
                start_state,
                expected,
                got,
            } => write!(
                f,
                "mismatch input={input} start={start_state} expected={expected} got={got}"
            ),
        }
    }
}

/// Checks that running `program` (a word of event names) on `machine`
/// implements `f` under `enc`: every encoded input must land in the
/// encoding of its output. For a cascade machine the input chooses the
/// top state, every initial bottom state is tried, and the output is
/// read from the bottom coordinate.
pub fn implements_function(
    machine: &Machine,
    f: &FiniteFunction,
    enc: &Encoding,
    program: &[String],
) -> Result<ImplementsVerdict> {
    match machine {
        Machine::Flat { degree, events } => {
            let word: Vec<&Transformation> = resolve(program, events)?;
            for (i, label) in f.domain().iter().enumerate() {
                let start = encoded(enc.encode_input(label), label, *degree, "input")?;
                let out_label = &f.codomain()[f.apply(i)];
                let expected = encoded(enc.decode_output(out_label), out_label, *degree, "output")?;
                let mut state = start;
                for ev in &word {
                    state = ev.apply(state);
                }
                if state != expected {
                    return Ok(ImplementsVerdict::Mismatch {
                        input: label.clone(),
                        start_state: start,
                        expected,
                        got: state,
                    });
                }
            }
            Ok(ImplementsVerdict::Ok)
        }
        Machine::Cascade(c) => {
            let word: Vec<&crate::constructions::CascadeEvent> = program
                .iter()
                .map(|name| {
                    c.event(name)
                        .ok_or_else(|| Error::Domain(format!("unknown event {name:?}")))
                })
                .collect::<Result<_>>()?;
            let (k, m) = (c.top().degree(), c.bottom().degree());
            for (i, label) in f.domain().iter().enumerate() {
                let top0 = encoded(enc.encode_input(label), label, k, "input")?;
                let out_label = &f.codomain()[f.apply(i)];
                let expected = encoded(enc.decode_output(out_label), out_label, m, "output")?;
                for y0 in 0..m {
                    let (mut x, mut y) = (top0, y0);
                    for ev in &word {
                        (x, y) = c.step(x, y, ev);
                    }
                    if y != expected {
                        return Ok(ImplementsVerdict::Mismatch {
                            input: label.clone(),
                            start_state: top0 * m + y0,
                            expected,
                            got: y,
                        });
                    }
                }
            }
            Ok(ImplementsVerdict::Ok)
        }
    }
}

fn resolve<'a>(
    program: &[String],
    events: &'a [(String, Transformation)],
) -> Result<Vec<&'a Transformation>> {
    program
        .iter()
        .map(|name| {
            events
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| t)
                .ok_or_else(|| Error::Domain(format!("unknown event {name:?}")))
        })
        .collect()
}

fn encoded(state: Option<usize>, label: &str, bound: usize, which: &str) -> Result<usize> {
    let state =
        state.ok_or_else(|| Error::Domain(format!("{which} label {label:?} not encoded")))?;
    if state >= bound {
        return Err(Error::Domain(format!(
            "{which} label {label:?} encodes to state {state}, beyond {bound}"
        )));
    }
    Ok(state)
}
