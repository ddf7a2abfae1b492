//! Exhaustive enumeration of the subsemigroups of a finite
//! transformation semigroup, with conjugacy-class counting and size
//! distributions.
//!
//! Two algorithms are provided on purpose. The primary one is a
//! depth-first generator extension over a precomputed index-level
//! multiplication table; [`bfs_oracle_enumerate`] is an independent
//! breadth-first fixpoint search with its own naive closure routine.
//! Agreement of the two outputs is the correctness argument for the
//! counts this module reports.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::table::MulTable;
use crate::transform::{all_permutations, TransSgp};

/// Default ceiling on the universe order for enumeration; `T_3` (27
/// elements) is the largest default target. Larger universes need the
/// explicit long-run option.
pub const DEFAULT_UNIVERSE_GUARD: usize = 27;

/// Version tag written into checkpoints; bump when the traversal order
/// changes.
pub const ALGORITHM_VERSION: &str = "dfs-v1";

/// A subset of universe indices, stored as a bitset. The closure
/// invariant is maintained by the producers in this module and can be
/// re-verified with [`verify_closed`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedSet {
    words: Box<[u64]>,
}

impl ClosedSet {
    fn empty(universe: usize) -> Self {
        ClosedSet {
            words: vec![0u64; universe.div_ceil(64)].into_boxed_slice(),
        }
    }

    /// Builds a set from indices; bounds are the caller's contract.
    pub fn from_indices(universe: usize, indices: &[usize]) -> Self {
        let mut s = ClosedSet::empty(universe);
        for &i in indices {
            assert!(i < universe, "index {i} outside universe {universe}");
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    /// Inserts `i`; returns true when it was new.
    #[inline]
    fn insert(&mut self, i: usize) -> bool {
        let w = &mut self.words[i / 64];
        let mask = 1u64 << (i % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Smallest member.
    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Ascending member iterator.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// One output line: ascending indices separated by spaces.
    pub fn to_line(&self) -> String {
        self.indices()
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl PartialOrd for ClosedSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ClosedSet {
    /// Lexicographic order on the ascending index sequences, so sorted
    /// output files are stable across runs and job counts.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Display for ClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Exhaustive pairwise product check, independent of the incremental
/// closure used by the enumerators.
pub fn verify_closed(table: &MulTable, set: &ClosedSet) -> bool {
    let members = set.indices();
    members
        .iter()
        .all(|&x| members.iter().all(|&y| set.contains(table.get(x, y))))
}

/// A transformation semigroup together with its precomputed index-level
/// multiplication table, the structure all enumeration runs on.
#[derive(Debug, Clone)]
pub struct ElementUniverse {
    sgp: TransSgp,
    table: MulTable,
}

impl ElementUniverse {
    pub fn new(sgp: TransSgp) -> Self {
        let table = sgp.mul_table();
        ElementUniverse { sgp, table }
    }

    /// Universe of all transformations on `n` points.
    pub fn full(n: usize) -> Result<Self> {
        Ok(ElementUniverse::new(TransSgp::full(n)?))
    }

    pub fn size(&self) -> usize {
        self.table.order()
    }

    pub fn semigroup(&self) -> &TransSgp {
        &self.sgp
    }

    pub fn table(&self) -> &MulTable {
        &self.table
    }
}

/// Options shared by the enumeration entry points.
#[derive(Debug, Clone)]
pub struct EnumerationOptions {
    /// Lifts [`DEFAULT_UNIVERSE_GUARD`]; large universes are long-run
    /// computations.
    pub allow_large: bool,
    /// Worker count; 1 selects the mandatory sequential path.
    pub jobs: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            allow_large: false,
            jobs: 1,
        }
    }
}

fn check_guard(universe: usize, opts: &EnumerationOptions) -> Result<()> {
    if universe > DEFAULT_UNIVERSE_GUARD && !opts.allow_large {
        return Err(Error::Resource(format!(
            "universe has {universe} elements (> {DEFAULT_UNIVERSE_GUARD}); pass the long-run option to proceed"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Primary algorithm: depth-first generator extension.
//
// A closed set is grown by adding one generator index at a time, always
// larger than the previously added generator, closing after each
// addition. Every closed set C is reached through its greedy generator
// chain (repeatedly adjoin the smallest missing element), which is
// strictly ascending, so the ascending restriction loses nothing; a
// per-branch visited set kills duplicate arrivals. A set is *owned* by
// the branch rooted at its smallest element, which makes the branch
// outputs disjoint and their root-ordered concatenation globally sorted.
// ---------------------------------------------------------------------

/// Grows `words`/`members` (a closed set and its member list) into the
/// closure of the set plus `g`.
fn extend_closure(table: &MulTable, words: &mut ClosedSet, members: &mut Vec<usize>, g: usize) {
    let first_new = members.len();
    words.insert(g);
    members.push(g);
    let mut i = first_new;
    while i < members.len() {
        let x = members[i];
        let mut j = 0;
        while j < members.len() {
            let y = members[j];
            let p = table.get(x, y);
            if words.insert(p) {
                members.push(p);
            }
            let q = table.get(y, x);
            if words.insert(q) {
                members.push(q);
            }
            j += 1;
        }
        i += 1;
    }
}

struct BranchRun<'a> {
    table: &'a MulTable,
    root: usize,
    visited: HashSet<ClosedSet>,
    owned: Vec<ClosedSet>,
    visit_cap: usize,
}

impl BranchRun<'_> {
    fn record(&mut self, set: &ClosedSet) -> Result<bool> {
        if self.visited.contains(set) {
            return Ok(false);
        }
        if self.visited.len() >= self.visit_cap {
            return Err(Error::Resource(format!(
                "visited more than {} closed sets in one branch",
                self.visit_cap
            )));
        }
        self.visited.insert(set.clone());
        if set.min() == Some(self.root) {
            self.owned.push(set.clone());
        }
        Ok(true)
    }

    fn extend_from(&mut self, words: &ClosedSet, members: &[usize], last_gen: usize) -> Result<()> {
        let n = self.table.order();
        for g in (last_gen + 1)..n {
            if words.contains(g) {
                continue;
            }
            let mut next_words = words.clone();
            let mut next_members = members.to_vec();
            extend_closure(self.table, &mut next_words, &mut next_members, g);
            if self.record(&next_words)? {
                self.extend_from(&next_words, &next_members, g)?;
            }
        }
        Ok(())
    }
}

/// Runs one root branch; returns the sorted list of closed sets owned by
/// `root` (those whose minimum element is `root`).
fn enumerate_branch(table: &MulTable, root: usize, visit_cap: usize) -> Result<Vec<ClosedSet>> {
    let mut run = BranchRun {
        table,
        root,
        visited: HashSet::new(),
        owned: Vec::new(),
        visit_cap,
    };
    let mut words = ClosedSet::empty(table.order());
    let mut members = Vec::new();
    extend_closure(table, &mut words, &mut members, root);
    run.record(&words)?;
    let root_words = words.clone();
    run.extend_from(&root_words, &members, root)?;
    let mut owned = run.owned;
    owned.sort_unstable();
    Ok(owned)
}

/// All nonempty closed subsets of an abstract multiplication table,
/// sorted, with a cap on the number of closed sets visited per branch.
pub fn closed_subsets(table: &MulTable, visit_cap: usize) -> Result<Vec<ClosedSet>> {
    let mut out = Vec::new();
    for root in 0..table.order() {
        out.extend(enumerate_branch(table, root, visit_cap)?);
    }
    Ok(out)
}

/// A unit of enumeration work: a set of root branches. Descriptor
/// outputs are pairwise disjoint and their union is the full
/// enumeration, independently of how many descriptors the work was split
/// into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkDescriptor {
    pub roots: Vec<usize>,
}

/// Splits the search tree into `jobs` descriptors by dealing root
/// branches round-robin.
pub fn partition_search(u: &ElementUniverse, jobs: usize) -> Vec<WorkDescriptor> {
    let jobs = jobs.max(1);
    let mut descriptors = vec![WorkDescriptor { roots: Vec::new() }; jobs];
    for root in 0..u.size() {
        descriptors[root % jobs].roots.push(root);
    }
    descriptors
}

/// Runs one descriptor sequentially; output is sorted and contains
/// exactly the sets owned by the descriptor's roots.
pub fn run_descriptor(u: &ElementUniverse, desc: &WorkDescriptor) -> Result<Vec<ClosedSet>> {
    let mut blocks: Vec<(usize, Vec<ClosedSet>)> = Vec::new();
    for &root in &desc.roots {
        blocks.push((root, enumerate_branch(u.table(), root, usize::MAX)?));
    }
    blocks.sort_by_key(|(root, _)| *root);
    let mut out = Vec::new();
    for (_, mut block) in blocks {
        out.append(&mut block);
    }
    Ok(out)
}

/// Enumerates every nonempty closed subset of the universe exactly once,
/// in sorted order. Parallelism (if any) never changes the output.
pub fn enumerate_subsemigroups(
    u: &ElementUniverse,
    opts: &EnumerationOptions,
) -> Result<Vec<ClosedSet>> {
    check_guard(u.size(), opts)?;
    let mut out = Vec::new();
    enumerate_roots(u, opts, 0, |_, sets| {
        out.extend_from_slice(sets);
        Ok(())
    })?;
    Ok(out)
}

/// Root-major enumeration engine: calls `emit(root, sorted owned sets)`
/// for every root in ascending order, starting at `first_root`. Batches
/// of roots run in parallel when `opts.jobs > 1`; emission order stays
/// sequential.
pub fn enumerate_roots<F>(
    u: &ElementUniverse,
    opts: &EnumerationOptions,
    first_root: usize,
    mut emit: F,
) -> Result<()>
where
    F: FnMut(usize, &[ClosedSet]) -> Result<()>,
{
    let n = u.size();
    let jobs = opts.jobs.max(1);
    if jobs == 1 {
        for root in first_root..n {
            let sets = enumerate_branch(u.table(), root, usize::MAX)?;
            emit(root, &sets)?;
        }
        return Ok(());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Resource(format!("worker pool: {e}")))?;
    let mut root = first_root;
    while root < n {
        let batch: Vec<usize> = (root..(root + jobs).min(n)).collect();
        let results: Vec<Result<Vec<ClosedSet>>> = pool.install(|| {
            batch
                .par_iter()
                .map(|&r| enumerate_branch(u.table(), r, usize::MAX))
                .collect()
        });
        for (r, sets) in batch.iter().zip(results) {
            emit(*r, &sets?)?;
        }
        root += jobs;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Independent oracle: breadth-first fixpoint with a naive closure.
// ---------------------------------------------------------------------

/// Quadratic fixpoint closure; deliberately shares no code with
/// [`extend_closure`].
fn naive_close(table: &MulTable, seed: &ClosedSet) -> ClosedSet {
    let mut set = seed.clone();
    loop {
        let members = set.indices();
        let mut changed = false;
        for &x in &members {
            for &y in &members {
                if set.insert(table.get(x, y)) {
                    changed = true;
                }
            }
        }
        if !changed {
            return set;
        }
    }
}

/// Independent enumeration: seed with singleton closures, then
/// repeatedly adjoin one outside element to a known closed set and close
/// again until no new set appears. Must produce exactly the same sets as
/// [`enumerate_subsemigroups`].
pub fn bfs_oracle_enumerate(
    u: &ElementUniverse,
    opts: &EnumerationOptions,
) -> Result<Vec<ClosedSet>> {
    check_guard(u.size(), opts)?;
    let table = u.table();
    let n = u.size();
    let mut known: HashSet<ClosedSet> = HashSet::new();
    let mut queue: VecDeque<ClosedSet> = VecDeque::new();
    for g in 0..n {
        let c = naive_close(table, &ClosedSet::from_indices(n, &[g]));
        if !known.contains(&c) {
            known.insert(c.clone());
            queue.push_back(c);
        }
    }
    while let Some(set) = queue.pop_front() {
        for e in 0..n {
            if set.contains(e) {
                continue;
            }
            let mut seed = set.clone();
            seed.insert(e);
            let c = naive_close(table, &seed);
            if !known.contains(&c) {
                known.insert(c.clone());
                queue.push_back(c);
            }
        }
    }
    let mut out: Vec<ClosedSet> = known.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

// ---------------------------------------------------------------------
// Conjugacy
// ---------------------------------------------------------------------

/// Precomputed action of every point permutation on universe indices.
/// Only defined when the universe is closed under conjugation (true for
/// any full `T_n`).
#[derive(Debug)]
pub struct ConjugacyContext {
    index_maps: Vec<Vec<usize>>,
}

impl ConjugacyContext {
    pub fn new(u: &ElementUniverse) -> Result<Self> {
        let degree = u.semigroup().degree();
        let mut index_maps = Vec::new();
        for p in all_permutations(degree) {
            let mut map = Vec::with_capacity(u.size());
            for t in u.semigroup().elements() {
                let image = crate::transform::conjugate_transformation(t, &p);
                let idx = u.semigroup().index_of(&image).ok_or_else(|| {
                    Error::Domain(
                        "universe is not closed under conjugation; cannot count orbits".into(),
                    )
                })?;
                map.push(idx);
            }
            index_maps.push(map);
        }
        Ok(ConjugacyContext { index_maps })
    }

    fn apply(&self, map: &[usize], set: &ClosedSet, universe: usize) -> ClosedSet {
        let mut out = ClosedSet::empty(universe);
        for i in set.iter() {
            out.insert(map[i]);
        }
        out
    }

    /// Lexicographically smallest relabeling of `set`.
    pub fn canonicalize(&self, set: &ClosedSet, universe: usize) -> ClosedSet {
        self.index_maps
            .iter()
            .map(|m| self.apply(m, set, universe))
            .min()
            .expect("identity permutation always present")
    }

    /// Number of distinct relabelings of `set`.
    pub fn orbit_size(&self, set: &ClosedSet, universe: usize) -> usize {
        let mut orbit: HashSet<ClosedSet> = HashSet::new();
        for m in &self.index_maps {
            orbit.insert(self.apply(m, set, universe));
        }
        orbit.len()
    }

    pub fn is_canonical(&self, set: &ClosedSet, universe: usize) -> bool {
        self.canonicalize(set, universe) == *set
    }
}

/// One conjugacy orbit of closed sets.
#[derive(Debug, Clone)]
pub struct ConjugacyClass {
    pub representative: ClosedSet,
    pub orbit_size: usize,
}

/// Enumerates one canonical representative per conjugacy orbit, sorted.
/// The orbit sizes sum to the raw subsemigroup count.
pub fn enumerate_up_to_conjugacy(
    u: &ElementUniverse,
    opts: &EnumerationOptions,
) -> Result<Vec<ConjugacyClass>> {
    let ctx = ConjugacyContext::new(u)?;
    let universe = u.size();
    let all = enumerate_subsemigroups(u, opts)?;
    let mut classes = Vec::new();
    for set in &all {
        if ctx.is_canonical(set, universe) {
            classes.push(ConjugacyClass {
                representative: set.clone(),
                orbit_size: ctx.orbit_size(set, universe),
            });
        }
    }
    Ok(classes)
}

// ---------------------------------------------------------------------
// Size distribution
// ---------------------------------------------------------------------

/// Histogram of closed-set sizes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SizeDistribution {
    counts: BTreeMap<usize, u64>,
}

impl SizeDistribution {
    pub fn new() -> Self {
        SizeDistribution::default()
    }

    pub fn record(&mut self, order: usize) {
        self.add(order, 1);
    }

    pub fn add(&mut self, order: usize, count: u64) {
        *self.counts.entry(order).or_insert(0) += count;
    }

    pub fn count(&self, order: usize) -> u64 {
        self.counts.get(&order).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// `order,count` lines sorted by order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (order, count) in self.entries() {
            out.push_str(&format!("{order},{count}\n"));
        }
        out
    }

    /// Space-separated columns for plotting tools.
    pub fn to_plot_data(&self) -> String {
        let mut out = String::new();
        for (order, count) in self.entries() {
            out.push_str(&format!("{order} {count}\n"));
        }
        out
    }
}

/// Histogram over a stream of closed sets.
pub fn size_distribution<'a, I>(sets: I) -> SizeDistribution
where
    I: IntoIterator<Item = &'a ClosedSet>,
{
    let mut dist = SizeDistribution::new();
    for s in sets {
        dist.record(s.len());
    }
    dist
}

// ---------------------------------------------------------------------
// Checkpointing for long runs
// ---------------------------------------------------------------------

/// FNV-1a over the universe's element images; guards a resumed run
/// against a checkpoint written for a different universe of the same
/// shape.
fn universe_fingerprint(u: &ElementUniverse) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut mix = |byte: u64| {
        h ^= byte;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for t in u.semigroup().elements() {
        for &p in t.images() {
            mix(p as u64 + 1);
        }
        mix(0xff);
    }
    h
}

/// Progress record for a long enumeration: everything needed to resume
/// after the last fully flushed root branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub degree: usize,
    pub universe_size: usize,
    pub universe_hash: u64,
    pub algorithm: String,
    /// Roots `0..roots_done` are finished and their output flushed.
    pub roots_done: usize,
    pub raw_count: u64,
    pub distribution: SizeDistribution,
}

impl Checkpoint {
    pub fn fresh(u: &ElementUniverse) -> Self {
        Checkpoint {
            degree: u.semigroup().degree(),
            universe_size: u.size(),
            universe_hash: universe_fingerprint(u),
            algorithm: ALGORITHM_VERSION.to_string(),
            roots_done: 0,
            raw_count: 0,
            distribution: SizeDistribution::new(),
        }
    }

    pub fn matches(&self, u: &ElementUniverse) -> bool {
        self.degree == u.semigroup().degree()
            && self.universe_size == u.size()
            && self.universe_hash == universe_fingerprint(u)
            && self.algorithm == ALGORITHM_VERSION
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("sgp-checkpoint v1\n");
        out.push_str(&format!("algorithm {}\n", self.algorithm));
        out.push_str(&format!("degree {}\n", self.degree));
        out.push_str(&format!("universe-size {}\n", self.universe_size));
        out.push_str(&format!("universe-hash {:016x}\n", self.universe_hash));
        out.push_str(&format!("roots-done {}\n", self.roots_done));
        out.push_str(&format!("raw-count {}\n", self.raw_count));
        for (order, count) in self.distribution.entries() {
            out.push_str(&format!("hist {order} {count}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("sgp-checkpoint v1") {
            return Err(Error::Format("not a v1 checkpoint file".into()));
        }
        let mut cp = Checkpoint {
            degree: 0,
            universe_size: 0,
            universe_hash: 0,
            algorithm: String::new(),
            roots_done: 0,
            raw_count: 0,
            distribution: SizeDistribution::new(),
        };
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap();
            let mut next_num = || -> Result<u64> {
                parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Format(format!("bad checkpoint line: {line:?}")))
            };
            match key {
                "algorithm" => {
                    cp.algorithm = parts
                        .next()
                        .ok_or_else(|| Error::Format("missing algorithm".into()))?
                        .to_string()
                }
                "degree" => cp.degree = next_num()? as usize,
                "universe-size" => cp.universe_size = next_num()? as usize,
                "universe-hash" => {
                    cp.universe_hash = parts
                        .next()
                        .and_then(|t| u64::from_str_radix(t, 16).ok())
                        .ok_or_else(|| Error::Format(format!("bad checkpoint line: {line:?}")))?
                }
                "roots-done" => cp.roots_done = next_num()? as usize,
                "raw-count" => cp.raw_count = next_num()?,
                "hist" => {
                    let order = next_num()? as usize;
                    let count = next_num()?;
                    cp.distribution.add(order, count);
                }
                _ => return Err(Error::Format(format!("unknown checkpoint key {key:?}"))),
            }
        }
        Ok(cp)
    }
}

/// Streaming enumeration with root-level checkpoints: `emit` receives
/// each root's sorted owned sets in root order together with the
/// checkpoint state valid *after* that root, and may persist both.
pub fn enumerate_streaming<F>(
    u: &ElementUniverse,
    opts: &EnumerationOptions,
    resume: Option<Checkpoint>,
    mut emit: F,
) -> Result<Checkpoint>
where
    F: FnMut(usize, &[ClosedSet], &Checkpoint) -> Result<()>,
{
    check_guard(u.size(), opts)?;
    let mut cp = match resume {
        Some(cp) => {
            if !cp.matches(u) {
                return Err(Error::Format(
                    "checkpoint does not match this universe/algorithm".into(),
                ));
            }
            cp
        }
        None => Checkpoint::fresh(u),
    };
    let first = cp.roots_done;
    let state = &mut cp;
    enumerate_roots(u, opts, first, |root, sets| {
        for s in sets {
            state.distribution.record(s.len());
        }
        state.raw_count += sets.len() as u64;
        state.roots_done = root + 1;
        emit(root, sets, state)
    })?;
    Ok(cp)
}
