//! Concrete transformation semigroups.
//!
//! A [`Transformation`] is a total self-map of `{0, .., d-1}` stored as an
//! image list; a [`TransSgp`] is a composition-closed, lexicographically
//! sorted set of transformations of one degree. Composition reads left to
//! right: `f.compose(&g)` is "f then g".

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::table::MulTable;

/// Largest degree for which the full transformation semigroup is listed
/// explicitly (`n^n` elements).
pub const FULL_TRANS_MAX_DEGREE: usize = 8;

/// Largest degree for which canonical forms iterate all `n!` conjugators.
pub const CANONICAL_MAX_DEGREE: usize = 6;

/// A total function from an n-point set to itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transformation {
    images: Vec<usize>,
}

impl Transformation {
    /// Validates that every image is inside the degree.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        if d == 0 {
            return Err(Error::Structure("transformation of degree 0".into()));
        }
        if let Some(&bad) = images.iter().find(|&&p| p >= d) {
            return Err(Error::Structure(format!("image {bad} outside degree {d}")));
        }
        Ok(Transformation { images })
    }

    /// Identity transformation of the given degree.
    pub fn identity(degree: usize) -> Self {
        Transformation {
            images: (0..degree).collect(),
        }
    }

    /// Constant map onto `point`.
    pub fn constant(degree: usize, point: usize) -> Result<Self> {
        Transformation::new(vec![point; degree])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of one point.
    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.images[p]
    }

    /// `self` then `other`: `p -> other(self(p))`.
    ///
    /// Degrees must match; semigroup constructors validate this before any
    /// composition happens, so a mismatch here is a caller bug.
    pub fn compose(&self, other: &Transformation) -> Transformation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "composing transformations of different degrees"
        );
        Transformation {
            images: self.images.iter().map(|&p| other.images[p]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(p, &q)| p == q)
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.degree()];
        for &p in &self.images {
            if seen[p] {
                return false;
            }
            seen[p] = true;
        }
        true
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row: Vec<String> = self.images.iter().map(usize::to_string).collect();
        f.write_str(&row.join(" "))
    }
}

/// A transformation whose image list is a bijection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    map: Transformation,
}

impl Permutation {
    pub fn new(t: Transformation) -> Result<Self> {
        if !t.is_permutation() {
            return Err(Error::Domain(format!("not a permutation: {t}")));
        }
        Ok(Permutation { map: t })
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        Permutation::new(Transformation::new(images)?)
    }

    pub fn identity(degree: usize) -> Self {
        Permutation {
            map: Transformation::identity(degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.map.degree()
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.map.apply(p)
    }

    pub fn as_transformation(&self) -> &Transformation {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (p, &q) in self.map.images().iter().enumerate() {
            inv[q] = p;
        }
        Permutation {
            map: Transformation { images: inv },
        }
    }
}

/// All permutations of the given degree in lexicographic order of their
/// image lists.
pub fn all_permutations(degree: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut images = vec![0usize; degree];
    let mut used = vec![false; degree];
    fn rec(images: &mut Vec<usize>, used: &mut Vec<bool>, pos: usize, out: &mut Vec<Permutation>) {
        let d = images.len();
        if pos == d {
            out.push(Permutation {
                map: Transformation {
                    images: images.clone(),
                },
            });
            return;
        }
        for q in 0..d {
            if !used[q] {
                used[q] = true;
                images[pos] = q;
                rec(images, used, pos + 1, out);
                used[q] = false;
            }
        }
    }
    rec(&mut images, &mut used, 0, &mut out);
    out
}

/// A transformation semigroup: fixed degree, sorted deduplicated element
/// set closed under composition, optionally with the generating set it
/// was produced from.
///
/// ```
/// use sgp::{TransSgp, Transformation};
///
/// let cycle = Transformation::new(vec![1, 2, 0])?;
/// let c3 = TransSgp::generate(&[cycle])?;
/// assert_eq!(c3.order(), 3);
/// assert_eq!(TransSgp::full(3)?.order(), 27);
/// # Ok::<(), sgp::Error>(())
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransSgp {
    degree: usize,
    elements: Vec<Transformation>,
    generators: Option<Vec<Transformation>>,
}

impl TransSgp {
    /// Closes a nonempty generating set under composition.
    ///
    /// Worklist over pair products with a hash set on image arrays; the
    /// element list is sorted afterwards so results are independent of
    /// traversal order.
    pub fn generate(generators: &[Transformation]) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Domain("closure of an empty generating set".into()))?;
        let degree = first.degree();
        if let Some(bad) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::Domain(format!(
                "mixed degrees in generating set: {degree} vs {}",
                bad.degree()
            )));
        }
        let mut seen: HashSet<Transformation> = HashSet::new();
        let mut elements: Vec<Transformation> = Vec::new();
        for g in generators {
            if seen.insert(g.clone()) {
                elements.push(g.clone());
            }
        }
        // Grow the list in place; every pair is eventually multiplied in
        // both orders because each element takes a turn as `i`.
        let mut i = 0;
        while i < elements.len() {
            let mut j = 0;
            while j < elements.len() {
                let forward = elements[i].compose(&elements[j]);
                let backward = elements[j].compose(&elements[i]);
                for p in [forward, backward] {
                    if seen.insert(p.clone()) {
                        elements.push(p);
                    }
                }
                j += 1;
            }
            i += 1;
        }
        elements.sort_unstable();
        let mut gens: Vec<Transformation> = Vec::new();
        for g in generators {
            if !gens.contains(g) {
                gens.push(g.clone());
            }
        }
        Ok(TransSgp {
            degree,
            elements,
            generators: Some(gens),
        })
    }

    /// Wraps an already-closed element list, verifying closure.
    pub fn from_elements(elements: Vec<Transformation>) -> Result<Self> {
        let closed = TransSgp::generate(&elements)?;
        if closed.elements.len() != {
            let mut dedup = elements.clone();
            dedup.sort_unstable();
            dedup.dedup();
            dedup.len()
        } {
            return Err(Error::Domain(
                "element list is not closed under composition".into(),
            ));
        }
        Ok(TransSgp {
            degree: closed.degree,
            elements: closed.elements,
            generators: None,
        })
    }

    /// The full transformation semigroup `T_n`: all `n^n` maps.
    ///
    /// For `n >= 3` the recorded generating set is the n-cycle, the
    /// transposition `(0 1)` and the idempotent collapsing `1 -> 0`.
    pub fn full(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("degree must be positive".into()));
        }
        if n > FULL_TRANS_MAX_DEGREE {
            return Err(Error::Resource(format!(
                "T_{n} lists n^n elements; guard is degree <= {FULL_TRANS_MAX_DEGREE}"
            )));
        }
        let count = n.pow(n as u32);
        let mut elements = Vec::with_capacity(count);
        let mut images = vec![0usize; n];
        loop {
            elements.push(Transformation {
                images: images.clone(),
            });
            // Odometer increment in base n; most significant digit first
            // keeps the output lexicographically sorted.
            let mut pos = n;
            while pos > 0 {
                pos -= 1;
                images[pos] += 1;
                if images[pos] < n {
                    break;
                }
                images[pos] = 0;
                if pos == 0 {
                    return Ok(TransSgp {
                        degree: n,
                        elements,
                        generators: Some(full_generators(n)),
                    });
                }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Transformation] {
        &self.elements
    }

    pub fn generators(&self) -> Option<&[Transformation]> {
        self.generators.as_deref()
    }

    pub fn contains(&self, t: &Transformation) -> bool {
        self.index_of(t).is_some()
    }

    /// Position of `t` in the sorted element list.
    pub fn index_of(&self, t: &Transformation) -> Option<usize> {
        self.elements.binary_search(t).ok()
    }

    /// The abstract multiplication table over the sorted element order.
    /// Associative by construction.
    pub fn mul_table(&self) -> MulTable {
        let n = self.elements.len();
        let mut rows = Vec::with_capacity(n);
        for f in &self.elements {
            let mut row = Vec::with_capacity(n);
            for g in &self.elements {
                let fg = f.compose(g);
                row.push(self.index_of(&fg).expect("closure invariant"));
            }
            rows.push(row);
        }
        MulTable::new(rows).expect("indices in range by construction")
    }

    /// Relabels every point by `p`: the element `f` becomes the map
    /// sending `p(x)` to `p(f(x))`. A bijective relabeling preserves
    /// closure and cardinality.
    pub fn conjugate(&self, p: &Permutation) -> Result<TransSgp> {
        if p.degree() != self.degree {
            return Err(Error::Domain(format!(
                "conjugating degree {} by permutation of degree {}",
                self.degree,
                p.degree()
            )));
        }
        let mut elements: Vec<Transformation> = self
            .elements
            .iter()
            .map(|f| conjugate_transformation(f, p))
            .collect();
        elements.sort_unstable();
        let generators = self
            .generators
            .as_ref()
            .map(|gs| gs.iter().map(|g| conjugate_transformation(g, p)).collect());
        Ok(TransSgp {
            degree: self.degree,
            elements,
            generators,
        })
    }

    /// Lexicographically smallest sorted element list over all `n!`
    /// conjugates. Idempotent, and constant on conjugacy orbits.
    pub fn canonical_form(&self) -> Result<TransSgp> {
        if self.degree > CANONICAL_MAX_DEGREE {
            return Err(Error::Resource(format!(
                "canonical form iterates {}! permutations; guard is degree <= {CANONICAL_MAX_DEGREE}",
                self.degree
            )));
        }
        let mut best: Option<TransSgp> = None;
        for p in all_permutations(self.degree) {
            let cand = self.conjugate(&p)?;
            if best.as_ref().is_none_or(|b| cand.elements < b.elements) {
                best = Some(cand);
            }
        }
        Ok(best.expect("identity conjugate always exists"))
    }

    /// Canonical text form: first line the degree, then one sorted
    /// element per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.degree.to_string());
        out.push('\n');
        for t in &self.elements {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }
}

pub(crate) fn conjugate_transformation(f: &Transformation, p: &Permutation) -> Transformation {
    let d = f.degree();
    let mut images = vec![0usize; d];
    for x in 0..d {
        images[p.apply(x)] = p.apply(f.apply(x));
    }
    Transformation { images }
}

fn full_generators(n: usize) -> Vec<Transformation> {
    match n {
        1 => vec![Transformation::identity(1)],
        2 => vec![
            Transformation { images: vec![1, 0] },
            Transformation { images: vec![0, 0] },
        ],
        _ => {
            let cycle: Vec<usize> = (0..n).map(|p| (p + 1) % n).collect();
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            let mut collapse: Vec<usize> = (0..n).collect();
            collapse[1] = 0;
            vec![
                Transformation { images: cycle },
                Transformation { images: swap },
                Transformation { images: collapse },
            ]
        }
    }
}

/// Parses the transformation list format: first data line the degree,
/// then one image row per transformation; `#` lines are comments.
pub fn parse_transformation_list(text: &str) -> Result<Vec<Transformation>> {
    let mut lines = crate::table::data_lines(text);
    let degree: usize = lines
        .next()
        .ok_or_else(|| Error::Format("empty transformation file".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::Format("first line must be the degree".into()))?;
    if degree == 0 {
        return Err(Error::Format("degree must be positive".into()));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = crate::table::parse_index_row(line, i)?;
        if row.len() != degree {
            return Err(Error::Format(format!(
                "transformation {i} has {} images, expected {degree}",
                row.len()
            )));
        }
        out.push(Transformation::new(row).map_err(|e| Error::Format(e.to_string()))?);
    }
    if out.is_empty() {
        return Err(Error::Format("no transformations listed".into()));
    }
    Ok(out)
}
