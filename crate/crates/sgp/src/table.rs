//! Abstract finite semigroups as multiplication tables.
//!
//! A [`MulTable`] stores the combination rule of a finite computational
//! structure over 0-based element indices: `entry(x, y)` is the element
//! `xy`, read left to right ("x then y"). Closure (every entry in range)
//! is enforced at construction; associativity is deliberately *not* an
//! invariant — non-associative tables must be representable so that
//! [`MulTable::check_associative`] has inputs to reject.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::transform::{TransSgp, Transformation};

/// 0-based index of an element inside its containing structure.
pub type ElementIndex = usize;

/// Outcome of an associativity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssocVerdict {
    /// All triples satisfy `(xy)z = x(yz)`.
    Associative,
    /// The lexicographically first triple violating associativity.
    Violation {
        x: ElementIndex,
        y: ElementIndex,
        z: ElementIndex,
    },
}

impl AssocVerdict {
    pub fn is_associative(&self) -> bool {
        matches!(self, AssocVerdict::Associative)
    }
}

/// An order-n multiplication table over element indices.
///
/// Entries are stored row-major: row `x` lists the products `xy` for
/// `y = 0..n-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MulTable {
    order: usize,
    entries: Vec<ElementIndex>,
}

impl MulTable {
    /// Builds a table from rows, validating the closure invariant
    /// (every entry `< n`). Associativity is not checked here.
    pub fn new(rows: Vec<Vec<ElementIndex>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::Structure("table must have positive order".into()));
        }
        let mut entries = Vec::with_capacity(order * order);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::Structure(format!(
                    "row {x} has {} entries, expected {order}",
                    row.len()
                )));
            }
            for (y, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(Error::Structure(format!(
                        "entry at ({x},{y}) is {v}, outside order {order}"
                    )));
                }
                entries.push(v);
            }
        }
        Ok(MulTable { order, entries })
    }

    /// Number of elements.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The product `xy`.
    #[inline]
    pub fn get(&self, x: ElementIndex, y: ElementIndex) -> ElementIndex {
        self.entries[x * self.order + y]
    }

    /// Checks `(xy)z = x(yz)` for all triples, reporting the
    /// lexicographically first violation.
    pub fn check_associative(&self) -> AssocVerdict {
        let n = self.order;
        for x in 0..n {
            for y in 0..n {
                let xy = self.get(x, y);
                for z in 0..n {
                    if self.get(xy, z) != self.get(x, self.get(y, z)) {
                        return AssocVerdict::Violation { x, y, z };
                    }
                }
            }
        }
        AssocVerdict::Associative
    }

    /// True iff the table is associative.
    pub fn is_associative(&self) -> bool {
        self.check_associative().is_associative()
    }

    /// All `x` with `xx = x`.
    pub fn idempotents(&self) -> BTreeSet<ElementIndex> {
        (0..self.order).filter(|&x| self.get(x, x) == x).collect()
    }

    /// All right zeros: `v` with `xv = v` for every `x`.
    pub fn resets(&self) -> BTreeSet<ElementIndex> {
        (0..self.order)
            .filter(|&v| (0..self.order).all(|x| self.get(x, v) == v))
            .collect()
    }

    /// The unique two-sided identity, if one exists.
    pub fn identity_element(&self) -> Option<ElementIndex> {
        (0..self.order)
            .find(|&e| (0..self.order).all(|x| self.get(e, x) == x && self.get(x, e) == x))
    }

    /// Least superset of `subset` closed under the table's product.
    pub fn closure_in_table(
        &self,
        subset: &BTreeSet<ElementIndex>,
    ) -> Result<BTreeSet<ElementIndex>> {
        if subset.is_empty() {
            return Err(Error::Domain("closure of an empty subset".into()));
        }
        if let Some(&bad) = subset.iter().find(|&&x| x >= self.order) {
            return Err(Error::Domain(format!(
                "index {bad} outside table of order {}",
                self.order
            )));
        }
        let mut closed: BTreeSet<ElementIndex> = subset.clone();
        let mut frontier: Vec<ElementIndex> = subset.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            let known: Vec<ElementIndex> = closed.iter().copied().collect();
            for &y in &known {
                for p in [self.get(x, y), self.get(y, x)] {
                    if closed.insert(p) {
                        frontier.push(p);
                    }
                }
            }
        }
        Ok(closed)
    }

    /// Faithful right-action representation of an associative table.
    ///
    /// Each element `x` becomes the transformation `p -> px` on the
    /// element set. When the table has no identity the representation on
    /// the elements alone may collapse distinct elements, so an extra
    /// point is adjoined that records `x` itself; the degree is then
    /// `n + 1`. The resulting semigroup always has exactly `n` distinct
    /// transformations.
    pub fn cayley_embedding(&self) -> Result<TransSgp> {
        if let AssocVerdict::Violation { x, y, z } = self.check_associative() {
            return Err(Error::Domain(format!(
                "cayley embedding of a non-associative table: violation at ({x},{y},{z})"
            )));
        }
        let n = self.order;
        let adjoin = self.identity_element().is_none();
        let degree = if adjoin { n + 1 } else { n };
        let mut maps = Vec::with_capacity(n);
        for x in 0..n {
            let mut images: Vec<usize> = (0..n).map(|p| self.get(p, x)).collect();
            if adjoin {
                images.push(x);
            }
            maps.push(Transformation::new(images)?);
        }
        debug_assert_eq!(
            maps.iter().collect::<BTreeSet<_>>().len(),
            n,
            "right regular representation must be faithful"
        );
        let _ = degree;
        TransSgp::generate(&maps)
    }

    /// Searches for a bijection `pi` with `pi(xy) = pi(x)pi(y)`.
    ///
    /// Backtracking over element images with invariant pruning
    /// (idempotent/reset profiles); intended for desk-scale orders.
    pub fn are_isomorphic(&self, other: &MulTable) -> Option<Vec<ElementIndex>> {
        if self.order != other.order {
            return None;
        }
        let n = self.order;
        let pa: Vec<_> = (0..n).map(|x| element_profile(self, x)).collect();
        let pb: Vec<_> = (0..n).map(|x| element_profile(other, x)).collect();
        {
            let mut sa = pa.clone();
            let mut sb = pb.clone();
            sa.sort_unstable();
            sb.sort_unstable();
            if sa != sb {
                return None;
            }
        }
        let mut image: Vec<Option<ElementIndex>> = vec![None; n];
        let mut used = vec![false; n];
        if assign_isomorphism(self, other, &pa, &pb, &mut image, &mut used, 0) {
            Some(image.into_iter().map(Option::unwrap).collect())
        } else {
            None
        }
    }

    /// Canonical text form: first line the order, then one row per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.order.to_string());
        out.push('\n');
        for x in 0..self.order {
            let row: Vec<String> = (0..self.order)
                .map(|y| self.get(x, y).to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the table text format. Lines starting with `#` and blank
    /// lines are ignored; the first data line is the order `n`, followed
    /// by `n` rows of `n` space-separated 0-based indices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = data_lines(text);
        let order: usize = lines
            .next()
            .ok_or_else(|| Error::Format("empty table file".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::Format("first line must be the table order".into()))?;
        if order == 0 {
            return Err(Error::Format("table order must be positive".into()));
        }
        let mut rows = Vec::with_capacity(order);
        for i in 0..order {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("expected {order} rows, got {i}")))?;
            rows.push(parse_index_row(line, i)?);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Format(format!(
                "trailing data after table: {extra:?}"
            )));
        }
        MulTable::new(rows).map_err(|e| Error::Format(e.to_string()))
    }
}

impl fmt::Display for MulTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Non-comment, non-blank lines of a structured text file.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_index_row(line: &str, row: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad index {tok:?} in row {row}")))
        })
        .collect()
}

/// Cheap per-element invariants preserved by any isomorphism.
fn element_profile(t: &MulTable, x: ElementIndex) -> (bool, bool, usize, usize) {
    let n = t.order();
    let idem = t.get(x, x) == x;
    let reset = (0..n).all(|y| t.get(y, x) == x);
    let row_fixed = (0..n).filter(|&y| t.get(x, y) == x).count();
    let col_fixed = (0..n).filter(|&y| t.get(y, x) == x).count();
    (idem, reset, row_fixed, col_fixed)
}

fn assign_isomorphism(
    a: &MulTable,
    b: &MulTable,
    pa: &[(bool, bool, usize, usize)],
    pb: &[(bool, bool, usize, usize)],
    image: &mut Vec<Option<ElementIndex>>,
    used: &mut Vec<bool>,
    next: ElementIndex,
) -> bool {
    let n = a.order();
    if next == n {
        return true;
    }
    'cand: for cand in 0..n {
        if used[cand] || pa[next] != pb[cand] {
            continue;
        }
        image[next] = Some(cand);
        used[cand] = true;
        // Partial consistency: every product among assigned elements whose
        // result is also assigned must commute with the map.
        for x in 0..=next {
            for y in 0..=next {
                let (ix, iy) = (image[x].unwrap(), image[y].unwrap());
                if let Some(ixy) = image[a.get(x, y)] {
                    if b.get(ix, iy) != ixy {
                        image[next] = None;
                        used[cand] = false;
                        continue 'cand;
                    }
                }
            }
        }
        if assign_isomorphism(a, b, pa, pb, image, used, next + 1) {
            return true;
        }
        image[next] = None;
        used[cand] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::flip_flop;

    fn table(rows: &[&[usize]]) -> MulTable {
        MulTable::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Independent triple-loop oracle for the associativity checker.
    fn assoc_oracle(t: &MulTable) -> Option<(usize, usize, usize)> {
        let n = t.order();
        let mut bad = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if t.get(t.get(x, y), z) != t.get(x, t.get(y, z)) {
                        bad.push((x, y, z));
                    }
                }
            }
        }
        bad.into_iter().min()
    }

    #[test]
    fn closure_invariant_enforced() {
        let err = MulTable::new(vec![vec![0, 2], vec![1, 0]]).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn flip_flop_is_associative() {
        assert_eq!(flip_flop().check_associative(), AssocVerdict::Associative);
    }

    #[test]
    fn order_one_is_associative() {
        assert!(table(&[&[0]]).is_associative());
    }

    #[test]
    fn first_violation_is_lexicographic() {
        let t = table(&[&[1, 0], &[0, 0]]);
        assert_eq!(
            t.check_associative(),
            AssocVerdict::Violation { x: 0, y: 0, z: 1 }
        );
        assert_eq!(assoc_oracle(&t), Some((0, 0, 1)));
    }

    #[test]
    fn checker_agrees_with_oracle_on_all_order_two_tables() {
        // 2^4 = 16 tables of order 2; exhaustive.
        for code in 0..16u32 {
            let e = |k: u32| ((code >> k) & 1) as usize;
            let t = table(&[&[e(0), e(1)], &[e(2), e(3)]]);
            let verdict = match t.check_associative() {
                AssocVerdict::Associative => None,
                AssocVerdict::Violation { x, y, z } => Some((x, y, z)),
            };
            assert_eq!(verdict, assoc_oracle(&t));
        }
    }

    #[test]
    fn idempotents_of_named_tables() {
        assert_eq!(
            flip_flop().idempotents(),
            BTreeSet::from([0, 1, 2]),
            "all three flip-flop elements are idempotent"
        );
        let c3 = table(&[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]);
        assert_eq!(c3.idempotents(), BTreeSet::from([0]));
        let t = table(&[&[1, 0], &[0, 0]]);
        assert_eq!(t.idempotents(), BTreeSet::new());
    }

    #[test]
    fn resets_of_named_tables() {
        assert_eq!(flip_flop().resets(), BTreeSet::from([1, 2]));
        let c2 = table(&[&[0, 1], &[1, 0]]);
        assert_eq!(c2.resets(), BTreeSet::new());
        let c3 = table(&[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]);
        assert_eq!(c3.resets(), BTreeSet::new());
    }

    #[test]
    fn identity_detection() {
        assert_eq!(flip_flop().identity_element(), Some(0));
        let right_zero = table(&[&[0, 1], &[0, 1]]);
        assert_eq!(right_zero.identity_element(), None);
        let c3 = table(&[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]);
        assert_eq!(c3.identity_element(), Some(0));
    }

    #[test]
    fn resets_are_idempotent() {
        for t in [
            flip_flop(),
            table(&[&[0, 1], &[0, 1]]),
            table(&[&[0, 0], &[1, 1]]),
            table(&[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]),
        ] {
            assert!(t.is_associative());
            assert!(t.resets().is_subset(&t.idempotents()));
        }
    }

    #[test]
    fn closure_in_flip_flop() {
        let ff = flip_flop();
        assert_eq!(
            ff.closure_in_table(&BTreeSet::from([1, 2])).unwrap(),
            BTreeSet::from([1, 2])
        );
        assert_eq!(
            ff.closure_in_table(&BTreeSet::from([0])).unwrap(),
            BTreeSet::from([0])
        );
        let c3 = table(&[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]);
        assert_eq!(
            c3.closure_in_table(&BTreeSet::from([1])).unwrap(),
            BTreeSet::from([0, 1, 2])
        );
        assert!(ff.closure_in_table(&BTreeSet::new()).is_err());
    }

    #[test]
    fn cayley_embedding_of_flip_flop() {
        let sgp = flip_flop().cayley_embedding().unwrap();
        assert_eq!(sgp.degree(), 3, "monoid embeds without an adjoined point");
        let images: Vec<Vec<usize>> = sgp.elements().iter().map(|t| t.images().to_vec()).collect();
        assert_eq!(images, vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]]);
    }

    #[test]
    fn cayley_embedding_of_the_trivial_semigroup() {
        let sgp = table(&[&[0]]).cayley_embedding().unwrap();
        assert_eq!(sgp.degree(), 1);
        assert_eq!(sgp.elements().len(), 1);
        assert!(sgp.elements()[0].is_identity());
    }

    #[test]
    fn cayley_embedding_adjoins_point_without_identity() {
        // Left-zero semigroup: xy = x; the action p -> px is the identity
        // on S for every x, so faithfulness needs the extra point.
        let lz = table(&[&[0, 0], &[1, 1]]);
        let sgp = lz.cayley_embedding().unwrap();
        assert_eq!(sgp.degree(), 3);
        assert_eq!(sgp.elements().len(), 2);
        for t in sgp.elements() {
            assert_eq!(
                &t.images()[..2],
                &[0, 1],
                "restriction to S is the identity"
            );
        }
    }

    #[test]
    fn cayley_embedding_rejects_non_associative() {
        let t = table(&[&[1, 0], &[0, 0]]);
        assert!(matches!(t.cayley_embedding(), Err(Error::Domain(_))));
    }

    #[test]
    fn isomorphism_finds_relabelings() {
        let ff = flip_flop();
        // Flip-flop with element order (0, 1, r).
        let shuffled = table(&[&[0, 1, 0], &[0, 1, 1], &[0, 1, 2]]);
        let pi = ff.are_isomorphic(&shuffled).expect("relabeling exists");
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(pi[ff.get(x, y)], shuffled.get(pi[x], pi[y]));
            }
        }
    }

    #[test]
    fn isomorphism_rejects_structurally_different_tables() {
        let ff = flip_flop();
        let c3 = table(&[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]);
        assert!(ff.are_isomorphic(&c3).is_none(), "idempotent counts 3 vs 1");
        let c2 = table(&[&[0, 1], &[1, 0]]);
        let rz = table(&[&[0, 1], &[0, 1]]);
        assert!(c2.are_isomorphic(&rz).is_none());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let ff = flip_flop();
        let text = ff.to_text();
        assert_eq!(text, "3\n0 1 2\n1 1 2\n2 1 2\n");
        assert_eq!(MulTable::parse(&text).unwrap(), ff);
        let commented = format!("# the 1-bit memory table\n{text}");
        assert_eq!(MulTable::parse(&commented).unwrap(), ff);
    }

    #[test]
    fn parse_rejects_malformed_tables() {
        assert!(matches!(MulTable::parse(""), Err(Error::Format(_))));
        assert!(matches!(MulTable::parse("2\n0 1\n"), Err(Error::Format(_))));
        assert!(matches!(
            MulTable::parse("2\n0 3\n1 0\n"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            MulTable::parse("1\n0\n0\n"),
            Err(Error::Format(_))
        ));
    }
}
