//! Named constructions: the flip-flop monoid, lookup-table semigroups,
//! direct products, two-level cascade products, and the bit-mask
//! extraction that reads ordinary functions off a bijection.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::table::MulTable;
use crate::transform::{Permutation, TransSgp, Transformation};

/// The 1-bit memory monoid over element order (r, 0, 1): `r` reads, the
/// bit values store destructively (they are right zeros).
pub fn flip_flop() -> MulTable {
    MulTable::new(vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 1, 2]])
        .expect("fixed table is well-formed")
}

/// A total function between disjoint finite label sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFunction {
    domain: Vec<String>,
    codomain: Vec<String>,
    map: Vec<usize>,
}

impl FiniteFunction {
    /// Validates distinctness of each label set, disjointness of the two,
    /// and totality of the assignment (one codomain index per domain
    /// label).
    pub fn new(domain: Vec<String>, codomain: Vec<String>, map: Vec<usize>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::Domain("function domain must be nonempty".into()));
        }
        let dom_set: BTreeSet<&String> = domain.iter().collect();
        let cod_set: BTreeSet<&String> = codomain.iter().collect();
        if dom_set.len() != domain.len() || cod_set.len() != codomain.len() {
            return Err(Error::Domain("duplicate labels".into()));
        }
        if let Some(shared) = dom_set.intersection(&cod_set).next() {
            return Err(Error::Domain(format!(
                "domain and codomain share label {shared:?}; use a disjoint copy for self-maps"
            )));
        }
        if map.len() != domain.len() {
            return Err(Error::Domain(
                "assignment must cover the whole domain".into(),
            ));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= codomain.len()) {
            return Err(Error::Domain(format!("image index {bad} out of range")));
        }
        Ok(FiniteFunction {
            domain,
            codomain,
            map,
        })
    }

    /// Builds a function for a self-map `X -> X` by making the codomain a
    /// primed copy of `X`, keeping the two label sets disjoint.
    pub fn from_self_map(domain: Vec<String>, map: Vec<usize>) -> Result<Self> {
        let codomain: Vec<String> = domain.iter().map(|l| format!("{l}'")).collect();
        FiniteFunction::new(domain, codomain, map)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    /// Codomain index assigned to domain index `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn apply_label(&self, label: &str) -> Option<&str> {
        let i = self.domain.iter().position(|l| l == label)?;
        Some(&self.codomain[self.map[i]])
    }

    /// One `label -> label` line per domain element, in domain order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, x) in self.domain.iter().enumerate() {
            out.push_str(&format!("{x} -> {}\n", self.codomain[self.map[i]]));
        }
        out
    }

    /// Parses `label -> label` lines; the codomain is collected in order
    /// of first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut domain = Vec::new();
        let mut codomain: Vec<String> = Vec::new();
        let mut map = Vec::new();
        for line in crate::table::data_lines(text) {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Format(format!("expected `label -> label`: {line:?}")))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if lhs.is_empty() || rhs.is_empty() || lhs.contains(' ') || rhs.contains(' ') {
                return Err(Error::Format(format!("bad labels in line {line:?}")));
            }
            domain.push(lhs.to_string());
            let idx = match codomain.iter().position(|l| l == rhs) {
                Some(i) => i,
                None => {
                    codomain.push(rhs.to_string());
                    codomain.len() - 1
                }
            };
            map.push(idx);
        }
        if domain.is_empty() {
            return Err(Error::Format("no function rows".into()));
        }
        FiniteFunction::new(domain, codomain, map).map_err(|e| Error::Format(e.to_string()))
    }
}

impl fmt::Display for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The lookup-table semigroup of `f: X -> Y`: carrier `X ∪ Y ∪ {l}`
/// where every element of `X ∪ Y` is a reset and the lookup operation
/// `l` sends `x` to `f(x)` and fixes everything outside `X`.
///
/// Returns the table (element order: X, then Y, then `l`) together with
/// the element labels.
pub fn lookup_semigroup(f: &FiniteFunction) -> Result<(MulTable, Vec<String>)> {
    let nx = f.domain().len();
    let ny = f.codomain().len();
    let n = nx + ny + 1;
    let lookup = n - 1;
    let mut rows = vec![vec![0usize; n]; n];
    for (u, row) in rows.iter_mut().enumerate() {
        for (v, entry) in row.iter_mut().take(lookup).enumerate() {
            *entry = v; // right zeros
        }
        row[lookup] = if u < nx { nx + f.apply(u) } else { u };
    }
    let table = MulTable::new(rows)?;
    let mut labels: Vec<String> = f.domain().to_vec();
    labels.extend(f.codomain().iter().cloned());
    let mut lookup_label = String::from("l");
    while labels.contains(&lookup_label) {
        lookup_label.push('\'');
    }
    labels.push(lookup_label);
    Ok((table, labels))
}

/// Componentwise product on pairs, indexed `x * |b| + y`.
pub fn direct_product(a: &MulTable, b: &MulTable) -> MulTable {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    let mut rows = vec![vec![0usize; n]; n];
    for x1 in 0..na {
        for y1 in 0..nb {
            for x2 in 0..na {
                for y2 in 0..nb {
                    rows[x1 * nb + y1][x2 * nb + y2] = a.get(x1, x2) * nb + b.get(y1, y2);
                }
            }
        }
    }
    MulTable::new(rows).expect("componentwise entries stay in range")
}

/// One named event of a cascade: an action on the top states plus, for
/// each top state, the action the bottom component performs when the top
/// is in that state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeEvent {
    pub name: String,
    pub top_part: Transformation,
    pub dependency: Vec<Transformation>,
}

/// Two-level hierarchical composition: information flows downward only.
/// The bottom transition is selected by the current top state, so the
/// top never observes the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    top: TransSgp,
    bottom: TransSgp,
    events: Vec<CascadeEvent>,
}

impl Cascade {
    pub fn new(top: TransSgp, bottom: TransSgp, events: Vec<CascadeEvent>) -> Result<Self> {
        let k = top.degree();
        let mut names = BTreeSet::new();
        for ev in &events {
            if ev.name.is_empty() || ev.name.contains(char::is_whitespace) {
                return Err(Error::Domain(format!("bad event name {:?}", ev.name)));
            }
            if !names.insert(ev.name.clone()) {
                return Err(Error::Domain(format!("duplicate event name {:?}", ev.name)));
            }
            if !top.contains(&ev.top_part) {
                return Err(Error::Domain(format!(
                    "event {:?}: top part is not an element of the top component",
                    ev.name
                )));
            }
            if ev.dependency.len() != k {
                return Err(Error::Domain(format!(
                    "event {:?}: dependency has {} entries, expected one per top state ({k})",
                    ev.name,
                    ev.dependency.len()
                )));
            }
            if ev.dependency.iter().any(|d| !bottom.contains(d)) {
                return Err(Error::Domain(format!(
                    "event {:?}: dependency entry is not an element of the bottom component",
                    ev.name
                )));
            }
        }
        Ok(Cascade {
            top,
            bottom,
            events,
        })
    }

    pub fn top(&self) -> &TransSgp {
        &self.top
    }

    pub fn bottom(&self) -> &TransSgp {
        &self.bottom
    }

    pub fn events(&self) -> &[CascadeEvent] {
        &self.events
    }

    pub fn event(&self, name: &str) -> Option<&CascadeEvent> {
        self.events.iter().find(|e| e.name == name)
    }

    /// Number of flattened pair states `k * m`.
    pub fn state_count(&self) -> usize {
        self.top.degree() * self.bottom.degree()
    }

    /// Applies one event to a pair state. The bottom action is chosen by
    /// the top state *before* the event moves it.
    pub fn step(&self, top_state: usize, bottom_state: usize, ev: &CascadeEvent) -> (usize, usize) {
        (
            ev.top_part.apply(top_state),
            ev.dependency[top_state].apply(bottom_state),
        )
    }

    /// The flattened action of one event on pair states `x * m + y`.
    pub fn event_transformation(&self, ev: &CascadeEvent) -> Transformation {
        let m = self.bottom.degree();
        let mut images = Vec::with_capacity(self.state_count());
        for x in 0..self.top.degree() {
            for y in 0..m {
                let (nx, ny) = self.step(x, y, ev);
                images.push(nx * m + ny);
            }
        }
        Transformation::new(images).expect("pair indices stay in range")
    }

    /// Closure of all flattened event actions, as a transformation
    /// semigroup on the pair states.
    pub fn flatten(&self) -> Result<TransSgp> {
        let gens: Vec<Transformation> = self
            .events
            .iter()
            .map(|ev| self.event_transformation(ev))
            .collect();
        TransSgp::generate(&gens)
    }

    /// Section-based text form: TOP and BOTTOM element lists followed by
    /// one event line each (`name top-index k-bottom-indices`). Indices
    /// refer to the sorted element lists.
    pub fn to_text(&self) -> String {
        let mut out = String::from("TOP\n");
        out.push_str(&self.top.to_text());
        out.push_str("BOTTOM\n");
        out.push_str(&self.bottom.to_text());
        out.push_str("EVENTS\n");
        for ev in &self.events {
            out.push_str(&ev.name);
            out.push(' ');
            out.push_str(&self.top.index_of(&ev.top_part).unwrap().to_string());
            for d in &ev.dependency {
                out.push(' ');
                out.push_str(&self.bottom.index_of(d).unwrap().to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the section format. The TOP and BOTTOM lists must already
    /// be closed so that event indices are stable.
    pub fn parse(text: &str) -> Result<Self> {
        let mut top_lines = Vec::new();
        let mut bottom_lines = Vec::new();
        let mut event_lines = Vec::new();
        let mut section = None;
        for line in crate::table::data_lines(text) {
            match line {
                "TOP" => section = Some(0),
                "BOTTOM" => section = Some(1),
                "EVENTS" => section = Some(2),
                _ => match section {
                    Some(0) => top_lines.push(line),
                    Some(1) => bottom_lines.push(line),
                    Some(2) => event_lines.push(line),
                    _ => return Err(Error::Format(format!("data before TOP section: {line:?}"))),
                },
            }
        }
        let parse_component = |lines: &[&str], which: &str| -> Result<TransSgp> {
            let listed = crate::transform::parse_transformation_list(&lines.join("\n"))
                .map_err(|e| Error::Format(format!("{which} section: {e}")))?;
            TransSgp::from_elements(listed).map_err(|e| {
                Error::Format(format!("{which} section must list a closed semigroup: {e}"))
            })
        };
        let top = parse_component(&top_lines, "TOP")?;
        let bottom = parse_component(&bottom_lines, "BOTTOM")?;
        let k = top.degree();
        let mut events = Vec::new();
        for line in event_lines {
            let mut parts = line.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| Error::Format("empty event line".into()))?
                .to_string();
            let idx: Vec<usize> = parts
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::Format(format!("bad index {tok:?} in event {name:?}")))
                })
                .collect::<Result<_>>()?;
            if idx.len() != k + 1 {
                return Err(Error::Format(format!(
                    "event {name:?} needs a top index plus {k} dependency indices"
                )));
            }
            let pick = |list: &TransSgp, i: usize, what: &str| -> Result<Transformation> {
                list.elements().get(i).cloned().ok_or_else(|| {
                    Error::Format(format!("event {name:?}: {what} index {i} out of range"))
                })
            };
            let top_part = pick(&top, idx[0], "top")?;
            let dependency = idx[1..]
                .iter()
                .map(|&i| pick(&bottom, i, "bottom"))
                .collect::<Result<Vec<_>>>()?;
            events.push(CascadeEvent {
                name,
                top_part,
                dependency,
            });
        }
        Cascade::new(top, bottom, events).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Top-state labels of the reversible-XOR cascade, in the documented
/// order; index = position in this list.
pub const XOR_TOP_STATE_LABELS: [&str; 4] = ["00", "11", "01", "10"];

/// The bijection that XOR and FAN-OUT both piggyback on:
/// 00->00, 01->11, 10->10, 11->01 (labels read most significant bit
/// first).
pub fn xor_fanout_bijection() -> Permutation {
    Permutation::from_images(vec![0, 3, 2, 1]).expect("fixed image list is a bijection")
}

/// The two-level cascade computing XOR: a reversible 4-state top driven
/// by the involution `t`, and a 2-state bottom that the `readout` event
/// resets to the XOR of the top state's bits.
pub fn xor_cascade() -> Cascade {
    // Top permutation t over (00, 11, 01, 10): fixes 00 and 10, swaps 11 <-> 01.
    let t = Transformation::new(vec![0, 2, 1, 3]).unwrap();
    let top = TransSgp::generate(std::slice::from_ref(&t)).unwrap();
    let id2 = Transformation::identity(2);
    let r0 = Transformation::constant(2, 0).unwrap();
    let r1 = Transformation::constant(2, 1).unwrap();
    let bottom = TransSgp::generate(&[r0.clone(), r1.clone(), id2.clone()]).unwrap();
    let events = vec![
        CascadeEvent {
            name: "t".into(),
            top_part: t,
            dependency: vec![id2.clone(); 4],
        },
        CascadeEvent {
            name: "readout".into(),
            top_part: Transformation::identity(4),
            // Bottom resets to the XOR of the top label's bits.
            dependency: vec![r0.clone(), r0, r1.clone(), r1],
        },
    ];
    Cascade::new(top, bottom, events).expect("fixed cascade is well-formed")
}

/// Index of the top state whose label is the two-bit input `ab`.
pub fn xor_top_state(label: &str) -> Option<usize> {
    XOR_TOP_STATE_LABELS.iter().position(|&l| l == label)
}

/// Reads a function off a bijection by restricting attention to selected
/// bits of the state label.
///
/// Both patterns have one character per label bit, most significant
/// first. In the input pattern, `x` marks an input bit, `0`/`1` pin a
/// bit to a constant, and `-` lets a bit range freely — the extraction
/// is then only well-defined if the selected output bits do not depend
/// on it. In the output pattern, `x` selects a bit and `-` drops it.
///
/// When the extracted input and output label sets collide (e.g. reading
/// the identity off the identity), the codomain labels are primed to
/// keep the function's label sets disjoint.
///
/// ```
/// use sgp::constructions::{piggyback_extract, xor_fanout_bijection};
///
/// let xor = piggyback_extract(&xor_fanout_bijection(), "xx", "x-")?;
/// assert_eq!(xor.apply_label("11"), Some("0"));
/// # Ok::<(), sgp::Error>(())
/// ```
pub fn piggyback_extract(
    perm: &Permutation,
    in_pattern: &str,
    out_pattern: &str,
) -> Result<FiniteFunction> {
    let width = in_pattern.len();
    if width == 0 || out_pattern.len() != width {
        return Err(Error::Domain(format!(
            "patterns must have equal positive width: {in_pattern:?} vs {out_pattern:?}"
        )));
    }
    if perm.degree() != 1usize << width {
        return Err(Error::Domain(format!(
            "permutation degree {} is not 2^{width}",
            perm.degree()
        )));
    }
    let mut in_bits = Vec::new();
    let mut free_bits = Vec::new();
    let mut fixed: u32 = 0;
    for (i, c) in in_pattern.chars().enumerate() {
        match c {
            'x' => in_bits.push(i),
            '-' => free_bits.push(i),
            '0' => {}
            '1' => fixed |= bit_at(width, i),
            _ => {
                return Err(Error::Domain(format!(
                    "input pattern may contain only x01-: {in_pattern:?}"
                )))
            }
        }
    }
    let out_bits: Vec<usize> = out_pattern
        .chars()
        .enumerate()
        .filter_map(|(i, c)| match c {
            'x' => Some(Ok(i)),
            '-' => None,
            _ => Some(Err(())),
        })
        .collect::<std::result::Result<_, _>>()
        .map_err(|()| {
            Error::Domain(format!(
                "output pattern may contain only x-: {out_pattern:?}"
            ))
        })?;
    if in_bits.is_empty() || out_bits.is_empty() {
        return Err(Error::Domain(
            "patterns must select at least one bit".into(),
        ));
    }

    let mut domain = Vec::new();
    let mut codomain: Vec<String> = Vec::new();
    let mut map = Vec::new();
    for a in 0..(1u32 << in_bits.len()) {
        let mut base = fixed;
        for (j, &pos) in in_bits.iter().enumerate() {
            if a & (1 << (in_bits.len() - 1 - j)) != 0 {
                base |= bit_at(width, pos);
            }
        }
        let mut agreed: Option<(u32, String)> = None;
        for b in 0..(1u32 << free_bits.len()) {
            let mut state = base;
            for (j, &pos) in free_bits.iter().enumerate() {
                if b & (1 << (free_bits.len() - 1 - j)) != 0 {
                    state |= bit_at(width, pos);
                }
            }
            let image = perm.apply(state as usize) as u32;
            let out_label: String = out_bits
                .iter()
                .map(|&pos| {
                    if image & bit_at(width, pos) != 0 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect();
            match &agreed {
                None => agreed = Some((state, out_label)),
                Some((prev_state, prev_label)) if *prev_label != out_label => {
                    return Err(Error::Extraction(format!(
                        "input {} maps states {} and {} to outputs {} and {}",
                        bits_label(a, in_bits.len()),
                        bits_label(*prev_state, width),
                        bits_label(state, width),
                        prev_label,
                        out_label
                    )));
                }
                Some(_) => {}
            }
        }
        let (_, out_label) = agreed.expect("at least the all-zero free assignment ran");
        domain.push(bits_label(a, in_bits.len()));
        let idx = match codomain.iter().position(|l| l == &out_label) {
            Some(i) => i,
            None => {
                codomain.push(out_label);
                codomain.len() - 1
            }
        };
        map.push(idx);
    }
    if codomain.iter().any(|l| domain.contains(l)) {
        for l in &mut codomain {
            l.push('\'');
        }
    }
    FiniteFunction::new(domain, codomain, map)
}

#[inline]
fn bit_at(width: usize, pos: usize) -> u32 {
    1 << (width - 1 - pos)
}

fn bits_label(value: u32, width: usize) -> String {
    (0..width)
        .map(|i| {
            if value & (1 << (width - 1 - i)) != 0 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}
