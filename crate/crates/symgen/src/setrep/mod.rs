//! Projectable set representations over `[0,1]^n`.
//!
//! Both representations reduce to a [`BoxSet`]: a finite union of axis-aligned
//! boxes, each box a conjunction of per-variable interval filters. Variables
//! without a filter are unconstrained. Interval bounds carry strictness flags
//! so that decision-tree splits (`v > t` vs `v <= t`) keep their exact
//! semantics. All operations are exact; nothing is sampled.

pub mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which set representation a pipeline run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Boxes read off the decision tree's true-leaf paths.
    #[serde(rename = "c45")]
    C45,
    /// Per-variable `[min,max]` hulls of the true-leaf positives.
    #[serde(rename = "intm")]
    IntM,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::C45 => write!(f, "c45"),
            Representation::IntM => write!(f, "intm"),
        }
    }
}

impl std::str::FromStr for Representation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c45" => Ok(Representation::C45),
            "intm" => Ok(Representation::IntM),
            other => Err(Error::InvalidInput(format!(
                "unknown representation `{other}`, expected `c45` or `intm`"
            ))),
        }
    }
}

/// One interval filter within `[0,1]`. `lo_open`/`hi_open` mark strict bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn point(v: f64) -> Self {
        Interval::closed(v, v)
    }

    pub fn full() -> Self {
        Interval::closed(0.0, 1.0)
    }

    /// Filter contributed by taking the `v > t` branch of a split.
    pub fn above(t: f64) -> Self {
        Interval { lo: t, hi: 1.0, lo_open: true, hi_open: false }
    }

    /// Filter contributed by taking the `v <= t` branch of a split.
    pub fn at_most(t: f64) -> Self {
        Interval::closed(0.0, t)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above_lo = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below_hi = if self.hi_open { x < self.hi } else { x <= self.hi };
        above_lo && below_hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    /// True iff the filter admits every point of the `[0,1]` domain.
    pub fn is_full(&self) -> bool {
        self.contains(0.0) && self.contains(1.0) && self.lo <= 0.0 && self.hi >= 1.0
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_open) = max_lower((self.lo, self.lo_open), (other.lo, other.lo_open));
        let (hi, hi_open) = min_upper((self.hi, self.hi_open), (other.hi, other.hi_open));
        Interval { lo, hi, lo_open, hi_open }
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        lower_at_least((self.lo, self.lo_open), (other.lo, other.lo_open))
            && upper_at_most((self.hi, self.hi_open), (other.hi, other.hi_open))
    }

    /// The ≤ 2 maximal sub-intervals of `[0,1]` outside this interval.
    fn complement_pieces(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let below = Interval { lo: 0.0, lo_open: false, hi: self.lo, hi_open: !self.lo_open };
        let above = Interval { lo: self.hi, lo_open: !self.hi_open, hi: 1.0, hi_open: false };
        if !below.is_empty() {
            out.push(below);
        }
        if !above.is_empty() {
            out.push(above);
        }
        out
    }
}

/// Is lower bound `a` at least as restrictive as lower bound `b`?
fn lower_at_least(a: (f64, bool), b: (f64, bool)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1 || !b.1))
}

/// Is upper bound `a` at least as restrictive as upper bound `b`?
fn upper_at_most(a: (f64, bool), b: (f64, bool)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && (a.1 || !b.1))
}

fn max_lower(a: (f64, bool), b: (f64, bool)) -> (f64, bool) {
    if lower_at_least(a, b) {
        a
    } else {
        b
    }
}

fn min_upper(a: (f64, bool), b: (f64, bool)) -> (f64, bool) {
    if upper_at_most(a, b) {
        a
    } else {
        b
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_open { '(' } else { '[' };
        let close = if self.hi_open { ')' } else { ']' };
        write!(f, "{}{},{}{}", open, self.lo, self.hi, close)
    }
}

impl Interval {
    pub fn parse(s: &str) -> Result<Interval> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("malformed interval `{s}`"));
        let mut chars = s.chars();
        let lo_open = match chars.next().ok_or_else(bad)? {
            '[' => false,
            '(' => true,
            _ => return Err(bad()),
        };
        let hi_open = match s.chars().last().ok_or_else(bad)? {
            ']' => false,
            ')' => true,
            _ => return Err(bad()),
        };
        let inner = &s[1..s.len() - 1];
        let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        Ok(Interval { lo, hi, lo_open, hi_open })
    }
}

/// A single box: conjunction of per-variable interval filters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FilterBox {
    filters: BTreeMap<usize, Interval>,
}

impl FilterBox {
    pub fn universal() -> Self {
        FilterBox::default()
    }

    pub fn with(mut self, var: usize, iv: Interval) -> Self {
        self.filters.insert(var, iv);
        self
    }

    pub fn set_filter(&mut self, var: usize, iv: Interval) {
        self.filters.insert(var, iv);
    }

    /// Narrows the filter on `var` by intersecting with `iv`.
    pub fn narrow(&mut self, var: usize, iv: Interval) {
        let cur = self.interval_on(var);
        self.filters.insert(var, cur.intersect(&iv));
    }

    pub fn filter(&self, var: usize) -> Option<&Interval> {
        self.filters.get(&var)
    }

    /// The filter on `var`, defaulting to the full domain when absent.
    pub fn interval_on(&self, var: usize) -> Interval {
        self.filters.get(&var).copied().unwrap_or_else(Interval::full)
    }

    pub fn filters(&self) -> &BTreeMap<usize, Interval> {
        &self.filters
    }

    pub fn contains(&self, state: &[f64]) -> bool {
        self.filters.iter().all(|(&v, iv)| state.get(v).is_some_and(|&x| iv.contains(x)))
    }

    pub fn is_empty(&self) -> bool {
        self.filters.values().any(Interval::is_empty)
    }

    pub fn intersect(&self, other: &FilterBox) -> FilterBox {
        let mut out = self.clone();
        for (&v, iv) in &other.filters {
            out.narrow(v, *iv);
        }
        out
    }

    pub fn is_subset_of_box(&self, other: &FilterBox) -> bool {
        if self.is_empty() {
            return true;
        }
        other.filters.iter().all(|(&v, iv)| self.interval_on(v).is_subset_of(iv))
    }

    /// Removes the filters on `out_vars`, enlarging the box.
    pub fn project(&self, out_vars: &BTreeSet<usize>) -> FilterBox {
        FilterBox {
            filters: self
                .filters
                .iter()
                .filter(|(v, _)| !out_vars.contains(v))
                .map(|(&v, &iv)| (v, iv))
                .collect(),
        }
    }

    /// Variables carrying a filter, full-range filters included.
    pub fn constrained_vars(&self) -> BTreeSet<usize> {
        self.filters.keys().copied().collect()
    }

    /// Variables whose filter actually excludes part of the domain.
    pub fn binding_vars(&self) -> BTreeSet<usize> {
        self.filters.iter().filter(|(_, iv)| !iv.is_full()).map(|(&v, _)| v).collect()
    }

    /// The parts of `self` not covered by `other`, as disjoint boxes.
    fn subtract(&self, other: &FilterBox) -> Vec<FilterBox> {
        let mut pieces = Vec::new();
        let mut core = self.clone();
        for (&v, iv) in &other.filters {
            let cur = core.interval_on(v);
            for outside in iv.complement_pieces() {
                let piece_iv = cur.intersect(&outside);
                if !piece_iv.is_empty() {
                    let mut piece = core.clone();
                    piece.set_filter(v, piece_iv);
                    pieces.push(piece);
                }
            }
            core.set_filter(v, cur.intersect(iv));
            if core.is_empty() {
                break;
            }
        }
        pieces
    }
}

impl fmt::Display for FilterBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.filters.is_empty() {
            return write!(f, "true");
        }
        let parts: Vec<String> =
            self.filters.iter().map(|(v, iv)| format!("v{} in {}", v + 1, iv)).collect();
        write!(f, "{}", parts.join(" & "))
    }
}

impl FilterBox {
    pub fn parse(s: &str) -> Result<FilterBox> {
        let s = s.trim();
        if s == "true" {
            return Ok(FilterBox::universal());
        }
        let mut out = FilterBox::universal();
        for part in s.split('&') {
            let part = part.trim();
            let (var, iv) = part
                .split_once(" in ")
                .ok_or_else(|| Error::InvalidInput(format!("malformed box filter `{part}`")))?;
            let var = var.trim();
            let idx: usize = var
                .strip_prefix('v')
                .and_then(|n| n.parse().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::InvalidInput(format!("malformed variable `{var}`")))?;
            out.set_filter(idx - 1, Interval::parse(iv)?);
        }
        Ok(out)
    }
}

/// A finite union of boxes; the representation every classifier is lowered to.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    boxes: Vec<FilterBox>,
}

impl BoxSet {
    /// The empty set.
    pub fn empty() -> Self {
        BoxSet { boxes: Vec::new() }
    }

    /// The whole domain.
    pub fn universal() -> Self {
        BoxSet { boxes: vec![FilterBox::universal()] }
    }

    /// Builds a set from boxes, dropping empty ones.
    pub fn from_boxes(boxes: Vec<FilterBox>) -> Self {
        BoxSet { boxes: boxes.into_iter().filter(|b| !b.is_empty()).collect() }
    }

    pub fn single(b: FilterBox) -> Self {
        BoxSet::from_boxes(vec![b])
    }

    pub fn boxes(&self) -> &[FilterBox] {
        &self.boxes
    }

    pub fn contains_state(&self, state: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains(state))
    }

    pub fn is_empty_set(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn is_universal_set(&self) -> bool {
        BoxSet::universal().is_subset(self)
    }

    /// Projects out `out_vars` from every box (an over-approximation-free
    /// existential projection: boxes project box-wise).
    pub fn project(&self, out_vars: &BTreeSet<usize>) -> BoxSet {
        BoxSet { boxes: self.boxes.iter().map(|b| b.project(out_vars)).collect() }
    }

    pub fn intersect(&self, other: &BoxSet) -> BoxSet {
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                let c = a.intersect(b);
                if !c.is_empty() {
                    boxes.push(c);
                }
            }
        }
        BoxSet { boxes }
    }

    /// Exact containment test: every point of `self` lies in `other`.
    pub fn is_subset(&self, other: &BoxSet) -> bool {
        self.boxes.iter().all(|b| covered(b, &other.boxes))
    }

    /// Exact set equality (mutual containment).
    pub fn set_eq(&self, other: &BoxSet) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }

    /// Union of `constrained_vars` over all boxes.
    pub fn constrained_vars(&self) -> BTreeSet<usize> {
        self.boxes.iter().flat_map(FilterBox::constrained_vars).collect()
    }

    /// Union of `binding_vars` over all boxes.
    pub fn binding_vars(&self) -> BTreeSet<usize> {
        self.boxes.iter().flat_map(FilterBox::binding_vars).collect()
    }
}

/// Is box `b` covered by the union of `cover`?
fn covered(b: &FilterBox, cover: &[FilterBox]) -> bool {
    if b.is_empty() {
        return true;
    }
    let Some(c) = cover.iter().find(|c| !b.intersect(c).is_empty()) else {
        return false;
    };
    if b.is_subset_of_box(c) {
        return true;
    }
    b.subtract(c).iter().all(|piece| covered(piece, cover))
}

impl fmt::Display for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxes.is_empty() {
            return write!(f, "empty");
        }
        let parts: Vec<String> = self.boxes.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(" | "))
    }
}

impl Serialize for BoxSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.boxes.iter().map(|b| b.to_string()).collect();
        strings.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BoxSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(de)?;
        let mut boxes = Vec::with_capacity(strings.len());
        for s in &strings {
            boxes.push(FilterBox::parse(s).map_err(serde::de::Error::custom)?);
        }
        Ok(BoxSet { boxes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_box(var: usize) -> FilterBox {
        FilterBox::universal().with(var, Interval::above(0.5))
    }

    #[test]
    fn interval_membership_honors_strictness() {
        let iv = Interval::above(0.5);
        assert!(!iv.contains(0.5));
        assert!(iv.contains(0.500001));
        assert!(iv.contains(1.0));
        let iv = Interval::at_most(0.5);
        assert!(iv.contains(0.5));
        assert!(!iv.contains(0.500001));
    }

    #[test]
    fn contains_state_checks_only_filtered_vars() {
        let s = BoxSet::single(FilterBox::universal().with(5, Interval::above(0.5)));
        assert!(s.contains_state(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        assert!(!s.contains_state(&[1.0, 1.0, 1.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn project_removes_filters() {
        let s = BoxSet::single(
            FilterBox::universal()
                .with(0, Interval::above(0.5))
                .with(1, Interval::at_most(0.5)),
        );
        let p = s.project(&BTreeSet::from([1]));
        assert_eq!(p.constrained_vars(), BTreeSet::from([0]));
        assert!(p.contains_state(&[1.0, 1.0]));
        assert!(!p.contains_state(&[0.0, 0.0]));
    }

    #[test]
    fn projection_is_idempotent_and_enlarges() {
        let s = BoxSet::single(
            FilterBox::universal()
                .with(0, Interval::point(1.0))
                .with(2, Interval::point(0.0)),
        );
        let out = BTreeSet::from([2]);
        let p = s.project(&out);
        assert_eq!(p, p.project(&out));
        assert!(s.is_subset(&p));
    }

    #[test]
    fn intersect_meets_filters() {
        let a = BoxSet::single(on_box(0));
        let b = BoxSet::single(FilterBox::universal().with(0, Interval::at_most(0.5)));
        assert!(a.intersect(&b).is_empty_set());
        let c = BoxSet::single(on_box(1));
        let m = a.intersect(&c);
        assert!(m.contains_state(&[1.0, 1.0]));
        assert!(!m.contains_state(&[1.0, 0.0]));
    }

    #[test]
    fn subset_is_exact_on_boxes() {
        let narrow = BoxSet::single(FilterBox::universal().with(0, Interval::closed(0.6, 1.0)));
        let wide = BoxSet::single(FilterBox::universal().with(0, Interval::closed(0.6, 1.0)));
        assert!(narrow.is_subset(&wide));
        let wider = BoxSet::single(
            FilterBox::universal()
                .with(0, Interval::closed(0.6, 1.0))
                .with(1, Interval::closed(0.6, 1.0)),
        );
        // The right side constrains more, so containment fails.
        assert!(!narrow.is_subset(&wider));
        assert!(wider.is_subset(&narrow));
    }

    #[test]
    fn subset_handles_multi_box_covers() {
        // [0,1] on v1 is covered by the union of [0,0.5] and (0.5,1].
        let whole = BoxSet::single(FilterBox::universal().with(0, Interval::full()));
        let halves = BoxSet::from_boxes(vec![
            FilterBox::universal().with(0, Interval::at_most(0.5)),
            FilterBox::universal().with(0, Interval::above(0.5)),
        ]);
        assert!(whole.is_subset(&halves));
        assert!(halves.is_subset(&whole));
        // Remove one half and the cover breaks.
        let lower = BoxSet::single(FilterBox::universal().with(0, Interval::at_most(0.5)));
        assert!(!whole.is_subset(&lower));
    }

    #[test]
    fn universal_and_empty_behave() {
        assert!(BoxSet::empty().is_subset(&BoxSet::empty()));
        assert!(BoxSet::empty().is_subset(&BoxSet::universal()));
        assert!(!BoxSet::universal().is_subset(&BoxSet::empty()));
        assert!(BoxSet::universal().is_universal_set());
        assert!(!BoxSet::empty().is_universal_set());
    }

    #[test]
    fn constrained_vs_binding_vars() {
        let b = FilterBox::universal()
            .with(0, Interval::full())
            .with(3, Interval::point(0.0));
        // A full-range filter still counts as constrained, but it binds nothing.
        assert_eq!(b.constrained_vars(), BTreeSet::from([0, 3]));
        assert_eq!(b.binding_vars(), BTreeSet::from([3]));
    }

    #[test]
    fn display_and_parse_round_trip() {
        let b = FilterBox::universal()
            .with(0, Interval::point(0.0))
            .with(5, Interval::above(0.5));
        let s = b.to_string();
        assert_eq!(s, "v1 in [0,0] & v6 in (0.5,1]");
        assert_eq!(FilterBox::parse(&s).unwrap(), b);
        assert_eq!(FilterBox::parse("true").unwrap(), FilterBox::universal());
        assert!(FilterBox::parse("v0 in [0,1]").is_err());
    }

    #[test]
    fn set_eq_is_semantic() {
        // Same point set expressed with different box splits.
        let a = BoxSet::single(FilterBox::universal().with(0, Interval::closed(0.0, 1.0)));
        let b = BoxSet::from_boxes(vec![
            FilterBox::universal().with(0, Interval::at_most(0.5)),
            FilterBox::universal().with(0, Interval::above(0.5)),
        ]);
        assert!(a.set_eq(&b));
    }
}
