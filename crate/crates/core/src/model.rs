//! Instances, system states, links and schedules.
//!
//! Everything here is a value: activating a link produces a new
//! [`SystemState`] and leaves the old one untouched, which is what the
//! exhaustive search relies on when it backtracks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segset::{SegmentSet, MAX_SEGMENTS};

/// Whether an [`Instance`] must satisfy the non-degeneracy assumption that no
/// node starts empty or already holding the whole universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    #[default]
    Strict,
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    initial_sets: Vec<SegmentSet>,
}

impl Instance {
    pub fn new(n: usize, initial_sets: Vec<SegmentSet>, validation: Validation) -> Result<Self> {
        if initial_sets.len() < 2 {
            return Err(Error::TooFewNodes {
                m: initial_sets.len(),
            });
        }
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        if n > MAX_SEGMENTS {
            return Err(Error::UniverseTooLarge { n });
        }
        for set in &initial_sets {
            if set.universe() != n {
                return Err(Error::InvalidArgument(format!(
                    "segment set built over a universe of {} but the instance has n = {n}",
                    set.universe()
                )));
            }
        }
        if validation == Validation::Strict {
            for (i, set) in initial_sets.iter().enumerate() {
                if set.is_empty() {
                    return Err(Error::EmptyInitialSet(i));
                }
                if set.is_full() {
                    return Err(Error::FullInitialSet(i));
                }
            }
        }
        Ok(Instance { n, initial_sets })
    }

    /// Convenience constructor from 0-based index lists.
    pub fn from_lists(n: usize, lists: &[Vec<usize>], validation: Validation) -> Result<Self> {
        let sets = lists
            .iter()
            .map(|l| SegmentSet::from_indices(n, l.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets, validation)
    }

    pub fn m(&self) -> usize {
        self.initial_sets.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn initial_sets(&self) -> &[SegmentSet] {
        &self.initial_sets
    }

    /// Common initial set size when every node starts with the same number of segments.
    pub fn uniform_k(&self) -> Option<usize> {
        let k = self.initial_sets[0].len();
        self.initial_sets.iter().all(|s| s.len() == k).then_some(k)
    }

    /// `∪_i O_i`, the segments actually present in the group.
    pub fn realized_universe(&self) -> SegmentSet {
        union_of(&self.initial_sets, self.n)
    }

    pub fn initial_state(&self) -> SystemState {
        SystemState {
            sets: self.initial_sets.clone(),
            step: 0,
        }
    }

    pub fn initial_alpha(&self) -> usize {
        self.initial_sets.iter().map(SegmentSet::len).sum()
    }

    /// True when no node starts with the realized universe. Only then are
    /// at least two nodes guaranteed to end any maximal schedule holding it.
    pub fn no_initial_universe_holder(&self) -> bool {
        let universe = self.realized_universe();
        self.initial_sets.iter().all(|s| *s != universe)
    }

    /// Lower bound on the final aggregate cardinality of any maximal schedule:
    /// two nodes end with the realized universe and nobody loses segments.
    /// `None` when some node starts with the realized universe, where the
    /// two-holder guarantee does not apply.
    pub fn maximal_alpha_floor(&self) -> Option<usize> {
        if !self.no_initial_universe_holder() {
            return None;
        }
        let mut cards: Vec<usize> = self.initial_sets.iter().map(SegmentSet::len).collect();
        cards.sort_unstable_by(|a, b| b.cmp(a));
        let u = self.realized_universe().len();
        Some(2 * u + cards[2..].iter().sum::<usize>())
    }
}

fn union_of(sets: &[SegmentSet], n: usize) -> SegmentSet {
    let mut acc = SegmentSet::empty(n);
    for s in sets {
        acc.union_with(s);
    }
    acc
}

/// Parity-aware ceiling on the aggregate cardinality.
///
/// With `u` the realized universe size, nodes can only reach the realized
/// universe in pairs, so if an odd number of nodes start without it at
/// least one of them never gets it: the bound is `m·u − 1` in that case and
/// `m·u` otherwise. Under the non-degeneracy assumption with `u = n`, this is
/// `m·u` for even `m` and `m·u − 1` for odd `m`.
pub fn upper_bound(instance: &Instance) -> usize {
    let universe = instance.realized_universe();
    let holders = instance
        .initial_sets
        .iter()
        .filter(|s| **s == universe)
        .count();
    parity_bound(instance.m(), universe.len(), holders)
}

pub(crate) fn parity_bound(m: usize, u: usize, holders: usize) -> usize {
    if (m - holders) % 2 == 1 {
        m * u - 1
    } else {
        m * u
    }
}

/// Unordered pair of distinct nodes, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    i: usize,
    j: usize,
}

impl Link {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Link { i: a, j: b }),
            std::cmp::Ordering::Greater => Ok(Link { i: b, j: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLink(a)),
        }
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn one_based(&self) -> [usize; 2] {
        [self.i + 1, self.j + 1]
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i + 1, self.j + 1)
    }
}

/// The give-and-take criterion on two segment sets: each side holds at
/// least one segment the other lacks.
pub fn gt_criterion(a: &SegmentSet, b: &SegmentSet) -> bool {
    a.has_any_outside(b) && b.has_any_outside(a)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemState {
    sets: Vec<SegmentSet>,
    step: usize,
}

impl SystemState {
    pub fn sets(&self) -> &[SegmentSet] {
        &self.sets
    }

    /// Number of activations applied since the initial state.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.sets.len() {
            return Err(Error::NodeOutOfRange {
                node,
                m: self.sets.len(),
            });
        }
        Ok(())
    }

    pub fn gt_satisfied(&self, i: usize, j: usize) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::SelfLink(i));
        }
        Ok(gt_criterion(&self.sets[i], &self.sets[j]))
    }

    pub(crate) fn linked(&self, link: Link) -> bool {
        gt_criterion(&self.sets[link.i], &self.sets[link.j])
    }

    /// All currently available links in ascending canonical order.
    pub fn links(&self) -> Vec<Link> {
        let m = self.sets.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if gt_criterion(&self.sets[i], &self.sets[j]) {
                    out.push(Link { i, j });
                }
            }
        }
        out
    }

    pub fn link_count(&self) -> usize {
        let m = self.sets.len();
        (0..m)
            .map(|i| {
                (i + 1..m)
                    .filter(|&j| gt_criterion(&self.sets[i], &self.sets[j]))
                    .count()
            })
            .sum()
    }

    pub fn is_maximal(&self) -> bool {
        let m = self.sets.len();
        !(0..m).any(|i| (i + 1..m).any(|j| gt_criterion(&self.sets[i], &self.sets[j])))
    }

    pub fn aggregate_cardinality(&self) -> usize {
        self.sets.iter().map(SegmentSet::len).sum()
    }

    pub fn union(&self) -> SegmentSet {
        union_of(&self.sets, self.sets[0].universe())
    }

    /// Full exchange across `link`; both endpoints end with the union.
    pub fn activate(&self, link: Link) -> Result<SystemState> {
        let mut next = self.clone();
        next.activate_in_place(link)?;
        Ok(next)
    }

    /// Like [`activate`](Self::activate) but returns the per-endpoint gains
    /// and updates `self`. Used by the schedule builders.
    pub(crate) fn activate_in_place(&mut self, link: Link) -> Result<(SegmentSet, SegmentSet)> {
        self.check_node(link.j)?;
        if !self.linked(link) {
            return Err(Error::InvalidActivation { link });
        }
        let gained_i = self.sets[link.j].difference(&self.sets[link.i]);
        let gained_j = self.sets[link.i].difference(&self.sets[link.j]);
        let merged = self.sets[link.i].union(&self.sets[link.j]);
        self.sets[link.i] = merged.clone();
        self.sets[link.j] = merged;
        self.step += 1;
        Ok((gained_i, gained_j))
    }

    /// Number of nodes whose current set equals `target`.
    pub fn nodes_holding(&self, target: &SegmentSet) -> usize {
        self.sets.iter().filter(|s| *s == target).count()
    }

    /// True when the node sets are totally ordered by inclusion.
    pub fn is_inclusion_chain(&self) -> bool {
        let mut order: Vec<&SegmentSet> = self.sets.iter().collect();
        order.sort_by_key(|s| s.len());
        order.windows(2).all(|w| w[0].is_subset(w[1]))
    }
}

/// One activation together with what each endpoint received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub link: Link,
    pub gained_i: SegmentSet,
    pub gained_j: SegmentSet,
}

impl Step {
    pub fn gain(&self) -> usize {
        self.gained_i.len() + self.gained_j.len()
    }
}

/// An executed schedule; every step carries its gains, so a trace with
/// nonempty gains on both sides certifies the criterion held at each step.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    steps: Vec<Step>,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule::default()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn links(&self) -> Vec<Link> {
        self.steps.iter().map(|s| s.link).collect()
    }

    pub(crate) fn push(&mut self, step: Step) {
        self.steps.push(step);
    }
}

/// Incrementally builds a schedule while advancing a state.
#[derive(Debug, Clone)]
pub(crate) struct Recorder {
    pub state: SystemState,
    pub schedule: Schedule,
}

impl Recorder {
    pub fn new(instance: &Instance) -> Self {
        Recorder {
            state: instance.initial_state(),
            schedule: Schedule::new(),
        }
    }

    pub fn activate(&mut self, link: Link) -> Result<()> {
        let (gained_i, gained_j) = self.state.activate_in_place(link)?;
        self.schedule.push(Step {
            link,
            gained_i,
            gained_j,
        });
        Ok(())
    }
}

/// Replays `links` from the initial state of `instance`.
pub fn apply_schedule(instance: &Instance, links: &[Link]) -> Result<(SystemState, Schedule)> {
    let mut rec = Recorder::new(instance);
    for (step, &link) in links.iter().enumerate() {
        if link.j >= instance.m() {
            return Err(Error::NodeOutOfRange {
                node: link.j,
                m: instance.m(),
            });
        }
        rec.activate(link)
            .map_err(|_| Error::InvalidScheduleStep { step, link })?;
    }
    Ok((rec.state, rec.schedule))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, lists: &[&[usize]]) -> Instance {
        let lists: Vec<Vec<usize>> = lists
            .iter()
            .map(|l| l.iter().map(|x| x - 1).collect())
            .collect();
        Instance::from_lists(n, &lists, Validation::Relaxed).unwrap()
    }

    fn link(a: usize, b: usize) -> Link {
        Link::new(a, b).unwrap()
    }

    #[test]
    fn gt_examples() {
        let s = inst(3, &[&[1, 2], &[2, 3]]).initial_state();
        assert!(s.gt_satisfied(0, 1).unwrap());
        let s = inst(3, &[&[1], &[1, 2]]).initial_state();
        assert!(!s.gt_satisfied(0, 1).unwrap());
        let s = inst(3, &[&[1, 2], &[1, 2]]).initial_state();
        assert!(!s.gt_satisfied(0, 1).unwrap());
    }

    #[test]
    fn gt_rejects_bad_indices() {
        let s = inst(3, &[&[1], &[2]]).initial_state();
        assert!(matches!(
            s.gt_satisfied(0, 2),
            Err(Error::NodeOutOfRange { node: 2, m: 2 })
        ));
        assert!(matches!(s.gt_satisfied(1, 1), Err(Error::SelfLink(1))));
    }

    #[test]
    fn links_examples() {
        assert_eq!(
            inst(2, &[&[1], &[2]]).initial_state().links(),
            vec![link(0, 1)]
        );
        assert!(inst(1, &[&[1], &[1], &[1]])
            .initial_state()
            .links()
            .is_empty());
        let s = inst(3, &[&[1, 2], &[2, 3], &[1, 2, 3]]).initial_state();
        assert_eq!(s.links(), vec![link(0, 1)]);
        assert_eq!(s.link_count(), 1);
    }

    #[test]
    fn activate_is_union_and_unordered() {
        let s = inst(3, &[&[1, 2], &[2, 3]]).initial_state();
        let a = s.activate(link(0, 1)).unwrap();
        let b = s.activate(link(1, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sets()[0].to_one_based(), vec![1, 2, 3]);
        assert_eq!(a.sets()[1].to_one_based(), vec![1, 2, 3]);
        assert_eq!(a.step(), 1);
        // the original value is untouched
        assert_eq!(s.step(), 0);
        assert_eq!(s.aggregate_cardinality(), 4);
    }

    #[test]
    fn activate_subset_pair_fails() {
        let s = inst(2, &[&[1], &[1, 2]]).initial_state();
        let err = s.activate(link(0, 1)).unwrap_err();
        assert!(matches!(err, Error::InvalidActivation { .. }));
        assert!(err.to_string().contains("(1,2)"));
    }

    #[test]
    fn maximality() {
        assert!(inst(2, &[&[1], &[1, 2]]).initial_state().is_maximal());
        assert!(!inst(2, &[&[1], &[2]]).initial_state().is_maximal());
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(
            inst(3, &[&[1, 2], &[2, 3], &[3]])
                .initial_state()
                .aggregate_cardinality(),
            5
        );
        let full: &[usize] = &[1, 2, 3, 4, 5];
        let all = inst(5, &[full; 4]).initial_state();
        assert_eq!(all.aggregate_cardinality(), 20);
    }

    #[test]
    fn apply_schedule_examples() {
        let i = inst(2, &[&[1], &[2]]);
        let (s, sched) = apply_schedule(&i, &[]).unwrap();
        assert_eq!(s, i.initial_state());
        assert!(sched.is_empty());

        let (s, sched) = apply_schedule(&i, &[link(0, 1)]).unwrap();
        assert_eq!(s.aggregate_cardinality(), 4);
        assert_eq!(sched.steps()[0].gain(), 2);

        let err = apply_schedule(&i, &[link(0, 1), link(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::InvalidScheduleStep { step: 1, .. }));
        assert_eq!(err.to_string(), "invalid activation at step 2 (link (1,2))");
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(
            upper_bound(&inst(5, &[&[1, 2], &[2, 3], &[3, 4], &[4, 5]])),
            20
        );
        assert_eq!(upper_bound(&inst(3, &[&[1], &[2], &[3]])), 8);
        assert_eq!(upper_bound(&inst(2, &[&[1], &[1]])), 2);
        // a node already holding the realized universe flips the parity
        assert_eq!(upper_bound(&inst(3, &[&[1, 2], &[1], &[2]])), 6);
    }

    #[test]
    fn strict_validation() {
        let err = Instance::from_lists(2, &[vec![0], vec![]], Validation::Strict).unwrap_err();
        assert!(matches!(err, Error::EmptyInitialSet(1)));
        let err = Instance::from_lists(2, &[vec![0, 1], vec![0]], Validation::Strict).unwrap_err();
        assert!(matches!(err, Error::FullInitialSet(0)));
        assert!(Instance::from_lists(2, &[vec![0, 1], vec![0]], Validation::Relaxed).is_ok());
        assert!(matches!(
            Instance::from_lists(2, &[vec![0]], Validation::Relaxed),
            Err(Error::TooFewNodes { m: 1 })
        ));
    }

    #[test]
    fn alpha_floor() {
        // 2u + sum of all but the two largest initial sets
        let i = inst(5, &[&[1, 2, 3], &[3, 4], &[5]]);
        assert_eq!(i.maximal_alpha_floor(), Some(2 * 5 + 1));
        assert_eq!(inst(3, &[&[1, 2], &[1], &[2]]).maximal_alpha_floor(), None);
    }
}
