//! Exact social optimum by exhaustive search.
//!
//! The future of a state depends only on the multiset of node sets, not on
//! which node holds which set, so the search memoizes the best reachable
//! final aggregate cardinality per [`CanonicalState`].

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{apply_schedule, upper_bound, Instance, Link, Schedule, Step, SystemState};

/// Node sets sorted and packed into one word vector; node identities erased.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalState(Box<[u64]>);

impl From<&SystemState> for CanonicalState {
    fn from(state: &SystemState) -> Self {
        let mut sets: Vec<&[u64]> = state.sets().iter().map(|s| s.words()).collect();
        sets.sort_unstable();
        CanonicalState(sets.concat().into_boxed_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_states: u64,
    pub max_seconds: f64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_states: 10_000_000,
            max_seconds: 60.0,
        }
    }
}

impl SearchLimits {
    pub fn new(max_states: u64, max_seconds: f64) -> Result<Self> {
        if max_states == 0 || max_seconds.is_nan() || max_seconds <= 0.0 {
            return Err(Error::InvalidArgument(
                "search limits must be positive".to_string(),
            ));
        }
        Ok(SearchLimits {
            max_states,
            max_seconds,
        })
    }
}

/// Result of [`optimal_alpha`]. When `exact` is false the search ran out of
/// budget and `alpha` is only the best value found.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub alpha: usize,
    pub witness: Schedule,
    pub final_state: SystemState,
    pub exact: bool,
    pub states_visited: u64,
}

impl Optimum {
    /// Rejects non-exact results with [`Error::LimitExceeded`].
    pub fn certified(self) -> Result<Self> {
        if self.exact {
            Ok(self)
        } else {
            Err(Error::LimitExceeded {
                best_alpha: self.alpha,
            })
        }
    }
}

struct Search {
    memo: HashMap<CanonicalState, usize>,
    ceiling: usize,
    incumbent: usize,
    incumbent_path: Vec<Link>,
    path: Vec<Link>,
    visited: u64,
    limits: SearchLimits,
    deadline: Instant,
}

enum Stop {
    Budget,
    Ceiling,
}

impl Search {
    fn offer(&mut self, alpha: usize, tail: impl FnOnce(&Self) -> Vec<Link>) -> Result<(), Stop> {
        if alpha > self.incumbent {
            self.incumbent = alpha;
            let mut path = self.path.clone();
            path.extend(tail(self));
            self.incumbent_path = path;
        }
        if self.incumbent >= self.ceiling {
            return Err(Stop::Ceiling);
        }
        Ok(())
    }

    /// Best final aggregate cardinality reachable from `state`.
    fn solve(&mut self, state: &SystemState) -> Result<usize, Stop> {
        self.visited += 1;
        if self.visited > self.limits.max_states
            || (self.visited.is_multiple_of(1024) && Instant::now() >= self.deadline)
        {
            return Err(Stop::Budget);
        }

        let links = state.links();
        if links.is_empty() {
            let alpha = state.aggregate_cardinality();
            self.offer(alpha, |_| Vec::new())?;
            return Ok(alpha);
        }

        let key = CanonicalState::from(state);
        if let Some(&best) = self.memo.get(&key) {
            self.offer(best, |s| s.best_continuation(state))?;
            return Ok(best);
        }

        let mut best = 0;
        for link in links {
            let child = state.activate(link).expect("available link");
            self.path.push(link);
            let value = self.solve(&child);
            self.path.pop();
            best = best.max(value?);
        }
        self.memo.insert(key, best);
        Ok(best)
    }

    /// Follows memoized values from a fully solved state down to a leaf.
    fn best_continuation(&self, state: &SystemState) -> Vec<Link> {
        let mut out = Vec::new();
        let mut state = state.clone();
        while !state.is_maximal() {
            let target = self.memo[&CanonicalState::from(&state)];
            let (link, child) = state
                .links()
                .into_iter()
                .map(|l| (l, state.activate(l).expect("available link")))
                .find(|(_, child)| self.value_of(child) == Some(target))
                .expect("a child attains the memoized optimum");
            out.push(link);
            state = child;
        }
        out
    }

    fn value_of(&self, state: &SystemState) -> Option<usize> {
        if state.is_maximal() {
            Some(state.aggregate_cardinality())
        } else {
            self.memo.get(&CanonicalState::from(state)).copied()
        }
    }
}

/// Maximum aggregate cardinality over all maximal schedules, with a witness.
///
/// Depth-first over available links with a canonical-state memo; the search
/// stops as soon as the incumbent reaches the parity upper bound. Running
/// out of `limits` returns the incumbent with `exact = false`.
pub fn optimal_alpha(instance: &Instance, limits: SearchLimits) -> Optimum {
    let initial = instance.initial_state();
    let mut search = Search {
        memo: HashMap::new(),
        ceiling: upper_bound(instance),
        incumbent: 0,
        incumbent_path: Vec::new(),
        path: Vec::new(),
        visited: 0,
        limits,
        deadline: Instant::now() + Duration::from_secs_f64(limits.max_seconds.min(1e9)),
    };
    let exact = match search.solve(&initial) {
        Ok(_) | Err(Stop::Ceiling) => true,
        Err(Stop::Budget) => search.incumbent >= search.ceiling,
    };

    let (final_state, witness) = if search.incumbent_path.is_empty() && !initial.is_maximal() {
        // budget ran out before any leaf: complete greedily so the witness is maximal
        let mut state = initial.clone();
        let mut links = Vec::new();
        while let Some(&l) = state.links().first() {
            state = state.activate(l).expect("available link");
            links.push(l);
        }
        let (state, sched) = apply_schedule(instance, &links).expect("replayable");
        (state, sched)
    } else {
        apply_schedule(instance, &search.incumbent_path).expect("witness replays")
    };

    Optimum {
        alpha: final_state.aggregate_cardinality(),
        witness,
        final_state,
        exact,
        states_visited: search.visited,
    }
}

/// Plain recursive maximum over every maximal schedule, no memo, no pruning.
pub fn reference_optimum(instance: &Instance) -> usize {
    fn go(state: &SystemState) -> usize {
        let links = state.links();
        if links.is_empty() {
            return state.aggregate_cardinality();
        }
        links
            .into_iter()
            .map(|l| go(&state.activate(l).expect("available link")))
            .max()
            .unwrap_or(0)
    }
    go(&instance.initial_state())
}

struct Frame {
    state: SystemState,
    links: Vec<Link>,
    next: usize,
}

/// Depth-first stream of distinct maximal schedules with their final states.
pub struct MaximalSchedules {
    stack: Vec<Frame>,
    steps: Vec<Step>,
    cap: usize,
    yielded: usize,
    truncated: bool,
}

impl MaximalSchedules {
    pub fn new(instance: &Instance, cap: usize) -> Self {
        let state = instance.initial_state();
        let links = state.links();
        MaximalSchedules {
            stack: vec![Frame {
                state,
                links,
                next: 0,
            }],
            steps: Vec::new(),
            cap,
            yielded: 0,
            truncated: false,
        }
    }

    /// True once the cap stopped the stream with schedules left unvisited.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    fn pop(&mut self) {
        self.stack.pop();
        if !self.stack.is_empty() {
            self.steps.pop();
        }
    }
}

impl Iterator for MaximalSchedules {
    type Item = (Schedule, SystemState);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let top = self.stack.last_mut()?;
            if top.links.is_empty() {
                if self.yielded == self.cap {
                    self.truncated = true;
                    self.stack.clear();
                    return None;
                }
                let state = top.state.clone();
                let mut schedule = Schedule::new();
                for s in &self.steps {
                    schedule.push(s.clone());
                }
                self.pop();
                self.yielded += 1;
                return Some((schedule, state));
            }
            if top.next < top.links.len() {
                let link = top.links[top.next];
                top.next += 1;
                let mut child = top.state.clone();
                let (gained_i, gained_j) = child.activate_in_place(link).expect("available link");
                let links = child.links();
                self.steps.push(Step {
                    link,
                    gained_i,
                    gained_j,
                });
                self.stack.push(Frame {
                    state: child,
                    links,
                    next: 0,
                });
            } else {
                self.pop();
            }
        }
    }
}

/// Collected maximal schedules, at most `cap` of them.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub schedules: Vec<(Schedule, SystemState)>,
    pub truncated: bool,
}

pub fn enumerate_maximal_schedules(instance: &Instance, cap: usize) -> Enumeration {
    let mut iter = MaximalSchedules::new(instance, cap);
    let schedules: Vec<_> = iter.by_ref().collect();
    Enumeration {
        schedules,
        truncated: iter.truncated(),
    }
}
