use super::{greedy_until_maximal, Algorithm, AlgorithmRun, TieRule};
use crate::model::{Instance, Link, SystemState};

/// Increase in aggregate cardinality if `link` were activated:
/// `2|O_i ∪ O_j| − |O_i| − |O_j|`.
pub fn incremental_weight(state: &SystemState, link: Link) -> usize {
    let (a, b) = (&state.sets()[link.i()], &state.sets()[link.j()]);
    2 * a.union_len(b) - a.len() - b.len()
}

/// Always activates a link with the largest immediate gain.
pub fn run_greedy_incremental(instance: &Instance, tie: TieRule) -> AlgorithmRun {
    let (state, schedule) = greedy_until_maximal(instance, tie, |state, links| {
        links
            .iter()
            .map(|&l| incremental_weight(state, l))
            .collect()
    });
    AlgorithmRun::new(Algorithm::GreedyIncremental, state, schedule)
}
