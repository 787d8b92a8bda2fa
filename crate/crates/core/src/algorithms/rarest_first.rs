use super::{greedy_until_maximal, Algorithm, AlgorithmRun, TieRule};
use crate::model::{Instance, Link, SystemState};

/// Number of nodes currently holding each segment.
fn holder_counts(state: &SystemState) -> Vec<usize> {
    let n = state.sets()[0].universe();
    let mut counts = vec![0; n];
    for set in state.sets() {
        for seg in set {
            counts[seg] += 1;
        }
    }
    counts
}

/// Preference row for `link`, compared lexicographically (larger wins).
///
/// Entry 0 is 1 when the exchange would *not* hand the whole universe to the
/// pair. Entry `p` (1..=m) counts segments currently held by exactly `p`
/// nodes that one endpoint holds and the other lacks, i.e. how much the
/// exchange raises availability of that rarity class.
pub fn preference_row(state: &SystemState, link: Link) -> Vec<usize> {
    row_with_counts(state, link, &holder_counts(state))
}

fn row_with_counts(state: &SystemState, link: Link, counts: &[usize]) -> Vec<usize> {
    let m = state.m();
    let (a, b) = (&state.sets()[link.i()], &state.sets()[link.j()]);
    let mut row = vec![0; m + 1];
    row[0] = usize::from(a.union_len(b) != a.universe());
    for seg in &a.symmetric_difference(b) {
        row[counts[seg]] += 1;
    }
    row
}

pub fn run_rarest_first(instance: &Instance, tie: TieRule) -> AlgorithmRun {
    let (state, schedule) = greedy_until_maximal(instance, tie, |state, links| {
        let counts = holder_counts(state);
        links
            .iter()
            .map(|&l| row_with_counts(state, l, &counts))
            .collect()
    });
    AlgorithmRun::new(Algorithm::RarestFirst, state, schedule)
}
