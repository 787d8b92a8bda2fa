use super::{greedy_until_maximal, Algorithm, AlgorithmRun, TieRule};
use crate::model::{gt_criterion, Instance, Link, SystemState};

/// Number of links that would exist right after activating `link`.
///
/// Only pairs touching `i` or `j` change: both endpoints end with the same
/// set `X`, so the pair itself disappears and each outside node `x` gains
/// two links or none depending on whether `X` and `O_x` satisfy the criterion.
pub fn links_after_activation(
    state: &SystemState,
    link: Link,
    degrees: &[usize],
    total: usize,
) -> usize {
    let sets = state.sets();
    let merged = sets[link.i()].union(&sets[link.j()]);
    let fresh = (0..sets.len())
        .filter(|&x| x != link.i() && x != link.j())
        .filter(|&x| gt_criterion(&merged, &sets[x]))
        .count();
    total + 1 + 2 * fresh - degrees[link.i()] - degrees[link.j()]
}

/// Activates the link that leaves the most links behind.
pub fn run_greedy_links(instance: &Instance, tie: TieRule) -> AlgorithmRun {
    let (state, schedule) = greedy_until_maximal(instance, tie, |state, links| {
        let mut degrees = vec![0; state.m()];
        for l in links {
            degrees[l.i()] += 1;
            degrees[l.j()] += 1;
        }
        links
            .iter()
            .map(|&l| links_after_activation(state, l, &degrees, links.len()))
            .collect()
    });
    AlgorithmRun::new(Algorithm::GreedyLinks, state, schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::random_instance;

    #[test]
    fn incremental_count_matches_simulation() {
        for seed in 0..200 {
            let inst = random_instance(seed, 2..=8, 1..=9);
            let state = inst.initial_state();
            let links = state.links();
            let mut degrees = vec![0; state.m()];
            for l in &links {
                degrees[l.i()] += 1;
                degrees[l.j()] += 1;
            }
            for &l in &links {
                let simulated = state.activate(l).unwrap().link_count();
                assert_eq!(
                    links_after_activation(&state, l, &degrees, links.len()),
                    simulated
                );
            }
        }
    }

    #[test]
    fn single_link_is_chosen() {
        let inst = crate::model::Instance::from_lists(
            4,
            &[vec![0], vec![1], vec![0, 1, 2]],
            crate::model::Validation::Strict,
        )
        .unwrap();
        let run = run_greedy_links(&inst, TieRule::LowestPair);
        assert_eq!(run.schedule.links(), vec![Link::new(0, 1).unwrap()]);
        assert_eq!(run.alpha, 7);
    }

    #[test]
    fn keeps_links_alive() {
        // (1,3) leaves two links, (2,3) leaves none
        let inst = crate::model::Instance::from_lists(
            4,
            &[vec![0], vec![0, 1], vec![2]],
            crate::model::Validation::Strict,
        )
        .unwrap();
        let run = run_greedy_links(&inst, TieRule::LowestPair);
        assert_eq!(run.schedule.links()[0], Link::new(0, 2).unwrap());
        assert_eq!(run.alpha, 8);
    }
}
