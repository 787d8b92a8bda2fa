use super::{Algorithm, AlgorithmRun};
use crate::model::{Instance, Link, Recorder, SystemState};
use crate::segset::SegmentSet;

/// Greedy single pass, ascending node index, building a set of nodes that
/// are pairwise linked.
///
/// Node `i` is admitted when it brings a segment outside the union of the
/// members so far and every member keeps a segment outside `O_i`.
pub fn find_unique_set(state: &SystemState) -> Vec<usize> {
    let sets = state.sets();
    let mut members: Vec<usize> = Vec::new();
    let mut covered = SegmentSet::empty(sets[0].universe());
    for (i, set) in sets.iter().enumerate() {
        let contributes = set.has_any_outside(&covered);
        let keeps_others = members.iter().all(|&j| sets[j].has_any_outside(set));
        if contributes && keeps_others {
            members.push(i);
            covered.union_with(set);
        }
    }
    members
}

/// Starting permutation: most unique segments first, fewest rightmost,
/// ties by ascending node index.
fn starting_order(state: &SystemState, members: &[usize]) -> Vec<usize> {
    let sets = state.sets();
    let unique = |i: usize| {
        let mut others = SegmentSet::empty(sets[i].universe());
        for &j in members.iter().filter(|&&j| j != i) {
            others.union_with(&sets[j]);
        }
        sets[i].difference_len(&others)
    };
    let mut order: Vec<(usize, usize)> = members.iter().map(|&i| (unique(i), i)).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    order.into_iter().map(|(_, i)| i).collect()
}

/// Shifted round-robin over the unique set.
///
/// Each pass pairs neighbours `(1,2), (3,4), …` of the current permutation,
/// left-rotates it, and repeats for `⌊(|M^U|−1)/2⌋ + 1` rounds; pairs whose
/// link has already vanished are skipped. The unique set is then recomputed
/// and passes continue while it has at least two members. Any links left
/// among the remaining nodes are finally activated lowest pair first, so the
/// run always ends maximal; those activations are counted in
/// `post_sweep_steps`.
pub fn run_polygon(instance: &Instance) -> AlgorithmRun {
    let mut rec = Recorder::new(instance);
    let mut passes = 0;

    loop {
        let members = find_unique_set(&rec.state);
        if members.len() < 2 {
            break;
        }
        passes += 1;
        let before = rec.state.step();
        let mut order = starting_order(&rec.state, &members);
        let rounds = (members.len() - 1) / 2 + 1;
        for _ in 0..rounds {
            for pair in order.chunks_exact(2) {
                let link = Link::new(pair[0], pair[1]).expect("distinct members");
                if rec.state.linked(link) {
                    rec.activate(link).expect("link checked");
                }
            }
            order.rotate_left(1);
        }
        // members are pairwise linked, so the first pair always exchanges
        assert!(rec.state.step() > before, "polygon pass made no progress");
    }

    let mut sweep = 0;
    while let Some(&link) = rec.state.links().first() {
        rec.activate(link).expect("available link");
        sweep += 1;
    }

    let mut run = AlgorithmRun::new(Algorithm::Polygon, rec.state, rec.schedule);
    run.rounds = Some(passes);
    run.post_sweep_steps = sweep;
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Validation;

    fn singletons(m: usize) -> Instance {
        let lists: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
        Instance::from_lists(m, &lists, Validation::Strict).unwrap()
    }

    #[test]
    fn unique_set_examples() {
        let s = Instance::from_lists(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], Validation::Strict)
            .unwrap()
            .initial_state();
        assert_eq!(find_unique_set(&s), vec![0, 1]);

        let s = Instance::from_lists(
            6,
            &[vec![0, 1], vec![2], vec![3, 4, 5]],
            Validation::Relaxed,
        )
        .unwrap()
        .initial_state();
        assert_eq!(find_unique_set(&s), vec![0, 1, 2]);

        let s = Instance::from_lists(2, &[vec![0], vec![0]], Validation::Strict)
            .unwrap()
            .initial_state();
        assert_eq!(find_unique_set(&s), vec![0]);
    }

    #[test]
    fn even_singletons_all_get_universe() {
        let run = run_polygon(&singletons(4));
        assert_eq!(run.alpha, 16);
        assert!(run.final_state.sets().iter().all(SegmentSet::is_full));
        assert_eq!(run.post_sweep_steps, 0);
    }

    #[test]
    fn odd_singletons_leave_one_node_short() {
        let run = run_polygon(&singletons(7));
        assert_eq!(run.alpha, 48);
        assert_eq!(
            run.final_state
                .sets()
                .iter()
                .filter(|s| !s.is_full())
                .count(),
            1
        );
        assert_eq!(run.rounds, Some(1));
    }

    #[test]
    fn nested_pair_has_no_rounds() {
        let inst = Instance::from_lists(2, &[vec![0], vec![0, 1]], Validation::Relaxed).unwrap();
        let run = run_polygon(&inst);
        assert_eq!(run.rounds, Some(0));
        assert!(run.schedule.is_empty());
        assert_eq!(run.alpha, 3);
    }

    #[test]
    fn fewest_unique_segments_go_last() {
        let inst =
            Instance::from_lists(6, &[vec![0], vec![1, 2, 3], vec![4, 5]], Validation::Strict)
                .unwrap();
        let s = inst.initial_state();
        assert_eq!(starting_order(&s, &[0, 1, 2]), vec![1, 2, 0]);
    }

    #[test]
    fn sweep_finishes_excluded_nodes() {
        // node 3 ({1,3}) is rejected by the scan but still linked afterwards
        let inst = Instance::from_lists(
            4,
            &[vec![0, 1], vec![1, 2], vec![0, 2], vec![3]],
            Validation::Strict,
        )
        .unwrap();
        let run = run_polygon(&inst);
        assert!(run.final_state.is_maximal());
    }
}
