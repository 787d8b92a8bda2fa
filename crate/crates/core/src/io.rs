//! JSON file formats. Node and segment ids on disk are 1-based.
//!
//! Instance: `{"m":4,"n":5,"sets":[[1,2],[2,3],[3,4],[4,5]]}`
//!
//! Schedule: `{"steps":[[1,3],[1,2],[2,4]]}`

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algorithms::AlgorithmRun;
use crate::error::{Error, Result};
use crate::model::{upper_bound, Instance, Link, Schedule, SystemState, Validation};
use crate::segset::SegmentSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub m: usize,
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            m: instance.m(),
            n: instance.n(),
            sets: instance
                .initial_sets()
                .iter()
                .map(SegmentSet::to_one_based)
                .collect(),
        }
    }

    pub fn to_instance(&self, validation: Validation) -> Result<Instance> {
        if self.sets.len() != self.m {
            return Err(Error::SetCountMismatch {
                expected: self.m,
                found: self.sets.len(),
            });
        }
        if self.n == 0 {
            return Err(Error::EmptyUniverse);
        }
        let mut sets = Vec::with_capacity(self.m);
        for (node, ids) in self.sets.iter().enumerate() {
            for w in ids.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::UnsortedSegments {
                        node,
                        prev: w[0],
                        next: w[1],
                    });
                }
            }
            if let Some(&bad) = ids.iter().find(|&&id| id == 0 || id > self.n) {
                return Err(Error::SegmentOutOfRange {
                    segment: bad.wrapping_sub(1),
                    n: self.n,
                });
            }
            sets.push(SegmentSet::from_indices(
                self.n,
                ids.iter().map(|id| id - 1),
            )?);
        }
        Instance::new(self.n, sets, validation)
    }
}

pub fn parse_instance(text: &str, validation: Validation) -> Result<Instance> {
    serde_json::from_str::<InstanceFile>(text)?.to_instance(validation)
}

pub fn read_instance(path: &Path, validation: Validation) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?, validation)
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string(&InstanceFile::from_instance(instance)).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub steps: Vec<[usize; 2]>,
}

impl ScheduleFile {
    pub fn from_links(links: &[Link]) -> Self {
        ScheduleFile {
            steps: links.iter().map(Link::one_based).collect(),
        }
    }

    /// 0-based links; node ids are range-checked against `m`.
    pub fn to_links(&self, m: usize) -> Result<Vec<Link>> {
        self.steps
            .iter()
            .map(|&[a, b]| {
                for id in [a, b] {
                    if id == 0 || id > m {
                        return Err(Error::NodeOutOfRange {
                            node: id.wrapping_sub(1),
                            m,
                        });
                    }
                }
                Link::new(a - 1, b - 1)
            })
            .collect()
    }
}

pub fn parse_schedule(text: &str, m: usize) -> Result<Vec<Link>> {
    serde_json::from_str::<ScheduleFile>(text)?.to_links(m)
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub link: [usize; 2],
    pub gained_i: Vec<usize>,
    pub gained_j: Vec<usize>,
}

/// What `run` prints: the schedule plus its self-certifying trace.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub algorithm: Option<String>,
    pub alpha: usize,
    pub upper_bound: usize,
    pub maximal: bool,
    pub steps: Vec<[usize; 2]>,
    pub trace: Vec<TraceStep>,
    pub final_sets: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    pub post_sweep_steps: usize,
}

impl RunReport {
    pub fn new(instance: &Instance, schedule: &Schedule, state: &SystemState) -> Self {
        RunReport {
            algorithm: None,
            alpha: state.aggregate_cardinality(),
            upper_bound: upper_bound(instance),
            maximal: state.is_maximal(),
            steps: schedule.links().iter().map(Link::one_based).collect(),
            trace: schedule
                .steps()
                .iter()
                .map(|s| TraceStep {
                    link: s.link.one_based(),
                    gained_i: s.gained_i.to_one_based(),
                    gained_j: s.gained_j.to_one_based(),
                })
                .collect(),
            final_sets: state.sets().iter().map(SegmentSet::to_one_based).collect(),
            rounds: None,
            post_sweep_steps: 0,
        }
    }

    pub fn from_run(instance: &Instance, run: &AlgorithmRun) -> Self {
        let mut report = Self::new(instance, &run.schedule, &run.final_state);
        report.algorithm = Some(run.algorithm.id().to_string());
        report.rounds = run.rounds;
        report.post_sweep_steps = run.post_sweep_steps;
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::apply_schedule;
    use proptest::prelude::*;

    const EXAMPLE: &str = r#"{"m":4,"n":5,"sets":[[1,2],[2,3],[3,4],[4,5]]}"#;

    #[test]
    fn parses_example() {
        let inst = parse_instance(EXAMPLE, Validation::Strict).unwrap();
        assert_eq!(inst.m(), 4);
        assert_eq!(
            inst.initial_sets()[0].iter().collect::<Vec<_>>(),
            vec![0, 1]
        );
        assert_eq!(instance_to_json(&inst), EXAMPLE);
    }

    #[test]
    fn rejects_malformed_instances() {
        let bad = |t: &str| parse_instance(t, Validation::Strict).unwrap_err();
        assert!(matches!(
            bad(r#"{"m":3,"n":5,"sets":[[1],[2]]}"#),
            Error::SetCountMismatch { .. }
        ));
        assert!(matches!(
            bad(r#"{"m":2,"n":5,"sets":[[1,1],[2]]}"#),
            Error::UnsortedSegments { .. }
        ));
        assert!(matches!(
            bad(r#"{"m":2,"n":5,"sets":[[2,1],[2]]}"#),
            Error::UnsortedSegments { .. }
        ));
        assert!(matches!(
            bad(r#"{"m":2,"n":5,"sets":[[6],[2]]}"#),
            Error::SegmentOutOfRange { .. }
        ));
        assert!(matches!(
            bad(r#"{"m":2,"n":5,"sets":[[0],[2]]}"#),
            Error::SegmentOutOfRange { .. }
        ));
        assert!(matches!(
            bad(r#"{"m":2,"n":5000,"sets":[[1],[2]]}"#),
            Error::UniverseTooLarge { .. }
        ));
        assert!(matches!(
            bad(r#"{"m":2,"n":2,"sets":[[1,2],[2]]}"#),
            Error::FullInitialSet(0)
        ));
        assert!(matches!(
            bad(r#"{"m":2,"n":2,"sets":[[1,2],[2]],"k":1}"#),
            Error::Json(_)
        ));
        assert!(parse_instance(r#"{"m":2,"n":2,"sets":[[1,2],[2]]}"#, Validation::Relaxed).is_ok());
    }

    #[test]
    fn schedule_file_is_one_based() {
        let links = parse_schedule(r#"{"steps":[[1,3],[1,2],[2,4]]}"#, 4).unwrap();
        assert_eq!(links[0], Link::new(0, 2).unwrap());
        assert_eq!(
            serde_json::to_string(&ScheduleFile::from_links(&links)).unwrap(),
            r#"{"steps":[[1,3],[1,2],[2,4]]}"#
        );
        assert!(matches!(
            parse_schedule(r#"{"steps":[[1,5]]}"#, 4),
            Err(Error::NodeOutOfRange { .. })
        ));
        assert!(matches!(
            parse_schedule(r#"{"steps":[[2,2]]}"#, 4),
            Err(Error::SelfLink(1))
        ));
    }

    #[test]
    fn report_trace_is_one_based() {
        let inst = parse_instance(EXAMPLE, Validation::Strict).unwrap();
        let (state, sched) = apply_schedule(&inst, &[Link::new(0, 1).unwrap()]).unwrap();
        let report = RunReport::new(&inst, &sched, &state);
        assert_eq!(report.trace[0].link, [1, 2]);
        assert_eq!(report.trace[0].gained_i, vec![3]);
        assert_eq!(report.trace[0].gained_j, vec![1]);
        assert_eq!(report.final_sets[0], vec![1, 2, 3]);
    }

    proptest! {
        #[test]
        fn instance_file_round_trip(n in 2usize..40, raw in proptest::collection::vec(proptest::collection::btree_set(1usize..40, 1..6), 2..7)) {
            let sets: Vec<Vec<usize>> = raw.into_iter().map(|s| s.into_iter().filter(|&x| x <= n).collect()).collect();
            let file = InstanceFile { m: sets.len(), n, sets };
            let inst = file.to_instance(Validation::Relaxed).unwrap();
            prop_assert_eq!(InstanceFile::from_instance(&inst), file);
        }
    }
}
