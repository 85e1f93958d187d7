//! List scheduling with a pluggable test policy, and the GCL expectations.
//!
//! Every job goes to the currently least loaded machine (lowest index on
//! ties). The only randomness in GCL is which component runs, so expected
//! values are exact weighted sums over components, always reduced in
//! component order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Decision, FixedInstance, Job, Observation, OnlineInstance, Schedule};
use crate::policy::{Mixture, Verdict};

/// Decides whether to test a job from what is observable on arrival.
pub trait TestPolicy {
    fn decide(&self, observation: Observation, index: usize) -> Verdict;
}

impl<F> TestPolicy for F
where
    F: Fn(Observation, usize) -> Verdict,
{
    fn decide(&self, observation: Observation, index: usize) -> Verdict {
        self(observation, index)
    }
}

/// Component `A_i` of a mixture, as a deterministic policy.
#[derive(Debug, Clone, Copy)]
pub struct Component<'a, M: Mixture + ?Sized> {
    mixture: &'a M,
    index: usize,
}

impl<'a, M: Mixture + ?Sized> Component<'a, M> {
    pub fn new(mixture: &'a M, index: usize) -> Result<Self> {
        if mixture.threshold_pair(index).is_none() {
            return Err(Error::ComponentIndex {
                index,
                max: mixture.components().saturating_sub(1),
            });
        }
        Ok(Component { mixture, index })
    }
}

impl<M: Mixture + ?Sized> TestPolicy for Component<'_, M> {
    fn decide(&self, observation: Observation, _index: usize) -> Verdict {
        self.mixture
            .decide(observation.ratio(), self.index)
            .expect("component index validated on construction")
    }
}

/// Tests job `j` iff `pattern[j]`.
#[derive(Debug, Clone)]
pub struct TestPattern(pub Vec<bool>);

impl TestPolicy for TestPattern {
    fn decide(&self, _observation: Observation, index: usize) -> Verdict {
        if self.0[index] {
            Verdict::Test
        } else {
            Verdict::Skip
        }
    }
}

/// The outcome of running an algorithm: the resolved instance and the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Played {
    pub instance: FixedInstance,
    pub schedule: Schedule,
}

impl Played {
    pub fn loads(&self) -> Vec<f64> {
        self.schedule
            .loads(&self.instance)
            .expect("played schedules are consistent")
    }

    pub fn makespan(&self) -> f64 {
        self.loads().into_iter().fold(0.0, f64::max)
    }

    pub fn min_load(&self) -> f64 {
        self.loads().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn record(&self) -> ScheduleRecord {
        ScheduleRecord {
            placements: self.schedule.placements.clone(),
            makespan: self.makespan(),
        }
    }
}

/// Wire form of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleRecord {
    pub placements: Vec<Decision>,
    pub makespan: f64,
}

/// Lowest-index machine among those with minimum load.
pub fn least_loaded(loads: &[f64]) -> usize {
    let mut best = 0;
    for (k, &load) in loads.iter().enumerate().skip(1) {
        if load < loads[best] {
            best = k;
        }
    }
    best
}

/// Runs list scheduling with `policy` against a fixed instance or a game.
///
/// For a game, a tested job's processing time is revealed by the adversary
/// from the actual decisions so far plus the policy's own continuation. The
/// continuation charges later tested jobs `t + u` provisionally; the built-in
/// adversary rules read only the decisions, never those provisional charges.
pub fn list_schedule<I, P>(instance: &I, policy: &P) -> Played
where
    I: OnlineInstance + ?Sized,
    P: TestPolicy + ?Sized,
{
    let m = instance.machines();
    let n = instance.num_jobs();
    let mut loads = vec![0.0; m];
    let mut history = Vec::with_capacity(n);
    for j in 0..n {
        let obs = instance.observe(j, &history);
        let tested = policy.decide(obs, j) == Verdict::Test;
        let machine = least_loaded(&loads);
        history.push(Decision::new(machine, tested));
        loads[machine] += if tested {
            let completion = continuation(instance, policy, &history, &loads);
            obs.t + instance.respond(j, &completion)
        } else {
            obs.u
        };
    }
    let realized = instance
        .realize(&history)
        .expect("list scheduling produces a complete, in-range history");
    Played {
        schedule: Schedule::new(m, history),
        instance: realized,
    }
}

fn continuation<I, P>(instance: &I, policy: &P, prefix: &[Decision], loads: &[f64]) -> Vec<Decision>
where
    I: OnlineInstance + ?Sized,
    P: TestPolicy + ?Sized,
{
    let mut history = prefix.to_vec();
    let mut loads = loads.to_vec();
    for j in prefix.len()..instance.num_jobs() {
        let obs = instance.observe(j, &history);
        let tested = policy.decide(obs, j) == Verdict::Test;
        let machine = least_loaded(&loads);
        history.push(Decision::new(machine, tested));
        loads[machine] += if tested { obs.t + obs.u } else { obs.u };
    }
    history
}

/// Schedules produced by every component, in component order.
pub fn gcl_components<I, M>(instance: &I, mixture: &M) -> Vec<Played>
where
    I: OnlineInstance + ?Sized,
    M: Mixture + ?Sized,
{
    (0..mixture.components())
        .map(|i| {
            let policy = Component::new(mixture, i).expect("index in range");
            list_schedule(instance, &policy)
        })
        .collect()
}

/// Makespan `C^{A_i}` of component `i`.
pub fn component_makespan<I, M>(instance: &I, i: usize, mixture: &M) -> Result<f64>
where
    I: OnlineInstance + ?Sized,
    M: Mixture + ?Sized,
{
    let policy = Component::new(mixture, i)?;
    Ok(list_schedule(instance, &policy).makespan())
}

/// Exact expected makespan: the weighted sum of component makespans.
pub fn gcl_expected_makespan<I, M>(instance: &I, mixture: &M) -> f64
where
    I: OnlineInstance + ?Sized,
    M: Mixture + ?Sized,
{
    weighted_sum(
        &mixture.weights(),
        gcl_components(instance, mixture).iter().map(Played::makespan),
    )
}

/// Expected time GCL spends on a single job.
pub fn expected_job_time<M: Mixture + ?Sized>(job: &Job, mixture: &M) -> f64 {
    let r = job.observation().ratio();
    weighted_sum(
        &mixture.weights(),
        (0..mixture.components()).map(|i| {
            let tested = mixture.decide(r, i).expect("index in range") == Verdict::Test;
            job.charged(tested)
        }),
    )
}

pub(crate) fn weighted_sum(weights: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    weights.iter().zip(values).fold(0.0, |acc, (w, v)| acc + w * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{phi, revised_two_machine_params, thresholds};

    fn job(u: f64, t: f64, p: f64) -> Job {
        Job::new(u, t, p).unwrap()
    }

    fn tight_instance() -> FixedInstance {
        let x1 = revised_two_machine_params().x1;
        FixedInstance::new(
            2,
            vec![job(x1, 1.0, 0.0), job(x1, 1.0, 0.0), job(2.0 * x1, 2.0, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn least_loaded_breaks_ties_low() {
        assert_eq!(least_loaded(&[1.0, 0.0, 0.0]), 1);
        assert_eq!(least_loaded(&[0.0, 0.0]), 0);
        assert_eq!(least_loaded(&[3.0, 2.0, 1.0]), 2);
    }

    #[test]
    fn empty_instance_has_zero_makespan() {
        let inst = FixedInstance::new(3, vec![]).unwrap();
        let played = list_schedule(&inst, &|_: Observation, _| Verdict::Test);
        assert_eq!(played.makespan(), 0.0);
    }

    #[test]
    fn revised_components_skip_everything_on_tight_instance() {
        let params = revised_two_machine_params();
        let inst = tight_instance();
        for played in gcl_components(&inst, &params) {
            assert!(played.schedule.placements.iter().all(|d| !d.tested));
            let machines: Vec<_> = played.schedule.placements.iter().map(|d| d.machine).collect();
            assert_eq!(machines, vec![0, 1, 0]);
            assert!((played.makespan() - 3.0 * params.x1).abs() < 1e-12);
        }
        let expected = gcl_expected_makespan(&inst, &params);
        assert!((expected - 4.3676603).abs() < 5e-8);
        assert!((expected - 3.0 * params.x1).abs() < 1e-12);
    }

    #[test]
    fn component_makespans_single_job() {
        let params = thresholds(2, 1).unwrap();
        let inst = FixedInstance::new(2, vec![job(2.0, 1.0, 0.0)]).unwrap();
        assert_eq!(component_makespan(&inst, 0, &params).unwrap(), 1.0);
        assert_eq!(component_makespan(&inst, 1, &params).unwrap(), 2.0);
        assert!(component_makespan(&inst, 2, &params).is_err());
        let expected = gcl_expected_makespan(&inst, &params);
        assert!((expected - (2.0 - params.alpha)).abs() < 1e-15);
        assert!((expected - 1.2470622).abs() < 5e-8);
    }

    #[test]
    fn expected_job_time_examples() {
        let revised = revised_two_machine_params();
        let e = expected_job_time(&job(2.0, 1.0, 0.0), &revised);
        assert!((e - (3.0 - phi())).abs() < 1e-15);
        assert!((e - 1.3819660).abs() < 5e-8);

        let params = thresholds(2, 1).unwrap();
        let e = expected_job_time(&job(2.0, 1.0, 2.0), &params);
        assert!((e - (2.0 + params.alpha)).abs() < 1e-15);
        assert!((e - 2.7529378).abs() < 5e-8);

        let small = job(0.9, 1.0, 0.3);
        assert!((expected_job_time(&small, &params) - 0.9).abs() < 1e-15);
        assert!((expected_job_time(&small, &revised) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn deterministic_runs() {
        let params = thresholds(3, 2).unwrap();
        let inst = FixedInstance::new(
            3,
            (1..9)
                .map(|k| job(f64::from(k), 1.0 + f64::from(k % 3), f64::from(k) / 2.0))
                .collect(),
        )
        .unwrap();
        assert_eq!(gcl_components(&inst, &params), gcl_components(&inst, &params));
    }

    #[test]
    fn record_json_shape() {
        let inst = FixedInstance::new(2, vec![job(2.0, 1.0, 0.0)]).unwrap();
        let played = list_schedule(&inst, &TestPattern(vec![true]));
        let text = serde_json::to_string(&played.record()).unwrap();
        assert_eq!(
            text,
            r#"{"placements":[{"machine":0,"tested":true}],"makespan":1.0}"#
        );
    }
}
