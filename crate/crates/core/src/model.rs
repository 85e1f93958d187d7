//! Jobs, instances and schedules.
//!
//! A job is the triple `(u, t, p)`: an upper bound `u` on its processing time,
//! the length `t` of its testing operation, and the true processing time `p`
//! that stays hidden from an online algorithm until the job is tested. Running
//! a job untested costs `u`; testing it costs `t + p` on the same machine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A job `(u, t, p)` with `0 <= p <= u` and `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJob")]
pub struct Job {
    pub u: f64,
    pub t: f64,
    pub p: f64,
}

#[derive(Deserialize)]
struct RawJob {
    u: f64,
    t: f64,
    p: f64,
}

impl TryFrom<RawJob> for Job {
    type Error = Error;

    fn try_from(raw: RawJob) -> Result<Self> {
        Job::new(raw.u, raw.t, raw.p)
    }
}

impl Job {
    pub fn new(u: f64, t: f64, p: f64) -> Result<Self> {
        let invalid = |reason| Error::InvalidJob { u, t, p, reason };
        if !(u.is_finite() && t.is_finite() && p.is_finite()) {
            return Err(invalid("values must be finite"));
        }
        if u < 0.0 || t < 0.0 || p < 0.0 {
            return Err(invalid("values must be nonnegative"));
        }
        if p > u {
            return Err(invalid("processing time exceeds its upper bound"));
        }
        Ok(Job { u, t, p })
    }

    /// The part of the job an online algorithm sees on arrival.
    pub fn observation(&self) -> Observation {
        Observation {
            u: self.u,
            t: self.t,
        }
    }

    /// Offline cost `min(u, t + p)`.
    pub fn rho(&self) -> f64 {
        rho(self)
    }

    /// Time spent on the job by an algorithm that tests it or not.
    pub fn charged(&self, tested: bool) -> f64 {
        if tested {
            self.t + self.p
        } else {
            self.u
        }
    }
}

/// Offline cost of a job: the cheaper of running untested and testing.
pub fn rho(job: &Job) -> f64 {
    job.u.min(job.t + job.p)
}

/// The observable pair `(u, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub u: f64,
    pub t: f64,
}

impl Observation {
    pub fn new(u: f64, t: f64) -> Self {
        Observation { u, t }
    }

    /// `u / t`, or `+inf` when testing is free.
    pub fn ratio(&self) -> f64 {
        if self.t > 0.0 {
            self.u / self.t
        } else {
            f64::INFINITY
        }
    }

    /// A job with `u = t = 0` costs nothing however it is handled.
    pub fn is_void(&self) -> bool {
        self.u == 0.0 && self.t == 0.0
    }

    pub(crate) fn key(&self) -> (u64, u64) {
        (self.u.to_bits(), self.t.to_bits())
    }
}

/// One irrevocable online decision: where the job runs and whether it is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decision {
    pub machine: usize,
    pub tested: bool,
}

impl Decision {
    pub fn new(machine: usize, tested: bool) -> Self {
        Decision { machine, tested }
    }
}

/// A fully specified instance; arrival order is list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFixedInstance", deny_unknown_fields)]
pub struct FixedInstance {
    pub m: usize,
    pub jobs: Vec<Job>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixedInstance {
    m: usize,
    jobs: Vec<Job>,
}

impl TryFrom<RawFixedInstance> for FixedInstance {
    type Error = Error;

    fn try_from(raw: RawFixedInstance) -> Result<Self> {
        FixedInstance::new(raw.m, raw.jobs)
    }
}

impl FixedInstance {
    pub fn new(m: usize, jobs: Vec<Job>) -> Result<Self> {
        if m == 0 {
            return Err(Error::TooFewMachines { min: 1, got: m });
        }
        for job in &jobs {
            Job::new(job.u, job.t, job.p)?;
        }
        Ok(FixedInstance { m, jobs })
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.jobs.iter().map(rho).collect()
    }
}

/// Machine and test flag for every job, in arrival order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub m: usize,
    pub placements: Vec<Decision>,
}

impl Schedule {
    pub fn new(m: usize, placements: Vec<Decision>) -> Self {
        Schedule { m, placements }
    }

    /// Per-machine load, summed in arrival order.
    pub fn loads(&self, instance: &FixedInstance) -> Result<Vec<f64>> {
        if self.placements.len() != instance.len() {
            return Err(Error::DimensionMismatch {
                expected: instance.len(),
                got: self.placements.len(),
            });
        }
        let mut loads = vec![0.0; self.m];
        for (j, (d, job)) in self.placements.iter().zip(&instance.jobs).enumerate() {
            if d.machine >= self.m {
                return Err(Error::MachineOutOfRange {
                    job: j,
                    machine: d.machine,
                    m: self.m,
                });
            }
            loads[d.machine] += job.charged(d.tested);
        }
        Ok(loads)
    }

    pub fn makespan(&self, instance: &FixedInstance) -> Result<f64> {
        Ok(self.loads(instance)?.into_iter().fold(0.0, f64::max))
    }

    /// Smallest machine load, `C_min`.
    pub fn min_load(&self, instance: &FixedInstance) -> Result<f64> {
        Ok(self
            .loads(instance)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }
}

pub fn makespan(schedule: &Schedule, instance: &FixedInstance) -> Result<f64> {
    schedule.makespan(instance)
}

/// Anything an online algorithm can be run against: a fixed instance or an
/// adversary that picks hidden processing times from the decision history.
pub trait OnlineInstance {
    fn machines(&self) -> usize;

    fn num_jobs(&self) -> usize;

    /// `(u, t)` of job `index`, given the decisions for jobs `0..index`.
    fn observe(&self, index: usize, history: &[Decision]) -> Observation;

    /// The processing time revealed when job `index` is tested. `completion`
    /// is a full decision sequence whose first `index + 1` entries are the
    /// actual decisions; later entries are the algorithm's hypothetical
    /// continuation.
    fn respond(&self, index: usize, completion: &[Decision]) -> f64;

    /// Resolve every hidden value for a complete decision history.
    fn realize(&self, history: &[Decision]) -> Result<FixedInstance>;

    /// `(u, t)` for every job when they do not depend on the history.
    fn static_observations(&self) -> Option<Vec<Observation>>;
}

impl OnlineInstance for FixedInstance {
    fn machines(&self) -> usize {
        self.m
    }

    fn num_jobs(&self) -> usize {
        self.len()
    }

    fn observe(&self, index: usize, _history: &[Decision]) -> Observation {
        self.jobs[index].observation()
    }

    fn respond(&self, index: usize, _completion: &[Decision]) -> f64 {
        self.jobs[index].p
    }

    fn realize(&self, history: &[Decision]) -> Result<FixedInstance> {
        if history.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: history.len(),
            });
        }
        Ok(self.clone())
    }

    fn static_observations(&self) -> Option<Vec<Observation>> {
        Some(self.jobs.iter().map(Job::observation).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(u: f64, t: f64, p: f64) -> Job {
        Job::new(u, t, p).unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&job(2.0, 1.0, 0.0)), 1.0);
        assert_eq!(rho(&job(2.0, 1.0, 2.0)), 2.0);
        assert_eq!(rho(&job(0.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn rejects_invalid_jobs() {
        assert!(Job::new(1.0, 1.0, 1.5).is_err());
        assert!(Job::new(-1.0, 1.0, 0.0).is_err());
        assert!(Job::new(1.0, f64::NAN, 0.0).is_err());
        assert!(serde_json::from_str::<Job>(r#"{"u":1,"t":1,"p":2}"#).is_err());
    }

    #[test]
    fn free_test_charges_exactly_p() {
        let j = job(5.0, 0.0, 3.25);
        assert_eq!(j.charged(true), 3.25);
        assert_eq!(j.observation().ratio(), f64::INFINITY);
    }

    #[test]
    fn makespan_of_three_untested_unit_jobs() {
        let inst = FixedInstance::new(2, vec![job(1.0, 1.0, 0.0); 3]).unwrap();
        let s = Schedule::new(
            2,
            vec![
                Decision::new(0, false),
                Decision::new(1, false),
                Decision::new(0, false),
            ],
        );
        assert_eq!(makespan(&s, &inst).unwrap(), 2.0);
        assert_eq!(s.min_load(&inst).unwrap(), 1.0);
    }

    #[test]
    fn single_tested_job() {
        let inst = FixedInstance::new(2, vec![job(2.0, 1.0, 0.0)]).unwrap();
        for machine in 0..2 {
            let s = Schedule::new(2, vec![Decision::new(machine, true)]);
            assert_eq!(makespan(&s, &inst).unwrap(), 1.0);
        }
    }

    #[test]
    fn placement_out_of_range() {
        let inst = FixedInstance::new(2, vec![job(1.0, 1.0, 0.0)]).unwrap();
        let s = Schedule::new(2, vec![Decision::new(2, false)]);
        assert!(matches!(
            makespan(&s, &inst),
            Err(Error::MachineOutOfRange { machine: 2, .. })
        ));
    }

    #[test]
    fn instance_json_round_trip() {
        let text = r#"{"m":2,"jobs":[{"u":2.0,"t":1.0,"p":0.0}]}"#;
        let inst: FixedInstance = serde_json::from_str(text).unwrap();
        assert_eq!(inst.m, 2);
        assert_eq!(serde_json::to_string(&inst).unwrap(), text);
        assert!(serde_json::from_str::<FixedInstance>(r#"{"m":0,"jobs":[]}"#).is_err());
    }
}
