//! Adaptive adversaries and randomized instances.
//!
//! An adaptive game hides the processing times until the algorithm's
//! decisions are known. Every rule here is a pure function of the decision
//! history: against a deterministic algorithm the adversary can simulate the
//! whole run, so "respond" is just "finalize" evaluated on the run.

use serde::{Deserialize, Serialize};

use crate::adversary::GameConstants;
use crate::error::{Error, Result};
use crate::model::{Decision, FixedInstance, Job, Observation, OnlineInstance};
use crate::policy::phi;

/// How the adversary resolves hidden processing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryRule {
    /// The first job placed on a machine whose load already reaches `m - 1`
    /// gets `p = m - 1`; every other job gets `p = 0`.
    ForcedTest,
    /// The first `prefix` jobs share `(u, t)`. The first two untested among
    /// them get `p = 0`; if fewer than two are untested, the remaining zeros
    /// go to the latest tested ones. All other prefix jobs get `p = u`.
    /// Jobs after the prefix have the fixed processing times `tail_p`.
    Indistinguishable { prefix: usize, tail_p: Vec<f64> },
    /// Three-job two-machine game: `p = u` when tested, `0` otherwise, with
    /// later `(u, t)` values depending on the first two decisions.
    TwoMachineDeterministic,
}

/// An instance whose hidden values are chosen by an adversary rule.
///
/// `observed` holds the nominal `(u, t)` sequence. For
/// [`AdversaryRule::TwoMachineDeterministic`] it is the branch where job 1 is
/// untested, job 2 is tested and the two sit on different machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveGame {
    pub m: usize,
    pub observed: Vec<Observation>,
    pub rule: AdversaryRule,
}

impl AdaptiveGame {
    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    pub fn rule_id(&self) -> &'static str {
        match self.rule {
            AdversaryRule::ForcedTest => "forced_test",
            AdversaryRule::Indistinguishable { .. } => "indistinguishable",
            AdversaryRule::TwoMachineDeterministic => "two_machine_deterministic",
        }
    }

    fn check_history(&self, history: &[Decision]) -> Result<()> {
        if history.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: history.len(),
            });
        }
        for (job, d) in history.iter().enumerate() {
            if d.machine >= self.m {
                return Err(Error::MachineOutOfRange {
                    job,
                    machine: d.machine,
                    m: self.m,
                });
            }
        }
        Ok(())
    }

    /// Full processing-time vector for a complete decision history.
    pub fn finalize(&self, history: &[Decision]) -> Result<Vec<f64>> {
        self.check_history(history)?;
        Ok(match &self.rule {
            AdversaryRule::ForcedTest => self.finalize_forced(history),
            AdversaryRule::Indistinguishable { prefix, tail_p } => {
                self.finalize_indistinguishable(history, *prefix, tail_p)
            }
            AdversaryRule::TwoMachineDeterministic => (0..self.len())
                .map(|j| {
                    if history[j].tested {
                        self.observe(j, history).u
                    } else {
                        0.0
                    }
                })
                .collect(),
        })
    }

    fn finalize_forced(&self, history: &[Decision]) -> Vec<f64> {
        let level = (self.m - 1) as f64;
        let mut loads = vec![0.0; self.m];
        let mut placed_large = false;
        let mut p = Vec::with_capacity(self.len());
        for (obs, d) in self.observed.iter().zip(history) {
            let pj = if !placed_large && loads[d.machine] >= level {
                placed_large = true;
                level
            } else {
                0.0
            };
            loads[d.machine] += if d.tested { obs.t + pj } else { obs.u };
            p.push(pj);
        }
        p
    }

    fn finalize_indistinguishable(
        &self,
        history: &[Decision],
        prefix: usize,
        tail_p: &[f64],
    ) -> Vec<f64> {
        let mut p: Vec<f64> = self.observed[..prefix].iter().map(|o| o.u).collect();
        let mut zeros = 0;
        for j in 0..prefix {
            if zeros < 2 && !history[j].tested {
                p[j] = 0.0;
                zeros += 1;
            }
        }
        for j in (0..prefix).rev() {
            if zeros == 2 {
                break;
            }
            if history[j].tested {
                p[j] = 0.0;
                zeros += 1;
            }
        }
        p.extend_from_slice(tail_p);
        p
    }

    fn observe_two_machine(&self, index: usize, history: &[Decision]) -> Observation {
        let c = GameConstants::new();
        let phi = phi();
        let scale = if history[0].tested { phi } else { 1.0 };
        match index {
            0 => Observation::new(phi, 1.0),
            1 => Observation::new(scale * (phi - c.thm6_x0), scale * c.thm6_x0),
            _ => {
                let (x0, y0) = (c.thm6_x0, c.thm6_y0);
                if history[1].machine == history[0].machine {
                    Observation::new(0.0, 0.0)
                } else if history[1].tested {
                    Observation::new(scale * y0, scale * (phi + 1.0 - x0))
                } else {
                    Observation::new(
                        scale * (1.0 + phi) * y0 / (2.0 * phi + 1.0 - x0),
                        scale * (1.0 + x0),
                    )
                }
            }
        }
    }
}

impl OnlineInstance for AdaptiveGame {
    fn machines(&self) -> usize {
        self.m
    }

    fn num_jobs(&self) -> usize {
        self.len()
    }

    fn observe(&self, index: usize, history: &[Decision]) -> Observation {
        match self.rule {
            AdversaryRule::TwoMachineDeterministic if index > 0 => {
                self.observe_two_machine(index, history)
            }
            _ => self.observed[index],
        }
    }

    fn respond(&self, index: usize, completion: &[Decision]) -> f64 {
        self.finalize(completion)
            .map(|p| p[index])
            .unwrap_or_else(|e| panic!("respond called with an invalid completion: {e}"))
    }

    fn realize(&self, history: &[Decision]) -> Result<FixedInstance> {
        let p = self.finalize(history)?;
        let jobs = p
            .iter()
            .enumerate()
            .map(|(j, &pj)| {
                let obs = self.observe(j, history);
                Job::new(obs.u, obs.t, pj)
            })
            .collect::<Result<Vec<_>>>()?;
        FixedInstance::new(self.m, jobs)
    }

    fn static_observations(&self) -> Option<Vec<Observation>> {
        match self.rule {
            AdversaryRule::TwoMachineDeterministic => None,
            _ => Some(self.observed.clone()),
        }
    }
}

/// Either a fixed instance or an adaptive game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Instance {
    Fixed(FixedInstance),
    Adaptive(AdaptiveGame),
}

impl From<FixedInstance> for Instance {
    fn from(inst: FixedInstance) -> Self {
        Instance::Fixed(inst)
    }
}

impl From<AdaptiveGame> for Instance {
    fn from(game: AdaptiveGame) -> Self {
        Instance::Adaptive(game)
    }
}

impl OnlineInstance for Instance {
    fn machines(&self) -> usize {
        match self {
            Instance::Fixed(i) => i.machines(),
            Instance::Adaptive(g) => g.machines(),
        }
    }

    fn num_jobs(&self) -> usize {
        match self {
            Instance::Fixed(i) => i.num_jobs(),
            Instance::Adaptive(g) => g.num_jobs(),
        }
    }

    fn observe(&self, index: usize, history: &[Decision]) -> Observation {
        match self {
            Instance::Fixed(i) => i.observe(index, history),
            Instance::Adaptive(g) => g.observe(index, history),
        }
    }

    fn respond(&self, index: usize, completion: &[Decision]) -> f64 {
        match self {
            Instance::Fixed(i) => i.respond(index, completion),
            Instance::Adaptive(g) => g.respond(index, completion),
        }
    }

    fn realize(&self, history: &[Decision]) -> Result<FixedInstance> {
        match self {
            Instance::Fixed(i) => i.realize(history),
            Instance::Adaptive(g) => g.realize(history),
        }
    }

    fn static_observations(&self) -> Option<Vec<Observation>> {
        match self {
            Instance::Fixed(i) => i.static_observations(),
            Instance::Adaptive(g) => g.static_observations(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub instance: Instance,
    pub prob: f64,
}

/// A finite probability distribution over instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct RandomizedFamily {
    pub members: Vec<Member>,
}

#[derive(Deserialize)]
struct RawFamily {
    members: Vec<Member>,
}

impl TryFrom<RawFamily> for RandomizedFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        RandomizedFamily::new(raw.members)
    }
}

impl RandomizedFamily {
    pub const PROB_TOLERANCE: f64 = 1e-12;

    pub fn new(members: Vec<Member>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidFamily(msg));
        let Some(first) = members.first() else {
            return bad("no members".into());
        };
        let m = first.instance.machines();
        let n = first.instance.num_jobs();
        for (k, member) in members.iter().enumerate() {
            if !(0.0..=1.0).contains(&member.prob) {
                return bad(format!("member {k} has probability {}", member.prob));
            }
            if member.instance.machines() != m {
                return bad(format!("member {k} has a different machine count"));
            }
            if member.instance.num_jobs() != n {
                return bad(format!("member {k} has a different job count"));
            }
        }
        let total: f64 = members.iter().map(|mb| mb.prob).sum();
        if (total - 1.0).abs() > Self::PROB_TOLERANCE {
            return bad(format!("probabilities sum to {total}"));
        }
        Ok(RandomizedFamily { members })
    }

    pub fn single(instance: Instance) -> Self {
        RandomizedFamily {
            members: vec![Member {
                instance,
                prob: 1.0,
            }],
        }
    }

    pub fn machines(&self) -> usize {
        self.members[0].instance.machines()
    }

    pub fn num_jobs(&self) -> usize {
        self.members[0].instance.num_jobs()
    }
}
