//! Generators for the lower-bound and tightness constructions.

use crate::error::{Error, Result};
use crate::game::{AdaptiveGame, AdversaryRule, Instance, Member, RandomizedFamily};
use crate::model::{FixedInstance, Job, Observation};
use crate::policy::{phi, revised_two_machine_params, RevisedParams};

/// Default size of the uniform jobs in the forced-test game.
pub const DEFAULT_BIG_U: f64 = 1e6;

/// Constants fixed by the lower-bound constructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameConstants {
    pub thm2_alpha: f64,
    pub thm2_weights: [f64; 3],
    pub thm3_alpha: f64,
    pub thm3_weights: [f64; 3],
    pub thm6_x0: f64,
    pub thm6_y0: f64,
}

impl Default for GameConstants {
    fn default() -> Self {
        Self::new()
    }
}

impl GameConstants {
    pub fn new() -> Self {
        let phi = phi();
        let a2 = (2.0 * 78f64.sqrt() - 5.0) / 41.0;
        let a3 = (51f64.sqrt() - 4.0) / 10.0;
        let x0 = (3.0 * phi + 1.0 - (11.0 * phi + 6.0).sqrt()) / 2.0;
        let y0 = (1.0 - x0 + ((3.0 * phi - 5.0) * x0 + 15.0 * phi + 8.0).sqrt()) / 2.0;
        GameConstants {
            thm2_alpha: a2,
            thm2_weights: [(2.0 - a2) / 3.0, a2, (1.0 - 2.0 * a2) / 3.0],
            thm3_alpha: a3,
            thm3_weights: [0.5, a3, 0.5 - a3],
            thm6_x0: x0,
            thm6_y0: y0,
        }
    }

    /// `x0^2 - (3phi + 1) x0 + phi^2`.
    pub fn x0_residual(&self) -> f64 {
        let phi = phi();
        let x = self.thm6_x0;
        x * x - (3.0 * phi + 1.0) * x + phi * phi
    }

    /// `y0^2 - (1 - x0) y0 - (phi + 1 - x0)(2phi + 1 - x0)`.
    pub fn y0_residual(&self) -> f64 {
        let phi = phi();
        let (x, y) = (self.thm6_x0, self.thm6_y0);
        y * y - (1.0 - x) * y - (phi + 1.0 - x) * (2.0 * phi + 1.0 - x)
    }

    /// The ratio both surviving branches of the two-machine game equalize at.
    pub fn thm6_ratio(&self) -> f64 {
        (self.thm6_y0 + phi()) / (phi() + 1.0 - self.thm6_x0)
    }
}

fn job(u: f64, t: f64, p: f64) -> Job {
    Job::new(u, t, p).expect("generator jobs satisfy 0 <= p <= u")
}

fn member(instance: impl Into<Instance>, prob: f64) -> Member {
    Member {
        instance: instance.into(),
        prob,
    }
}

/// A single `(2, 1)` job whose processing time is 0 or 2 with equal probability.
pub fn gen_single_job_randomized(m: usize) -> Result<RandomizedFamily> {
    let fixed = |p| FixedInstance::new(m, vec![job(2.0, 1.0, p)]);
    RandomizedFamily::new(vec![member(fixed(0.0)?, 0.5), member(fixed(2.0)?, 0.5)])
}

/// `m(m-1) + 1` jobs `(big_u, 1)`; the first job to land on a machine already
/// loaded to `m - 1` turns out to have `p = m - 1`.
pub fn gen_uniform_forced_test(m: usize, big_u: f64) -> Result<AdaptiveGame> {
    if m < 2 {
        return Err(Error::TooFewMachines { min: 2, got: m });
    }
    if !(big_u.is_finite() && big_u >= (m - 1) as f64) {
        return Err(Error::InvalidArgument(format!(
            "job size {big_u} must be finite and at least m - 1"
        )));
    }
    Ok(AdaptiveGame {
        m,
        observed: vec![Observation::new(big_u, 1.0); m * (m - 1) + 1],
        rule: AdversaryRule::ForcedTest,
    })
}

/// `m + 1` identical `(2, 1)` jobs; two of them get `p = 0`, the rest `p = 2`.
pub fn gen_indistinguishable(m: usize) -> Result<AdaptiveGame> {
    if m < 2 {
        return Err(Error::TooFewMachines { min: 2, got: m });
    }
    Ok(indistinguishable_with_tail(m, None))
}

fn indistinguishable_with_tail(m: usize, tail: Option<Job>) -> AdaptiveGame {
    let mut observed = vec![Observation::new(2.0, 1.0); m + 1];
    let mut tail_p = Vec::new();
    if let Some(last) = tail {
        observed.push(last.observation());
        tail_p.push(last.p);
    }
    AdaptiveGame {
        m,
        observed,
        rule: AdversaryRule::Indistinguishable {
            prefix: m + 1,
            tail_p,
        },
    }
}

fn three_way_family(m: usize, size: f64, test: f64, weights: [f64; 3]) -> Result<RandomizedFamily> {
    let tails = [
        job(0.0, 0.0, 0.0),
        job(size, test, 0.0),
        job(size, test, size),
    ];
    RandomizedFamily::new(
        tails
            .into_iter()
            .zip(weights)
            .map(|(tail, w)| member(indistinguishable_with_tail(m, Some(tail)), w))
            .collect(),
    )
}

/// The indistinguishable game plus a final job that is void, cheap to test,
/// or expensive, with the Theorem-2 weights.
pub fn gen_theorem2_family(m: usize) -> Result<RandomizedFamily> {
    if m < 3 {
        return Err(Error::TooFewMachines { min: 3, got: m });
    }
    let c = GameConstants::new();
    three_way_family(m, 2.0 + 1.0 / c.thm2_alpha, 3.0, c.thm2_weights)
}

/// Two-machine counterpart of [`gen_theorem2_family`].
pub fn gen_theorem3_family() -> Result<RandomizedFamily> {
    let c = GameConstants::new();
    three_way_family(2, 2.0 / c.thm3_alpha, 4.0, c.thm3_weights)
}

/// Three jobs on two machines on which revised GCL is exactly tight.
pub fn gen_tightness_two_machine() -> FixedInstance {
    gen_tightness_two_machine_with(&revised_two_machine_params())
}

/// Same construction built from a given `x1`.
pub fn gen_tightness_two_machine_with(params: &RevisedParams) -> FixedInstance {
    let x1 = params.x1;
    FixedInstance::new(
        2,
        vec![job(x1, 1.0, 0.0), job(x1, 1.0, 0.0), job(2.0 * x1, 2.0, 0.0)],
    )
    .expect("two machines")
}

/// `k(k-1) + 1` machines and as many `(k, 1, 0)` jobs.
pub fn gen_lemma1_family(k: usize) -> Result<FixedInstance> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let n = k * (k - 1) + 1;
    FixedInstance::new(n, vec![job(k as f64, 1.0, 0.0); n])
}

/// The adaptive three-job game against deterministic two-machine algorithms.
pub fn gen_theorem6_game() -> AdaptiveGame {
    let c = GameConstants::new();
    let phi = phi();
    AdaptiveGame {
        m: 2,
        observed: vec![
            Observation::new(phi, 1.0),
            Observation::new(phi - c.thm6_x0, c.thm6_x0),
            Observation::new(c.thm6_y0, phi + 1.0 - c.thm6_x0),
        ],
        rule: AdversaryRule::TwoMachineDeterministic,
    }
}
