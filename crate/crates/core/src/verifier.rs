//! Strategy enumeration and bound certification.
//!
//! Against the built-in adversary rules every observation is a deterministic
//! function of the strategy's own earlier actions, so a deterministic
//! algorithm on these games is just an action sequence. The one exception is a
//! position whose `(u, t)` differs between family members; there a strategy
//! carries one action per distinct observation.

use std::collections::HashMap;

use serde::Serialize;

use crate::adversary::{gen_indistinguishable, gen_lemma1_family, gen_tightness_two_machine_with};
use crate::error::{Error, Result};
use crate::game::{AdaptiveGame, Instance, RandomizedFamily};
use crate::model::{Decision, FixedInstance, Observation, OnlineInstance, Schedule};
use crate::offline::{optimal_makespan_with_cap, DEFAULT_EXACT_CAP};
use crate::policy::{test_probability_single_machine, Mixture, RevisedParams};
use crate::scheduler::{gcl_components, gcl_expected_makespan, list_schedule, TestPattern};

/// Games larger than this are not enumerated unless the cap is raised.
pub const DEFAULT_ENUM_CAP: usize = 8;

/// Largest Lemma-1 instance solved by exact outcome enumeration.
pub const LEMMA1_EXACT_CAP: usize = 25;

/// The action taken on a void job; it costs nothing wherever it goes.
pub const CANONICAL_ACTION: Decision = Decision {
    machine: 0,
    tested: false,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchAction {
    pub position: usize,
    pub observation: Observation,
    pub action: Decision,
}

/// A deterministic algorithm restricted to one game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strategy {
    pub actions: Vec<Decision>,
    pub branches: Vec<BranchAction>,
}

impl Strategy {
    pub fn new(actions: Vec<Decision>) -> Self {
        Strategy {
            actions,
            branches: Vec::new(),
        }
    }

    pub fn action(&self, position: usize, observation: Observation) -> Decision {
        self.branches
            .iter()
            .find(|b| b.position == position && b.observation.key() == observation.key())
            .map_or(self.actions[position], |b| b.action)
    }
}

/// One enumerated decision point: a job position, optionally tied to one of
/// several observations that occur there.
#[derive(Debug, Clone)]
struct Slot {
    position: usize,
    branch: Option<Observation>,
}

/// Every strategy for a family, optionally up to machine relabeling.
///
/// With symmetry on, an action may use machine `k` only if some earlier
/// position already used `k - 1`.
#[derive(Debug, Clone)]
pub struct StrategyIter {
    m: usize,
    n: usize,
    slots: Vec<Slot>,
    fixed: Vec<usize>,
    symmetry: bool,
    digits: Vec<usize>,
    started: bool,
    finished: bool,
}

/// Strategies for `family` on its own machine count.
pub fn enumerate_strategies(
    family: &RandomizedFamily,
    symmetry: bool,
    cap: usize,
) -> Result<StrategyIter> {
    let n = family.num_jobs();
    if n > cap {
        return Err(Error::EnumerationCap { jobs: n, cap });
    }
    let mut slots = Vec::new();
    let mut fixed = Vec::new();
    let observations: Option<Vec<Vec<Observation>>> = family
        .members
        .iter()
        .map(|mb| mb.instance.static_observations())
        .collect();
    for position in 0..n {
        let Some(all) = &observations else {
            // Observations depend on the history; one action per position.
            slots.push(Slot {
                position,
                branch: None,
            });
            continue;
        };
        let mut distinct: Vec<Observation> = Vec::new();
        for obs in all.iter().map(|o| o[position]) {
            if !obs.is_void() && !distinct.iter().any(|d| d.key() == obs.key()) {
                distinct.push(obs);
            }
        }
        if distinct.is_empty() {
            fixed.push(position);
            continue;
        }
        slots.push(Slot {
            position,
            branch: None,
        });
        for obs in distinct.into_iter().skip(1) {
            slots.push(Slot {
                position,
                branch: Some(obs),
            });
        }
    }
    Ok(StrategyIter {
        m: family.machines(),
        n,
        digits: vec![0; slots.len()],
        slots,
        fixed,
        symmetry,
        started: false,
        finished: false,
    })
}

impl StrategyIter {
    /// Largest action code allowed in slot `k` given the slots before it.
    fn limit(&self, k: usize) -> usize {
        let top = if self.symmetry {
            let position = self.slots[k].position;
            let used = self.slots[..k]
                .iter()
                .zip(&self.digits)
                .filter(|(s, _)| s.position < position)
                .map(|(_, &d)| d / 2 + 1)
                .max()
                .unwrap_or(0);
            used.min(self.m - 1)
        } else {
            self.m - 1
        };
        2 * top + 1
    }

    fn build(&self) -> Strategy {
        let mut actions = vec![CANONICAL_ACTION; self.n];
        let mut branches = Vec::new();
        for (slot, &d) in self.slots.iter().zip(&self.digits) {
            let action = Decision::new(d / 2, d % 2 == 1);
            match slot.branch {
                None => actions[slot.position] = action,
                Some(observation) => branches.push(BranchAction {
                    position: slot.position,
                    observation,
                    action,
                }),
            }
        }
        debug_assert!(self.fixed.iter().all(|&p| actions[p] == CANONICAL_ACTION));
        Strategy { actions, branches }
    }
}

impl Iterator for StrategyIter {
    type Item = Strategy;

    fn next(&mut self) -> Option<Strategy> {
        if self.finished {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.build());
        }
        // Odometer step; resetting later digits to 0 always stays valid.
        for k in (0..self.digits.len()).rev() {
            if self.digits[k] < self.limit(k) {
                self.digits[k] += 1;
                for d in &mut self.digits[k + 1..] {
                    *d = 0;
                }
                return Some(self.build());
            }
        }
        self.finished = true;
        None
    }
}

/// Memoized exact optima keyed by machine count and the sorted rho values.
#[derive(Debug, Default)]
pub struct OptCache {
    cap: usize,
    memo: HashMap<(usize, Vec<u64>), f64>,
}

impl OptCache {
    pub fn new(cap: usize) -> Self {
        OptCache {
            cap,
            memo: HashMap::new(),
        }
    }

    pub fn opt(&mut self, instance: &FixedInstance) -> Result<f64> {
        let mut rhos = instance.rhos();
        rhos.sort_by(f64::total_cmp);
        let key = (instance.m, rhos.iter().map(|r| r.to_bits()).collect());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let v = optimal_makespan_with_cap(instance, self.cap)?.opt;
        self.memo.insert(key, v);
        Ok(v)
    }
}

/// A deterministic run of a strategy against one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub instance: FixedInstance,
    pub schedule: Schedule,
    pub makespan: f64,
    pub min_load: f64,
}

pub fn play(strategy: &Strategy, instance: &impl OnlineInstance) -> Result<Outcome> {
    let n = instance.num_jobs();
    if strategy.actions.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: strategy.actions.len(),
        });
    }
    let mut history = Vec::with_capacity(n);
    for j in 0..n {
        let obs = instance.observe(j, &history);
        history.push(strategy.action(j, obs));
    }
    let realized = instance.realize(&history)?;
    let schedule = Schedule::new(instance.machines(), history);
    let loads = schedule.loads(&realized)?;
    Ok(Outcome {
        makespan: loads.iter().copied().fold(0.0, f64::max),
        min_load: loads.iter().copied().fold(f64::INFINITY, f64::min),
        instance: realized,
        schedule,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub expected_alg: f64,
    pub expected_opt: f64,
}

impl Evaluation {
    pub fn ratio(&self) -> f64 {
        self.expected_alg / self.expected_opt
    }
}

/// Probability-weighted makespan and optimum of a strategy on a family.
pub fn evaluate_strategy(strategy: &Strategy, family: &RandomizedFamily) -> Result<Evaluation> {
    evaluate_with(strategy, family, &mut OptCache::new(DEFAULT_EXACT_CAP))
}

fn evaluate_with(
    strategy: &Strategy,
    family: &RandomizedFamily,
    cache: &mut OptCache,
) -> Result<Evaluation> {
    let mut expected_alg = 0.0;
    let mut expected_opt = 0.0;
    for member in &family.members {
        let outcome = play(strategy, &member.instance)?;
        expected_alg += member.prob * outcome.makespan;
        expected_opt += member.prob * cache.opt(&outcome.instance)?;
    }
    Ok(Evaluation {
        expected_alg,
        expected_opt,
    })
}

/// Result of minimizing the expected ratio over all strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YaoOutcome {
    pub ratio: f64,
    pub witness: Strategy,
    pub evaluation: Evaluation,
    pub strategies: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumConfig {
    pub symmetry: bool,
    pub enum_cap: usize,
    pub opt_cap: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            symmetry: true,
            enum_cap: DEFAULT_ENUM_CAP,
            opt_cap: DEFAULT_EXACT_CAP,
        }
    }
}

/// `min` over strategies of `E[C^A] / E[C*]`; the first minimizer in
/// enumeration order is the witness.
pub fn yao_ratio(family: &RandomizedFamily, config: EnumConfig) -> Result<YaoOutcome> {
    let mut cache = OptCache::new(config.opt_cap);
    let mut best: Option<YaoOutcome> = None;
    let mut count = 0;
    for strategy in enumerate_strategies(family, config.symmetry, config.enum_cap)? {
        count += 1;
        let evaluation = evaluate_with(&strategy, family, &mut cache)?;
        let ratio = evaluation.ratio();
        if best.as_ref().is_none_or(|b| ratio < b.ratio) {
            best = Some(YaoOutcome {
                ratio,
                witness: strategy,
                evaluation,
                strategies: 0,
            });
        }
    }
    let mut best = best.expect("at least one strategy exists");
    best.strategies = count;
    Ok(best)
}

/// Deterministic lower bound: the minimum of `C^A / C*` over strategies.
pub fn det_lb_ratio(game: &AdaptiveGame, config: EnumConfig) -> Result<YaoOutcome> {
    yao_ratio(&RandomizedFamily::single(game.clone().into()), config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `computed >= claimed - tolerance`, and within `equality_tolerance` if set.
    Lower,
    /// `computed <= claimed + tolerance`.
    Upper,
    /// `|computed - claimed| <= tolerance`.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Strategy(Strategy),
    Instance(FixedInstance),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub kind: BoundKind,
    pub claimed: f64,
    pub computed: f64,
    pub margin: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_tolerance: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl BoundReport {
    pub fn new(
        name: impl Into<String>,
        kind: BoundKind,
        claimed: f64,
        computed: f64,
        tolerance: f64,
        equality_tolerance: Option<f64>,
    ) -> Self {
        let margin = computed - claimed;
        let pass = match kind {
            BoundKind::Lower => {
                margin >= -tolerance && equality_tolerance.is_none_or(|eq| margin.abs() <= eq)
            }
            BoundKind::Upper => margin <= tolerance,
            BoundKind::Equal => margin.abs() <= tolerance,
        };
        BoundReport {
            name: name.into(),
            kind,
            claimed,
            computed,
            margin,
            tolerance,
            equality_tolerance,
            pass,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }
}

/// Largest ratio `E[C] / C*` over a corpus, and where it occurs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRatio {
    pub max_ratio: f64,
    pub worst: Option<usize>,
    pub checked: usize,
}

/// GCL's expected ratio on a fixed instance.
pub fn gcl_ratio<M: Mixture + ?Sized>(
    instance: &FixedInstance,
    mixture: &M,
    cache: &mut OptCache,
) -> Result<f64> {
    let opt = cache.opt(instance)?;
    let expected = gcl_expected_makespan(instance, mixture);
    Ok(if opt > 0.0 {
        expected / opt
    } else if expected > 0.0 {
        f64::INFINITY
    } else {
        1.0
    })
}

/// GCL's ratio on a game where each component faces the adversary on its
/// own: `sum w_i C^{A_i} / sum w_i C*_i`.
pub fn gcl_game_ratio<I, M>(instance: &I, mixture: &M, cache: &mut OptCache) -> Result<f64>
where
    I: OnlineInstance + ?Sized,
    M: Mixture + ?Sized,
{
    let mut alg = 0.0;
    let mut opt = 0.0;
    for (w, played) in mixture.weights().iter().zip(gcl_components(instance, mixture)) {
        alg += w * played.makespan();
        opt += w * cache.opt(&played.instance)?;
    }
    Ok(alg / opt)
}

/// Every fixed instance GCL can meet on `instance`: the instance itself, or
/// one realization per component for a game.
pub fn realizations<I, M>(instance: &I, mixture: &M) -> Vec<FixedInstance>
where
    I: OnlineInstance + ?Sized,
    M: Mixture + ?Sized,
{
    let mut out: Vec<FixedInstance> = Vec::new();
    for played in gcl_components(instance, mixture) {
        if !out.contains(&played.instance) {
            out.push(played.instance);
        }
    }
    out
}

/// Maximum over the corpus of GCL's expected ratio; games are checked
/// through every realization the components produce.
pub fn max_gcl_ratio<M: Mixture + ?Sized>(
    corpus: &[Instance],
    mixture: &M,
    opt_cap: usize,
) -> Result<CorpusRatio> {
    let mut cache = OptCache::new(opt_cap);
    let mut result = CorpusRatio {
        max_ratio: 0.0,
        worst: None,
        checked: 0,
    };
    for (k, instance) in corpus.iter().enumerate() {
        for fixed in realizations(instance, mixture) {
            let ratio = gcl_ratio(&fixed, mixture, &mut cache)?;
            result.checked += 1;
            if ratio > result.max_ratio {
                result.max_ratio = ratio;
                result.worst = Some(k);
            }
        }
    }
    Ok(result)
}

/// Upper-bound check of GCL's expected ratio against a claimed bound.
pub fn check_gcl_bound<M: Mixture + ?Sized>(
    name: &str,
    corpus: &[Instance],
    mixture: &M,
    bound: f64,
    opt_cap: usize,
) -> Result<BoundReport> {
    let found = max_gcl_ratio(corpus, mixture, opt_cap)?;
    let report = BoundReport::new(name, BoundKind::Upper, bound, found.max_ratio, 1e-9, None);
    Ok(match found.worst {
        Some(k) => match &corpus[k] {
            Instance::Fixed(inst) => report.with_witness(Witness::Instance(inst.clone())),
            Instance::Adaptive(_) => report,
        },
        None => report,
    })
}

/// Revised GCL on the tightness instance built from `params`, against the
/// closed-form bound.
pub fn check_revised_tightness(params: &RevisedParams) -> Result<BoundReport> {
    let inst = gen_tightness_two_machine_with(params);
    let ratio = gcl_ratio(&inst, params, &mut OptCache::new(DEFAULT_EXACT_CAP))?;
    Ok(
        BoundReport::new("thm5-tight", BoundKind::Equal, RevisedParams::bound(), ratio, 1e-9, None)
            .with_witness(Witness::Instance(inst)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Ratio {
    /// `None` when the instance exceeds the exact-enumeration cap.
    pub exact: Option<f64>,
    pub paper_bound: f64,
}

/// Expected ratio of the single-machine probability rule, used with list
/// scheduling, on the Lemma-1 family.
///
/// The makespan depends only on which jobs are tested, and by symmetry only
/// on how many, so outcomes are grouped by the number of tested jobs.
pub fn lemma1_expected_ratio(k: usize) -> Result<Lemma1Ratio> {
    lemma1_expected_ratio_with_cap(k, LEMMA1_EXACT_CAP)
}

pub fn lemma1_expected_ratio_with_cap(k: usize, cap: usize) -> Result<Lemma1Ratio> {
    let inst = gen_lemma1_family(k)?;
    let n = inst.len();
    let paper_bound = k as f64 - k as f64 * (1.0 - 1.0 / n as f64).powi(n as i32);
    if n > cap {
        return Ok(Lemma1Ratio {
            exact: None,
            paper_bound,
        });
    }
    let q = test_probability_single_machine(inst.jobs[0].observation().ratio());
    let opt = optimal_makespan_with_cap(&inst, n)?.opt;
    let mut expected = 0.0;
    let mut binom = 1.0;
    for tested in 0..=n {
        let pattern = TestPattern((0..n).map(|j| j < tested).collect());
        let makespan = list_schedule(&inst, &pattern).makespan();
        let prob = binom * q.powi(tested as i32) * (1.0 - q).powi((n - tested) as i32);
        expected += prob * makespan;
        binom = binom * (n - tested) as f64 / (tested + 1) as f64;
    }
    Ok(Lemma1Ratio {
        exact: Some(expected / opt),
        paper_bound,
    })
}

/// Outcome of a structural check over all strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralReport {
    pub name: String,
    pub strategies: usize,
    pub violations: usize,
    pub first_violation: Option<Strategy>,
    pub pass: bool,
}

fn structural(
    name: &str,
    game: AdaptiveGame,
    symmetry: bool,
    ok: impl Fn(f64, f64) -> bool,
) -> Result<StructuralReport> {
    let family = RandomizedFamily::single(game.into());
    let member = &family.members[0].instance;
    let mut report = StructuralReport {
        name: name.to_string(),
        strategies: 0,
        violations: 0,
        first_violation: None,
        pass: true,
    };
    for strategy in enumerate_strategies(&family, symmetry, DEFAULT_ENUM_CAP)? {
        let out = play(&strategy, member)?;
        report.strategies += 1;
        if !ok(out.makespan, out.min_load) {
            report.violations += 1;
            report.first_violation.get_or_insert(strategy);
        }
    }
    report.pass = report.violations == 0;
    Ok(report)
}

/// On `m >= 3` machines every strategy on the indistinguishable game ends with
/// `C >= 4`, or `C = 3` and `C_min >= 2`.
pub fn check_lemma6(m: usize, symmetry: bool) -> Result<StructuralReport> {
    if m < 3 {
        return Err(Error::TooFewMachines { min: 3, got: m });
    }
    structural("lemma6", gen_indistinguishable(m)?, symmetry, |c, c_min| {
        c >= 4.0 || (c == 3.0 && c_min >= 2.0)
    })
}

/// On two machines every strategy ends with `C >= 5`, or `C >= 4` and
/// `C_min >= 1`, or `C >= 3` and `C_min >= 2`.
pub fn check_lemma7(symmetry: bool) -> Result<StructuralReport> {
    structural("lemma7", gen_indistinguishable(2)?, symmetry, |c, c_min| {
        c >= 5.0 || (c >= 4.0 && c_min >= 1.0) || (c >= 3.0 && c_min >= 2.0)
    })
}
