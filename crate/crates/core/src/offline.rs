//! Exact offline optimum.
//!
//! Offline, every job costs `rho = min(u, t + p)`, so the optimum is a min-max
//! partition of the rho values over `m` machines.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::FixedInstance;

pub const DEFAULT_EXACT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OfflineResult {
    pub opt: f64,
    pub lb: f64,
    /// Machine of each job, in arrival order.
    pub assignment: Vec<usize>,
}

/// `max(sum(rho) / m, max(rho))`.
pub fn makespan_lower_bound(instance: &FixedInstance) -> f64 {
    let rhos = instance.rhos();
    let total: f64 = rhos.iter().sum();
    let largest = rhos.iter().copied().fold(0.0, f64::max);
    (total / instance.m as f64).max(largest)
}

pub fn optimal_makespan(instance: &FixedInstance) -> Result<OfflineResult> {
    optimal_makespan_with_cap(instance, DEFAULT_EXACT_CAP)
}

/// Branch and bound over jobs in descending rho order, seeded with the LPT
/// schedule and stopped as soon as the lower bound is met.
pub fn optimal_makespan_with_cap(instance: &FixedInstance, cap: usize) -> Result<OfflineResult> {
    let n = instance.len();
    if n > cap {
        return Err(Error::ExactSolveCap { jobs: n, cap });
    }
    let rhos = instance.rhos();
    let lb = makespan_lower_bound(instance);
    let m = instance.m;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rhos[b].total_cmp(&rhos[a]));
    let sorted: Vec<f64> = order.iter().map(|&j| rhos[j]).collect();
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + sorted[k];
    }

    let mut search = Search {
        m,
        sorted: &sorted,
        suffix: &suffix,
        lb,
        loads: vec![0.0; m],
        current: vec![0; n],
        best: f64::INFINITY,
        best_assign: vec![0; n],
    };
    search.seed_lpt();
    if search.best > lb {
        search.descend(0, 0.0);
    }

    let mut assignment = vec![0; n];
    for (k, &j) in order.iter().enumerate() {
        assignment[j] = search.best_assign[k];
    }
    let mut loads = vec![0.0; m];
    for (j, &machine) in assignment.iter().enumerate() {
        loads[machine] += rhos[j];
    }
    Ok(OfflineResult {
        opt: loads.into_iter().fold(0.0, f64::max),
        lb,
        assignment,
    })
}

/// Reference optimum by trying all `m^n` assignments, summing in job order.
pub fn brute_force_makespan(instance: &FixedInstance) -> f64 {
    let rhos = instance.rhos();
    let m = instance.m;
    let mut assignment = vec![0usize; rhos.len()];
    let mut best = f64::INFINITY;
    loop {
        let mut loads = vec![0.0; m];
        for (&machine, &rho) in assignment.iter().zip(&rhos) {
            loads[machine] += rho;
        }
        best = best.min(loads.into_iter().fold(0.0, f64::max));
        let Some(k) = assignment.iter().rposition(|&a| a + 1 < m) else {
            return best;
        };
        assignment[k] += 1;
        for a in &mut assignment[k + 1..] {
            *a = 0;
        }
    }
}

struct Search<'a> {
    m: usize,
    sorted: &'a [f64],
    suffix: &'a [f64],
    lb: f64,
    loads: Vec<f64>,
    current: Vec<usize>,
    best: f64,
    best_assign: Vec<usize>,
}

impl Search<'_> {
    fn seed_lpt(&mut self) {
        let mut loads = vec![0.0; self.m];
        for (k, &rho) in self.sorted.iter().enumerate() {
            let machine = crate::scheduler::least_loaded(&loads);
            loads[machine] += rho;
            self.best_assign[k] = machine;
        }
        self.best = loads.into_iter().fold(0.0, f64::max);
    }

    fn done(&self) -> bool {
        self.best <= self.lb
    }

    fn descend(&mut self, k: usize, peak: f64) {
        if k == self.sorted.len() {
            if peak < self.best {
                self.best = peak;
                self.best_assign.copy_from_slice(&self.current);
            }
            return;
        }
        // The remaining jobs fit under the incumbent only if the free room allows it.
        let room: f64 = self.loads.iter().map(|&l| self.best - l).sum();
        if room <= self.suffix[k] && self.suffix[k] > 0.0 {
            return;
        }
        let rho = self.sorted[k];
        for machine in 0..self.m {
            let load = self.loads[machine];
            // Machines with equal load are interchangeable from here on.
            if self.loads[..machine].contains(&load) {
                continue;
            }
            let next = load + rho;
            if next >= self.best {
                continue;
            }
            self.loads[machine] = next;
            self.current[k] = machine;
            self.descend(k + 1, peak.max(next));
            self.loads[machine] = load;
            if self.done() {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Job;

    fn instance(m: usize, rhos: &[f64]) -> FixedInstance {
        FixedInstance::new(
            m,
            rhos.iter().map(|&r| Job::new(r, r, r).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn tightness_instance() {
        let inst = instance(2, &[1.0, 1.0, 2.0]);
        let res = optimal_makespan(&inst).unwrap();
        assert_eq!(res.opt, 2.0);
        assert_eq!(res.lb, 2.0);
        assert_eq!(res.assignment[0], res.assignment[1]);
        assert_ne!(res.assignment[0], res.assignment[2]);
    }

    #[test]
    fn lower_bound_examples() {
        let mut rhos = vec![1.0; 6];
        rhos.push(3.0);
        assert_eq!(makespan_lower_bound(&instance(3, &rhos)), 3.0);
        assert_eq!(makespan_lower_bound(&instance(4, &[2.5])), 2.5);
    }

    #[test]
    fn trivial_cases() {
        let empty = instance(2, &[]);
        assert_eq!(optimal_makespan(&empty).unwrap().opt, 0.0);
        let one = instance(3, &[1.75]);
        assert_eq!(optimal_makespan(&one).unwrap().opt, 1.75);
    }

    #[test]
    fn lpt_is_not_optimal_here() {
        // LPT gives 7 on this classic instance; the optimum is 6.
        let inst = instance(2, &[3.0, 3.0, 2.0, 2.0, 2.0]);
        let res = optimal_makespan(&inst).unwrap();
        assert_eq!(res.opt, 6.0);
        assert_eq!(res.opt, brute_force_makespan(&inst));
    }

    #[test]
    fn matches_brute_force_on_dyadic_grid() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as usize
        };
        for _ in 0..100 {
            let m = 1 + next() % 4;
            let n = next() % 8;
            let rhos: Vec<f64> = (0..n).map(|_| (next() % 64) as f64 / 8.0).collect();
            let inst = instance(m, &rhos);
            let res = optimal_makespan(&inst).unwrap();
            assert_eq!(res.opt, brute_force_makespan(&inst), "{rhos:?} on {m}");
            assert!(res.lb <= res.opt);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let inst = instance(2, &[1.0; 5]);
        assert!(matches!(
            optimal_makespan_with_cap(&inst, 4),
            Err(Error::ExactSolveCap { jobs: 5, cap: 4 })
        ));
    }
}
