use gcl::adversary::{gen_indistinguishable, gen_theorem2_family, gen_theorem3_family, gen_theorem6_game};
use gcl::game::RandomizedFamily;
use gcl::offline::{brute_force_makespan, optimal_makespan};
use gcl::policy::{limit_thresholds, test_probability_limit, test_probability_single_machine};
use gcl::verifier::{enumerate_strategies, evaluate_strategy, yao_ratio, EnumConfig};
use gcl::{
    gcl_bound, list_schedule, mixture_weights, rho, thresholds, Decision, FixedInstance, Job,
    Mixture, OnlineInstance, Schedule, Size,
};
use proptest::prelude::*;

fn job() -> impl Strategy<Value = Job> {
    (0.0..10.0f64, 0.0..20.0f64, 0.0..=1.0f64).prop_map(|(u, t, frac)| Job::new(u, t, u * frac).unwrap())
}

fn instance(max_m: usize, max_n: usize) -> impl Strategy<Value = FixedInstance> {
    (1..=max_m, prop::collection::vec(job(), 0..=max_n))
        .prop_map(|(m, jobs)| FixedInstance::new(m, jobs).unwrap())
}

proptest! {
    #[test]
    fn rho_is_bounded_and_monotone(j in job(), du in 0.0..5.0f64, dt in 0.0..5.0f64, frac in 0.0..=1.0f64) {
        let r = rho(&j);
        prop_assert!(r <= j.u && r <= j.t + j.p);
        let bigger_u = Job::new(j.u + du, j.t, j.p).unwrap();
        let bigger_t = Job::new(j.u, j.t + dt, j.p).unwrap();
        let bigger_p = Job::new(j.u, j.t, j.p + (j.u - j.p) * frac).unwrap();
        prop_assert!(rho(&bigger_u) >= r);
        prop_assert!(rho(&bigger_t) >= r);
        prop_assert!(rho(&bigger_p) >= r);
    }

    #[test]
    fn makespan_is_monotone_in_charged_time(
        inst in instance(4, 8),
        seed in any::<u64>(),
        which in any::<prop::sample::Index>(),
        extra in 0.0..5.0f64,
    ) {
        prop_assume!(!inst.is_empty());
        let placements: Vec<Decision> = (0..inst.len())
            .map(|j| {
                let h = seed.rotate_left(j as u32 * 7);
                Decision::new((h % inst.m as u64) as usize, h & 1 == 1)
            })
            .collect();
        let s = Schedule::new(inst.m, placements.clone());
        let before = s.makespan(&inst).unwrap();
        let k = which.index(inst.len());
        let mut bumped = inst.clone();
        let j = bumped.jobs[k];
        bumped.jobs[k] = if placements[k].tested {
            Job::new(j.u + extra, j.t + extra, j.p).unwrap()
        } else {
            Job::new(j.u + extra, j.t, j.p).unwrap()
        };
        prop_assert!(s.makespan(&bumped).unwrap() >= before);
    }

    #[test]
    fn optimum_respects_lower_bound_and_brute_force(inst in instance(3, 7)) {
        let res = optimal_makespan(&inst).unwrap();
        prop_assert!(res.lb <= res.opt);
        prop_assert!((res.opt - brute_force_makespan(&inst)).abs() <= 1e-12 * res.opt.max(1.0));
        let mut loads = vec![0.0; inst.m];
        for (j, &machine) in res.assignment.iter().enumerate() {
            loads[machine] += inst.jobs[j].rho();
        }
        prop_assert_eq!(loads.into_iter().fold(0.0, f64::max), res.opt);
    }

    #[test]
    fn optimum_ignores_arrival_order(inst in instance(4, 10), rotation in 0usize..10) {
        let mut shuffled = inst.clone();
        let n = shuffled.len();
        if n > 0 {
            shuffled.jobs.rotate_left(rotation % n);
            shuffled.jobs.reverse();
        }
        let a = optimal_makespan(&inst).unwrap().opt;
        let b = optimal_makespan(&shuffled).unwrap().opt;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn gcl_runs_are_deterministic(inst in instance(4, 10), ell in 1u32..4) {
        let m = inst.m.max(2);
        let inst = FixedInstance::new(m, inst.jobs).unwrap();
        let params = thresholds(m as u32, ell).unwrap();
        for i in 0..params.components() {
            let policy = gcl::scheduler::Component::new(&params, i).unwrap();
            prop_assert_eq!(list_schedule(&inst, &policy), list_schedule(&inst, &policy));
        }
    }

    #[test]
    fn list_schedule_uses_a_least_loaded_machine(inst in instance(4, 10)) {
        let played = list_schedule(&inst, &|o: gcl::Observation, _| {
            if o.ratio() > 1.5 { gcl::Verdict::Test } else { gcl::Verdict::Skip }
        });
        let mut loads = vec![0.0; inst.m];
        for (d, j) in played.schedule.placements.iter().zip(&inst.jobs) {
            let min = loads.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(loads[d.machine], min);
            prop_assert!(loads[..d.machine].iter().all(|&l| l > min));
            loads[d.machine] += j.charged(d.tested);
        }
    }
}

#[test]
fn alpha_window_and_monotonicity() {
    let phi = gcl::phi();
    for ell in 1..=64u32 {
        let l = f64::from(ell);
        let upper = ((l + 1.0) * phi * phi / ((l + 1.0) * phi * phi + 2.0 * l)).sqrt();
        let (floor, _) = mixture_weights(Size::Finite(2), Size::Finite(ell)).unwrap();
        assert!(floor > phi - 1.0);
        let mut previous = 0.0;
        let mut previous_bound = 0.0;
        for m in 2..=64u32 {
            let (alpha, beta) = mixture_weights(Size::Finite(m), Size::Finite(ell)).unwrap();
            assert!((alpha + l * beta - 1.0).abs() < 1e-12);
            assert!(upper > alpha && alpha >= floor);
            assert!(alpha > previous);
            let bound = gcl_bound(Size::Finite(m), Size::Finite(ell)).unwrap();
            assert!(bound > previous_bound, "m={m} ell={ell}");
            previous = alpha;
            previous_bound = bound;
        }
    }
}

#[test]
fn component_zero_tests_exactly_above_phi() {
    let phi = gcl::phi();
    let params = thresholds(3, 2).unwrap();
    for k in 0..2000 {
        let r = f64::from(k) / 400.0;
        let tested = params.decide(r, 0).unwrap() == gcl::Verdict::Test;
        assert_eq!(tested, r > phi, "r={r}");
    }
    assert_eq!(params.decide(phi, 0).unwrap(), gcl::Verdict::Skip);
    assert_eq!(params.decide(f64::INFINITY, 2).unwrap(), gcl::Verdict::Test);
}

#[test]
fn limit_probability_shape() {
    let phi = gcl::phi();
    for m in [2u32, 3, 8, 64] {
        let size = Size::Finite(m);
        let lim = limit_thresholds(size).unwrap();
        let f = |r: f64| test_probability_limit(r, size).unwrap();
        let below = |r: f64| r - 1e-9 * r;
        let above = |r: f64| r + 1e-9 * r;
        assert_eq!(f(lim.x), 0.0);
        assert!(f(above(lim.x)) < 1e-7);
        assert!((f(lim.y) - 1.0).abs() < 1e-12);
        assert!((f(above(lim.y)) - 1.0).abs() < 1e-7);
        let jump = f(above(phi)) - f(below(phi));
        assert!((jump - (2.0 * lim.alpha - 1.0)).abs() < 1e-7);
        let mut previous = 0.0;
        for k in 0..=4000 {
            let r = f64::from(k) / 1000.0;
            let v = f(r);
            assert!(v >= previous && (0.0..=1.0).contains(&v));
            previous = v;
        }
    }
}

#[test]
fn single_machine_probability_is_increasing() {
    let mut previous = 0.0;
    for k in 1001..5000 {
        let v = test_probability_single_machine(f64::from(k) / 1000.0);
        assert!(v > previous);
        previous = v;
    }
}

fn families() -> Vec<RandomizedFamily> {
    vec![
        gen_theorem3_family().unwrap(),
        gen_theorem2_family(3).unwrap(),
        RandomizedFamily::single(gen_theorem6_game().into()),
        RandomizedFamily::single(gen_indistinguishable(3).unwrap().into()),
    ]
}

#[test]
fn symmetry_pruning_keeps_the_minimum() {
    for family in families() {
        let with = yao_ratio(&family, EnumConfig::default()).unwrap();
        let without = yao_ratio(
            &family,
            EnumConfig {
                symmetry: false,
                ..EnumConfig::default()
            },
        )
        .unwrap();
        assert_eq!(with.ratio, without.ratio);
        assert!(with.strategies < without.strategies);
    }
}

#[test]
fn yao_minimum_is_sound() {
    for family in families() {
        let found = yao_ratio(&family, EnumConfig::default()).unwrap();
        let witness = evaluate_strategy(&found.witness, &family).unwrap();
        assert_eq!(witness.ratio(), found.ratio);
        for s in enumerate_strategies(&family, false, 8).unwrap() {
            assert!(evaluate_strategy(&s, &family).unwrap().ratio() >= found.ratio);
        }
    }
}

#[test]
fn games_keep_p_within_bounds() {
    for family in families() {
        for s in enumerate_strategies(&family, false, 8).unwrap() {
            for member in &family.members {
                let outcome = gcl::verifier::play(&s, &member.instance).unwrap();
                assert_eq!(outcome.instance.len(), member.instance.num_jobs());
                for j in &outcome.instance.jobs {
                    assert!(0.0 <= j.p && j.p <= j.u);
                }
            }
        }
    }
}
