use proptest::prelude::*;

use teamform::objective::{ObjectiveState, ScaleFactor};
use teamform::registry::{run_solver, Budget, RunParams, SolverKind};
use teamform::solvers::{csg, cslg, mcsg, mcslg};
use teamform::{Expert, ExpertId, Instance, InstanceData, Matroid, SkillId};

prop_compose! {
    fn instance(max_experts: usize)
        (n in 1..=max_experts, m in 1usize..=12, lambda in prop::sample::select(vec![1.0, 2.0, 800.0]))
        (experts in prop::collection::vec(
            (prop::collection::vec(0..m as u32, 0..=m), 0u32..400),
            n,
         ),
         task in prop::collection::btree_set(0..m as u32, 0..=m),
         lambda in Just(lambda),
         m in Just(m))
        -> Instance
    {
        let scale = if lambda > 100.0 { 400.0 } else { 100.0 };
        Instance::new(InstanceData {
            experts: experts
                .into_iter()
                .enumerate()
                .map(|(i, (skills, cost))| Expert::new(i, skills, cost as f64 / scale))
                .collect(),
            num_skills: m,
            task: task.into_iter().map(SkillId).collect(),
            lambda,
        })
        .unwrap()
    }
}

fn partition_for(inst: &Instance, seed: u64) -> Matroid {
    let n = inst.num_experts();
    let parts = (seed % 3 + 1) as usize;
    let part_of = (0..n).map(|i| (i as u64 * 7 + seed) as usize % parts).collect();
    let budgets = (0..parts).map(|p| (p as u64 + seed) as usize % 3).collect();
    Matroid::partition(part_of, budgets).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn marginals_shrink_and_stay_nonnegative(inst in instance(10), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..10), probe in any::<prop::sample::Index>()) {
        let n = inst.num_experts();
        let mut state = ObjectiveState::new(&inst);
        let e = ExpertId::from_index(probe.index(n));
        let mut last = state.marginal_coverage(e);
        prop_assert!(last >= 0.0);
        for p in picks {
            let x = ExpertId::from_index(p.index(n));
            if state.contains(x) {
                continue;
            }
            state.insert(x).unwrap();
            let now = state.marginal_coverage(e);
            prop_assert!(now <= last + 1e-12);
            prop_assert!(now >= 0.0);
            last = now;
        }
    }

    #[test]
    fn incremental_state_matches_scratch(inst in instance(12), order in any::<u64>()) {
        let n = inst.num_experts();
        let mut state = ObjectiveState::new(&inst);
        let mut ids: Vec<ExpertId> = inst.expert_ids().collect();
        ids.rotate_left((order % n as u64) as usize);
        for (i, &e) in ids.iter().enumerate() {
            let before = state.objective();
            let gain = state.marginal_gain(e);
            state.insert(e).unwrap();
            prop_assert!((state.objective() - before - gain).abs() < 1e-9);
            let eval = inst.evaluate(&ids[..=i]);
            prop_assert_eq!(state.covered_count(), eval.coverage);
            prop_assert!((state.objective() - eval.objective).abs() < 1e-9);
            prop_assert!((state.total_cost() - eval.cost).abs() < 1e-9);
        }
        prop_assert!(state.insert(ids[0]).is_err());
    }

    #[test]
    fn scaled_marginal_is_gain_minus_scaled_cost(inst in instance(8), s in 1.0f64..4.0, pick in any::<prop::sample::Index>()) {
        let state = ObjectiveState::new(&inst);
        let e = ExpertId::from_index(pick.index(inst.num_experts()));
        let scale = ScaleFactor::new(s).unwrap();
        let expect = state.marginal_coverage(e) - s * inst.cost(e);
        prop_assert!((state.scaled_marginal(e, scale) - expect).abs() < 1e-9);
    }

    #[test]
    fn lazy_matches_eager(inst in instance(25), k in 0usize..25, seed in any::<u64>()) {
        let (a, b) = (csg(&inst, k), cslg(&inst, k));
        prop_assert_eq!(&a.selected, &b.selected);
        prop_assert!(b.telemetry.oracle_evaluations <= a.telemetry.oracle_evaluations);
        let m = partition_for(&inst, seed);
        let (a, b) = (mcsg(&inst, &m).unwrap(), mcslg(&inst, &m).unwrap());
        prop_assert_eq!(&a.selected, &b.selected);
        prop_assert!(b.telemetry.oracle_evaluations <= a.telemetry.oracle_evaluations);
    }

    #[test]
    fn outputs_respect_budgets(inst in instance(15), k in 0usize..6, seed in any::<u64>()) {
        let m = partition_for(&inst, seed);
        let Matroid::Partition(p) = &m else { unreachable!() };
        let params = RunParams { seed, ..RunParams::default() };
        for kind in SolverKind::ALL {
            if let Ok(sol) = run_solver(kind, &inst, Budget::Cardinality(k), &params) {
                prop_assert!(sol.len() <= k, "{} picked {} > {}", kind, sol.len(), k);
                prop_assert!(sol.verify(&inst, 1e-9).is_ok());
            }
            if let Ok(sol) = run_solver(kind, &inst, Budget::Matroid(&m), &params) {
                let mut used = vec![0; p.num_parts()];
                for e in &sol.selected {
                    used[p.part_of(*e)] += 1;
                }
                prop_assert!(used.iter().zip(p.budgets()).all(|(u, b)| u <= b), "{}", kind);
            }
        }
    }

    #[test]
    fn eager_greedy_counts_one_evaluation_per_candidate(inst in instance(12), k in 0usize..12) {
        let sol = csg(&inst, k);
        let n = inst.num_experts() as u64;
        let t = sol.len() as u64;
        // one scan per accepted expert, plus a final scan unless the budget ran out
        let scans: u64 = (0..t).map(|i| n - i).sum();
        let last = if (sol.len() as usize) < k && t < n { n - t } else { 0 };
        prop_assert_eq!(sol.telemetry.oracle_evaluations, scans + last);
    }
}
