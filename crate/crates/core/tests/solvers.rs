use proptest::prelude::*;
use rand::seq::SliceRandom;

use pwcolor::graph::{named, Graph};
use pwcolor::graphgen::{degree_to_p, generate_partite};
use pwcolor::kernel::{self, Coloring, Recolorer};
use pwcolor::oracle;
use pwcolor::seed;
use pwcolor::solvers::{
    self, mppw, mppw_phase1, naive_parallel_pw, sequential_pw, synchronous_round, Algorithm,
    RoundStream, SolverParams,
};

const ALL: [Algorithm; 3] = [Algorithm::Sequential, Algorithm::Naive, Algorithm::Mppw];

fn params(k: usize, seed: u64, max_steps: u64) -> SolverParams {
    SolverParams::new(k).with_seed(seed).with_max_steps(max_steps)
}

#[test]
fn every_entry_point_is_deterministic() {
    let g = generate_partite(90, 3, degree_to_p(90, 3, 4.6).unwrap(), 3).unwrap();
    let p = params(3, 17, 1000).with_trace(true);
    for alg in ALL {
        assert_eq!(solvers::solve(alg, &g, &p).unwrap(), solvers::solve(alg, &g, &p).unwrap());
    }
    assert_eq!(mppw_phase1(&g, &p).unwrap(), mppw_phase1(&g, &p).unwrap());
}

#[test]
fn edgeless_graphs_finish_immediately() {
    let g = named::empty(10);
    for alg in ALL {
        let r = solvers::solve(alg, &g, &params(3, 1, 100)).unwrap();
        assert!(r.success);
        assert_eq!((r.steps, r.phase1_steps, r.best_energy), (0, 0, 0));
    }
    assert_eq!(mppw_phase1(&g, &params(3, 1, 100)).unwrap().steps, 0);
}

#[test]
fn k4_is_never_three_colored() {
    let g = named::complete(4);
    for alg in ALL {
        let r = solvers::solve(alg, &g, &params(3, 5, 2000)).unwrap();
        assert!(!r.success);
        assert!(r.best_energy >= 1);
    }
    let r = sequential_pw(&g, &params(3, 5, 100_000)).unwrap();
    assert_eq!((r.success, r.best_energy, r.steps), (false, 1, 100_000));
}

#[test]
fn triangle_runs() {
    let g = named::complete(3);
    let seq = (0..100)
        .filter(|&s| sequential_pw(&g, &params(3, s, 1000)).unwrap().success)
        .count();
    assert!(seq >= 99, "{seq}");
    // phase 1 has 6 colors and half of a 2000 budget
    let p1 = (0..100)
        .filter(|&s| mppw_phase1(&g, &params(3, s, 2000)).unwrap().energy == 0)
        .count();
    assert!(p1 >= 99, "{p1}");
}

#[test]
fn single_edge_oscillation() {
    let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
    let start = Coloring::new(vec![0, 0], 2).unwrap();
    let mut rec = Recolorer::new(4.0, 2, 1).unwrap();

    let mut rounds_needed = Vec::new();
    for s in 0..100u64 {
        let mut c = start.clone();
        let mut round = 0;
        while kernel::energy(&g, &c) > 0 {
            let stream = RoundStream { seed: s, tag: 1, round };
            let moves = synchronous_round(&g, &c, &[0, 1], &mut rec, stream, |_, _| true);
            assert_eq!(moves.len(), 2, "both endpoints are bad and both recolor");
            let mut colors = c.as_slice().to_vec();
            for (v, new) in moves {
                colors[v] = new;
            }
            c = Coloring::new(colors, 2).unwrap();
            round += 1;
        }
        rounds_needed.push(round);
    }
    assert!(rounds_needed.iter().any(|&r| r > 1));

    // one round separates the endpoints with probability 2 (1/5)(4/5)
    let trials = 20_000u64;
    let solved = (0..trials)
        .filter(|&s| {
            let stream = RoundStream { seed: s, tag: 2, round: 0 };
            let m = synchronous_round(&g, &start, &[0, 1], &mut rec, stream, |_, _| true);
            m[0].1 != m[1].1
        })
        .count() as f64;
    let sigma = (trials as f64 * 0.32 * 0.68).sqrt();
    assert!((solved - 0.32 * trials as f64).abs() < 4.0 * sigma, "{solved}");
}

#[test]
fn round_order_does_not_matter() {
    let g = generate_partite(200, 3, 0.05, 8).unwrap();
    let mut rng = seed::rng_from(3);
    let c = Coloring::uniform(200, 3, &mut rng);
    let mut rec = Recolorer::new(4.0, 3, g.max_degree()).unwrap();
    let mut order: Vec<usize> = (0..200).collect();
    for round in 0..20 {
        let stream = RoundStream { seed: 11, tag: 9, round };
        let gate = |_: usize, r: &mut seed::Rng| rand::Rng::random_bool(r, 0.6);
        let mut a = synchronous_round(&g, &c, &order, &mut rec, stream, gate);
        order.shuffle(&mut rng);
        let mut b = synchronous_round(&g, &c, &order, &mut rec, stream, gate);
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }
}

#[test]
fn trace_best_energy_is_a_running_minimum() {
    let g = generate_partite(120, 3, degree_to_p(120, 3, 4.6).unwrap(), 6).unwrap();
    for alg in ALL {
        let r = solvers::solve(alg, &g, &params(3, 2, 400).with_trace(true)).unwrap();
        let trace = r.trace.as_ref().unwrap();
        let phase2: Vec<_> = trace.iter().filter(|t| alg != Algorithm::Mppw || t.phase == 2).collect();
        let min = phase2.iter().map(|t| t.energy).min().unwrap();
        assert_eq!(r.best_energy, min, "{alg}");
        assert_eq!(r.success, r.best_energy == 0);
        assert_eq!(kernel::energy(&g, &r.best_coloring), r.best_energy);
        assert!(r.steps <= 400);
        assert!(phase2.windows(2).all(|w| w[1].step == w[0].step + 1));
        assert!(trace.iter().all(|t| (t.energy == 0) == (t.bad_count == 0)));
    }
}

#[test]
fn mppw_budget_split_and_trace_order() {
    let g = generate_partite(120, 3, degree_to_p(120, 3, 4.6).unwrap(), 1).unwrap();
    for s in 0..20 {
        let r = mppw(&g, &params(3, s, 300).with_trace(true)).unwrap();
        assert!(r.phase1_steps <= 150 && r.steps <= 150);
        let trace = r.trace.unwrap();
        let first_p2 = trace.iter().position(|t| t.phase == 2).unwrap();
        assert!(trace[..first_p2].iter().all(|t| t.phase == 1));
        assert!(trace[first_p2..].iter().all(|t| t.phase == 2));
        assert_eq!(first_p2 as u64, r.phase1_steps + 1);
    }
}

#[test]
fn phase1_is_fast_off_critical() {
    let p = degree_to_p(90, 3, 8.0).unwrap();
    let mut rounds: Vec<u64> = (0..100)
        .map(|s| {
            let g = generate_partite(90, 3, p, 1000 + s).unwrap();
            mppw_phase1(&g, &params(3, s, 1000)).unwrap().steps
        })
        .collect();
    rounds.sort_unstable();
    assert!(rounds[50] < 30, "median {}", rounds[50]);
}

#[test]
fn naive_versus_mppw_on_k333() {
    let g = generate_partite(9, 3, 1.0, 0).unwrap();
    let (mut naive, mut imp) = (0u64, 0u64);
    for s in 0..200 {
        let a = naive_parallel_pw(&g, &params(3, s, 10_000)).unwrap();
        let b = mppw(&g, &params(3, s, 10_000)).unwrap();
        assert!(a.success && b.success);
        naive += a.steps;
        imp += b.total_steps();
    }
    // comparable or larger: allow naive to be at most somewhat faster
    assert!(naive as f64 >= 0.5 * imp as f64, "naive {naive} mppw {imp}");
}

#[test]
fn sequential_matches_exhaustive_minimum() {
    let mut agree = 0;
    for s in 0..100u64 {
        let g = generate_partite(8, 3, 0.5, s).unwrap();
        let exact = oracle::min_energy_exhaustive(&g, 3).unwrap();
        let r = sequential_pw(&g, &params(3, s, 100_000)).unwrap();
        assert!(r.best_energy >= exact);
        agree += usize::from(r.best_energy == exact);
    }
    assert!(agree >= 95, "{agree}/100");
}

#[test]
fn temperature_and_basis_agree() {
    let b = kernel::basis_from_temperature(1.0 / 4f64.ln()).unwrap();
    let g = generate_partite(60, 3, 0.1, 2).unwrap();
    let r1 = mppw(&g, &params(3, 4, 500).with_basis(b)).unwrap();
    let r2 = mppw(&g, &params(3, 4, 500)).unwrap();
    assert_eq!(r1.success, r2.success);
    assert!((b - 4.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phase2_fires_independent_sets(n in 10usize..80, dbar in 1.0f64..7.0, seed: u64) {
        let p = (dbar * 3.0 / (n as f64 * 2.0)).min(1.0);
        let g = generate_partite(n, 3, p, seed).unwrap();
        // traced runs assert independence internally whenever phase 1 is proper
        let r = mppw(&g, &params(3, seed, 200).with_trace(true)).unwrap();
        prop_assert_eq!(r.success, r.best_energy == 0);
        prop_assert!(r.steps <= 100 && r.phase1_steps <= 100);
    }

    #[test]
    fn success_means_proper(n in 2usize..40, p in 0.0f64..0.6, seed: u64, alg in 0usize..3) {
        let g = generate_partite(n.max(3), 3, p, seed).unwrap();
        let r = solvers::solve(ALL[alg], &g, &params(3, seed, 300)).unwrap();
        prop_assert_eq!(r.success, kernel::energy(&g, &r.best_coloring) == 0);
    }
}
