use ecd::harness::*;
use ecd::optimizers::OptimizerSpec;
use ecd::state::*;

fn main() {
    let t0 = std::time::Instant::now();
    let cfg = ExperimentConfig {
        objective: ObjectiveSpec::named("two_basin"),
        optimizer: OptimizerSpec::Bbi(BbiHyperParams {
            dt: 1e-2, dv: 1e-3, de: 0.0, t0: 20, t1: 750, nb: 1,
            max_iters: 200_000, ..Default::default()
        }),
        n_runs: 1000,
        base_seed: 2024,
        init: InitStrategy::FixedPoint { theta: vec![4.0, -4.0] },
        trace_every: 0,
    };
    let res = basin_experiment(&cfg).unwrap();
    println!("epsilon {:.6e}", res.epsilon);
    println!("counts {:?} unresolved {}", res.tally.counts, res.tally.unresolved);
    println!("final ratio {:.4}", res.tally.final_ratio());
    let tail: Vec<f64> = res.tally.partial_ratios[800..].to_vec();
    let (lo, hi) = tail.iter().fold((f64::MAX, f64::MIN), |(l, h), &x| (l.min(x), h.max(x)));
    println!("tail fluctuation {:.4}..{:.4}", lo, hi);
    println!("elapsed {:?}", t0.elapsed());
}
