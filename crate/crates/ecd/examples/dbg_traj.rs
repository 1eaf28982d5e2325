use ecd::objectives::*;
use ecd::optimizers::*;
use ecd::state::*;
use ecd::vector::ParameterVector;

fn main() {
    let obj = TwoBasin::new(2.8e-6);
    let hp = BbiHyperParams {
        dt: 1e-2, dv: 1e-3, de: 0.0, t0: 20, t1: 750, nb: 1,
        max_iters: 5_000, ..Default::default()
    };
    for seed in [1u64, 2, 3] {
        let mut state = bbi_init(&obj, &ParameterVector::new(vec![0.0, 0.0]), &hp, seed).unwrap();
        let mut bounced = false;
        println!("--- seed {seed}");
        for k in 0..3000u64 {
            if (state.c0 == hp.t0 && state.n_b < hp.nb) || state.c1 == hp.t1 {
                println!("  bounce at step {} |pi|={:.4} pi=({:.4},{:.4})", state.step, state.pi.norm(), state.pi[0], state.pi[1]);
                bbi_bounce(&mut state, &hp);
                println!("    after: pi=({:.4},{:.4})", state.pi[0], state.pi[1]);
                bounced = true;
            }
            bbi_step(&mut state, &obj, &hp).unwrap();
            if k % 250 == 0 || state.v_current < 0.0 {
                let th = &state.theta;
                let d1 = ((th[0]+2.0).powi(2)+(th[1]+2.0).powi(2)).sqrt();
                let d2 = ((th[0]-2.0).powi(2)+(th[1]-2.0).powi(2)).sqrt();
                println!("  step {:5} theta=({:+.3},{:+.3}) V={:+.4e} d1={:.3} d2={:.3} |pi|={:.3}", state.step, th[0], th[1], state.v_current, d1, d2, state.pi.norm());
            }
            if state.v_current < 0.0 { break; }
        }
        let _ = bounced;
    }
}
