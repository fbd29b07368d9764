use seglab::metrics::evaluate;
use seglab::phantom::noisy_rectangles_phantom;
use seglab::solver::{run, LambdaMode, SolverParams};

fn main() {
    let phantom = noisy_rectangles_phantom(96, [0.01, 0.03, 0.05, 0.08], 11).unwrap();
    for (kappa, iters) in [(0.1f64, 500usize), (0.1, 1500), (0.2, 1500), (0.3, 1500)] {
        let mut wins = 0;
        let mut lines = Vec::new();
        for seed in 0..6u64 {
            let mut params = SolverParams::new(4);
            params.seed = seed;
            params.intensity_scale = 24.0;
            params.lambda_relax = kappa;
            params.max_iters = iters;
            let adaptive = run(&phantom.image, params.clone()).unwrap();
            let acc_a = evaluate(&adaptive.labels, &phantom.ground_truth).unwrap().pixel_accuracy;
            let mut accs = Vec::new();
            for lam in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let mut p = params.clone();
                p.lambda_mode = LambdaMode::Global(lam);
                let r = run(&phantom.image, p).unwrap();
                accs.push(evaluate(&r.labels, &phantom.ground_truth).unwrap().pixel_accuracy);
            }
            let best = accs.iter().cloned().fold(0.0, f64::max);
            if acc_a >= best { wins += 1; }
            lines.push(format!("  seed {seed}: adaptive {acc_a:.4} vs best {best:.4} (globals {:?})",
                accs.iter().map(|a| (a * 1000.0).round() / 1000.0).collect::<Vec<_>>()));
        }
        println!("kappa {kappa} iters {iters}: wins {wins}/6");
        for l in lines { println!("{l}"); }
    }
}
