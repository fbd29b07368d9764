use seglab::metrics::evaluate;
use seglab::phantom::{junction_phantom, piecewise_constant_phantom};
use seglab::solver::{run, SegmentationResult, SolverParams};

fn has_dups(result: &SegmentationResult) -> bool {
    let total = result.labels.data().len() as f64;
    let cs = &result.intensities;
    let mut cover = vec![0usize; cs.len()];
    for &l in result.labels.data() { cover[l as usize] += 1; }
    for i in 0..cs.len() {
        for j in 0..i {
            let dist = cs[i].iter().zip(&cs[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if dist < 0.05 && cover[i] as f64 / total > 0.01 && cover[j] as f64 / total > 0.01 {
                return true;
            }
        }
    }
    false
}

fn main() {
    let scale = 24.0f64;
    let kappa = 0.1f64;
    for n in [2usize, 4] {
        let p = piecewise_constant_phantom(n, 64, 20 + n as u64).unwrap();
        let mut good = 0;
        for seed in 0..10u64 {
            let mut params = SolverParams::new(n);
            params.seed = seed;
            params.intensity_scale = scale;
            params.lambda_relax = kappa;
            let r = run(&p.image, params).unwrap();
            let acc = evaluate(&r.labels, &p.ground_truth).unwrap().pixel_accuracy;
            if r.converged && acc == 1.0 { good += 1; }
        }
        println!("pc {n}: {good}/10");
    }
    for size in [64usize, 96] {
        print!("junction {size} interleaved scale {scale} kappa {kappa}: ");
        for regions in [5usize, 7, 9] {
            let phantom = junction_phantom(regions, size, 0.25).unwrap();
            let mut d_on = 0;
            let mut d_off = 0;
            for seed in 0..10u64 {
                for (tau, counter) in [(0.5, &mut d_on), (0.0, &mut d_off)] {
                    let mut params = SolverParams::new(regions - 1);
                    params.seed = seed;
                    params.tau = tau;
                    params.intensity_scale = scale;
                    params.lambda_relax = kappa;
                    let result = run(&phantom.image, params).unwrap();
                    if has_dups(&result) { *counter += 1; }
                }
            }
            print!("{regions}r {d_on}|{d_off}  ");
        }
        println!();
    }
}
