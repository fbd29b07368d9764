//! ADMM solver for the multi-label segmentation energy.
//!
//! Each label carries a primal partition function `u`, a split copy `v` with
//! the sum-to-one constraint, a scaled dual `y`, shrinkage auxiliaries `r`
//! (data) and `z` (gradient), an intensity estimate `c` per channel, and a
//! per-pixel trade-off weight `lambda`. One outer iteration performs, per
//! label, the closed-form sequence
//!
//! ```text
//! c -> r -> nu -> lambda -> z -> u -> v~
//! ```
//!
//! then projects the collection `{v~}` onto the sum-to-one set and finishes
//! with dual ascent `y += u - v` against the projected `v`. The cross-label
//! exclusivity term reads the other labels' `u` from the previous iteration,
//! so the per-label updates are independent and run in parallel.

use rayon::prelude::*;

use crate::adaptive::{adaptive_lambda, residual_confidence};
use crate::error::{Error, Result};
use crate::field::{LabelMap, ScalarField, VectorField};
use crate::grid::{divergence, gradient};
use crate::huber::{huber, soft_shrink, HuberParams};
use crate::rng::Rng;

/// Which data cost feeds the confidence exponential when recomputing
/// `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaCost {
    /// The energy integrand including the `u` factor (the published update).
    Rho,
    /// The `u`-free pointwise cost `d`.
    Pointwise,
}

/// Adaptive per-pixel weights, or a fixed global trade-off (ablation mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    Adaptive,
    Global(f64),
}

/// All scalar knobs of the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub n_labels: usize,
    /// Huber threshold of the data term.
    pub eta: f64,
    /// Huber threshold of the regularizer.
    pub mu: f64,
    /// Sparsity weight of the Lasso step; caps `lambda` at `1 - alpha`.
    pub alpha: f64,
    /// Residual scale inside the confidence exponential.
    pub beta: f64,
    /// Weight of the mutual-exclusivity penalty.
    pub tau: f64,
    /// ADMM augmentation parameter.
    pub theta: f64,
    pub max_iters: usize,
    /// Stop once `max_i ||u_i - v_i||_inf` falls below this.
    pub primal_tol: f64,
    /// Gauss-Seidel sweeps per outer iteration (warm-started).
    pub gs_sweeps: usize,
    pub seed: u64,
    pub lambda_mode: LambdaMode,
    pub lambda_cost: LambdaCost,
    /// Relaxation factor in `(0, 1]` for the per-iteration `lambda` refresh:
    /// the new weight is `old + lambda_relax * (new - old)`. At 1 the weight
    /// is recomputed outright, which couples `lambda` and `u` into a feedback
    /// loop whose gain exceeds 1 for residuals of a few `beta`, producing
    /// limit cycles; values around 0.5 damp the loop without changing its
    /// fixed points.
    pub lambda_relax: f64,
    /// Unit of the data residual: input intensities in `[0, 1]` are
    /// multiplied by this before entering the data terms, which calibrates
    /// `eta` (the robust knee) and `beta` (the confidence scale) against a
    /// meaningful residual unit. The default 16 keeps the confidence
    /// exponential responsive over the whole `[0, 1]` range; the
    /// partition-function terms (`mu`, `tau`, `theta`) stay on the scale of
    /// `u`.
    pub intensity_scale: f64,
}

impl SolverParams {
    /// Defaults for every scalar except the label count.
    pub fn new(n_labels: usize) -> Self {
        Self {
            n_labels,
            eta: 0.5,
            mu: 0.5,
            alpha: 0.01,
            beta: 10.0,
            tau: 0.5,
            theta: 1.0,
            max_iters: 500,
            primal_tol: 1e-3,
            gs_sweeps: 10,
            seed: 0,
            lambda_mode: LambdaMode::Adaptive,
            lambda_cost: LambdaCost::Rho,
            lambda_relax: 0.5,
            intensity_scale: 24.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        }
        if self.n_labels == 0 {
            return Err(Error::InvalidParameter("n_labels must be at least 1".into()));
        }
        positive("eta", self.eta)?;
        positive("mu", self.mu)?;
        positive("beta", self.beta)?;
        positive("theta", self.theta)?;
        positive("primal_tol", self.primal_tol)?;
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be nonnegative, got {}",
                self.tau
            )));
        }
        if let LambdaMode::Global(g) = self.lambda_mode {
            if !(g.is_finite() && (0.0..=1.0).contains(&g)) {
                return Err(Error::InvalidParameter(format!(
                    "global lambda must lie in [0, 1], got {g}"
                )));
            }
        }
        positive("intensity_scale", self.intensity_scale)?;
        if !(self.lambda_relax.is_finite() && self.lambda_relax > 0.0 && self.lambda_relax <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda_relax must lie in (0, 1], got {}",
                self.lambda_relax
            )));
        }
        Ok(())
    }

    fn huber_eta(&self) -> HuberParams {
        HuberParams::new(self.eta).expect("validated")
    }

    fn huber_mu(&self) -> HuberParams {
        HuberParams::new(self.mu).expect("validated")
    }
}

/// Per-label variable bundle evolved by the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelState {
    /// Primal partition function, kept nonnegative.
    pub u: ScalarField,
    /// Split copy of `u`; the collection sums to one at every pixel.
    pub v: ScalarField,
    /// Scaled dual for the constraint `u = v`.
    pub y: ScalarField,
    /// Gradient auxiliary (shrinkage of `grad v`).
    pub z: VectorField,
    /// Data auxiliary, one channel per image channel.
    pub r: ScalarField,
    /// Intensity estimate per channel.
    pub c: Vec<f64>,
    /// Per-pixel trade-off weight, in `[0, 1 - alpha]`.
    pub lambda: ScalarField,
}

/// One row of the convergence log.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub energy: f64,
    pub primal_residual: f64,
    pub mean_lambda: Vec<f64>,
}

/// Final labeling plus everything needed to inspect the run.
#[derive(Debug, Clone)]
pub struct SegmentationResult {
    pub labels: LabelMap,
    pub soft_fields: Vec<ScalarField>,
    pub intensities: Vec<Vec<f64>>,
    pub diagnostics: Vec<IterationRecord>,
    pub iterations: usize,
    pub converged: bool,
}

/// Mean intensity of each assignment region, per channel; empty regions fall
/// back to the global mean.
fn region_means(image: &ScalarField, assignment: &LabelMap, n_labels: usize) -> Vec<Vec<f64>> {
    let channels = image.channels();
    let pixels = image.pixel_count();
    let mut sums = vec![vec![0.0; channels]; n_labels];
    let mut counts = vec![0usize; n_labels];
    for p in 0..pixels {
        let label = assignment.data()[p] as usize;
        counts[label] += 1;
        for ch in 0..channels {
            sums[label][ch] += image.channel(ch)[p];
        }
    }
    let global: Vec<f64> = (0..channels)
        .map(|ch| image.channel(ch).iter().sum::<f64>() / pixels as f64)
        .collect();
    (0..n_labels)
        .map(|i| {
            if counts[i] == 0 {
                global.clone()
            } else {
                sums[i].iter().map(|s| s / counts[i] as f64).collect()
            }
        })
        .collect()
}

/// Random per-pixel label assignment from the seeded stream, plus the initial
/// per-label state: `u = v =` indicator, zero duals and auxiliaries, region
/// means for `c`, and the iteration-zero `lambda`.
pub fn init_state(image: &ScalarField, params: &SolverParams) -> Result<Vec<LabelState>> {
    params.validate()?;
    let (w, h) = (image.width(), image.height());
    let pixels = image.pixel_count();
    if params.n_labels > pixels {
        return Err(Error::InvalidParameter(format!(
            "{} labels exceed the {} pixels available",
            params.n_labels, pixels
        )));
    }

    let mut rng = Rng::new(params.seed);
    let mut assignment = LabelMap::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            assignment.set(x, y, rng.below(params.n_labels) as u32);
        }
    }
    let means = region_means(image, &assignment, params.n_labels);

    let lambda0 = match params.lambda_mode {
        LambdaMode::Adaptive => 1.0 - params.alpha,
        LambdaMode::Global(g) => g,
    };

    let states = (0..params.n_labels)
        .map(|i| {
            let mut u = ScalarField::zeros(w, h, 1);
            for yy in 0..h {
                for xx in 0..w {
                    if assignment.at(xx, yy) == i as u32 {
                        u.set(xx, yy, 0, 1.0);
                    }
                }
            }
            LabelState {
                v: u.clone(),
                u,
                y: ScalarField::zeros(w, h, 1),
                z: VectorField::zeros(w, h, 1),
                r: ScalarField::zeros(w, h, image.channels()),
                c: means[i].clone(),
                lambda: ScalarField::constant(w, h, 1, lambda0),
            }
        })
        .collect();
    Ok(states)
}

/// Closed-form intensity update: the `lambda u`-weighted mean of `f - r` per
/// channel. A vanishing denominator holds the previous estimate.
pub fn update_intensity(
    image: &ScalarField,
    r: &ScalarField,
    lambda: &ScalarField,
    u: &ScalarField,
    prev_c: &[f64],
) -> Vec<f64> {
    let pixels = image.pixel_count();
    let lam = lambda.channel(0);
    let uu = u.channel(0);
    let denom: f64 = (0..pixels).map(|p| lam[p] * uu[p]).sum();
    (0..image.channels())
        .map(|ch| {
            if denom < 1e-8 {
                prev_c[ch]
            } else {
                let f = image.channel(ch);
                let rr = r.channel(ch);
                let num: f64 = (0..pixels).map(|p| lam[p] * (f[p] - rr[p]) * uu[p]).sum();
                num / denom
            }
        })
        .collect()
}

/// Data auxiliary: `r = shrink(f - c, eta)` per channel.
pub fn update_r(image: &ScalarField, c: &[f64], eta: f64) -> ScalarField {
    let mut out = image.clone();
    for ch in 0..image.channels() {
        let cc = c[ch];
        for v in out.channel_mut(ch) {
            *v = soft_shrink(*v - cc, eta);
        }
    }
    out
}

/// Gradient auxiliary: componentwise shrinkage of `grad v` by `mu`.
pub fn update_z(v: &ScalarField, mu: f64) -> VectorField {
    let mut g = gradient(v);
    g.map_inplace(|x| soft_shrink(x, mu));
    g
}

/// Pointwise data cost `d = |r| + (f - c - r)^2 / (2 eta)`, summed over
/// channels. Equals the Huber loss of `f - c` once `r` is the shrinkage
/// minimizer.
pub fn pointwise_data_cost(image: &ScalarField, c: &[f64], r: &ScalarField, eta: f64) -> ScalarField {
    let (w, h) = (image.width(), image.height());
    let pixels = image.pixel_count();
    let mut out = ScalarField::zeros(w, h, 1);
    let dst = out.channel_mut(0);
    for ch in 0..image.channels() {
        let f = image.channel(ch);
        let rr = r.channel(ch);
        let cc = c[ch];
        for p in 0..pixels {
            let t = f[p] - cc - rr[p];
            dst[p] += rr[p].abs() + t * t / (2.0 * eta);
        }
    }
    out
}

/// Unclamped primal update
/// `u~ = v - y - (lambda / theta) d - (tau / theta) sum_{j != i} u_j`.
pub fn unconstrained_u(
    v: &ScalarField,
    y: &ScalarField,
    d: &ScalarField,
    lambda: &ScalarField,
    others_u: &ScalarField,
    tau: f64,
    theta: f64,
) -> ScalarField {
    let mut out = v.clone();
    let dst = out.channel_mut(0);
    let yy = y.channel(0);
    let dd = d.channel(0);
    let lam = lambda.channel(0);
    let others = others_u.channel(0);
    for p in 0..dst.len() {
        dst[p] -= yy[p] + lam[p] / theta * dd[p] + tau / theta * others[p];
    }
    out
}

/// Projection onto the nonnegative orthant, in place.
pub fn project_nonnegative(field: &mut ScalarField) {
    field.map_inplace(|v| v.max(0.0));
}

/// Clamped primal update: nonnegative projection of [`unconstrained_u`].
pub fn update_u(
    v: &ScalarField,
    y: &ScalarField,
    d: &ScalarField,
    lambda: &ScalarField,
    others_u: &ScalarField,
    tau: f64,
    theta: f64,
) -> ScalarField {
    let mut u = unconstrained_u(v, y, d, lambda, others_u, tau, theta);
    project_nonnegative(&mut u);
    u
}

/// Per-pixel diffusion coefficient `xi = (1 - lambda) / (mu theta)` of the
/// split-variable linear system.
pub fn xi_field(lambda: &ScalarField, mu: f64, theta: f64) -> ScalarField {
    lambda.map(|l| (1.0 - l) / (mu * theta))
}

/// Right-hand side `u + y - xi .* div z` of the split-variable system.
pub fn v_system_rhs(
    u: &ScalarField,
    y: &ScalarField,
    z: &VectorField,
    xi: &ScalarField,
) -> ScalarField {
    let div_z = divergence(z);
    let mut out = u.zip_map(y, |a, b| a + b);
    let dst = out.channel_mut(0);
    let xs = xi.channel(0);
    let dz = div_z.channel(0);
    for p in 0..dst.len() {
        dst[p] -= xs[p] * dz[p];
    }
    out
}

/// Apply `(I - xi(x) Laplacian)` with the solver's stencil; used for
/// residual checks of the linear system.
pub fn apply_screened_operator(xi: &ScalarField, v: &ScalarField) -> ScalarField {
    let lap = crate::grid::laplacian(v);
    let mut out = v.clone();
    let dst = out.channel_mut(0);
    let xs = xi.channel(0);
    let ls = lap.channel(0);
    for p in 0..dst.len() {
        dst[p] -= xs[p] * ls[p];
    }
    out
}

/// Lexicographic Gauss-Seidel sweeps on `(I - xi(x) Laplacian) v = b`,
/// updating `v` in place. The stencil evaluates `xi` at the center pixel, so
/// every row is strictly diagonally dominant and the sweeps converge.
pub fn gauss_seidel_sweeps(xi: &ScalarField, b: &ScalarField, v: &mut ScalarField, sweeps: usize) {
    let (w, h) = (b.width(), b.height());
    let xs = xi.channel(0).to_vec();
    let bs = b.channel(0).to_vec();
    let vs = v.channel_mut(0);
    for _ in 0..sweeps {
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let mut neighbor_sum = 0.0;
                let mut degree = 0.0;
                if x > 0 {
                    neighbor_sum += vs[i - 1];
                    degree += 1.0;
                }
                if x + 1 < w {
                    neighbor_sum += vs[i + 1];
                    degree += 1.0;
                }
                if y > 0 {
                    neighbor_sum += vs[i - w];
                    degree += 1.0;
                }
                if y + 1 < h {
                    neighbor_sum += vs[i + w];
                    degree += 1.0;
                }
                vs[i] = (bs[i] + xs[i] * neighbor_sum) / (1.0 + xs[i] * degree);
            }
        }
    }
}

/// Split-variable update: assemble the screened system for label `i` and run
/// the Gauss-Seidel budget warm-started from the previous `v`.
pub fn update_v_tilde(
    u: &ScalarField,
    y: &ScalarField,
    z: &VectorField,
    lambda: &ScalarField,
    mu: f64,
    theta: f64,
    warm_start: &ScalarField,
    sweeps: usize,
) -> ScalarField {
    let xi = xi_field(lambda, mu, theta);
    let b = v_system_rhs(u, y, z, &xi);
    let mut v = warm_start.clone();
    gauss_seidel_sweeps(&xi, &b, &mut v, sweeps);
    v
}

/// Orthogonal projection onto the sum-to-one set: subtract the common excess
/// `(sum_j v_j - 1) / n` from every field. Idempotent.
pub fn project_sum_to_one(fields: &mut [ScalarField]) {
    let n = fields.len();
    assert!(n >= 1, "projection needs at least one field");
    let pixels = fields[0].pixel_count();
    let mut excess = vec![0.0; pixels];
    for f in fields.iter() {
        let ch = f.channel(0);
        for p in 0..pixels {
            excess[p] += ch[p];
        }
    }
    for e in &mut excess {
        *e = (*e - 1.0) / n as f64;
    }
    for f in fields.iter_mut() {
        let ch = f.channel_mut(0);
        for p in 0..pixels {
            ch[p] -= excess[p];
        }
    }
}

/// Dual ascent `y += u - v` with the post-projection `v`.
pub fn update_dual(y: &mut ScalarField, u: &ScalarField, v: &ScalarField) {
    let dst = y.channel_mut(0);
    let us = u.channel(0);
    let vs = v.channel(0);
    for p in 0..dst.len() {
        dst[p] += us[p] - vs[p];
    }
}

/// Largest `||u_i - v_i||_inf` over the labels.
pub fn primal_residual(states: &[LabelState]) -> f64 {
    states
        .iter()
        .map(|s| {
            s.u.channel(0)
                .iter()
                .zip(s.v.channel(0))
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        })
        .fold(0.0, f64::max)
}

/// Diagnostic energy: per label, the `lambda`-weighted Huber data term on
/// `u`, the exclusivity cross term, and the `(1 - lambda)`-weighted Huber
/// regularizer of `grad u` (componentwise).
pub fn energy(states: &[LabelState], image: &ScalarField, params: &SolverParams) -> f64 {
    let h_eta = params.huber_eta();
    let h_mu = params.huber_mu();
    let pixels = image.pixel_count();
    let mut sum_u = vec![0.0; pixels];
    for s in states {
        let us = s.u.channel(0);
        for p in 0..pixels {
            sum_u[p] += us[p];
        }
    }
    let mut total = 0.0;
    for s in states {
        let us = s.u.channel(0);
        let lam = s.lambda.channel(0);
        let grad_u = gradient(&s.u);
        let gx = grad_u.x.channel(0);
        let gy = grad_u.y.channel(0);
        for p in 0..pixels {
            let mut data = 0.0;
            for ch in 0..image.channels() {
                data += huber(image.channel(ch)[p] - s.c[ch], h_eta);
            }
            let others = sum_u[p] - us[p];
            let reg = huber(gx[p], h_mu) + huber(gy[p], h_mu);
            total += lam[p] * data * us[p] + params.tau * others * us[p] + (1.0 - lam[p]) * reg;
        }
    }
    total
}

/// Per-pixel argmax over the soft fields; ties break toward the lowest label
/// index.
pub fn extract_labels(soft_fields: &[ScalarField]) -> LabelMap {
    assert!(!soft_fields.is_empty(), "need at least one field");
    let (w, h) = (soft_fields[0].width(), soft_fields[0].height());
    let mut labels = LabelMap::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut best = 0usize;
            let mut best_v = soft_fields[0].at(x, y, 0);
            for (i, f) in soft_fields.iter().enumerate().skip(1) {
                let v = f.at(x, y, 0);
                if v > best_v {
                    best_v = v;
                    best = i;
                }
            }
            labels.set(x, y, best as u32);
        }
    }
    labels
}

/// Stateful driver exposing the per-iteration step; [`run`] is the
/// convenience wrapper most callers want.
///
/// Internally the solver works on `intensity_scale * image`, so `c`, `r`,
/// the data cost, and the reported energy are all measured in data units
/// (gray levels under the default scale of 255).
pub struct Solver {
    /// The input image times `intensity_scale`.
    image: ScalarField,
    params: SolverParams,
    states: Vec<LabelState>,
    iteration: usize,
    /// Uniform weight field for the intensity step.
    uniform: ScalarField,
}

impl Solver {
    pub fn new(image: &ScalarField, params: SolverParams) -> Result<Self> {
        params.validate()?;
        if !image.is_finite() {
            return Err(Error::Contract("image contains non-finite values".into()));
        }
        if image.data().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Contract(
                "image intensities must lie in [0, 1]".into(),
            ));
        }
        let scaled = image.map(|v| v * params.intensity_scale);
        let states = init_state(&scaled, &params)?;
        Ok(Self {
            uniform: ScalarField::constant(image.width(), image.height(), 1, 1.0),
            image: scaled,
            params,
            states,
            iteration: 0,
        })
    }

    pub fn states(&self) -> &[LabelState] {
        &self.states
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// One outer ADMM iteration over all labels.
    pub fn step(&mut self) -> Result<IterationRecord> {
        self.iteration += 1;
        let params = &self.params;
        let image = &self.image;
        let pixels = image.pixel_count();

        // snapshot of sum_j u_j^k for the Jacobi-style exclusivity coupling
        let mut sum_u = ScalarField::zeros(image.width(), image.height(), 1);
        {
            let dst = sum_u.channel_mut(0);
            for s in &self.states {
                let us = s.u.channel(0);
                for p in 0..pixels {
                    dst[p] += us[p];
                }
            }
        }

        let uniform = &self.uniform;
        self.states.par_iter_mut().try_for_each(|s| -> Result<()> {
            let others = s.u.zip_map(&sum_u, |own, total| total - own);

            // intensity step: minimize the data residual over the label's
            // support (uniform weights). The lambda-weighted mean localizes
            // the pull to well-fitting pixels and deadlocks the estimates
            // whenever all labels start near the global mean.
            let c_new = update_intensity(image, &s.r, uniform, &s.u, &s.c);
            let r_new = update_r(image, &c_new, params.eta);
            let d = pointwise_data_cost(image, &c_new, &r_new, params.eta);

            if let LambdaMode::Adaptive = params.lambda_mode {
                let cost = match params.lambda_cost {
                    LambdaCost::Rho => d.zip_map(&s.u, |dv, uv| dv * uv),
                    LambdaCost::Pointwise => d.clone(),
                };
                let nu = residual_confidence(&cost, params.beta)?;
                let target = adaptive_lambda(&nu, params.alpha);
                let relax = params.lambda_relax;
                s.lambda = s
                    .lambda
                    .zip_map(&target, |old, new| old + relax * (new - old));
            }

            let z_new = update_z(&s.v, params.mu);
            let u_new = update_u(&s.v, &s.y, &d, &s.lambda, &others, params.tau, params.theta);
            let v_tilde = update_v_tilde(
                &u_new,
                &s.y,
                &z_new,
                &s.lambda,
                params.mu,
                params.theta,
                &s.v,
                params.gs_sweeps,
            );

            s.c = c_new;
            s.r = r_new;
            s.z = z_new;
            s.u = u_new;
            s.v = v_tilde;
            Ok(())
        })?;

        // synchronization point: sum-to-one projection, then dual ascent
        // against the projected iterate
        {
            let mut vs: Vec<ScalarField> = self.states.iter().map(|s| s.v.clone()).collect();
            project_sum_to_one(&mut vs);
            for (s, v) in self.states.iter_mut().zip(vs) {
                s.v = v;
            }
        }
        for s in &mut self.states {
            let u = s.u.clone();
            let v = s.v.clone();
            update_dual(&mut s.y, &u, &v);
        }

        let record = IterationRecord {
            iter: self.iteration,
            energy: energy(&self.states, &self.image, params),
            primal_residual: primal_residual(&self.states),
            mean_lambda: self
                .states
                .iter()
                .map(|s| s.lambda.sum() / pixels as f64)
                .collect(),
        };
        self.check_finite(&record)?;
        Ok(record)
    }

    fn check_finite(&self, record: &IterationRecord) -> Result<()> {
        let bad = |name: &str| Error::NonFinite {
            variable: name.to_string(),
            iteration: self.iteration,
        };
        for s in &self.states {
            if !s.u.is_finite() {
                return Err(bad("u"));
            }
            if !s.v.is_finite() {
                return Err(bad("v"));
            }
            if !s.y.is_finite() {
                return Err(bad("y"));
            }
            if !s.lambda.is_finite() {
                return Err(bad("lambda"));
            }
            if s.c.iter().any(|c| !c.is_finite()) {
                return Err(bad("c"));
            }
        }
        if !record.energy.is_finite() {
            return Err(bad("energy"));
        }
        Ok(())
    }

    /// Iterate to convergence or the iteration budget and extract the
    /// labeling.
    pub fn run(mut self) -> Result<SegmentationResult> {
        let mut diagnostics = Vec::new();
        let mut converged = false;
        for _ in 0..self.params.max_iters {
            let record = self.step()?;
            let residual = record.primal_residual;
            diagnostics.push(record);
            if residual < self.params.primal_tol {
                converged = true;
                break;
            }
        }
        let soft_fields: Vec<ScalarField> = self.states.iter().map(|s| s.u.clone()).collect();
        // report intensities back on the [0, 1] scale of the input
        let scale = self.params.intensity_scale;
        Ok(SegmentationResult {
            labels: extract_labels(&soft_fields),
            intensities: self
                .states
                .iter()
                .map(|s| s.c.iter().map(|c| c / scale).collect())
                .collect(),
            soft_fields,
            diagnostics,
            iterations: self.iteration,
            converged,
        })
    }
}

/// Segment `image` into `params.n_labels` regions.
pub fn run(image: &ScalarField, params: SolverParams) -> Result<SegmentationResult> {
    Solver::new(image, params)?.run()
}
