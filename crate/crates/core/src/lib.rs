//! Variational multi-label image segmentation.
//!
//! The model partitions an image into `n` regions by minimizing, per label, a
//! Huber data term weighted by a per-pixel trade-off `lambda`, a Huber
//! regularizer on the partition-function gradient weighted by `1 - lambda`,
//! and a mutual-exclusivity penalty on overlapping labels. The trade-off is
//! recomputed every iteration from the fit residual, so regularization
//! concentrates where (and when) the model fits poorly. Optimization runs an
//! ADMM scheme in which every sub-step is closed form except one screened
//! Poisson solve handled by warm-started Gauss-Seidel sweeps.
//!
//! Entry points:
//!
//! - [`solver::run`] segments a [`field::ScalarField`] with
//!   [`solver::SolverParams`];
//! - [`phantom`] generates seeded synthetic inputs with exact ground truth;
//! - [`metrics::evaluate`] scores a labeling against ground truth;
//! - [`io`] reads and writes PGM/PPM/PNG images and label maps.
//!
//! The `book/` directory of the repository walks through the model and the
//! solver chapter by chapter; its code snippets compile against this crate
//! as doc-tests.

pub mod adaptive;
pub mod error;
pub mod field;
pub mod grid;
pub mod huber;
pub mod io;
pub mod metrics;
pub mod phantom;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use field::{LabelMap, ScalarField, VectorField};

/// Cap the solver's per-label parallelism at `n` threads. Takes effect only
/// if called before the first parallel region; later calls are ignored.
pub fn set_thread_limit(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

// Compile the book's code snippets as doc-tests so the guide cannot drift
// from the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            #[allow(dead_code)]
            struct $name;
        };
    }

    chapter!(FieldsAndOperators, "../../../book/src/fields-and-operators.md");
    chapter!(HuberAndProximal, "../../../book/src/huber-and-proximal.md");
    chapter!(AdaptiveRegularization, "../../../book/src/adaptive-regularization.md");
    chapter!(AdmmSolver, "../../../book/src/admm-solver.md");
    chapter!(PhantomsAndMetrics, "../../../book/src/phantoms-and-metrics.md");
}
