//! Discrete differential operators on the pixel grid.
//!
//! The discretization is fixed across the whole crate: forward differences
//! with a Neumann boundary (the outward difference at the last row/column is
//! zero), and a divergence defined as the exact negative adjoint of the
//! gradient, so that `<grad u, p> = <u, -div p>` holds to machine precision
//! on every grid. The Laplacian is literally `div(grad(u))`, which keeps the
//! linear system solved for the split variable symmetric negative
//! semi-definite.
//!
//! All operators act channel by channel.

use crate::field::{ScalarField, VectorField};

/// Forward-difference gradient with Neumann boundary.
pub fn gradient(field: &ScalarField) -> VectorField {
    let (w, h, c) = (field.width(), field.height(), field.channels());
    let mut out = VectorField::zeros(w, h, c);
    for ch in 0..c {
        let src = field.channel(ch);
        let gx = out.x.channel_mut(ch);
        for y in 0..h {
            let row = y * w;
            for x in 0..w.saturating_sub(1) {
                gx[row + x] = src[row + x + 1] - src[row + x];
            }
        }
        let gy = out.y.channel_mut(ch);
        for y in 0..h.saturating_sub(1) {
            let row = y * w;
            for x in 0..w {
                gy[row + x] = src[row + w + x] - src[row + x];
            }
        }
    }
    out
}

/// Negative adjoint of [`gradient`]: backward differences with mirrored
/// boundary handling, so the adjoint identity holds exactly.
pub fn divergence(field: &VectorField) -> ScalarField {
    let (w, h, c) = (field.width(), field.height(), field.channels());
    let mut out = ScalarField::zeros(w, h, c);
    for ch in 0..c {
        let px = field.x.channel(ch);
        let py = field.y.channel(ch);
        let dst = out.channel_mut(ch);
        for y in 0..h {
            let row = y * w;
            for x in 0..w {
                let i = row + x;
                // x-part: p[x] - p[x-1]; first column keeps p[0], last column
                // only removes p[w-2] because the gradient's last column is
                // structurally zero.
                let dx = if w == 1 {
                    0.0
                } else if x == 0 {
                    px[i]
                } else if x == w - 1 {
                    -px[i - 1]
                } else {
                    px[i] - px[i - 1]
                };
                let dy = if h == 1 {
                    0.0
                } else if y == 0 {
                    py[i]
                } else if y == h - 1 {
                    -py[i - w]
                } else {
                    py[i] - py[i - w]
                };
                dst[i] = dx + dy;
            }
        }
    }
    out
}

/// `div(grad(u))` with the module's boundary convention (same code path).
pub fn laplacian(field: &ScalarField) -> ScalarField {
    divergence(&gradient(field))
}
