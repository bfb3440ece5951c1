//! Static clutter removal.
//!
//! Subtracts a per-cell background estimate over slow time so that static
//! echoes cancel while the phase-modulated human return survives.

use num_complex::Complex64;

use crate::cube::AdcCube;
use crate::error::{Error, Result};

/// Subtract a moving-average background estimate from every `(v, n)` cell.
///
/// For `window < ns` the background at frame `m` is the causal trailing
/// mean of the most recent `window` frames (truncated to the `m + 1`
/// available frames during warm-up). `window == ns` degenerates to
/// subtracting the whole-block mean from every frame, which keeps the
/// output free of warm-up transients and is the default the pipeline uses.
pub fn remove_static(cube: &AdcCube, window: usize) -> Result<AdcCube> {
    let cfg = cube.config();
    if window == 0 || window > cfg.ns {
        return Err(Error::Clutter(format!(
            "window {window} outside [1, {}]",
            cfg.ns
        )));
    }

    let cells = cfg.nv * cfg.nf;
    let mut out = cube.clone();

    if window == 1 {
        // Each sample minus itself.
        out.data_mut().fill(Complex64::new(0.0, 0.0));
        return Ok(out);
    }

    if window == cfg.ns {
        let scale = 1.0 / cfg.ns as f64;
        let mut mean = vec![Complex64::new(0.0, 0.0); cells];
        for m in 0..cfg.ns {
            for (acc, z) in mean.iter_mut().zip(cube.frame(m)) {
                *acc += z;
            }
        }
        for acc in mean.iter_mut() {
            *acc *= scale;
        }
        for m in 0..cfg.ns {
            let start = m * cells;
            let frame = &mut out.data_mut()[start..start + cells];
            for (z, bg) in frame.iter_mut().zip(&mean) {
                *z -= bg;
            }
        }
        return Ok(out);
    }

    let mut running = vec![Complex64::new(0.0, 0.0); cells];
    for m in 0..cfg.ns {
        for (acc, z) in running.iter_mut().zip(cube.frame(m)) {
            *acc += z;
        }
        if m >= window {
            for (acc, z) in running.iter_mut().zip(cube.frame(m - window)) {
                *acc -= z;
            }
        }
        let count = (m + 1).min(window) as f64;
        let start = m * cells;
        let frame = &mut out.data_mut()[start..start + cells];
        for (z, acc) in frame.iter_mut().zip(&running) {
            *z -= acc / count;
        }
    }
    Ok(out)
}
