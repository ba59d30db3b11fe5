// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Principal branch W0 by Halley iteration.
pub fn lambert_w(z: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if z.is_nan() || z < branch {
        return Err(Error::Domain(format!("lambert_w needs z >= -1/e, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == branch {
        return Ok(-1.0);
    }
    let mut w = if z < -0.25 {
        // Series around the branch point converges much faster there.
        let p = (2.0 * (E * z + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0
    } else {
        z.ln_1p()
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}
