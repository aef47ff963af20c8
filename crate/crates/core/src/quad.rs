//! Adaptive Simpson quadrature for the smooth one-dimensional integrals
//! used by the damping rates and the transition-amplitude oracle.

use crate::{Error, Result};

/// Default relative tolerance for physics integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 60;

// Subdivisions forced before the error estimate may accept an interval.
// Periodic integrands can alias on the first few dyadic grids (all sample
// points sitting on the same phase of the oscillation), which makes the
// coarse and refined Simpson estimates agree spuriously.
const MIN_DEPTH: u32 = 6;

/// Integrates `f` over `[a, b]` with adaptive Simpson refinement until the
/// local error estimate satisfies the relative tolerance (with a small
/// absolute floor so that integrals near zero terminate).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature limits must be finite".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    // Magnitude estimate for the absolute error floor. A composite pass is
    // needed here: a single Simpson evaluation can miss a narrow peak by
    // many orders of magnitude, which would make the tolerance unattainable
    // and the refinement below effectively unbounded.
    let panels = 64;
    let h = (b - a) / panels as f64;
    let mut coarse = 0.0;
    for i in 0..panels {
        let x0 = a + i as f64 * h;
        coarse += simpson(x0, x0 + h, f(x0), f(x0 + 0.5 * h), f(x0 + h)).abs();
    }
    let scale = coarse.max(whole.abs()).max(1e-300);
    let tol = rel_tol * scale;
    let value = adapt(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    if !value.is_finite() {
        return Err(Error::Numeric("quadrature produced a non-finite value".into()));
    }
    Ok(value)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let deep_enough = depth <= MAX_DEPTH - MIN_DEPTH;
    if (deep_enough && delta.abs() <= 15.0 * tol)
        || (b - a).abs() < 1e-14 * (a.abs() + b.abs() + 1.0)
    {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "adaptive quadrature failed to converge on [{a:.3e}, {b:.3e}] (residual {:.3e})",
            delta.abs()
        )));
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}
