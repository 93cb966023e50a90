//! One-dimensional quadrature used by the signal and detection modules.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("adaptive quadrature could not certify absolute tolerance {tol:e} on [{a}, {b}]")]
    ToleranceNotMet { a: f64, b: f64, tol: f64 },
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` with an absolute error
/// budget `tol`. The usual interval-bisection scheme: a panel is accepted
/// when the two-half estimate differs from the whole-panel estimate by less
/// than `15 * tol`, and the Richardson correction term is added.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let tol = tol.max(f64::MIN_POSITIVE);
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    bisect(f, a, m, b, fa, fm, fb, whole, tol, MAX_DEPTH)
        .ok_or(QuadError::ToleranceNotMet { a, b, tol })
}

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn bisect<F>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let half = 0.5 * tol;
    let l = bisect(f, a, lm, m, fa, flm, fm, left, half, depth - 1)?;
    let r = bisect(f, m, rm, b, fm, frm, fb, right, half, depth - 1)?;
    Some(l + r)
}

/// Compensated (Kahan) summation; used wherever many small quadrature or
/// sweep contributions are folded in a fixed order.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
