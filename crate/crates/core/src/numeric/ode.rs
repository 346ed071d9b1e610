//! Dormand–Prince 5(4) with adaptive steps.

use num_traits::Float;

use super::NumericError;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_STAR: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
}

impl<T: Float> OdeOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { rtol: tol, atol: tol, max_steps: 100_000 }
    }
}

fn k<T: Float>(v: f64) -> T {
    T::from(v).expect("representable constant")
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`; `f` returns `None` near a singularity.
pub fn dopri5<T, F, const N: usize>(mut f: F, t0: T, y0: [T; N], t1: T, opts: OdeOptions<T>) -> Result<[T; N], NumericError>
where
    T: Float,
    F: FnMut(T, &[T; N]) -> Option<[T; N]>,
{
    let span = t1 - t0;
    if span == T::zero() {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut h = span.abs() / k(64.0);
    let h_min = span.abs() * k(1e-14);
    let (mut t, mut y) = (t0, y0);
    for _ in 0..opts.max_steps {
        let left = (t1 - t).abs();
        if left <= h_min {
            return Ok(y);
        }
        h = h.min(left);
        let mut ks = [[T::zero(); N]; 7];
        let mut failed = false;
        for s in 0..7 {
            let mut yi = y;
            for (j, kj) in ks.iter().enumerate().take(s) {
                for (yv, kv) in yi.iter_mut().zip(kj) {
                    *yv = *yv + dir * h * k::<T>(A[s][j]) * *kv;
                }
            }
            match f(t + dir * h * k(C[s]), &yi) {
                Some(v) if v.iter().all(|c| c.is_finite()) => ks[s] = v,
                _ => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            h = h / k(4.0);
            if h < h_min {
                return Err(NumericError::Singular);
            }
            continue;
        }
        let mut y5 = y;
        let mut err = T::zero();
        for i in 0..N {
            let (mut hi, mut lo) = (T::zero(), T::zero());
            for s in 0..7 {
                hi = hi + k::<T>(B[s]) * ks[s][i];
                lo = lo + k::<T>(B_STAR[s]) * ks[s][i];
            }
            y5[i] = y[i] + dir * h * hi;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let e = h * (hi - lo) / sc;
            err = err + e * e;
        }
        let err = (err / k(N as f64)).sqrt();
        if err <= T::one() {
            t = t + dir * h;
            y = y5;
        }
        let fac = if err == T::zero() { k(5.0) } else { (k::<T>(0.9) * err.powf(k(-0.2))).max(k(0.2)).min(k(5.0)) };
        h = h * fac;
        if h < h_min {
            return Err(NumericError::StepUnderflow);
        }
    }
    Err(NumericError::StepUnderflow)
}
