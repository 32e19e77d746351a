//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands on finite
//! real segments, with a deterministic worst-first refinement order.

use crate::error::{Error, Result};
use num::complex::Complex64;

// G7K15 nodes and weights (positive half; symmetric).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub evaluations: usize,
}

fn g7k15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, usize) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut evals = 0;
    for j in 0..8 {
        let x = XGK[j];
        let (fp, fm) = if j == 7 {
            let v = f(center);
            evals += 1;
            (v, Complex64::new(0.0, 0.0))
        } else {
            let vp = f(center + half * x);
            let vm = f(center - half * x);
            evals += 2;
            (vp, vm)
        };
        let pair = if j == 7 { fp } else { fp + fm };
        kronrod += WGK[j] * pair;
        // Gauss nodes sit at the odd Kronrod indices plus the center.
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).norm();
    (value, err, evals)
}

/// Adaptive integration of f over [a, b] to absolute tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult> {
    let (v, e, mut evals) = g7k15(&mut f, a, b);
    // Worst-first interval refinement.
    let mut intervals: Vec<(f64, f64, Complex64, f64)> = vec![(a, b, v, e)];
    let mut splits = 0;
    loop {
        let total_err: f64 = intervals.iter().map(|t| t.3).sum();
        if total_err <= tol {
            break;
        }
        if splits >= max_subdivisions {
            return Err(Error::MaxSubdivisions);
        }
        // Deterministic worst pick: largest error, ties by left endpoint.
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|(i, x), (j, y)| {
                x.3.partial_cmp(&y.3)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(j.cmp(i))
            })
            .expect("nonempty");
        let (ia, ib, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (ia + ib);
        let (v1, e1, n1) = g7k15(&mut f, ia, mid);
        let (v2, e2, n2) = g7k15(&mut f, mid, ib);
        evals += n1 + n2;
        intervals.push((ia, mid, v1, e1));
        intervals.push((mid, ib, v2, e2));
        splits += 1;
    }
    // Fixed summation order for reproducibility.
    intervals.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let value = intervals.iter().fold(Complex64::new(0.0, 0.0), |acc, t| acc + t.2);
    let abs_error = intervals.iter().map(|t| t.3).sum();
    Ok(QuadResult {
        value,
        abs_error,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| Complex64::new(x * x, 0.0), 0.0, 1.0, 1e-12, 100).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_cos() {
        let r = integrate(|x| Complex64::new((10.0 * x).cos(), 0.0), 0.0, PI, 1e-12, 400).unwrap();
        assert!((r.value.re - (10.0 * PI).sin() / 10.0).abs() < 1e-11);
    }

    #[test]
    fn gaussian_tails() {
        let r = integrate(|x| Complex64::new((-x * x).exp(), 0.0), -8.0, 8.0, 1e-12, 400).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion() {
        let out = integrate(|x| Complex64::new((1e4 * x).cos(), 0.0), 0.0, 1.0, 1e-14, 3);
        assert!(matches!(out, Err(Error::MaxSubdivisions)));
    }
}
