//! Complex Gamma machinery: principal log-Gamma, polygamma values, truncated
//! Laurent/Taylor expansions at rational centers, and the Stirling decay
//! bounds used to truncate contour integrals.

use crate::error::{Error, Result};
use crate::rational::{rat_to_f64, Rat};
use num::complex::Complex64;
use num::{One, Signed, Zero};
use std::f64::consts::PI;

// Lanczos coefficients, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Principal branch of log Gamma; Lanczos with reflection for Re z < 1/2.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleAt(z.re));
    }
    if z.re < 0.5 {
        // log pi - log sin(pi z) - log Gamma(1 - z), with a large-|Im| safe
        // evaluation of log sin.
        let ls = log_sin_pi(z);
        let lg = log_gamma_shifted(Complex64::new(1.0, 0.0) - z);
        return Ok(Complex64::new(PI.ln(), 0.0) - ls - lg);
    }
    Ok(log_gamma_shifted(z))
}

fn log_gamma_shifted(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * t.ln() - t + acc.ln()
}

fn log_sin_pi(z: Complex64) -> Complex64 {
    let y = z.im;
    if y.abs() < 20.0 {
        return (PI * z).sin().ln();
    }
    let i = Complex64::new(0.0, 1.0);
    if y > 0.0 {
        // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) * (i/2)... expanded so the
        // exponentials stay bounded.
        let corr = (Complex64::new(1.0, 0.0) - (2.0 * i * PI * z).exp()).ln();
        -i * PI * z + corr + (i / 2.0).ln()
    } else {
        let corr = (Complex64::new(1.0, 0.0) - (-2.0 * i * PI * z).exp()).ln();
        i * PI * z + corr + (-i / 2.0).ln()
    }
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

// Bernoulli numbers B_2 .. B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Polygamma psi^{(m)}(x) for real x > 0: recurrence up to the asymptotic
/// regime, then the Bernoulli tail.
pub fn polygamma(m: usize, x: f64) -> f64 {
    assert!(x > 0.0, "polygamma needs x > 0");
    let mut x = x;
    let mut acc = 0.0f64;
    let m_fact: f64 = (1..=m).map(|j| j as f64).product::<f64>().max(1.0);
    while x < 25.0 {
        // psi^{(m)}(x) = psi^{(m)}(x+1) - (-1)^m m! x^{-m-1}
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc -= sign * m_fact / x.powi(m as i32 + 1);
        x += 1.0;
    }
    let tail = if m == 0 {
        let mut s = x.ln() - 0.5 / x;
        let x2 = x * x;
        let mut xp = x2;
        for (k, b) in BERNOULLI.iter().enumerate() {
            let two_k = 2 * (k + 1);
            s -= b / (two_k as f64 * xp);
            xp *= x2;
        }
        s
    } else {
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        let mm1_fact: f64 = (1..m).map(|j| j as f64).product::<f64>().max(1.0);
        let mut s = mm1_fact / x.powi(m as i32) + m_fact / (2.0 * x.powi(m as i32 + 1));
        let mut xp = x.powi(m as i32 + 2);
        for (k, b) in BERNOULLI.iter().enumerate() {
            let two_k = 2 * (k + 1);
            // B_{2k} (2k + m - 1)! / (2k)! / x^{2k + m}
            let mut ratio = 1.0f64;
            for j in 1..m {
                ratio *= (two_k + j) as f64;
            }
            s += b * ratio / xp;
            xp *= x * x;
        }
        sign * s
    };
    acc + tail
}

/// A truncated Laurent series in one variable around a fixed center.
#[derive(Debug, Clone)]
pub struct TruncatedSeries1 {
    pub min_order: i32,
    /// Highest retained order (inclusive).
    pub max_order: i32,
    /// coeffs[j] is the coefficient of s^(min_order + j).
    pub coeffs: Vec<Complex64>,
}

impl TruncatedSeries1 {
    pub fn zero(max_order: i32) -> Self {
        TruncatedSeries1 {
            min_order: 0,
            max_order,
            coeffs: vec![Complex64::zero()],
        }
    }

    pub fn constant(c: Complex64, max_order: i32) -> Self {
        TruncatedSeries1 {
            min_order: 0,
            max_order,
            coeffs: vec![c],
        }
    }

    /// c * s^k
    pub fn monomial(c: Complex64, k: i32, max_order: i32) -> Self {
        TruncatedSeries1 {
            min_order: k,
            max_order,
            coeffs: vec![c],
        }
    }

    pub fn coeff(&self, order: i32) -> Complex64 {
        if order < self.min_order || order > self.min_order + self.coeffs.len() as i32 - 1 {
            Complex64::zero()
        } else {
            self.coeffs[(order - self.min_order) as usize]
        }
    }

    pub fn residue(&self) -> Complex64 {
        self.coeff(-1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let min = self.min_order.min(o.min_order);
        let max = self.max_order.max(o.max_order);
        let len = (max - min + 1) as usize;
        let mut coeffs = vec![Complex64::zero(); len];
        for series in [self, o] {
            for (j, c) in series.coeffs.iter().enumerate() {
                let ord = series.min_order + j as i32;
                if ord <= max {
                    coeffs[(ord - min) as usize] += c;
                }
            }
        }
        TruncatedSeries1 {
            min_order: min,
            max_order: max,
            coeffs,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let min = self.min_order + o.min_order;
        let max = self.max_order.min(o.max_order);
        let len = ((max - min).max(0) + 1) as usize;
        let mut coeffs = vec![Complex64::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let oa = self.min_order + i as i32;
            for (j, b) in o.coeffs.iter().enumerate() {
                let ord = oa + o.min_order + j as i32;
                if ord > max {
                    break;
                }
                coeffs[(ord - min) as usize] += a * b;
            }
        }
        TruncatedSeries1 {
            min_order: min,
            max_order: max,
            coeffs,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TruncatedSeries1 {
            min_order: self.min_order,
            max_order: self.max_order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Substitute s -> l s (coefficients pick up l^order).
    pub fn scale_variable(&self, l: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * Complex64::new(l, 0.0).powi(self.min_order + j as i32))
            .collect();
        TruncatedSeries1 {
            min_order: self.min_order,
            max_order: self.max_order,
            coeffs,
        }
    }

    /// exp of an analytic series (min_order >= 0); the constant term may be
    /// nonzero and is exponentiated.
    pub fn exp(&self) -> Self {
        assert!(self.min_order >= 0, "exp of a polar series");
        let max = self.max_order;
        let c0 = self.coeff(0);
        let mut reduced = self.clone();
        if reduced.min_order == 0 && !reduced.coeffs.is_empty() {
            reduced.coeffs[0] = Complex64::zero();
        }
        let mut out = TruncatedSeries1::constant(Complex64::new(1.0, 0.0), max);
        let mut power = TruncatedSeries1::constant(Complex64::new(1.0, 0.0), max);
        let mut factorial = 1.0f64;
        for j in 1..=max.max(0) as usize {
            power = power.mul(&reduced);
            factorial *= j as f64;
            out = out.add(&power.scale(Complex64::new(1.0 / factorial, 0.0)));
        }
        out.scale(c0.exp())
    }

    /// Multiply by 1/(a + s) with a != 0.
    pub fn divide_linear(&self, a: Complex64) -> Self {
        let max = self.max_order;
        let mut inv = TruncatedSeries1::zero(max);
        let mut c = 1.0 / a;
        for k in 0..=max.max(0) {
            inv = inv.add(&TruncatedSeries1::monomial(c, k, max));
            c = -c / a;
        }
        self.mul(&inv)
    }
}

/// Taylor series of Gamma(c + s) at an analytic rational center c != 0, -1, ...
fn gamma_taylor(center: f64, max_order: i32) -> TruncatedSeries1 {
    // Lift the center into x >= 1 where the polygamma expansion is clean.
    let mut shift = 0usize;
    while center + (shift as f64) < 1.0 {
        shift += 1;
    }
    let c = center + shift as f64;
    // log Gamma(c + s) = log Gamma(c) + sum_j psi^{(j-1)}(c) s^j / j!
    let lg = log_gamma(Complex64::new(c, 0.0)).expect("analytic center");
    let mut series = TruncatedSeries1::constant(lg, max_order);
    let mut fact = 1.0f64;
    for j in 1..=max_order.max(0) as usize {
        fact *= j as f64;
        let psi = polygamma(j - 1, c);
        series = series.add(&TruncatedSeries1::monomial(
            Complex64::new(psi / fact, 0.0),
            j as i32,
            max_order,
        ));
    }
    let mut out = series.exp();
    // Gamma(center + s) = Gamma(c + s) / prod_{j=0}^{shift-1} (center + j + s)
    for j in 0..shift {
        out = out.divide_linear(Complex64::new(center + j as f64, 0.0));
    }
    out
}

/// Laurent expansion of Gamma at a rational center, truncated at `order`
/// coefficients beyond the leading one. A simple pole with residue
/// (-1)^m / m! appears exactly at nonpositive integer centers.
pub fn gamma_laurent(center: &Rat, order: usize) -> TruncatedSeries1 {
    let max_order = order as i32;
    if center.denom().is_one() && !center.numer().is_positive() {
        let m = (-center.numer().clone()).to_string().parse::<u32>().unwrap_or(0) as usize;
        // Gamma(-m + s) = Gamma(1 + s) / (s prod_{j=1..m} (s - j))
        let mut series = gamma_taylor(1.0, max_order + 1);
        for j in 1..=m {
            series = series.divide_linear(Complex64::new(-(j as f64), 0.0));
        }
        // Leading coefficient is exactly (-1)^m / m!; rebuild it rationally to
        // avoid accumulated drift in the pole term.
        series.min_order -= 1;
        series.max_order -= 1;
        let mut lead = 1.0f64;
        for j in 1..=m {
            lead /= -(j as f64);
        }
        if !series.coeffs.is_empty() {
            series.coeffs[0] = Complex64::new(lead, 0.0);
        }
        series
    } else {
        gamma_taylor(rat_to_f64(center), max_order)
    }
}

/// Decay-rate descriptor for a product of Gamma factors along vertical lines:
/// |prod Gamma(l_i(gamma) + i L_i(y))| <= C exp(-rate(y) + eps |y|).
#[derive(Debug, Clone)]
pub struct DecayBound {
    pub constant: f64,
    pub eps: f64,
    /// Anchor real parts l_i(gamma).
    pub re_parts: Vec<f64>,
    /// Rows of the imaginary linear forms L_i.
    pub forms: Vec<Vec<f64>>,
}

impl DecayBound {
    /// r(y) = (pi/2) sum_i |L_i(y)|.
    pub fn rate(&self, y: &[f64]) -> f64 {
        0.5 * PI
            * self
                .forms
                .iter()
                .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().abs())
                .sum::<f64>()
    }

    pub fn bound(&self, y: &[f64]) -> f64 {
        let norm: f64 = y.iter().map(|v| v.abs()).sum();
        self.constant * (-self.rate(y) + self.eps * norm).exp()
    }
}

/// Calibrate the constant of the Stirling decay bound on a probe grid with a
/// factor-two safety margin.
pub fn stirling_decay_bound(re_parts: &[f64], forms: &[Vec<f64>], eps: f64) -> DecayBound {
    let k = forms.first().map(|r| r.len()).unwrap_or(0);
    let mut constant = 1.0f64;
    let mut probe = |y: &[f64]| {
        let mut log_abs = 0.0f64;
        for (x, row) in re_parts.iter().zip(forms) {
            let l: f64 = row.iter().zip(y).map(|(a, b)| a * b).sum();
            match log_gamma(Complex64::new(*x, l)) {
                Ok(lg) => log_abs += lg.re,
                Err(_) => return,
            }
        }
        let rate: f64 = 0.5
            * PI
            * forms
                .iter()
                .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().abs())
                .sum::<f64>();
        let norm: f64 = y.iter().map(|v| v.abs()).sum();
        let c = (log_abs + rate - eps * norm).exp();
        if c > constant {
            constant = c;
        }
    };
    // Axis-aligned and diagonal probes out to moderate heights.
    let heights = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    if k == 1 {
        for &h in &heights {
            for s in [-1.0, 1.0] {
                probe(&[s * h]);
            }
        }
    } else {
        for &h1 in &heights {
            for &h2 in &heights {
                for s1 in [-1.0, 1.0] {
                    for s2 in [-1.0, 1.0] {
                        probe(&[s1 * h1, s2 * h2]);
                    }
                }
            }
        }
    }
    DecayBound {
        constant: 2.0 * constant,
        eps,
        re_parts: re_parts.to_vec(),
        forms: forms.to_vec(),
    }
}

/// |Gamma(x + iy)| Stirling prediction for fixed x and large |y|.
pub fn gamma_abs_prediction(x: f64, y: f64) -> f64 {
    (2.0 * PI).sqrt() * y.abs().powf(x - 0.5) * (-0.5 * PI * y.abs()).exp()
}
