//! The A-side central charge: twisted Chern characters, z-twisted Gamma
//! classes, the hypergeometric term stream over extended curve classes, and
//! the series evaluation of the central charge, plus a rank-one residue
//! oracle realizing the same sum through one-dimensional residues.

use crate::divisor::{reduce_by_relations, DivisorPolynomial, SectorIntegrator};
use crate::error::{Error, Result};
use crate::gamma::{gamma_laurent, TruncatedSeries1};
use crate::lattice::{
    check_positivity, enumerate_keff, frac_part, BoxElement, CurveClass, GitPresentation,
    LineBundleTwist, StackyFan,
};
use crate::rational::*;
use num::complex::Complex64;
use num::{One, Signed, Zero};
use std::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

/// Complex parameters of an evaluation: Kahler coordinates t and the loop
/// variable z > 0. Equivariant parameters enter as lambda_a = z u_a.
#[derive(Debug, Clone)]
pub struct ComplexParams {
    pub t: Vec<Complex64>,
    pub z: f64,
}

impl ComplexParams {
    pub fn new(t: Vec<Complex64>, z: f64) -> Result<Self> {
        if !(z > 0.0) {
            return Err(Error::SchemaError(vec!["/z: must be positive".into()]));
        }
        Ok(ComplexParams { t, z })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Series,
    ResidueSum,
    MellinBarnes,
    Oscillatory,
    ClosedForm,
    SyzCycle,
}

/// A central charge value with an error bound and the method that produced it.
#[derive(Debug, Clone)]
pub struct CentralCharge {
    pub value: Complex64,
    pub abs_error: f64,
    pub method: Method,
    pub terms_used: usize,
}

/// Sector restriction of the z-twisted Gamma class of the tangent bundle and
/// the twisted Chern character of the line bundle.
#[derive(Debug, Clone)]
pub struct SectorClassData {
    pub sector: BoxElement,
    /// z^{-age v} z^{sum D_i/z} prod_i Gamma(1 - v_i + D_i/z), truncated at
    /// the sector dimension.
    pub gamma_factor: DivisorPolynomial<Complex64>,
    /// e^{2 pi i age_v(L)} exp(-(2 pi i / z) c_1(L)).
    pub chern_factor: DivisorPolynomial<Complex64>,
}

fn univariate_to_poly(
    series: &TruncatedSeries1,
    var: usize,
    nvars: usize,
    cap: usize,
) -> DivisorPolynomial<Complex64> {
    debug_assert!(series.min_order >= 0);
    let mut out = DivisorPolynomial::zero(nvars, cap);
    for ord in series.min_order..=series.max_order.min(cap as i32) {
        let c = series.coeff(ord);
        if c.is_zero() {
            continue;
        }
        let mut e = vec![0u8; nvars];
        e[var] = ord as u8;
        out.terms.insert(e, c);
    }
    out
}

/// Reduced class of c_1(L) as a divisor polynomial.
fn chern_class_poly(
    git: &GitPresentation,
    twist: &LineBundleTwist,
    cap: usize,
) -> DivisorPolynomial<Complex64> {
    let coeffs: Vec<Complex64> = (0..git.r_rays)
        .map(|i| Complex64::new(rat_to_f64(&twist.c[i]), 0.0))
        .collect();
    let c1 = DivisorPolynomial::linear(git.r_rays, cap, &coeffs);
    reduce_by_relations(&c1, git)
}

/// Phase angle age_v(L) = sum_i c_i(v) c_i over the host cone.
fn age_of_bundle(sector: &BoxElement, twist: &LineBundleTwist) -> f64 {
    sector
        .host_cone
        .iter()
        .map(|&i| rat_to_f64(&(&sector.c_of_v[i] * &twist.c[i])))
        .sum()
}

pub fn sector_class_data(
    git: &GitPresentation,
    sector: &BoxElement,
    twist: &LineBundleTwist,
    z: f64,
) -> Result<SectorClassData> {
    let cap = sector.dim_sector(git.n);
    let nvars = git.r_rays;
    let mut gamma_factor =
        DivisorPolynomial::constant(nvars, cap, Complex64::new(z.powf(-rat_to_f64(&sector.age)), 0.0));
    // z^{sum D_i / z}
    let zlog = DivisorPolynomial::linear(
        nvars,
        cap,
        &vec![Complex64::new(z.ln() / z, 0.0); nvars],
    );
    gamma_factor = gamma_factor.mul(&zlog.exp_nilpotent());
    for i in 0..git.r_total {
        let vi = if i < git.r_rays { sector.c_of_v[i].clone() } else { Rat::zero() };
        let center = Rat::one() - vi;
        let series = gamma_laurent(&center, cap).scale_variable(1.0 / z);
        if i < nvars {
            gamma_factor = gamma_factor.mul(&univariate_to_poly(&series, i, nvars, cap));
        } else {
            gamma_factor = gamma_factor.scale(&series.coeff(0));
        }
    }
    let phase = Complex64::new(0.0, TAU * age_of_bundle(sector, twist)).exp();
    let c1 = chern_class_poly(git, twist, cap);
    let chern = c1
        .scale(&Complex64::new(0.0, -TAU / z))
        .exp_nilpotent()
        .scale(&phase);
    Ok(SectorClassData {
        sector: sector.clone(),
        gamma_factor,
        chern_factor: chern,
    })
}

/// One term of the explicit central-charge sum: the curve class, its sector,
/// and the divisor polynomial to be integrated over that sector.
#[derive(Debug, Clone)]
pub struct LemmaTerm {
    pub class: CurveClass,
    pub poly: DivisorPolynomial<Complex64>,
}

/// The term of the explicit Lemma for one curve class, all scalar prefactors
/// folded in (everything except the sector integration and the global
/// (2 pi i)^{-n}).
fn lemma_term(
    git: &GitPresentation,
    class: &CurveClass,
    twist: &LineBundleTwist,
    params: &ComplexParams,
) -> Result<DivisorPolynomial<Complex64>> {
    let z = params.z;
    let nvars = git.r_rays;
    let cap = class.sector.dim_sector(git.n);
    let k = git.k();
    // Scalar prefactor: e^{sum t_a beta_a} z^{-sum_i D_i(beta)} z^{-k} e^{2 pi i age_v(L)}.
    let t_dot_beta: Complex64 = params
        .t
        .iter()
        .zip(&class.beta)
        .map(|(t, b)| t * rat_to_f64(b))
        .sum();
    let total_pairing: Rat = class.pairings.iter().cloned().sum();
    let mut scalar = t_dot_beta.exp()
        * Complex64::new(z.powf(-rat_to_f64(&total_pairing) - k as f64), 0.0)
        * Complex64::new(0.0, TAU * age_of_bundle(&class.sector, twist)).exp();
    // exp(-sum_a t_a p_a / z) with p_a = sum_i ell_{ia} D_i.
    let mut p_lin = vec![Complex64::zero(); nvars];
    for (a, t) in params.t.iter().enumerate() {
        for (i, coeff) in p_lin.iter_mut().enumerate() {
            *coeff += -t / z * rat_to_f64(&git.splitting.ell[i][a]);
        }
    }
    let mut poly = DivisorPolynomial::linear(nvars, cap, &p_lin).exp_nilpotent();
    // z^{sum_i D_i / z}
    let zlog = DivisorPolynomial::linear(nvars, cap, &vec![Complex64::new(z.ln() / z, 0.0); nvars]);
    poly = poly.mul(&zlog.exp_nilpotent());
    // Gamma factors: prod_{v_i = 0} [D_i Gamma(D_i/z - D_i(beta))] *
    //                prod_{v_i != 0} Gamma(D_i/z - D_i(beta)).
    for i in 0..git.r_total {
        let center = -class.pairings[i].clone();
        let integral = frac_part(&class.pairings[i]).is_zero();
        if !integral && center.denom().is_one() && !center.numer().is_positive() {
            return Err(Error::GammaPole { ray: i });
        }
        let series = gamma_laurent(&center, cap + 1).scale_variable(1.0 / z);
        if integral {
            // Multiply by the bare divisor class: shifts the Laurent order up
            // by one, leaving an analytic series.
            let mut shifted = series.clone();
            shifted.min_order += 1;
            shifted.max_order += 1;
            if i < nvars {
                poly = poly.mul(&univariate_to_poly(&shifted, i, nvars, cap));
            } else {
                // Extra vectors carry no divisor class: evaluate at zero.
                scalar *= shifted.coeff(0);
            }
        } else if i < nvars {
            poly = poly.mul(&univariate_to_poly(&series, i, nvars, cap));
        } else {
            scalar *= series.coeff(0);
        }
    }
    // Twisted Chern character of L (the age phase is already in `scalar`).
    let c1 = chern_class_poly(git, twist, cap);
    poly = poly.mul(&c1.scale(&Complex64::new(0.0, -TAU / z)).exp_nilpotent());
    Ok(poly.scale(&scalar))
}

/// Stream of per-class sector contributions of the explicit Lemma.
pub fn i_function_terms(
    git: &GitPresentation,
    fan: &StackyFan,
    boxes: &[BoxElement],
    twist: &LineBundleTwist,
    params: &ComplexParams,
    degree_bound: &Rat,
) -> Result<Vec<LemmaTerm>> {
    let classes = enumerate_keff(git, fan, boxes, degree_bound)?;
    classes
        .into_iter()
        .map(|class| {
            let poly = lemma_term(git, &class, twist, params)?;
            Ok(LemmaTerm { class, poly })
        })
        .collect()
}

/// Audit record of one summed term.
#[derive(Debug, Clone)]
pub struct TermRecord {
    pub beta: Vec<Rat>,
    pub degree: Rat,
    pub sector: Vec<Int>,
    pub value: Complex64,
    pub running_sum: Complex64,
}

pub struct SeriesOutcome {
    pub charge: CentralCharge,
    pub records: Vec<TermRecord>,
}

/// The A-model central charge by summing the explicit Lemma term stream until
/// the tail certificate clears the tolerance.
pub fn za_series(
    git: &GitPresentation,
    fan: &StackyFan,
    boxes: &[BoxElement],
    twist: &LineBundleTwist,
    params: &ComplexParams,
    tol: f64,
    degree_bound: &Rat,
    seed: u64,
) -> Result<SeriesOutcome> {
    let positivity = check_positivity(git, fan);
    if !positivity.fano {
        return Err(Error::NotConverging {
            detail: "positivity (Fano) condition fails; series convergence not guaranteed".into(),
        });
    }
    let terms = i_function_terms(git, fan, boxes, twist, params, degree_bound)?;
    let mut integrators: Vec<(Vec<Int>, SectorIntegrator)> = Vec::new();
    for b in boxes {
        integrators.push((b.v.clone(), SectorIntegrator::new(git, fan, b, seed)?));
    }
    let integrator_for = |v: &Vec<Int>| -> &SectorIntegrator {
        &integrators.iter().find(|(key, _)| key == v).expect("sector integrator").1
    };
    // Evaluate every term (parallel over classes), then accumulate in
    // degree-lex order with shell bookkeeping for the stopping rule.
    use rayon::prelude::*;
    let values: Vec<Complex64> = terms
        .par_iter()
        .map(|term| integrator_for(&term.class.sector.v).integrate(&term.poly))
        .collect::<Result<_>>()?;
    let prefactor = Complex64::new(0.0, TAU).powi(-(git.n as i32));
    let mut records = Vec::with_capacity(terms.len());
    let mut sum = Complex64::zero();
    let mut shells: Vec<(Rat, f64)> = Vec::new();
    for (term, value) in terms.iter().zip(&values) {
        let v = prefactor * value;
        sum += v;
        match shells.last_mut() {
            Some((deg, mag)) if *deg == term.class.degree => *mag += v.norm(),
            _ => shells.push((term.class.degree.clone(), v.norm())),
        }
        records.push(TermRecord {
            beta: term.class.beta.clone(),
            degree: term.class.degree.clone(),
            sector: term.class.sector.v.clone(),
            value: v,
            running_sum: sum,
        });
    }
    let (stop_index, tail) = certify_tail(&shells, tol)?;
    // Re-accumulate only up to the certified stopping shell.
    let mut value = Complex64::zero();
    let mut used = 0;
    for rec in &records {
        if shells
            .iter()
            .position(|(d, _)| *d == rec.degree)
            .map(|i| i <= stop_index)
            .unwrap_or(false)
        {
            value += rec.value;
            used += 1;
        }
    }
    let last_mag = shells[stop_index].1;
    Ok(SeriesOutcome {
        charge: CentralCharge {
            value,
            abs_error: tol + last_mag + tail,
            method: Method::Series,
            terms_used: used,
        },
        records,
    })
}

/// Stopping rule: three consecutive degree shells below tol/10, and a tail
/// certificate built from the unit-degree envelope. The factorial-decay
/// estimate C exp(-alpha d ln d + B d) makes the envelope ratios eventually
/// decreasing, so once three observed ratios sit below 1/2 the geometric
/// bound by the last ratio is a valid tail majorant.
fn certify_tail(shells: &[(Rat, f64)], tol: f64) -> Result<(usize, f64)> {
    if shells.len() < 4 {
        return Err(Error::NotConverging {
            detail: "degree bound leaves fewer than four shells".into(),
        });
    }
    // Aggregate shells into unit-degree windows (half-open (w-1, w]).
    let degrees: Vec<f64> = shells.iter().map(|(d, _)| rat_to_f64(d)).collect();
    let window_of = |d: f64| -> usize { d.ceil().max(0.0) as usize };
    let n_windows = window_of(*degrees.last().unwrap()) + 1;
    let mut envelope = vec![0.0f64; n_windows];
    for (idx, (_, mag)) in shells.iter().enumerate() {
        let w = window_of(degrees[idx]);
        envelope[w] = envelope[w].max(*mag);
    }
    let per_window = shells.len() as f64 / n_windows.max(1) as f64;
    let mut small_run = 0;
    for idx in 1..shells.len() {
        if shells[idx].1 < tol / 10.0 {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run < 3 {
            continue;
        }
        let w = window_of(degrees[idx]);
        if w < 3 || w + 1 > n_windows {
            continue;
        }
        let ratios: Vec<f64> = (w - 2..=w)
            .filter(|&j| envelope[j - 1] > 0.0)
            .map(|j| envelope[j] / envelope[j - 1])
            .collect();
        if ratios.len() < 3 || ratios.iter().any(|r| !(*r < 0.5)) {
            continue;
        }
        let rho = ratios.last().copied().unwrap_or(0.5);
        let tail = envelope[w] * rho / (1.0 - rho) * per_window.max(1.0) * 2.0;
        if tail.is_finite() && tail < tol {
            // Consume the rest of the current window so equal-degree shells
            // are not split.
            let mut stop = idx;
            while stop + 1 < shells.len() && window_of(degrees[stop + 1]) == w {
                stop += 1;
            }
            return Ok((stop, tail));
        }
    }
    Err(Error::NotConverging {
        detail: format!(
            "shells did not decay below {:e} within the degree bound (last shell {:e} at degree {})",
            tol / 10.0,
            shells.last().map(|s| s.1).unwrap_or(f64::NAN),
            shells.last().map(|s| rat_to_f64(&s.0)).unwrap_or(f64::NAN),
        ),
    })
}

/// Residue realization of the inverse Fourier transform for k = 1: sums the
/// one-dimensional residues of e^{-ut} prod_i e^{-2 pi i c_i l_i u} z^{l_i u}
/// Gamma(l_i u), normalized by (2 pi i)^{-n}.
pub fn za_residue_k1(
    git: &GitPresentation,
    twist: &LineBundleTwist,
    params: &ComplexParams,
    tol: f64,
    degree_bound: &Rat,
) -> Result<CentralCharge> {
    if git.k() != 1 {
        return Err(Error::KNotOne { k: git.k() });
    }
    let ls: Vec<Int> = (0..git.r_total).map(|i| git.charge[0][i].clone()).collect();
    if ls.iter().any(|l| !l.is_positive()) {
        return Err(Error::KNotOne { k: 1 });
    }
    let lcm = ls.iter().fold(Int::one(), |acc, l| num::integer::lcm(acc, l.clone()));
    let t = params.t[0];
    let z = params.z;
    let cap = git.r_total as i32 + 2;
    let mut shells: Vec<(Rat, f64)> = Vec::new();
    let mut values: Vec<Complex64> = Vec::new();
    let mut q = Rat::zero();
    let step = Rat::one() / Rat::from_integer(lcm);
    while q <= *degree_bound {
        let polar = ls
            .iter()
            .any(|l| (Rat::from_integer(l.clone()) * &q).denom().is_one());
        if polar {
            let residue = residue_at(&ls, &q, twist, t, z, cap);
            values.push(residue);
            shells.push((q.clone(), residue.norm()));
        }
        q += &step;
    }
    let prefactor = Complex64::new(0.0, TAU).powi(-(git.n as i32));
    let scaled: Vec<(Rat, f64)> = shells.iter().map(|(d, m)| (d.clone(), m * prefactor.norm())).collect();
    let (stop, tail) = certify_tail(&scaled, tol)?;
    let value: Complex64 = values[..=stop].iter().sum::<Complex64>() * prefactor;
    Ok(CentralCharge {
        value,
        abs_error: tol + scaled[stop].1 + tail,
        method: Method::ResidueSum,
        terms_used: stop + 1,
    })
}

/// Residue of the rank-one integrand at u = -q.
fn residue_at(ls: &[Int], q: &Rat, twist: &LineBundleTwist, t: Complex64, z: f64, cap: i32) -> Complex64 {
    // e^{-u t} = e^{q t} e^{-s t}
    let mut series = TruncatedSeries1::constant(Complex64::new(1.0, 0.0), cap);
    let exp_factor = (t * Complex64::new(rat_to_f64(q), 0.0)).exp();
    let mut scalar = exp_factor;
    let minus_t = TruncatedSeries1::monomial(-t, 1, cap).exp();
    series = series.mul(&minus_t);
    for (i, l) in ls.iter().enumerate() {
        let lf = rat_to_f64(&Rat::from_integer(l.clone()));
        let center = -(Rat::from_integer(l.clone()) * q);
        // Gamma(l_i u) around u_0 = -q.
        let g = gamma_laurent(&center, cap as usize + 1).scale_variable(lf);
        series = series.mul(&g);
        // z^{l_i u} and the twist phase e^{-2 pi i c_i l_i u}.
        let ci = rat_to_f64(&twist.c[i]);
        let center_f = rat_to_f64(&center);
        scalar *= Complex64::new(z.powf(center_f), 0.0);
        scalar *= (Complex64::new(0.0, -TAU * ci) * center_f).exp();
        let lin = TruncatedSeries1::monomial(
            Complex64::new(lf * z.ln(), -TAU * ci * lf),
            1,
            cap,
        )
        .exp();
        series = series.mul(&lin);
    }
    series.residue() * scalar
}

/// Evaluate the defining Cahen-Mellin style residue sum for a bare product of
/// Gamma factors (used by the convention self-tests): sum of residues of
/// e^{-ut} prod_i Gamma(l_i u) z^{l_i u}.
pub fn residue_sum_plain(ls: &[i64], t: Complex64, z: f64, max_terms: usize) -> Complex64 {
    let ls: Vec<Int> = ls.iter().map(|&l| int(l)).collect();
    let twist = LineBundleTwist {
        c: vec![Rat::zero(); ls.len()],
        h: vec![Rat::zero()],
    };
    let lcm = ls.iter().fold(Int::one(), |acc, l| num::integer::lcm(acc, l.clone()));
    let step = Rat::one() / Rat::from_integer(lcm);
    let cap = ls.len() as i32 + 2;
    let mut total = Complex64::zero();
    let mut q = Rat::zero();
    for _ in 0..max_terms {
        let polar = ls
            .iter()
            .any(|l| (Rat::from_integer(l.clone()) * &q).denom().is_one());
        if polar {
            total += residue_at(&ls, &q, &twist, t, z, cap);
        }
        q += &step;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_elements, test_p1, test_p2, test_wp12};

    /// Modified Bessel K_0 by its power series (independent oracle).
    pub fn bessel_k0(x: f64) -> f64 {
        const EULER_GAMMA: f64 = 0.5772156649015328606;
        let q = 0.25 * x * x;
        let mut i0 = 0.0f64;
        let mut extra = 0.0f64;
        let mut term = 1.0f64;
        let mut harmonic = 0.0f64;
        for m in 0..60 {
            if m > 0 {
                term *= q / ((m * m) as f64);
                harmonic += 1.0 / m as f64;
            }
            i0 += term;
            extra += term * harmonic;
        }
        -( (0.5 * x).ln() + EULER_GAMMA) * i0 + extra
    }

    fn setup(rays: fn() -> (GitPresentation, StackyFan)) -> (GitPresentation, StackyFan, Vec<BoxElement>) {
        let (git, fan) = rays();
        let boxes = box_elements(&fan, &git);
        (git, fan, boxes)
    }

    fn trivial_twist(git: &GitPresentation) -> LineBundleTwist {
        LineBundleTwist::new(git, vec![Rat::zero(); git.r_total]).unwrap()
    }

    #[test]
    fn p1_series_matches_bessel() {
        let (git, fan, boxes) = setup(test_p1);
        let twist = trivial_twist(&git);
        let params = ComplexParams::new(vec![Complex64::new(-3.0, 0.0)], 1.0).unwrap();
        let out = za_series(&git, &fan, &boxes, &twist, &params, 1e-10, &rat(24), 42).unwrap();
        let expected = Complex64::new(0.0, TAU).powi(-1) * 2.0 * bessel_k0(2.0 * (-1.5f64).exp());
        assert!(
            (out.charge.value - expected).norm() < 1e-8 * expected.norm(),
            "got {} expected {}",
            out.charge.value,
            expected
        );
    }

    #[test]
    fn p1_series_z_dependence() {
        // Z_A(t, z) = (2 pi i)^{-1} 2 K_0(2 e^{t/2} / z) for the trivial twist.
        let (git, fan, boxes) = setup(test_p1);
        let twist = trivial_twist(&git);
        for z in [0.5, 1.0, 2.0] {
            let params = ComplexParams::new(vec![Complex64::new(-3.0, 0.0)], z).unwrap();
            let out = za_series(&git, &fan, &boxes, &twist, &params, 1e-10, &rat(30), 42).unwrap();
            let expected =
                Complex64::new(0.0, TAU).powi(-1) * 2.0 * bessel_k0(2.0 * (-1.5f64).exp() / z);
            assert!(
                (out.charge.value - expected).norm() < 1e-8 * expected.norm(),
                "z={z}: got {} expected {}",
                out.charge.value,
                expected
            );
        }
    }

    #[test]
    fn h_invariant_term_streams_p2() {
        let (git, fan, boxes) = setup(test_p2);
        let params = ComplexParams::new(vec![Complex64::new(-3.0, 0.0)], 1.0).unwrap();
        let t0 = trivial_twist(&git);
        let t1 = LineBundleTwist::new(&git, vec![rat(1), rat(-1), rat(0)]).unwrap();
        assert_eq!(t1.h, vec![rat(0)]);
        let s0 = i_function_terms(&git, &fan, &boxes, &t0, &params, &rat(8)).unwrap();
        let s1 = i_function_terms(&git, &fan, &boxes, &t1, &params, &rat(8)).unwrap();
        assert_eq!(s0.len(), s1.len());
        for (a, b) in s0.iter().zip(&s1) {
            assert_eq!(a.poly.terms, b.poly.terms, "term streams differ at beta {:?}", a.class.beta);
        }
    }

    #[test]
    fn sector_grading_nilpotence() {
        let (git, fan, boxes) = setup(test_wp12);
        let twist = trivial_twist(&git);
        let params = ComplexParams::new(vec![Complex64::new(-3.0, 0.0)], 1.0).unwrap();
        let terms = i_function_terms(&git, &fan, &boxes, &twist, &params, &rat(4)).unwrap();
        for term in &terms {
            assert!(term.poly.degree() <= term.class.sector.dim_sector(git.n));
        }
        // Sector routing: the half-integer classes land on the twisted sector.
        let half = terms
            .iter()
            .find(|t| t.class.beta[0] == ratio(1, 2))
            .expect("beta = 1/2 present");
        assert_eq!(half.class.sector.v, vec![int(-1)]);
    }

    #[test]
    fn residue_oracle_agrees_with_series() {
        let cases: [(fn() -> (GitPresentation, StackyFan), i64); 3] =
            [(test_p1, 24), (test_p2, 20), (test_wp12, 24)];
        for (make, degree) in cases {
            let (git, fan, boxes) = setup(make);
            let twist = trivial_twist(&git);
            let params = ComplexParams::new(vec![Complex64::new(-3.0, 0.0)], 1.0).unwrap();
            let series =
                za_series(&git, &fan, &boxes, &twist, &params, 1e-9, &rat(degree), 42).unwrap();
            let residue = za_residue_k1(&git, &twist, &params, 1e-9, &rat(degree)).unwrap();
            let tol = 2.0 * (series.charge.abs_error + residue.abs_error);
            assert!(
                (series.charge.value - residue.value).norm() <= tol,
                "series {} vs residues {}",
                series.charge.value,
                residue.value
            );
        }
    }

    #[test]
    fn plain_residue_sum_is_cahen_mellin() {
        for t in [-1.0f64, -0.5, 0.0, 0.5, 1.0] {
            let got = residue_sum_plain(&[1], Complex64::new(t, 0.0), 1.0, 80);
            let expected = (-t.exp()).exp();
            assert!((got.re - expected).abs() < 1e-12 && got.im.abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn monotone_tail_after_burn_in() {
        for make in [test_p1 as fn() -> (GitPresentation, StackyFan), test_p2, test_wp12] {
            let (git, fan, boxes) = setup(make);
            let twist = trivial_twist(&git);
            let params = ComplexParams::new(vec![Complex64::new(-2.0, 0.0); git.k()], 1.0).unwrap();
            let out = za_series(&git, &fan, &boxes, &twist, &params, 1e-9, &rat(24), 42).unwrap();
            let mut shells: Vec<(Rat, f64)> = Vec::new();
            for rec in &out.records {
                match shells.last_mut() {
                    Some((d, m)) if *d == rec.degree => *m += rec.value.norm(),
                    _ => shells.push((rec.degree.clone(), rec.value.norm())),
                }
            }
            for w in shells.windows(2).skip(5) {
                assert!(w[1].1 < w[0].1, "shells not decreasing: {:?}", w);
            }
        }
    }

    #[test]
    fn sector_class_data_examples() {
        // P^2, trivial twist: Gamma(1 + p/z)^3 to degree 2 at z = 1; chern = 1.
        let (git, _fan, boxes) = setup(test_p2);
        let twist = trivial_twist(&git);
        let data = sector_class_data(&git, &boxes[0], &twist, 1.0).unwrap();
        let const_term = data.gamma_factor.terms.get(&vec![0u8, 0, 0]).unwrap();
        assert!((const_term - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let chern_const = data.chern_factor.terms.get(&vec![0u8, 0, 0]).unwrap();
        assert!((chern_const - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(data.chern_factor.terms.len(), 1);
        // Twisted point sector of P(1,2): scalar Gamma(1) Gamma(1/2) z^{-1/2}.
        let (git, _fan, boxes) = setup(test_wp12);
        let twist = trivial_twist(&git);
        let twisted = boxes.iter().find(|b| !b.age.is_zero()).unwrap();
        for z in [1.0f64, 2.0] {
            let data = sector_class_data(&git, twisted, &twist, z).unwrap();
            let c = data.gamma_factor.terms.get(&vec![0u8, 0]).unwrap();
            let expected = z.powf(-0.5) * PI.sqrt();
            assert!((c.re - expected).abs() < 1e-13 && c.im.abs() < 1e-14, "z={z}");
        }
        // P^1 with c = (1, 0): chern factor 1 - 2 pi i p / z.
        let (git, _fan, boxes) = setup(test_p1);
        let twist = LineBundleTwist::new(&git, vec![rat(1), rat(0)]).unwrap();
        let data = sector_class_data(&git, &boxes[0], &twist, 1.0).unwrap();
        let lin = data.chern_factor.terms.get(&vec![1u8, 0]).unwrap();
        assert!((lin - Complex64::new(0.0, -TAU)).norm() < 1e-13);
    }
}

#[cfg(test)]
pub use tests::bessel_k0;
