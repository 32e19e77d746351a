//! Acceptance suite: one test per shipped criterion, each printing a
//! PASS line with the measured quantities. Tolerances are pinned here.

use mirror_charge::amodel::{
    i_function_terms, za_series, ComplexParams, TAU,
};
use mirror_charge::bmodel::{
    fiber_oscillatory, grade_restriction_check, mb_inverse_fourier, snap_kappa, FiberCycleChart,
    QuadratureSpec,
};
use mirror_charge::cycles::{
    ample_moment_cycle, arrangement_cells, boundary_is_zero, ccc_cycle, ccc_cycle_definition,
    chains_equal, multiplicity, zb_over_syz_n1,
};
use mirror_charge::divisor::{localize_integral, DivisorPolynomial};
use mirror_charge::error::Error;
use mirror_charge::gamma::{gamma, gamma_laurent};
use mirror_charge::lattice::{
    box_elements, enumerate_keff, BoxElement, GitPresentation, LineBundleTwist, StackyFan,
};
use mirror_charge::rational::*;
use num::complex::Complex64;
use num::Zero;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::Instant;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn p1() -> (GitPresentation, StackyFan, Vec<BoxElement>) {
    let (git, fan) =
        GitPresentation::build(1, vec![vec![int(1)], vec![int(-1)]], vec![], vec![rat(1)], None)
            .unwrap();
    let boxes = box_elements(&fan, &git);
    (git, fan, boxes)
}

fn p2() -> (GitPresentation, StackyFan, Vec<BoxElement>) {
    let (git, fan) = GitPresentation::build(
        2,
        vec![vec![int(1), int(0)], vec![int(0), int(1)], vec![int(-1), int(-1)]],
        vec![],
        vec![rat(1)],
        None,
    )
    .unwrap();
    let boxes = box_elements(&fan, &git);
    (git, fan, boxes)
}

fn wp12() -> (GitPresentation, StackyFan, Vec<BoxElement>) {
    let (git, fan) =
        GitPresentation::build(1, vec![vec![int(1)], vec![int(-2)]], vec![], vec![rat(1)], None)
            .unwrap();
    let boxes = box_elements(&fan, &git);
    (git, fan, boxes)
}

fn f1() -> (GitPresentation, StackyFan, Vec<BoxElement>) {
    let (git, fan) = GitPresentation::build(
        2,
        vec![
            vec![int(1), int(0)],
            vec![int(0), int(1)],
            vec![int(-1), int(-1)],
            vec![int(0), int(-1)],
        ],
        vec![],
        vec![rat(2), rat(1)],
        None,
    )
    .unwrap();
    let boxes = box_elements(&fan, &git);
    (git, fan, boxes)
}

/// The bare affine presentation with a single unit charge: its contour
/// integral is the Cahen-Mellin identity.
fn gamma_only() -> (GitPresentation, StackyFan) {
    GitPresentation::build(0, vec![], vec![vec![]], vec![rat(1)], None).unwrap()
}

fn trivial_twist(git: &GitPresentation) -> LineBundleTwist {
    LineBundleTwist::new(git, vec![Rat::zero(); git.r_total]).unwrap()
}

/// Independent modified-Bessel oracle by power series.
fn bessel_k0(x: f64) -> f64 {
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
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + extra
}

/// The global normalization constant fixed on the P^1 anchor instance.
fn global_kappa() -> Complex64 {
    let (git, fan, boxes) = p1();
    let twist = trivial_twist(&git);
    let params = ComplexParams::new(vec![c64(-3.0, 0.0)], 1.0).unwrap();
    let series = za_series(&git, &fan, &boxes, &twist, &params, 1e-10, &rat(24), 42).unwrap();
    let spec = QuadratureSpec::default_for(&git, 1e-10).unwrap();
    let mb = mb_inverse_fourier(&git, &twist, &params, &spec).unwrap();
    let normalize = c64(0.0, TAU).powi(-1);
    let (kappa, _) = snap_kappa(series.charge.value / (normalize * mb.value)).unwrap();
    kappa
}

#[test]
fn criterion_01_convention_pinning() {
    let start = Instant::now();
    let (git, _fan) = gamma_only();
    let twist = trivial_twist(&git);
    let spec = QuadratureSpec::default_for(&git, 1e-11).unwrap();
    let mut worst = 0.0f64;
    for t in [-1.0f64, -0.5, 0.0, 0.5, 1.0] {
        let params = ComplexParams::new(vec![c64(t, 0.0)], 1.0).unwrap();
        let mb = mb_inverse_fourier(&git, &twist, &params, &spec).unwrap();
        let expected = (-(t.exp())).exp();
        worst = worst.max((mb.value - c64(expected, 0.0)).norm());
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-10, "worst |error| = {worst:e}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("[criterion 01] PASS convention pinning: max abs error {worst:.2e} in {elapsed:?}");
}

#[test]
fn criterion_02_p1_three_way_grid() {
    let start = Instant::now();
    let (git, fan, boxes) = p1();
    let kappa = global_kappa();
    assert!((kappa - c64(1.0, 0.0)).norm() < 1e-9, "kappa = {kappa}");
    let normalize = c64(0.0, TAU).powi(-1);
    let mut worst = 0.0f64;
    let mut worst_bessel = 0.0f64;
    for c in [vec![rat(0), rat(0)], vec![rat(1), rat(0)]] {
        let twist = LineBundleTwist::new(&git, c).unwrap();
        let h = rat_to_f64(&twist.h[0]);
        for t_re in [-2.0f64, -3.0, -4.0] {
            for z in [0.5f64, 1.0, 2.0] {
                // Twist-compatible translate of the real evaluation point.
                let t = c64(t_re, -TAU * h);
                let params = ComplexParams::new(vec![t], z).unwrap();
                let series =
                    za_series(&git, &fan, &boxes, &twist, &params, 1e-10, &rat(30), 42).unwrap();
                let spec = QuadratureSpec::default_for(&git, 1e-9).unwrap();
                let mb = mb_inverse_fourier(&git, &twist, &params, &spec).unwrap();
                let chart = FiberCycleChart::compatible(&git, &twist, &[-TAU * h]).unwrap();
                let osc = fiber_oscillatory(&git, &twist, &params, &chart, &spec).unwrap();
                let za = series.charge.value;
                for b in [mb.value, osc.value] {
                    let rel = (za - kappa * normalize * b).norm() / za.norm();
                    worst = worst.max(rel);
                }
                let rel_bo =
                    (mb.value - osc.value).norm() / mb.value.norm();
                worst = worst.max(rel_bo);
                if h == 0.0 && z == 1.0 {
                    let oracle = kappa * normalize * 2.0 * bessel_k0(2.0 * (t_re / 2.0).exp());
                    worst_bessel = worst_bessel.max((za - oracle).norm() / oracle.norm());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-6, "worst pairwise relative residual {worst:e}");
    assert!(worst_bessel < 1e-8, "worst Bessel residual {worst_bessel:e}");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "[criterion 02] PASS P^1 three-way grid: worst pairwise {worst:.2e}, Bessel anchor {worst_bessel:.2e}, kappa = 1, in {elapsed:?}"
    );
}

#[test]
fn criterion_03_p2_three_way() {
    let start = Instant::now();
    let (git, fan, boxes) = p2();
    let kappa = global_kappa();
    let normalize = c64(0.0, TAU).powi(-2);
    let mut worst = 0.0f64;
    for c in [vec![rat(0), rat(0), rat(0)], vec![rat(1), rat(0), rat(0)]] {
        let twist = LineBundleTwist::new(&git, c).unwrap();
        let h = rat_to_f64(&twist.h[0]);
        let t = c64(-3.0, -TAU * h);
        let params = ComplexParams::new(vec![t], 1.0).unwrap();
        let series = za_series(&git, &fan, &boxes, &twist, &params, 1e-9, &rat(22), 42).unwrap();
        let spec = QuadratureSpec::default_for(&git, 1e-9).unwrap();
        let mb = mb_inverse_fourier(&git, &twist, &params, &spec).unwrap();
        let chart = FiberCycleChart::compatible(&git, &twist, &[-TAU * h]).unwrap();
        let osc = fiber_oscillatory(&git, &twist, &params, &chart, &spec).unwrap();
        let za = series.charge.value;
        for b in [mb.value, osc.value] {
            worst = worst.max((za - kappa * normalize * b).norm() / za.norm());
        }
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-5, "worst relative residual {worst:e}");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("[criterion 03] PASS P^2 three-way: worst residual {worst:.2e} in {elapsed:?}");
}

#[test]
fn criterion_04_wp12_twisted_sector() {
    let start = Instant::now();
    let (git, fan, boxes) = wp12();
    // Box = {0, -1} with age(-1) = 1/2.
    assert_eq!(boxes.len(), 2);
    let twisted = boxes.iter().find(|b| !num::Zero::is_zero(&b.age)).unwrap();
    assert_eq!(twisted.v, vec![int(-1)]);
    assert_eq!(twisted.age, ratio(1, 2));
    // K_eff = (1/2) Z_{>=0}: check every half-integer up to the bound.
    let classes = enumerate_keff(&git, &fan, &boxes, &rat(3)).unwrap();
    let expected: Vec<Rat> = (0..=6).map(|j| ratio(j, 2)).collect();
    let got: Vec<Rat> = classes.iter().map(|c| c.beta[0].clone()).collect();
    assert_eq!(got, expected);
    // Series vs Mellin-Barnes.
    let kappa = global_kappa();
    let twist = trivial_twist(&git);
    let params = ComplexParams::new(vec![c64(-3.0, 0.0)], 1.0).unwrap();
    let series = za_series(&git, &fan, &boxes, &twist, &params, 1e-9, &rat(24), 42).unwrap();
    let spec = QuadratureSpec::default_for(&git, 1e-9).unwrap();
    let mb = mb_inverse_fourier(&git, &twist, &params, &spec).unwrap();
    let normalize = c64(0.0, TAU).powi(-1);
    let rel = (series.charge.value - kappa * normalize * mb.value).norm()
        / series.charge.value.norm();
    let elapsed = start.elapsed();
    assert!(rel < 1e-5, "relative residual {rel:e}");
    println!(
        "[criterion 04] PASS P(1,2): Box/age/K_eff verified, zA vs MB residual {rel:.2e} in {elapsed:?}"
    );
}

#[test]
fn criterion_05_f1_two_dimensional() {
    let start = Instant::now();
    let (git, fan, boxes) = f1();
    assert_eq!(git.k(), 2);
    let kappa = global_kappa();
    let twist = trivial_twist(&git);
    let params = ComplexParams::new(vec![c64(-3.0, 0.0), c64(-3.0, 0.0)], 1.0).unwrap();
    let series = za_series(&git, &fan, &boxes, &twist, &params, 1e-8, &rat(26), 42).unwrap();
    let spec = QuadratureSpec::default_for(&git, 1e-7).unwrap();
    let mb = mb_inverse_fourier(&git, &twist, &params, &spec).unwrap();
    let normalize = c64(0.0, TAU).powi(-2);
    let rel = (series.charge.value - kappa * normalize * mb.value).norm()
        / series.charge.value.norm();
    let elapsed = start.elapsed();
    assert!(rel < 1e-4, "relative residual {rel:e}");
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!("[criterion 05] PASS F_1 (k = 2): zA vs 2-D MB residual {rel:.2e} in {elapsed:?}");
}

#[test]
fn criterion_06_h_invariance_exact() {
    let (git, fan, boxes) = p2();
    let params = ComplexParams::new(vec![c64(-3.0, 0.0)], 1.0).unwrap();
    let t0 = trivial_twist(&git);
    let t1 = LineBundleTwist::new(&git, vec![rat(1), rat(-1), rat(0)]).unwrap();
    assert_eq!(t1.h, vec![rat(0)]);
    let s0 = i_function_terms(&git, &fan, &boxes, &t0, &params, &rat(12)).unwrap();
    let s1 = i_function_terms(&git, &fan, &boxes, &t1, &params, &rat(12)).unwrap();
    assert_eq!(s0.len(), s1.len());
    for (a, b) in s0.iter().zip(&s1) {
        assert_eq!(a.class.beta, b.class.beta);
        assert_eq!(
            a.poly.terms, b.poly.terms,
            "coefficients differ at beta {:?}",
            a.class.beta
        );
    }
    println!(
        "[criterion 06] PASS h-invariance: {} terms coefficient-identical for c = (1,-1,0) vs 0",
        s0.len()
    );
}

#[test]
fn criterion_07_grade_restriction_iff() {
    let (git, _fan, _boxes) = p2();
    let twist = trivial_twist(&git);
    let spec = QuadratureSpec::default_for(&git, 1e-8).unwrap();
    let boundary = 1.5 * PI;
    let mut checked = 0;
    for j in 0..21 {
        let im_t = -5.0 + 0.5 * j as f64;
        if (im_t.abs() - boundary).abs() < 0.2 {
            continue; // boundary band excluded
        }
        let (pass, margin) = grade_restriction_check(&git, &twist, &[im_t]);
        let params = ComplexParams::new(vec![c64(-3.0, im_t)], 1.0).unwrap();
        let mb = mb_inverse_fourier(&git, &twist, &params, &spec);
        if pass {
            assert!(margin > 0.0);
            let v = mb.unwrap_or_else(|e| panic!("Im t = {im_t}: expected convergence, got {e}"));
            assert!(v.value.re.is_finite() && v.value.im.is_finite());
        } else {
            assert!(
                matches!(mb, Err(Error::ConvergenceMarginTooSmall { .. })),
                "Im t = {im_t}: expected margin failure"
            );
            // Divergence witness: the integrand grows along the contour on
            // the drift side.
            let side = im_t.signum();
            let grow = |y: f64| -> f64 {
                let u = c64(1.0, y);
                let lg = mirror_charge::gamma::log_gamma(u).unwrap();
                (3.0 * lg.re + (-u * c64(-3.0, im_t)).re).exp()
            };
            assert!(
                grow(side * 40.0) > grow(side * 20.0),
                "Im t = {im_t}: no growth witness"
            );
        }
        checked += 1;
    }
    assert!(checked >= 19);
    println!("[criterion 07] PASS grade-restriction iff on {checked} grid points");
}

#[test]
fn criterion_08_gamma_identities() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240915);
    let mut checked = 0;
    let mut worst_refl = 0.0f64;
    let mut worst_shift = 0.0f64;
    while checked < 1000 {
        let z = c64(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        let near_pole = |w: Complex64| w.im.abs() < 0.05 && (w.re - w.re.round()).abs() < 0.05;
        if near_pole(z) || near_pole(c64(1.0, 0.0) - z) {
            continue;
        }
        let refl = gamma(z).unwrap() * gamma(c64(1.0, 0.0) - z).unwrap() * (PI * z).sin();
        worst_refl = worst_refl.max((refl - c64(PI, 0.0)).norm() / refl.norm().max(PI));
        let shift =
            (gamma(z + 1.0).unwrap() - z * gamma(z).unwrap()).norm() / gamma(z + 1.0).unwrap().norm();
        worst_shift = worst_shift.max(shift);
        checked += 1;
    }
    assert!(worst_refl < 1e-12, "reflection {worst_refl:e}");
    assert!(worst_shift < 1e-12, "shift {worst_shift:e}");
    let mut worst_res = 0.0f64;
    for m in 0..=10i64 {
        let series = gamma_laurent(&rat(-m), 2);
        let expected = (1..=m).fold(1.0f64, |acc, j| -acc / j as f64);
        let got = series.residue();
        worst_res = worst_res.max((got.re - expected).abs() / expected.abs());
        assert_eq!(got.im, 0.0);
    }
    assert!(worst_res <= 1e-14, "residue {worst_res:e}");
    println!(
        "[criterion 08] PASS gamma identities: reflection {worst_refl:.2e}, shift {worst_shift:.2e}, residues {worst_res:.2e}"
    );
}

#[test]
fn criterion_09_localization() {
    let (git2, fan2, boxes2) = p2();
    let whole2 = &boxes2[0];
    let d = |i: usize| DivisorPolynomial::<Rat>::variable(3, 2, i);
    let sq = d(0).mul(&d(0));
    assert_eq!(localize_integral(&git2, &fan2, whole2, &sq, 42).unwrap(), rat(1));
    let (gitw, fanw, boxesw) = wp12();
    let wholew = boxesw.iter().find(|b| b.host_cone.is_empty()).unwrap();
    let d2 = DivisorPolynomial::<Rat>::variable(2, 1, 1);
    assert_eq!(localize_integral(&gitw, &fanw, wholew, &d2, 42).unwrap(), ratio(1, 2));
    // Two independent draws agree exactly.
    let a = localize_integral(&git2, &fan2, whole2, &sq, 1001).unwrap();
    let b = localize_integral(&git2, &fan2, whole2, &sq, 9732).unwrap();
    assert_eq!(a, b);
    // 50 random degree-2 monomials on F_1 against the hand-coded table
    // (f = D_1 = D_3, s = D_4, D_2 = s + f; f.f = 0, f.s = 1, s.s = -1).
    let (git, fan, boxes) = f1();
    let whole = boxes.iter().find(|b| b.host_cone.is_empty()).unwrap();
    let classes: Vec<Vec<Rat>> = vec![
        vec![rat(1), rat(0)],
        vec![rat(1), rat(1)],
        vec![rat(1), rat(0)],
        vec![rat(0), rat(1)],
    ];
    let pair = |a: &[Rat], b: &[Rat]| -> Rat { &a[0] * &b[1] + &a[1] * &b[0] - &a[1] * &b[1] };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7177);
    for _ in 0..50 {
        let i = rng.gen_range(0..4usize);
        let j = rng.gen_range(0..4usize);
        let mono = DivisorPolynomial::<Rat>::variable(4, 2, i)
            .mul(&DivisorPolynomial::<Rat>::variable(4, 2, j));
        let got = localize_integral(&git, &fan, whole, &mono, 42).unwrap();
        assert_eq!(got, pair(&classes[i], &classes[j]), "D_{} . D_{}", i + 1, j + 1);
    }
    println!("[criterion 09] PASS localization: unit checks, exact draw-independence, 50-monomial F_1 table");
}

#[test]
fn criterion_10_cycle_suite() {
    let start = Instant::now();
    // Multiplicity table for P^2 by (|I|, |J|) classes.
    let (git2, fan2, _) = p2();
    let table: &[(usize, usize, i64)] = &[
        (0, 0, 1),
        (0, 1, 0),
        (0, 2, 0),
        (0, 3, 1),
        (1, 0, -1),
        (1, 1, 0),
        (1, 2, 1),
        (2, 0, 1),
        (2, 1, 1),
    ];
    for imask in 0u64..8 {
        let i_set: Vec<usize> = (0..3).filter(|i| imask >> i & 1 == 1).collect();
        if !fan2.is_cone(&i_set) {
            continue;
        }
        let rest: Vec<usize> = (0..3).filter(|i| !i_set.contains(i)).collect();
        for jmask in 0u64..(1 << rest.len()) {
            let j_set: Vec<usize> = rest
                .iter()
                .enumerate()
                .filter(|(pos, _)| jmask >> pos & 1 == 1)
                .map(|(_, &j)| j)
                .collect();
            let m = multiplicity(&i_set, &j_set, &fan2, 2).unwrap();
            let expected = table
                .iter()
                .find(|(a, b, _)| *a == i_set.len() && *b == j_set.len())
                .unwrap()
                .2;
            assert_eq!(m, expected, "I = {i_set:?}, J = {j_set:?}");
        }
    }
    // Boundary vanishes for 50 random shifts on P^2 and F_1, and the two
    // backends agree after refinement.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31415);
    for (make, label) in [
        (p2 as fn() -> (GitPresentation, StackyFan, Vec<BoxElement>), "P2"),
        (f1 as fn() -> _, "F1"),
    ] {
        let (git, fan, _) = make();
        for trial in 0..50 {
            let a: Vec<Rat> = (0..git.r_rays)
                .map(|_| ratio(rng.gen_range(-250..250) * 2 + 1, 173))
                .collect();
            let cycle = ccc_cycle(&git, &fan, &a).unwrap();
            assert!(
                boundary_is_zero(&git, &cycle).unwrap(),
                "{label} trial {trial}: boundary nonzero at {a:?}"
            );
            if trial % 10 == 0 {
                let def = ccc_cycle_definition(&git, &fan, &a).unwrap();
                assert!(chains_equal(&git, &cycle, &def, &a), "{label} backends disagree at {a:?}");
            }
        }
    }
    // Ample shifts reproduce the moment-polytope cycle on P^1 and P^2.
    let (git1, fan1, _) = p1();
    let a1 = vec![rat(1), rat(1)];
    let c1 = ccc_cycle(&git1, &fan1, &a1).unwrap();
    let amp1 = ample_moment_cycle(&git1, &fan1, &a1).unwrap();
    assert!(chains_equal(&git1, &c1, &amp1, &a1));
    let a2 = vec![ratio(3, 10), ratio(2, 5), ratio(1, 2)];
    let c2 = ccc_cycle(&git2, &fan2, &a2).unwrap();
    let amp2 = ample_moment_cycle(&git2, &fan2, &a2).unwrap();
    assert!(chains_equal(&git2, &c2, &amp2, &a2));
    let elapsed = start.elapsed();
    println!("[criterion 10] PASS cycle suite: multiplicity table, 2x50 closed boundaries, backend and ample agreement in {elapsed:?}");
}

#[test]
fn criterion_11_syz_spot_check() {
    let (git, fan, boxes) = p1();
    let kappa = global_kappa();
    let twist = trivial_twist(&git);
    let t = c64(-3.0, 0.5);
    let params = ComplexParams::new(vec![t], 1.0).unwrap();
    let syz = zb_over_syz_n1(&git, &fan, &twist, &params, 1e-9, 4000).unwrap();
    let series = za_series(&git, &fan, &boxes, &twist, &params, 1e-10, &rat(26), 42).unwrap();
    // Z_syz = kappa^{-1} (2 pi i)^n Z_A.
    let expected = series.charge.value * c64(0.0, TAU) / kappa;
    let rel = (syz.value - expected).norm() / expected.norm();
    assert!(rel < 1e-6, "relative residual {rel:e}");
    println!("[criterion 11] PASS SYZ cycle spot check at t = -3 + 0.5i: residual {rel:.2e}");
}

#[test]
fn criterion_12_determinism() {
    let bin = env!("CARGO_BIN_EXE_mirror-charge");
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/p1.json");
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let status = std::process::Command::new(bin)
            .args(["verify", fixture, "--seed", "42", "--quiet", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success(), "verify run failed");
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "reports differ between reruns");
    assert!(!a.is_empty());
    println!("[criterion 12] PASS determinism: byte-identical verify reports ({} bytes)", a.len());
}

#[test]
fn negative_control_wrong_pairing() {
    // Pairing the A-side of the trivial bundle with the B-side of an
    // unrelated twist must be flagged, not absorbed into kappa.
    let (git, fan, boxes) = p1();
    let twist0 = trivial_twist(&git);
    let twist1 = LineBundleTwist::new(&git, vec![rat(1), rat(0)]).unwrap();
    let t = c64(-3.0, -TAU);
    let params = ComplexParams::new(vec![t], 1.0).unwrap();
    let series = za_series(&git, &fan, &boxes, &twist0, &params, 1e-10, &rat(26), 42).unwrap();
    let spec = QuadratureSpec::default_for(&git, 1e-9).unwrap();
    let mb = mb_inverse_fourier(&git, &twist1, &params, &spec).unwrap();
    let normalize = c64(0.0, TAU).powi(-1);
    let ratio_raw = series.charge.value / (normalize * mb.value);
    let flagged = match snap_kappa(ratio_raw) {
        None => true,
        Some((kappa, _)) => {
            (series.charge.value - kappa * normalize * mb.value).norm()
                / series.charge.value.norm()
                > 1e-6
        }
    };
    assert!(flagged, "wrong pairing not detected: ratio {ratio_raw}");
    println!("[extra] PASS negative control: mismatched twist pairing detected");
}
