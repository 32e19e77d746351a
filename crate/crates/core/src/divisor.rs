//! Polynomials in the toric divisor classes and their exact integration over
//! twisted sectors by torus fixed-point localization.
//!
//! The localization weights are the canonical ones: at the fixed point of a
//! maximal cone, an adjacent divisor restricts to its dual-basis functional
//! and every other divisor restricts to zero. Summing over fixed points with
//! a generic rational parameter vector gives the integral of the top-degree
//! part exactly; lower-degree parts cancel identically, which doubles as a
//! self-check on the weights.

use crate::error::{Error, Result};
use crate::lattice::{BoxElement, GitPresentation, StackyFan};
use crate::rational::*;
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Coefficient fields the divisor algebra is instantiated at: exact rationals
/// for the combinatorial checks, complex doubles for the analytic pipeline.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn is_zero(&self) -> bool;
}

impl Coeff for Rat {
    fn zero() -> Self {
        num::Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        num::Zero::is_zero(self)
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        Complex64::new(rat_to_f64(r), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// A sparse polynomial in the fan divisor classes, truncated in total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorPolynomial<T: Coeff> {
    pub nvars: usize,
    /// Total-degree truncation order; monomials beyond it are dropped.
    pub cap: usize,
    pub terms: BTreeMap<Vec<u8>, T>,
}

impl<T: Coeff> DivisorPolynomial<T> {
    pub fn zero(nvars: usize, cap: usize) -> Self {
        DivisorPolynomial {
            nvars,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, cap: usize, c: T) -> Self {
        let mut p = Self::zero(nvars, cap);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn variable(nvars: usize, cap: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars, cap);
        if cap >= 1 {
            let mut e = vec![0u8; nvars];
            e[i] = 1;
            p.terms.insert(e, T::one());
        }
        p
    }

    pub fn linear(nvars: usize, cap: usize, coeffs: &[T]) -> Self {
        let mut p = Self::zero(nvars, cap);
        if cap >= 1 {
            for (i, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    let mut e = vec![0u8; nvars];
                    e[i] = 1;
                    p.terms.insert(e, c.clone());
                }
            }
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn insert_add(&mut self, e: Vec<u8>, c: T) {
        if c.is_zero() {
            return;
        }
        let deg: usize = e.iter().map(|&x| x as usize).sum();
        if deg > self.cap {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(T::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            let keys: Vec<Vec<u8>> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in keys {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (e, v) in &self.terms {
            out.insert_add(e.clone(), v.mul(c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (ea, ca) in &self.terms {
            let da: usize = ea.iter().map(|&x| x as usize).sum();
            for (eb, cb) in &o.terms {
                let db: usize = eb.iter().map(|&x| x as usize).sum();
                if da + db > self.cap {
                    continue;
                }
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_add(e, ca.mul(cb));
            }
        }
        out
    }

    /// exp of a polynomial with zero constant term, truncated at the cap.
    pub fn exp_nilpotent(&self) -> Self {
        debug_assert!(self.terms.get(&vec![0u8; self.nvars]).is_none());
        let mut out = Self::constant(self.nvars, self.cap, T::one());
        let mut power = Self::constant(self.nvars, self.cap, T::one());
        let mut factorial = Rat::one();
        for j in 1..=self.cap {
            power = power.mul(self);
            if power.terms.is_empty() {
                break;
            }
            factorial *= rat(j as i64);
            out = out.add(&power.scale(&T::from_rat(&factorial.recip())));
        }
        out
    }

    /// Substitute variable `var` by a linear form in the other variables.
    pub fn substitute_linear(&self, var: usize, form: &Self) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (e, c) in &self.terms {
            let pow = e[var] as usize;
            if pow == 0 {
                out.insert_add(e.clone(), c.clone());
                continue;
            }
            let mut base = e.clone();
            base[var] = 0;
            let mut acc = Self::zero(self.nvars, self.cap);
            acc.insert_add(base, c.clone());
            for _ in 0..pow {
                acc = acc.mul(form);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Evaluate at a point; entries beyond `point.len()` count as zero.
    pub fn evaluate(&self, point: &[T]) -> T {
        let mut total = T::zero();
        'terms: for (e, c) in &self.terms {
            let mut v = c.clone();
            for (i, &pow) in e.iter().enumerate() {
                for _ in 0..pow {
                    if i >= point.len() || point[i].is_zero() {
                        continue 'terms;
                    }
                    v = v.mul(&point[i]);
                }
            }
            total = total.add(&v);
        }
        total
    }

    pub fn truncated(&self, cap: usize) -> Self {
        let mut out = Self::zero(self.nvars, cap);
        for (e, c) in &self.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }
}

/// Rewrite modulo the divisor linear equivalences sum_i <m, b_i> D_i = 0,
/// eliminating the highest-index divisor classes first so e.g. the last ray
/// class of a projective space maps onto the first.
pub fn reduce_by_relations<T: Coeff>(
    poly: &DivisorPolynomial<T>,
    git: &GitPresentation,
) -> DivisorPolynomial<T> {
    let rp = git.r_rays;
    let mut rel: Vec<Vec<Rat>> = (0..git.n)
        .map(|m| (0..rp).map(|i| Rat::from_integer(git.rays[i][m].clone())).collect())
        .collect();
    let col_order: Vec<usize> = (0..rp).rev().collect();
    let pivots = rref(&mut rel, &col_order);
    let mut out = poly.clone();
    for (row, &p) in pivots.iter().enumerate() {
        // D_p = -sum_{j != p} rel[row][j] D_j (coefficient of p is 1).
        let coeffs: Vec<T> = (0..rp)
            .map(|j| {
                if j == p {
                    T::zero()
                } else {
                    T::from_rat(&-rel[row][j].clone())
                }
            })
            .collect();
        let form = DivisorPolynomial::linear(poly.nvars, poly.cap, &coeffs);
        out = out.substitute_linear(p, &form);
    }
    out
}

/// Localization data for one sector: the fixed points are the maximal cones
/// containing the host cone.
pub struct SectorIntegrator {
    /// Generic parameter; recorded for reproducibility.
    pub xi: Vec<Int>,
    pub seed: u64,
    /// Per fixed point: (weights per original ray index, euler factor, |G_sigma|).
    points: Vec<(Vec<Rat>, Rat, Rat)>,
    pub dim: usize,
}

impl SectorIntegrator {
    pub fn new(
        git: &GitPresentation,
        fan: &StackyFan,
        sector: &BoxElement,
        seed: u64,
    ) -> Result<Self> {
        let n = git.n;
        let dim = sector.dim_sector(n);
        let cones = fan.maximal_containing(&sector.host_cone);
        if cones.is_empty() {
            return Err(Error::NotACone(sector.host_cone.clone()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        'retry: for _attempt in 0..16 {
            let xi: Vec<Int> = (0..n).map(|_| int(rng.gen_range(-1_000_000..1_000_000i64))).collect();
            let xi_rat = int_vec_to_rat(&xi);
            let mut points = Vec::new();
            for &ci in &cones {
                let cone = &fan.maximal_cones[ci];
                let weights_m = git.cone_weights(cone);
                let mut wvec = vec![Rat::zero(); git.r_total];
                for (pos, &i) in cone.iter().enumerate() {
                    wvec[i] = dot(&weights_m[pos], &xi_rat);
                }
                let mut euler = Rat::one();
                for &i in cone {
                    if sector.host_cone.contains(&i) {
                        continue;
                    }
                    if wvec[i].is_zero() {
                        continue 'retry;
                    }
                    euler *= wvec[i].clone();
                }
                let order = crate::lattice::stabilizer_order(git, cone);
                points.push((wvec, euler, Rat::from_integer(order)));
            }
            return Ok(SectorIntegrator {
                xi,
                seed,
                points,
                dim,
            });
        }
        Err(Error::DegenerateParameters)
    }

    /// Integrate a divisor polynomial over the sector. The polynomial may have
    /// degree below the sector dimension (those parts integrate to zero).
    pub fn integrate<T: Coeff>(&self, poly: &DivisorPolynomial<T>) -> Result<T> {
        if poly.degree() > self.dim {
            return Err(Error::DegreeMismatch {
                degree: poly.degree(),
                dim: self.dim,
            });
        }
        let mut total = T::zero();
        for (wvec, euler, order) in &self.points {
            let point: Vec<T> = wvec.iter().map(|w| T::from_rat(w)).collect();
            let num = poly.evaluate(&point);
            let denom = euler * order;
            total = total.add(&num.mul(&T::from_rat(&denom.recip())));
        }
        Ok(total)
    }
}

/// One-call exact integral of a polynomial over a sector.
pub fn localize_integral<T: Coeff>(
    git: &GitPresentation,
    fan: &StackyFan,
    sector: &BoxElement,
    poly: &DivisorPolynomial<T>,
    seed: u64,
) -> Result<T> {
    SectorIntegrator::new(git, fan, sector, seed)?.integrate(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_elements, test_f1, test_p1, test_p2, test_wp12};

    fn whole_space(git: &GitPresentation) -> BoxElement {
        BoxElement {
            v: vec![<Int as num::Zero>::zero(); git.n],
            host_cone: Vec::new(),
            c_of_v: vec![<Rat as num::Zero>::zero(); git.r_total],
            age: <Rat as num::Zero>::zero(),
        }
    }

    #[test]
    fn p2_intersection_numbers() {
        let (git, fan) = test_p2();
        let sector = whole_space(&git);
        let cap = 2;
        let d = |i: usize| DivisorPolynomial::<Rat>::variable(3, cap, i);
        let p12 = d(0).mul(&d(1));
        assert_eq!(localize_integral(&git, &fan, &sector, &p12, 7).unwrap(), rat(1));
        let p11 = d(0).mul(&d(0));
        assert_eq!(localize_integral(&git, &fan, &sector, &p11, 7).unwrap(), rat(1));
        // Degree-one classes integrate to zero, independent of the draw.
        assert_eq!(localize_integral(&git, &fan, &sector, &d(0), 7).unwrap(), rat(0));
        // Two independent draws agree exactly.
        let a = localize_integral(&git, &fan, &sector, &p11, 12345).unwrap();
        let b = localize_integral(&git, &fan, &sector, &p11, 99991).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wp12_orbifold_point() {
        let (git, fan) = test_wp12();
        let sector = whole_space(&git);
        let d2 = DivisorPolynomial::<Rat>::variable(2, 1, 1);
        assert_eq!(localize_integral(&git, &fan, &sector, &d2, 3).unwrap(), ratio(1, 2));
        let d1 = DivisorPolynomial::<Rat>::variable(2, 1, 0);
        assert_eq!(localize_integral(&git, &fan, &sector, &d1, 3).unwrap(), rat(1));
        // The twisted sector is a point with a order-2 stabilizer.
        let boxes = box_elements(&fan, &git);
        let twisted = boxes.iter().find(|b| !num::Zero::is_zero(&b.age)).unwrap();
        let one = DivisorPolynomial::<Rat>::constant(2, 0, rat(1));
        assert_eq!(
            localize_integral(&git, &fan, twisted, &one, 3).unwrap(),
            ratio(1, 2)
        );
    }

    #[test]
    fn p1_basics() {
        let (git, fan) = test_p1();
        let sector = whole_space(&git);
        let d1 = DivisorPolynomial::<Rat>::variable(2, 1, 0);
        assert_eq!(localize_integral(&git, &fan, &sector, &d1, 5).unwrap(), rat(1));
        let deg2 = DivisorPolynomial::<Rat>::variable(2, 2, 0)
            .mul(&DivisorPolynomial::<Rat>::variable(2, 2, 0));
        assert!(matches!(
            SectorIntegrator::new(&git, &fan, &sector, 5).unwrap().integrate(&deg2),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn reduction_normal_forms() {
        let (git, _) = test_p2();
        let cap = 2;
        let d3 = DivisorPolynomial::<Rat>::variable(3, cap, 2);
        let red = reduce_by_relations(&d3, &git);
        assert_eq!(red, DivisorPolynomial::<Rat>::variable(3, cap, 0));
        // Idempotence.
        assert_eq!(reduce_by_relations(&red, &git), red);
        let (git1, _) = test_p1();
        let d2 = DivisorPolynomial::<Rat>::variable(2, 1, 1);
        assert_eq!(
            reduce_by_relations(&d2, &git1),
            DivisorPolynomial::<Rat>::variable(2, 1, 0)
        );
        let zero = DivisorPolynomial::<Rat>::zero(3, cap);
        assert_eq!(reduce_by_relations(&zero, &git), zero);
    }

    #[test]
    fn reduction_preserves_integrals() {
        let (git, fan) = test_f1();
        let sector = whole_space(&git);
        let cap = 2;
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        use rand::Rng as _;
        for _ in 0..10 {
            let i = rng.gen_range(0..4usize);
            let j = rng.gen_range(0..4usize);
            let m = DivisorPolynomial::<Rat>::variable(4, cap, i)
                .mul(&DivisorPolynomial::<Rat>::variable(4, cap, j));
            let red = reduce_by_relations(&m, &git);
            let a = localize_integral(&git, &fan, &sector, &m, 21).unwrap();
            let b = localize_integral(&git, &fan, &sector, &red, 21).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn f1_intersection_table() {
        // Hand-coded intersection numbers on the first Hirzebruch surface in
        // the basis f = D_1 (fiber), s = D_4 (the -1 section):
        // f.f = 0, f.s = 1, s.s = -1, D_2 = s + f, D_3 = f.
        let (git, fan) = test_f1();
        let sector = whole_space(&git);
        let classes: Vec<Vec<Rat>> = vec![
            vec![rat(1), rat(0)],  // D_1 = f
            vec![rat(1), rat(1)],  // D_2 = s + f
            vec![rat(1), rat(0)],  // D_3 = f
            vec![rat(0), rat(1)],  // D_4 = s
        ];
        let pair = |a: &[Rat], b: &[Rat]| -> Rat {
            // (xf + ys).(uf + vs) = xv + yu - yv
            &a[0] * &b[1] + &a[1] * &b[0] - &a[1] * &b[1]
        };
        for i in 0..4 {
            for j in 0..4 {
                let m = DivisorPolynomial::<Rat>::variable(4, 2, i)
                    .mul(&DivisorPolynomial::<Rat>::variable(4, 2, j));
                let got = localize_integral(&git, &fan, &sector, &m, 17).unwrap();
                assert_eq!(got, pair(&classes[i], &classes[j]), "D_{} . D_{}", i + 1, j + 1);
            }
        }
    }
}
