//! Exact combinatorics of the toric GIT datum: lattices, fans, anticones,
//! Box elements, extended curve classes, and the basis/splitting choices.
//!
//! All arithmetic in this module is exact (BigInt / BigRational); nothing here
//! touches floating point.

use crate::error::{Error, Result};
use crate::rational::*;
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// The toric input: ray vectors b_i, stability eta, derived charge matrix,
/// chosen dual basis and splittings.
///
/// Coordinates on the dual lattice use the basis p_a selected by
/// [`GitPresentation::build`]; the basis itself is recorded (rows of
/// `p_in_canonical`) relative to the canonical Hermite kernel basis so that
/// reports from different runs are comparable. The dual basis -w_i of the big
/// torus character lattice is the standard coordinate basis throughout.
#[derive(Debug, Clone)]
pub struct GitPresentation {
    pub n: usize,
    /// Number of fan rays r'.
    pub r_rays: usize,
    /// Total vector count r (rays plus extra vectors).
    pub r_total: usize,
    /// Vectors b_1..b_r in Z^n.
    pub rays: Vec<Vec<Int>>,
    /// Stability vector in the p-basis coordinates of the dual lattice.
    pub eta: Vec<Rat>,
    /// Charge matrix rows l^{(a)}; charge[a][i] = l_i^{(a)}.
    pub charge: Vec<Vec<Int>>,
    /// Rows: p_a written in the canonical Hermite kernel dual basis.
    pub p_in_canonical: Vec<Vec<Int>>,
    pub splitting: Splittings,
}

/// Rational splitting data for the dual short exact sequence.
#[derive(Debug, Clone)]
pub struct Splittings {
    /// ell[i][a]: the right inverse of the projection to the dual lattice,
    /// so p_a = sum_i ell[i][a] D_i and sum_i l_i^{(a)} ell[i][b] = delta_ab.
    pub ell: Vec<Vec<Rat>>,
    /// For each extra vector j > r': D_j^vee in the e_a basis.
    pub dvee: Vec<Vec<Rat>>,
    /// For each extra vector j > r': the positive coefficients s_{ji}
    /// expressing b_j in the rays of its host cone.
    pub s_coeffs: Vec<Vec<(usize, Rat)>>,
}

#[derive(Debug, Clone)]
pub struct StackyFan {
    /// Every cone of the fan as a sorted ray-index set (includes the empty cone).
    pub cones: Vec<Vec<usize>>,
    /// The n-dimensional cones.
    pub maximal_cones: Vec<Vec<usize>>,
    /// The anticone family, sorted.
    pub anticones: Vec<Vec<usize>>,
    pub complete: bool,
}

impl StackyFan {
    pub fn is_cone(&self, idx: &[usize]) -> bool {
        let set: BTreeSet<usize> = idx.iter().copied().collect();
        self.maximal_cones
            .iter()
            .any(|m| set.iter().all(|i| m.contains(i)))
    }

    pub fn maximal_containing(&self, idx: &[usize]) -> Vec<usize> {
        (0..self.maximal_cones.len())
            .filter(|&m| idx.iter().all(|i| self.maximal_cones[m].contains(i)))
            .collect()
    }
}

/// A twisted sector index: a lattice point v = sum c_i(v) b_i with c_i in [0,1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxElement {
    pub v: Vec<Int>,
    /// Minimal cone containing v (ray indices where c_i != 0).
    pub host_cone: Vec<usize>,
    /// c_i(v), full length r (zero outside the host cone).
    pub c_of_v: Vec<Rat>,
    pub age: Rat,
}

impl BoxElement {
    pub fn dim_sector(&self, n: usize) -> usize {
        n - self.host_cone.len()
    }
}

/// An extended curve class beta with its ray pairings and twisted sector.
#[derive(Debug, Clone)]
pub struct CurveClass {
    /// Coordinates of beta in the e_a basis.
    pub beta: Vec<Rat>,
    /// D_i(beta) for i = 1..r.
    pub pairings: Vec<Rat>,
    pub sector: BoxElement,
    /// sum_a <beta, p_a>.
    pub degree: Rat,
    /// A maximal cone on which all pairings over the anticone are integral.
    pub witness_cone: Vec<usize>,
}

/// A real equivariant Picard element O(sum c_i D_i) with c_j = 0 for extras.
#[derive(Debug, Clone, PartialEq)]
pub struct LineBundleTwist {
    pub c: Vec<Rat>,
    pub h: Vec<Rat>,
}

impl LineBundleTwist {
    pub fn new(git: &GitPresentation, c: Vec<Rat>) -> Result<Self> {
        if c.len() != git.r_total {
            return Err(Error::SchemaError(vec![format!(
                "/twist: expected {} entries, got {}",
                git.r_total,
                c.len()
            )]));
        }
        for (j, cj) in c.iter().enumerate().skip(git.r_rays) {
            if !cj.is_zero() {
                return Err(Error::SchemaError(vec![format!(
                    "/twist/{j}: must vanish on extra vectors"
                )]));
            }
        }
        let h = h_of(&c, git);
        Ok(LineBundleTwist { c, h })
    }
}

/// h_a = sum_{i <= r'} l_i^{(a)} c_i; the central charge depends on the twist
/// only through these combinations.
pub fn h_of(c: &[Rat], git: &GitPresentation) -> Vec<Rat> {
    (0..git.charge.len())
        .map(|a| {
            (0..git.r_rays)
                .map(|i| Rat::from_integer(git.charge[a][i].clone()) * &c[i])
                .sum()
        })
        .collect()
}

/// Z-basis of the kernel of the ray map, rows presented in Hermite form.
pub fn derive_charge_matrix(rays: &[Vec<Int>], n: usize) -> Result<Vec<Vec<Int>>> {
    let r = rays.len();
    if n == 0 {
        // Rank-zero target: the kernel is everything.
        return Ok((0..r)
            .map(|i| (0..r).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect());
    }
    let mat: Vec<Vec<Int>> = (0..n).map(|row| rays.iter().map(|b| b[row].clone()).collect()).collect();
    if lattice_index_of_columns(&mat) != Int::one() {
        return Err(Error::NotGenerating);
    }
    let kernel = integer_kernel(&mat);
    if kernel.len() != r - n {
        return Err(Error::RankDeficient {
            expected: r - n,
            found: kernel.len(),
        });
    }
    Ok(kernel)
}

fn lattice_index_of_columns(mat: &[Vec<Int>]) -> Int {
    let n = mat.len();
    if n == 0 {
        return Int::one();
    }
    let r = mat[0].len();
    let rows: Vec<Vec<Int>> = (0..r).map(|i| (0..n).map(|j| mat[j][i].clone()).collect()).collect();
    lattice_index(&rows)
}

/// The anticone family of a stability vector: I is an anticone iff eta lies in
/// the strictly positive span of {D_i : i in I}.
pub fn anticones(d_cols: &[Vec<Rat>], eta: &[Rat]) -> Result<Vec<Vec<usize>>> {
    let r = d_cols.len();
    let all: Vec<usize> = (0..r).collect();
    if cone_membership(d_cols, eta).is_none() {
        return Err(Error::EmptyAnticones);
    }
    if eta_on_wall(d_cols, eta) {
        return Err(Error::WallEta);
    }
    let mut out = Vec::new();
    for mask in 1u64..(1 << r) {
        let idx: Vec<usize> = all.iter().copied().filter(|i| mask >> i & 1 == 1).collect();
        let gens: Vec<Vec<Rat>> = idx.iter().map(|&i| d_cols[i].clone()).collect();
        if let Some(support) = cone_membership(&gens, eta) {
            // Strict positivity on every member of I.
            if support.len() == idx.len() {
                out.push(idx);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyAnticones);
    }
    out.sort();
    Ok(out)
}

/// eta lies on a GIT wall iff it is in a cone spanned by fewer than k
/// linearly independent divisor classes.
fn eta_on_wall(d_cols: &[Vec<Rat>], eta: &[Rat]) -> bool {
    let r = d_cols.len();
    let k = eta.len();
    for mask in 1u64..(1 << r) {
        let idx: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).collect();
        let gens: Vec<Vec<Rat>> = idx.iter().map(|&i| d_cols[i].clone()).collect();
        if rank(&gens) < k && cone_membership(&gens, eta).is_some() {
            return true;
        }
    }
    false
}

/// Rebuild the fan from the anticone family: cones are complements of
/// anticones restricted to the fan rays.
pub fn fan_from_anticones(
    anticone_family: &[Vec<usize>],
    rays: &[Vec<Int>],
    r_rays: usize,
) -> Result<StackyFan> {
    let r = rays.len();
    let n = if rays.is_empty() { 0 } else { rays[0].len() };
    let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for ac in anticone_family {
        let acset: BTreeSet<usize> = ac.iter().copied().collect();
        let comp: Vec<usize> = (0..r).filter(|i| !acset.contains(i)).collect();
        if comp.iter().any(|&i| i >= r_rays) {
            // Extra vectors never span fan cones; such a complement signals a
            // stability vector incompatible with the extra data.
            return Err(Error::NotSimplicial(comp));
        }
        let mat: Vec<Vec<Rat>> = comp.iter().map(|&i| int_vec_to_rat(&rays[i])).collect();
        if rank(&mat) != comp.len() {
            return Err(Error::NotSimplicial(comp));
        }
        cones.insert(comp);
    }
    // Close under faces.
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in &cones {
        for mask in 0u64..(1 << c.len()) {
            let f: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|(pos, _)| mask >> pos & 1 == 1)
                .map(|(_, &i)| i)
                .collect();
            all.insert(f);
        }
    }
    let maximal: Vec<Vec<usize>> = all.iter().filter(|c| c.len() == n).cloned().collect();
    let complete = check_complete(&maximal, rays, n);
    Ok(StackyFan {
        cones: all.into_iter().collect(),
        maximal_cones: maximal,
        anticones: anticone_family.to_vec(),
        complete,
    })
}

/// Completeness probe: a deterministic battery of rational directions must all
/// lie in some maximal cone.
fn check_complete(maximal: &[Vec<usize>], rays: &[Vec<Int>], n: usize) -> bool {
    if n == 0 {
        return true;
    }
    let mut probes: Vec<Vec<Rat>> = Vec::new();
    // Axis directions, their negatives, and a spread of mixed directions.
    for j in 0..n {
        for sgn in [1i64, -1] {
            let mut v = vec![Rat::zero(); n];
            v[j] = rat(sgn);
            probes.push(v);
        }
    }
    let mut seed = 0x9e3779b97f4a7c15u64;
    for _ in 0..64 {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            v.push(rat((seed >> 33) as i64 % 19 - 9));
        }
        if v.iter().any(|x| !x.is_zero()) {
            probes.push(v);
        }
    }
    probes.iter().all(|p| {
        maximal.iter().any(|cone| {
            let mat: Vec<Vec<Rat>> = (0..n)
                .map(|row| cone.iter().map(|&i| Rat::from_integer(rays[i][row].clone())).collect())
                .collect();
            match solve(&mat, p) {
                Some(c) => c.iter().all(|x| !x.is_negative()),
                None => false,
            }
        })
    })
}

/// Enumerate the Box of the stacky fan: lattice points sum c_i b_i with
/// 0 <= c_i < 1 per cone, deduplicated. Always contains v = 0.
pub fn box_elements(fan: &StackyFan, git: &GitPresentation) -> Vec<BoxElement> {
    let n = git.n;
    let mut seen: BTreeMap<Vec<Int>, BoxElement> = BTreeMap::new();
    seen.insert(
        vec![Int::zero(); n],
        BoxElement {
            v: vec![Int::zero(); n],
            host_cone: Vec::new(),
            c_of_v: vec![Rat::zero(); git.r_total],
            age: Rat::zero(),
        },
    );
    for cone in &fan.maximal_cones {
        let mat: Vec<Vec<Rat>> = (0..n)
            .map(|row| cone.iter().map(|&i| Rat::from_integer(git.rays[i][row].clone())).collect())
            .collect();
        // Bounding box of the half-open parallelepiped.
        let mut lo = vec![Int::zero(); n];
        let mut hi = vec![Int::zero(); n];
        for row in 0..n {
            for &i in cone {
                let b = &git.rays[i][row];
                if b.is_negative() {
                    lo[row] += b;
                } else {
                    hi[row] += b;
                }
            }
        }
        let mut point = lo.clone();
        'scan: loop {
            if let Some(c) = solve(&mat, &int_vec_to_rat(&point)) {
                let inside = c
                    .iter()
                    .all(|x| !x.is_negative() && x < &Rat::one());
                let exact = {
                    let mut ok = true;
                    for row in 0..n {
                        let s: Rat = cone
                            .iter()
                            .zip(&c)
                            .map(|(&i, ci)| Rat::from_integer(git.rays[i][row].clone()) * ci)
                            .sum();
                        if s != Rat::from_integer(point[row].clone()) {
                            ok = false;
                            break;
                        }
                    }
                    ok
                };
                if inside && exact {
                    let host: Vec<usize> = cone
                        .iter()
                        .zip(&c)
                        .filter(|(_, ci)| !ci.is_zero())
                        .map(|(&i, _)| i)
                        .collect();
                    let mut c_full = vec![Rat::zero(); git.r_total];
                    for (pos, &i) in cone.iter().enumerate() {
                        c_full[i] = c[pos].clone();
                    }
                    let age: Rat = c.iter().cloned().sum();
                    seen.entry(point.clone()).or_insert(BoxElement {
                        v: point.clone(),
                        host_cone: host,
                        c_of_v: c_full,
                        age,
                    });
                }
            }
            // Advance the integer point odometer.
            for row in 0..n {
                point[row] += Int::one();
                if point[row] <= hi[row] {
                    continue 'scan;
                }
                point[row] = lo[row].clone();
            }
            break;
        }
    }
    let mut out: Vec<BoxElement> = seen.into_values().collect();
    out.sort_by(|a, b| (a.age.clone(), a.v.clone()).cmp(&(b.age.clone(), b.v.clone())));
    out
}

/// The Box involution v -> inv(v), with c_i -> 1 - c_i on the support.
pub fn box_involution(v: &BoxElement, git: &GitPresentation) -> Vec<Int> {
    let n = git.n;
    let mut out = vec![Int::zero(); n];
    for &i in &v.host_cone {
        let ci = Rat::one() - &v.c_of_v[i];
        for row in 0..n {
            let term = &ci * Rat::from_integer(git.rays[i][row].clone());
            out[row] = out[row].clone() + term.to_integer();
        }
    }
    // c_i rational: the sum is an honest lattice point, rebuild exactly.
    let mut exact = vec![Rat::zero(); n];
    for &i in &v.host_cone {
        let ci = Rat::one() - &v.c_of_v[i];
        for row in 0..n {
            exact[row] += &ci * Rat::from_integer(git.rays[i][row].clone());
        }
    }
    exact.iter().map(|x| x.to_integer()).collect()
}

/// All curve classes of degree at most `bound` in the extended effective cone,
/// each with its sector.
pub fn enumerate_keff(
    git: &GitPresentation,
    fan: &StackyFan,
    boxes: &[BoxElement],
    bound: &Rat,
) -> Result<Vec<CurveClass>> {
    let k = git.charge.len();
    let mut seen: BTreeMap<Vec<Rat>, CurveClass> = BTreeMap::new();
    for cone in &fan.maximal_cones {
        let cone_set: BTreeSet<usize> = cone.iter().copied().collect();
        let anti: Vec<usize> = (0..git.r_total).filter(|i| !cone_set.contains(i)).collect();
        debug_assert_eq!(anti.len(), k);
        // In m-coordinates (m_i = D_i(beta), i in the anticone) the effective
        // classes are exactly the nonnegative integer points.
        let msigma: Vec<Vec<Rat>> = anti
            .iter()
            .map(|&i| (0..k).map(|a| Rat::from_integer(git.charge[a][i].clone())).collect())
            .collect();
        let unit_degrees: Vec<Rat> = (0..k)
            .map(|j| {
                let rhs: Vec<Rat> = (0..k).map(|i| if i == j { Rat::one() } else { Rat::zero() }).collect();
                let beta = solve(&msigma, &rhs).expect("anticone classes form a basis");
                beta.iter().cloned().sum()
            })
            .collect();
        if unit_degrees.iter().any(|d| !d.is_positive()) {
            return Err(Error::UnboundedEnumeration);
        }
        let mut m = vec![Int::zero(); k];
        'scan: loop {
            let deg: Rat = m
                .iter()
                .zip(&unit_degrees)
                .map(|(mi, di)| Rat::from_integer(mi.clone()) * di)
                .sum();
            if deg <= *bound {
                let rhs: Vec<Rat> = m.iter().map(|x| Rat::from_integer(x.clone())).collect();
                let beta = solve(&msigma, &rhs).expect("square system");
                let pairings: Vec<Rat> = (0..git.r_total)
                    .map(|i| {
                        (0..k)
                            .map(|a| Rat::from_integer(git.charge[a][i].clone()) * &beta[a])
                            .sum()
                    })
                    .collect();
                let sector = sector_of(git, cone, &pairings, boxes);
                seen.entry(beta.clone()).or_insert(CurveClass {
                    beta,
                    pairings,
                    sector,
                    degree: deg,
                    witness_cone: cone.clone(),
                });
                // Advance.
                m[0] += Int::one();
            } else {
                // Carry: this axis is exhausted at the current prefix.
                let mut axis = 0;
                loop {
                    m[axis] = Int::zero();
                    axis += 1;
                    if axis == k {
                        break 'scan;
                    }
                    m[axis] += Int::one();
                    let d: Rat = m
                        .iter()
                        .zip(&unit_degrees)
                        .map(|(mi, di)| Rat::from_integer(mi.clone()) * di)
                        .sum();
                    if d <= *bound {
                        break;
                    }
                }
            }
        }
    }
    let mut out: Vec<CurveClass> = seen.into_values().collect();
    out.sort_by(|a, b| {
        (a.degree.clone(), a.beta.clone()).cmp(&(b.degree.clone(), b.beta.clone()))
    });
    Ok(out)
}

/// v(beta) = sum_{i in I'_sigma} {-D_i(beta)} b_i, located in the Box list.
fn sector_of(
    git: &GitPresentation,
    cone: &[usize],
    pairings: &[Rat],
    boxes: &[BoxElement],
) -> BoxElement {
    let n = git.n;
    let mut v = vec![Rat::zero(); n];
    for &i in cone {
        let frac = frac_part(&-pairings[i].clone());
        for row in 0..n {
            v[row] += &frac * Rat::from_integer(git.rays[i][row].clone());
        }
    }
    let v_int: Vec<Int> = v.iter().map(|x| x.to_integer()).collect();
    debug_assert!(v.iter().zip(&v_int).all(|(a, b)| a == &Rat::from_integer(b.clone())));
    boxes
        .iter()
        .find(|b| b.v == v_int)
        .cloned()
        .expect("sector of an effective class lies in the Box")
}

pub fn frac_part(x: &Rat) -> Rat {
    x - Rat::from_integer(x.floor().to_integer())
}

/// Positivity (Fano) verdict for the presentation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PositivityReport {
    pub fano: bool,
    /// Per maximal cone: the cone, feasibility, and the witnessing coefficients
    /// of rho-hat on the anticone classes (empty when infeasible).
    pub witnesses: Vec<ConeWitness>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConeWitness {
    pub cone: Vec<usize>,
    pub feasible: bool,
    pub coefficients: Vec<String>,
}

/// Checks rho-hat = D_1 + ... + D_r against the closure of every extended
/// sigma-nef cone. Non-Fano inputs are reported, not rejected.
pub fn check_positivity(git: &GitPresentation, fan: &StackyFan) -> PositivityReport {
    let k = git.charge.len();
    let rho: Vec<Rat> = (0..k)
        .map(|a| git.charge[a].iter().map(|x| Rat::from_integer(x.clone())).sum())
        .collect();
    let mut fano = true;
    let mut witnesses = Vec::new();
    for cone in &fan.maximal_cones {
        let cone_set: BTreeSet<usize> = cone.iter().copied().collect();
        let anti: Vec<usize> = (0..git.r_total).filter(|i| !cone_set.contains(i)).collect();
        let msigma_t: Vec<Vec<Rat>> = (0..k)
            .map(|a| anti.iter().map(|&i| Rat::from_integer(git.charge[a][i].clone())).collect())
            .collect();
        match solve(&msigma_t, &rho) {
            Some(x) if x.iter().all(|v| !v.is_negative()) => witnesses.push(ConeWitness {
                cone: cone.clone(),
                feasible: true,
                coefficients: x.iter().map(rat_to_string).collect(),
            }),
            _ => {
                fano = false;
                witnesses.push(ConeWitness {
                    cone: cone.clone(),
                    feasible: false,
                    coefficients: Vec::new(),
                });
            }
        }
    }
    PositivityReport { fano, witnesses }
}

/// How a divisor class restricts to a twisted sector.
#[derive(Debug, Clone, PartialEq)]
pub enum DivisorRestriction {
    /// Ray not in the star: the class pulls back to zero.
    Zero,
    /// Ray survives to the star fan with the given star-ray index.
    StarRay(usize),
    /// Host-cone ray: pullback expressed on the star divisors.
    Combination(Vec<(usize, Rat)>),
}

/// The toric geometry of a twisted sector X_v.
#[derive(Debug, Clone)]
pub struct SectorGeometry {
    pub git: GitPresentation,
    pub fan: StackyFan,
    /// Original ray index of each star ray.
    pub star_rays: Vec<usize>,
    pub restriction: Vec<DivisorRestriction>,
    /// Order of the generic stabilizer of the sector.
    pub stabilizer_order: Int,
}

/// Quotient toric datum of the star of the host cone of v, together with the
/// divisor restriction map.
pub fn star_fan(v: &BoxElement, fan: &StackyFan, git: &GitPresentation) -> Result<SectorGeometry> {
    if v.host_cone.is_empty() {
        let restriction = (0..git.r_total)
            .map(|i| {
                if i < git.r_rays {
                    DivisorRestriction::StarRay(i)
                } else {
                    DivisorRestriction::Zero
                }
            })
            .collect();
        return Ok(SectorGeometry {
            git: git.clone(),
            fan: fan.clone(),
            star_rays: (0..git.r_rays).collect(),
            restriction,
            stabilizer_order: Int::one(),
        });
    }
    let n = git.n;
    let d = v.host_cone.len();
    // Quotient map: pair with a basis of the saturated annihilator of the host cone.
    let host_mat: Vec<Vec<Int>> = v.host_cone.iter().map(|&i| git.rays[i].clone()).collect();
    let kmat = integer_kernel(&host_mat); // (n-d) x n, saturated
    debug_assert_eq!(kmat.len(), n - d);
    let project = |b: &Vec<Int>| -> Vec<Int> {
        kmat.iter()
            .map(|row| row.iter().zip(b).map(|(a, x)| a * x).sum())
            .collect()
    };
    if fan.maximal_containing(&v.host_cone).is_empty() {
        return Err(Error::NotACone(v.host_cone.clone()));
    }
    let stabilizer_order = sublattice_index_in_saturation(&host_mat);
    // Star rays: those extending the host cone inside some cone of the fan.
    let mut star_rays = Vec::new();
    for j in 0..git.r_rays {
        if v.host_cone.contains(&j) {
            continue;
        }
        let mut idx = v.host_cone.clone();
        idx.push(j);
        idx.sort();
        if fan.is_cone(&idx) {
            star_rays.push(j);
        }
    }
    let new_rays: Vec<Vec<Int>> = star_rays.iter().map(|&j| project(&git.rays[j])).collect();
    let nv = n - d;
    let (sub_git, sub_fan) = if nv == 0 {
        (empty_presentation(), empty_fan())
    } else {
        // Maximal star cones come from maximal cones containing the host.
        let mut maximal: BTreeSet<Vec<usize>> = BTreeSet::new();
        for mi in fan.maximal_containing(&v.host_cone) {
            let cone = &fan.maximal_cones[mi];
            let local: Vec<usize> = cone
                .iter()
                .filter(|i| !v.host_cone.contains(i))
                .map(|i| star_rays.iter().position(|s| s == i).expect("star ray"))
                .collect();
            maximal.insert(local);
        }
        build_from_fan(nv, new_rays.clone(), maximal.into_iter().collect())?
    };
    // Restriction map.
    let mut restriction = Vec::with_capacity(git.r_total);
    for i in 0..git.r_total {
        if let Some(pos) = star_rays.iter().position(|&s| s == i) {
            restriction.push(DivisorRestriction::StarRay(pos));
        } else if v.host_cone.contains(&i) {
            // Rewrite D_i off the host cone: find m with <m, b_i'> = delta on
            // the host rays, then D_i ~ -sum_{j not in host} <m, b_j> D_j.
            let mat: Vec<Vec<Rat>> = v
                .host_cone
                .iter()
                .map(|&h| int_vec_to_rat(&git.rays[h]))
                .collect();
            let rhs: Vec<Rat> = v
                .host_cone
                .iter()
                .map(|&h| if h == i { Rat::one() } else { Rat::zero() })
                .collect();
            let m = solve(&mat, &rhs).expect("host rays independent");
            let mut combo = Vec::new();
            for (pos, &j) in star_rays.iter().enumerate() {
                let coeff = -dot(&m, &int_vec_to_rat(&git.rays[j]));
                if !coeff.is_zero() {
                    combo.push((pos, coeff));
                }
            }
            restriction.push(DivisorRestriction::Combination(combo));
        } else {
            restriction.push(DivisorRestriction::Zero);
        }
    }
    Ok(SectorGeometry {
        git: sub_git,
        fan: sub_fan,
        star_rays,
        restriction,
        stabilizer_order,
    })
}

fn empty_presentation() -> GitPresentation {
    GitPresentation {
        n: 0,
        r_rays: 0,
        r_total: 0,
        rays: Vec::new(),
        eta: Vec::new(),
        charge: Vec::new(),
        p_in_canonical: Vec::new(),
        splitting: Splittings {
            ell: Vec::new(),
            dvee: Vec::new(),
            s_coeffs: Vec::new(),
        },
    }
}

fn empty_fan() -> StackyFan {
    StackyFan {
        cones: vec![Vec::new()],
        maximal_cones: vec![Vec::new()],
        anticones: Vec::new(),
        complete: true,
    }
}

/// |G_sigma| for a maximal cone: the index of the sublattice its stacky rays span.
pub fn stabilizer_order(git: &GitPresentation, cone: &[usize]) -> Int {
    let rows: Vec<Vec<Int>> = cone.iter().map(|&i| git.rays[i].clone()).collect();
    lattice_index(&rows)
}

/// Index of the row span inside its saturation: the product of Hermite pivots.
fn sublattice_index_in_saturation(rows: &[Vec<Int>]) -> Int {
    let (h, _) = hnf_with_transform(rows);
    let mut idx = Int::one();
    for row in h.iter().filter(|r| r.iter().any(|x| !x.is_zero())) {
        let pivot = row.iter().find(|x| !x.is_zero()).expect("nonzero row");
        idx *= pivot.abs();
    }
    idx
}

/// Construct a presentation from an explicit fan (used for star fans, where no
/// natural stability vector is given): eta is synthesized from rho-hat and the
/// anticone family is read off the cones.
fn build_from_fan(
    n: usize,
    rays: Vec<Vec<Int>>,
    maximal: Vec<Vec<usize>>,
) -> Result<(GitPresentation, StackyFan)> {
    let r = rays.len();
    let charge = derive_charge_matrix(&rays, n)?;
    let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in &maximal {
        for mask in 0u64..(1 << c.len()) {
            cones.insert(
                c.iter()
                    .enumerate()
                    .filter(|(pos, _)| mask >> pos & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect(),
            );
        }
    }
    let mut anticone_family = Vec::new();
    for c in &cones {
        let cset: BTreeSet<usize> = c.iter().copied().collect();
        anticone_family.push((0..r).filter(|i| !cset.contains(i)).collect::<Vec<_>>());
    }
    anticone_family.sort();
    let k = charge.len();
    let eta: Vec<Rat> = (0..k)
        .map(|a| charge[a].iter().map(|x| Rat::from_integer(x.clone())).sum())
        .collect();
    let ell = right_inverse_splitting(&charge, &[])?;
    let complete = check_complete(&maximal, &rays, n);
    let fan = StackyFan {
        cones: cones.into_iter().collect(),
        maximal_cones: maximal,
        anticones: anticone_family,
        complete,
    };
    let p_in_canonical = (0..k)
        .map(|a| (0..k).map(|b| if a == b { Int::one() } else { Int::zero() }).collect())
        .collect();
    Ok((
        GitPresentation {
            n,
            r_rays: r,
            r_total: r,
            rays,
            eta,
            charge,
            p_in_canonical,
            splitting: Splittings {
                ell,
                dvee: Vec::new(),
                s_coeffs: Vec::new(),
            },
        },
        fan,
    ))
}

/// Solve for ell (r x k) with sum_i l_i^{(a)} ell[i][b] = delta_ab, subject to
/// ell(D_j) = unit_j for each extra vector j (canonical splitting constraints).
fn right_inverse_splitting(charge: &[Vec<Int>], extra_units: &[(usize, Vec<Rat>)]) -> Result<Vec<Vec<Rat>>> {
    let k = charge.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let r = charge[0].len();
    // Unknowns ell[i][a] flattened as i * k + a.
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for a in 0..k {
        for b in 0..k {
            let mut row = vec![Rat::zero(); r * k];
            for i in 0..r {
                row[i * k + b] = Rat::from_integer(charge[a][i].clone());
            }
            rows.push(row);
            rhs.push(if a == b { Rat::one() } else { Rat::zero() });
        }
    }
    // ell applied to D_j (coordinates of D_j are charge column j):
    // sum_a ell[i][a] D_j^{(a)} = delta_{ij}.
    for (j, dj) in extra_units {
        for i in 0..r {
            let mut row = vec![Rat::zero(); r * k];
            for a in 0..k {
                row[i * k + a] = dj[a].clone();
            }
            rows.push(row);
            rhs.push(if i == *j { Rat::one() } else { Rat::zero() });
        }
    }
    let x = solve(&rows, &rhs).ok_or(Error::RankDeficient { expected: k, found: 0 })?;
    Ok((0..r).map(|i| (0..k).map(|a| x[i * k + a].clone()).collect()).collect())
}

/// A user override for the dual basis selection.
pub type PBasisOverride = Option<Vec<Vec<Int>>>;

impl GitPresentation {
    /// Assemble the full presentation from rays, extra vectors, and a
    /// stability vector given in the canonical Hermite kernel dual basis.
    pub fn build(
        n: usize,
        fan_rays: Vec<Vec<Int>>,
        extra: Vec<Vec<Int>>,
        eta_canonical: Vec<Rat>,
        p_override: PBasisOverride,
    ) -> Result<(Self, StackyFan)> {
        let r_rays = fan_rays.len();
        let mut rays = fan_rays;
        rays.extend(extra);
        let r = rays.len();
        if rays.iter().any(|b| b.len() != n) {
            return Err(Error::SchemaError(vec!["/rays: dimension mismatch".into()]));
        }
        let canonical = derive_charge_matrix(&rays, n)?;
        let k = canonical.len();
        if eta_canonical.len() != k {
            return Err(Error::SchemaError(vec![format!(
                "/eta: expected {k} entries, got {}",
                eta_canonical.len()
            )]));
        }
        // Divisor classes in the canonical dual coordinates: column i.
        let d_cols: Vec<Vec<Rat>> = (0..r)
            .map(|i| (0..k).map(|a| Rat::from_integer(canonical[a][i].clone())).collect())
            .collect();
        let anticone_family = anticones(&d_cols, &eta_canonical)?;
        let fan = fan_from_anticones(&anticone_family, &rays, r_rays)?;
        // Nef-adapted dual basis.
        let p_rows = match p_override {
            Some(rows) => rows,
            None => select_p_basis(&d_cols, &fan, r_rays, k)?,
        };
        let p_rat: Vec<Vec<Rat>> = p_rows.iter().map(|row| int_vec_to_rat(row)).collect();
        let det = determinant(&p_rat);
        if det.abs() != Rat::one() {
            return Err(Error::SchemaError(vec![
                "/p_basis: not a Z-basis of the dual lattice".into(),
            ]));
        }
        // Dual-basis change: new kernel rows e_a = sum_b Q[a][b] f_b with Q = P^{-T}.
        let q = invert_transpose_integer(&p_rat);
        let charge: Vec<Vec<Int>> = (0..k)
            .map(|a| {
                (0..r)
                    .map(|i| (0..k).map(|b| &q[a][b] * &canonical[b][i]).sum())
                    .collect()
            })
            .collect();
        let eta: Vec<Rat> = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| Rat::from_integer(q[a][b].clone()) * &eta_canonical[b])
                    .sum()
            })
            .collect();
        // Splitting data for the extra vectors.
        let mut s_coeffs = Vec::new();
        let mut dvee = Vec::new();
        let mut extra_units = Vec::new();
        for j in r_rays..r {
            let host = minimal_cone_containing(&rays, &fan, &rays[j], r_rays)?;
            let mat: Vec<Vec<Rat>> = (0..n)
                .map(|row| host.iter().map(|&i| Rat::from_integer(rays[i][row].clone())).collect())
                .collect();
            let coeffs = solve(&mat, &int_vec_to_rat(&rays[j])).ok_or(Error::NotACone(host.clone()))?;
            let s: Vec<(usize, Rat)> = host
                .iter()
                .zip(&coeffs)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&i, c)| (i, c.clone()))
                .collect();
            // D_j^vee: <D_i, x> = 1 (i = j), -s_ji (i in host), 0 otherwise.
            let mut rows_sys: Vec<Vec<Rat>> = Vec::new();
            let mut rhs: Vec<Rat> = Vec::new();
            for i in 0..r {
                rows_sys.push((0..k).map(|a| Rat::from_integer(charge[a][i].clone())).collect());
                rhs.push(if i == j {
                    Rat::one()
                } else if let Some((_, sji)) = s.iter().find(|(h, _)| *h == i) {
                    -sji.clone()
                } else {
                    Rat::zero()
                });
            }
            let x = solve(&rows_sys, &rhs).ok_or(Error::RankDeficient { expected: k, found: 0 })?;
            dvee.push(x);
            s_coeffs.push(s);
            let dj: Vec<Rat> = (0..k).map(|a| Rat::from_integer(charge[a][j].clone())).collect();
            extra_units.push((j, dj));
        }
        let ell = right_inverse_splitting(&charge, &extra_units)?;
        let git = GitPresentation {
            n,
            r_rays,
            r_total: r,
            rays,
            eta,
            charge,
            p_in_canonical: p_rows,
            splitting: Splittings { ell, dvee, s_coeffs },
        };
        git.check_exactness()?;
        Ok((git, fan))
    }

    /// sum_i l_i^{(a)} b_i = 0 for every a.
    pub fn check_exactness(&self) -> Result<()> {
        for row in &self.charge {
            for coord in 0..self.n {
                let s: Int = row
                    .iter()
                    .zip(&self.rays)
                    .map(|(l, b)| l * &b[coord])
                    .sum();
                if !s.is_zero() {
                    return Err(Error::RankDeficient {
                        expected: self.r_total - self.n,
                        found: 0,
                    });
                }
            }
        }
        Ok(())
    }

    /// D_i as a vector in the p-basis coordinates.
    pub fn d_class(&self, i: usize) -> Vec<Rat> {
        (0..self.charge.len())
            .map(|a| Rat::from_integer(self.charge[a][i].clone()))
            .collect()
    }

    pub fn k(&self) -> usize {
        self.charge.len()
    }

    /// Dual-basis weight functionals of a maximal cone: for each adjacent ray
    /// i, the m in M_Q with <m, b_j> = delta_ij across the cone rays.
    pub fn cone_weights(&self, cone: &[usize]) -> Vec<Vec<Rat>> {
        let mat: Vec<Vec<Rat>> = cone.iter().map(|&i| int_vec_to_rat(&self.rays[i])).collect();
        cone.iter()
            .enumerate()
            .map(|(pos, _)| {
                let rhs: Vec<Rat> = (0..cone.len())
                    .map(|j| if j == pos { Rat::one() } else { Rat::zero() })
                    .collect();
                solve(&mat, &rhs).expect("maximal cone rays independent")
            })
            .collect()
    }
}

/// Pick p_a: primitive generators of the extreme rays of the extended nef
/// cone, preferring a unimodular set with the extra-fiber classes last.
fn select_p_basis(
    d_cols: &[Vec<Rat>],
    fan: &StackyFan,
    r_rays: usize,
    k: usize,
) -> Result<Vec<Vec<Int>>> {
    let r = d_cols.len();
    // H-representation of the intersection of the per-cone spans.
    let mut constraints: Vec<Vec<Rat>> = Vec::new();
    for cone in &fan.maximal_cones {
        let cone_set: BTreeSet<usize> = cone.iter().copied().collect();
        let anti: Vec<usize> = (0..r).filter(|i| !cone_set.contains(i)).collect();
        let gens: Vec<Vec<Rat>> = anti.iter().map(|&i| d_cols[i].clone()).collect();
        constraints.extend(cone_facets(&gens, k));
    }
    let rays = cone_extreme_rays(&constraints, k);
    if rays.is_empty() {
        return Err(Error::EmptyAnticones);
    }
    let extra_cone: Vec<Vec<Rat>> = (r_rays..r).map(|i| d_cols[i].clone()).collect();
    let in_extra = |v: &Vec<Int>| -> bool {
        if extra_cone.is_empty() {
            return false;
        }
        cone_membership(&extra_cone, &int_vec_to_rat(v)).is_some()
    };
    let mut candidates: Vec<Vec<Int>> = rays;
    // Augment with pairwise sums in case the extreme rays alone are not unimodular.
    let sums: Vec<Vec<Int>> = candidates
        .iter()
        .enumerate()
        .flat_map(|(i, a)| {
            candidates[i + 1..]
                .iter()
                .map(|b| primitive(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>()))
                .collect::<Vec<_>>()
        })
        .collect();
    candidates.extend(sums);
    candidates.sort();
    candidates.dedup();
    // Prefer non-extra candidates first so the extra classes end up last.
    let mut ordered: Vec<Vec<Int>> = candidates.iter().filter(|v| !in_extra(v)).cloned().collect();
    let extras: Vec<Vec<Int>> = candidates.iter().filter(|v| in_extra(v)).cloned().collect();
    ordered.extend(extras);
    let m = ordered.len();
    let idxs: Vec<usize> = (0..m).collect();
    for subset in k_subsets(&idxs, k) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| int_vec_to_rat(&ordered[i])).collect();
        if determinant(&rows).abs() == Rat::one() {
            let mut chosen: Vec<Vec<Int>> = subset.iter().map(|&i| ordered[i].clone()).collect();
            // Extra-fiber classes last.
            chosen.sort_by_key(|v| in_extra(v));
            return Ok(chosen);
        }
    }
    Err(Error::SchemaError(vec![
        "/p_basis: no unimodular nef-adapted basis found; supply one in the config".into(),
    ]))
}

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let m = items.len();
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if idx[pos] != pos + m - k {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return out;
            }
        }
    }
}

/// Facet normals of a finitely generated full-dimensional cone.
fn cone_facets(gens: &[Vec<Rat>], k: usize) -> Vec<Vec<Rat>> {
    if k == 1 {
        // Half-line: the facet is the sign itself.
        let g = gens.iter().find(|g| !g[0].is_zero());
        return match g {
            Some(g) if g[0].is_positive() => vec![vec![Rat::one()]],
            Some(_) => vec![vec![-Rat::one()]],
            None => Vec::new(),
        };
    }
    let mut facets = Vec::new();
    let idxs: Vec<usize> = (0..gens.len()).collect();
    for subset in k_subsets(&idxs, k - 1) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| gens[i].clone()).collect();
        if rank(&rows) != k - 1 {
            continue;
        }
        // Normal direction: kernel of the row space.
        let mut a = rows.clone();
        let order: Vec<usize> = (0..k).collect();
        let pivots = rref(&mut a, &order);
        let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
        if free.len() != 1 {
            continue;
        }
        let mut normal = vec![Rat::zero(); k];
        normal[free[0]] = Rat::one();
        for (row, &p) in pivots.iter().enumerate() {
            normal[p] = -a[row][free[0]].clone();
        }
        for sign in [Rat::one(), -Rat::one()] {
            let h: Vec<Rat> = normal.iter().map(|x| x * &sign).collect();
            if gens.iter().all(|g| !dot(&h, g).is_negative()) {
                facets.push(h);
                break;
            }
        }
    }
    facets
}

/// Extreme rays of {x : <h, x> >= 0 for all h}, as primitive integer vectors.
fn cone_extreme_rays(constraints: &[Vec<Rat>], k: usize) -> Vec<Vec<Int>> {
    let mut rays: BTreeSet<Vec<Int>> = BTreeSet::new();
    if k == 1 {
        for dir in [rat(1), rat(-1)] {
            if constraints.iter().all(|h| !(&h[0] * &dir).is_negative()) {
                rays.insert(vec![dir.to_integer()]);
            }
        }
        return rays.into_iter().collect();
    }
    let idxs: Vec<usize> = (0..constraints.len()).collect();
    for subset in k_subsets(&idxs, k - 1) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| constraints[i].clone()).collect();
        if rank(&rows) != k - 1 {
            continue;
        }
        let mut a = rows.clone();
        let order: Vec<usize> = (0..k).collect();
        let pivots = rref(&mut a, &order);
        let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
        if free.len() != 1 {
            continue;
        }
        let mut dir = vec![Rat::zero(); k];
        dir[free[0]] = Rat::one();
        for (row, &p) in pivots.iter().enumerate() {
            dir[p] = -a[row][free[0]].clone();
        }
        for sign in [Rat::one(), -Rat::one()] {
            let d: Vec<Rat> = dir.iter().map(|x| x * &sign).collect();
            if constraints.iter().all(|h| !dot(h, &d).is_negative()) {
                rays.insert(primitive_rat(&d));
            }
        }
    }
    rays.into_iter().collect()
}

fn primitive(v: &[Int]) -> Vec<Int> {
    let mut g = Int::zero();
    for x in v {
        g = num::integer::gcd(g, x.abs());
    }
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

fn primitive_rat(v: &[Rat]) -> Vec<Int> {
    let mut denom_lcm = Int::one();
    for x in v {
        denom_lcm = num::integer::lcm(denom_lcm, x.denom().clone());
    }
    let ints: Vec<Int> = v
        .iter()
        .map(|x| (x * Rat::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    primitive(&ints)
}

/// Inverse-transpose of a unimodular rational matrix, returned as integers.
fn invert_transpose_integer(p: &[Vec<Rat>]) -> Vec<Vec<Int>> {
    let k = p.len();
    let mut aug: Vec<Vec<Rat>> = (0..k)
        .map(|i| {
            let mut row: Vec<Rat> = (0..k).map(|j| p[j][i].clone()).collect(); // transpose
            row.extend((0..k).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    let order: Vec<usize> = (0..k).collect();
    rref(&mut aug, &order);
    (0..k)
        .map(|i| (0..k).map(|j| aug[i][k + j].to_integer()).collect())
        .collect()
}

/// Minimal cone of the fan containing a vector (as a ray-index set over the
/// fan rays), found through a full-dimensional cone membership.
fn minimal_cone_containing(
    rays: &[Vec<Int>],
    fan: &StackyFan,
    v: &[Int],
    _r_rays: usize,
) -> Result<Vec<usize>> {
    let n = rays[0].len();
    for cone in &fan.maximal_cones {
        let mat: Vec<Vec<Rat>> = (0..n)
            .map(|row| cone.iter().map(|&i| Rat::from_integer(rays[i][row].clone())).collect())
            .collect();
        if let Some(c) = solve(&mat, &int_vec_to_rat(v)) {
            if c.iter().all(|x| !x.is_negative()) {
                let support: Vec<usize> = cone
                    .iter()
                    .zip(&c)
                    .filter(|(_, x)| x.is_positive())
                    .map(|(&i, _)| i)
                    .collect();
                return Ok(support);
            }
        }
    }
    Err(Error::NotACone(vec![]))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn p1() -> (GitPresentation, StackyFan) {
        GitPresentation::build(1, vec![vec![int(1)], vec![int(-1)]], vec![], vec![rat(1)], None).unwrap()
    }

    pub fn p2() -> (GitPresentation, StackyFan) {
        GitPresentation::build(
            2,
            vec![vec![int(1), int(0)], vec![int(0), int(1)], vec![int(-1), int(-1)]],
            vec![],
            vec![rat(1)],
            None,
        )
        .unwrap()
    }

    pub fn wp12() -> (GitPresentation, StackyFan) {
        GitPresentation::build(1, vec![vec![int(1)], vec![int(-2)]], vec![], vec![rat(1)], None).unwrap()
    }

    pub fn f1() -> (GitPresentation, StackyFan) {
        GitPresentation::build(
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
        .unwrap()
    }

    #[test]
    fn charge_matrix_examples() {
        assert_eq!(
            derive_charge_matrix(&[vec![int(1)], vec![int(-1)]], 1).unwrap(),
            vec![vec![int(1), int(1)]]
        );
        assert_eq!(
            derive_charge_matrix(
                &[vec![int(1), int(0)], vec![int(0), int(1)], vec![int(-1), int(-1)]],
                2
            )
            .unwrap(),
            vec![vec![int(1), int(1), int(1)]]
        );
        assert_eq!(
            derive_charge_matrix(&[vec![int(1)], vec![int(-2)]], 1).unwrap(),
            vec![vec![int(2), int(1)]]
        );
        // (2, 0) does not generate Z.
        assert_eq!(
            derive_charge_matrix(&[vec![int(2)], vec![int(-2)]], 1),
            Err(Error::NotGenerating)
        );
    }

    #[test]
    fn anticones_p2_all_nonempty() {
        let (git, fan) = p2();
        // All 7 nonempty subsets of {1,2,3}.
        assert_eq!(fan.anticones.len(), 7);
        // Superset closure.
        for a in &fan.anticones {
            let aset: BTreeSet<usize> = a.iter().copied().collect();
            for sup in 0..3usize {
                if !aset.contains(&sup) {
                    let mut bigger: Vec<usize> = a.clone();
                    bigger.push(sup);
                    bigger.sort();
                    assert!(fan.anticones.contains(&bigger));
                }
            }
        }
        assert!(git.eta.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn anticones_p1() {
        let (_, fan) = p1();
        assert_eq!(fan.anticones, vec![vec![0], vec![0, 1], vec![1]]);
    }

    #[test]
    fn negative_eta_rejected() {
        let out = GitPresentation::build(1, vec![vec![int(1)], vec![int(-1)]], vec![], vec![rat(-1)], None);
        assert_eq!(out.unwrap_err(), Error::EmptyAnticones);
    }

    #[test]
    fn maximal_cones() {
        let (_, fan) = p2();
        assert_eq!(fan.maximal_cones, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert!(fan.complete);
        let (_, fan) = p1();
        assert_eq!(fan.maximal_cones, vec![vec![0], vec![1]]);
        let (_, fan) = wp12();
        assert_eq!(fan.maximal_cones, vec![vec![0], vec![1]]);
    }

    #[test]
    fn f1_matches_standard_presentation() {
        let (git, fan) = f1();
        assert_eq!(
            git.charge,
            vec![vec![int(1), int(0), int(1), int(-1)], vec![int(0), int(1), int(0), int(1)]]
        );
        assert_eq!(fan.maximal_cones.len(), 4);
        assert!(fan.complete);
    }

    #[test]
    fn box_p2_trivial() {
        let (git, fan) = p2();
        let boxes = box_elements(&fan, &git);
        assert_eq!(boxes.len(), 1);
        assert!(boxes[0].v.iter().all(|x| x.is_zero()));
        assert!(boxes[0].age.is_zero());
    }

    #[test]
    fn box_wp12() {
        let (git, fan) = wp12();
        let boxes = box_elements(&fan, &git);
        assert_eq!(boxes.len(), 2);
        let twisted = boxes.iter().find(|b| !b.age.is_zero()).unwrap();
        assert_eq!(twisted.v, vec![int(-1)]);
        assert_eq!(twisted.host_cone, vec![1]);
        assert_eq!(twisted.c_of_v[1], ratio(1, 2));
        assert_eq!(twisted.age, ratio(1, 2));
        // Involution pairing.
        let inv = box_involution(twisted, &git);
        assert_eq!(inv, vec![int(-1)]);
        let both: Rat = &twisted.age + &twisted.age;
        assert_eq!(both, rat(1));
    }

    #[test]
    fn keff_p2() {
        let (git, fan) = p2();
        let boxes = box_elements(&fan, &git);
        let classes = enumerate_keff(&git, &fan, &boxes, &rat(3)).unwrap();
        let betas: Vec<Rat> = classes.iter().map(|c| c.beta[0].clone()).collect();
        assert_eq!(betas, vec![rat(0), rat(1), rat(2), rat(3)]);
        assert!(classes.iter().all(|c| c.sector.age.is_zero()));
    }

    #[test]
    fn keff_wp12() {
        let (git, fan) = wp12();
        let boxes = box_elements(&fan, &git);
        let classes = enumerate_keff(&git, &fan, &boxes, &rat(1)).unwrap();
        let betas: Vec<Rat> = classes.iter().map(|c| c.beta[0].clone()).collect();
        assert_eq!(betas, vec![rat(0), ratio(1, 2), rat(1)]);
        let half = &classes[1];
        assert_eq!(half.sector.v, vec![int(-1)]);
        // Integrality on the witness anticone.
        let cone_set: BTreeSet<usize> = half.witness_cone.iter().copied().collect();
        for i in 0..git.r_total {
            if !cone_set.contains(&i) {
                assert!(half.pairings[i].denom().is_one());
            }
        }
        // Both eqn:v readings agree: sum over all i of ceil(D_i(beta)) b_i.
        let mut v = rat(0);
        for i in 0..git.r_total {
            let ceil = Rat::from_integer(half.pairings[i].ceil().to_integer());
            v += &ceil * Rat::from_integer(git.rays[i][0].clone());
        }
        assert_eq!(v.to_integer(), half.sector.v[0]);
    }

    #[test]
    fn keff_bound_zero() {
        let (git, fan) = p2();
        let boxes = box_elements(&fan, &git);
        let classes = enumerate_keff(&git, &fan, &boxes, &rat(0)).unwrap();
        assert_eq!(classes.len(), 1);
        assert!(classes[0].degree.is_zero());
    }

    #[test]
    fn positivity_reports() {
        let (git, fan) = p2();
        let rep = check_positivity(&git, &fan);
        assert!(rep.fano);
        let (git, fan) = wp12();
        assert!(check_positivity(&git, &fan).fano);
        let (git, fan) = f1();
        assert!(check_positivity(&git, &fan).fano);
    }

    #[test]
    fn positivity_flags_bad_extra_vector() {
        // P^1 with an extra vector far outside the ray polytope: rho-hat
        // escapes the extended nef cone and the LP reports it truthfully.
        let built = GitPresentation::build(
            1,
            vec![vec![int(1)], vec![int(-1)]],
            vec![vec![int(5)]],
            vec![rat(1), rat(6)],
            None,
        );
        let (git, fan) = built.unwrap();
        let rep = check_positivity(&git, &fan);
        assert!(!rep.fano);
        assert!(rep.witnesses.iter().any(|w| !w.feasible));
    }

    #[test]
    fn extra_vector_splitting_data() {
        // P^1 presented with the redundant vector b_3 = b_1.
        let built = GitPresentation::build(
            1,
            vec![vec![int(1)], vec![int(-1)]],
            vec![vec![int(1)]],
            vec![rat(1), rat(2)],
            None,
        );
        let (git, _fan) = built.unwrap();
        assert_eq!(git.k(), 2);
        assert_eq!(git.splitting.s_coeffs.len(), 1);
        assert_eq!(git.splitting.s_coeffs[0], vec![(0, rat(1))]);
        // <D_i, D_3^vee> = 1 for i = 3, -1 for i = 1, 0 for i = 2.
        let dv = &git.splitting.dvee[0];
        let pair = |i: usize| -> Rat {
            (0..git.k())
                .map(|a| Rat::from_integer(git.charge[a][i].clone()) * &dv[a])
                .sum()
        };
        assert_eq!(pair(2), rat(1));
        assert_eq!(pair(0), rat(-1));
        assert_eq!(pair(1), rat(0));
        // ell is a right inverse and maps D_3 to the third unit vector.
        for a in 0..git.k() {
            for b in 0..git.k() {
                let s: Rat = (0..git.r_total)
                    .map(|i| Rat::from_integer(git.charge[a][i].clone()) * &git.splitting.ell[i][b])
                    .sum();
                assert_eq!(s, if a == b { rat(1) } else { rat(0) });
            }
        }
        let d3: Vec<Rat> = git.d_class(2);
        for i in 0..git.r_total {
            let v: Rat = (0..git.k()).map(|a| &git.splitting.ell[i][a] * &d3[a]).sum();
            assert_eq!(v, if i == 2 { rat(1) } else { rat(0) });
        }
    }

    #[test]
    fn star_fan_examples() {
        let (git, fan) = wp12();
        let boxes = box_elements(&fan, &git);
        let twisted = boxes.iter().find(|b| !b.age.is_zero()).unwrap();
        let star = star_fan(twisted, &fan, &git).unwrap();
        assert_eq!(star.git.n, 0);
        assert_eq!(star.stabilizer_order, int(2));
        // Point sector: the ray divisor pulls back to zero in H^2.
        match &star.restriction[1] {
            DivisorRestriction::Combination(c) => assert!(c.is_empty()),
            other => panic!("unexpected restriction {other:?}"),
        }
        let (git, fan) = p2();
        let boxes = box_elements(&fan, &git);
        let star = star_fan(&boxes[0], &fan, &git).unwrap();
        assert_eq!(star.restriction[0], DivisorRestriction::StarRay(0));
        assert_eq!(star.git.rays, git.rays);
    }

    #[test]
    fn h_of_depends_only_on_sum_for_p2() {
        let (git, _) = p2();
        let h1 = h_of(&[rat(1), rat(0), rat(0)], &git);
        let h2 = h_of(&[rat(0), rat(1), rat(0)], &git);
        assert_eq!(h1, vec![rat(1)]);
        assert_eq!(h1, h2);
        assert_eq!(h_of(&[rat(0), rat(0), rat(0)], &git), vec![rat(0)]);
        // Exact linearity.
        let c1 = vec![ratio(1, 3), rat(2), ratio(-5, 7)];
        let c2 = vec![ratio(2, 5), rat(-1), ratio(1, 2)];
        let sum: Vec<Rat> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
        let lhs = h_of(&sum, &git);
        let rhs: Vec<Rat> = h_of(&c1, &git)
            .iter()
            .zip(&h_of(&c2, &git))
            .map(|(a, b)| a + b)
            .collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn eta_on_wall_rejected() {
        // For P^1 x P^1-like data with eta on a chamber wall.
        let out = GitPresentation::build(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(-1), int(0)],
                vec![int(0), int(1)],
                vec![int(0), int(-1)],
            ],
            vec![],
            vec![rat(1), rat(0)],
            None,
        );
        assert_eq!(out.unwrap_err(), Error::WallEta);
    }
}

#[cfg(test)]
pub use tests::{f1 as test_f1, p1 as test_p1, p2 as test_p2, wp12 as test_wp12};
