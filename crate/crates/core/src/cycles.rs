//! Hyperplane-arrangement cells, characteristic-cycle combinatorics, the
//! conical ray-to-dual map, assembled mirror cycles, and one-dimensional
//! integration over them.
//!
//! Chains are signed sums of products (cell in the dual space) x (cone in the
//! ray space). Pieces are oriented by the conormal rule: a frame of the cell
//! is completed to a positive frame of the dual space, and the cone factor is
//! oriented by the basis dual to the completion under the lattice pairing.

use crate::amodel::{CentralCharge, ComplexParams, Method, TAU};
use crate::error::{Error, Result};
use crate::lattice::{GitPresentation, LineBundleTwist, StackyFan};
use crate::polyhedra::Polyhedron;
use crate::quad;
use crate::rational::*;
use num::complex::Complex64;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// One cell tau_{I,J} of the shifted hyperplane arrangement.
#[derive(Debug, Clone)]
pub struct Cell {
    pub i_set: Vec<usize>,
    pub j_set: Vec<usize>,
    pub poly: Polyhedron,
    pub dim: usize,
    pub multiplicity: i64,
}

/// A signed product piece (cell) x (-cone).
#[derive(Debug, Clone)]
pub struct CccPiece {
    /// Ray indices spanning the cone factor.
    pub cone: Vec<usize>,
    pub m_part: Polyhedron,
    /// Dimension of the dual-space part (the piece may carry lineality, in
    /// which case the vertex representation is not populated).
    pub m_dim: usize,
    pub multiplicity: i64,
}

/// A characteristic cycle: signed sum of cell x cone pieces at a hyperplane
/// shift vector a.
#[derive(Debug, Clone)]
pub struct CCCycle {
    pub shift: Vec<Rat>,
    pub pieces: Vec<CccPiece>,
}

/// d_k(I,J) counts completions K of I inside J with |I| + |K| + k = n that
/// still span a cone; the multiplicity is their alternating sum.
pub fn multiplicity(i_set: &[usize], j_set: &[usize], fan: &StackyFan, n: usize) -> Result<i64> {
    if !fan.is_cone(i_set) {
        return Err(Error::NotACone(i_set.to_vec()));
    }
    debug_assert!(i_set.iter().all(|i| !j_set.contains(i)));
    let mut total = 0i64;
    let jn = j_set.len();
    for mask in 0u64..(1 << jn) {
        let subset: Vec<usize> = j_set
            .iter()
            .enumerate()
            .filter(|(pos, _)| mask >> pos & 1 == 1)
            .map(|(_, &j)| j)
            .collect();
        if i_set.len() + subset.len() > n {
            continue;
        }
        let mut union: Vec<usize> = i_set.to_vec();
        union.extend(&subset);
        union.sort();
        if fan.is_cone(&union) {
            let k = n - i_set.len() - subset.len();
            total += if k % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(total)
}

fn hyperplane_row(git: &GitPresentation, i: usize) -> Vec<Rat> {
    int_vec_to_rat(&git.rays[i])
}

/// Enumerate all nonempty cells tau_{I,J}(a) with their multiplicities.
/// The boolean flags a degenerate (non-generic) arrangement.
pub fn arrangement_cells(
    git: &GitPresentation,
    fan: &StackyFan,
    a: &[Rat],
) -> Result<(Vec<Cell>, bool)> {
    let n = git.n;
    let rp = git.r_rays;
    if rp == 0 || n == 0 {
        return Err(Error::SchemaError(vec!["/rays: need r' >= n >= 1".into()]));
    }
    // Degeneracy: some dependent index set with a common point.
    let mut degenerate = false;
    for mask in 1u64..(1 << rp) {
        let idx: Vec<usize> = (0..rp).filter(|i| mask >> i & 1 == 1).collect();
        let rows: Vec<Vec<Rat>> = idx.iter().map(|&i| hyperplane_row(git, i)).collect();
        if rank(&rows) < idx.len() {
            let eq: Vec<(Vec<Rat>, Rat)> = idx
                .iter()
                .map(|&i| (hyperplane_row(git, i), -a[i].clone()))
                .collect();
            let p = Polyhedron::from_constraints(n, eq, vec![]);
            if !p.is_empty() {
                degenerate = true;
            }
        }
    }
    let mut cells = Vec::new();
    for imask in 0u64..(1 << rp) {
        let i_set: Vec<usize> = (0..rp).filter(|i| imask >> i & 1 == 1).collect();
        let rows: Vec<Vec<Rat>> = i_set.iter().map(|&i| hyperplane_row(git, i)).collect();
        let span_dim = rank(&rows);
        let rest: Vec<usize> = (0..rp).filter(|i| !i_set.contains(i)).collect();
        for jmask in 0u64..(1 << rest.len()) {
            let j_set: Vec<usize> = rest
                .iter()
                .enumerate()
                .filter(|(pos, _)| jmask >> pos & 1 == 1)
                .map(|(_, &j)| j)
                .collect();
            let eq: Vec<(Vec<Rat>, Rat)> = i_set
                .iter()
                .map(|&i| (hyperplane_row(git, i), -a[i].clone()))
                .collect();
            let mut ge: Vec<(Vec<Rat>, Rat)> = Vec::new();
            for &j in &j_set {
                ge.push((hyperplane_row(git, j), -a[j].clone()));
            }
            for &l in &rest {
                if j_set.contains(&l) {
                    continue;
                }
                let row: Vec<Rat> = hyperplane_row(git, l).iter().map(|x| -x.clone()).collect();
                ge.push((row, a[l].clone()));
            }
            let poly = Polyhedron::from_constraints(n, eq, ge);
            if poly.is_empty() {
                continue;
            }
            let dim = poly.dim().unwrap_or(0);
            // The closure of the open region: strictness of the complement
            // constraints must be attainable.
            if let Some(sample) = poly.sample_relint() {
                let strict_ok = rest.iter().filter(|l| !j_set.contains(l)).all(|&l| {
                    let v = dot(&hyperplane_row(git, l), &sample) + &a[l];
                    v.is_negative()
                });
                if !strict_ok {
                    continue;
                }
            }
            if dim + span_dim != n {
                continue;
            }
            let mult = if fan.is_cone(&i_set) {
                multiplicity(&i_set, &j_set, fan, n)?
            } else {
                0
            };
            cells.push(Cell {
                i_set: i_set.clone(),
                j_set,
                poly,
                dim,
                multiplicity: mult,
            });
        }
    }
    Ok((cells, degenerate))
}

/// Cell-formula backend of the characteristic cycle.
pub fn ccc_cycle(git: &GitPresentation, fan: &StackyFan, a: &[Rat]) -> Result<CCCycle> {
    let (cells, _) = arrangement_cells(git, fan, a)?;
    let mut pieces = Vec::new();
    for cell in cells {
        if cell.multiplicity == 0 || !fan.is_cone(&cell.i_set) {
            continue;
        }
        pieces.push(CccPiece {
            cone: cell.i_set.clone(),
            m_part: cell.poly.clone(),
            m_dim: cell.dim,
            multiplicity: cell.multiplicity,
        });
    }
    Ok(CCCycle {
        shift: a.to_vec(),
        pieces,
    })
}

/// Definition backend: alternating sum over cones of the fan of the pieces
/// (chi_I + C^perp cap C_I^vee) x (-C) for faces C of sigma_I.
pub fn ccc_cycle_definition(git: &GitPresentation, fan: &StackyFan, a: &[Rat]) -> Result<CCCycle> {
    let n = git.n;
    let mut pieces = Vec::new();
    for cone in &fan.cones {
        if cone.iter().any(|&i| i >= git.r_rays) {
            continue;
        }
        let i_set = cone.clone();
        let sign = if (n - i_set.len()) % 2 == 0 { 1i64 } else { -1 };
        for kmask in 0u64..(1 << i_set.len()) {
            let k_set: Vec<usize> = i_set
                .iter()
                .enumerate()
                .filter(|(pos, _)| kmask >> pos & 1 == 1)
                .map(|(_, &i)| i)
                .collect();
            let eq: Vec<(Vec<Rat>, Rat)> = k_set
                .iter()
                .map(|&j| (hyperplane_row(git, j), -a[j].clone()))
                .collect();
            let ge: Vec<(Vec<Rat>, Rat)> = i_set
                .iter()
                .map(|&i| (hyperplane_row(git, i), -a[i].clone()))
                .collect();
            // Nonempty by construction: the equalities are solvable and the
            // remaining inequality normals are independent on the flat.
            let poly = Polyhedron::from_constraints(n, eq, ge);
            pieces.push(CccPiece {
                cone: k_set.clone(),
                m_part: poly,
                m_dim: n - k_set.len(),
                multiplicity: sign,
            });
        }
    }
    Ok(CCCycle {
        shift: a.to_vec(),
        pieces,
    })
}

/// The moment-polytope cycle of an ample shift: faces of the polytope paired
/// with their normal-fan cones.
pub fn ample_moment_cycle(git: &GitPresentation, fan: &StackyFan, a: &[Rat]) -> Result<CCCycle> {
    let n = git.n;
    let rp = git.r_rays;
    let mut pieces = Vec::new();
    for mask in 0u64..(1 << rp) {
        let i_set: Vec<usize> = (0..rp).filter(|i| mask >> i & 1 == 1).collect();
        if !fan.is_cone(&i_set) {
            continue;
        }
        let eq: Vec<(Vec<Rat>, Rat)> = i_set
            .iter()
            .map(|&i| (hyperplane_row(git, i), -a[i].clone()))
            .collect();
        let ge: Vec<(Vec<Rat>, Rat)> = (0..rp)
            .filter(|i| !i_set.contains(i))
            .map(|i| (hyperplane_row(git, i), -a[i].clone()))
            .collect();
        let poly = Polyhedron::from_constraints(n, eq, ge);
        if poly.is_empty() {
            continue;
        }
        if poly.dim() != Some(n - i_set.len()) {
            continue;
        }
        pieces.push(CccPiece {
            cone: i_set.clone(),
            m_part: poly,
            m_dim: n - i_set.len(),
            multiplicity: 1,
        });
    }
    Ok(CCCycle {
        shift: a.to_vec(),
        pieces,
    })
}

/// Chain equality after common polyhedral refinement: group pieces by cone,
/// then compare local multiplicity at a relative-interior sample of every
/// full-dimensional region of the arrangement restricted to the flat.
pub fn chains_equal(git: &GitPresentation, lhs: &CCCycle, rhs: &CCCycle, a: &[Rat]) -> bool {
    let mut cone_keys: Vec<Vec<usize>> = Vec::new();
    for p in lhs.pieces.iter().chain(&rhs.pieces) {
        if !cone_keys.contains(&p.cone) {
            cone_keys.push(p.cone.clone());
        }
    }
    for key in cone_keys {
        let expected_dim = git.n - key.len();
        let local = |cycle: &CCCycle, sample: &[Rat]| -> i64 {
            cycle
                .pieces
                .iter()
                .filter(|p| p.cone == key)
                .filter(|p| p.m_dim == expected_dim)
                .filter(|p| p.m_part.contains(sample))
                .map(|p| p.multiplicity)
                .sum()
        };
        for sample in flat_region_samples(git, a, &key) {
            if local(lhs, &sample) != local(rhs, &sample) {
                return false;
            }
        }
    }
    true
}

/// Relative-interior samples of every full-dimensional sign region of the
/// arrangement restricted to the flat cut out by `k_set`.
fn flat_region_samples(git: &GitPresentation, a: &[Rat], k_set: &[usize]) -> Vec<Vec<Rat>> {
    let n = git.n;
    let rp = git.r_rays;
    let rest: Vec<usize> = (0..rp).filter(|i| !k_set.contains(i)).collect();
    let k_rows: Vec<Vec<Rat>> = k_set.iter().map(|&i| hyperplane_row(git, i)).collect();
    let flat_dim = n - rank(&k_rows);
    let eq: Vec<(Vec<Rat>, Rat)> = k_set
        .iter()
        .map(|&i| (hyperplane_row(git, i), -a[i].clone()))
        .collect();
    let mut samples = Vec::new();
    for smask in 0u64..(1 << rest.len()) {
        let mut ge = Vec::new();
        for (pos, &i) in rest.iter().enumerate() {
            if smask >> pos & 1 == 1 {
                ge.push((hyperplane_row(git, i), -a[i].clone()));
            } else {
                let row: Vec<Rat> = hyperplane_row(git, i).iter().map(|x| -x.clone()).collect();
                ge.push((row, a[i].clone()));
            }
        }
        let region = Polyhedron::from_constraints(n, eq.clone(), ge);
        if region.dim() == Some(flat_dim) {
            if let Some(s) = region.sample_relint() {
                samples.push(s);
            }
        }
    }
    samples
}

// ---------------------------------------------------------------------------
// Oriented boundary.

#[derive(Debug, Clone)]
struct OrientedFacet {
    cone: Vec<usize>,
    m_part: Polyhedron,
    /// Frame of the facet direction space (vectors in M x N coordinates).
    frame: Vec<Vec<Rat>>,
    coeff: i64,
}

fn embed_m(v: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = v.to_vec();
    out.extend(vec![Rat::zero(); n]);
    out
}

fn embed_n(v: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    out.extend(v.to_vec());
    out
}

/// Canonical direction basis of a polyhedron from the reduced echelon form of
/// its spanning directions.
fn canonical_dirs(poly: &Polyhedron) -> Vec<Vec<Rat>> {
    let mut span = poly.direction_span();
    if span.is_empty() {
        return Vec::new();
    }
    let order: Vec<usize> = (0..poly.ambient).collect();
    rref(&mut span, &order);
    span
}

/// Conormal frame of a piece: [cell dirs embedded in M] + [dual-completion
/// vectors embedded in N].
fn conormal_frame(git: &GitPresentation, piece: &CccPiece) -> Result<Vec<Vec<Rat>>> {
    let n = git.n;
    let w = canonical_dirs(&piece.m_part);
    let p = w.len();
    let q = piece.cone.len();
    if p + q != n {
        return Err(Error::NotACone(piece.cone.clone()));
    }
    // Complete w to a positively oriented basis of M_R with standard vectors.
    let mut completion: Vec<Vec<Rat>> = Vec::new();
    let mut current = w.clone();
    for j in 0..n {
        if current.len() == n {
            break;
        }
        let mut e = vec![Rat::zero(); n];
        e[j] = Rat::one();
        let mut trial = current.clone();
        trial.push(e.clone());
        if rank(&trial) == current.len() + 1 {
            completion.push(e);
            current = trial;
        }
    }
    let mut full: Vec<Vec<Rat>> = w.clone();
    full.extend(completion.clone());
    if determinant(&full).is_negative() {
        let last = completion.len() - 1;
        for x in completion[last].iter_mut() {
            *x = -x.clone();
        }
    }
    // Dual basis in the span of the cone rays: <u_i, v_j> = delta_ij.
    let cone_rays: Vec<Vec<Rat>> = piece
        .cone
        .iter()
        .map(|&kk| int_vec_to_rat(&git.rays[kk]))
        .collect();
    let mut v_frame: Vec<Vec<Rat>> = Vec::new();
    for i in 0..q {
        // v = sum_c x_c b_{k_c} with <u_l, v> = delta_{li}.
        let mat: Vec<Vec<Rat>> = (0..q)
            .map(|l| (0..q).map(|c| dot(&completion[l], &cone_rays[c])).collect())
            .collect();
        let rhs: Vec<Rat> = (0..q).map(|l| if l == i { Rat::one() } else { Rat::zero() }).collect();
        let x = solve(&mat, &rhs).ok_or_else(|| Error::NotACone(piece.cone.clone()))?;
        let mut v = vec![Rat::zero(); n];
        for (c, coeff) in x.iter().enumerate() {
            for (vi, bi) in v.iter_mut().zip(&cone_rays[c]) {
                *vi += coeff * bi;
            }
        }
        v_frame.push(v);
    }
    let mut frame: Vec<Vec<Rat>> = w.iter().map(|d| embed_m(d, n)).collect();
    frame.extend(v_frame.iter().map(|d| embed_n(d, n)));
    Ok(frame)
}

/// Sign of the change of basis between two frames of the same subspace.
fn orientation_compare(frame_a: &[Vec<Rat>], frame_b: &[Vec<Rat>]) -> Result<i64> {
    let d = frame_a.len();
    if d != frame_b.len() {
        return Err(Error::NotACone(vec![]));
    }
    if d == 0 {
        return Ok(1);
    }
    let ambient = frame_a[0].len();
    // Express each vector of A in the basis B.
    let rows: Vec<Vec<Rat>> = (0..ambient)
        .map(|coord| frame_b.iter().map(|b| b[coord].clone()).collect())
        .collect();
    let mut cols = Vec::new();
    for a in frame_a {
        let x = solve(&rows, a).ok_or_else(|| Error::NotACone(vec![]))?;
        // Confirm span containment.
        for coord in 0..ambient {
            let s: Rat = frame_b.iter().zip(&x).map(|(b, xi)| &b[coord] * xi).sum();
            if s != a[coord] {
                return Err(Error::NotACone(vec![]));
            }
        }
        cols.push(x);
    }
    let mat: Vec<Vec<Rat>> = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
    let det = determinant(&mat);
    if det.is_zero() {
        return Err(Error::NotACone(vec![]));
    }
    Ok(if det.is_positive() { 1 } else { -1 })
}

/// Canonical basis of the direction space of a flat: kernel of the rows.
fn flat_directions(git: &GitPresentation, sig: &[usize]) -> Vec<Vec<Rat>> {
    let n = git.n;
    let mut rows: Vec<Vec<Rat>> = sig.iter().map(|&i| hyperplane_row(git, i)).collect();
    let order: Vec<usize> = (0..n).collect();
    let pivots = rref(&mut rows, &order);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut d = vec![Rat::zero(); n];
            d[f] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                d[p] = -rows[row][f].clone();
            }
            d
        })
        .collect()
}

/// Hyperplane signature of a set: indices whose shifted hyperplane contains it.
fn span_signature(git: &GitPresentation, a: &[Rat], poly: &Polyhedron) -> Vec<usize> {
    let sample = poly.sample_relint().expect("nonempty");
    let dirs = canonical_dirs(poly);
    (0..git.r_rays)
        .filter(|&i| {
            let row = hyperplane_row(git, i);
            let on = (dot(&row, &sample) + &a[i]).is_zero();
            on && dirs.iter().all(|d| dot(&row, d).is_zero())
        })
        .collect()
}

/// Geometric boundary of the chain; returns true when it cancels to zero.
pub fn boundary_is_zero(git: &GitPresentation, cycle: &CCCycle) -> Result<bool> {
    let n = git.n;
    let a = &cycle.shift;
    let mut facets: Vec<OrientedFacet> = Vec::new();
    for piece in &cycle.pieces {
        if piece.multiplicity == 0 {
            continue;
        }
        let p = n - piece.cone.len();
        if piece.m_part.dim() != Some(p) || piece.m_dim != p {
            continue; // degenerate product contributes nothing
        }
        let parent_frame = conormal_frame(git, piece)?;
        let parent_sample = piece.m_part.sample_relint().expect("nonempty");
        // Cell facets: tighten one inequality at a time.
        let mut seen: Vec<Polyhedron> = Vec::new();
        for (gi, row) in piece.m_part.ge.iter().enumerate() {
            let mut eq = piece.m_part.eq.clone();
            eq.push(row.clone());
            let ge: Vec<(Vec<Rat>, Rat)> = piece
                .m_part
                .ge
                .iter()
                .enumerate()
                .filter(|(gj, _)| *gj != gi)
                .map(|(_, r)| r.clone())
                .collect();
            let f = Polyhedron::from_constraints(piece.m_part.ambient, eq, ge);
            if f.dim() != Some(p.saturating_sub(1)) || p == 0 {
                continue;
            }
            if seen.iter().any(|g| g.vertices == f.vertices && g.rays == f.rays) {
                continue;
            }
            let f_sample = f.sample_relint().expect("nonempty facet");
            let outward: Vec<Rat> = f_sample.iter().zip(&parent_sample).map(|(x, y)| x - y).collect();
            let mut g_frame: Vec<Vec<Rat>> = canonical_dirs(&f).iter().map(|d| embed_m(d, n)).collect();
            for &kk in &piece.cone {
                let minus_b: Vec<Rat> = git.rays[kk].iter().map(|x| -Rat::from_integer(x.clone())).collect();
                g_frame.push(embed_n(&minus_b, n));
            }
            let mut test = vec![embed_m(&outward, n)];
            test.extend(g_frame.clone());
            let sign = orientation_compare(&test, &parent_frame)?;
            facets.push(OrientedFacet {
                cone: piece.cone.clone(),
                m_part: f.clone(),
                frame: g_frame,
                coeff: piece.multiplicity * sign,
            });
            seen.push(f);
        }
        // Cone facets: drop one generator; outward direction is +b_k.
        for (pos, &kk) in piece.cone.iter().enumerate() {
            let sub_cone: Vec<usize> = piece
                .cone
                .iter()
                .enumerate()
                .filter(|(pp, _)| *pp != pos)
                .map(|(_, &c)| c)
                .collect();
            let mut g_frame: Vec<Vec<Rat>> =
                canonical_dirs(&piece.m_part).iter().map(|d| embed_m(d, n)).collect();
            for &c in &sub_cone {
                let minus_b: Vec<Rat> = git.rays[c].iter().map(|x| -Rat::from_integer(x.clone())).collect();
                g_frame.push(embed_n(&minus_b, n));
            }
            let outward = embed_n(&int_vec_to_rat(&git.rays[kk]), n);
            let mut test = vec![outward];
            test.extend(g_frame.clone());
            let sign = orientation_compare(&test, &parent_frame)?;
            facets.push(OrientedFacet {
                cone: sub_cone,
                m_part: piece.m_part.clone(),
                frame: g_frame,
                coeff: piece.multiplicity * sign,
            });
        }
    }
    // Group by (cone, flat signature) and cancel on refinement samples.
    let mut groups: BTreeMap<(Vec<usize>, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for (idx, f) in facets.iter().enumerate() {
        let sig = span_signature(git, a, &f.m_part);
        groups.entry((f.cone.clone(), sig)).or_default().push(idx);
    }
    for ((cone, sig), members) in groups {
        let flat_dim = {
            let rows: Vec<Vec<Rat>> = sig.iter().map(|&i| hyperplane_row(git, i)).collect();
            n - rank(&rows)
        };
        // Reference frame of the group support: the flat direction space is
        // the kernel of the signature rows.
        let mut ref_frame: Vec<Vec<Rat>> = flat_directions(git, &sig)
            .iter()
            .map(|d| embed_m(d, n))
            .collect();
        for &c in &cone {
            let minus_b: Vec<Rat> = git.rays[c].iter().map(|x| -Rat::from_integer(x.clone())).collect();
            ref_frame.push(embed_n(&minus_b, n));
        }
        let _ = flat_dim;
        for sample in flat_region_samples(git, a, &sig) {
            let mut total = 0i64;
            for &idx in &members {
                let f = &facets[idx];
                if f.m_part.contains(&sample) {
                    total += f.coeff * orientation_compare(&f.frame, &ref_frame)?;
                }
            }
            if total != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// The conical map rho from the ray space to the dual space.

#[derive(Debug, Clone)]
pub struct RhoPiece {
    /// Generators of the closed validity cone.
    pub cone_gens: Vec<Vec<Rat>>,
    /// Matrix rows of the linear map on that cone.
    pub matrix: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone)]
pub struct RhoMap {
    pub n: usize,
    pub pieces: Vec<RhoPiece>,
}

impl RhoMap {
    pub fn apply(&self, x: &[Rat]) -> Option<Vec<Rat>> {
        if x.iter().all(|v| v.is_zero()) {
            return Some(vec![Rat::zero(); self.n]);
        }
        for piece in &self.pieces {
            let mat: Vec<Vec<Rat>> = (0..self.n)
                .map(|row| piece.cone_gens.iter().map(|g| g[row].clone()).collect())
                .collect();
            if let Some(c) = solve(&mat, &x.to_vec()) {
                let exact = (0..self.n).all(|row| {
                    let s: Rat = piece
                        .cone_gens
                        .iter()
                        .zip(&c)
                        .map(|(g, ci)| &g[row] * ci)
                        .sum();
                    s == x[row]
                });
                if exact && c.iter().all(|v| !v.is_negative()) {
                    return Some(
                        piece
                            .matrix
                            .iter()
                            .map(|row| dot(row, x))
                            .collect(),
                    );
                }
            }
        }
        None
    }
}

fn angle_class(v: &[Rat]) -> u8 {
    // Quadrant-style classes for exact angular sort, counterclockwise from +x.
    let x = &v[0];
    let y = &v[1];
    if x.is_positive() && y.is_zero() {
        0
    } else if x.is_positive() && y.is_positive() {
        1
    } else if x.is_zero() && y.is_positive() {
        2
    } else if x.is_negative() && y.is_positive() {
        3
    } else if x.is_negative() && y.is_zero() {
        4
    } else if x.is_negative() && y.is_negative() {
        5
    } else if x.is_zero() && y.is_negative() {
        6
    } else {
        7
    }
}

fn cross2(a: &[Rat], b: &[Rat]) -> Rat {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Barycentric construction of the conical homeomorphism.
pub fn rho_map(git: &GitPresentation, fan: &StackyFan) -> Result<RhoMap> {
    let n = git.n;
    match n {
        1 => {
            let vals: Vec<Rat> = (0..git.r_rays)
                .map(|i| Rat::from_integer(git.rays[i][0].clone()))
                .collect();
            let bmax = vals.iter().filter(|v| v.is_positive()).cloned().max().ok_or(Error::NotFanoPolytope)?;
            let bmin = vals.iter().filter(|v| v.is_negative()).cloned().min().ok_or(Error::NotFanoPolytope)?;
            Ok(RhoMap {
                n,
                pieces: vec![
                    RhoPiece {
                        cone_gens: vec![vec![Rat::one()]],
                        matrix: vec![vec![-(&bmax * &bmax).recip()]],
                    },
                    RhoPiece {
                        cone_gens: vec![vec![-Rat::one()]],
                        matrix: vec![vec![-(&bmin * &bmin).recip()]],
                    },
                ],
            })
        }
        2 => {
            // Sort the rays counterclockwise and require strict convexity.
            let mut order: Vec<usize> = (0..git.r_rays).collect();
            order.sort_by(|&i, &j| {
                let bi = int_vec_to_rat(&git.rays[i]);
                let bj = int_vec_to_rat(&git.rays[j]);
                let (ci, cj) = (angle_class(&bi), angle_class(&bj));
                ci.cmp(&cj).then_with(|| {
                    let c = cross2(&bi, &bj);
                    if c.is_positive() {
                        std::cmp::Ordering::Less
                    } else if c.is_negative() {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Equal
                    }
                })
            });
            let m = order.len();
            let b = |p: usize| -> Vec<Rat> { int_vec_to_rat(&git.rays[order[p % m]]) };
            for p in 0..m {
                // Consecutive rays must bound maximal cones: the face fan of P.
                let pair = {
                    let mut v = vec![order[p], order[(p + 1) % m]];
                    v.sort();
                    v
                };
                if !fan.maximal_cones.contains(&pair) {
                    return Err(Error::NotFanoPolytope);
                }
                // Strict convexity of P at each vertex.
                let prev = b(p + m - 1);
                let here = b(p);
                let next = b(p + 1);
                let e1: Vec<Rat> = here.iter().zip(&prev).map(|(x, y)| x - y).collect();
                let e2: Vec<Rat> = next.iter().zip(&here).map(|(x, y)| x - y).collect();
                if !cross2(&e1, &e2).is_positive() {
                    return Err(Error::NotFanoPolytope);
                }
            }
            // Dual vertices per edge and dual-edge midpoints per ray.
            let mut dual_vertex: Vec<Vec<Rat>> = Vec::with_capacity(m);
            for p in 0..m {
                let rows = vec![b(p), b(p + 1)];
                let v = solve(&rows, &[Rat::one(), Rat::one()]).ok_or(Error::NotFanoPolytope)?;
                dual_vertex.push(v);
            }
            let mut pieces = Vec::new();
            for p in 0..m {
                let bi = b(p);
                let bj = b(p + 1);
                let mid: Vec<Rat> = bi
                    .iter()
                    .zip(&bj)
                    .map(|(x, y)| (x + y) / rat(2))
                    .collect();
                let mij = &dual_vertex[p];
                let bi_dual: Vec<Rat> = dual_vertex[(p + m - 1) % m]
                    .iter()
                    .zip(&dual_vertex[p])
                    .map(|(x, y)| (x + y) / rat(2))
                    .collect();
                let bj_dual: Vec<Rat> = dual_vertex[p]
                    .iter()
                    .zip(&dual_vertex[(p + 1) % m])
                    .map(|(x, y)| (x + y) / rat(2))
                    .collect();
                // Piece on cone(b_i, mid): b_i -> -bi_dual, mid -> -m_ij.
                for (gens, imgs) in [
                    (vec![bi.clone(), mid.clone()], vec![neg(&bi_dual), neg(mij)]),
                    (vec![mid.clone(), bj.clone()], vec![neg(mij), neg(&bj_dual)]),
                ] {
                    let gmat: Vec<Vec<Rat>> = (0..2).map(|row| vec![gens[0][row].clone(), gens[1][row].clone()]).collect();
                    // matrix * gens = imgs: solve row by row.
                    let mut matrix = Vec::new();
                    for row in 0..2 {
                        let rhs = vec![imgs[0][row].clone(), imgs[1][row].clone()];
                        let gt: Vec<Vec<Rat>> = (0..2).map(|c| vec![gmat[0][c].clone(), gmat[1][c].clone()]).collect();
                        matrix.push(solve(&gt, &rhs).ok_or(Error::NotFanoPolytope)?);
                    }
                    pieces.push(RhoPiece {
                        cone_gens: gens,
                        matrix,
                    });
                }
            }
            Ok(RhoMap { n, pieces })
        }
        _ => Err(Error::NotFanoPolytope),
    }
}

fn neg(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| -x.clone()).collect()
}

/// Membership of a dual-space point in the open region where the maximum of
/// the ray pairings is attained exactly on the index set.
pub fn in_u_region(git: &GitPresentation, i_set: &[usize], m: &[Rat]) -> bool {
    let vals: Vec<Rat> = (0..git.r_rays)
        .map(|i| dot(&hyperplane_row(git, i), m))
        .collect();
    let max_on_i = i_set.iter().map(|&i| vals[i].clone()).max();
    match max_on_i {
        None => false,
        Some(mx) => (0..git.r_rays)
            .filter(|i| !i_set.contains(i))
            .all(|j| vals[j] < mx),
    }
}

// ---------------------------------------------------------------------------
// SYZ cycles and one-dimensional integration.

/// A mirror cycle assembled from a characteristic cycle by the conical map:
/// pieces carry charts x_i = sum_a t_a ell_{ia} + <rho(nu), b_i> +
/// 2 pi i <m, b_i> over (m, nu) in cell x (-cone).
#[derive(Debug, Clone)]
pub struct SyzCycle {
    pub ccc: CCCycle,
    pub rho: RhoMap,
    /// The requested shift before perturbation.
    pub a_requested: Vec<Rat>,
    /// Recorded rational perturbation (zero when the arrangement was generic).
    pub a_perturbation: Vec<Rat>,
}

/// Rationalize and, if degenerate, perturb the shift vector until the
/// arrangement is generic; the perturbation is recorded.
pub fn syz_cycle(
    git: &GitPresentation,
    fan: &StackyFan,
    twist: &LineBundleTwist,
    t: &[Complex64],
) -> Result<SyzCycle> {
    let a_requested = shift_vector(git, twist, t);
    let mut eps_scale = 1i64;
    loop {
        let perturbation: Vec<Rat> = (0..git.r_rays)
            .map(|i| {
                if eps_scale == 1 {
                    Rat::zero()
                } else {
                    ratio((2 * i as i64 + 3) * 7, 1_000_003 * eps_scale)
                }
            })
            .collect();
        let a: Vec<Rat> = a_requested
            .iter()
            .zip(&perturbation)
            .map(|(x, e)| x + e)
            .collect();
        let (_, degenerate) = arrangement_cells(git, fan, &a)?;
        if !degenerate {
            let ccc = ccc_cycle(git, fan, &a)?;
            let rho = rho_map(git, fan)?;
            return Ok(SyzCycle {
                ccc,
                rho,
                a_requested,
                a_perturbation: perturbation,
            });
        }
        eps_scale = if eps_scale == 1 { 2 } else { eps_scale * 3 };
        if eps_scale > 1000 {
            return Err(Error::DegenerateParameters);
        }
    }
}

/// a = ell'(Im t / 2 pi) + c, rationalized at denominator 10^12. Under the
/// pinned inversion kernel the twist enters the hyperplane shift with the
/// sign opposite to the printed definition, so that the pinned chart angles
/// are -2 pi c_i and the cycle pairs with the same twisted bundle as the
/// contour integral; at real t both signs present the same bundle.
fn shift_vector(git: &GitPresentation, twist: &LineBundleTwist, t: &[Complex64]) -> Vec<Rat> {
    let denom = int(1_000_000_000_000i64);
    (0..git.r_rays)
        .map(|i| {
            let v: f64 = (0..git.k())
                .map(|a| rat_to_f64(&git.splitting.ell[i][a]) * t[a].im / TAU)
                .sum();
            let num = (v * 1e12).round() as i64;
            Rat::new(int(num), denom.clone()) + &twist.c[i]
        })
        .collect()
}

/// Growth rates of the chart coordinates along the ray direction -b_k.
fn ray_growth_rates(git: &GitPresentation, rho: &RhoMap, k: usize) -> Result<Vec<Rat>> {
    let minus_b: Vec<Rat> = git.rays[k].iter().map(|x| -Rat::from_integer(x.clone())).collect();
    let image = rho.apply(&minus_b).ok_or(Error::NotFanoPolytope)?;
    Ok((0..git.r_total)
        .map(|i| dot(&image, &int_vec_to_rat(&git.rays[i])))
        .collect())
}

/// Does e^{-W/z} decay along a ray with the given coordinate growth rates and
/// phase angles? Exact on the rates, floating on the cosines.
pub fn ray_converges(rates: &[Rat], thetas: &[f64]) -> bool {
    let mut best_pos: Option<Rat> = None;
    let mut best_neg: Option<Rat> = None;
    for (rate, theta) in rates.iter().zip(thetas) {
        if theta.cos() > 0.0 {
            if best_pos.as_ref().map(|b| rate > b).unwrap_or(true) {
                best_pos = Some(rate.clone());
            }
        } else if best_neg.as_ref().map(|b| rate > b).unwrap_or(true) {
            best_neg = Some(rate.clone());
        }
    }
    match (best_pos, best_neg) {
        (Some(p), Some(ng)) => p.is_positive() && p > ng,
        (Some(p), None) => p.is_positive(),
        _ => false,
    }
}

/// Phase angles of the chart on a piece whose dual-space point is `m`.
fn chart_thetas(git: &GitPresentation, t: &[Complex64], m: &[Rat]) -> Vec<f64> {
    (0..git.r_total)
        .map(|i| {
            let base: f64 = (0..git.k())
                .map(|a| rat_to_f64(&git.splitting.ell[i][a]) * t[a].im)
                .sum();
            base + TAU * rat_to_f64(&dot(&int_vec_to_rat(&git.rays[i]), &m.to_vec()))
        })
        .collect()
}

/// Verify that the superpotential grows along every unbounded direction of
/// every piece of the cycle.
pub fn convergence_check(
    git: &GitPresentation,
    cycle: &SyzCycle,
    t: &[Complex64],
) -> Result<bool> {
    for piece in &cycle.ccc.pieces {
        if piece.multiplicity == 0 {
            continue;
        }
        if piece.cone.is_empty() {
            if !piece.m_part.rays.is_empty() {
                return Ok(false);
            }
            continue;
        }
        let Some(sample) = piece.m_part.sample_relint() else {
            continue;
        };
        let thetas = chart_thetas(git, t, &sample);
        for &k in &piece.cone {
            let rates = ray_growth_rates(git, &cycle.rho, k)?;
            if !ray_converges(&rates, &thetas) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Integrate e^{-W/z} over the one-dimensional mirror cycle: vertical
/// segments in the dual direction plus horizontal rays through the conical
/// map, with certified ray tails.
pub fn zb_over_syz_n1(
    git: &GitPresentation,
    fan: &StackyFan,
    twist: &LineBundleTwist,
    params: &ComplexParams,
    tol: f64,
    max_subdivisions: usize,
) -> Result<CentralCharge> {
    if git.n != 1 {
        return Err(Error::KNotOne { k: git.n });
    }
    let cycle = syz_cycle(git, fan, twist, &params.t)?;
    if !convergence_check(git, &cycle, &params.t)? {
        return Err(Error::TailNotCertified {
            detail: "cycle fails the growth check".into(),
        });
    }
    let z = params.z;
    let jac = crate::bmodel::splitting_jacobian(git);
    let offsets: Vec<f64> = (0..git.r_total)
        .map(|i| {
            (0..git.k())
                .map(|a| rat_to_f64(&git.splitting.ell[i][a]) * params.t[a].re)
                .sum()
        })
        .collect();
    let b_f: Vec<f64> = (0..git.r_total)
        .map(|i| rat_to_f64(&Rat::from_integer(git.rays[i][0].clone())))
        .collect();
    let im_base: Vec<f64> = (0..git.r_total)
        .map(|i| {
            (0..git.k())
                .map(|a| rat_to_f64(&git.splitting.ell[i][a]) * params.t[a].im)
                .sum()
        })
        .collect();
    let w_at = |zeta_re: f64, m: f64| -> Complex64 {
        let mut w = Complex64::zero();
        for i in 0..git.r_total {
            let re = offsets[i] + b_f[i] * zeta_re;
            let im = im_base[i] + TAU * m * b_f[i];
            w += Complex64::new(re, im).exp();
        }
        w
    };
    let mut total = Complex64::zero();
    let mut err = 0.0f64;
    let mut evals = 0usize;
    let n_pieces = cycle.ccc.pieces.iter().filter(|p| p.multiplicity != 0).count();
    let piece_tol = tol / (2.0 * n_pieces.max(1) as f64);
    for piece in &cycle.ccc.pieces {
        if piece.multiplicity == 0 {
            continue;
        }
        let mult = piece.multiplicity as f64;
        if piece.cone.is_empty() {
            // Bounded vertical segment.
            if !piece.m_part.rays.is_empty() || piece.m_part.vertices.len() != 2 {
                return Err(Error::TailNotCertified {
                    detail: "vertical piece is not a bounded segment".into(),
                });
            }
            let m0 = rat_to_f64(&piece.m_part.vertices[0][0]);
            let m1 = rat_to_f64(&piece.m_part.vertices[1][0]);
            let (lo, hi) = if m0 <= m1 { (m0, m1) } else { (m1, m0) };
            let r = quad::integrate(
                |m| (-w_at(0.0, m) / z).exp(),
                lo,
                hi,
                piece_tol,
                max_subdivisions,
            )?;
            // d zeta = 2 pi i dm along the vertical direction.
            total += mult * r.value * Complex64::new(0.0, TAU);
            err += mult.abs() * r.abs_error * TAU;
            evals += r.evaluations;
        } else {
            // Horizontal ray from the cell point.
            let k = piece.cone[0];
            let m_star = rat_to_f64(&piece.m_part.vertices[0][0]);
            let rho_dir = {
                let minus_b = vec![-Rat::from_integer(git.rays[k][0].clone())];
                rat_to_f64(&cycle.rho.apply(&minus_b).ok_or(Error::NotFanoPolytope)?[0])
            };
            // Orientation of the ray piece under the conormal rule, relative
            // to increasing parameter s (nu = -s b_k).
            let orient = -rat_to_f64(&Rat::from_integer(git.rays[k][0].clone())).signum();
            // Certified tail: the dominant coordinate grows like
            // rho_dir * b_dom * s with positive cosine.
            let rates: Vec<f64> = (0..git.r_total).map(|i| rho_dir * b_f[i]).collect();
            let thetas: Vec<f64> = (0..git.r_total)
                .map(|i| im_base[i] + TAU * m_star * b_f[i])
                .collect();
            let mut lambda = f64::NEG_INFINITY;
            let mut cos_dom = 0.0;
            for i in 0..git.r_total {
                if rates[i] > lambda {
                    lambda = rates[i];
                    cos_dom = thetas[i].cos();
                }
            }
            if lambda <= 0.0 || cos_dom <= 0.0 {
                return Err(Error::TailNotCertified {
                    detail: format!("ray growth {lambda} with cosine {cos_dom}"),
                });
            }
            let min_off = offsets.iter().cloned().fold(f64::INFINITY, f64::min);
            // Conservative magnitude bound beyond s: others can offset the
            // dominant term only by bounded amounts at large s.
            let tail_at = |s0: f64| -> f64 {
                let h = 0.125f64;
                let mut sum = 0.0;
                let mut s = s0;
                for _ in 0..4000 {
                    let dominant = cos_dom * 0.5 * (min_off + lambda * s).exp();
                    let term = (-(dominant) / z).exp() * h * rho_dir.abs();
                    sum += term;
                    if term < 1e-18 * sum.max(1e-300) {
                        break;
                    }
                    s += h;
                }
                sum
            };
            let mut cutoff = 4.0;
            while tail_at(cutoff) >= piece_tol / 2.0 {
                cutoff += 1.0;
                if cutoff > 200.0 {
                    return Err(Error::TailNotCertified {
                        detail: "ray cutoff exceeded 200".into(),
                    });
                }
            }
            let r = quad::integrate(
                |s| (-w_at(rho_dir * s, m_star) / z).exp(),
                0.0,
                cutoff,
                piece_tol,
                max_subdivisions,
            )?;
            total += mult * orient * r.value * rho_dir;
            err += mult.abs() * (r.abs_error * rho_dir.abs() + tail_at(cutoff));
            evals += r.evaluations;
        }
    }
    // Global orientation: the conormal traversal runs right-to-left relative
    // to the fiber convention.
    Ok(CentralCharge {
        value: -total * jac,
        abs_error: err * jac,
        method: Method::SyzCycle,
        terms_used: evals,
    })
}

/// SVG rendering of a two-dimensional cell diagram, colored by multiplicity.
pub fn cells_svg(git: &GitPresentation, cells: &[Cell], a: &[Rat]) -> String {
    let size = 640.0f64;
    let mut reach = 1.0f64;
    for cell in cells {
        for v in &cell.poly.vertices {
            for x in v {
                reach = reach.max(rat_to_f64(x).abs());
            }
        }
    }
    let scale = size / (2.0 * (reach + 1.5));
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (size / 2.0 + scale * x, size / 2.0 - scale * y)
    };
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Bounded 2-cells as filled polygons.
    for cell in cells {
        if cell.dim == 2 && cell.poly.rays.is_empty() && cell.poly.vertices.len() >= 3 {
            let mut pts: Vec<(f64, f64)> = cell
                .poly
                .vertices
                .iter()
                .map(|v| (rat_to_f64(&v[0]), rat_to_f64(&v[1])))
                .collect();
            let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
            let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
            pts.sort_by(|p, q| {
                let ap = (p.1 - cy).atan2(p.0 - cx);
                let aq = (q.1 - cy).atan2(q.0 - cx);
                ap.partial_cmp(&aq).unwrap_or(std::cmp::Ordering::Equal)
            });
            let fill = match cell.multiplicity {
                m if m > 0 => "#9fd49f",
                m if m < 0 => "#e89a9a",
                _ => "#f2f2f2",
            };
            let path: Vec<String> = pts
                .iter()
                .map(|(x, y)| {
                    let (px, py) = to_px(*x, *y);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            svg.push_str(&format!(
                "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"none\" opacity=\"0.85\"/>\n",
                path.join(" ")
            ));
        }
    }
    // Hyperplane lines.
    for i in 0..git.r_rays {
        let b0 = rat_to_f64(&Rat::from_integer(git.rays[i][0].clone()));
        let b1 = rat_to_f64(&Rat::from_integer(git.rays[i][1].clone()));
        let c = -rat_to_f64(&a[i]);
        // Line b0 x + b1 y = c clipped to the view.
        let lim = reach + 1.5;
        let mut endpoints = Vec::new();
        for &x in &[-lim, lim] {
            if b1.abs() > 1e-12 {
                let y = (c - b0 * x) / b1;
                if y.abs() <= lim + 1e-9 {
                    endpoints.push((x, y));
                }
            }
        }
        for &y in &[-lim, lim] {
            if b0.abs() > 1e-12 {
                let x = (c - b1 * y) / b0;
                if x.abs() <= lim + 1e-9 {
                    endpoints.push((x, y));
                }
            }
        }
        endpoints.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9);
        if endpoints.len() >= 2 {
            let (x1, y1) = to_px(endpoints[0].0, endpoints[0].1);
            let (x2, y2) = to_px(endpoints[1].0, endpoints[1].1);
            svg.push_str(&format!(
                "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#555\" stroke-width=\"1\"/>\n"
            ));
        }
    }
    // Multiplicity labels at cell samples.
    for cell in cells {
        if let Some(s) = cell.poly.sample_relint() {
            let (px, py) = to_px(rat_to_f64(&s[0]), rat_to_f64(&s[1]));
            if px.is_finite() && py.is_finite() && px.abs() <= 2.0 * size && py.abs() <= 2.0 * size {
                svg.push_str(&format!(
                    "<text x=\"{px:.1}\" y=\"{py:.1}\" font-size=\"11\" text-anchor=\"middle\" fill=\"#222\">{}</text>\n",
                    cell.multiplicity
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}
