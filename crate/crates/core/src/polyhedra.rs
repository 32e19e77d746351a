//! Exact rational polyhedra at desk scale: H-representation in, vertex and
//! ray enumeration out, by brute-force active-set search. Inputs here have at
//! most a handful of constraints in dimension <= 3, where this is both exact
//! and instant.

use crate::rational::*;
use num::{One, Signed, Zero};

/// A polyhedron { x : A_eq x = b_eq, A_ge x >= b_ge } with its computed
/// V-representation. Pointed by construction in this crate (the constraint
/// normals span), so nonempty polyhedra have vertices.
#[derive(Debug, Clone)]
pub struct Polyhedron {
    pub ambient: usize,
    pub eq: Vec<(Vec<Rat>, Rat)>,
    pub ge: Vec<(Vec<Rat>, Rat)>,
    pub vertices: Vec<Vec<Rat>>,
    /// Primitive generators of the extreme rays of the recession cone.
    pub rays: Vec<Vec<Rat>>,
}

fn row_eval(row: &(Vec<Rat>, Rat), x: &[Rat]) -> Rat {
    dot(&row.0, x) - row.1.clone()
}

impl Polyhedron {
    pub fn from_constraints(ambient: usize, eq: Vec<(Vec<Rat>, Rat)>, ge: Vec<(Vec<Rat>, Rat)>) -> Self {
        let mut p = Polyhedron {
            ambient,
            eq,
            ge,
            vertices: Vec::new(),
            rays: Vec::new(),
        };
        p.compute_vrep();
        p
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.eq.iter().all(|r| row_eval(r, x).is_zero())
            && self.ge.iter().all(|r| !row_eval(r, x).is_negative())
    }

    /// Dimension, or None when empty.
    pub fn dim(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        Some(rank(&self.direction_span()))
    }

    /// Spanning set of the direction space (differences of vertices plus rays).
    pub fn direction_span(&self) -> Vec<Vec<Rat>> {
        let mut dirs: Vec<Vec<Rat>> = Vec::new();
        if let Some(v0) = self.vertices.first() {
            for v in &self.vertices[1..] {
                dirs.push(v.iter().zip(v0).map(|(a, b)| a - b).collect());
            }
        }
        dirs.extend(self.rays.iter().cloned());
        dirs
    }

    /// A point in the relative interior.
    pub fn sample_relint(&self) -> Option<Vec<Rat>> {
        if self.is_empty() {
            return None;
        }
        let count = Rat::from_integer(int(self.vertices.len() as i64));
        let mut x = vec![Rat::zero(); self.ambient];
        for v in &self.vertices {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += vi;
            }
        }
        for xi in x.iter_mut() {
            *xi /= count.clone();
        }
        for r in &self.rays {
            for (xi, ri) in x.iter_mut().zip(r) {
                *xi += ri;
            }
        }
        Some(x)
    }

    fn compute_vrep(&mut self) {
        let n = self.ambient;
        let eq_rows: Vec<Vec<Rat>> = self.eq.iter().map(|r| r.0.clone()).collect();
        let base_rank = rank(&eq_rows);
        // Vertices: active sets of size n - base_rank completing to rank n.
        let need = n.saturating_sub(base_rank);
        let m = self.ge.len();
        let mut vertices: Vec<Vec<Rat>> = Vec::new();
        for subset in subsets_of_size(m, need) {
            let mut rows = eq_rows.clone();
            let mut rhs: Vec<Rat> = self.eq.iter().map(|r| r.1.clone()).collect();
            for &j in &subset {
                rows.push(self.ge[j].0.clone());
                rhs.push(self.ge[j].1.clone());
            }
            if rank(&rows) != n {
                continue;
            }
            if let Some(x) = solve(&rows, &rhs) {
                // solve() returns a valid solution iff consistent; verify the
                // active rows exactly, then feasibility.
                let exact = rows
                    .iter()
                    .zip(&rhs)
                    .all(|(row, b)| dot(row, &x) == *b);
                if exact && self.contains(&x) && !vertices.contains(&x) {
                    vertices.push(x);
                }
            }
        }
        vertices.sort();
        self.vertices = vertices;
        if self.vertices.is_empty() {
            self.rays = Vec::new();
            return;
        }
        // Extreme rays of the recession cone.
        let need_r = n.saturating_sub(base_rank + 1);
        let mut rays: Vec<Vec<Rat>> = Vec::new();
        for subset in subsets_of_size(m, need_r) {
            let mut rows = eq_rows.clone();
            for &j in &subset {
                rows.push(self.ge[j].0.clone());
            }
            if rank(&rows) != n.saturating_sub(1) {
                continue;
            }
            // One-dimensional kernel direction.
            let Some(dir) = kernel_direction(&rows, n) else {
                continue;
            };
            for sign in [Rat::one(), -Rat::one()] {
                let d: Vec<Rat> = dir.iter().map(|x| x * &sign).collect();
                let feasible = self.eq.iter().all(|r| dot(&r.0, &d).is_zero())
                    && self.ge.iter().all(|r| !dot(&r.0, &d).is_negative());
                if feasible {
                    let prim = primitive_direction(&d);
                    if !rays.contains(&prim) {
                        rays.push(prim);
                    }
                }
            }
        }
        rays.sort();
        self.rays = rays;
    }
}

fn kernel_direction(rows: &[Vec<Rat>], n: usize) -> Option<Vec<Rat>> {
    let mut a = rows.to_vec();
    let order: Vec<usize> = (0..n).collect();
    let pivots = rref(&mut a, &order);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return None;
    }
    let mut d = vec![Rat::zero(); n];
    d[free[0]] = Rat::one();
    for (row, &p) in pivots.iter().enumerate() {
        d[p] = -a[row][free[0]].clone();
    }
    Some(d)
}

fn primitive_direction(v: &[Rat]) -> Vec<Rat> {
    let mut denom = Int::one();
    for x in v {
        denom = num::integer::lcm(denom, x.denom().clone());
    }
    let ints: Vec<Int> = v
        .iter()
        .map(|x| (x * Rat::from_integer(denom.clone())).to_integer())
        .collect();
    let mut g = Int::zero();
    for x in &ints {
        g = num::integer::gcd(g, x.abs());
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.iter().map(|x| Rat::from_integer(x / &g)).collect()
}

fn subsets_of_size(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] != pos + m - k {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[i64], b: i64) -> (Vec<Rat>, Rat) {
        (v.iter().map(|&x| rat(x)).collect(), rat(b))
    }

    #[test]
    fn square() {
        let p = Polyhedron::from_constraints(
            2,
            vec![],
            vec![row(&[1, 0], 0), row(&[0, 1], 0), row(&[-1, 0], -1), row(&[0, -1], -1)],
        );
        assert_eq!(p.vertices.len(), 4);
        assert!(p.rays.is_empty());
        assert_eq!(p.dim(), Some(2));
        let s = p.sample_relint().unwrap();
        assert!(p.contains(&s));
    }

    #[test]
    fn quadrant_with_rays() {
        let p = Polyhedron::from_constraints(2, vec![], vec![row(&[1, 0], 0), row(&[0, 1], 0)]);
        assert_eq!(p.vertices, vec![vec![rat(0), rat(0)]]);
        assert_eq!(p.rays.len(), 2);
    }

    #[test]
    fn segment_on_line() {
        // x + y = 1, x >= 0, y >= 0.
        let p = Polyhedron::from_constraints(
            2,
            vec![row(&[1, 1], 1)],
            vec![row(&[1, 0], 0), row(&[0, 1], 0)],
        );
        assert_eq!(p.vertices.len(), 2);
        assert_eq!(p.dim(), Some(1));
    }

    #[test]
    fn empty_detected() {
        let p = Polyhedron::from_constraints(1, vec![], vec![row(&[1], 1), row(&[-1], 0)]);
        assert!(p.is_empty());
        assert_eq!(p.dim(), None);
    }
}
