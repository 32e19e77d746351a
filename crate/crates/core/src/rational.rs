//! Exact rational and integer linear algebra at desk scale.
//!
//! Everything here is small: matrices are at most ~6x6, so plain Gaussian
//! elimination over `BigRational` and textbook Hermite reduction over `BigInt`
//! are the right tools.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(v: i64) -> Rat {
    Rat::from_integer(int(v))
}

pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(int(num), int(den))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Avoid overflow for large numerators by exact division fallback.
    match (i128::try_from(n.clone()), i128::try_from(d.clone())) {
        (Ok(n), Ok(d)) => n as f64 / d as f64,
        _ => {
            let f = Rat::new(n.clone() << 64, d.clone());
            f.to_integer()
                .to_string()
                .parse::<f64>()
                .map(|x| x / 2f64.powi(64))
                .unwrap_or(f64::NAN)
        }
    }
}

/// Render a rational as "p" or "p/q".
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse "p", "p/q" or a decimal such as "-7.25" into an exact rational.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: Int = p.trim().parse().ok()?;
        let q: Int = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rat::new(p, q));
    }
    if let Some((a, b)) = s.split_once('.') {
        let neg = a.trim_start().starts_with('-');
        let a: Int = a.parse().ok()?;
        if b.is_empty() || b.contains(['-', '+']) {
            return None;
        }
        let frac: Int = b.parse().ok()?;
        let scale = Int::from(10u32).pow(b.len() as u32);
        let abs = a.abs() * &scale + frac;
        let signed = if neg { -abs } else { abs };
        return Some(Rat::new(signed, scale));
    }
    let p: Int = s.parse().ok()?;
    Some(Rat::from_integer(p))
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int(a: &[Int], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .map(|(x, y)| Rat::from_integer(x.clone()) * y)
        .sum()
}

pub fn int_vec_to_rat(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

/// Exact determinant by fraction-full Gaussian elimination.
pub fn determinant(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut det = Rat::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !a[i][k].is_zero());
        let Some(p) = pivot else {
            return Rat::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k].clone();
        let inv = a[k][k].recip();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in k..n {
                let s = &a[k][j] * &f;
                a[i][j] -= s;
            }
        }
    }
    det
}

/// Reduced row echelon form. Pivot columns are tried in the order given by
/// `col_order`; returns the pivot column (if any) used for each reduced row.
pub fn rref(a: &mut Vec<Vec<Rat>>, col_order: &[usize]) -> Vec<usize> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for &c in col_order {
        if row >= rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][c].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != row && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..a[i].len() {
                    let s = &a[row][j] * &f;
                    a[i][j] -= s;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    a.truncate(row);
    pivots
}

pub fn rank(m: &[Vec<Rat>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let mut a = m.to_vec();
    let cols: Vec<usize> = (0..m[0].len()).collect();
    rref(&mut a, &cols).len()
}

/// Solve A x = b exactly. Returns one solution or None if inconsistent.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(r, rhs)| {
            let mut v = r.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    // The augmented column participates last, so an inconsistent system shows
    // up as a pivot there.
    let order: Vec<usize> = (0..=cols).collect();
    let pivots = rref(&mut aug, &order);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Row-style Hermite normal form of an integer matrix with unimodular
/// transform tracking: returns (H, U) with U * A = H, U unimodular.
pub fn hnf_with_transform(a: &[Vec<Int>]) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut h: Vec<Vec<Int>> = a.to_vec();
    let mut u: Vec<Vec<Int>> = (0..rows)
        .map(|i| (0..rows).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        // Euclidean sweep: clear column `col` below `pivot_row`.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows {
                if !h[i][col].is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => h[i][col].abs() < h[b][col].abs(),
                    };
                    if better {
                        best = Some(i);
                    }
                }
            }
            let Some(b) = best else {
                break;
            };
            h.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let mut any = false;
            for i in pivot_row + 1..rows {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = div_round(&h[i][col], &h[pivot_row][col]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let s = &h[pivot_row][j] * &q;
                        h[i][j] -= s;
                    }
                    for j in 0..rows {
                        let s = &u[pivot_row][j] * &q;
                        u[i][j] -= s;
                    }
                }
                if !h[i][col].is_zero() {
                    any = true;
                }
            }
            if !any {
                break;
            }
        }
        if !h[pivot_row][col].is_zero() {
            if h[pivot_row][col].is_negative() {
                for j in 0..cols {
                    h[pivot_row][j] = -h[pivot_row][j].clone();
                }
                for j in 0..rows {
                    u[pivot_row][j] = -u[pivot_row][j].clone();
                }
            }
            pivot_row += 1;
        }
    }
    (h, u)
}

fn div_round(a: &Int, b: &Int) -> Int {
    // Nearest-integer quotient keeps entries small during the sweep.
    let two = int(2);
    let (q, r) = (a / b, a % b);
    if &r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + Int::one()
        } else {
            q - Int::one()
        }
    } else {
        q
    }
}

/// Z-basis of the integer kernel {x in Z^r : M x = 0} of an n x r matrix.
pub fn integer_kernel(m: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = m.len();
    let r = if n == 0 { 0 } else { m[0].len() };
    // Rows of U mapping to zero rows of H = U * M^T form a kernel basis.
    let mt: Vec<Vec<Int>> = (0..r).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect();
    let (h, u) = hnf_with_transform(&mt);
    let mut basis = Vec::new();
    for (row, hrow) in h.iter().enumerate() {
        if hrow.iter().all(|x| x.is_zero()) {
            basis.push(u[row].clone());
        }
    }
    // Hermite-reduce the basis itself for a canonical presentation.
    let (mut hb, _) = hnf_with_transform(&basis);
    hb.retain(|r| r.iter().any(|x| !x.is_zero()));
    hb
}

/// Index of the sublattice of Z^n spanned by the rows (0 if not full rank).
pub fn lattice_index(rows: &[Vec<Int>]) -> Int {
    let n = if rows.is_empty() { 0 } else { rows[0].len() };
    if rows.len() != n {
        let (h, _) = hnf_with_transform(rows);
        let nonzero: Vec<Vec<Int>> = h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        if nonzero.len() != n {
            return Int::zero();
        }
        return lattice_index(&nonzero);
    }
    let m: Vec<Vec<Rat>> = rows.iter().map(|r| int_vec_to_rat(r)).collect();
    let d = determinant(&m);
    d.to_integer().abs()
}

/// Does `target` lie in the cone of nonnegative combinations of `gens`?
/// Returns the set of generator indices that can carry strictly positive
/// weight in some representation (empty-handed None if infeasible).
///
/// Enumerates basic solutions; fine for the handful of generators we see.
pub fn cone_membership(gens: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<usize>> {
    let dim = target.len();
    let m = gens.len();
    if target.iter().all(|x| x.is_zero()) {
        return Some(Vec::new());
    }
    let mut positive_support: Vec<bool> = vec![false; m];
    let mut feasible = false;
    // Basic solutions use at most `dim` generators.
    for subset in subsets_up_to(m, dim.min(m)) {
        if subset.is_empty() {
            continue;
        }
        let a: Vec<Vec<Rat>> = (0..dim)
            .map(|row| subset.iter().map(|&j| gens[j][row].clone()).collect())
            .collect();
        if let Some(x) = solve(&a, target) {
            // Verify the solve (columns may be dependent) and nonnegativity.
            let mut ok = true;
            for row in 0..dim {
                let s: Rat = subset
                    .iter()
                    .enumerate()
                    .map(|(idx, &j)| &gens[j][row] * &x[idx])
                    .sum();
                if s != target[row] {
                    ok = false;
                    break;
                }
            }
            if ok && x.iter().all(|v| !v.is_negative()) {
                feasible = true;
                for (idx, &j) in subset.iter().enumerate() {
                    if x[idx].is_positive() {
                        positive_support[j] = true;
                    }
                }
            }
        }
    }
    if !feasible {
        return None;
    }
    Some((0..m).filter(|&j| positive_support[j]).collect())
}

fn subsets_up_to(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        if (mask.count_ones() as usize) <= k {
            out.push((0..m).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_p2() {
        let m = vec![
            vec![int(1), int(0), int(-1)],
            vec![int(0), int(1), int(-1)],
        ];
        let k = integer_kernel(&m);
        assert_eq!(k, vec![vec![int(1), int(1), int(1)]]);
    }

    #[test]
    fn kernel_weighted_p12() {
        let m = vec![vec![int(1), int(-2)]];
        let k = integer_kernel(&m);
        assert_eq!(k, vec![vec![int(2), int(1)]]);
    }

    #[test]
    fn determinant_and_index() {
        let m = vec![vec![rat(2), rat(0)], vec![rat(0), rat(3)]];
        assert_eq!(determinant(&m), rat(6));
        assert_eq!(lattice_index(&[vec![int(1), int(1)], vec![int(0), int(2)]]), int(2));
    }

    #[test]
    fn solve_simple() {
        let a = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        let x = solve(&a, &[rat(3), rat(1)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        assert!(solve(&[vec![rat(1)], vec![rat(1)]], &[rat(1), rat(2)]).is_none());
    }

    #[test]
    fn cone_membership_positive_support() {
        // eta = 1 inside cone(1, 1): both generators can be strictly positive.
        let gens = vec![vec![rat(1)], vec![rat(1)]];
        let sup = cone_membership(&gens, &[rat(1)]).unwrap();
        assert_eq!(sup, vec![0, 1]);
        assert!(cone_membership(&gens, &[rat(-1)]).is_none());
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rat_to_string(&ratio(-3, 6)), "-1/2");
        assert_eq!(rat_from_str("7/2"), Some(ratio(7, 2)));
        assert_eq!(rat_from_str("-0.25"), Some(ratio(-1, 4)));
        assert_eq!(rat_from_str("4"), Some(rat(4)));
        assert_eq!(rat_from_str("1/0"), None);
    }
}
