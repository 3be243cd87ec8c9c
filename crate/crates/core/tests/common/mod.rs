//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Zero};

/// `min_j p·A[.][j]` for a defender mix `p`.
fn guarantee_d(a: &[Vec<f64>], p: &[f64]) -> f64 {
    (0..a[0].len())
        .map(|j| a.iter().zip(p).map(|(row, w)| w * row[j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

fn transpose_neg(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len()).map(|j| a.iter().map(|row| -row[j]).collect()).collect()
}

/// Points `k/den` on the simplex of dimension `n`.
fn lattice(n: usize, den: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, den, &mut Vec::new(), &mut out);
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        for (r, row) in rest.iter_mut().enumerate() {
            let f = row[col] / top[col][col];
            for (x, p) in row[col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * p;
            }
            b[col + 1 + r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    Some(x)
}

/// Best guarantee over every mix that equalizes some square set of
/// columns on some equally sized set of rows. Extreme optimal strategies
/// are always of this form, and every candidate is a real mixed strategy,
/// so the result is both attained and a lower bound on the value.
fn vertex_maximin(a: &[Vec<f64>]) -> f64 {
    let (m, n) = (a.len(), a[0].len());
    let mut best = f64::NEG_INFINITY;
    for k in 1..=m.min(n) {
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                // unknowns: p over `rows`, then w
                let mut lhs = Vec::with_capacity(k + 1);
                let mut rhs = Vec::with_capacity(k + 1);
                for &j in &cols {
                    let mut eq: Vec<f64> = rows.iter().map(|&i| a[i][j]).collect();
                    eq.push(-1.0);
                    lhs.push(eq);
                    rhs.push(0.0);
                }
                let mut norm = vec![1.0; k];
                norm.push(0.0);
                lhs.push(norm);
                rhs.push(1.0);
                // k equalities plus normalization over k + 1 unknowns
                let Some(x) = gauss(lhs, rhs) else { continue };
                if x[..k].iter().any(|w| *w < -1e-12) {
                    continue;
                }
                let mut p = vec![0.0; m];
                for (slot, &i) in rows.iter().enumerate() {
                    p[i] = x[slot].max(0.0);
                }
                let total: f64 = p.iter().sum();
                p.iter_mut().for_each(|w| *w /= total);
                best = best.max(guarantee_d(a, &p));
            }
        }
    }
    best
}

/// Lower and upper bounds on the value of the zero-sum game `a` (row player
/// maximizes), each from the guarantee of an explicit mixed strategy.
pub fn vertex_value_bounds(a: &[Vec<f64>]) -> (f64, f64) {
    let lower = vertex_maximin(a);
    let upper = -vertex_maximin(&transpose_neg(a));
    (lower, upper)
}

/// Shapley value by averaging marginal contributions over all orderings.
pub fn shapley_by_permutations(n: usize, v: &dyn Fn(u32) -> f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut phi = vec![0.0; n];
    let mut count = 0usize;
    loop {
        let mut mask = 0u32;
        for &i in &order {
            let before = v(mask);
            mask |= 1 << i;
            phi[i] += v(mask) - before;
        }
        count += 1;
        if !next_permutation(&mut order) {
            break;
        }
    }
    phi.iter().map(|x| x / count as f64).collect()
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Lottery share with the both-zero convention.
pub fn lottery(s: f64, rd: f64, ra: f64) -> f64 {
    if rd == 0.0 && ra == 0.0 {
        0.5
    } else {
        rd.powf(s) / (rd.powf(s) + ra.powf(s))
    }
}

pub fn winner_take_all(rd: f64, ra: f64) -> f64 {
    if rd > ra {
        1.0
    } else if rd < ra {
        0.0
    } else {
        0.5
    }
}

/// Integer compositions of `units` into `fields` parts.
pub fn compositions(units: u32, fields: usize) -> Vec<Vec<u32>> {
    lattice(fields, units as usize)
        .into_iter()
        .map(|v| v.into_iter().map(|k| k as u32).collect())
        .collect()
}

/// All equilibria of a nondegenerate 2x2 bimatrix game, pure and mixed.
pub fn equilibria_2x2(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Vec<([f64; 2], [f64; 2])> {
    let mut out = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            if a[i][j] >= a[1 - i][j] && b[i][j] >= b[i][1 - j] {
                let mut p = [0.0; 2];
                let mut q = [0.0; 2];
                p[i] = 1.0;
                q[j] = 1.0;
                out.push((p, q));
            }
        }
    }
    // column mix makes the row player indifferent and vice versa
    let dq = a[0][0] - a[0][1] - a[1][0] + a[1][1];
    let dp = b[0][0] - b[0][1] - b[1][0] + b[1][1];
    if dq != 0.0 && dp != 0.0 {
        let q0 = (a[1][1] - a[0][1]) / dq;
        let p0 = (b[1][1] - b[1][0]) / dp;
        if (0.0..=1.0).contains(&q0) && (0.0..=1.0).contains(&p0) && q0 > 0.0 && q0 < 1.0 {
            out.push(([p0, 1.0 - p0], [q0, 1.0 - q0]));
        }
    }
    out
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Exact drift of the capital-mod-M chain with residue win probabilities
/// `p[r]`, by rational Gaussian elimination.
pub fn exact_drift(p: &[BigRational]) -> BigRational {
    let m = p.len();
    let one = BigRational::one();
    // balance: π_j = Σ_i π_i P_ij ; replace the last row with Σ π = 1
    let mut a = vec![vec![BigRational::zero(); m + 1]; m];
    for (i, pi) in p.iter().enumerate() {
        let up = (i + 1) % m;
        let down = (i + m - 1) % m;
        a[up][i] += pi.clone();
        a[down][i] += &one - pi;
    }
    for (j, row) in a.iter_mut().enumerate() {
        row[j] -= one.clone();
    }
    for slot in a[m - 1].iter_mut().take(m) {
        *slot = one.clone();
    }
    a[m - 1][m] = one.clone();
    for col in 0..m {
        let piv = (col..m).find(|&r| !a[r][col].is_zero()).expect("irreducible chain");
        a.swap(col, piv);
        let lead = a[col][col].clone();
        for x in a[col][col..].iter_mut() {
            *x = &*x / &lead;
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= &f * p;
                }
            }
        }
    }
    let two = BigRational::from_integer(2.into());
    (0..m).map(|r| &a[r][m] * (&two * &p[r] - &one)).fold(BigRational::zero(), |s, x| s + x)
}

pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}
