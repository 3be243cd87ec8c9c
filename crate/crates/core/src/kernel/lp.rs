//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! The solver is generic over [`Scalar`] so the same pivoting code runs on
//! exact rationals (when the payoffs allow it) and on tolerance-guarded
//! floats.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Float tolerance used for sign decisions during pivoting.
pub const FLOAT_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Strictly positive beyond the arithmetic's tolerance.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond the arithmetic's tolerance.
    fn is_neg(&self) -> bool;
    /// `self < other` beyond the arithmetic's tolerance.
    fn definitely_lt(&self, other: &Self) -> bool;
    fn is_exact_zero(&self) -> bool;

    fn is_zero_ish(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOL
    }
    fn definitely_lt(&self, other: &Self) -> bool {
        other - self > 1e-12 * (1.0 + self.abs().max(other.abs()))
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite input")
    }
    fn to_f64(&self) -> f64 {
        // numerator and denominator can exceed f64 range on their own
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let shift = self.denom().bits().max(self.numer().bits()) as i64 - 60;
                let scale = BigInt::one() << shift.max(0) as usize;
                let n = (self.numer() / &scale).to_f64().unwrap_or(0.0);
                let d = (self.denom() / &scale).to_f64().unwrap_or(1.0);
                n / d
            }
        }
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn definitely_lt(&self, other: &Self) -> bool {
        self < other
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// `maximize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<S> {
    pub x: Vec<S>,
    pub objective: S,
}

const MAX_PIVOTS: usize = 200_000;

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    n_cols: usize,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_exact_zero() {
                continue;
            }
            for j in 0..self.n_cols {
                let delta = f.clone() * self.rows[r][j].clone();
                self.rows[i][j] = self.rows[i][j].clone() - delta;
            }
            self.rhs[i] = self.rhs[i].clone() - f * self.rhs[r].clone();
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[S]) -> Vec<S> {
        let mut d: Vec<S> = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_exact_zero() {
                continue;
            }
            for (dj, x) in d.iter_mut().zip(&self.rows[i]).take(self.n_cols) {
                *dj = dj.clone() - cb.clone() * x.clone();
            }
        }
        d
    }

    /// Runs Bland-rule pivots until optimal. Columns flagged in `blocked`
    /// never enter the basis.
    fn optimize(&mut self, cost: &[S], blocked: &[bool]) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let d = self.reduced_costs(cost);
            let entering = (0..self.n_cols).find(|&j| !blocked[j] && d[j].is_pos());
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        // ties go to the smallest basic variable (Bland)
                        let tie = !lr.definitely_lt(&ratio) && self.basis[i] < self.basis[li];
                        if ratio.definitely_lt(&lr) || tie {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, c);
        }
        Err(Error::Unbounded)
    }
}

impl<S: Scalar> LinearProgram<S> {
    pub fn solve(&self) -> Result<LpSolution<S>> {
        let n = self.objective.len();
        let m = self.constraints.len();
        let n_slack = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let n_art = self
            .constraints
            .iter()
            .filter(|c| {
                let flip = c.rhs.to_f64() < 0.0;
                let rel = effective_relation(c.relation, flip);
                rel != Relation::Le
            })
            .count();
        let n_cols = n + n_slack + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack_at = n;
        let mut art_at = n + n_slack;
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "constraint has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            let flip = c.rhs.to_f64() < 0.0;
            let rel = effective_relation(c.relation, flip);
            let mut row = vec![S::zero(); n_cols];
            for (j, a) in c.coeffs.iter().enumerate() {
                row[j] = if flip { -a.clone() } else { a.clone() };
            }
            let b = if flip { -c.rhs.clone() } else { c.rhs.clone() };
            match rel {
                Relation::Le => {
                    row[slack_at] = S::one();
                    basis.push(slack_at);
                    slack_at += 1;
                }
                Relation::Ge => {
                    row[slack_at] = -S::one();
                    slack_at += 1;
                    row[art_at] = S::one();
                    basis.push(art_at);
                    art_at += 1;
                }
                Relation::Eq => {
                    row[art_at] = S::one();
                    basis.push(art_at);
                    art_at += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        let mut t = Tableau {
            rows,
            rhs,
            basis,
            n_cols,
        };
        let first_art = n + n_slack;
        let is_art = |j: usize| j >= first_art;

        if n_art > 0 {
            let cost: Vec<S> = (0..n_cols)
                .map(|j| if is_art(j) { -S::one() } else { S::zero() })
                .collect();
            t.optimize(&cost, &vec![false; n_cols])?;
            let infeasibility = t
                .basis
                .iter()
                .zip(&t.rhs)
                .filter(|(b, _)| is_art(**b))
                .fold(S::zero(), |acc, (_, v)| acc + v.clone());
            if infeasibility.is_pos() {
                return Err(Error::Infeasible);
            }
            // drive zero-level artificials out of the basis
            let mut r = 0;
            while r < t.rows.len() {
                if is_art(t.basis[r]) {
                    let col = (0..first_art).find(|&j| !t.rows[r][j].is_zero_ish());
                    match col {
                        Some(c) => {
                            t.pivot(r, c);
                            r += 1;
                        }
                        None => {
                            t.rows.remove(r);
                            t.rhs.remove(r);
                            t.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
        }

        let mut cost = vec![S::zero(); n_cols];
        cost[..n].clone_from_slice(&self.objective);
        let blocked: Vec<bool> = (0..n_cols).map(is_art).collect();
        t.optimize(&cost, &blocked)?;

        let mut x = vec![S::zero(); n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs[i].clone();
            }
        }
        let objective = x
            .iter()
            .zip(&self.objective)
            .fold(S::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
        Ok(LpSolution { x, objective })
    }
}

fn effective_relation(rel: Relation, flip: bool) -> Relation {
    match (rel, flip) {
        (r, false) => r,
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (Relation::Eq, true) => Relation::Eq,
    }
}
