//! Support enumeration for general-sum bimatrix games.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::linalg;
use super::lp::{Constraint, LinearProgram, Relation};
use super::{exploitability, expected_payoff, BimatrixGame, EquilibriumProfile, MixedStrategy};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: usize = 64;

/// Largest `rows + cols` (after dominance elimination) for which degenerate
/// games get the full unequal-support scan.
const DEGENERATE_SCAN_LIMIT: usize = 12;

/// Upper bound on equal-size support pairs visited in one enumeration.
const SUPPORT_PAIR_LIMIT: u128 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumSelectionRule {
    /// Highest defender value, then highest attacker value, then
    /// lexicographically smallest supports.
    #[default]
    DefenderOptimal,
    /// Highest attacker value, then highest defender value.
    AttackerOptimal,
    /// Highest sum of both values.
    Utilitarian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportEquilibrium {
    pub profile: EquilibriumProfile,
    pub support_d: Vec<usize>,
    pub support_a: Vec<usize>,
    /// Found by the degenerate-game scan (one representative of a possibly
    /// continuous equilibrium component).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub equilibria: Vec<SupportEquilibrium>,
    /// Equal-size support systems that were singular and skipped.
    pub singular_supports: usize,
}

impl Enumeration {
    pub fn is_degenerate(&self) -> bool {
        self.singular_supports > 0
    }
}

pub fn enumerate_equilibria(game: &BimatrixGame) -> Result<Enumeration> {
    enumerate_with_cap(game, DEFAULT_ENUMERATION_CAP)
}

pub fn solve_bimatrix(
    game: &BimatrixGame,
    selection: EquilibriumSelectionRule,
) -> Result<SupportEquilibrium> {
    solve_bimatrix_with_cap(game, selection, DEFAULT_ENUMERATION_CAP)
}

pub fn solve_bimatrix_with_cap(
    game: &BimatrixGame,
    selection: EquilibriumSelectionRule,
    cap: usize,
) -> Result<SupportEquilibrium> {
    let found = enumerate_with_cap(game, cap)?;
    let singular = found.singular_supports;
    found
        .equilibria
        .into_iter()
        .max_by(|a, b| compare(selection, a, b))
        .ok_or(Error::DegenerateGame { singular })
}

/// `Ordering::Greater` means `a` is preferred.
fn compare(rule: EquilibriumSelectionRule, a: &SupportEquilibrium, b: &SupportEquilibrium) -> Ordering {
    let tol = 1e-9;
    let cmp_val = |x: f64, y: f64| {
        if (x - y).abs() <= tol {
            Ordering::Equal
        } else {
            x.partial_cmp(&y).unwrap_or(Ordering::Equal)
        }
    };
    let (pa, pb) = (&a.profile, &b.profile);
    let primary = match rule {
        EquilibriumSelectionRule::DefenderOptimal => cmp_val(pa.value_d, pb.value_d)
            .then_with(|| cmp_val(pa.value_a, pb.value_a)),
        EquilibriumSelectionRule::AttackerOptimal => cmp_val(pa.value_a, pb.value_a)
            .then_with(|| cmp_val(pa.value_d, pb.value_d)),
        EquilibriumSelectionRule::Utilitarian => {
            cmp_val(pa.value_d + pa.value_a, pb.value_d + pb.value_a)
        }
    };
    // smaller supports win the final tie-break
    primary
        .then_with(|| b.support_d.cmp(&a.support_d))
        .then_with(|| b.support_a.cmp(&a.support_a))
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Iterated elimination of pure strategies strictly dominated by another
/// pure strategy. Every equilibrium lives on the survivors.
fn undominated(game: &BimatrixGame) -> (Vec<usize>, Vec<usize>) {
    let (pd, pa) = (game.payoff_d(), game.payoff_a());
    let mut rows: Vec<usize> = (0..game.rows()).collect();
    let mut cols: Vec<usize> = (0..game.cols()).collect();
    loop {
        let before = rows.len() + cols.len();
        let keep_rows: Vec<usize> = rows
            .iter()
            .copied()
            .filter(|&i| !rows.iter().any(|&r| cols.iter().all(|&j| pd[r][j] > pd[i][j])))
            .collect();
        rows = keep_rows;
        let keep_cols: Vec<usize> = cols
            .iter()
            .copied()
            .filter(|&j| !cols.iter().any(|&c| rows.iter().all(|&i| pa[i][c] > pa[i][j])))
            .collect();
        cols = keep_cols;
        if rows.len() + cols.len() == before {
            return (rows, cols);
        }
    }
}

fn enumerate_with_cap(game: &BimatrixGame, cap: usize) -> Result<Enumeration> {
    let (m, n) = (game.rows(), game.cols());
    if m > cap || n > cap {
        return Err(Error::EnumerationCapExceeded {
            count: m.max(n),
            cap,
        });
    }
    let (live_rows, live_cols) = undominated(game);
    let (lm, ln) = (live_rows.len(), live_cols.len());
    let pairs: u128 = (1..=lm.min(ln)).map(|k| binomial(lm, k) * binomial(ln, k)).sum();
    if pairs > SUPPORT_PAIR_LIMIT {
        return Err(Error::EnumerationCapExceeded {
            count: usize::try_from(pairs).unwrap_or(usize::MAX),
            cap: SUPPORT_PAIR_LIMIT as usize,
        });
    }
    let tol = 1e-9 * (1.0 + game.max_abs());
    let mut out = Enumeration {
        equilibria: Vec::new(),
        singular_supports: 0,
    };
    let (pd, pa) = (game.payoff_d(), game.payoff_a());
    let pick = |from: &[usize], idx: &[usize]| -> Vec<usize> { idx.iter().map(|&x| from[x]).collect() };
    for k in 1..=lm.min(ln) {
        for col_idx in combinations(ln, k) {
            let cols = pick(&live_cols, &col_idx);
            // a row beaten on every column of `cols` is never a best response
            let rows_ok: Vec<usize> = live_rows
                .iter()
                .copied()
                .filter(|&i| !live_rows.iter().any(|&r| cols.iter().all(|&j| pd[r][j] > pd[i][j])))
                .collect();
            for row_idx in combinations(rows_ok.len(), k) {
                let rows = pick(&rows_ok, &row_idx);
                let col_dominated = cols
                    .iter()
                    .any(|&j| live_cols.iter().any(|&c| rows.iter().all(|&i| pa[i][c] > pa[i][j])));
                if col_dominated {
                    continue;
                }
                match equal_support_candidate(game, &rows, &cols, tol) {
                    Candidate::Singular => out.singular_supports += 1,
                    Candidate::Rejected => {}
                    Candidate::Found(p, q) => push_unique(&mut out.equilibria, game, p, q, false)?,
                }
            }
        }
    }
    if out.singular_supports > 0 && lm + ln <= DEGENERATE_SCAN_LIMIT {
        for row_idx in subsets(lm) {
            for col_idx in subsets(ln) {
                let (rows, cols) = (pick(&live_rows, &row_idx), pick(&live_cols, &col_idx));
                if let Some((p, q)) = feasible_support_pair(game, &rows, &cols)? {
                    push_unique(&mut out.equilibria, game, p, q, true)?;
                }
            }
        }
    }
    Ok(out)
}

enum Candidate {
    Singular,
    Rejected,
    Found(Vec<f64>, Vec<f64>),
}

/// Solves the indifference systems for one equal-size support pair.
fn equal_support_candidate(
    game: &BimatrixGame,
    rows: &[usize],
    cols: &[usize],
    tol: f64,
) -> Candidate {
    let k = rows.len();
    // attacker mix q on cols makes every defender row in `rows` earn u
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            a[r][c] = game.payoff_d()[i][j];
        }
        a[r][k] = -1.0;
    }
    a[k][..k].fill(1.0);
    b[k] = 1.0;
    let Some(qs) = linalg::solve(a, b) else {
        return Candidate::Singular;
    };
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (c, &j) in cols.iter().enumerate() {
        for (r, &i) in rows.iter().enumerate() {
            a[c][r] = game.payoff_a()[i][j];
        }
        a[c][k] = -1.0;
    }
    a[k][..k].fill(1.0);
    b[k] = 1.0;
    let Some(ps) = linalg::solve(a, b) else {
        return Candidate::Singular;
    };
    if qs[..k].iter().chain(&ps[..k]).any(|&w| w < -1e-9) {
        return Candidate::Rejected;
    }
    let mut p = vec![0.0; game.rows()];
    let mut q = vec![0.0; game.cols()];
    for (r, &i) in rows.iter().enumerate() {
        p[i] = ps[r].max(0.0);
    }
    for (c, &j) in cols.iter().enumerate() {
        q[j] = qs[c].max(0.0);
    }
    let p = MixedStrategy::normalized(p).weights().to_vec();
    let q = MixedStrategy::normalized(q).weights().to_vec();
    if !is_best_response_pair(game, &p, &q, tol) {
        return Candidate::Rejected;
    }
    Candidate::Found(p, q)
}

fn is_best_response_pair(game: &BimatrixGame, p: &[f64], q: &[f64], tol: f64) -> bool {
    let realized_d = expected_payoff(game.payoff_d(), p, q);
    let realized_a = expected_payoff(game.payoff_a(), p, q);
    let row_ok = game
        .payoff_d()
        .iter()
        .all(|row| row.iter().zip(q).map(|(v, w)| v * w).sum::<f64>() <= realized_d + tol);
    let col_ok = (0..game.cols()).all(|j| {
        (0..game.rows())
            .map(|i| p[i] * game.payoff_a()[i][j])
            .sum::<f64>()
            <= realized_a + tol
    });
    row_ok && col_ok
}

/// LP feasibility route for supports of any sizes: each side's mix must make
/// the opponent's support rows/columns best responses.
fn feasible_support_pair(
    game: &BimatrixGame,
    rows: &[usize],
    cols: &[usize],
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let payoff_d = game.payoff_d();
    let payoff_a = game.payoff_a();
    let Some(qs) = indifference_lp(game.rows(), cols, rows, |i, j| payoff_d[i][j])? else {
        return Ok(None);
    };
    let Some(ps) = indifference_lp(game.cols(), rows, cols, |j, i| payoff_a[i][j])? else {
        return Ok(None);
    };
    let mut p = vec![0.0; game.rows()];
    let mut q = vec![0.0; game.cols()];
    for (r, &i) in rows.iter().enumerate() {
        p[i] = ps[r];
    }
    for (c, &j) in cols.iter().enumerate() {
        q[j] = qs[c];
    }
    Ok(Some((
        MixedStrategy::normalized(p).weights().to_vec(),
        MixedStrategy::normalized(q).weights().to_vec(),
    )))
}

/// Finds a mix over `own` such that every opponent action in `target` earns
/// the common maximum. `payoff(opp, own)` is the opponent's payoff.
fn indifference_lp(
    n_opp: usize,
    own: &[usize],
    target: &[usize],
    payoff: impl Fn(usize, usize) -> f64,
) -> Result<Option<Vec<f64>>> {
    let k = own.len();
    let min = (0..n_opp)
        .flat_map(|o| own.iter().map(move |&s| (o, s)))
        .map(|(o, s)| payoff(o, s))
        .fold(f64::INFINITY, f64::min);
    // variables: weights on `own`, then u' = u - min + 1 ≥ 0
    let mut constraints = Vec::with_capacity(n_opp + 1);
    for o in 0..n_opp {
        let mut coeffs: Vec<f64> = own.iter().map(|&s| payoff(o, s)).collect();
        coeffs.push(-1.0);
        constraints.push(Constraint {
            coeffs,
            relation: if target.contains(&o) {
                Relation::Eq
            } else {
                Relation::Le
            },
            rhs: min - 1.0,
        });
    }
    let mut simplex = vec![1.0; k];
    simplex.push(0.0);
    constraints.push(Constraint {
        coeffs: simplex,
        relation: Relation::Eq,
        rhs: 1.0,
    });
    let lp = LinearProgram {
        objective: vec![0.0; k + 1],
        constraints,
    };
    match lp.solve() {
        Ok(sol) => Ok(Some(sol.x[..k].to_vec())),
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

fn push_unique(
    found: &mut Vec<SupportEquilibrium>,
    game: &BimatrixGame,
    p: Vec<f64>,
    q: Vec<f64>,
    degenerate: bool,
) -> Result<()> {
    let dup = found.iter().any(|e| {
        let same = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(a, b)| (a - b).abs() <= 1e-9);
        same(e.profile.strategy_d.weights(), &p) && same(e.profile.strategy_a.weights(), &q)
    });
    if dup {
        return Ok(());
    }
    let value_d = expected_payoff(game.payoff_d(), &p, &q);
    let value_a = expected_payoff(game.payoff_a(), &p, &q);
    let strategy_d = MixedStrategy::normalized(p);
    let strategy_a = MixedStrategy::normalized(q);
    let support_d = strategy_d.support(1e-12);
    let support_a = strategy_a.support(1e-12);
    let mut profile = EquilibriumProfile {
        strategy_d,
        strategy_a,
        value_d,
        value_a,
        epsilon: 0.0,
    };
    profile.epsilon = exploitability(game, &profile)?;
    found.push(SupportEquilibrium {
        profile,
        support_d,
        support_a,
        degenerate,
    });
    Ok(())
}

/// k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << n)).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}
