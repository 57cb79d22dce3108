use crate::linalg::{solve, Field};

/// Value and optimal mixed strategies of a zero-sum matrix game where the
/// row player maximizes.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSolution<F> {
    pub value: F,
    pub row: Vec<F>,
    pub col: Vec<F>,
}

/// Solves `payoff` exactly (over rationals) or up to the field tolerance.
///
/// Pure saddle points are found directly. Otherwise duplicate rows and
/// columns are merged, the matrix is shifted to positive entries and every
/// pair of equal-size supports is tried: by the Shapley–Snow theorem some
/// square kernel yields optimal strategies as the solution of the
/// indifference equations.
pub fn matrix_game_value<F: Field>(payoff: &[Vec<F>]) -> MatrixSolution<F> {
    let m = payoff.len();
    assert!(m > 0 && !payoff[0].is_empty(), "matrix game needs at least one row and one column");
    let n = payoff[0].len();
    if let Some(sol) = pure_saddle(payoff) {
        return sol;
    }

    let rows = distinct(m, |i, k| (0..n).all(|j| (payoff[i][j].clone() - payoff[k][j].clone()).is_negligible()));
    let cols = distinct(n, |j, k| (0..m).all(|i| (payoff[i][j].clone() - payoff[i][k].clone()).is_negligible()));
    let min = payoff.iter().flatten().fold(payoff[0][0].clone(), |acc, x| if *x < acc { x.clone() } else { acc });
    let shift = F::one() - min;
    let reduced: Vec<Vec<F>> =
        rows.iter().map(|&i| cols.iter().map(|&j| payoff[i][j].clone() + shift.clone()).collect()).collect();

    let sol = kernel_search(&reduced).expect("every matrix game has an optimal kernel");
    let mut row = vec![F::zero(); m];
    for (k, &i) in rows.iter().enumerate() {
        row[i] = sol.row[k].clone();
    }
    let mut col = vec![F::zero(); n];
    for (k, &j) in cols.iter().enumerate() {
        col[j] = sol.col[k].clone();
    }
    MatrixSolution { value: sol.value - shift, row, col }
}

fn pure_saddle<F: Field>(a: &[Vec<F>]) -> Option<MatrixSolution<F>> {
    let (m, n) = (a.len(), a[0].len());
    for i in 0..m {
        for j in 0..n {
            let x = &a[i][j];
            let row_min = (0..n).all(|k| a[i][k].geq(x));
            let col_max = (0..m).all(|k| x.geq(&a[k][j]));
            if row_min && col_max {
                return Some(MatrixSolution { value: x.clone(), row: unit(m, i), col: unit(n, j) });
            }
        }
    }
    None
}

fn unit<F: Field>(len: usize, at: usize) -> Vec<F> {
    (0..len).map(|k| if k == at { F::one() } else { F::zero() }).collect()
}

/// Indices of the first occurrence of every equivalence class.
fn distinct(len: usize, same: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..len {
        if !keep.iter().any(|&k| same(i, k)) {
            keep.push(i);
        }
    }
    keep
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Solves the indifference system `Σ_i w_i M[i][j] = v` for `j` in the
/// support, `Σ w = 1`. `entry(i, j)` reads the kernel.
fn indifference<F: Field>(k: usize, entry: impl Fn(usize, usize) -> F) -> Option<(Vec<F>, F)> {
    let mut a = vec![vec![F::zero(); k + 1]; k + 1];
    let mut b = vec![F::zero(); k + 1];
    for j in 0..k {
        for i in 0..k {
            a[j][i] = entry(i, j);
        }
        a[j][k] = -F::one();
    }
    for i in 0..k {
        a[k][i] = F::one();
    }
    b[k] = F::one();
    let mut x = solve(a, b)?;
    let v = x.pop()?;
    Some((x, v))
}

/// Clamps small negative weights to zero and rescales to sum 1. A no-op
/// on exact solutions; on floats it keeps the weights a distribution.
fn normalize<F: Field>(w: Vec<F>) -> Option<Vec<F>> {
    if w.iter().any(|x| !x.geq(&F::zero())) {
        return None;
    }
    let w: Vec<F> = w.into_iter().map(|x| if x < F::zero() { F::zero() } else { x }).collect();
    let total = w.iter().fold(F::zero(), |acc, x| acc + x.clone());
    if total.is_negligible() {
        return None;
    }
    Some(w.into_iter().map(|x| x / total.clone()).collect())
}

/// What `row` guarantees and what `col` concedes.
fn bounds<F: Field>(a: &[Vec<F>], row: &[F], col: &[F]) -> (F, F) {
    let (m, n) = (a.len(), a[0].len());
    let earn = |j: usize| (0..m).fold(F::zero(), |acc, i| acc + row[i].clone() * a[i][j].clone());
    let concede = |i: usize| (0..n).fold(F::zero(), |acc, j| acc + a[i][j].clone() * col[j].clone());
    let lo = (1..n).map(earn).fold(earn(0), |acc, x| if x < acc { x } else { acc });
    let hi = (1..m).map(concede).fold(concede(0), |acc, x| if x > acc { x } else { acc });
    (lo, hi)
}

/// First kernel whose strategies form a saddle point. Over the rationals
/// one always exists. With floats an ill-conditioned kernel can miss the
/// tolerance; then the candidate with the smallest gap between guarantee
/// and concession is returned, valued at the midpoint.
fn kernel_search<F: Field>(a: &[Vec<F>]) -> Option<MatrixSolution<F>> {
    let (m, n) = (a.len(), a[0].len());
    let mut best: Option<(F, MatrixSolution<F>)> = None;
    for k in 1..=m.min(n) {
        let row_sets = subsets(m, k);
        let col_sets = subsets(n, k);
        for rs in &row_sets {
            for cs in &col_sets {
                let Some((x, _)) = indifference(k, |i, j| a[rs[i]][cs[j]].clone()) else { continue };
                let Some(x) = normalize(x) else { continue };
                let Some((y, _)) = indifference(k, |j, i| a[rs[i]][cs[j]].clone()) else { continue };
                let Some(y) = normalize(y) else { continue };
                let mut row = vec![F::zero(); m];
                for (idx, &i) in rs.iter().enumerate() {
                    row[i] = x[idx].clone();
                }
                let mut col = vec![F::zero(); n];
                for (idx, &j) in cs.iter().enumerate() {
                    col[j] = y[idx].clone();
                }
                let (lo, hi) = bounds(a, &row, &col);
                let gap = hi.clone() - lo.clone();
                let value = (lo + hi) / F::from_usize(2);
                if F::zero().geq(&gap) {
                    return Some(MatrixSolution { value, row, col });
                }
                if best.as_ref().is_none_or(|(g, _)| gap < *g) {
                    best = Some((gap, MatrixSolution { value, row, col }));
                }
            }
        }
    }
    best.map(|(_, sol)| sol)
}

/// `row` guarantees at least `v` against every column and `col` concedes
/// at most `v` against every row.
pub fn is_saddle<F: Field>(a: &[Vec<F>], row: &[F], col: &[F], v: &F) -> bool {
    let (m, n) = (a.len(), a[0].len());
    let earns = (0..n).all(|j| (0..m).fold(F::zero(), |acc, i| acc + row[i].clone() * a[i][j].clone()).geq(v));
    let concedes = (0..m).all(|i| v.geq(&(0..n).fold(F::zero(), |acc, j| acc + a[i][j].clone() * col[j].clone())));
    earns && concedes
}
