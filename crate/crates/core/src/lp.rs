//! Dense phase-one simplex for tiny feasibility problems
//! `{x ≥ 0 : A x ≤ c, E x = e}`. Bland's rule, no presolve.

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 10_000;

pub(crate) struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// Whether `{x ≥ 0 : a·x ≤ c for every inequality, e·x = r for every
/// equality}` is nonempty, up to `feas_tol` on the phase-one objective.
pub(crate) fn feasible(n_vars: usize, ineqs: &[Constraint], eqs: &[Constraint], feas_tol: f64) -> bool {
    let n_slack = ineqs.len();
    let n_art = ineqs.iter().filter(|c| c.rhs < 0.0).count() + eqs.len();
    let n_cols = n_vars + n_slack + n_art;
    let rhs_col = n_cols;

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(ineqs.len() + eqs.len());
    let mut basis = Vec::with_capacity(rows.capacity());
    let mut next_art = n_vars + n_slack;

    for (s, c) in ineqs.iter().enumerate() {
        let mut row = vec![0.0; n_cols + 1];
        let sign = if c.rhs < 0.0 { -1.0 } else { 1.0 };
        for (j, &a) in c.coeffs.iter().enumerate() {
            row[j] = sign * a;
        }
        row[n_vars + s] = sign;
        row[rhs_col] = sign * c.rhs;
        if c.rhs < 0.0 {
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n_vars + s);
        }
        rows.push(row);
    }
    for c in eqs {
        let mut row = vec![0.0; n_cols + 1];
        let sign = if c.rhs < 0.0 { -1.0 } else { 1.0 };
        for (j, &a) in c.coeffs.iter().enumerate() {
            row[j] = sign * a;
        }
        row[rhs_col] = sign * c.rhs;
        row[next_art] = 1.0;
        basis.push(next_art);
        next_art += 1;
        rows.push(row);
    }

    // reduced costs of min Σ artificials
    let first_art = n_vars + n_slack;
    let mut obj = vec![0.0; n_cols + 1];
    obj[first_art..n_cols].fill(1.0);
    for (row, &b) in rows.iter().zip(&basis) {
        if b >= first_art {
            for (o, v) in obj.iter_mut().zip(row) {
                *o -= v;
            }
        }
    }

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..n_cols).find(|&j| obj[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for (r, row) in rows.iter().enumerate() {
            if row[enter] > PIVOT_EPS {
                let ratio = row[rhs_col] / row[enter];
                let better = match leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < best - PIVOT_EPS || (ratio <= best + PIVOT_EPS && basis[r] < basis[lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        // phase one is bounded below by zero, so an unbounded ray cannot occur
        let Some((r, _)) = leave else { break };
        pivot(&mut rows, &mut obj, r, enter);
        basis[r] = enter;
    }

    -obj[rhs_col] <= feas_tol
}

fn pivot(rows: &mut [Vec<f64>], obj: &mut [f64], r: usize, col: usize) {
    let p = rows[r][col];
    for v in rows[r].iter_mut() {
        *v /= p;
    }
    let pivot_row = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i != r {
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    let f = obj[col];
    if f != 0.0 {
        for (v, pv) in obj.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(coeffs: &[f64], rhs: f64) -> Constraint {
        Constraint {
            coeffs: coeffs.to_vec(),
            rhs,
        }
    }

    #[test]
    fn simplex_feasibility() {
        // x + y = 1, x ≤ 0.3, y ≤ 0.3 -> infeasible
        assert!(!feasible(2, &[c(&[1.0, 0.0], 0.3), c(&[0.0, 1.0], 0.3)], &[c(&[1.0, 1.0], 1.0)], 1e-12));
        // x + y = 1, x ≤ 0.6, y ≤ 0.6 -> feasible
        assert!(feasible(2, &[c(&[1.0, 0.0], 0.6), c(&[0.0, 1.0], 0.6)], &[c(&[1.0, 1.0], 1.0)], 1e-12));
        // x - y ≤ -2, x + y = 1 -> y ≥ 1.5 impossible with x ≥ 0
        assert!(!feasible(2, &[c(&[1.0, -1.0], -2.0)], &[c(&[1.0, 1.0], 1.0)], 1e-12));
        // -x ≤ -2 (x ≥ 2), x ≤ 3
        assert!(feasible(1, &[c(&[-1.0], -2.0), c(&[1.0], 3.0)], &[], 1e-12));
        assert!(!feasible(1, &[c(&[-1.0], -2.0), c(&[1.0], 1.0)], &[], 1e-12));
    }
}
