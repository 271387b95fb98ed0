//! Reference LP solver for the balanced transportation problem.
//!
//! This is a deliberately naive dense two-phase primal simplex over the full
//! transportation polytope:
//!
//! ```text
//! minimize    Σ_ij c[i][j] · x[i][j]
//! subject to  Σ_j x[i][j] = supply[i]   (every supply row)
//!             Σ_i x[i][j] = demand[j]   (every demand column)
//!             x ≥ 0
//! ```
//!
//! It shares no code, no graph structure, and no pivoting strategy with the
//! production solver it exists to check: the production side works on the
//! bipartite graph with tree bases, this one works on the explicit (m+n) ×
//! (m·n) tableau with artificial variables. Agreement between the two on
//! random instances is therefore meaningful evidence of correctness.
//!
//! Scope: small instances only (the cross-check suites stay at or below a
//! handful of tokens per document). Everything panics on abuse — this is
//! test code, not an API surface.

/// An optimal solution to a balanced transportation LP.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// Minimal total cost.
    pub objective: f64,
    /// Optimal flow, `flow[i][j]` from supply `i` to demand `j`.
    pub flow: Vec<Vec<f64>>,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

/// Solves the balanced transportation problem exactly.
///
/// Panics if the inputs are malformed (shape mismatch, negative entries,
/// unbalanced totals) or if the tableau fails to converge — either would be
/// a bug in the calling test, not a data condition.
pub fn solve_transport_lp(
    supplies: &[f64],
    demands: &[f64],
    costs: &[Vec<f64>],
) -> OracleSolution {
    let m = supplies.len();
    let n = demands.len();
    assert!(m > 0 && n > 0, "empty instance");
    assert_eq!(costs.len(), m, "cost row count");
    assert!(costs.iter().all(|row| row.len() == n), "cost column count");
    assert!(
        supplies.iter().chain(demands).all(|v| *v >= 0.0 && v.is_finite()),
        "marginals must be non-negative and finite"
    );
    let total_supply: f64 = supplies.iter().sum();
    let total_demand: f64 = demands.iter().sum();
    assert!(
        (total_supply - total_demand).abs() <= 1e-9 * (1.0 + total_supply.abs()),
        "unbalanced instance: supply {total_supply}, demand {total_demand}"
    );

    let rows = m + n;
    let reals = m * n; // x[i][j] lives at column i*n + j
    let cols = reals + rows + 1; // + artificials + rhs
    let rhs_col = cols - 1;

    // Constraint tableau with an identity over the artificial columns.
    let mut t = vec![vec![0.0f64; cols]; rows];
    for i in 0..m {
        for j in 0..n {
            t[i][i * n + j] = 1.0;
        }
        t[i][rhs_col] = supplies[i];
    }
    for j in 0..n {
        for i in 0..m {
            t[m + j][i * n + j] = 1.0;
        }
        t[m + j][rhs_col] = demands[j];
    }
    for r in 0..rows {
        t[r][reals + r] = 1.0;
    }
    let mut basis: Vec<usize> = (0..rows).map(|r| reals + r).collect();

    // Phase 1: minimize the artificial sum down to zero.
    let phase1_costs: Vec<f64> = (0..reals + rows)
        .map(|j| if j >= reals { 1.0 } else { 0.0 })
        .collect();
    run_simplex(&mut t, &mut basis, &phase1_costs, reals + rows, rhs_col);
    let infeasibility: f64 = basis
        .iter()
        .zip(&t)
        .filter(|(b, _)| **b >= reals)
        .map(|(_, row)| row[rhs_col])
        .sum();
    assert!(
        infeasibility <= 1e-8,
        "phase 1 left infeasibility {infeasibility}"
    );

    // Phase 2 over real variables only; artificial columns are barred from
    // entering, so any still-basic artificial stays parked at zero.
    let mut phase2_costs = vec![0.0f64; reals + rows];
    for i in 0..m {
        for j in 0..n {
            phase2_costs[i * n + j] = costs[i][j];
        }
    }
    run_simplex(&mut t, &mut basis, &phase2_costs, reals, rhs_col);

    let mut flow = vec![vec![0.0f64; n]; m];
    for (r, &b) in basis.iter().enumerate() {
        if b < reals {
            flow[b / n][b % n] = t[r][rhs_col].max(0.0);
        }
    }
    let objective = flow
        .iter()
        .zip(costs)
        .flat_map(|(fr, cr)| fr.iter().zip(cr).map(|(f, c)| f * c))
        .sum();
    OracleSolution { objective, flow }
}

/// Primal simplex with Bland's rule on an explicit tableau.
///
/// `enterable` is the number of leading columns allowed to enter the basis
/// (used to bar artificials in phase 2). The tableau keeps every basic
/// column as a unit vector; reduced costs are recomputed from scratch each
/// iteration, trading speed for obviousness.
fn run_simplex(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    costs: &[f64],
    enterable: usize,
    rhs_col: usize,
) {
    let rows = t.len();
    let scale = 1.0 + costs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    for _ in 0..MAX_PIVOTS {
        // Duals via the basic costs, then reduced costs column by column.
        // Bland: enter the smallest-index column with a negative reduced
        // cost, leave via the smallest-ratio row (ties to the smallest
        // basic-variable index). Bland's rule is what makes termination a
        // theorem rather than a hope on degenerate transportation bases.
        let mut entering = None;
        for j in 0..enterable {
            if basis.contains(&j) {
                continue;
            }
            let reduced = costs[j]
                - basis
                    .iter()
                    .zip(t.iter())
                    .map(|(&b, row)| costs[b] * row[j])
                    .sum::<f64>();
            if reduced < -COST_TOL * scale {
                entering = Some(j);
                break;
            }
        }
        let Some(entering) = entering else {
            return; // optimal
        };

        let mut leaving: Option<(usize, f64)> = None;
        for r in 0..rows {
            if t[r][entering] > PIVOT_TOL {
                let ratio = t[r][rhs_col] / t[r][entering];
                let better = match leaving {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < lratio - PIVOT_TOL
                            || (ratio <= lratio + PIVOT_TOL && basis[r] < basis[lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leaving else {
            panic!("unbounded transportation LP (impossible on a balanced instance)");
        };

        // Pivot: normalize the row, eliminate the column elsewhere.
        let pivot = t[pivot_row][entering];
        for v in t[pivot_row].iter_mut() {
            *v /= pivot;
        }
        let pivot_vals = t[pivot_row].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pivot_row {
                let factor = row[entering];
                if factor != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_vals).take(rhs_col + 1) {
                        *v -= factor * pv;
                    }
                }
            }
        }
        basis[pivot_row] = entering;
    }
    panic!("simplex failed to converge within {MAX_PIVOTS} pivots");
}

/// Asserts that `flow` reproduces the marginals within `tol`.
pub fn assert_feasible(flow: &[Vec<f64>], supplies: &[f64], demands: &[f64], tol: f64) {
    for (i, supply) in supplies.iter().enumerate() {
        let row_sum: f64 = flow[i].iter().sum();
        assert!(
            (row_sum - supply).abs() <= tol,
            "row {i} ships {row_sum}, supply is {supply}"
        );
    }
    for (j, demand) in demands.iter().enumerate() {
        let col_sum: f64 = flow.iter().map(|row| row[j]).sum();
        assert!(
            (col_sum - demand).abs() <= tol,
            "column {j} receives {col_sum}, demand is {demand}"
        );
    }
    assert!(
        flow.iter().flatten().all(|v| *v >= -tol),
        "negative flow entry"
    );
}
