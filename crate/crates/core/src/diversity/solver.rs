//! Exact minimum-cost transportation and Word Mover's Distance.
//!
//! The solver is a network simplex specialized to the dense bipartite
//! transportation graph: supply nodes are the first document's tokens, demand
//! nodes the second's, and every (supply, demand) pair is an arc whose cost
//! is the ground distance between the two token vectors. A basis is a
//! spanning tree of `m + n − 1` arcs; pivoting follows Bland's rule
//! (smallest-index entering arc, smallest-index leaving arc among ties), which
//! makes the run deterministic and cycle-free. The result is the exact
//! optimum, not an approximation.

use rayon::prelude::*;

use super::embeddings::EmbeddingStore;
use super::nbow::NBowDocument;
use super::DiversityError;

/// Hard cap on simplex pivots. Bland's rule guarantees termination, so
/// hitting this cap signals a bug (or non-finite costs), not a hard instance.
pub const MAX_SOLVER_ITERATIONS: usize = 1_000_000;

/// Ground distance between two embedding vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundMetric {
    /// Straight-line distance; the default, and the only metric under which
    /// the transport distance is itself a metric on documents.
    Euclidean,
    /// `1 − cosine similarity`, in `[0, 2]`. Not a metric (the triangle
    /// inequality can fail), so it is offered for exploration only and is
    /// excluded from the metric-axiom guarantees.
    Cosine,
}

impl GroundMetric {
    /// Distance between two equal-length vectors.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            GroundMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            GroundMetric::Cosine => {
                let mut dot = 0.0;
                let mut na = 0.0;
                let mut nb = 0.0;
                for (x, y) in a.iter().zip(b) {
                    dot += x * y;
                    na += x * x;
                    nb += y * y;
                }
                if na == 0.0 || nb == 0.0 {
                    // A zero vector has no direction; treat it as maximally
                    // dissimilar to everything, itself included.
                    return 1.0;
                }
                (1.0 - dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 2.0)
            }
        }
    }
}

/// An optimal solution to a transportation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// Dense `|A| × |B|` flow matrix; row sums reproduce A's weights and
    /// column sums B's weights, each within 1e-9.
    pub flow: Vec<Vec<f64>>,
    /// Total cost `Σ flow[i][j] · cost[i][j]` of the plan.
    pub objective: f64,
}

impl TransportPlan {
    /// Maximum absolute deviation of the plan's marginals from the given
    /// supply/demand targets — a feasibility check for tests and audits.
    pub fn marginal_error(&self, supplies: &[f64], demands: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (i, &s) in supplies.iter().enumerate() {
            let row_sum: f64 = self.flow[i].iter().sum();
            worst = worst.max((row_sum - s).abs());
        }
        for (j, &d) in demands.iter().enumerate() {
            let col_sum: f64 = self.flow.iter().map(|row| row[j]).sum();
            worst = worst.max((col_sum - d).abs());
        }
        worst
    }
}

/// Word Mover's Distance between two documents with the Euclidean ground
/// metric: the minimum total cost of transporting `a`'s token weights onto
/// `b`'s, where moving weight between two tokens costs the distance between
/// their embedding vectors. Returns the distance and the attaining plan.
pub fn wmd(
    a: &NBowDocument,
    b: &NBowDocument,
    store: &EmbeddingStore,
) -> Result<(f64, TransportPlan), DiversityError> {
    wmd_with_metric(a, b, store, GroundMetric::Euclidean)
}

/// [`wmd`] with an explicit ground metric.
pub fn wmd_with_metric(
    a: &NBowDocument,
    b: &NBowDocument,
    store: &EmbeddingStore,
    metric: GroundMetric,
) -> Result<(f64, TransportPlan), DiversityError> {
    if a == b {
        // Identity transport: leaving every weight in place is feasible and
        // costs exactly zero, which no plan can beat.
        let k = a.len();
        let mut flow = vec![vec![0.0; k]; k];
        for (i, &w) in a.weights().iter().enumerate() {
            flow[i][i] = w;
        }
        return Ok((0.0, TransportPlan { flow, objective: 0.0 }));
    }
    let va = document_vectors(a, store)?;
    let vb = document_vectors(b, store)?;
    let mut cost = Vec::with_capacity(va.len());
    for x in &va {
        let row: Vec<f64> = vb.iter().map(|y| metric.distance(x, y)).collect();
        if let Some(bad) = row.iter().find(|c| !c.is_finite()) {
            return Err(DiversityError::SolverFailure {
                detail: format!("non-finite ground cost {bad}"),
            });
        }
        cost.push(row);
    }
    let (flow, objective) = solve_transport(a.weights(), b.weights(), &cost)?;
    Ok((objective, TransportPlan { flow, objective }))
}

/// Pairwise distance matrix: element `[i][j]` is `wmd(docs_a[i], docs_b[j])`.
/// Rows are computed in parallel; the result (and, on failure, which error
/// surfaces) is deterministic in the input order.
pub fn wmd_matrix(
    docs_a: &[NBowDocument],
    docs_b: &[NBowDocument],
    store: &EmbeddingStore,
) -> Result<Vec<Vec<f64>>, DiversityError> {
    let rows: Vec<Result<Vec<f64>, DiversityError>> = docs_a
        .par_iter()
        .enumerate()
        .map(|(i, da)| {
            docs_b
                .iter()
                .enumerate()
                .map(|(j, db)| {
                    wmd(da, db, store)
                        .map(|(distance, _)| distance)
                        .map_err(|e| DiversityError::Pair {
                            row: i,
                            col: j,
                            source: Box::new(e),
                        })
                })
                .collect()
        })
        .collect();
    rows.into_iter().collect()
}

/// Looks up every token's vector, in document order.
fn document_vectors<'s>(
    doc: &NBowDocument,
    store: &'s EmbeddingStore,
) -> Result<Vec<&'s [f64]>, DiversityError> {
    doc.tokens()
        .iter()
        .map(|token| {
            store.get(token).ok_or_else(|| DiversityError::TokenMissing {
                token: token.clone(),
            })
        })
        .collect()
}

/// A basic (spanning-tree) arc of the transportation graph.
#[derive(Debug, Clone, Copy)]
struct BasicArc {
    row: usize,
    col: usize,
    flow: f64,
}

/// Solves the balanced transportation problem
/// `min Σ flow[i][j]·cost[i][j]` subject to `Σ_j flow[i][j] = supplies[i]`,
/// `Σ_i flow[i][j] = demands[j]`, `flow ≥ 0`, to optimality.
///
/// `supplies` and `demands` must be strictly positive and share the same
/// total (within ~1e-9, as nBOW weights do). Returns the dense flow matrix
/// and the objective value.
pub fn solve_transport(
    supplies: &[f64],
    demands: &[f64],
    cost: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, f64), DiversityError> {
    let m = supplies.len();
    let n = demands.len();
    assert!(m > 0 && n > 0, "transportation needs nonempty marginals");
    assert_eq!(cost.len(), m, "cost matrix must have one row per supply");
    assert!(
        cost.iter().all(|row| row.len() == n),
        "cost matrix must have one column per demand"
    );

    let max_cost = cost
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &c| acc.max(c.abs()));
    // Reduced costs are differences of sums of a few arc costs, so their
    // rounding noise scales with the cost magnitude; below this threshold an
    // apparent improvement is indistinguishable from that noise.
    let tol = 1e-11 * (1.0 + max_cost);

    // Northwest-corner initial basis: walk a monotone staircase from (0,0)
    // to (m−1,n−1), shipping as much as possible at each cell. Moving only
    // right or down visits exactly (m−1)+(n−1)+1 = m+n−1 cells, zero-flow
    // (degenerate) cells included, which is precisely a spanning tree.
    let mut remaining_supply = supplies.to_vec();
    let mut remaining_demand = demands.to_vec();
    let mut basis: Vec<BasicArc> = Vec::with_capacity(m + n - 1);
    let mut in_basis = vec![false; m * n];
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let shipped = remaining_supply[i].min(remaining_demand[j]).max(0.0);
        basis.push(BasicArc {
            row: i,
            col: j,
            flow: shipped,
        });
        in_basis[i * n + j] = true;
        remaining_supply[i] -= shipped;
        remaining_demand[j] -= shipped;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i < m - 1 && (remaining_supply[i] <= remaining_demand[j] || j == n - 1) {
            i += 1;
        } else {
            j += 1;
        }
    }
    debug_assert_eq!(basis.len(), m + n - 1);

    let nodes = m + n; // rows are nodes 0..m, columns are nodes m..m+n
    for iteration in 0..=MAX_SOLVER_ITERATIONS {
        if iteration == MAX_SOLVER_ITERATIONS {
            return Err(DiversityError::SolverFailure {
                detail: format!("no convergence within {MAX_SOLVER_ITERATIONS} pivots"),
            });
        }

        // Adjacency of the basis tree: node → indices into `basis`.
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        for (arc_idx, arc) in basis.iter().enumerate() {
            adjacency[arc.row].push(arc_idx);
            adjacency[m + arc.col].push(arc_idx);
        }

        // Dual potentials from the complementary-slackness equations
        // u[i] + v[j] = cost[i][j] on basic arcs, anchored at u[0] = 0 and
        // propagated over the tree.
        let mut u = vec![0.0f64; m];
        let mut v = vec![0.0f64; n];
        let mut known = vec![false; nodes];
        known[0] = true;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            for &arc_idx in &adjacency[node] {
                let arc = basis[arc_idx];
                let other = if node < m { m + arc.col } else { arc.row };
                if known[other] {
                    continue;
                }
                known[other] = true;
                if other >= m {
                    v[arc.col] = cost[arc.row][arc.col] - u[arc.row];
                } else {
                    u[arc.row] = cost[arc.row][arc.col] - v[arc.col];
                }
                stack.push(other);
            }
        }
        if known.iter().any(|k| !k) {
            return Err(DiversityError::SolverFailure {
                detail: "basis lost the spanning-tree property".into(),
            });
        }

        // Entering arc: Bland's rule, the smallest-index non-basic arc whose
        // reduced cost is meaningfully negative.
        let mut entering: Option<(usize, usize)> = None;
        'scan: for row in 0..m {
            for col in 0..n {
                if in_basis[row * n + col] {
                    continue;
                }
                if cost[row][col] - u[row] - v[col] < -tol {
                    entering = Some((row, col));
                    break 'scan;
                }
            }
        }
        let Some((enter_row, enter_col)) = entering else {
            break; // optimal: no arc prices in below the dual potentials
        };

        // Adding the entering arc closes exactly one cycle: the tree path
        // from its row node to its column node. Recover that path by BFS.
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; nodes]; // (arc, from-node)
        let mut visited = vec![false; nodes];
        visited[enter_row] = true;
        let mut queue = std::collections::VecDeque::from([enter_row]);
        let target = m + enter_col;
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &arc_idx in &adjacency[node] {
                let arc = basis[arc_idx];
                let other = if node < m { m + arc.col } else { arc.row };
                if visited[other] {
                    continue;
                }
                visited[other] = true;
                parent[other] = Some((arc_idx, node));
                queue.push_back(other);
            }
        }
        // Path arcs ordered from the column end back toward the row end.
        let mut path: Vec<usize> = Vec::new();
        let mut node = target;
        while node != enter_row {
            let (arc_idx, from) = parent[node].ok_or_else(|| DiversityError::SolverFailure {
                detail: "entering arc closes no cycle".into(),
            })?;
            path.push(arc_idx);
            node = from;
        }

        // Around the cycle, flow changes alternate sign starting with +θ on
        // the entering arc. The path is ordered from the arc sharing the
        // entering arc's column, so even positions lose flow, odd gain.
        let mut theta = f64::INFINITY;
        let mut leaving: Option<usize> = None;
        let mut leaving_key = usize::MAX;
        for (pos, &arc_idx) in path.iter().enumerate() {
            if pos % 2 != 0 {
                continue;
            }
            let arc = basis[arc_idx];
            let key = arc.row * n + arc.col;
            if arc.flow < theta || (arc.flow == theta && key < leaving_key) {
                theta = arc.flow;
                leaving = Some(arc_idx);
                leaving_key = key;
            }
        }
        let leaving = leaving.expect("cycle always has a flow-losing arc");
        let theta = theta.max(0.0);

        for (pos, &arc_idx) in path.iter().enumerate() {
            if pos % 2 == 0 {
                basis[arc_idx].flow = (basis[arc_idx].flow - theta).max(0.0);
            } else {
                basis[arc_idx].flow += theta;
            }
        }
        let departed = basis[leaving];
        in_basis[departed.row * n + departed.col] = false;
        in_basis[enter_row * n + enter_col] = true;
        basis[leaving] = BasicArc {
            row: enter_row,
            col: enter_col,
            flow: theta,
        };
    }

    let mut flow = vec![vec![0.0; n]; m];
    let mut objective = 0.0;
    for arc in &basis {
        flow[arc.row][arc.col] = arc.flow;
        objective += arc.flow * cost[arc.row][arc.col];
    }
    Ok((flow, objective))
}
