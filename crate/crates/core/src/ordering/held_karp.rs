//! Exact shortest open path over a small node set by dynamic programming
//! over subsets.
//!
//! `g[S][e]` is the cheapest cost of leaving the start, visiting exactly
//! the nodes in `S` and ending at `e in S`. Subsets grow one node at a time;
//! the answer adds the terminal cost of the final node.

/// Largest node count accepted by [`shortest_open_path`].
pub const MAX_NODES: usize = 16;

/// Minimizes `start_cost(first) + sum edge(i, j) + end_cost(last)` over
/// all orders of `n` nodes. Returns the cost and the visiting order. Ties
/// resolve toward lower node indices.
pub fn shortest_open_path(
    n: usize,
    start_cost: impl Fn(usize) -> f64,
    edge: impl Fn(usize, usize) -> f64,
    end_cost: impl Fn(usize) -> f64,
) -> (f64, Vec<usize>) {
    assert!(n <= MAX_NODES, "held-karp limited to {MAX_NODES} nodes");
    if n == 0 {
        return (0.0, Vec::new());
    }
    let full = (1usize << n) - 1;
    let mut g = vec![f64::INFINITY; (full + 1) * n];
    let mut parent = vec![u8::MAX; (full + 1) * n];
    for e in 0..n {
        g[(1 << e) * n + e] = start_cost(e);
    }
    let edges: Vec<f64> = (0..n * n).map(|k| edge(k / n, k % n)).collect();

    for mask in 1..=full {
        for e in 0..n {
            if mask & (1 << e) == 0 {
                continue;
            }
            let here = g[mask * n + e];
            if !here.is_finite() {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = mask | (1 << k);
                let cand = here + edges[e * n + k];
                let slot = next * n + k;
                if cand < g[slot] {
                    g[slot] = cand;
                    parent[slot] = e as u8;
                }
            }
        }
    }

    let mut best = f64::INFINITY;
    let mut last = 0;
    for e in 0..n {
        let total = g[full * n + e] + end_cost(e);
        if total < best {
            best = total;
            last = e;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut e = last;
    loop {
        order.push(e);
        let p = parent[mask * n + e];
        mask &= !(1 << e);
        if p == u8::MAX {
            break;
        }
        e = p as usize;
    }
    order.reverse();
    (best, order)
}
