//! Directed trades, the volume-2 trade graph of a design, and certified
//! defining-set lower bounds derived from its structure.
//!
//! The bound logic follows the hand technique used for the catalog designs:
//! vertex-disjoint cycle components of the trade graph force ceil(s/2)
//! blocks each, and a maximum matching on the rest forces one block per
//! edge. Exact mode replaces the decomposition by a branch-and-bound
//! minimum vertex cover.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::model::{DirectedDesign, OrderedBlock};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Two disjoint block collections of equal volume with identical
/// ordered-pair coverage.
#[derive(Clone, Debug, Serialize)]
pub struct DirectedTrade {
    pub t1: Vec<OrderedBlock>,
    pub t2: Vec<OrderedBlock>,
}

/// True iff the collections are disjoint, equally sized, and cover every
/// ordered pair equally often.
pub fn is_directed_trade(t1: &[OrderedBlock], t2: &[OrderedBlock]) -> bool {
    if t1.len() != t2.len() || t1.is_empty() {
        return false;
    }
    for b in t1 {
        if t2.contains(b) {
            return false;
        }
    }
    coverage(t1) == coverage(t2)
}

fn coverage(blocks: &[OrderedBlock]) -> Vec<(u32, u32)> {
    let mut pairs: Vec<(u32, u32)> = blocks.iter().flat_map(|b| b.ordered_pairs()).collect();
    pairs.sort_unstable();
    pairs
}

/// Exhaustive search for a negative side making {b1, b2} the positive side
/// of a volume-2 trade. All splits of the combined point multiset into two
/// ordered 4-blocks are tried; the first witness in enumeration order is
/// returned. The trade's points cannot leave the union of T1's points, so
/// this search is complete.
pub fn volume2_witness(b1: &OrderedBlock, b2: &OrderedBlock) -> Option<[OrderedBlock; 2]> {
    if b1 == b2 {
        return None;
    }
    let want = coverage(std::slice::from_ref(b1))
        .into_iter()
        .chain(coverage(std::slice::from_ref(b2)))
        .collect::<Vec<_>>();
    let mut want = want;
    want.sort_unstable();

    let mut pool: Vec<u32> = Vec::with_capacity(8);
    pool.extend_from_slice(b1.points());
    pool.extend_from_slice(b2.points());
    pool.sort_unstable();

    // splits: position 0 always goes to the first side, halving the symmetry
    for mask in 0u32..(1 << 7) {
        let mask = (mask << 1) | 1;
        if mask.count_ones() != 4 {
            continue;
        }
        let mut left = [0u32; 4];
        let mut right = [0u32; 4];
        let (mut li, mut ri) = (0, 0);
        for (pos, &p) in pool.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                left[li] = p;
                li += 1;
            } else {
                right[ri] = p;
                ri += 1;
            }
        }
        if has_dup(&left) || has_dup(&right) {
            continue;
        }
        for lp in permutations(&left) {
            // early prune: the left block's pairs must occur in the target
            if !sub_multiset(&pairs_of(&lp), &want) {
                continue;
            }
            for rp in permutations(&right) {
                let mut got: Vec<(u32, u32)> =
                    pairs_of(&lp).into_iter().chain(pairs_of(&rp)).collect();
                got.sort_unstable();
                if got != want {
                    continue;
                }
                let c1 = OrderedBlock::new(lp.to_vec()).expect("distinct");
                let c2 = OrderedBlock::new(rp.to_vec()).expect("distinct");
                if &c1 == b1 || &c1 == b2 || &c2 == b1 || &c2 == b2 || c1 == c2 {
                    continue;
                }
                return if c1 <= c2 {
                    Some([c1, c2])
                } else {
                    Some([c2, c1])
                };
            }
        }
    }
    None
}

fn has_dup(pts: &[u32; 4]) -> bool {
    (0..4).any(|i| (i + 1..4).any(|j| pts[i] == pts[j]))
}

fn pairs_of(pts: &[u32; 4]) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            out.push((pts[i], pts[j]));
        }
    }
    out
}

fn sub_multiset(sub: &[(u32, u32)], sup: &[(u32, u32)]) -> bool {
    // sup is sorted; sub is small (6 entries)
    let mut used = vec![false; sup.len()];
    'outer: for p in sub {
        for (i, q) in sup.iter().enumerate() {
            if !used[i] && p == q {
                used[i] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn permutations(pts: &[u32; 4]) -> Vec<[u32; 4]> {
    // all 24 orderings, lexicographic by index pattern
    const IDX: [[usize; 4]; 24] = [
        [0, 1, 2, 3],
        [0, 1, 3, 2],
        [0, 2, 1, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
        [0, 3, 2, 1],
        [1, 0, 2, 3],
        [1, 0, 3, 2],
        [1, 2, 0, 3],
        [1, 2, 3, 0],
        [1, 3, 0, 2],
        [1, 3, 2, 0],
        [2, 0, 1, 3],
        [2, 0, 3, 1],
        [2, 1, 0, 3],
        [2, 1, 3, 0],
        [2, 3, 0, 1],
        [2, 3, 1, 0],
        [3, 0, 1, 2],
        [3, 0, 2, 1],
        [3, 1, 0, 2],
        [3, 1, 2, 0],
        [3, 2, 0, 1],
        [3, 2, 1, 0],
    ];
    IDX.iter()
        .map(|idx| [pts[idx[0]], pts[idx[1]], pts[idx[2]], pts[idx[3]]])
        .collect()
}

/// The volume-2 trade graph of a design: vertices are block indices, edges
/// are block pairs admitting a volume-2 trade, each carrying its witness.
#[derive(Clone, Debug, Serialize)]
pub struct TradeGraph {
    pub n: usize,
    /// Edges (i, j) with i < j, sorted, with their witnesses.
    pub edges: Vec<TradeEdge>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TradeEdge {
    pub a: usize,
    pub b: usize,
    pub witness: [OrderedBlock; 2],
}

impl TradeGraph {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().any(|e| e.a == a && e.b == b)
    }
}

/// O(b^2) scan over block pairs for volume-2 witnesses. The scan is data
/// parallel; edges are merged back in index order so the result is
/// deterministic either way.
pub fn build_trade_graph(d: &DirectedDesign) -> TradeGraph {
    let pairs: Vec<(usize, usize)> = (0..d.blocks.len())
        .flat_map(|i| (i + 1..d.blocks.len()).map(move |j| (i, j)))
        .collect();

    #[cfg(feature = "parallel")]
    let edges: Vec<TradeEdge> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            volume2_witness(&d.blocks[i], &d.blocks[j]).map(|witness| TradeEdge {
                a: i,
                b: j,
                witness,
            })
        })
        .collect();

    #[cfg(not(feature = "parallel"))]
    let edges: Vec<TradeEdge> = pairs
        .iter()
        .filter_map(|&(i, j)| {
            volume2_witness(&d.blocks[i], &d.blocks[j]).map(|witness| TradeEdge {
                a: i,
                b: j,
                witness,
            })
        })
        .collect();

    TradeGraph {
        n: d.blocks.len(),
        edges,
    }
}

/// Sequential reference scan, kept public for the benchmark suite and for
/// differential tests against the parallel path.
pub fn build_trade_graph_seq(d: &DirectedDesign) -> TradeGraph {
    let mut edges = Vec::new();
    for i in 0..d.blocks.len() {
        for j in i + 1..d.blocks.len() {
            if let Some(witness) = volume2_witness(&d.blocks[i], &d.blocks[j]) {
                edges.push(TradeEdge {
                    a: i,
                    b: j,
                    witness,
                });
            }
        }
    }
    TradeGraph {
        n: d.blocks.len(),
        edges,
    }
}

/// Connected components of the trade graph that are single cycles of
/// length >= 3 (every vertex of the component has degree exactly 2).
/// Returned as block-index sequences in traversal order from the smallest
/// vertex, smaller neighbor first.
pub fn cyclical_trade_components(g: &TradeGraph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n];
    let mut cycles = Vec::new();
    for start in 0..g.n {
        if seen[start] || adj[start].is_empty() {
            continue;
        }
        // walk the component
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if comp.len() < 3 || comp.iter().any(|&u| adj[u].len() != 2) {
            continue;
        }
        // single cycle: traverse from the smallest vertex toward its
        // smaller neighbor
        let first = *comp.iter().min().unwrap();
        let mut cycle = vec![first];
        let mut prev = first;
        let mut cur = *adj[first].iter().min().unwrap();
        while cur != first {
            cycle.push(cur);
            let next = adj[cur]
                .iter()
                .copied()
                .find(|&w| w != prev)
                .expect("degree 2");
            prev = cur;
            cur = next;
        }
        if cycle.len() == comp.len() {
            cycles.push(cycle);
        }
    }
    cycles
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundMethod {
    Matching,
    CycleCover,
    ExactVertexCover,
}

/// Machine-checkable evidence for a defining-set lower bound.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCertificate {
    pub method: BoundMethod,
    /// Pairwise vertex-disjoint trade edges, each forcing one block.
    pub matching: Vec<(usize, usize)>,
    /// Vertex-disjoint cycle components, each forcing ceil(len/2) blocks.
    pub cycles: Vec<Vec<usize>>,
    /// Minimum vertex cover witness (exact mode only).
    pub cover: Option<Vec<usize>>,
    pub bound: usize,
    /// Set when exact mode fell back to the structural bound.
    pub note: Option<String>,
}

/// Size cap for the exact vertex-cover search.
pub const EXACT_VERTEX_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    Structural,
    Exact,
}

/// Defining-set lower bound from trade structure.
///
/// Structural mode removes cycle components first (ceil(s/2) each), then
/// takes a maximum matching on the remaining vertices. Exact mode computes
/// a minimum vertex cover of the whole graph by branch and bound, falling
/// back to structural with a note above [`EXACT_VERTEX_LIMIT`] vertices.
pub fn lower_bound(g: &TradeGraph, mode: BoundMode) -> BoundCertificate {
    let cycles = cyclical_trade_components(g);
    let in_cycle: BTreeSet<usize> = cycles.iter().flatten().copied().collect();

    // matching on everything outside the cycle components
    let rest_edges: Vec<(usize, usize)> = g
        .edges
        .iter()
        .filter(|e| !in_cycle.contains(&e.a) && !in_cycle.contains(&e.b))
        .map(|e| (e.a, e.b))
        .collect();
    let matching = maximum_matching(g.n, &rest_edges);
    let structural: usize =
        matching.len() + cycles.iter().map(|c| c.len().div_ceil(2)).sum::<usize>();

    match mode {
        BoundMode::Structural => {
            let method = if cycles.is_empty() {
                BoundMethod::Matching
            } else {
                BoundMethod::CycleCover
            };
            BoundCertificate {
                method,
                matching,
                cycles,
                cover: None,
                bound: structural,
                note: None,
            }
        }
        BoundMode::Exact => {
            let active: BTreeSet<usize> = g.edges.iter().flat_map(|e| [e.a, e.b]).collect();
            if active.len() > EXACT_VERTEX_LIMIT {
                return BoundCertificate {
                    method: if cycles.is_empty() {
                        BoundMethod::Matching
                    } else {
                        BoundMethod::CycleCover
                    },
                    matching,
                    cycles,
                    cover: None,
                    bound: structural,
                    note: Some(format!(
                        "graph has {} active vertices (> {EXACT_VERTEX_LIMIT}); structural bound reported",
                        active.len()
                    )),
                };
            }
            let all_edges: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.a, e.b)).collect();
            let cover = minimum_vertex_cover(g.n, &all_edges);
            BoundCertificate {
                method: BoundMethod::ExactVertexCover,
                matching,
                cycles,
                bound: cover.len(),
                cover: Some(cover),
                note: None,
            }
        }
    }
}

/// Exact maximum matching on a general graph (blossom algorithm, O(V^3)).
/// Vertices are tried as augmenting-path roots in index order, so the
/// returned matching is deterministic.
pub fn maximum_matching(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }

    const NONE: usize = usize::MAX;
    let mut mate = vec![NONE; n];
    for root in 0..n {
        if mate[root] != NONE || adj[root].is_empty() {
            continue;
        }
        blossom_augment(root, &adj, &mut mate);
    }

    let mut matching: Vec<(usize, usize)> = (0..n)
        .filter(|&v| mate[v] != usize::MAX && v < mate[v])
        .map(|v| (v, mate[v]))
        .collect();
    matching.sort_unstable();
    matching
}

/// One phase of the blossom algorithm: BFS for an augmenting path from
/// `root`, contracting odd cycles as they appear.
fn blossom_augment(root: usize, adj: &[Vec<usize>], mate: &mut [usize]) -> bool {
    const NONE: usize = usize::MAX;
    let n = adj.len();
    let mut used = vec![false; n];
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut queue = std::collections::VecDeque::new();
    used[root] = true;
    queue.push_back(root);

    let lca = |a: usize, b: usize, base: &[usize], parent: &[usize], mate: &[usize]| {
        let mut on_path = vec![false; n];
        let mut x = a;
        loop {
            x = base[x];
            on_path[x] = true;
            if mate[x] == NONE {
                break;
            }
            x = parent[mate[x]];
        }
        let mut y = b;
        loop {
            y = base[y];
            if on_path[y] {
                return y;
            }
            y = parent[mate[y]];
        }
    };

    fn mark_path(
        mut v: usize,
        b: usize,
        mut child: usize,
        blossom: &mut [bool],
        base: &[usize],
        parent: &mut [usize],
        mate: &[usize],
    ) {
        while base[v] != b {
            blossom[base[v]] = true;
            blossom[base[mate[v]]] = true;
            parent[v] = child;
            child = mate[v];
            v = parent[mate[v]];
        }
    }

    while let Some(v) = queue.pop_front() {
        for &to in &adj[v] {
            if base[v] == base[to] || mate[v] == to {
                continue;
            }
            if to == root || (mate[to] != NONE && parent[mate[to]] != NONE) {
                // odd cycle: contract the blossom to its base
                let cur_base = lca(v, to, &base, &parent, mate);
                let mut blossom = vec![false; n];
                mark_path(v, cur_base, to, &mut blossom, &base, &mut parent, mate);
                mark_path(to, cur_base, v, &mut blossom, &base, &mut parent, mate);
                for i in 0..n {
                    if blossom[base[i]] {
                        base[i] = cur_base;
                        if !used[i] {
                            used[i] = true;
                            queue.push_back(i);
                        }
                    }
                }
            } else if parent[to] == NONE {
                parent[to] = v;
                if mate[to] == NONE {
                    // augment along the alternating path back to the root
                    let mut x = to;
                    while x != NONE {
                        let pv = parent[x];
                        let next = mate[pv];
                        mate[x] = pv;
                        mate[pv] = x;
                        x = next;
                    }
                    return true;
                }
                used[mate[to]] = true;
                queue.push_back(mate[to]);
            }
        }
    }
    false
}

/// Exact minimum vertex cover by branch and bound: branch on a maximum
/// degree vertex (take it, or take all its neighbors), pruning with a
/// greedy matching lower bound.
pub fn minimum_vertex_cover(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    let mut cur: Vec<usize> = Vec::new();
    let edges: Vec<(usize, usize)> = edges.to_vec();
    vc_rec(n, &edges, &mut cur, &mut best);
    let mut cover = best.unwrap_or_default();
    cover.sort_unstable();
    cover
}

fn vc_rec(
    n: usize,
    edges: &[(usize, usize)],
    cur: &mut Vec<usize>,
    best: &mut Option<Vec<usize>>,
) {
    // greedy matching on remaining edges: lower bound on further cover size
    let mut used = vec![false; n];
    let mut lb = 0;
    let mut remaining: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in edges {
        if cur.contains(&a) || cur.contains(&b) {
            continue;
        }
        remaining.push((a, b));
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            lb += 1;
        }
    }
    if let Some(b) = best {
        if cur.len() + lb >= b.len() {
            return;
        }
    }
    if remaining.is_empty() {
        *best = Some(cur.clone());
        return;
    }
    // degree-1 reduction: cover a pendant edge by its other endpoint
    let mut degree = vec![0usize; n];
    for &(a, b) in &remaining {
        degree[a] += 1;
        degree[b] += 1;
    }
    if let Some(&(a, b)) = remaining
        .iter()
        .find(|&&(a, b)| degree[a] == 1 || degree[b] == 1)
    {
        let take = if degree[a] == 1 { b } else { a };
        cur.push(take);
        vc_rec(n, edges, cur, best);
        cur.pop();
        return;
    }
    let u = (0..n).max_by_key(|&v| degree[v]).unwrap();
    // branch 1: u in the cover
    cur.push(u);
    vc_rec(n, edges, cur, best);
    cur.pop();
    // branch 2: all neighbors of u in the cover
    let nbrs: Vec<usize> = remaining
        .iter()
        .filter_map(|&(a, b)| {
            if a == u {
                Some(b)
            } else if b == u {
                Some(a)
            } else {
                None
            }
        })
        .collect();
    let before = cur.len();
    for w in nbrs {
        if !cur.contains(&w) {
            cur.push(w);
        }
    }
    vc_rec(n, edges, cur, best);
    cur.truncate(before);
}

/// Re-check a certificate against the graph it came from.
pub fn check_certificate(g: &TradeGraph, cert: &BoundCertificate) -> bool {
    // matching edges must exist and be pairwise vertex-disjoint
    let mut touched = BTreeSet::new();
    for &(a, b) in &cert.matching {
        if !g.has_edge(a, b) || !touched.insert(a) || !touched.insert(b) {
            return false;
        }
    }
    // cycles must be real cycles, vertex-disjoint from everything else
    for cyc in &cert.cycles {
        if cyc.len() < 3 {
            return false;
        }
        for i in 0..cyc.len() {
            if !g.has_edge(cyc[i], cyc[(i + 1) % cyc.len()]) {
                return false;
            }
            if !touched.insert(cyc[i]) {
                return false;
            }
        }
    }
    match cert.method {
        BoundMethod::Matching | BoundMethod::CycleCover => {
            let want: usize = cert.matching.len()
                + cert.cycles.iter().map(|c| c.len().div_ceil(2)).sum::<usize>();
            cert.bound == want
        }
        BoundMethod::ExactVertexCover => {
            let Some(cover) = &cert.cover else {
                return false;
            };
            let covered = |a: usize, b: usize| cover.contains(&a) || cover.contains(&b);
            g.edges.iter().all(|e| covered(e.a, e.b)) && cert.bound == cover.len()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::block;

    #[test]
    fn known_trade_is_a_trade() {
        let t1 = vec![block([0, 1, 3, 2]), block([4, 5, 1, 0])];
        let t2 = vec![block([1, 0, 3, 2]), block([4, 5, 0, 1])];
        assert!(is_directed_trade(&t1, &t2));
    }

    #[test]
    fn non_disjoint_is_not_a_trade() {
        let t = vec![block([0, 1, 3, 2])];
        assert!(!is_directed_trade(&t, &t));
    }

    #[test]
    fn coverage_mismatch_is_not_a_trade() {
        let t1 = vec![block([0, 1, 3, 2]), block([4, 5, 1, 0])];
        let t2 = vec![block([1, 0, 3, 2]), block([4, 0, 5, 1])];
        assert!(!is_directed_trade(&t1, &t2));
    }

    #[test]
    fn witness_for_known_pair() {
        let w = volume2_witness(&block([0, 1, 3, 2]), &block([4, 5, 1, 0])).unwrap();
        assert!(is_directed_trade(
            &[block([0, 1, 3, 2]), block([4, 5, 1, 0])],
            &w.clone(),
        ));
    }

    #[test]
    fn disjoint_point_sets_have_no_witness() {
        assert!(volume2_witness(&block([0, 1, 2, 3]), &block([4, 5, 6, 7])).is_none());
    }

    #[test]
    fn matching_and_cycle_bounds() {
        // triangle + disjoint edge: bound 2 + 1
        let g = TradeGraph {
            n: 5,
            edges: vec![
                edge(0, 1),
                edge(1, 2),
                edge(0, 2),
                edge(3, 4),
            ],
        };
        let cycles = cyclical_trade_components(&g);
        assert_eq!(cycles, vec![vec![0, 1, 2]]);
        let cert = lower_bound(&g, BoundMode::Structural);
        assert_eq!(cert.bound, 3);
        assert!(check_certificate(&g, &cert));
        let exact = lower_bound(&g, BoundMode::Exact);
        assert_eq!(exact.bound, 3);
        assert!(check_certificate(&g, &exact));
    }

    fn edge(a: usize, b: usize) -> TradeEdge {
        TradeEdge {
            a,
            b,
            witness: [block([0, 1, 2, 3]), block([4, 5, 6, 7])],
        }
    }

    #[test]
    fn vertex_cover_of_path() {
        // path of 4 vertices needs cover of 2... actually path 0-1-2-3: cover {1,2}
        let cover = minimum_vertex_cover(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(cover.len(), 2);
    }
}
