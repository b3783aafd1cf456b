//! Exact defining-set decisions by completion counting, plus the
//! smallest-defining-set optimizer.
//!
//! The decision procedure is backtracking over ordered 4-blocks: always
//! branch on the lexicographically least uncovered ordered pair, with
//! candidate blocks in lexicographic order, pruning any over-coverage.
//! The optimizer prunes candidate subsets with trade-graph vertex-cover
//! necessity: a defining set must contain an endpoint of every volume-2
//! trade in the design.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DesignParams, DirectedDesign, Exactness, FRatio, OrderedBlock};
use crate::trades::{self, BoundMode, TradeGraph};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A set of fixed blocks to be completed to a full design.
#[derive(Clone, Debug)]
pub struct PartialDesign {
    pub params: DesignParams,
    pub fixed: Vec<OrderedBlock>,
}

impl PartialDesign {
    pub fn new(params: DesignParams, fixed: Vec<OrderedBlock>) -> Result<Self> {
        let v = params.v;
        let mut hist = vec![0u32; (v * v) as usize];
        for b in &fixed {
            for (x, y) in b.ordered_pairs() {
                let cell = &mut hist[(x * v + y) as usize];
                *cell += 1;
                if *cell > params.lambda {
                    return Err(Error::OverCoveredPair(x, y));
                }
            }
        }
        Ok(PartialDesign { params, fixed })
    }
}

/// Completion count (saturating at the cap) and up to `cap` completions.
#[derive(Clone, Debug, Serialize)]
pub struct CompletionResult {
    pub count: u64,
    pub saturated: bool,
    pub completions: Vec<DirectedDesign>,
}

struct SearchState {
    v: u32,
    lambda: u32,
    covered: Vec<u32>,
    chosen: Vec<OrderedBlock>,
    uncovered: usize,
}

impl SearchState {
    fn place(&mut self, b: &OrderedBlock) {
        for (x, y) in b.ordered_pairs() {
            let cell = &mut self.covered[(x * self.v + y) as usize];
            *cell += 1;
            if *cell == self.lambda {
                self.uncovered -= 1;
            }
        }
        self.chosen.push(b.clone());
    }

    fn unplace(&mut self) {
        let b = self.chosen.pop().expect("non-empty");
        for (x, y) in b.ordered_pairs() {
            let cell = &mut self.covered[(x * self.v + y) as usize];
            if *cell == self.lambda {
                self.uncovered += 1;
            }
            *cell -= 1;
        }
    }

    fn first_uncovered(&self) -> Option<(u32, u32)> {
        let v = self.v;
        for x in 0..v {
            for y in 0..v {
                if x != y && self.covered[(x * v + y) as usize] < self.lambda {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Candidate blocks covering (x, y) without over-covering any pair,
    /// in lexicographic order.
    fn candidates(&self, x: u32, y: u32) -> Vec<OrderedBlock> {
        let v = self.v;
        let mut out = Vec::new();
        // positions of x and y among the four slots, x before y
        for xi in 0..4usize {
            for yi in xi + 1..4 {
                let mut others = Vec::with_capacity(2);
                for p in 0..v {
                    if p != x && p != y {
                        others.push(p);
                    }
                }
                for &a in &others {
                    for &b in &others {
                        if a == b {
                            continue;
                        }
                        let mut pts = [0u32; 4];
                        let mut rest = [a, b].into_iter();
                        for (slot, pt) in pts.iter_mut().enumerate() {
                            *pt = if slot == xi {
                                x
                            } else if slot == yi {
                                y
                            } else {
                                rest.next().unwrap()
                            };
                        }
                        if self.admits(&pts) {
                            out.push(OrderedBlock::new(pts.to_vec()).expect("distinct"));
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn admits(&self, pts: &[u32; 4]) -> bool {
        let v = self.v;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.covered[(pts[i] * v + pts[j]) as usize] >= self.lambda {
                    return false;
                }
            }
        }
        true
    }
}

fn count_rec(
    state: &mut SearchState,
    fixed: &[OrderedBlock],
    params: DesignParams,
    cap: Option<u64>,
    count: &mut u64,
    completions: &mut Vec<DirectedDesign>,
) {
    if let Some(cap) = cap {
        if *count >= cap {
            return;
        }
    }
    let Some((x, y)) = state.first_uncovered() else {
        *count += 1;
        let keep = cap.map_or(true, |c| (completions.len() as u64) < c);
        if keep {
            let mut blocks = fixed.to_vec();
            blocks.extend(state.chosen.iter().cloned());
            completions.push(DirectedDesign::new(params, blocks).expect("search keeps blocks valid"));
        }
        return;
    };
    for cand in state.candidates(x, y) {
        state.place(&cand);
        count_rec(state, fixed, params, cap, count, completions);
        state.unplace();
    }
}

/// Count the ways a partial design completes to a full 2-(v,k,lambda)DD,
/// saturating at `cap` (None counts exhaustively).
///
/// With the parallel feature the root branches run concurrently, each
/// capped independently; sub-cap counts are exact and at-cap results
/// saturate, so the returned decision is deterministic either way.
pub fn count_completions(p: &PartialDesign, cap: Option<u64>) -> Result<CompletionResult> {
    assert_eq!(p.params.k, 4, "completion search is specialized to k = 4");
    let v = p.params.v;
    let mut state = SearchState {
        v,
        lambda: p.params.lambda,
        covered: vec![0; (v * v) as usize],
        chosen: Vec::new(),
        uncovered: (v as usize) * (v as usize - 1),
    };
    for b in &p.fixed {
        for (x, y) in b.ordered_pairs() {
            let cell = &mut state.covered[(x * v + y) as usize];
            *cell += 1;
            if *cell > p.params.lambda {
                return Err(Error::OverCoveredPair(x, y));
            }
            if *cell == p.params.lambda {
                state.uncovered -= 1;
            }
        }
    }

    let Some((x, y)) = state.first_uncovered() else {
        // already complete
        let d = DirectedDesign::new(p.params, p.fixed.clone())?;
        return Ok(CompletionResult {
            count: 1,
            saturated: false,
            completions: vec![d],
        });
    };

    let roots = state.candidates(x, y);

    let run_branch = |cand: &OrderedBlock| {
        let mut st = SearchState {
            v,
            lambda: p.params.lambda,
            covered: state.covered.clone(),
            chosen: Vec::new(),
            uncovered: state.uncovered,
        };
        st.place(cand);
        let mut count = 0;
        let mut completions = Vec::new();
        count_rec(&mut st, &p.fixed, p.params, cap, &mut count, &mut completions);
        (count, completions)
    };

    #[cfg(feature = "parallel")]
    let branch_results: Vec<(u64, Vec<DirectedDesign>)> =
        roots.par_iter().map(run_branch).collect();
    #[cfg(not(feature = "parallel"))]
    let branch_results: Vec<(u64, Vec<DirectedDesign>)> = roots.iter().map(run_branch).collect();

    let mut count: u64 = 0;
    let mut completions = Vec::new();
    for (c, comps) in branch_results {
        count = count.saturating_add(c);
        completions.extend(comps);
    }
    let saturated = cap.is_some_and(|c| count >= c);
    if let Some(c) = cap {
        count = count.min(c);
        completions.truncate(c as usize);
    }
    Ok(CompletionResult {
        count,
        saturated,
        completions,
    })
}

/// True iff `subset` (given by block indices into `d`) completes uniquely,
/// i.e. only to `d` itself.
pub fn is_defining_set(d: &DirectedDesign, subset: &[usize]) -> Result<bool> {
    if let Some(&bad) = subset.iter().find(|&&i| i >= d.blocks.len()) {
        return Err(Error::NotASubset(vec![bad]));
    }
    let fixed: Vec<OrderedBlock> = subset.iter().map(|&i| d.blocks[i].clone()).collect();
    let p = PartialDesign::new(d.params, fixed)?;
    let res = count_completions(&p, Some(2))?;
    Ok(res.count == 1)
}

/// Result of the smallest-defining-set search.
#[derive(Clone, Debug, Serialize)]
pub struct SmallestDefiningSet {
    pub size: usize,
    /// Block indices of a minimum-cardinality defining set (lexicographically
    /// least among winners at that size).
    pub witness: Vec<usize>,
    /// True when all smaller cardinalities were refuted.
    pub optimal: bool,
}

/// Ascending-size search for a smallest defining set.
///
/// Sizes below the exact trade-graph vertex-cover bound are refuted without
/// search; at each remaining size, only vertex covers of the trade graph
/// are tested. Exceeding the budget returns the best known defining set
/// (the full block list if none smaller was found) with `optimal: false`.
pub fn smallest_defining_set(d: &DirectedDesign, budget: Duration) -> Result<SmallestDefiningSet> {
    let deadline = Instant::now() + budget;
    let graph = trades::build_trade_graph(d);
    let cert = trades::lower_bound(&graph, BoundMode::Exact);
    let b = d.blocks.len();

    for size in cert.bound..=b {
        let mut found: Option<Vec<usize>> = None;
        let mut timed_out = false;
        let mut subset = Vec::with_capacity(size);
        enumerate_covers(
            &graph,
            b,
            size,
            0,
            &mut subset,
            &mut |candidate: &[usize]| -> Result<bool> {
                if Instant::now() >= deadline {
                    timed_out = true;
                    return Ok(true); // stop
                }
                if is_defining_set(d, candidate)? {
                    found = Some(candidate.to_vec());
                    return Ok(true); // first hit is lexicographically least
                }
                Ok(false)
            },
        )?;
        if let Some(witness) = found {
            return Ok(SmallestDefiningSet {
                size,
                witness,
                optimal: !timed_out,
            });
        }
        if timed_out {
            return Ok(SmallestDefiningSet {
                size: b,
                witness: (0..b).collect(),
                optimal: false,
            });
        }
    }
    // full block set always defines the design
    Ok(SmallestDefiningSet {
        size: b,
        witness: (0..b).collect(),
        optimal: true,
    })
}

/// Enumerate size-`size` subsets of 0..n in lexicographic order, skipping
/// any that fail to cover some trade-graph edge, calling `visit` on each
/// survivor until it returns true.
fn enumerate_covers(
    graph: &TradeGraph,
    n: usize,
    size: usize,
    start: usize,
    subset: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    if subset.len() == size {
        let covers = graph
            .edges
            .iter()
            .all(|e| subset.contains(&e.a) || subset.contains(&e.b));
        if covers {
            return visit(subset);
        }
        return Ok(false);
    }
    let needed = size - subset.len();
    for i in start..n {
        if n - i < needed {
            break;
        }
        // prune: any edge with both endpoints already skipped can never be
        // covered by extending past it
        if graph
            .edges
            .iter()
            .any(|e| e.b < i && !subset.contains(&e.a) && !subset.contains(&e.b))
        {
            break;
        }
        subset.push(i);
        if enumerate_covers(graph, n, size, i + 1, subset, visit)? {
            subset.pop();
            return Ok(true);
        }
        subset.pop();
    }
    Ok(false)
}

/// f = (defining-set size or bound) / block count, as an exact rational.
pub fn f_ratio(d: &DirectedDesign, size: usize, proven_optimal: bool) -> FRatio {
    let exactness = if proven_optimal {
        Exactness::Exact
    } else {
        Exactness::LowerBound
    };
    FRatio::new(size as u64, d.blocks.len() as u64, exactness)
}
