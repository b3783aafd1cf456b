//! Exhaustive verification of every design property the toolkit relies on.
//!
//! All checks count coverage over the full O(v^2) pair histogram; nothing is
//! sampled. Failures are verdicts with concrete witnesses, not errors, and
//! witnesses are listed in lexicographic order so failures reproduce exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DesignParams, DirectedDesign, GroupedDesign, GroupedKind, OrderedBlock};

/// One concrete property violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Ordered pair (x,y) covered `got` times instead of `want`.
    PairCoverage { x: u32, y: u32, got: u32, want: u32 },
    /// Unordered pair {x,y} covered `got` times instead of `want`.
    UnorderedPairCoverage { x: u32, y: u32, got: u32, want: u32 },
    /// Two blocks share more than two points.
    BlockIntersection {
        first: usize,
        second: usize,
        shared: Vec<u32>,
    },
    /// A block meets one group in two points.
    GroupHitTwice { block: usize, group: usize },
    /// Underlying unordered block repeated.
    RepeatedBlock { first: usize, second: usize },
    /// Block count differs from v(v-1)*lambda/(k(k-1)).
    BlockCount { got: usize, want: u64 },
}

/// Verdict plus witnesses; `pass()` holds iff there are no violations.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
    /// Ordered-pair multiplicities, row-major (x * v + y), retained for diagnostics.
    #[serde(skip)]
    pub histogram: Vec<u32>,
    pub v: u32,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn multiplicity(&self, x: u32, y: u32) -> u32 {
        self.histogram[(x * self.v + y) as usize]
    }
}

fn ordered_histogram(v: u32, blocks: &[OrderedBlock]) -> Vec<u32> {
    let mut hist = vec![0u32; (v * v) as usize];
    for b in blocks {
        for (x, y) in b.ordered_pairs() {
            hist[(x * v + y) as usize] += 1;
        }
    }
    hist
}

/// Pass iff every ordered pair of distinct points is covered exactly lambda times.
pub fn verify_directed_design(d: &DirectedDesign) -> VerifyReport {
    let v = d.params.v;
    let hist = ordered_histogram(v, &d.blocks);
    let mut violations = Vec::new();
    for x in 0..v {
        for y in 0..v {
            if x == y {
                continue;
            }
            let got = hist[(x * v + y) as usize];
            if got != d.params.lambda {
                violations.push(Violation::PairCoverage {
                    x,
                    y,
                    got,
                    want: d.params.lambda,
                });
            }
        }
    }
    if let Some(want) = d.params.expected_block_count() {
        if d.blocks.len() as u64 != want {
            violations.push(Violation::BlockCount {
                got: d.blocks.len(),
                want,
            });
        }
    }
    VerifyReport {
        violations,
        histogram: hist,
        v,
    }
}

/// The unordered design obtained by forgetting block order, verified as a
/// 2-(v,k,2*lambda) BIBD.
pub fn underlying_bibd(d: &DirectedDesign) -> (Vec<Vec<u32>>, VerifyReport) {
    let v = d.params.v;
    let blocks: Vec<Vec<u32>> = d.blocks.iter().map(|b| b.underlying()).collect();
    let mut hist = vec![0u32; (v * v) as usize];
    for b in &blocks {
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                hist[(b[i] * v + b[j]) as usize] += 1;
            }
        }
    }
    let want = 2 * d.params.lambda;
    let mut violations = Vec::new();
    for x in 0..v {
        for y in x + 1..v {
            let got = hist[(x * v + y) as usize];
            if got != want {
                violations.push(Violation::UnorderedPairCoverage { x, y, got, want });
            }
        }
    }
    (
        blocks,
        VerifyReport {
            violations,
            histogram: hist,
            v,
        },
    )
}

/// True iff the underlying unordered block multiset has no repeats.
pub fn is_simple(d: &DirectedDesign) -> bool {
    let mut sets: Vec<Vec<u32>> = d.blocks.iter().map(|b| b.underlying()).collect();
    sets.sort();
    sets.windows(2).all(|w| w[0] != w[1])
}

/// Pass iff every pair of distinct blocks of the underlying BIBD shares at
/// most two points. Witness: the first offending block pair in index order.
pub fn is_super_simple(d: &DirectedDesign) -> VerifyReport {
    let sets: Vec<Vec<u32>> = d.blocks.iter().map(|b| b.underlying()).collect();
    let mut violations = Vec::new();
    'outer: for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let shared: Vec<u32> = sets[i]
                .iter()
                .filter(|p| sets[j].contains(p))
                .copied()
                .collect();
            if shared.len() > 2 {
                violations.push(Violation::BlockIntersection {
                    first: i,
                    second: j,
                    shared,
                });
                break 'outer;
            }
        }
    }
    VerifyReport {
        violations,
        histogram: Vec::new(),
        v: d.params.v,
    }
}

/// Verify a grouped design: no block meets a group twice, cross-group pairs
/// covered exactly lambda times (ordered for DGDDs, unordered otherwise),
/// same-group pairs covered zero times. Optionally checks super-simplicity.
pub fn verify_grouped(g: &GroupedDesign, check_super_simple: bool) -> Result<VerifyReport> {
    let v = g.v;
    let mut group_of = vec![usize::MAX; v as usize];
    for (gi, grp) in g.groups.iter().enumerate() {
        for &p in grp {
            if group_of[p as usize] != usize::MAX {
                return Err(Error::BadGroups(format!("point {p} in two groups")));
            }
            group_of[p as usize] = gi;
        }
    }
    if let Some(p) = group_of.iter().position(|&gi| gi == usize::MAX) {
        return Err(Error::BadGroups(format!("point {p} in no group")));
    }

    let mut violations = Vec::new();
    for (bi, b) in g.blocks.iter().enumerate() {
        let mut seen = vec![false; g.groups.len()];
        for &p in b.points() {
            let gi = group_of[p as usize];
            if seen[gi] {
                violations.push(Violation::GroupHitTwice {
                    block: bi,
                    group: gi,
                });
            }
            seen[gi] = true;
        }
    }

    let ordered = g.kind == GroupedKind::Dgdd;
    let mut hist = vec![0u32; (v * v) as usize];
    for b in &g.blocks {
        for (x, y) in b.ordered_pairs() {
            if ordered {
                hist[(x * v + y) as usize] += 1;
            } else {
                let (a, b) = if x < y { (x, y) } else { (y, x) };
                hist[(a * v + b) as usize] += 1;
            }
        }
    }
    for x in 0..v {
        for y in 0..v {
            if x == y || (!ordered && y <= x) {
                continue;
            }
            let same_group = group_of[x as usize] == group_of[y as usize];
            let want = if same_group { 0 } else { g.lambda };
            let got = hist[(x * v + y) as usize];
            if got != want {
                if ordered {
                    violations.push(Violation::PairCoverage { x, y, got, want });
                } else {
                    violations.push(Violation::UnorderedPairCoverage { x, y, got, want });
                }
            }
        }
    }

    if check_super_simple {
        let sets: Vec<Vec<u32>> = g.blocks.iter().map(|b| b.underlying()).collect();
        'outer: for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let shared: Vec<u32> = sets[i]
                    .iter()
                    .filter(|p| sets[j].contains(p))
                    .copied()
                    .collect();
                if shared.len() > 2 {
                    violations.push(Violation::BlockIntersection {
                        first: i,
                        second: j,
                        shared,
                    });
                    break 'outer;
                }
            }
        }
    }

    Ok(VerifyReport {
        violations,
        histogram: hist,
        v,
    })
}

/// Partition an unordered block set into parallel classes, each class
/// partitioning the full point set. Exact backtracking; `None` if no
/// resolution exists (including when k does not divide v).
pub fn find_parallel_classes(v: u32, blocks: &[Vec<u32>]) -> Option<Vec<Vec<usize>>> {
    if blocks.is_empty() {
        return Some(Vec::new());
    }
    let k = blocks[0].len() as u32;
    if k == 0 || v % k != 0 {
        return None;
    }
    let per_class = (v / k) as usize;
    let n_classes = blocks.len() / per_class;
    if blocks.len() % per_class != 0 {
        return None;
    }

    let mut used = vec![false; blocks.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();

    fn rec(
        v: u32,
        blocks: &[Vec<u32>],
        used: &mut Vec<bool>,
        classes: &mut Vec<Vec<usize>>,
        current: &mut Vec<usize>,
        covered: &mut Vec<bool>,
        n_classes: usize,
        per_class: usize,
    ) -> bool {
        if classes.len() == n_classes {
            return true;
        }
        if current.len() == per_class {
            classes.push(current.clone());
            let saved = current.clone();
            current.clear();
            let mut fresh = vec![false; v as usize];
            if rec(
                v, blocks, used, classes, current, &mut fresh, n_classes, per_class,
            ) {
                return true;
            }
            classes.pop();
            *current = saved;
            return false;
        }
        // lowest uncovered point anchors the branch
        let anchor = covered.iter().position(|&c| !c).unwrap() as u32;
        // symmetry break: the first block of the run's first class is forced
        // to be the least unused block containing the anchor
        for bi in 0..blocks.len() {
            if used[bi] || !blocks[bi].contains(&anchor) {
                continue;
            }
            if blocks[bi].iter().any(|&p| covered[p as usize]) {
                continue;
            }
            used[bi] = true;
            current.push(bi);
            for &p in &blocks[bi] {
                covered[p as usize] = true;
            }
            if rec(
                v, blocks, used, classes, current, covered, n_classes, per_class,
            ) {
                return true;
            }
            for &p in &blocks[bi] {
                covered[p as usize] = false;
            }
            current.pop();
            used[bi] = false;
        }
        false
    }

    let mut covered = vec![false; v as usize];
    if rec(
        v,
        blocks,
        &mut used,
        &mut classes,
        &mut current,
        &mut covered,
        n_classes,
        per_class,
    ) {
        Some(classes)
    } else {
        None
    }
}

/// Structural sanity for a directed design before heavier analysis.
pub fn well_formed(params: &DesignParams, blocks: &[OrderedBlock]) -> Result<()> {
    for b in blocks {
        if b.len() != params.k as usize {
            return Err(Error::WrongBlockSize {
                expected: params.k as usize,
                got: b.len(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::block;

    fn dd4() -> DirectedDesign {
        DirectedDesign::new(
            DesignParams::dd4(4),
            vec![block([0, 1, 2, 3]), block([3, 2, 1, 0])],
        )
        .unwrap()
    }

    #[test]
    fn dd4_verifies() {
        let d = dd4();
        assert!(verify_directed_design(&d).pass());
    }

    #[test]
    fn dd4_underlying_bibd_passes() {
        let d = dd4();
        let (sets, rep) = underlying_bibd(&d);
        assert_eq!(sets, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]]);
        assert!(rep.pass());
    }

    #[test]
    fn dd4_not_simple_not_super_simple() {
        let d = dd4();
        assert!(!is_simple(&d));
        assert!(!is_super_simple(&d).pass());
    }

    #[test]
    fn single_block_fails_coverage() {
        let d = DirectedDesign::new(DesignParams::dd4(10), vec![block([0, 1, 2, 3])]).unwrap();
        let (_, rep) = underlying_bibd(&d);
        assert!(!rep.pass());
        let rep = verify_directed_design(&d);
        assert!(!rep.pass());
    }

    #[test]
    fn three_point_intersection_detected() {
        let d = DirectedDesign::new(
            DesignParams::dd4(10),
            vec![block([0, 1, 2, 3]), block([0, 1, 2, 4])],
        )
        .unwrap();
        let rep = is_super_simple(&d);
        assert_eq!(rep.violations.len(), 1);
        match &rep.violations[0] {
            Violation::BlockIntersection { shared, .. } => assert_eq!(shared, &vec![0, 1, 2]),
            other => panic!("unexpected violation {other:?}"),
        }
    }

    #[test]
    fn parallel_class_divisibility() {
        // 13 points, k = 4: not divisible
        let blocks = vec![vec![0, 1, 2, 3]];
        assert!(find_parallel_classes(13, &blocks).is_none());
        // single block covering all points
        assert!(find_parallel_classes(4, &blocks).is_some());
    }
}
