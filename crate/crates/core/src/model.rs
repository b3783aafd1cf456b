//! Shared domain types: ordered blocks, directed designs, grouped designs
//! and exact rational f-ratios.
//!
//! Points are always canonicalized to `0..v-1`. Structured labels from
//! source material (coordinate pairs, an adjoined point) are carried as
//! display names next to the canonical integer.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

/// A sequence of `k` distinct point labels. Order is semantic: reversing
/// or permuting the points yields a different block.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OrderedBlock(Vec<u32>);

impl OrderedBlock {
    /// Build a block, rejecting duplicate points.
    pub fn new(points: Vec<u32>) -> Result<Self> {
        for (i, &p) in points.iter().enumerate() {
            if points[..i].contains(&p) {
                return Err(Error::DuplicatePoint(points.clone(), p));
            }
        }
        Ok(OrderedBlock(points))
    }

    pub fn points(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All ordered pairs (x, y) with x appearing before y in the block;
    /// k(k-1)/2 of them, e.g. 0132 -> 01, 03, 02, 13, 12, 32.
    pub fn ordered_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs = Vec::with_capacity(self.0.len() * (self.0.len() - 1) / 2);
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                pairs.push((self.0[i], self.0[j]));
            }
        }
        pairs
    }

    /// The block's point set with order forgotten (sorted ascending).
    pub fn underlying(&self) -> Vec<u32> {
        let mut pts = self.0.clone();
        pts.sort_unstable();
        pts
    }

    /// The block read back to front.
    pub fn reversed(&self) -> OrderedBlock {
        OrderedBlock(self.0.iter().rev().copied().collect())
    }

    /// Apply a point map, preserving order. The map must keep points distinct.
    pub fn map(&self, f: impl Fn(u32) -> u32) -> Result<OrderedBlock> {
        OrderedBlock::new(self.0.iter().map(|&p| f(p)).collect())
    }
}

impl fmt::Debug for OrderedBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for OrderedBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Design parameters: tuple strength t, point count v, block size k, index lambda.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DesignParams {
    pub t: u32,
    pub v: u32,
    pub k: u32,
    pub lambda: u32,
}

impl DesignParams {
    pub fn new(t: u32, v: u32, k: u32, lambda: u32) -> Self {
        assert!(t <= k && k <= v && lambda >= 1, "t <= k <= v, lambda >= 1");
        DesignParams { t, v, k, lambda }
    }

    /// Standard parameters 2-(v,4,1).
    pub fn dd4(v: u32) -> Self {
        DesignParams::new(2, v, 4, 1)
    }

    /// Admissibility for (t,k,lambda) = (2,4,1): v == 1 (mod 3).
    pub fn admissible(&self) -> bool {
        if (self.t, self.k, self.lambda) == (2, 4, 1) {
            self.v % 3 == 1
        } else {
            self.expected_block_count().is_some()
        }
    }

    /// Each block covers k(k-1)/2 of the v(v-1)*lambda ordered pairs, so
    /// the block count is 2*v(v-1)*lambda / (k(k-1)) when that is an integer.
    pub fn expected_block_count(&self) -> Option<u64> {
        let num = 2 * u64::from(self.v) * u64::from(self.v - 1) * u64::from(self.lambda);
        let den = u64::from(self.k) * u64::from(self.k - 1);
        (num % den == 0).then_some(num / den)
    }
}

/// A directed design: parameters plus a block list on points 0..v-1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectedDesign {
    pub params: DesignParams,
    pub blocks: Vec<OrderedBlock>,
    /// Optional display names for structured point labels, keyed by canonical label.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub display: BTreeMap<u32, String>,
}

impl DirectedDesign {
    pub fn new(params: DesignParams, blocks: Vec<OrderedBlock>) -> Result<Self> {
        for b in &blocks {
            if b.len() != params.k as usize {
                return Err(Error::WrongBlockSize {
                    expected: params.k as usize,
                    got: b.len(),
                });
            }
            if let Some(&p) = b.points().iter().find(|&&p| p >= params.v) {
                return Err(Error::PointOutOfRange(p, params.v));
            }
        }
        Ok(DirectedDesign {
            params,
            blocks,
            display: BTreeMap::new(),
        })
    }

    /// Replace every point by its image under a bijection of 0..v-1;
    /// block order and within-block order are preserved.
    pub fn relabel(&self, perm: &[u32]) -> Result<DirectedDesign> {
        let v = self.params.v as usize;
        if perm.len() != v {
            return Err(Error::NotABijection(self.params.v));
        }
        let mut seen = vec![false; v];
        for &img in perm {
            if img as usize >= v || seen[img as usize] {
                return Err(Error::NotABijection(self.params.v));
            }
            seen[img as usize] = true;
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.map(|p| perm[p as usize]))
            .collect::<Result<Vec<_>>>()?;
        DirectedDesign::new(self.params, blocks)
    }
}

/// Whether a grouped design's blocks are ordered tuples or plain sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GroupedKind {
    /// Directed GDD: ordered cross-group pairs covered lambda times.
    Dgdd,
    /// Plain GDD: unordered cross-group pairs covered lambda times.
    Gdd,
    /// PBD with one point deleted, or similar: treated like a GDD with
    /// mixed block sizes.
    PbdDerived,
}

/// A design on grouped points. Blocks never meet a group twice; only
/// cross-group pairs are covered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupedDesign {
    pub v: u32,
    pub groups: Vec<Vec<u32>>,
    pub blocks: Vec<OrderedBlock>,
    pub lambda: u32,
    pub kind: GroupedKind,
}

impl GroupedDesign {
    pub fn new(
        v: u32,
        groups: Vec<Vec<u32>>,
        blocks: Vec<OrderedBlock>,
        lambda: u32,
        kind: GroupedKind,
    ) -> Result<Self> {
        let mut seen = vec![false; v as usize];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::BadGroups("empty group".into()));
            }
            for &p in g {
                if p >= v {
                    return Err(Error::PointOutOfRange(p, v));
                }
                if seen[p as usize] {
                    return Err(Error::BadGroups(format!("point {p} in two groups")));
                }
                seen[p as usize] = true;
            }
        }
        if let Some(p) = seen.iter().position(|&s| !s) {
            return Err(Error::BadGroups(format!("point {p} in no group")));
        }
        for b in &blocks {
            if let Some(&p) = b.points().iter().find(|&&p| p >= v) {
                return Err(Error::PointOutOfRange(p, v));
            }
        }
        Ok(GroupedDesign {
            v,
            groups,
            blocks,
            lambda,
            kind,
        })
    }

    /// Group sizes with multiplicities, e.g. [(3, 4)] for type 3^4.
    pub fn group_type(&self) -> Vec<(usize, usize)> {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for g in &self.groups {
            *counts.entry(g.len()).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    /// Index of the group containing a point.
    pub fn group_of(&self, p: u32) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&p))
    }
}

/// A pairwise balanced design: unordered blocks with sizes drawn from a
/// set K, every unordered pair covered exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pbd {
    pub v: u32,
    pub blocks: Vec<Vec<u32>>,
}

impl Pbd {
    pub fn new(v: u32, blocks: Vec<Vec<u32>>) -> Result<Self> {
        for b in &blocks {
            for (i, &p) in b.iter().enumerate() {
                if p >= v {
                    return Err(Error::PointOutOfRange(p, v));
                }
                if b[..i].contains(&p) {
                    return Err(Error::DuplicatePoint(b.clone(), p));
                }
            }
        }
        Ok(Pbd { v, blocks })
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.blocks.iter().map(|b| b.len()).collect();
        sizes.sort_unstable();
        sizes.dedup();
        sizes
    }

    /// Every unordered pair covered exactly once?
    pub fn is_valid(&self) -> bool {
        let v = self.v as usize;
        let mut hist = vec![0u32; v * v];
        for b in &self.blocks {
            for i in 0..b.len() {
                for j in i + 1..b.len() {
                    let (x, y) = (b[i].min(b[j]), b[i].max(b[j]));
                    hist[x as usize * v + y as usize] += 1;
                }
            }
        }
        (0..v).all(|x| (x + 1..v).all(|y| hist[x * v + y] == 1))
    }
}

/// An exact rational, used for f-ratios and bound arithmetic. Never a float.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FRatio {
    pub numerator: u64,
    pub denominator: u64,
    pub exactness: Exactness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Exactness {
    Exact,
    LowerBound,
}

impl FRatio {
    pub fn new(numerator: u64, denominator: u64, exactness: Exactness) -> Self {
        assert!(denominator > 0, "denominator must be positive");
        let r = Ratio::new(numerator, denominator);
        FRatio {
            numerator: *r.numer(),
            denominator: *r.denom(),
            exactness,
        }
    }

    pub fn exact(n: u64, d: u64) -> Self {
        FRatio::new(n, d, Exactness::Exact)
    }

    pub fn lower_bound(n: u64, d: u64) -> Self {
        FRatio::new(n, d, Exactness::LowerBound)
    }

    pub fn ratio(&self) -> Ratio<i64> {
        Ratio::new(self.numerator as i64, self.denominator as i64)
    }
}

impl fmt::Display for FRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)?;
        if self.exactness == Exactness::LowerBound {
            write!(f, " (lower bound)")?;
        }
        Ok(())
    }
}

/// Convenience constructor used throughout tests: a block from a fixed array.
pub fn block<const N: usize>(pts: [u32; N]) -> OrderedBlock {
    OrderedBlock::new(pts.to_vec()).expect("distinct points")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_pairs_of_0132() {
        let b = block([0, 1, 3, 2]);
        assert_eq!(
            b.ordered_pairs(),
            vec![(0, 1), (0, 3), (0, 2), (1, 3), (1, 2), (3, 2)]
        );
    }

    #[test]
    fn ordered_pairs_k2() {
        let b = block([0, 1]);
        assert_eq!(b.ordered_pairs(), vec![(0, 1)]);
    }

    #[test]
    fn ordered_pairs_descending() {
        let b = block([3, 2, 1, 0]);
        assert_eq!(
            b.ordered_pairs(),
            vec![(3, 2), (3, 1), (3, 0), (2, 1), (2, 0), (1, 0)]
        );
    }

    #[test]
    fn underlying_forgets_order() {
        assert_eq!(block([0, 1, 3, 2]).underlying(), vec![0, 1, 2, 3]);
        assert_eq!(block([4, 5, 1, 0]).underlying(), vec![0, 1, 4, 5]);
        assert_eq!(block([1, 0, 11, 5]).underlying(), vec![0, 1, 5, 11]);
    }

    #[test]
    fn duplicate_point_rejected() {
        assert!(OrderedBlock::new(vec![0, 1, 1, 2]).is_err());
    }

    #[test]
    fn relabel_identity_and_swap() {
        let d = DirectedDesign::new(
            DesignParams::dd4(4),
            vec![block([0, 1, 2, 3]), block([3, 2, 1, 0])],
        )
        .unwrap();
        let id = d.relabel(&[0, 1, 2, 3]).unwrap();
        assert_eq!(id, d);
        let swapped = d.relabel(&[1, 0, 2, 3]).unwrap();
        assert_eq!(
            swapped.blocks,
            vec![block([1, 0, 2, 3]), block([3, 2, 0, 1])]
        );
    }

    #[test]
    fn relabel_rejects_non_bijection() {
        let d = DirectedDesign::new(DesignParams::dd4(4), vec![block([0, 1, 2, 3])]).unwrap();
        assert!(d.relabel(&[0, 0, 2, 3]).is_err());
        assert!(d.relabel(&[0, 1, 2]).is_err());
    }

    #[test]
    fn fratio_stays_exact_and_reduced() {
        let f = FRatio::exact(8, 15);
        assert_eq!((f.numerator, f.denominator), (8, 15));
        let g = FRatio::exact(20, 40);
        assert_eq!((g.numerator, g.denominator), (1, 2));
    }

    #[test]
    fn block_count_formula() {
        assert_eq!(DesignParams::dd4(10).expected_block_count(), Some(15));
        assert_eq!(DesignParams::dd4(34).expected_block_count(), Some(187));
        assert!(DesignParams::dd4(10).admissible());
        assert!(!DesignParams::dd4(9).admissible());
    }
}
