//! Cyclic development of base blocks into full block lists, including the
//! short-orbit diagnostics needed when full development overshoots the
//! required block count.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DesignParams, DirectedDesign, GroupedDesign, GroupedKind, OrderedBlock};
use crate::verify;

/// The two group actions used for base-block development.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Action {
    /// Every point gains `step` modulo `modulus` per translate.
    AddStep { step: u32, modulus: u32 },
    /// Points are coordinate pairs (c, j) with c in {0,1}; the first
    /// coordinate is fixed and the second gains 1 modulo `modulus`.
    /// Canonicalization: (c, j) -> c * modulus + j.
    FixFirstCoordinate { modulus: u32 },
}

impl Action {
    /// Number of translates in a full orbit.
    pub fn full_period(&self) -> usize {
        match *self {
            Action::AddStep { step, modulus } => (modulus / gcd(step.max(1), modulus)) as usize,
            Action::FixFirstCoordinate { modulus } => modulus as usize,
        }
    }

    /// Total canonical point count of the acted-on set.
    pub fn point_count(&self) -> u32 {
        match *self {
            Action::AddStep { modulus, .. } => modulus,
            Action::FixFirstCoordinate { modulus } => 2 * modulus,
        }
    }

    fn translate(&self, p: u32, i: u32) -> u32 {
        match *self {
            Action::AddStep { step, modulus } => (p + i * step) % modulus,
            Action::FixFirstCoordinate { modulus } => {
                let c = p / modulus;
                let j = p % modulus;
                c * modulus + (j + i) % modulus
            }
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Per-base-block orbit length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitLength {
    Full,
    Exact(usize),
}

/// One base block together with its action and orbit length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseBlock {
    pub block: OrderedBlock,
    pub action: Action,
    pub orbit: OrbitLength,
}

impl BaseBlock {
    pub fn orbit_len(&self) -> usize {
        match self.orbit {
            OrbitLength::Full => self.action.full_period(),
            OrbitLength::Exact(n) => n,
        }
    }
}

/// A set of base blocks developing to a declared design.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseBlockSet {
    pub params: DesignParams,
    pub base: Vec<BaseBlock>,
    /// Declared groups (canonical labels) when the target is a DGDD.
    pub groups: Vec<Vec<u32>>,
}

impl BaseBlockSet {
    /// Uniform action over all base blocks, full orbits.
    pub fn uniform(params: DesignParams, action: Action, blocks: Vec<OrderedBlock>) -> Self {
        BaseBlockSet {
            params,
            base: blocks
                .into_iter()
                .map(|block| BaseBlock {
                    block,
                    action,
                    orbit: OrbitLength::Full,
                })
                .collect(),
            groups: Vec::new(),
        }
    }

    pub fn with_groups(mut self, groups: Vec<Vec<u32>>) -> Self {
        self.groups = groups;
        self
    }

    pub fn total_blocks(&self) -> usize {
        self.base.iter().map(|b| b.orbit_len()).sum()
    }
}

/// Translates i = 0..L-1 of a block under an action, order within the block
/// preserved.
pub fn orbit(base: &BaseBlock) -> Result<Vec<OrderedBlock>> {
    let period = base.action.full_period();
    let len = base.orbit_len();
    if len > period {
        return Err(Error::OrbitTooLong(len, period));
    }
    let n = base.action.point_count();
    if let Some(&p) = base.block.points().iter().find(|&&p| p >= n) {
        return Err(Error::PointOutOfRange(p, n));
    }
    (0..len as u32)
        .map(|i| base.block.map(|p| base.action.translate(p, i)))
        .collect()
}

/// Concatenation of all orbits, canonicalized to integer labels. Attaches
/// the declared groups when present.
pub fn develop(base: &BaseBlockSet) -> Result<DevelopedDesign> {
    let mut blocks = Vec::with_capacity(base.total_blocks());
    for bb in &base.base {
        blocks.extend(orbit(bb)?);
    }
    if base.groups.is_empty() {
        Ok(DevelopedDesign::Directed(DirectedDesign::new(
            base.params,
            blocks,
        )?))
    } else {
        Ok(DevelopedDesign::Grouped(GroupedDesign::new(
            base.params.v,
            base.groups.clone(),
            blocks,
            base.params.lambda,
            GroupedKind::Dgdd,
        )?))
    }
}

#[derive(Clone, Debug)]
pub enum DevelopedDesign {
    Directed(DirectedDesign),
    Grouped(GroupedDesign),
}

impl DevelopedDesign {
    pub fn block_count(&self) -> usize {
        match self {
            DevelopedDesign::Directed(d) => d.blocks.len(),
            DevelopedDesign::Grouped(g) => g.blocks.len(),
        }
    }
}

/// Outcome of the orbit-length search: either a verifying assignment or a
/// structured discrepancy report. Never an exception and never a silently
/// "corrected" design.
#[derive(Clone, Debug, Serialize)]
pub enum OrbitResolution {
    Resolved {
        base: BaseBlockSet,
        /// Per-base-block orbit lengths of the verifying assignment.
        lengths: Vec<usize>,
    },
    Discrepancy(DiscrepancyReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub full_count: usize,
    pub required_count: u64,
    /// One entry per count-matching assignment that failed verification.
    pub attempts: Vec<AttemptReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttemptReport {
    pub lengths: Vec<usize>,
    /// Ordered pairs covered more than lambda times, with multiplicities.
    pub over_covered: Vec<(u32, u32, u32)>,
    /// Ordered pairs covered fewer than lambda times, with multiplicities.
    pub under_covered: Vec<(u32, u32, u32)>,
}

/// Search per-base-block orbit lengths over {full, full/2} so that the
/// developed block count matches the target and the design verifies.
/// Assignments are tried in lexicographic order (full before half per
/// block), and the first verifying one wins.
pub fn resolve_orbit_lengths(base: &BaseBlockSet, target: &DesignParams) -> OrbitResolution {
    let required = target
        .expected_block_count()
        .expect("target block count must be integral");
    let full_count = base.total_blocks();

    let n = base.base.len();
    let mut attempts = Vec::new();
    // each base block: full period or half period (when even)
    let choices: Vec<Vec<usize>> = base
        .base
        .iter()
        .map(|bb| {
            let full = bb.action.full_period();
            if full % 2 == 0 {
                vec![full, full / 2]
            } else {
                vec![full]
            }
        })
        .collect();

    let mut assignment = vec![0usize; n];
    loop {
        let lengths: Vec<usize> = (0..n).map(|i| choices[i][assignment[i]]).collect();
        let total: usize = lengths.iter().sum();
        if total as u64 == required {
            let mut candidate = base.clone();
            for (bb, &len) in candidate.base.iter_mut().zip(&lengths) {
                bb.orbit = OrbitLength::Exact(len);
            }
            match develop(&candidate) {
                Ok(DevelopedDesign::Directed(d)) => {
                    let rep = verify::verify_directed_design(&d);
                    if rep.pass() {
                        return OrbitResolution::Resolved {
                            base: candidate,
                            lengths,
                        };
                    }
                    attempts.push(attempt_report(lengths, &rep, target.lambda));
                }
                Ok(DevelopedDesign::Grouped(_)) | Err(_) => {
                    // grouped targets are not subject to orbit resolution
                }
            }
        }
        // next assignment, lexicographic
        let mut i = n;
        loop {
            if i == 0 {
                return OrbitResolution::Discrepancy(DiscrepancyReport {
                    full_count,
                    required_count: required,
                    attempts,
                });
            }
            i -= 1;
            if assignment[i] + 1 < choices[i].len() {
                assignment[i] += 1;
                for a in assignment[i + 1..].iter_mut() {
                    *a = 0;
                }
                break;
            }
        }
    }
}

fn attempt_report(lengths: Vec<usize>, rep: &verify::VerifyReport, lambda: u32) -> AttemptReport {
    let mut over = Vec::new();
    let mut under = Vec::new();
    for vl in &rep.violations {
        if let verify::Violation::PairCoverage { x, y, got, .. } = vl {
            if *got > lambda {
                over.push((*x, *y, *got));
            } else {
                under.push((*x, *y, *got));
            }
        }
    }
    AttemptReport {
        lengths,
        over_covered: over,
        under_covered: under,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::block;

    #[test]
    fn full_orbit_mod_13() {
        let bb = BaseBlock {
            block: block([0, 1, 3, 9]),
            action: Action::AddStep {
                step: 1,
                modulus: 13,
            },
            orbit: OrbitLength::Full,
        };
        let orb = orbit(&bb).unwrap();
        assert_eq!(orb.len(), 13);
        assert_eq!(orb[0], block([0, 1, 3, 9]));
        assert_eq!(orb[1], block([1, 2, 4, 10]));
        assert_eq!(orb[12], block([12, 0, 2, 8]));
    }

    #[test]
    fn orbit_length_one_is_the_block_itself() {
        let bb = BaseBlock {
            block: block([4, 7, 1, 2]),
            action: Action::AddStep {
                step: 1,
                modulus: 13,
            },
            orbit: OrbitLength::Exact(1),
        };
        assert_eq!(orbit(&bb).unwrap(), vec![block([4, 7, 1, 2])]);
    }

    #[test]
    fn step_two_mod_18_has_period_nine() {
        let bb = BaseBlock {
            block: block([5, 10, 2, 0]),
            action: Action::AddStep {
                step: 2,
                modulus: 18,
            },
            orbit: OrbitLength::Full,
        };
        let orb = orbit(&bb).unwrap();
        assert_eq!(orb.len(), 9);
    }

    #[test]
    fn orbit_length_exceeding_period_rejected() {
        let bb = BaseBlock {
            block: block([0, 1, 3, 9]),
            action: Action::AddStep {
                step: 1,
                modulus: 13,
            },
            orbit: OrbitLength::Exact(14),
        };
        assert!(orbit(&bb).is_err());
    }

    #[test]
    fn coordinate_action_wraps_second_coordinate() {
        // (c, j) canonicalized as c * 11 + j
        let bb = BaseBlock {
            block: block([0, 3, 9, 10]), // (0,0) (0,3) (0,9) (0,10)
            action: Action::FixFirstCoordinate { modulus: 11 },
            orbit: OrbitLength::Full,
        };
        let orb = orbit(&bb).unwrap();
        assert_eq!(orb.len(), 11);
        assert_eq!(orb[1], block([1, 4, 10, 0]));
        // mixed-coordinate block keeps first coordinates fixed
        let bb = BaseBlock {
            block: block([0, 11, 18, 13]), // (0,0) (1,0) (1,7) (1,2)
            action: Action::FixFirstCoordinate { modulus: 11 },
            orbit: OrbitLength::Full,
        };
        let orb = orbit(&bb).unwrap();
        assert_eq!(orb[1], block([1, 12, 19, 14]));
        assert_eq!(orb[10], block([10, 21, 17, 12]));
    }

    #[test]
    fn develop_counts_sum_of_orbit_lengths() {
        let base = BaseBlockSet::uniform(
            DesignParams::dd4(13),
            Action::AddStep {
                step: 1,
                modulus: 13,
            },
            vec![block([0, 1, 3, 9]), block([1, 0, 11, 5])],
        );
        assert_eq!(base.total_blocks(), 26);
        match develop(&base).unwrap() {
            DevelopedDesign::Directed(d) => assert_eq!(d.blocks.len(), 26),
            _ => panic!("expected a directed design"),
        }
    }
}
