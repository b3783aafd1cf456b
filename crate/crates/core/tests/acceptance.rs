//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N: pass` line on success (run with `--nocapture` to see
//! them; a failing criterion panics instead).

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Duration;

use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ddtk_core::catalog::{self, Loaded};
use ddtk_core::constructions::{
    self, compose_f_bound, family_closed_form, family_composition, simplified_floor,
    BoundComposition, BoundTerm, Ingredients, AsymptoticFamily,
};
use ddtk_core::defset::{self, PartialDesign};
use ddtk_core::development::OrbitResolution;
use ddtk_core::format::{self, ParsedDesign};
use ddtk_core::model::{DesignParams, DirectedDesign, Exactness, OrderedBlock};
use ddtk_core::trades::{self, BoundMode};
use ddtk_core::verify;

fn directed(id: &str) -> DirectedDesign {
    match catalog::load(id).unwrap().design {
        Loaded::Directed(d) => d,
        Loaded::Grouped(_) => panic!("{id} is grouped"),
    }
}

fn ingredient_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../ingredients")
}

/// Ordered view of a grouped design's blocks, for trade analysis.
fn grouped_as_directed(id: &str) -> DirectedDesign {
    match catalog::load(id).unwrap().design {
        Loaded::Grouped(g) => {
            DirectedDesign::new(DesignParams::new(2, g.v, 4, g.lambda), g.blocks).unwrap()
        }
        Loaded::Directed(_) => panic!("{id} is directed"),
    }
}

fn exact_bound(d: &DirectedDesign) -> usize {
    let g = trades::build_trade_graph(d);
    let cert = trades::lower_bound(&g, BoundMode::Exact);
    assert!(trades::check_certificate(&g, &cert), "certificate rejected");
    cert.bound
}

#[test]
fn criterion_01_catalog_validity() {
    for (id, blocks) in [
        ("dd-10", 15),
        ("dd-13", 26),
        ("dd-16", 40),
        ("dd-19", 57),
        ("dd-22", 77),
        ("dd-28", 126),
        ("dd-31", 155),
    ] {
        let d = directed(id);
        assert_eq!(d.blocks.len(), blocks, "{id} block count");
        assert_eq!(d.blocks.len() as u64, d.params.expected_block_count().unwrap());
        assert!(verify::verify_directed_design(&d).pass(), "{id} coverage");
        assert!(verify::is_super_simple(&d).pass(), "{id} super-simplicity");
    }
    for (id, blocks) in [
        ("dgdd-3^4", 18),
        ("dgdd-3^5", 30),
        ("dgdd-3^6", 45),
        ("dgdd-2^4-a", 8),
        ("dgdd-2^4-b", 8),
    ] {
        let g = match catalog::load(id).unwrap().design {
            Loaded::Grouped(g) => g,
            Loaded::Directed(_) => panic!("{id} is directed"),
        };
        assert_eq!(g.blocks.len(), blocks, "{id} block count");
        assert!(verify::verify_grouped(&g, false).unwrap().pass(), "{id} coverage");
        if id == "dgdd-2^4-b" {
            // documented deviation: valid DGDD, but blocks (4,0,2,5) and
            // (5,2,7,4) share three points, so it is not super-simple; the
            // its catalog entry claims only f >= 5/8
            let rep = verify::verify_grouped(&g, true).unwrap();
            assert!(!rep.pass());
            assert!(rep.violations.iter().any(|v| matches!(
                v,
                verify::Violation::BlockIntersection { shared, .. } if shared.len() == 3
            )));
        } else {
            assert!(verify::verify_grouped(&g, true).unwrap().pass(), "{id} super-simplicity");
        }
    }
    println!("criterion 1: pass");
}

/// Block indices of the named blocks within dd-10's stored order.
fn dd10_indices(named: &[&str]) -> Vec<usize> {
    let d = directed("dd-10");
    named
        .iter()
        .map(|s| {
            let pts: Vec<u32> = s.chars().map(|c| c.to_digit(10).unwrap()).collect();
            d.blocks
                .iter()
                .position(|b| b.points() == pts)
                .unwrap_or_else(|| panic!("block {s} not in dd-10"))
        })
        .collect()
}

#[test]
fn criterion_02_worked_example() {
    let d = directed("dd-10");
    let s = dd10_indices(&["0132", "2354", "9653", "8752", "2791", "2680", "1498", "1576"]);
    assert!(defset::is_defining_set(&d, &s).unwrap());
    let fixed_s: Vec<OrderedBlock> = s.iter().map(|&i| d.blocks[i].clone()).collect();
    let res = defset::count_completions(&PartialDesign::new(d.params, fixed_s).unwrap(), None)
        .unwrap();
    assert_eq!(res.count, 1, "S has a unique completion");

    // The source lists exactly two completions of R: adjoining either
    // {4510, 1576, ...} or {4150, 5176, ...}. Exhaustive counting finds
    // those two plus two more (all four verify as super-simple designs;
    // the extras also reorient 0589). The two listed completions are
    // pinned below, including their exact difference — see the decisions
    // ledger for the discrepancy.
    let r = dd10_indices(&["0132", "2354", "9653", "8752", "2791", "2680", "1498", "0467"]);
    let fixed_r: Vec<OrderedBlock> = r.iter().map(|&i| d.blocks[i].clone()).collect();
    let res = defset::count_completions(&PartialDesign::new(d.params, fixed_r).unwrap(), None)
        .unwrap();
    assert_eq!(res.count, 4, "R's exhaustive completion count");
    for c in &res.completions {
        assert!(verify::verify_directed_design(c).pass());
        assert!(verify::is_super_simple(c).pass());
    }
    let block = |s: &str| -> OrderedBlock {
        OrderedBlock::new(s.chars().map(|c| c.to_digit(10).unwrap()).collect()).unwrap()
    };
    let sets: Vec<BTreeSet<&OrderedBlock>> = res
        .completions
        .iter()
        .map(|c| c.blocks.iter().collect())
        .collect();
    let with = |names: &[&str]| -> usize {
        let blocks: Vec<OrderedBlock> = names.iter().map(|s| block(s)).collect();
        let found: Vec<usize> = (0..sets.len())
            .filter(|&i| blocks.iter().all(|b| sets[i].contains(b)))
            .collect();
        assert_eq!(found.len(), 1, "completion with {names:?} unique");
        found[0]
    };
    let first = with(&["4510", "1576"]);
    let second = with(&["4150", "5176"]);
    let only_first: BTreeSet<_> = sets[first]
        .difference(&sets[second])
        .map(|b| b.points())
        .collect();
    let only_second: BTreeSet<_> = sets[second]
        .difference(&sets[first])
        .map(|b| b.points())
        .collect();
    assert_eq!(
        only_first,
        [&[4u32, 5, 1, 0][..], &[1, 5, 7, 6][..]].into_iter().collect()
    );
    assert_eq!(
        only_second,
        [&[4u32, 1, 5, 0][..], &[5, 1, 7, 6][..]].into_iter().collect()
    );
    println!("criterion 2: pass (completion count 4, not the source's 2; its two listed completions are present and differ exactly as stated)");
}

#[test]
fn criterion_03_smallest_defining_sets() {
    let budget = Duration::from_secs(60);

    let d = directed("dd-10");
    let res = defset::smallest_defining_set(&d, budget).unwrap();
    assert_eq!(res.size, 8);
    assert!(res.optimal, "dd-10 optimality proven");
    let f = defset::f_ratio(&d, res.size, res.optimal);
    assert_eq!((f.numerator, f.denominator, f.exactness), (8, 15, Exactness::Exact));

    let d = directed("dd-7");
    let res = defset::smallest_defining_set(&d, budget).unwrap();
    assert_eq!(res.size, 2);
    assert!(res.optimal);
    let f = defset::f_ratio(&d, res.size, res.optimal);
    assert_eq!((f.numerator, f.denominator, f.exactness), (2, 7, Exactness::Exact));

    let d = directed("dd-4");
    let res = defset::smallest_defining_set(&d, budget).unwrap();
    assert_eq!(res.size, 1);
    assert!(res.optimal);
    println!("criterion 3: pass");
}

#[test]
fn criterion_04_trade_bounds() {
    for (id, bound) in [
        ("dd-10", 8),
        ("dd-16", 20),
        ("dd-19", 29),
        ("dd-22", 39),
        ("dd-28", 63),
        ("dd-31", 78),
    ] {
        assert_eq!(exact_bound(&directed(id)), bound, "{id}");
    }
    for (id, bound) in [("dgdd-3^4", 10), ("dgdd-3^5", 15), ("dgdd-3^6", 23), ("dgdd-2^4-b", 5)] {
        assert_eq!(exact_bound(&grouped_as_directed(id)), bound, "{id}");
    }
    // the matching phrasings: dd-16 has a matching of >= 20 edges, dd-28 of
    // exactly 63 = half its blocks
    let g16 = trades::build_trade_graph(&directed("dd-16"));
    let edges: Vec<(usize, usize)> = g16.edges.iter().map(|e| (e.a, e.b)).collect();
    assert!(trades::maximum_matching(g16.n, &edges).len() >= 20);
    let g28 = trades::build_trade_graph(&directed("dd-28"));
    let edges: Vec<(usize, usize)> = g28.edges.iter().map(|e| (e.a, e.b)).collect();
    assert_eq!(trades::maximum_matching(g28.n, &edges).len(), 63);
    println!("criterion 4: pass");
}

#[test]
fn criterion_05_f_lower_bounds() {
    for (id, grouped, num, den) in [
        ("dd-16", false, 1u64, 2u64),
        ("dd-19", false, 29, 57),
        ("dd-22", false, 39, 77),
        ("dd-28", false, 1, 2),
        ("dd-31", false, 78, 155),
        ("dgdd-2^4-b", true, 5, 8),
    ] {
        let d = if grouped { grouped_as_directed(id) } else { directed(id) };
        let bound = exact_bound(&d);
        let f = Ratio::new(bound as u64, d.blocks.len() as u64);
        assert!(f >= Ratio::new(num, den), "{id}: {f} < {num}/{den}");
    }
    println!("criterion 5: pass");
}

#[test]
fn criterion_06_recipes() {
    let ing = Ingredients::with_dir(ingredient_dir());
    for (v, blocks) in [(40u32, 260usize), (43, 301), (55, 495), (67, 737)] {
        let d = constructions::existence_recipe(v, &ing).unwrap();
        assert_eq!(d.params.v, v);
        assert_eq!(d.blocks.len(), blocks, "v={v}");
        assert!(verify::verify_directed_design(&d).pass(), "v={v}");
        assert!(verify::is_super_simple(&d).pass(), "v={v} super-simplicity");
    }
    // composed bounds: v=40 from 25 DGDD(2^4) copies (5 of 8) and 4 DD(10)
    // fills (8 of 15); v=43 from 14 DGDD(3^4) copies (10 of 18) and 7 DD(7)
    // fills (2 of 7)
    let c40 = BoundComposition::new(vec![
        BoundTerm { count: 25, bound: 5, blocks: 8 },
        BoundTerm { count: 4, bound: 8, blocks: 15 },
    ]);
    assert_eq!(c40.total_blocks(), 260);
    assert!(c40.total_bound() >= 130, "v=40 composed bound {}", c40.total_bound());
    let c43 = BoundComposition::new(vec![
        BoundTerm { count: 14, bound: 10, blocks: 18 },
        BoundTerm { count: 7, bound: 2, blocks: 7 },
    ]);
    assert_eq!((c43.total_bound(), c43.total_blocks()), (154, 301));
    let f = compose_f_bound(&c43);
    assert_eq!(f.ratio(), Ratio::new(154, 301));
    println!("criterion 6: pass");
}

#[test]
fn criterion_07_asymptotic_arithmetic() {
    for k in 5u64..=10 {
        let f = family_closed_form(AsymptoticFamily::V12kPlus1, k);
        let v = 12 * k + 1;
        assert_eq!(
            f.ratio(),
            Ratio::new((15 * k * (k - 1) + 13 * k) as i64, (v * (v - 1) / 6) as i64)
        );
        assert!(f.ratio() >= simplified_floor(AsymptoticFamily::V12kPlus1, k));
        for family in [AsymptoticFamily::V12kPlus4, AsymptoticFamily::V12kPlus19, AsymptoticFamily::V12kPlus10] {
            let closed = family_closed_form(family, k).ratio();
            let composed = compose_f_bound(&family_composition(family, k)).ratio();
            let floor = simplified_floor(family, k);
            assert!(closed >= floor, "{family:?} k={k}");
            assert!(composed >= floor, "{family:?} k={k}");
        }
    }
    assert_eq!(family_closed_form(AsymptoticFamily::V12kPlus1, 5).ratio(), Ratio::new(365, 610));
    println!("criterion 7: pass");
}

#[test]
fn criterion_08_discrepancy_handling() {
    for (id, full, required) in [("dd-34", 204, 187), ("dd-52", 468, 442)] {
        let raw = catalog::load_raw(id).unwrap();
        let base = match raw {
            ParsedDesign::Base(b) => b,
            _ => panic!("{id} should be base blocks"),
        };
        assert_eq!(base.total_blocks(), full, "{id} full development");
        assert_eq!(
            base.params.expected_block_count().unwrap(),
            required as u64,
            "{id} required count"
        );
        match catalog::resolve(id).unwrap() {
            OrbitResolution::Discrepancy(rep) => {
                assert_eq!(rep.full_count, full);
                assert_eq!(rep.required_count, required);
                assert!(!rep.attempts.is_empty());
                assert!(rep.attempts.iter().all(|a| !a.over_covered.is_empty()));
            }
            OrbitResolution::Resolved { .. } => {
                panic!("{id}: unexpected verifying orbit assignment")
            }
        }
        // the tool refuses to emit an unverified design as valid
        assert!(catalog::load(id).is_err(), "{id} must not load as valid");
    }
    println!("criterion 8: pass");
}

fn permutation(v: u32) -> impl Strategy<Value = Vec<u32>> {
    Just((0..v).collect::<Vec<u32>>()).prop_shuffle()
}

#[test]
fn criterion_09_property_suites() {
    let cfg = Config { cases: 200, ..Config::default() };

    // relabel invariance of verdicts and bound values (dd-10)
    let d10 = directed("dd-10");
    let g10_edges = trades::build_trade_graph(&d10).edges.len();
    TestRunner::new(cfg.clone())
        .run(&permutation(10), |perm| {
            let r = d10.relabel(&perm).unwrap();
            prop_assert!(verify::verify_directed_design(&r).pass());
            prop_assert!(verify::is_super_simple(&r).pass());
            let g = trades::build_trade_graph(&r);
            prop_assert_eq!(g.edges.len(), g10_edges);
            prop_assert_eq!(trades::lower_bound(&g, BoundMode::Exact).bound, 8);
            Ok(())
        })
        .unwrap();

    // every trade-graph edge witness is a directed trade (random dd-16 edges)
    let d16 = directed("dd-16");
    let g16 = trades::build_trade_graph(&d16);
    TestRunner::new(cfg.clone())
        .run(&(0..g16.edges.len()), |i| {
            let e = &g16.edges[i];
            let t1 = [d16.blocks[e.a].clone(), d16.blocks[e.b].clone()];
            prop_assert!(trades::is_directed_trade(&t1, &e.witness));
            Ok(())
        })
        .unwrap();

    // structural <= exact <= smallest on dd-4 / dd-7 / dd-10, under relabeling
    for id in ["dd-4", "dd-7", "dd-10"] {
        let d = directed(id);
        let smallest = defset::smallest_defining_set(&d, Duration::from_secs(60)).unwrap();
        assert!(smallest.optimal);
        TestRunner::new(cfg.clone())
            .run(&permutation(d.params.v), |perm| {
                let r = d.relabel(&perm).unwrap();
                let g = trades::build_trade_graph(&r);
                let structural = trades::lower_bound(&g, BoundMode::Structural).bound;
                let exact = trades::lower_bound(&g, BoundMode::Exact).bound;
                prop_assert!(structural <= exact);
                prop_assert!(exact <= smallest.size);
                Ok(())
            })
            .unwrap();
    }

    // super-simple implies simple across the catalog
    for e in catalog::entries() {
        let Ok(report) = catalog::load(e.id) else { continue };
        if let Loaded::Directed(d) = report.design {
            if verify::is_super_simple(&d).pass() {
                assert!(verify::is_simple(&d), "{} super-simple but not simple", e.id);
            }
        }
    }

    // parse/serialize round trip on all catalog entries, plus random
    // relabelings of dd-10
    for e in catalog::entries() {
        let parsed = catalog::load_raw(e.id).unwrap();
        let text = format::serialize_design(&parsed);
        let reparsed = format::parse_design(&text).unwrap();
        assert_eq!(
            format::serialize_design(&reparsed),
            text,
            "{} round trip",
            e.id
        );
    }
    TestRunner::new(cfg)
        .run(&permutation(10), |perm| {
            let r = d10.relabel(&perm).unwrap();
            let text = format::serialize_design(&ParsedDesign::Directed(r.clone()));
            match format::parse_design(&text).unwrap() {
                ParsedDesign::Directed(back) => prop_assert_eq!(back, r),
                _ => prop_assert!(false, "wrong kind"),
            }
            Ok(())
        })
        .unwrap();

    // wilson_weighting output validity for every criterion-6 combination
    let ing = Ingredients::with_dir(ingredient_dir());
    for v in [40u32, 43, 55, 67] {
        let d = constructions::existence_recipe(v, &ing).unwrap();
        assert!(verify::verify_directed_design(&d).pass(), "v={v}");
    }
    println!("criterion 9: pass");
}

/// Independent oracle: all two-block 2-(4,4,1)DDs over the 24 permutations.
fn oracle_count_dd4() -> usize {
    let pts = [0u32, 1, 2, 3];
    let mut perms: Vec<Vec<u32>> = Vec::new();
    // Heap-free enumeration of all 24 orderings
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [pts[a], pts[b], pts[c], pts[d]];
                    let mut q = p.to_vec();
                    q.sort_unstable();
                    q.dedup();
                    if q.len() == 4 {
                        perms.push(p.to_vec());
                    }
                }
            }
        }
    }
    assert_eq!(perms.len(), 24);
    let mut count = 0;
    for i in 0..perms.len() {
        for j in i + 1..perms.len() {
            let mut hist = [[0u32; 4]; 4];
            for p in [&perms[i], &perms[j]] {
                for x in 0..4 {
                    for y in x + 1..4 {
                        hist[p[x] as usize][p[y] as usize] += 1;
                    }
                }
            }
            let ok = (0..4).all(|x| (0..4).all(|y| x == y || hist[x][y] == 1));
            if ok {
                count += 1;
            }
        }
    }
    count
}

/// Independent exhaustive volume-2 splitter: does any pair of blocks over
/// T1's points, disjoint from T1, cover exactly T1's ordered pairs?
fn oracle_volume2(b1: &OrderedBlock, b2: &OrderedBlock) -> bool {
    let mut points: Vec<u32> = b1.points().iter().chain(b2.points()).copied().collect();
    points.sort_unstable();
    points.dedup();
    let mut want: Vec<(u32, u32)> = b1.ordered_pairs().into_iter().chain(b2.ordered_pairs()).collect();
    want.sort_unstable();
    // all ordered 4-tuples over the union whose pairs are within `want`
    let mut candidates: Vec<OrderedBlock> = Vec::new();
    let n = points.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut idx = vec![a, b, c, d];
                    idx.sort_unstable();
                    idx.dedup();
                    if idx.len() != 4 {
                        continue;
                    }
                    let blk =
                        OrderedBlock::new(vec![points[a], points[b], points[c], points[d]])
                            .unwrap();
                    if blk == *b1 || blk == *b2 {
                        continue;
                    }
                    if blk.ordered_pairs().into_iter().all(|p| want.binary_search(&p).is_ok()) {
                        candidates.push(blk);
                    }
                }
            }
        }
    }
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let mut got: Vec<(u32, u32)> = candidates[i]
                .ordered_pairs().into_iter()
                .chain(candidates[j].ordered_pairs())
                .collect();
            got.sort_unstable();
            if got == want {
                return true;
            }
        }
    }
    false
}

#[test]
fn criterion_10_oracles() {
    // completion counting vs independent permutation enumeration
    let p = PartialDesign::new(DesignParams::dd4(4), Vec::new()).unwrap();
    let res = defset::count_completions(&p, None).unwrap();
    assert_eq!(res.count, 12);
    assert_eq!(res.count as usize, oracle_count_dd4());

    // volume2_witness vs the exhaustive splitter on 100 random pairs each
    // from dd-10 and dd-16
    let mut rng = StdRng::seed_from_u64(20260823);
    for id in ["dd-10", "dd-16"] {
        let d = directed(id);
        let b = d.blocks.len();
        for _ in 0..100 {
            let i = rng.gen_range(0..b);
            let j = loop {
                let j = rng.gen_range(0..b);
                if j != i {
                    break j;
                }
            };
            let witness = trades::volume2_witness(&d.blocks[i], &d.blocks[j]);
            let oracle = oracle_volume2(&d.blocks[i], &d.blocks[j]);
            assert_eq!(witness.is_some(), oracle, "{id} pair ({i},{j})");
            if let Some(w) = witness {
                let t1 = [d.blocks[i].clone(), d.blocks[j].clone()];
                assert!(trades::is_directed_trade(&t1, &w));
            }
        }
    }
    println!("criterion 10: pass");
}

/// Extra coverage beyond the numbered criteria: the asymptotic family
/// recipe builds a full design from the shipped 6^4 9^1 master.
#[test]
fn asymptotic_l33_full_build() {
    let ing = Ingredients::with_dir(ingredient_dir());
    let master = match ing.named("gdd-6^4-9^1").unwrap() {
        ParsedDesign::Grouped(g) => g,
        _ => panic!("expected a grouped master"),
    };
    let d = constructions::asymptotic_recipe(AsymptoticFamily::V12kPlus19, 4, &master, &ing).unwrap();
    assert_eq!(d.params.v, 67);
    assert_eq!(d.blocks.len(), 737);
    assert!(verify::verify_directed_design(&d).pass());
    // built on the f >= 5/8 ingredient, which is not super-simple
    assert!(!verify::is_super_simple(&d).pass());
}

/// Extra coverage: the general-case recipe path through a PBD file.
#[test]
fn general_recipe_v37() {
    let ing = Ingredients::with_dir(ingredient_dir());
    let d = constructions::existence_recipe(37, &ing).unwrap();
    assert_eq!(d.blocks.len(), 222);
    assert!(verify::verify_directed_design(&d).pass());
    assert!(verify::is_super_simple(&d).pass());
}
