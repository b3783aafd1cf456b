//! Line-oriented design file format.
//!
//! ```text
//! # comment
//! kind: DD            # DD | DGDD | GDD | PBD
//! v: 13
//! k: 4                # omitted for PBD
//! lambda: 1
//! groups: 0 4 8; 1 5 9; 2 6 10; 3 7 11      # optional
//! action: +1 mod 13                          # optional; makes it a base-block file
//! blocks:
//! 0 1 3 9
//! 1 0 11 5 | orbit: 13
//! 27 1 0 26 | action: +2 mod 52
//! ```
//!
//! Points are integers, or coordinate pairs `(c,j)` under the fix-first
//! action (canonicalized as `c * n + j`). Parsing and serialization
//! round-trip exactly.

use std::fmt::Write as _;

use crate::development::{Action, BaseBlock, BaseBlockSet, OrbitLength};
use crate::error::{Error, Result};
use crate::model::{
    DesignParams, DirectedDesign, GroupedDesign, GroupedKind, OrderedBlock, Pbd,
};

#[derive(Clone, Debug)]
pub enum ParsedDesign {
    Directed(DirectedDesign),
    Grouped(GroupedDesign),
    Base(BaseBlockSet),
    Pbd(Pbd),
}

impl ParsedDesign {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ParsedDesign::Directed(_) => "DD",
            ParsedDesign::Grouped(g) => match g.kind {
                GroupedKind::Dgdd => "DGDD",
                GroupedKind::Gdd => "GDD",
                GroupedKind::PbdDerived => "GDD",
            },
            ParsedDesign::Base(_) => "base blocks",
            ParsedDesign::Pbd(_) => "PBD",
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_action(s: &str, line: usize) -> Result<Action> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("fix-first") {
        let rest = rest.trim();
        let rest = rest.strip_prefix("+1").unwrap_or(rest).trim();
        let n = rest
            .strip_prefix("mod")
            .ok_or_else(|| err(line, "expected `fix-first +1 mod <n>`"))?
            .trim()
            .parse::<u32>()
            .map_err(|e| err(line, format!("bad modulus: {e}")))?;
        return Ok(Action::FixFirstCoordinate { modulus: n });
    }
    let rest = s
        .strip_prefix('+')
        .ok_or_else(|| err(line, "expected `+<step> mod <n>` or `fix-first +1 mod <n>`"))?;
    let (step, modulus) = rest
        .split_once("mod")
        .ok_or_else(|| err(line, "expected `mod <n>`"))?;
    let step = step
        .trim()
        .parse::<u32>()
        .map_err(|e| err(line, format!("bad step: {e}")))?;
    let modulus = modulus
        .trim()
        .parse::<u32>()
        .map_err(|e| err(line, format!("bad modulus: {e}")))?;
    Ok(Action::AddStep { step, modulus })
}

fn action_to_string(a: &Action) -> String {
    match a {
        Action::AddStep { step, modulus } => format!("+{step} mod {modulus}"),
        Action::FixFirstCoordinate { modulus } => format!("fix-first +1 mod {modulus}"),
    }
}

fn parse_point(tok: &str, action: Option<&Action>, line: usize) -> Result<u32> {
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let (c, j) = inner
            .split_once(',')
            .ok_or_else(|| err(line, format!("bad coordinate pair {tok:?}")))?;
        let c: u32 = c
            .trim()
            .parse()
            .map_err(|e| err(line, format!("bad coordinate {tok:?}: {e}")))?;
        let j: u32 = j
            .trim()
            .parse()
            .map_err(|e| err(line, format!("bad coordinate {tok:?}: {e}")))?;
        let Some(Action::FixFirstCoordinate { modulus }) = action else {
            return Err(err(
                line,
                "coordinate pairs need a `fix-first` action".to_string(),
            ));
        };
        if c > 1 || j >= *modulus {
            return Err(err(line, format!("coordinate pair {tok:?} out of range")));
        }
        Ok(c * modulus + j)
    } else {
        tok.parse()
            .map_err(|e| err(line, format!("bad point {tok:?}: {e}")))
    }
}

/// Parse a design file. The error carries the 1-based line number.
pub fn parse_design(text: &str) -> Result<ParsedDesign> {
    let mut kind: Option<String> = None;
    let mut v: Option<u32> = None;
    let mut k: Option<u32> = None;
    let mut lambda: Option<u32> = None;
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut action: Option<Action> = None;
    let mut in_blocks = false;
    let mut plain_blocks: Vec<OrderedBlock> = Vec::new();
    let mut base_blocks: Vec<BaseBlock> = Vec::new();
    let mut pbd_blocks: Vec<Vec<u32>> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if !in_blocks {
            if let Some(rest) = content.strip_prefix("kind:") {
                kind = Some(rest.trim().to_string());
            } else if let Some(rest) = content.strip_prefix("v:") {
                v = Some(
                    rest.trim()
                        .parse()
                        .map_err(|e| err(ln, format!("bad v: {e}")))?,
                );
            } else if let Some(rest) = content.strip_prefix("k:") {
                k = Some(
                    rest.trim()
                        .parse()
                        .map_err(|e| err(ln, format!("bad k: {e}")))?,
                );
            } else if let Some(rest) = content.strip_prefix("lambda:") {
                lambda = Some(
                    rest.trim()
                        .parse()
                        .map_err(|e| err(ln, format!("bad lambda: {e}")))?,
                );
            } else if let Some(rest) = content.strip_prefix("groups:") {
                for part in rest.split(';') {
                    let g: Vec<u32> = part
                        .split_whitespace()
                        .map(|t| {
                            t.parse()
                                .map_err(|e| err(ln, format!("bad group point {t:?}: {e}")))
                        })
                        .collect::<Result<_>>()?;
                    if !g.is_empty() {
                        groups.push(g);
                    }
                }
            } else if let Some(rest) = content.strip_prefix("action:") {
                action = Some(parse_action(rest, ln)?);
            } else if content == "blocks:" {
                in_blocks = true;
            } else {
                return Err(err(ln, format!("unexpected header line {content:?}")));
            }
            continue;
        }

        // block line, optionally with `| orbit: L` / `| action: ...` suffixes
        let mut parts = content.split('|');
        let block_part = parts.next().unwrap().trim();
        let mut orbit = OrbitLength::Full;
        let mut block_action = action;
        for suffix in parts {
            let suffix = suffix.trim();
            if let Some(rest) = suffix.strip_prefix("orbit:") {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|e| err(ln, format!("bad orbit length: {e}")))?;
                orbit = OrbitLength::Exact(n);
            } else if let Some(rest) = suffix.strip_prefix("action:") {
                block_action = Some(parse_action(rest, ln)?);
            } else {
                return Err(err(ln, format!("unknown block annotation {suffix:?}")));
            }
        }
        let pts: Vec<u32> = block_part
            .split_whitespace()
            .map(|t| parse_point(t, block_action.as_ref(), ln))
            .collect::<Result<_>>()?;
        let block = OrderedBlock::new(pts).map_err(|e| err(ln, e.to_string()))?;
        match (&kind, block_action) {
            (Some(kd), _) if kd == "PBD" => pbd_blocks.push(block.underlying()),
            (_, Some(act)) => base_blocks.push(BaseBlock {
                block,
                action: act,
                orbit,
            }),
            (_, None) => plain_blocks.push(block),
        }
    }

    let kind = kind.ok_or_else(|| err(0, "missing `kind:` header"))?;
    let v = v.ok_or_else(|| err(0, "missing `v:` header"))?;
    let lambda = lambda.unwrap_or(1);

    if kind == "PBD" {
        // unordered blocks of mixed size, no groups
        let blocks = if pbd_blocks.is_empty() {
            plain_blocks.iter().map(|b| b.underlying()).collect()
        } else {
            pbd_blocks
        };
        return Ok(ParsedDesign::Pbd(Pbd::new(v, blocks)?));
    }

    if !base_blocks.is_empty() {
        if !plain_blocks.is_empty() {
            return Err(err(0, "cannot mix developed and base blocks"));
        }
        let k = k.ok_or_else(|| err(0, "missing `k:` header"))?;
        let params = DesignParams::new(2, v, k, lambda);
        let set = BaseBlockSet {
            params,
            base: base_blocks,
            groups,
        };
        return Ok(ParsedDesign::Base(set));
    }

    match kind.as_str() {
        "DD" => {
            let k = k.ok_or_else(|| err(0, "missing `k:` header"))?;
            Ok(ParsedDesign::Directed(DirectedDesign::new(
                DesignParams::new(2, v, k, lambda),
                plain_blocks,
            )?))
        }
        "DGDD" | "GDD" => {
            if groups.is_empty() {
                return Err(err(0, format!("kind {kind} needs a `groups:` header")));
            }
            let gk = if kind == "DGDD" {
                GroupedKind::Dgdd
            } else {
                GroupedKind::Gdd
            };
            Ok(ParsedDesign::Grouped(GroupedDesign::new(
                v,
                groups,
                plain_blocks,
                lambda,
                gk,
            )?))
        }
        other => Err(err(0, format!("unknown kind {other:?}"))),
    }
}

/// Serialize back to the canonical text form; `parse(serialize(x)) == x`.
pub fn serialize_design(d: &ParsedDesign) -> String {
    let mut out = String::new();
    match d {
        ParsedDesign::Directed(dd) => {
            writeln!(out, "kind: DD").unwrap();
            writeln!(out, "v: {}", dd.params.v).unwrap();
            writeln!(out, "k: {}", dd.params.k).unwrap();
            writeln!(out, "lambda: {}", dd.params.lambda).unwrap();
            writeln!(out, "blocks:").unwrap();
            for b in &dd.blocks {
                writeln!(out, "{b}").unwrap();
            }
        }
        ParsedDesign::Grouped(g) => {
            let kind = match g.kind {
                GroupedKind::Dgdd => "DGDD",
                GroupedKind::Gdd | GroupedKind::PbdDerived => "GDD",
            };
            writeln!(out, "kind: {kind}").unwrap();
            writeln!(out, "v: {}", g.v).unwrap();
            if let Some(b) = g.blocks.first() {
                writeln!(out, "k: {}", b.len()).unwrap();
            }
            writeln!(out, "lambda: {}", g.lambda).unwrap();
            let groups = g
                .groups
                .iter()
                .map(|grp| {
                    grp.iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join("; ");
            writeln!(out, "groups: {groups}").unwrap();
            writeln!(out, "blocks:").unwrap();
            for b in &g.blocks {
                writeln!(out, "{b}").unwrap();
            }
        }
        ParsedDesign::Base(base) => {
            let kind = if base.groups.is_empty() { "DD" } else { "DGDD" };
            writeln!(out, "kind: {kind}").unwrap();
            writeln!(out, "v: {}", base.params.v).unwrap();
            writeln!(out, "k: {}", base.params.k).unwrap();
            writeln!(out, "lambda: {}", base.params.lambda).unwrap();
            if !base.groups.is_empty() {
                let groups = base
                    .groups
                    .iter()
                    .map(|grp| {
                        grp.iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect::<Vec<_>>()
                    .join("; ");
                writeln!(out, "groups: {groups}").unwrap();
            }
            // common action goes in the header; per-block overrides as suffixes
            let common = base.base.first().map(|bb| bb.action);
            let all_same = base.base.iter().all(|bb| Some(bb.action) == common);
            if let (Some(act), true) = (common, all_same) {
                writeln!(out, "action: {}", action_to_string(&act)).unwrap();
            }
            writeln!(out, "blocks:").unwrap();
            for bb in &base.base {
                write!(out, "{}", bb.block).unwrap();
                if !(all_same && common.is_some()) {
                    write!(out, " | action: {}", action_to_string(&bb.action)).unwrap();
                }
                if let OrbitLength::Exact(n) = bb.orbit {
                    write!(out, " | orbit: {n}").unwrap();
                }
                writeln!(out).unwrap();
            }
        }
        ParsedDesign::Pbd(p) => {
            writeln!(out, "kind: PBD").unwrap();
            writeln!(out, "v: {}", p.v).unwrap();
            writeln!(out, "lambda: 1").unwrap();
            writeln!(out, "blocks:").unwrap();
            for b in &p.blocks {
                let line = b
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(out, "{line}").unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::block;

    #[test]
    fn round_trip_dd4() {
        let d = DirectedDesign::new(
            DesignParams::dd4(4),
            vec![block([0, 1, 2, 3]), block([3, 2, 1, 0])],
        )
        .unwrap();
        let text = serialize_design(&ParsedDesign::Directed(d.clone()));
        assert!(text.starts_with("kind: DD\nv: 4\nk: 4\nlambda: 1\n"));
        match parse_design(&text).unwrap() {
            ParsedDesign::Directed(d2) => assert_eq!(d2, d),
            other => panic!("wrong kind: {}", other.kind_name()),
        }
    }

    #[test]
    fn base_block_file_with_action() {
        let text = "kind: DGDD\nv: 18\nk: 4\nlambda: 1\n\
                    groups: 0 6 12; 1 7 13; 2 8 14; 3 9 15; 4 10 16; 5 11 17\n\
                    action: +2 mod 18\nblocks:\n5 10 2 0\n14 1 10 5\n15 0 4 11\n11 4 3 1\n0 1 3 2\n";
        match parse_design(text).unwrap() {
            ParsedDesign::Base(b) => {
                assert_eq!(b.base.len(), 5);
                assert_eq!(b.base[0].orbit_len(), 9);
                assert_eq!(b.total_blocks(), 45);
            }
            other => panic!("wrong kind: {}", other.kind_name()),
        }
    }

    #[test]
    fn coordinate_pairs_canonicalize() {
        let text = "kind: DD\nv: 22\nk: 4\nlambda: 1\naction: fix-first +1 mod 11\nblocks:\n\
                    (0,0) (0,3) (0,9) (0,10)\n";
        match parse_design(text).unwrap() {
            ParsedDesign::Base(b) => {
                assert_eq!(b.base[0].block, block([0, 3, 9, 10]));
            }
            other => panic!("wrong kind: {}", other.kind_name()),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "kind: DD\nv: 4\nk: 4\nblocks:\n0 1 1 2\n";
        match parse_design(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "kind: DD\nv: 4\nk: 4\nblocks:\n0 1 2 9\n";
        assert!(parse_design(text).is_err());
    }
}
