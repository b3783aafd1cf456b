//! `ddtk`: command-line front end for the directed-design toolkit.
//!
//! Exit codes: 0 success / property holds, 1 verification or property
//! failure (including "no design found"), 2 usage or input error.
//! `--json` emits the structured report documented in docs/report.schema.json.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde::Serialize;

use ddtk_core::catalog::{self, Loaded};
use ddtk_core::constructions::{self, GddSearch, Ingredients};
use ddtk_core::defset;
use ddtk_core::development::{self, DevelopedDesign, OrbitResolution};
use ddtk_core::format::{self, ParsedDesign};
use ddtk_core::model::{DesignParams, DirectedDesign, FRatio, GroupedKind, OrderedBlock};
use ddtk_core::trades::{self, BoundCertificate, BoundMode};
use ddtk_core::verify::{self, VerifyReport};
use ddtk_core::Error;

#[derive(Parser)]
#[command(
    name = "ddtk",
    version,
    about = "construction, verification and defining-set analysis of directed block designs"
)]
struct Cli {
    /// Emit the structured JSON report (see docs/report.schema.json)
    #[arg(long, global = true)]
    json: bool,
    /// Cap worker threads; outputs do not depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a design (catalog id, file path, or - for stdin)
    Verify {
        input: String,
        /// Additionally require super-simplicity
        #[arg(long)]
        super_simple: bool,
    },
    /// Develop base blocks and print the full design file
    Gen {
        input: String,
        /// Report the orbit-length resolution when one was needed
        #[arg(long)]
        resolve_orbits: bool,
    },
    /// List volume-2 trade edges of a design's trade graph
    Trades {
        input: String,
        /// Also list cyclical-trade components
        #[arg(long)]
        cycles: bool,
    },
    /// Defining-set lower bound with a checkable certificate
    Bound {
        input: String,
        /// Exact minimum vertex cover instead of the structural bound
        #[arg(long)]
        exact: bool,
    },
    /// Defining-set checks and smallest-defining-set search
    Defset {
        input: String,
        /// Check whether the blocks in this file form a defining set
        #[arg(long, value_name = "subset-file")]
        check: Option<PathBuf>,
        /// Search for a smallest defining set
        #[arg(long)]
        smallest: bool,
        /// Search budget in seconds
        #[arg(long, default_value_t = 60)]
        budget: u64,
    },
    /// Run a construction recipe for an order v (e.g. 40 or dd-40)
    Build {
        recipe: String,
        /// Directory of ingredient files for anything the catalog lacks
        #[arg(long, value_name = "dir")]
        ingredients: Option<PathBuf>,
    },
    /// Backtracking search for a GDD
    Search {
        /// Object to search for (only: gdd)
        object: String,
        /// Group type, e.g. "2^7" or "6^4 9^1"
        #[arg(long = "type", value_name = "spec")]
        type_: String,
        /// Allowed block sizes, comma separated
        #[arg(long, value_name = "sizes", default_value = "4")]
        k: String,
        /// Search budget in seconds
        #[arg(long, default_value_t = 60)]
        budget: u64,
    },
    /// Catalog operations (only: list)
    Catalog { action: String },
}

// ---------------------------------------------------------------- reports

#[derive(Serialize)]
struct Frac {
    numerator: u64,
    denominator: u64,
    exact: bool,
    decimal: f64,
}

impl Frac {
    fn from_ratio(f: FRatio) -> Self {
        Frac {
            numerator: f.numerator,
            denominator: f.denominator,
            exact: f.exactness == ddtk_core::model::Exactness::Exact,
            decimal: f.numerator as f64 / f.denominator as f64,
        }
    }

    fn display(&self) -> String {
        format!(
            "{}/{} ≈ {:.4}",
            self.numerator, self.denominator, self.decimal
        )
    }
}

#[derive(Serialize)]
#[serde(tag = "report", rename_all = "kebab-case")]
enum Report {
    Verify {
        input: String,
        kind: String,
        v: u32,
        blocks: usize,
        valid: bool,
        super_simple: Option<bool>,
        violations: Vec<serde_json::Value>,
    },
    Gen {
        input: String,
        blocks: usize,
        orbit_lengths: Option<Vec<usize>>,
        text: String,
    },
    Trades {
        input: String,
        blocks: usize,
        edges: Vec<(usize, usize)>,
        cycles: Option<Vec<Vec<usize>>>,
    },
    Bound {
        input: String,
        blocks: usize,
        certificate: BoundCertificate,
        certificate_checked: bool,
        f: Frac,
    },
    DefsetCheck {
        input: String,
        subset: Vec<usize>,
        defining: bool,
    },
    DefsetSmallest {
        input: String,
        blocks: usize,
        size: usize,
        witness: Vec<usize>,
        optimal: bool,
        f: Frac,
    },
    Build {
        recipe: String,
        v: u32,
        blocks: usize,
        text: String,
    },
    Search {
        status: String,
        text: Option<String>,
    },
    Catalog {
        entries: Vec<CatalogLine>,
    },
}

#[derive(Serialize)]
struct CatalogLine {
    id: String,
    summary: String,
    expected: catalog::Expected,
}

// ----------------------------------------------------------------- input

/// A design input resolved to developed form.
struct Design {
    name: String,
    loaded: Loaded,
    orbit_lengths: Option<Vec<usize>>,
}

fn read_source(input: &str) -> Result<(String, String), Error> {
    if input == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        return Ok(("<stdin>".into(), text));
    }
    if let Ok(entry) = catalog::get(input) {
        return Ok((input.into(), entry.text.into()));
    }
    let text = std::fs::read_to_string(input)?;
    Ok((input.into(), text))
}

fn develop_parsed(name: &str, parsed: ParsedDesign) -> Result<Design, Error> {
    let (loaded, orbit_lengths) = match parsed {
        ParsedDesign::Directed(d) => (Loaded::Directed(d), None),
        ParsedDesign::Grouped(g) => (Loaded::Grouped(g), None),
        ParsedDesign::Pbd(_) => {
            return Err(Error::Recipe(format!(
                "{name} is a PBD; verify/trades/bound/defset need a DD or (D)GDD"
            )))
        }
        ParsedDesign::Base(base) => {
            let needs_resolution = base.groups.is_empty()
                && base
                    .params
                    .expected_block_count()
                    .is_some_and(|want| base.total_blocks() as u64 != want);
            let (base, lengths) = if needs_resolution {
                match development::resolve_orbit_lengths(&base, &base.params.clone()) {
                    OrbitResolution::Resolved { base, lengths } => (base, Some(lengths)),
                    OrbitResolution::Discrepancy(rep) => {
                        return Err(Error::Recipe(format!(
                            "{name}: no orbit assignment verifies (full development {}, \
                             required {}, {} count-matching attempts failed)",
                            rep.full_count,
                            rep.required_count,
                            rep.attempts.len()
                        )))
                    }
                }
            } else {
                (base, None)
            };
            match development::develop(&base)? {
                DevelopedDesign::Directed(d) => (Loaded::Directed(d), lengths),
                DevelopedDesign::Grouped(g) => (Loaded::Grouped(g), lengths),
            }
        }
    };
    Ok(Design {
        name: name.into(),
        loaded,
        orbit_lengths,
    })
}

fn load_design(input: &str) -> Result<Design, Error> {
    let (name, text) = read_source(input)?;
    develop_parsed(&name, format::parse_design(&text)?)
}

/// Ordered-block view of any loaded design, for trade/defset analysis.
fn as_directed(d: &Design) -> Result<DirectedDesign, Error> {
    match &d.loaded {
        Loaded::Directed(dd) => Ok(dd.clone()),
        Loaded::Grouped(g) => DirectedDesign::new(
            DesignParams::new(2, g.v, 4, g.lambda),
            g.blocks.clone(),
        ),
    }
}

// ------------------------------------------------------------------ main

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("ddtk: could not configure the thread pool");
            return ExitCode::from(2);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.threads;

    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ddtk: {e}");
            ExitCode::from(match e {
                Error::ExceptionValue => 1,
                _ => 2,
            })
        }
    }
}

fn emit(json: bool, report: &Report, human: &str) {
    use std::io::Write;
    let out = std::io::stdout();
    // ignore broken pipes (e.g. piping into `head`)
    let _ = if json {
        writeln!(
            out.lock(),
            "{}",
            serde_json::to_string_pretty(report).unwrap()
        )
    } else {
        writeln!(out.lock(), "{human}")
    };
}

fn violations_json(rep: &VerifyReport) -> Vec<serde_json::Value> {
    rep.violations
        .iter()
        .map(|v| serde_json::to_value(v).unwrap())
        .collect()
}

fn params_name(d: &Design) -> (String, u32, usize) {
    match &d.loaded {
        Loaded::Directed(dd) => (
            format!(
                "2-({},{},{})DD",
                dd.params.v, dd.params.k, dd.params.lambda
            ),
            dd.params.v,
            dd.blocks.len(),
        ),
        Loaded::Grouped(g) => {
            let kind = match g.kind {
                GroupedKind::Dgdd => "DGDD",
                _ => "GDD",
            };
            let ty = g
                .group_type()
                .iter()
                .map(|(size, count)| format!("{size}^{count}"))
                .collect::<Vec<_>>()
                .join(" ");
            (format!("{kind} of type {ty}"), g.v, g.blocks.len())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.cmd {
        Cmd::Verify { input, super_simple } => {
            let d = load_design(input)?;
            let rep = match &d.loaded {
                Loaded::Directed(dd) => verify::verify_directed_design(dd),
                Loaded::Grouped(g) => verify::verify_grouped(g, false)?,
            };
            let ss = if *super_simple {
                Some(match &d.loaded {
                    Loaded::Directed(dd) => verify::is_super_simple(dd).pass(),
                    Loaded::Grouped(g) => verify::verify_grouped(g, true)?.pass(),
                })
            } else {
                None
            };
            let (kind, v, blocks) = params_name(&d);
            let valid = rep.pass();
            let ok = valid && ss != Some(false);
            let human = if ok {
                format!(
                    "valid {}{kind}, {blocks} blocks",
                    if ss == Some(true) { "super-simple " } else { "" }
                )
            } else if !valid {
                format!(
                    "INVALID {kind}: {} violation(s), first: {:?}",
                    rep.violations.len(),
                    rep.violations[0]
                )
            } else {
                format!("valid {kind}, {blocks} blocks, but NOT super-simple")
            };
            emit(
                cli.json,
                &Report::Verify {
                    input: d.name.clone(),
                    kind,
                    v,
                    blocks,
                    valid,
                    super_simple: ss,
                    violations: violations_json(&rep),
                },
                &human,
            );
            Ok(if ok { 0 } else { 1 })
        }

        Cmd::Gen { input, resolve_orbits } => {
            let d = load_design(input)?;
            let parsed = match d.loaded {
                Loaded::Directed(dd) => ParsedDesign::Directed(dd),
                Loaded::Grouped(g) => ParsedDesign::Grouped(g),
            };
            let blocks = match &parsed {
                ParsedDesign::Directed(dd) => dd.blocks.len(),
                ParsedDesign::Grouped(g) => g.blocks.len(),
                _ => unreachable!(),
            };
            let mut text = String::new();
            if *resolve_orbits {
                if let Some(lengths) = &d.orbit_lengths {
                    text.push_str(&format!("# resolved orbit lengths: {lengths:?}\n"));
                }
            }
            text.push_str(&format::serialize_design(&parsed));
            emit(
                cli.json,
                &Report::Gen {
                    input: d.name,
                    blocks,
                    orbit_lengths: d.orbit_lengths.clone(),
                    text: text.clone(),
                },
                text.trim_end(),
            );
            Ok(0)
        }

        Cmd::Trades { input, cycles } => {
            let d = load_design(input)?;
            let dd = as_directed(&d)?;
            let g = trades::build_trade_graph(&dd);
            let cyc = cycles.then(|| trades::cyclical_trade_components(&g));
            let mut human = format!(
                "{} blocks, {} volume-2 trade edges",
                dd.blocks.len(),
                g.edges.len()
            );
            for e in &g.edges {
                human.push_str(&format!("\nedge: {} {}", e.a, e.b));
            }
            if let Some(cyc) = &cyc {
                for c in cyc {
                    human.push_str(&format!(
                        "\ncycle ({} blocks): {}",
                        c.len(),
                        c.iter()
                            .map(|i| i.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    ));
                }
            }
            emit(
                cli.json,
                &Report::Trades {
                    input: d.name,
                    blocks: dd.blocks.len(),
                    edges: g.edges.iter().map(|e| (e.a, e.b)).collect(),
                    cycles: cyc,
                },
                &human,
            );
            Ok(0)
        }

        Cmd::Bound { input, exact } => {
            let d = load_design(input)?;
            let dd = as_directed(&d)?;
            let g = trades::build_trade_graph(&dd);
            let mode = if *exact {
                BoundMode::Exact
            } else {
                BoundMode::Structural
            };
            let cert = trades::lower_bound(&g, mode);
            let checked = trades::check_certificate(&g, &cert);
            let f = Frac::from_ratio(FRatio::lower_bound(
                cert.bound as u64,
                dd.blocks.len() as u64,
            ));
            let human = format!(
                "defining sets need >= {} of {} blocks, f >= {} ({} mode, certificate {})",
                cert.bound,
                dd.blocks.len(),
                f.display(),
                if *exact { "exact" } else { "structural" },
                if checked { "re-checked" } else { "NOT CONFIRMED" }
            );
            emit(
                cli.json,
                &Report::Bound {
                    input: d.name,
                    blocks: dd.blocks.len(),
                    certificate: cert,
                    certificate_checked: checked,
                    f,
                },
                &human,
            );
            Ok(if checked { 0 } else { 1 })
        }

        Cmd::Defset {
            input,
            check,
            smallest,
            budget,
        } => {
            let d = load_design(input)?;
            let dd = as_directed(&d)?;
            if let Some(path) = check {
                let subset = read_subset(path, &dd)?;
                let defining = defset::is_defining_set(&dd, &subset)?;
                let human = format!(
                    "{} of {} blocks: {}",
                    subset.len(),
                    dd.blocks.len(),
                    if defining {
                        "defining set (unique completion)"
                    } else {
                        "NOT a defining set"
                    }
                );
                emit(
                    cli.json,
                    &Report::DefsetCheck {
                        input: d.name,
                        subset,
                        defining,
                    },
                    &human,
                );
                return Ok(if defining { 0 } else { 1 });
            }
            if !smallest {
                return Err(Error::Recipe(
                    "defset needs --check <subset-file> or --smallest".into(),
                ));
            }
            let res = defset::smallest_defining_set(&dd, Duration::from_secs(*budget))?;
            let f = Frac::from_ratio(defset::f_ratio(&dd, res.size, res.optimal));
            let mut human = format!(
                "size {}{}, f {} {}",
                res.size,
                if res.optimal { "" } else { " (budget hit, not proven minimal)" },
                if res.optimal { "=" } else { "<=" },
                f.display()
            );
            for &i in &res.witness {
                human.push_str(&format!("\nblock {i}: {:?}", dd.blocks[i]));
            }
            emit(
                cli.json,
                &Report::DefsetSmallest {
                    input: d.name,
                    blocks: dd.blocks.len(),
                    size: res.size,
                    witness: res.witness.clone(),
                    optimal: res.optimal,
                    f,
                },
                &human,
            );
            Ok(0)
        }

        Cmd::Build { recipe, ingredients } => {
            let v: u32 = recipe
                .strip_prefix("dd-")
                .unwrap_or(recipe)
                .parse()
                .map_err(|_| Error::Recipe(format!("recipe {recipe:?} is not an order")))?;
            let ing = match ingredients {
                Some(dir) => Ingredients::with_dir(dir.clone()),
                None => Ingredients::catalog_only(),
            };
            let d = constructions::existence_recipe(v, &ing)?;
            let blocks = d.blocks.len();
            let text = format::serialize_design(&ParsedDesign::Directed(d));
            emit(
                cli.json,
                &Report::Build {
                    recipe: recipe.clone(),
                    v,
                    blocks,
                    text: text.clone(),
                },
                text.trim_end(),
            );
            Ok(0)
        }

        Cmd::Search {
            object,
            type_,
            k,
            budget,
        } => {
            if object != "gdd" {
                return Err(Error::Recipe(format!(
                    "unknown search object {object:?}; only `gdd` is supported"
                )));
            }
            let group_sizes = parse_type(type_)?;
            let block_sizes: Vec<usize> = k
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Recipe(format!("bad block size {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            match constructions::gdd_backtrack(
                &group_sizes,
                &block_sizes,
                Duration::from_secs(*budget),
            )? {
                GddSearch::Found(g) => {
                    let text = format::serialize_design(&ParsedDesign::Grouped(g));
                    emit(
                        cli.json,
                        &Report::Search {
                            status: "found".into(),
                            text: Some(text.clone()),
                        },
                        text.trim_end(),
                    );
                    Ok(0)
                }
                GddSearch::Exhausted => {
                    emit(
                        cli.json,
                        &Report::Search {
                            status: "exhausted".into(),
                            text: None,
                        },
                        "no such GDD: search space exhausted",
                    );
                    Ok(1)
                }
                GddSearch::BudgetExhausted => {
                    emit(
                        cli.json,
                        &Report::Search {
                            status: "budget-exhausted".into(),
                            text: None,
                        },
                        "search budget exhausted before a conclusion",
                    );
                    Ok(1)
                }
            }
        }

        Cmd::Catalog { action } => {
            if action != "list" {
                return Err(Error::Recipe(format!(
                    "unknown catalog action {action:?}; only `list` is supported"
                )));
            }
            let entries: Vec<CatalogLine> = catalog::entries()
                .iter()
                .map(|e| CatalogLine {
                    id: e.id.into(),
                    summary: e.summary.into(),
                    expected: e.expected,
                })
                .collect();
            let human = entries
                .iter()
                .map(|e| {
                    format!(
                        "{:12} {:>4} blocks{}  {}",
                        e.id,
                        e.expected.blocks,
                        if e.expected.verified { " " } else { "!" },
                        e.summary
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            emit(cli.json, &Report::Catalog { entries }, &human);
            Ok(0)
        }
    }
}

/// Read a subset file: one block per line, whitespace-separated points,
/// `#` comments; each block must occur in the design.
fn read_subset(path: &PathBuf, d: &DirectedDesign) -> Result<Vec<usize>, Error> {
    let text = std::fs::read_to_string(path)?;
    let index: BTreeMap<&[u32], usize> = d
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (b.points(), i))
        .collect();
    let mut subset = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let pts: Vec<u32> = line
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad point {t:?}"),
                })
            })
            .collect::<Result<_, _>>()?;
        let block = OrderedBlock::new(pts)?;
        let Some(&i) = index.get(block.points()) else {
            return Err(Error::Recipe(format!(
                "line {}: block {:?} is not in the design",
                lineno + 1,
                block
            )));
        };
        subset.push(i);
    }
    subset.sort_unstable();
    subset.dedup();
    Ok(subset)
}

fn parse_type(spec: &str) -> Result<Vec<usize>, Error> {
    let mut sizes = Vec::new();
    for token in spec.split([' ', ',']).filter(|t| !t.is_empty()) {
        let (g, u) = match token.split_once('^') {
            Some((g, u)) => (g, u),
            None => (token, "1"),
        };
        let g: usize = g
            .parse()
            .map_err(|_| Error::Recipe(format!("bad group size in {token:?}")))?;
        let u: usize = u
            .parse()
            .map_err(|_| Error::Recipe(format!("bad multiplicity in {token:?}")))?;
        if g == 0 || u == 0 {
            return Err(Error::Recipe(format!("zero in type token {token:?}")));
        }
        sizes.extend(std::iter::repeat(g).take(u));
    }
    if sizes.is_empty() {
        return Err(Error::Recipe(format!("empty group type {spec:?}")));
    }
    Ok(sizes)
}
