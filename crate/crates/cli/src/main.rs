//! `sandpile`: command-line front end for sandpile-core.
//!
//! Exit codes: 0 on success, 1 when `check-monoid` finds an obstruction or
//! `identity --sdr` sees the closed form disagree with the dynamics, 2 for
//! unreadable or invalid input (including usage errors and exceeded caps).

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sandpile::checker::{realizability_report, validate_table, MonoidTable};
use sandpile::components::cyclic_strong_components;
use sandpile::engine::{group_identity, stabilize};
use sandpile::families;
use sandpile::monoid::{enumerate_monoid, idempotents};
use sandpile::sdr::{check_sdr, sdr_identity};
use sandpile::{Caps, Config, MultiDigraph, VertexSet};

#[derive(Parser)]
#[command(
    name = "sandpile",
    version,
    about = "Sandpile monoids and groups on directed multigraphs"
)]
struct Cli {
    /// Output style; `records` prints one JSON object per line.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,

    /// Largest monoid that may be enumerated.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    cap_elements: u64,

    /// Largest monoid for which a full Cayley table is built.
    #[arg(long, default_value_t = 1_000, global = true)]
    cap_table: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Print the identity of the sandpile group.
    Identity {
        /// Graph file, or `-` for stdin.
        graph: String,
        /// Also compute the closed-form identity for sink-distance-regular
        /// graphs (after removing the sink's out-edges) and compare.
        #[arg(long)]
        sdr: bool,
    },
    /// List every idempotent with its filter, A(e), S(e) and |G_e|.
    Idempotents { graph: String },
    /// Print |M|, |G|, the recurrent fraction and the group's invariant
    /// factors.
    Monoid {
        graph: String,
        /// Write the full Cayley table to this file (`-` for stdout).
        #[arg(long)]
        export_table: Option<String>,
    },
    /// Test a Cayley table against known obstructions to being a sandpile
    /// monoid. Exit 0: no known obstruction, 1: obstructed, 2: invalid table.
    CheckMonoid { table: String },
    /// Stabilize a configuration and report topple counts.
    Stabilize { graph: String, config: String },
    /// Emit a graph from one of the built-in families.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    /// One vertex per k with k edges to the sink.
    Star {
        #[arg(required = true)]
        ks: Vec<u64>,
    },
    /// Undirected n-cycle with one vertex as the sink.
    Cycle { n: usize },
    /// d concentric n-cycles around a central sink.
    Wheel { n: usize, d: usize },
    /// n-regular tree with d levels; leaves send n−1 edges to the sink.
    Tree { n: usize, d: usize },
    /// Rotational tournament on 2k+1 vertices with r edges to the sink.
    Tournament {
        k: usize,
        r: u64,
        /// Reserved for other regular tournaments; the rotational one
        /// ignores it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The fourteen-vertex example with three cyclic components.
    Example,
    /// A small two-layer sink-distance-regular graph.
    TwoLayer,
}

/// An error that maps to exit code 2.
struct Invalid(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.into())
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn read_graph(path: &str) -> Result<MultiDigraph> {
    MultiDigraph::from_text(&read_input(path)?).with_context(|| format!("parsing graph {path}"))
}

fn set_text(s: &VertexSet) -> String {
    let items: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn emit(format: Format, record: Value, human: impl FnOnce() -> String) {
    match format {
        Format::Records => println!("{record}"),
        Format::Human => print!("{}", human()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Invalid> {
    let caps = Caps {
        elements: cli.cap_elements,
        table: cli.cap_table,
    };
    let format = cli.format;
    match &cli.command {
        Command::Identity { graph, sdr } => cmd_identity(format, graph, *sdr),
        Command::Idempotents { graph } => cmd_idempotents(format, graph, &caps),
        Command::Monoid {
            graph,
            export_table,
        } => cmd_monoid(format, graph, export_table.as_deref(), &caps),
        Command::CheckMonoid { table } => cmd_check_monoid(format, table),
        Command::Stabilize { graph, config } => cmd_stabilize(format, graph, config),
        Command::Generate { family } => cmd_generate(format, family),
    }
}

fn cmd_identity(format: Format, path: &str, sdr: bool) -> Result<u8, Invalid> {
    let g = read_graph(path)?;
    let e = group_identity(&g)?;
    if !sdr {
        emit(format, json!({"kind": "identity", "config": e}), || {
            format!("{e}\n")
        });
        return Ok(0);
    }
    let stripped = g.sink_strip();
    match check_sdr(&stripped) {
        Ok(profile) => {
            let closed = sdr_identity(&profile, &stripped);
            let agree = closed == e;
            emit(
                format,
                json!({
                    "kind": "identity",
                    "config": e,
                    "sdr": {"profile": profile, "closed_form": closed, "agree": agree},
                }),
                || {
                    format!(
                        "{e}\n{}SDR: {}\n",
                        profile.to_text(),
                        if agree { "agree" } else { "disagree" }
                    )
                },
            );
            Ok(if agree { 0 } else { 1 })
        }
        Err(v) => {
            emit(
                format,
                json!({"kind": "identity", "config": e, "sdr": {"violation": v}}),
                || format!("{e}\nSDR: not sink-distance-regular ({v})\n"),
            );
            Ok(0)
        }
    }
}

fn cmd_idempotents(format: Format, path: &str, caps: &Caps) -> Result<u8, Invalid> {
    let g = read_graph(path)?;
    let p = cyclic_strong_components(&g);
    for (i, rec) in idempotents(&g, caps)?.iter().enumerate() {
        let comps: Vec<&[usize]> = rec
            .filter
            .members()
            .iter()
            .map(|&c| p.component(c))
            .collect();
        emit(
            format,
            json!({
                "kind": "idempotent",
                "index": i,
                "filter": rec.filter.members(),
                "components": comps,
                "config": rec.config,
                "support": rec.support,
                "a_set": rec.a_set,
                "s_vertices": rec.s_vertices,
                "max_subgroup_order": rec.max_subgroup_order,
            }),
            || {
                let comps: Vec<String> = comps
                    .iter()
                    .map(|c| set_text(&c.iter().copied().collect()))
                    .collect();
                let order = rec
                    .max_subgroup_order
                    .map_or("above cap".to_string(), |k| k.to_string());
                format!(
                    "e{i}\n  filter: [{}]\n  config: {}\n  A(e): {}\n  S(e): {}\n  |G_e|: {order}\n",
                    comps.join(", "),
                    rec.config,
                    set_text(&rec.a_set),
                    set_text(&rec.s_vertices),
                )
            },
        );
    }
    Ok(0)
}

fn cmd_monoid(
    format: Format,
    path: &str,
    export: Option<&str>,
    caps: &Caps,
) -> Result<u8, Invalid> {
    let g = read_graph(path)?;
    let m = enumerate_monoid(&g, caps)?;
    let group = m.recurrent_count();
    let factors = m.invariant_factors(&g)?;
    let fraction = group as f64 / m.len() as f64;
    if let Some(out) = export {
        let table = m.to_table()?.to_text();
        if out == "-" {
            print!("{table}");
        } else {
            fs::write(out, table).with_context(|| format!("writing {out}"))?;
        }
    }
    emit(
        format,
        json!({
            "kind": "monoid",
            "order": m.len(),
            "group_order": group,
            "recurrent_fraction": fraction,
            "invariant_factors": factors,
        }),
        || {
            format!(
                "|M| = {}\n|G| = {group}\nrecurrent fraction = {group}/{} ({fraction:.6})\ninvariant factors = {factors:?}\n",
                m.len(),
                m.len()
            )
        },
    );
    Ok(0)
}

fn cmd_check_monoid(format: Format, path: &str) -> Result<u8, Invalid> {
    let table = MonoidTable::from_text(&read_input(path)?)
        .with_context(|| format!("parsing table {path}"))?;
    if let Err(v) = validate_table(&table) {
        return Err(Invalid(anyhow::anyhow!("not a commutative monoid: {v}")));
    }
    let report = realizability_report(&table)?;
    let obstructed = report.is_obstructed();
    emit(
        format,
        json!({"kind": "realizability", "report": report, "obstructed": obstructed}),
        || {
            let mut s = format!(
                "order {}, {} idempotents\n",
                report.order, report.idempotent_count
            );
            if obstructed {
                s.push_str("obstructed:\n");
                for o in &report.obstructions {
                    s.push_str(&format!("  {o}\n"));
                }
            } else {
                s.push_str("no known obstruction\n");
            }
            s
        },
    );
    Ok(if obstructed { 1 } else { 0 })
}

fn cmd_stabilize(format: Format, graph: &str, config: &str) -> Result<u8, Invalid> {
    let g = read_graph(graph)?;
    let c = Config::from_text(&read_input(config)?)
        .with_context(|| format!("parsing configuration {config}"))?;
    let s = stabilize(&g, &c)?;
    let total: u128 = s.topples.iter().map(|&k| k as u128).sum();
    // JSON numbers stop at u64; larger totals go out as decimal strings
    let total_json = u64::try_from(total).map_or_else(|_| json!(total.to_string()), |t| json!(t));
    emit(
        format,
        json!({"kind": "stabilized", "config": s.config, "topples": s.topples, "total_topples": total_json}),
        || {
            let t: Vec<String> = s.topples.iter().map(u64::to_string).collect();
            format!("{}\ntopples: {}\ntotal: {total}\n", s.config, t.join(" "))
        },
    );
    Ok(0)
}

fn cmd_generate(format: Format, family: &Family) -> Result<u8, Invalid> {
    let g = match family {
        Family::Star { ks } => families::star_of_cyclic(ks)?,
        Family::Cycle { n } => families::cycle(*n)?,
        Family::Wheel { n, d } => families::iterated_wheel(*n, *d)?,
        Family::Tree { n, d } => families::regular_tree(*n, *d)?,
        Family::Tournament { k, r, seed } => families::regular_tournament(*k, *r, *seed)?,
        Family::Example => families::example_graph(),
        Family::TwoLayer => families::two_layer_graph(),
    };
    emit(
        format,
        json!({
            "kind": "graph",
            "vertex_count": g.vertex_count(),
            "sink": g.sink(),
            "edges": g.edges(),
        }),
        || g.to_text(),
    );
    Ok(0)
}
