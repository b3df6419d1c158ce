//! Browser bindings for sandpile-core.
//!
//! Every export takes plain strings and returns a JSON string, either the
//! result or `{"error": "..."}`, so the same functions run in native tests.
//! Graphs travel in the text format of `MultiDigraph::to_text`.

use std::f64::consts::TAU;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use sandpile::engine::{group_identity, max_config, stabilize};
use sandpile::families;
use sandpile::monoid::idempotents;
use sandpile::sdr::{check_sdr, distance_partition, sdr_identity};
use sandpile::{Caps, Config, MultiDigraph};

/// Demo pages stay small; anything bigger is refused rather than frozen on.
const DEMO_CAPS: Caps = Caps {
    elements: 200_000,
    table: 0,
};

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse_graph(text: &str) -> Result<MultiDigraph, String> {
    MultiDigraph::from_text(text).map_err(|e| e.to_string())
}

fn parse_config(g: &MultiDigraph, text: &str) -> Result<Config, String> {
    let grains: Vec<u64> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if grains.len() != g.non_sink_count() {
        return Err(format!(
            "configuration has {} entries, graph has {} non-sink vertices",
            grains.len(),
            g.non_sink_count()
        ));
    }
    Ok(Config::new(grains))
}

/// Sink in the middle, vertex at distance `i` on ring `i`.
pub fn layout(g: &MultiDigraph) -> Vec<(usize, f64, f64)> {
    let layers = distance_partition(&g.sink_strip())
        .unwrap_or_else(|_| vec![vec![g.sink()], g.non_sink_vertices().to_vec()]);
    let mut out = Vec::with_capacity(g.vertex_count());
    for (i, layer) in layers.iter().enumerate() {
        let r = i as f64;
        // offset odd rings so radial edges do not all overlap
        let phase = if i % 2 == 1 { 0.5 } else { 0.0 };
        for (k, &v) in layer.iter().enumerate() {
            let t = TAU * (k as f64 + phase) / layer.len() as f64;
            out.push((v, r * t.cos(), r * t.sin()));
        }
    }
    out.sort_by_key(|p| p.0);
    out
}

fn graph_value(g: &MultiDigraph) -> Value {
    let positions: Vec<Value> = layout(g)
        .into_iter()
        .map(|(v, x, y)| json!({ "id": v, "x": x, "y": y }))
        .collect();
    json!({
        "text": g.to_text(),
        "sink": g.sink(),
        "non_sink": g.non_sink_vertices(),
        "degrees": g.degrees(),
        "edges": g.edges(),
        "positions": positions,
    })
}

fn family(name: &str, a: u32, b: u32) -> Result<MultiDigraph, String> {
    let (a, b) = (a as usize, b as usize);
    let g = match name {
        "wheel" => families::iterated_wheel(a, b),
        "tree" => families::regular_tree(a, b),
        "tournament" => families::regular_tournament(a, b as u64, 0),
        "cycle" => families::cycle(a),
        "example" => Ok(families::example_graph()),
        "two-layer" => Ok(families::two_layer_graph()),
        other => return Err(format!("unknown family {other}")),
    };
    g.map_err(|e| e.to_string())
}

/// A built-in graph with its drawing positions.
#[wasm_bindgen]
pub fn generate(name: &str, a: u32, b: u32) -> String {
    respond(family(name, a, b).map(|g| graph_value(&g)))
}

/// The group identity next to MAX, plus the closed form when the graph
/// (with the sink's out-edges removed) is sink-distance-regular.
#[wasm_bindgen]
pub fn identity_view(graph: &str) -> String {
    respond((|| {
        let g = parse_graph(graph)?;
        let e = group_identity(&g).map_err(|e| e.to_string())?;
        let stripped = g.sink_strip();
        let sdr = match check_sdr(&stripped) {
            Ok(p) => {
                let closed = sdr_identity(&p, &stripped);
                json!({
                    "profile": p,
                    "table": p.to_text(),
                    "closed_form": closed,
                    "agree": closed == e,
                })
            }
            Err(v) => json!({ "violation": v.to_string() }),
        };
        Ok(json!({ "identity": e, "max": max_config(&g), "sdr": sdr }))
    })())
}

/// Adds one grain at `vertex` to `config` (a JSON array) and stabilizes.
#[wasm_bindgen]
pub fn drop_grain(graph: &str, config: &str, vertex: u32) -> String {
    respond((|| {
        let g = parse_graph(graph)?;
        let c = parse_config(&g, config)?;
        let unit = Config::unit(&g, vertex as usize).map_err(|e| e.to_string())?;
        let c = c.checked_add(&unit).map_err(|e| e.to_string())?;
        let s = stabilize(&g, &c).map_err(|e| e.to_string())?;
        let total: u128 = s.topples.iter().map(|&k| k as u128).sum();
        Ok(json!({
            "config": s.config,
            "topples": s.topples,
            "total": total.to_string(),
        }))
    })())
}

/// Every idempotent with its support, A(e), S(e) and |G_e|.
#[wasm_bindgen]
pub fn idempotents_view(graph: &str) -> String {
    respond((|| {
        let g = parse_graph(graph)?;
        let recs = idempotents(&g, &DEMO_CAPS).map_err(|e| e.to_string())?;
        let list: Vec<Value> = recs
            .iter()
            .map(|r| {
                json!({
                    "config": r.config,
                    "support": r.support,
                    "a_set": r.a_set,
                    "s_vertices": r.s_vertices,
                    "group_order": r.max_subgroup_order,
                })
            })
            .collect();
        Ok(Value::Array(list))
    })())
}
