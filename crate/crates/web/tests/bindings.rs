use serde_json::Value;

use sandpile_web::{drop_grain, generate, idempotents_view, identity_view, layout};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn graph_text(name: &str, a: u32, b: u32) -> String {
    parse(&generate(name, a, b))["text"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn closed_form_agrees_on_families() {
    let v = parse(&identity_view(&graph_text("wheel", 5, 3)));
    assert_eq!(v["sdr"]["agree"], Value::Bool(true));
    assert_eq!(v["identity"], v["max"]);

    let v = parse(&identity_view(&graph_text("tree", 3, 3)));
    assert_eq!(v["sdr"]["agree"], Value::Bool(true));
    assert_eq!(
        v["identity"],
        serde_json::json!([0, 2, 2, 2, 1, 1, 1, 1, 1, 1])
    );
    assert_ne!(v["identity"], v["max"]);
}

#[test]
fn example_is_reported_as_not_sdr() {
    let v = parse(&identity_view(&graph_text("example", 0, 0)));
    assert!(v["sdr"]["violation"].is_string());
}

#[test]
fn dropping_a_grain_on_max_topples() {
    let g = graph_text("two-layer", 0, 0);
    let v = parse(&drop_grain(&g, "[4,4,1,1,1,1]", 1));
    // the identity is MAX here, and MAX + unit is recurrent again
    let topples: Vec<u64> = serde_json::from_value(v["topples"].clone()).unwrap();
    assert!(topples.iter().sum::<u64>() > 0);
    let v = parse(&drop_grain(&g, "[0,0,0,0,0,0]", 1));
    assert_eq!(v["config"], serde_json::json!([1, 0, 0, 0, 0, 0]));
    assert_eq!(v["total"], "0");
}

#[test]
fn bad_inputs_become_error_records() {
    let g = graph_text("two-layer", 0, 0);
    assert!(parse(&drop_grain(&g, "[1,2]", 1))["error"].is_string());
    assert!(parse(&drop_grain(&g, "[0,0,0,0,0,0]", 0))["error"].is_string());
    assert!(parse(&drop_grain("n 2", "[]", 1))["error"].is_string());
    assert!(parse(&generate("wheel", 1, 1))["error"].is_string());
    assert!(parse(&generate("hypercube", 3, 0))["error"].is_string());
}

#[test]
fn example_has_six_idempotents() {
    let v = parse(&idempotents_view(&graph_text("example", 0, 0)));
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 6);
    assert_eq!(list[0]["group_order"], 8);
    assert_eq!(list[2]["a_set"], serde_json::json!([2, 14]));
}

#[test]
fn layout_rings_follow_sink_distance() {
    let g = sandpile::families::regular_tree(3, 3).unwrap();
    let pos = layout(&g);
    assert_eq!(pos.len(), g.vertex_count());
    let radius = |v: usize| {
        let (_, x, y) = pos[v];
        (x * x + y * y).sqrt()
    };
    assert!(radius(g.sink()) < 1e-9);
    // leaves sit next to the sink, the root two rings further out
    assert!((radius(1) - 3.0).abs() < 1e-9);
    for leaf in 5..=10 {
        assert!((radius(leaf) - 1.0).abs() < 1e-9);
    }
}
