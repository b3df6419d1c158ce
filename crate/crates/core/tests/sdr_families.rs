use sandpile::engine::{group_identity, max_config, oplus, stabilize};
use sandpile::families::{
    example_graph, iterated_wheel, regular_tournament, regular_tree, star_of_cyclic,
    two_layer_graph,
};
use sandpile::sdr::{check_sdr, distance_partition, sdr_identity, wave_topple, SdrProfile};
use sandpile::{Config, MultiDigraph};

fn sdr_corpus() -> Vec<(String, MultiDigraph)> {
    let mut out = Vec::new();
    for n in 2..=5 {
        for d in 1..=3 {
            out.push((format!("wheel({n},{d})"), iterated_wheel(n, d).unwrap()));
        }
    }
    for n in 3..=4 {
        for d in 2..=4 {
            out.push((format!("tree({n},{d})"), regular_tree(n, d).unwrap()));
        }
    }
    for k in 1..=3 {
        for r in 1..=3 {
            out.push((
                format!("tournament({k},{r})"),
                regular_tournament(k, r, 0).unwrap(),
            ));
        }
    }
    out.push(("two-layer".into(), two_layer_graph()));
    for name in ["petersen", "cube", "k5", "c6"] {
        out.push((name.into(), distance_regular(name)));
    }
    out
}

/// Undirected distance-regular graphs with vertex 0 as the sink and its
/// out-edges removed.
fn distance_regular(name: &str) -> MultiDigraph {
    let pairs: Vec<(usize, usize)> = match name {
        "petersen" => {
            let mut p = Vec::new();
            for i in 0..5 {
                p.push((i, (i + 1) % 5));
                p.push((i, i + 5));
                p.push((i + 5, (i + 2) % 5 + 5));
            }
            p
        }
        "cube" => (0..8usize)
            .flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b))))
            .filter(|(u, v)| u < v)
            .collect(),
        "k5" => (0..5)
            .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
            .collect(),
        "c6" => (0..6).map(|i| (i, (i + 1) % 6)).collect(),
        _ => unreachable!(),
    };
    let n = pairs.iter().map(|&(u, v)| u.max(v)).max().unwrap() + 1;
    let g = MultiDigraph::new(
        n,
        0,
        pairs.iter().flat_map(|&(u, v)| [(u, v, 1), (v, u, 1)]),
    )
    .unwrap();
    g.sink_strip()
}

fn params(p: &SdrProfile) -> Vec<(u64, u64, u64)> {
    (1..=p.d()).map(|i| (p.a(i), p.b(i), p.c(i))).collect()
}

#[test]
fn closed_form_matches_dynamics() {
    for (name, g) in sdr_corpus() {
        let p = check_sdr(&g).unwrap_or_else(|v| panic!("{name}: {v}"));
        let e = sdr_identity(&p, &g);
        assert_eq!(e, group_identity(&g).unwrap(), "{name}");
        for i in 1..=p.d() {
            let k = p.coefficient(i);
            assert!(k < p.degree(i), "{name}: layer {i} unstable");
            if i < p.d() {
                assert!(k >= p.a(i) + p.b(i) && k >= 1, "{name}: layer {i} empty");
            }
        }
    }
}

#[test]
fn distance_regular_intersection_numbers() {
    // (a_i, b_i, c_i) with b_d = 0
    let want: &[(&str, &[(u64, u64, u64)])] = &[
        ("petersen", &[(0, 2, 1), (2, 0, 1)]),
        ("cube", &[(0, 2, 1), (0, 1, 2), (0, 0, 3)]),
        ("k5", &[(3, 0, 1)]),
        ("c6", &[(0, 1, 1), (0, 1, 1), (0, 0, 2)]),
    ];
    for &(name, expected) in want {
        let p = check_sdr(&distance_regular(name)).unwrap();
        assert_eq!(params(&p), expected, "{name}");
    }
}

#[test]
fn family_parameters() {
    let p = check_sdr(&regular_tree(4, 4).unwrap()).unwrap();
    assert_eq!(params(&p), vec![(0, 1, 3), (0, 1, 3), (0, 1, 3), (0, 0, 4)]);
    let sizes: Vec<usize> = p.layers().iter().map(Vec::len).collect();
    assert_eq!(sizes, vec![36, 12, 4, 1]);

    for (k, r) in [(1, 1), (2, 3), (3, 2)] {
        let p = check_sdr(&regular_tournament(k, r, 7).unwrap()).unwrap();
        assert_eq!(params(&p), vec![(k as u64, 0, r)]);
    }

    let g = iterated_wheel(5, 3).unwrap();
    let layers = distance_partition(&g).unwrap();
    assert_eq!(layers.len(), 4);
    for (i, layer) in layers.iter().enumerate().skip(1) {
        let want: Vec<usize> = (1 + 5 * (i - 1)..1 + 5 * i).collect();
        assert_eq!(layer, &want);
    }
    let p = check_sdr(&g).unwrap();
    for i in 1..=3 {
        assert_eq!(p.n(i), 2 + 3 * (3 - i as u64));
    }
}

#[test]
fn non_sdr_graphs_carry_a_witness() {
    let v = check_sdr(&example_graph()).unwrap_err();
    assert!(v.layer >= 1);
    let g = star_of_cyclic(&[1, 2]).unwrap();
    let v = check_sdr(&g).unwrap_err();
    assert_eq!((v.vertex, v.expected, v.found), (2, 1, 2));
}

/// Replays `U_1^{n_1} ⋯ U_d^{n_d}` on `e + e`, counting how often each
/// vertex topples.
fn replay(g: &MultiDigraph, p: &SdrProfile, e: &Config) -> (Config, Vec<u64>) {
    let mut x = e.checked_add(e).unwrap();
    let mut topples = vec![0u64; g.non_sink_count()];
    for i in (1..=p.d()).rev() {
        for _ in 0..p.n(i) {
            x = wave_topple(g, p, &x, i).unwrap();
            for j in i..=p.d() {
                for &v in p.layer(j) {
                    topples[g.position(v).unwrap()] += 1;
                }
            }
        }
    }
    (x, topples)
}

#[test]
fn wave_replay_reproduces_stabilization() {
    for (name, g) in sdr_corpus() {
        let p = check_sdr(&g).unwrap();
        let e = sdr_identity(&p, &g);
        let (x, topples) = replay(&g, &p, &e);
        assert_eq!(x, e, "{name}: waves do not return to e");
        let s = stabilize(&g, &e.checked_add(&e).unwrap()).unwrap();
        assert_eq!(s.config, e, "{name}");
        assert_eq!(s.topples, topples, "{name}: topple counts differ");
    }
}

#[test]
fn wave_preconditions_are_enforced() {
    let g = two_layer_graph();
    let p = check_sdr(&g).unwrap();
    // layer 2 short of deg − c
    let x = Config::new(vec![5, 5, 0, 1, 1, 1]);
    assert!(wave_topple(&g, &p, &x, 1).is_err());
    assert!(wave_topple(&g, &p, &x, 0).is_err());
    assert!(wave_topple(&g, &p, &Config::new(vec![5, 5]), 1).is_err());
}

#[test]
fn published_identities() {
    let f3 = two_layer_graph();
    assert_eq!(group_identity(&f3).unwrap(), max_config(&f3));
    let t = regular_tree(3, 3).unwrap();
    let e = group_identity(&t).unwrap();
    assert_eq!(e.grains(), &[0, 2, 2, 2, 1, 1, 1, 1, 1, 1]);
    let k1 = regular_tournament(1, 2, 0).unwrap();
    assert_eq!(group_identity(&k1).unwrap().grains(), &[2, 2, 2]);
    for k in 1..=3 {
        let g = regular_tournament(k, 1, 0).unwrap();
        assert_eq!(group_identity(&g).unwrap(), max_config(&g));
    }
    // idempotent under the engine as well
    let e = group_identity(&f3).unwrap();
    assert_eq!(oplus(&f3, &e, &e).unwrap(), e);
}

#[test]
fn generators_are_deterministic() {
    for (name, g) in sdr_corpus() {
        let again = sdr_corpus()
            .into_iter()
            .find(|(n, _)| *n == name)
            .unwrap()
            .1;
        assert_eq!(g.to_text(), again.to_text());
    }
}
