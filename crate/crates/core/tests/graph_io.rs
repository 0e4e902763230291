//! Round-trip checks for the graph JSON format against committed fixtures.

use lrgmp::graph::{load_json, load_json_str, to_json_string};

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn fixture_loads_and_canonicalizes() {
    let (g, splits) = load_json(fixture("tiny.json")).unwrap();
    assert_eq!(g.num_nodes(), 4);
    assert_eq!(g.num_edges(), 8); // 4 undirected pairs, both directions
    assert_eq!(g.edge_dim(), 1);
    g.check_invariants().unwrap();
    let s = splits.unwrap();
    assert_eq!(s.train, vec![0, 2]);

    // Canonical order is sorted by (src, dst); payloads follow their edges.
    let i = g.edge_index(1, 0).unwrap();
    assert_eq!(g.edge_weights()[i], 0.5);
    assert_eq!(g.edge_feat().row(i), &[1.25]);
}

#[test]
fn save_after_load_matches_committed_canonical_form() {
    let (g, splits) = load_json(fixture("tiny.json")).unwrap();
    let text = to_json_string(&g, splits.as_ref()).unwrap();
    let want = std::fs::read_to_string(fixture("tiny_canonical.json")).unwrap();
    assert_eq!(text, want);
}

#[test]
fn load_save_load_is_identity() {
    let (g, splits) = load_json(fixture("tiny.json")).unwrap();
    let text = to_json_string(&g, splits.as_ref()).unwrap();
    let (g2, splits2) = load_json_str(&text).unwrap();
    assert_eq!(g, g2);
    assert_eq!(splits, splits2);

    // Canonical text is a fixed point of the round trip.
    let text2 = to_json_string(&g2, splits2.as_ref()).unwrap();
    assert_eq!(text, text2);
}
