//! The generator labelings are frozen as graph6 fixtures; a change in any
//! construction shows up here before it silently breaks certificates.

use z4z2::generators;
use z4z2::graph6::{parse_graph6_lines, to_graph6};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/tests/fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

#[test]
fn controls_match_golden_fixtures() {
    let want: Vec<String> = generators::controls()
        .iter()
        .map(|(_, g)| to_graph6(g))
        .collect();
    let got: Vec<String> = parse_graph6_lines(&fixture("controls.g6"))
        .unwrap()
        .iter()
        .map(to_graph6)
        .collect();
    assert_eq!(want, got);
}

#[test]
fn named_snarks_match_golden_fixtures() {
    for (name, g) in [
        ("petersen.g6", generators::petersen()),
        ("blanusa1.g6", generators::blanusa(1).unwrap()),
        ("blanusa2.g6", generators::blanusa(2).unwrap()),
        ("flower5.g6", generators::flower(5).unwrap()),
        ("flower7.g6", generators::flower(7).unwrap()),
    ] {
        assert_eq!(
            fixture(name).trim(),
            to_graph6(&g),
            "labeling drifted for {name}"
        );
    }
}

#[test]
fn fixtures_parse_to_the_same_labeled_graphs() {
    let gs = parse_graph6_lines(&fixture("petersen.g6")).unwrap();
    assert_eq!(gs.len(), 1);
    assert_eq!(gs[0].edges(), generators::petersen().edges());
}
