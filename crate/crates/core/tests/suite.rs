use std::path::Path;

use spectral_transfer::suite::{load_suite, run_suite, validate, Suite};
use spectral_transfer::Error;

fn suite_from(text: &str) -> Suite {
    serde_json::from_str(text).unwrap()
}

#[test]
fn expected_failures_count_as_ok() {
    let s = suite_from(
        r#"{"probes":[
            {"name":"b","probe":"prox_regularity","set":"two_points","n":1,"point":[1.0],"radius":1.5,"trials":20,"seed":1,"expect":"fail"},
            {"name":"a","probe":"quartic_conjugate","y":[1.0,-2.0]}
        ]}"#,
    );
    let r = run_suite(&s, Path::new(".")).unwrap();
    assert!(r.pass);
    assert_eq!(r.entries.iter().map(|e| e.name.as_str()).collect::<Vec<_>>(), ["a", "b"]);
    assert!(!r.entries[1].probe_pass);
}

#[test]
fn unknown_sets_are_input_errors() {
    let s = suite_from(r#"{"probes":[{"name":"x","probe":"moreau_gradient","set":"torus","n":2,"seed":0}]}"#);
    assert!(matches!(validate(&s, Path::new(".")), Err(Error::InvalidInput(_))));
}

#[test]
fn shipped_suite_loads() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/suites/default.json");
    let s = load_suite(&path).unwrap();
    assert!(s.probes.len() >= 9);
    validate(&s, path.parent().unwrap()).unwrap();
}
