use lipdist::validate::{carleson_exactness, distance_separation, Settings};

#[test]
fn absurd_theta_breaks_divergence_criteria() {
    let s = Settings {
        theta: 10.0,
        ..Settings::default()
    };
    let r = distance_separation(&s);
    assert!(!r.passed, "{}", r.line());
    assert!(r.details.iter().any(|d| d.ends_with("FAIL")));
}

#[test]
fn exactness_line_mentions_result() {
    let r = carleson_exactness(&Settings::default());
    assert!(r.passed);
    assert!(r.line().contains("PASS"));
}
