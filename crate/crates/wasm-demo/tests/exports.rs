use perfci_wasm::{analyze_json, blur_curve, compare_quantiles, quantile_json};

#[test]
fn independent_quantile_tracks_sidak() {
    let c = compare_quantiles(3, 0.0, 0.05, 100_000, 2).unwrap();
    assert!((c.q - c.sidak).abs() < 0.015);
    assert!(c.q > c.individual);
    let c = compare_quantiles(3, 1.0, 0.05, 100_000, 2).unwrap();
    assert!((c.q - c.individual).abs() < 0.015);
}

#[test]
fn errors_come_back_as_json() {
    let v: serde_json::Value = serde_json::from_str(&quantile_json(2, 1.5, 0.05, 1000, 0)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("1.5"));
    let v: serde_json::Value = serde_json::from_str(&analyze_json(
        "z,a\n1,2\n0,0\n",
        "accuracy",
        0.05,
        2,
        true,
        0,
    ))
    .unwrap();
    assert!(v["error"].as_str().unwrap().contains("non-binary"));
}

#[test]
fn analyze_reports_every_target() {
    let csv = "z,a,b\n1,1,1\n0,0,1\n1,0,1\n0,0,0\n1,1,0\n0,1,0\n1,1,1\n0,0,0\n";
    let v: serde_json::Value =
        serde_json::from_str(&analyze_json(csv, "accuracy f1", 0.05, 2, true, 1)).unwrap();
    let targets = v["targets"].as_array().unwrap();
    assert_eq!(targets.len(), 4);
    assert_eq!(targets[2]["rule"], "b");
    assert!(v["meta"]["q"].as_f64().unwrap() > 1.96);
}

#[test]
fn blurring_matters_only_for_small_n() {
    let points = blur_curve("accuracy", 0.45, 0.5, 0.5, 0.05, 100_000).unwrap();
    assert!(points.iter().all(|p| p.blurred >= p.plain));
    let first = &points[0];
    let last = points.last().unwrap();
    assert_eq!(first.n, 10);
    assert!(first.blurred / first.plain > 1.5);
    assert!(last.blurred / last.plain < 1.001);
    assert!(blur_curve("nope", 0.45, 0.5, 0.5, 0.05, 1000).is_err());
}
