use icnmp_wasm::{rate_sweep_json, sharing_json, window_trace_json};
use serde_json::Value;

const FIG: &str = r#"{"paths": [
    {"delay_ms": 20, "rate_mbps": 10, "buffer_msgs": 20},
    {"delay_ms": 120, "rate_mbps": 10, "buffer_msgs": 20}]}"#;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn sweep_has_every_strategy() {
    let v = parse(rate_sweep_json(FIG, 1, "delay_ms", 20.0, 200.0, 20.0, 0.0).unwrap());
    assert_eq!(v["values"].as_array().unwrap().len(), 10);
    let curves = v["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 5);
    let fpf = curves.iter().find(|c| c["strategy"] == "fpf").unwrap();
    assert_eq!(fpf["w_max"][5], 111);
    assert!((fpf["model_mbps"][0].as_f64().unwrap() - 20.0).abs() < 1e-3);
    assert!(fpf["sim_mbps"].is_null());
}

#[test]
fn sweep_with_simulation() {
    let v = parse(rate_sweep_json(FIG, 1, "rate_mbps", 10.0, 20.0, 10.0, 100.0).unwrap());
    for c in v["curves"].as_array().unwrap() {
        let sim = c["sim_mbps"].as_array().unwrap();
        assert_eq!(sim.len(), 2);
        assert!(sim.iter().all(|x| x.as_f64().unwrap() > 5.0));
    }
}

#[test]
fn trace_reaches_landmark() {
    let v = parse(window_trace_json(FIG, "fpf", 100.0, 0).unwrap());
    assert_eq!(v["model_w_max"], 111);
    assert_eq!(v["capacities"], serde_json::json!([30, 81]));
    assert!(v["peaks"].as_array().unwrap().iter().all(|p| p == 113));
    let first = &v["trace"][0];
    assert_eq!(first, &serde_json::json!([0.0, 1]));
}

#[test]
fn sharing_curves() {
    let v = parse(sharing_json(FIG, "re", 70).unwrap());
    assert_eq!(v["per_path"][0][70], 62.0);
    assert_eq!(v["per_path"][1][70], 8.0);
    assert_eq!(v["w_max"], 30);
    let pe = parse(sharing_json(FIG, "pe", 3).unwrap());
    assert_eq!(pe["per_path"][1], serde_json::json!([0.0, 0.5, 1.0, 1.5]));
}

#[test]
fn errors_are_messages() {
    assert!(sharing_json("{}", "pe", 3)
        .unwrap_err()
        .starts_with("bad scenario"));
    assert_eq!(
        sharing_json(FIG, "max", 3).unwrap_err(),
        "unknown strategy `max` (expected one of pe, re, ug, cf, fpf)"
    );
    let neg = FIG.replace(
        "\"rate_mbps\": 10, \"buffer_msgs\": 20}]",
        "\"rate_mbps\": -1, \"buffer_msgs\": 20}]",
    );
    assert_eq!(
        window_trace_json(&neg, "pe", 10.0, 0).unwrap_err(),
        "path 2: rate must be positive (Mbps)"
    );
    assert!(window_trace_json(FIG, "pe", 1e6, 0).is_err());
    assert!(rate_sweep_json(FIG, 1, "buffer", 1.0, 2.0, 1.0, 0.0).is_err());
    assert!(rate_sweep_json(FIG, 1, "delay_ms", 1.0, 1e6, 1.0, 0.0).is_err());
    assert!(rate_sweep_json(FIG, 5, "delay_ms", 1.0, 2.0, 1.0, 0.0).is_err());
}
