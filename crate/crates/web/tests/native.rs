use rado_walk_web::{gap_sweep_json, kernel_row_json, tv_curve_json, MAX_CAP};
use serde_json::Value;

#[test]
fn kernel_row_at_root() {
    let v: Value = serde_json::from_str(&kernel_row_json("1/2", 0, 16).unwrap()).unwrap();
    assert_eq!(v["entries"][0]["j"], 1);
    assert_eq!(v["entries"][0]["value"], "3/4");
    assert_eq!(v["sums_to_one"], true);
    assert!(kernel_row_json("3/2", 0, 16).is_err());
    assert!(kernel_row_json("1/2", 0, MAX_CAP + 1).is_err());
}

#[test]
fn tv_curve_decays() {
    let v: Value = serde_json::from_str(&tv_curve_json("1/2", 16, 60, 1024).unwrap()).unwrap();
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 61);
    // point mass at 16 against the stationary law
    assert!(pts[0]["lo"].as_f64().unwrap() > 0.9);
    assert!(pts[60]["hi"].as_f64().unwrap() < 1e-2);
    assert!(v["fit"]["slope"].as_f64().unwrap() < 0.0);
}

#[test]
fn gap_sweep_endpoints() {
    let v: Value = serde_json::from_str(&gap_sweep_json(0.5, 0.9, 5).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["cheeger"], 0.125);
    assert!((rows[4]["delta"].as_f64().unwrap() - 0.9).abs() < 1e-12);
    assert!(gap_sweep_json(0.9, 0.5, 5).is_err());
    assert!(gap_sweep_json(0.1, 0.5, 1).is_err());
}
