use skewsharp_core::Verdict;
use skewsharp_web::{delta_g_mixture, lambda_curve, lambda_curve_js, qubit_margins, qubit_margins_js};

#[test]
fn lambda_curve_matches_known_values() {
    let sld = lambda_curve("sld", -4.0, 4.0, 201).unwrap();
    assert!((sld.lambda - 0.5).abs() < 1e-9);
    assert_eq!(sld.x.len(), 201);
    let wy = lambda_curve("wy", -4.0, 4.0, 201).unwrap();
    assert!((wy.lambda - 1.0).abs() < 1e-9);
    assert!(wy.big_f.iter().all(|&v| v >= wy.lambda - 1e-12));
    // F(x) = F(1/x) on a grid symmetric about x = 1
    for i in 0..201 {
        assert!((wy.big_f[i] - wy.big_f[200 - i]).abs() < 1e-10);
    }
}

#[test]
fn bad_inputs_become_error_json() {
    let v: serde_json::Value = serde_json::from_str(&lambda_curve_js("wyd:0.9", -1.0, 1.0, 10)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("0.9"));
    let v: serde_json::Value = serde_json::from_str(&qubit_margins_js(1.5, 0.0, 0.0, 90.0, 0.0, 90.0, 90.0, "")).unwrap();
    assert!(v.get("error").is_some());
    assert!(delta_g_mixture(1, 4, 10).is_err());
}

#[test]
fn qubit_z_state_with_x_and_y_saturates() {
    let out = qubit_margins(0.5, 0.0, 0.0, 90.0, 0.0, 90.0, 90.0, "sld").unwrap();
    assert_eq!(out.margins["eq3"].verdict, Verdict::Saturated);
    assert_eq!(out.margins["rs"].verdict, Verdict::Holds);
    assert!(out.delta_g.abs() < 1e-12);
    assert!((out.sigma_det - 1.0).abs() < 1e-12);
    assert!(out.margins.values().all(|m| m.verdict != Verdict::Violated));
}

#[test]
fn qubit_generic_point_holds() {
    let out = qubit_margins(0.8, 37.0, 11.0, 60.0, 20.0, 100.0, 250.0, "wyd:0.3").unwrap();
    assert!(out.margins.values().all(|m| m.verdict != Verdict::Violated));
    assert!(out.margins.contains_key("eq19[wyd:0.3]"));
}

#[test]
fn fock_mixture_endpoints() {
    let out = delta_g_mixture(1, 24, 5).unwrap();
    assert!((out.delta_g[0] - 5.0).abs() < 1e-8);
    assert!(out.delta_g[4].abs() < 1e-12);
    assert!(out.delta_g.iter().all(|&d| d >= -1e-10));
}
