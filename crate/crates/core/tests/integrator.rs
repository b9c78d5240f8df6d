use shieldnn_core::{integrate_step, Control, RelState, VehicleParams};

fn run(dt: f64, horizon: f64) -> RelState {
    let p = VehicleParams::reference();
    let c = Control::new(0.5, 0.2);
    let mut s = RelState::new(10.0, 1.0, 5.0);
    let n = (horizon / dt).round() as usize;
    for _ in 0..n {
        s = integrate_step(&s, &c, &p, dt).unwrap();
    }
    s
}

fn err(a: &RelState, b: &RelState) -> f64 {
    (a.r - b.r).abs().max((a.xi - b.xi).abs()).max((a.v - b.v).abs())
}

#[test]
fn rk4_is_fourth_order() {
    let reference = run(1e-4, 1.0);
    let dts = [0.1, 0.05, 0.025, 0.0125];
    let errs: Vec<f64> = dts.iter().map(|&dt| err(&run(dt, 1.0), &reference)).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        let order = ratio.log2();
        assert!((3.8..=4.2).contains(&order), "observed order {order} (errors {errs:?})");
        assert!((13.0..=19.0).contains(&ratio), "halving ratio {ratio}");
    }
}

#[test]
fn constant_acceleration_is_exact_in_speed() {
    let s = run(0.01, 1.0);
    assert!((s.v - 5.5).abs() < 1e-12);
}

#[test]
fn zero_speed_is_stationary() {
    let p = VehicleParams::reference();
    let s0 = RelState::new(7.0, -2.0, 0.0);
    let s1 = integrate_step(&s0, &Control::new(0.0, 0.4), &p, 0.5).unwrap();
    assert_eq!(s0, s1);
}
