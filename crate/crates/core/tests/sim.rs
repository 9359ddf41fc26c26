use std::fs;

use eulgen::field_calculus::{make_grid, Kind, TensorField};
use eulgen::generic::{State, ThermalRole};
use eulgen::sim::{
    read_diagnostics, read_field, read_snapshot, run, step, write_field, write_snapshot, Scheme, SimConfig,
    CSV_HEADER, MAGIC,
};
use eulgen::thermomech::Model;
use eulgen::Error;

fn config(extra: &str) -> SimConfig {
    let text = format!(
        r#"{{
            "grid": {{ "dim": 2, "n": 16 }},
            "initial": {{
                "velocity": [{{ "type": "fourier_random", "max_mode": 1, "amplitude": 0.1 }}],
                "deformation": [{{ "type": "fourier_random", "max_mode": 1, "amplitude": 0.05 }}],
                "temperature": [{{ "type": "fourier_random", "max_mode": 1, "amplitude": 0.1 }}]
            }},
            "t_end": 0.05,
            "dt": 0.01,
            "seed": 11{extra}
        }}"#
    );
    SimConfig::from_json(&text).unwrap()
}

#[test]
fn zero_end_time_returns_the_initial_state() {
    let mut c = config("");
    c.t_end = 0.0;
    let out = run(&c, None).unwrap();
    assert_eq!(out.final_state, c.initial_state().unwrap());
    assert_eq!(out.diagnostics.len(), 1);
    assert_eq!(out.final_time, 0.0);
}

#[test]
fn runs_are_bitwise_deterministic() {
    let c = config("");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&c, Some(a.path())).unwrap();
    run(&c, Some(b.path())).unwrap();
    let csv_a = fs::read(a.path().join("diagnostics.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.path().join("diagnostics.csv")).unwrap());
    let text = String::from_utf8(csv_a).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(text.lines().count(), 1 + 6);
}

#[test]
fn diagnostics_and_snapshots_round_trip() {
    let mut c = config("");
    c.output.snapshot_every = 2;
    let dir = tempfile::tempdir().unwrap();
    let out = run(&c, Some(dir.path())).unwrap();
    // steps 0, 2, 4 and the final step 5
    assert_eq!(out.snapshots.len(), 4);
    assert_eq!(read_diagnostics(&dir.path().join("diagnostics.csv")).unwrap(), out.diagnostics);
    let (meta, q) = read_snapshot(out.snapshots.last().unwrap()).unwrap();
    assert_eq!(q, out.final_state);
    assert_eq!(meta.step, 5);
    assert_eq!(meta.time, c.t_end);
    assert_eq!(meta.config_hash, c.hash());
    assert_eq!(meta.fields.len(), 4);
}

#[test]
fn last_step_is_shortened_to_land_on_the_end_time() {
    let mut c = config("");
    c.t_end = 0.025;
    assert_eq!(c.schedule().0, 3);
    assert!((c.schedule().1 - 0.005).abs() < 1e-15);
    let out = run(&c, None).unwrap();
    assert_eq!(out.final_time, 0.025);
}

#[test]
fn field_files_have_the_documented_layout() {
    let g = make_grid(2, 8, 1.0).unwrap();
    let f = TensorField::constant(g, Kind::TwoPoint, &[0.25]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.bin");
    write_field(&path, &f).unwrap();
    let bytes = fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], MAGIC);
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 8);
    assert_eq!(bytes[16], Kind::TwoPoint.tag());
    let payload = &bytes[17..];
    assert_eq!(payload.len(), 8 * 64 * 4);
    assert!(payload.chunks_exact(8).all(|c| c == 0.25f64.to_le_bytes()));
    assert_eq!(read_field(&path, 1.0).unwrap(), f);

    fs::write(&path, &bytes[..40]).unwrap();
    assert!(matches!(read_field(&path, 1.0), Err(Error::Snapshot { .. })));
}

#[test]
fn snapshots_of_random_states_round_trip_bitwise() {
    let m = Model::<f64>::default();
    let dir = tempfile::tempdir().unwrap();
    for (k, role) in [ThermalRole::Entropy, ThermalRole::InternalEnergy].into_iter().enumerate() {
        let q = m.smooth_state(make_grid(3, 8, 2.0).unwrap(), k as u64, 0.3, role).unwrap();
        let side = write_snapshot(dir.path(), k, 0.5, &q, "abc").unwrap();
        assert_eq!(read_snapshot(&side).unwrap().1, q);
    }
}

#[test]
fn config_rejects_typos_and_bad_values() {
    let base = r#"{"grid": {"dim": 2, "n": 16}, "t_end": 1.0, "dt": 0.1"#;
    assert!(SimConfig::from_json(&format!("{base}}}")).is_ok());
    for bad in [
        format!("{base}, \"dtt\": 1}}"),
        r#"{"grid": {"dim": 2, "n": 16}, "t_end": 1.0, "dt": 0.0}"#.to_string(),
        r#"{"grid": {"dim": 2, "n": 16}, "t_end": -1.0, "dt": 0.1}"#.to_string(),
        r#"{"grid": {"dim": 2, "n": 15}, "t_end": 1.0, "dt": 0.1}"#.to_string(),
        format!("{base}, \"initial\": {{\"velocity\": [{{\"type\": \"vortex\"}}]}}}}"),
        format!("{base}, \"model\": {{\"material\": {{\"mu\": -1.0}}}}}}"),
    ] {
        assert!(matches!(SimConfig::from_json(&bad), Err(Error::Config(_))), "{bad}");
    }
}

#[test]
fn hash_identifies_the_configuration() {
    let a = config("");
    let b = config(r#", "scheme": "euler""#);
    assert_eq!(a.hash(), config("").hash());
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn zero_step_is_the_identity_and_equilibrium_is_fixed() {
    let m = Model::<f64>::default();
    let g = make_grid(2, 16, 1.0).unwrap();
    let q = m.smooth_state(g, 1, 0.4, ThermalRole::Entropy).unwrap();
    for s in [Scheme::Euler, Scheme::Rk4] {
        assert_eq!(step(&m, &q, 0.0, s).unwrap(), q);
    }
    let rest = m.rest_state(g, ThermalRole::InternalEnergy, 1.2).unwrap();
    let mut p = rest.clone();
    for _ in 0..10 {
        p = step(&m, &p, 0.05, Scheme::Rk4).unwrap();
    }
    assert!(p.sub(&rest).unwrap().max_abs() <= 1e-12 * rest.max_abs());
}

#[test]
fn rk4_self_convergence_is_fourth_order() {
    let m = Model::<f64>::default();
    let g = make_grid(2, 16, std::f64::consts::TAU).unwrap();
    let q0 = m.smooth_state(g, 2, 0.5, ThermalRole::Entropy).unwrap();
    let advance = |dt: f64, steps: usize| -> State<f64> {
        (0..steps).fold(q0.clone(), |q, _| step(&m, &q, dt, Scheme::Rk4).unwrap())
    };
    let t = 0.4;
    let reference = advance(0.05 / 8.0, 64);
    let e1 = advance(0.1, 4).sub(&reference).unwrap().l2_norm();
    let e2 = advance(0.05, 8).sub(&reference).unwrap().l2_norm();
    let order = (e1 / e2).log2();
    assert!(order >= 3.8, "order {order}, t = {t}");
}

#[test]
fn blow_up_reports_the_step_and_keeps_the_last_good_state() {
    let mut c = config("");
    c.dt = 5.0;
    c.t_end = 50.0;
    c.initial.deformation = vec![serde_json::from_str(r#"{"type": "fourier_random", "max_mode": 1, "amplitude": 0.15}"#).unwrap()];
    let dir = tempfile::tempdir().unwrap();
    match run(&c, Some(dir.path())) {
        Err(Error::StepFailed { dt, .. }) => assert_eq!(dt, 5.0),
        other => panic!("expected a failed step, got {other:?}"),
    }
    assert!(dir.path().join("diagnostics.csv").exists());
    let rows = read_diagnostics(&dir.path().join("diagnostics.csv")).unwrap();
    let last = rows.len() - 1;
    assert!(dir.path().join(format!("snap_{last:06}.json")).exists());
}
