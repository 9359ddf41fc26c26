//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the test fails if any of them fails.
//!
//! Run with `cargo test -p eulgen-core --test acceptance -- --nocapture`.

use eulgen::field_calculus::{strain_rate, Kind, TensorField};
use eulgen::generic::{
    jacobi_residual, ne_star_apply, noninteraction_residuals, pair, skew_residual, Functionals, State, ThermalRole,
};
use eulgen::lie::{commutator_rule_residual, lie_derivative, vector_jacobi_residual, FlowOracle, DEFAULT_DS, DEFAULT_SUBSTEPS};
use eulgen::sim::verify::samples::{constant_inputs, cot, grid, smooth};
use eulgen::sim::{fitted_order, run, step, Scheme, SimConfig};
use eulgen::thermomech::{DissipationSpec, Model};

type Outcome = (bool, String);
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fmt_errs(e: &[f64]) -> String {
    e.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" ")
}

fn rel(a: &TensorField<f64>, b: &TensorField<f64>) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

fn rel_state(a: &State<f64>, b: &State<f64>) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

const SEED: u64 = 2024;

fn lie_oracle() -> Outcome {
    let ns = [32, 64, 128];
    let mut worst_order = f64::INFINITY;
    let mut worst_64 = 0.0f64;
    for kind in Kind::ALL {
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let g = grid(n).unwrap();
                let v = smooth(g, Kind::Vector, SEED, 0.0).unwrap();
                let a = smooth(g, kind, SEED + 1, 1.0).unwrap();
                let oracle = FlowOracle::new(&v, DEFAULT_DS, DEFAULT_SUBSTEPS).unwrap().lie(&a, kind).unwrap();
                rel(&lie_derivative(&v, &a, None).unwrap(), &oracle)
            })
            .collect();
        worst_64 = worst_64.max(errs[1]);
        worst_order = worst_order.min(fitted_order(&ns, &errs));
    }
    (
        worst_64 <= 5e-3 && worst_order >= 1.9,
        format!("12 kinds: max discrepancy at n=64 {worst_64:.2e} (<= 5e-3), min order {worst_order:.3} (>= 1.9)"),
    )
}

fn commutator_and_vector_jacobi() -> Outcome {
    let ns = [16, 32, 64];
    let mut worst = f64::INFINITY;
    for kind in Kind::ALL {
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let g = grid(n).unwrap();
                let v = smooth(g, Kind::Vector, SEED + 2, 0.0).unwrap();
                let w = smooth(g, Kind::Vector, SEED + 3, 0.0).unwrap();
                commutator_rule_residual(&v, &w, &smooth(g, kind, SEED + 4, 1.0).unwrap()).unwrap()
            })
            .collect();
        worst = worst.min(fitted_order(&ns, &errs));
    }
    let jac: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let g = grid(n).unwrap();
            let f = |s| smooth(g, Kind::Vector, s, 0.0).unwrap();
            vector_jacobi_residual(&f(SEED + 5), &f(SEED + 6), &f(SEED + 7)).unwrap()
        })
        .collect();
    let jo = fitted_order(&ns, &jac);
    (
        worst >= 1.9 && jo >= 1.9,
        format!("commutator rule min order over 12 kinds {worst:.3}, vector Jacobi order {jo:.3} [{}] (>= 1.9)", fmt_errs(&jac)),
    )
}

fn strain_rate_identity() -> Outcome {
    let mut worst = 0.0f64;
    for n in [16, 32, 64] {
        let g = grid(n).unwrap();
        let v = smooth(g, Kind::Vector, SEED + 8, 0.0).unwrap();
        let id = TensorField::identity(g, Kind::OpVC).unwrap();
        let lie = lie_derivative(&v, &id, None).unwrap();
        worst = worst.max(lie.sub(&strain_rate(&v).unwrap().scale(2.0)).unwrap().max_abs());
    }
    (worst <= 1e-14, format!("max |L_v I - 2 D(v)| = {worst:.2e} (<= 1e-14)"))
}

fn skew_symmetry(model: &Model<f64>) -> Outcome {
    let g = grid(16).unwrap();
    let mut worst = 0.0f64;
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        for k in 0..100u64 {
            let q = model.smooth_state(g, SEED + k, 0.5, role).unwrap();
            let r = skew_residual(model, &q, &cot(g, 3 * k).unwrap(), &cot(g, 3 * k + 1).unwrap()).unwrap();
            worst = worst.max(r.abs());
        }
    }
    (worst <= 1e-10, format!("max normalized skew residual over 2 x 100 triples {worst:.2e} (<= 1e-10)"))
}

fn poisson_jacobi(model: &Model<f64>) -> Outcome {
    let ns = [16, 32, 64];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let g = grid(n).unwrap();
            let q = model.smooth_state(g, SEED + 9, 0.5, ThermalRole::Entropy).unwrap();
            jacobi_residual(&q, &cot(g, 91).unwrap(), &cot(g, 92).unwrap(), &cot(g, 93).unwrap()).unwrap()
        })
        .collect();
    let order = fitted_order(&ns, &errs);
    let (q, [a, b, c]) = constant_inputs(grid(16).unwrap()).unwrap();
    let flat = jacobi_residual(&q, &a, &b, &c).unwrap();
    (
        order >= 1.9 && flat <= 1e-13,
        format!("order {order:.3} [{}] (>= 1.9), constant inputs {flat:.2e} (<= 1e-13)", fmt_errs(&errs)),
    )
}

fn non_interaction(model: &Model<f64>) -> Outcome {
    let g = grid(16).unwrap();
    let (mut jds, mut rstar, mut ne) = (0.0f64, 0.0f64, 0.0f64);
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        for k in 0..5 {
            let q = model.smooth_state(g, SEED + 10 + k, 0.5, role).unwrap();
            let (a, b) = noninteraction_residuals(model, &q).unwrap();
            jds = jds.max(a);
            rstar = rstar.max(b);
            let eta = ne_star_apply(model, &q, &model.energy_differential(&q).unwrap()).unwrap();
            ne = ne
                .max(eta.eta_m.max_abs())
                .max(eta.eta_p.max_abs())
                .max(eta.eta_t.map(|t| t - 1.0).max_abs());
        }
    }
    (
        jds <= 1e-10 && rstar <= 1e-12 && ne <= 1e-12,
        format!("|J DS| {jds:.2e} (<= 1e-10), max |R*(q, lambda DE)| {rstar:.2e} (<= 1e-12), |N_E* DE - e_tau| {ne:.2e} (<= 1e-12)"),
    )
}

fn driving_forces(model: &Model<f64>) -> Outcome {
    let g = grid(16).unwrap();
    let mut worst = 0.0f64;
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        for k in 0..5 {
            let q = model.smooth_state(g, SEED + 20 + k, 0.5, role).unwrap();
            let eta = ne_star_apply(model, &q, &model.entropy_differential(&q).unwrap()).unwrap();
            let st = model.stresses(&q).unwrap();
            let (v, _) = model.velocity_and_density(&q).unwrap();
            let inv = st.theta.map(|t| 1.0 / t);
            let want_m = strain_rate(&v).unwrap().scaled_by(&inv).unwrap().neg();
            let want_p = st.sigma_p.scaled_by(&inv).unwrap().neg();
            worst = worst
                .max(eta.eta_m.sub(&want_m).unwrap().max_abs())
                .max(eta.eta_p.sub(&want_p).unwrap().max_abs())
                .max(eta.eta_t.sub(&inv).unwrap().max_abs());
        }
    }
    (worst <= 1e-12, format!("max pointwise discrepancy {worst:.2e} (<= 1e-12)"))
}

fn finite_differences(model: &Model<f64>) -> Outcome {
    let g = grid(16).unwrap();
    let mut worst = 0.0f64;
    for (r, role) in [ThermalRole::Entropy, ThermalRole::InternalEnergy].into_iter().enumerate() {
        let q = model.smooth_state(g, SEED + 30 + r as u64, 0.5, role).unwrap();
        let (de, ds) = model.differentials(&q).unwrap();
        for k in 0..10u64 {
            let mut dq = model.smooth_state(g, SEED + 100 + k, 0.5, role).unwrap().sub(&q).unwrap();
            // a nonzero mean in tau keeps the entropy pairing away from zero
            dq.tau = dq.tau.map(|t| t + 0.1 + 0.05 * k as f64);
            let (pe, ps) = (pair(&de, &dq).unwrap(), pair(&ds, &dq).unwrap());
            let best = [1e-3, 1e-4, 1e-5, 1e-6]
                .iter()
                .map(|&eps| {
                    let qp = q.axpy(eps, &dq).unwrap();
                    let qm = q.axpy(-eps, &dq).unwrap();
                    let fe = (model.total_energy(&qp).unwrap() - model.total_energy(&qm).unwrap()) / (2.0 * eps);
                    let fs = (model.total_entropy(&qp).unwrap() - model.total_entropy(&qm).unwrap()) / (2.0 * eps);
                    ((fe - pe).abs() / pe.abs(), (fs - ps).abs() / ps.abs())
                })
                .fold((f64::MAX, f64::MAX), |a, b| (a.0.min(b.0), a.1.min(b.1)));
            worst = worst.max(best.0).max(best.1);
        }
    }
    (worst <= 1e-6, format!("20 directions, worst relative error of DE and DS {worst:.2e} (<= 1e-6)"))
}

fn power_and_entropy(model: &Model<f64>) -> Outcome {
    let g = grid(16).unwrap();
    let (mut power, mut production) = (0.0f64, f64::INFINITY);
    for k in 0..100u64 {
        let role = if k % 2 == 0 { ThermalRole::Entropy } else { ThermalRole::InternalEnergy };
        let q = model.smooth_state(g, SEED + 200 + k, 0.5, role).unwrap();
        let r = model.rhs(&q).unwrap();
        let (de, ds) = model.differentials(&q).unwrap();
        power = power.max(pair(&de, &r).unwrap().abs() / (de.l2_norm() * r.l2_norm()));
        production = production.min(pair(&ds, &r).unwrap());
    }
    (
        power <= 1e-10 && production >= -1e-12,
        format!("100 states: max normalized <DE, rhs> {power:.2e} (<= 1e-10), min <DS, rhs> {production:.3e} (>= -1e-12)"),
    )
}

fn closed_forms(model: &Model<f64>) -> Outcome {
    let ns = [16, 32, 64];
    let (mut ham, mut diss) = (vec![], vec![]);
    for &n in &ns {
        let q = model.smooth_state(grid(n).unwrap(), SEED + 40, 0.5, ThermalRole::Entropy).unwrap();
        ham.push(rel_state(&model.v_ham(&q).unwrap(), &model.v_ham_closed(&q).unwrap()));
        diss.push(rel_state(&model.v_diss(&q).unwrap(), &model.v_diss_closed(&q).unwrap()));
    }
    let (oh, od) = (fitted_order(&ns, &ham), fitted_order(&ns, &diss));
    (
        oh >= 1.9 && od >= 1.9,
        format!("V_ham order {oh:.3} [{}], V_diss order {od:.3} [{}] (>= 1.9)", fmt_errs(&ham), fmt_errs(&diss)),
    )
}

fn trajectory_config(dissipation: DissipationSpec<f64>, dt: f64, t_end: f64) -> SimConfig {
    let mut c = SimConfig::from_json(
        r#"{
            "grid": { "dim": 2, "n": 32 },
            "initial": {
                "velocity": [{ "type": "fourier_random", "max_mode": 1, "amplitude": 0.3 }],
                "deformation": [{ "type": "fourier_random", "max_mode": 1, "amplitude": 0.1 }],
                "plastic": [{ "type": "fourier_random", "max_mode": 1, "amplitude": 0.05 }],
                "temperature": [{ "type": "fourier_random", "max_mode": 1, "amplitude": 0.2 }]
            },
            "t_end": 1.0,
            "dt": 0.01,
            "seed": 5
        }"#,
    )
    .unwrap();
    c.model.dissipation = dissipation;
    c.dt = dt;
    c.t_end = t_end;
    c
}

fn trajectory_laws() -> Outcome {
    let drift = |dt: f64| {
        let out = run(&trajectory_config(DissipationSpec::none(), dt, 2.0), None).unwrap();
        out.diagnostics.iter().map(|r| r.e_drift_rel.abs()).fold(0.0, f64::max)
    };
    let dts = [0.02, 0.01, 0.005];
    let drifts: Vec<f64> = dts.iter().map(|&dt| drift(dt)).collect();
    // order in dt: errors fall as dt shrinks, i.e. as 1/dt grows
    let inv: Vec<usize> = dts.iter().map(|dt| (1.0 / dt).round() as usize).collect();
    let order = fitted_order(&inv, &drifts);

    let out = run(&trajectory_config(DissipationSpec::default(), 0.005, 1.0), None).unwrap();
    let rows = &out.diagnostics;
    let min_ds = rows.windows(2).map(|w| w[1].s_total - w[0].s_total).fold(f64::INFINITY, f64::min);
    let e_drift = rows.iter().map(|r| r.e_drift_rel.abs()).fold(0.0, f64::max);
    (
        drifts[1] <= 1e-8 && order >= 3.8 && min_ds >= -1e-12 && e_drift <= 1e-8,
        format!(
            "conservative, 200 steps: |E_drift_rel| {:.2e} (<= 1e-8), dt-order {order:.2} [{}] (>= 3.8); \
             dissipative, 200 steps: min dS per step {min_ds:.2e} (>= -1e-12), |E_drift_rel| {e_drift:.2e} (<= 1e-8)",
            drifts[1],
            fmt_errs(&drifts)
        ),
    )
}

fn kinematics(model: &Model<f64>) -> Outcome {
    let ns = [16, 32, 64];
    let ham = model.conservative();
    let (mut split, mut cont) = (vec![], vec![]);
    for &n in &ns {
        let g = grid(n).unwrap();
        let mut q = model.smooth_state(g, SEED + 50, 0.5, ThermalRole::Entropy).unwrap();
        // a short way along a Hamiltonian trajectory
        for _ in 0..5 {
            q = step(&ham, &q, 0.01, Scheme::Rk4).unwrap();
        }
        let qd = ham.rhs(&q).unwrap();
        split.push(ham.kinematic_residuals(&q, &qd).unwrap().0.l2_norm());
        cont.push(ham.continuity_residual(&q, &qd).unwrap().l2_norm());
    }
    let (os, oc) = (fitted_order(&ns, &split), fitted_order(&ns, &cont));
    let g = grid(16).unwrap();
    let rest = model.rest_state(g, ThermalRole::InternalEnergy, 1.4).unwrap();
    let r = model.rhs(&rest).unwrap().max_abs();
    let mut p = rest.clone();
    for _ in 0..20 {
        p = step(model, &p, 0.05, Scheme::Rk4).unwrap();
    }
    let moved = p.sub(&rest).unwrap().max_abs();
    (
        os >= 1.9 && oc >= 1.9 && r <= 1e-12 && moved <= 1e-12,
        format!(
            "split order {os:.3} [{}], continuity order {oc:.3} [{}] (>= 1.9); equilibrium |rhs| {r:.1e} (<= 1e-12), drift after 20 steps {moved:.1e}",
            fmt_errs(&split),
            fmt_errs(&cont)
        ),
    )
}

fn role_equivalence(model: &Model<f64>) -> Outcome {
    let simulate = |n: usize, dt: f64| {
        let g = grid(n).unwrap();
        let mut a = model.smooth_state(g, SEED + 60, 0.5, ThermalRole::Entropy).unwrap();
        let mut b = model.convert_role(&a, ThermalRole::InternalEnergy).unwrap();
        let semi = rel_state(
            &model.convert_role(&b, ThermalRole::Entropy).unwrap(),
            &a,
        );
        assert!(semi <= 1e-14);
        for _ in 0..((0.2 / dt).round() as usize) {
            a = step(model, &a, dt, Scheme::Rk4).unwrap();
            b = step(model, &b, dt, Scheme::Rk4).unwrap();
        }
        rel_state(&model.convert_role(&b, ThermalRole::Entropy).unwrap(), &a)
    };
    let ns = [16, 32, 64];
    let errs: Vec<f64> = ns.iter().map(|&n| simulate(n, 0.002)).collect();
    let h_order = fitted_order(&ns, &errs);
    let coarse = simulate(16, 0.004);
    let dt_order = (coarse / errs[0]).log2();
    // both roles discretize to the same semi-discrete system, so what is left is
    // time-integration error of a reparametrized ODE: h-independent, O(dt^4)
    let spread = errs.iter().cloned().fold(0.0, f64::max) / errs.iter().cloned().fold(f64::INFINITY, f64::min);
    let floor = errs.iter().all(|&e| e <= 1e-10) && spread < 1.5 && dt_order >= 3.8;
    (
        h_order >= 1.9 || floor,
        format!(
            "discrepancy at dt=0.002 [{}], h-order {h_order:.2}; h-independent (spread {spread:.2}) with dt-order {dt_order:.2}: \
             {}",
            fmt_errs(&errs),
            if h_order >= 1.9 { "converges in h" } else { "pure time-integration error, below 1e-10" }
        ),
    )
}

#[test]
fn acceptance() {
    let model = Model::<f64>::default();
    let criteria: Vec<Criterion> = vec![
        ("Lie-derivative oracle agreement", Box::new(lie_oracle)),
        ("commutator rule and vector-field Jacobi identity", Box::new(commutator_and_vector_jacobi)),
        ("strain-rate identity", Box::new(strain_rate_identity)),
        ("skew-symmetry of J", Box::new(|| skew_symmetry(&model))),
        ("Jacobi identity of J", Box::new(|| poisson_jacobi(&model))),
        ("non-interaction", Box::new(|| non_interaction(&model))),
        ("driving forces", Box::new(|| driving_forces(&model))),
        ("functional derivatives", Box::new(|| finite_differences(&model))),
        ("power balance and entropy production", Box::new(|| power_and_entropy(&model))),
        ("closed-form cross-checks", Box::new(|| closed_forms(&model))),
        ("trajectory laws", Box::new(trajectory_laws)),
        ("kinematics", Box::new(|| kinematics(&model))),
        ("role equivalence", Box::new(|| role_equivalence(&model))),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = std::time::Instant::now();
        let (ok, detail) = check();
        println!(
            "{:>2}. {} {name}: {detail} [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
