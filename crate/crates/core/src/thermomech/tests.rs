use std::f64::consts::PI;

use super::*;
use crate::field_calculus::{diff_op, integrate, make_grid, strain_rate, DiffMode, Grid, Kind, TensorField};
use crate::generic::{ne_star_apply, pair, Functionals, State, ThermalRole};

fn grid(n: usize) -> Grid<f64> {
    make_grid(2, n, 2.0 * PI).unwrap()
}

fn model() -> Model<f64> {
    Model::default()
}

fn rel(a: &State<f64>, b: &State<f64>) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

fn order(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn velocity_and_density_examples() {
    let g = grid(8);
    let m = model();
    let q = m.rest_state(g, ThermalRole::Entropy, 1.0).unwrap();
    let (v, rho) = m.velocity_and_density(&q).unwrap();
    assert!(v.is_zero());
    assert!(rho.data().iter().all(|&r| r == 1.0));
    let mut q2 = q.clone();
    q2.f = q.f.scale(2.0);
    let (_, rho) = m.velocity_and_density(&q2).unwrap();
    assert!(rho.data().iter().all(|&r| r == 0.25));
    let q = m.smooth_state(g, 3, 0.5, ThermalRole::Entropy).unwrap();
    let (v, rho) = m.velocity_and_density(&q).unwrap();
    let back = v.scaled_by(&rho.clone().retag(Kind::IntensiveScalar)).unwrap();
    assert!(back.sub(&q.pi.clone().retag(Kind::Vector)).unwrap().max_abs() <= 4.0 * f64::EPSILON * q.pi.max_abs());
    let mut bad = q.clone();
    bad.f = bad.f.neg();
    assert!(matches!(m.velocity_and_density(&bad), Err(crate::Error::InvalidState { .. })) || g.dim().is_multiple_of(2));
    bad.f = TensorField::zeros(g, Kind::TwoPoint);
    assert!(m.velocity_and_density(&bad).is_err());
}

#[test]
fn functional_examples() {
    let g = grid(16);
    let m = model();
    let q = m.rest_state(g, ThermalRole::Entropy, 1.5).unwrap();
    let s0 = q.tau.data()[0];
    let want = g.volume() * (s0).exp();
    assert!((m.total_energy(&q).unwrap() - want).abs() < 1e-12 * want);
    let q = m.smooth_state(g, 1, 0.5, ThermalRole::Entropy).unwrap();
    assert_eq!(m.total_entropy(&q).unwrap(), integrate(&q.tau).unwrap());
    let mut q0 = q.clone();
    q0.pi = q.pi.scale(0.0);
    let mut q2 = q.clone();
    q2.pi = q.pi.scale(2.0);
    let e0 = m.total_energy(&q0).unwrap();
    let k1 = m.total_energy(&q).unwrap() - e0;
    let k2 = m.total_energy(&q2).unwrap() - e0;
    assert!((k2 - 4.0 * k1).abs() < 1e-12 * k2);
}

#[test]
fn differentials_match_central_differences() {
    let g = grid(16);
    let m = model();
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        let q = m.smooth_state(g, 2, 0.5, role).unwrap();
        let (de, ds) = m.differentials(&q).unwrap();
        if role == ThermalRole::Entropy {
            assert_eq!(ds, crate::generic::CotState::e_tau(g));
        }
        for seed in 0..3 {
            let mut dq = m.smooth_state(g, 10 + seed, 0.5, role).unwrap().sub(&q).unwrap();
            dq.tau = dq.tau.map(|t| t + 0.3);
            let pe = pair(&de, &dq).unwrap();
            let ps = pair(&ds, &dq).unwrap();
            let err = |eps: f64| {
                let qp = q.axpy(eps, &dq).unwrap();
                let qm = q.axpy(-eps, &dq).unwrap();
                let fd_e = (m.total_energy(&qp).unwrap() - m.total_energy(&qm).unwrap()) / (2.0 * eps);
                let fd_s = (m.total_entropy(&qp).unwrap() - m.total_entropy(&qm).unwrap()) / (2.0 * eps);
                ((fd_e - pe).abs() / pe.abs(), (fd_s - ps).abs() / ps.abs())
            };
            let (ee, es) = [1e-3, 1e-4, 1e-5, 1e-6]
                .iter()
                .map(|&e| err(e))
                .fold((f64::MAX, f64::MAX), |a, b| (a.0.min(b.0), a.1.min(b.1)));
            assert!(ee <= 1e-6 && es <= 1e-6, "{role:?} {ee} {es}");
        }
    }
}

#[test]
fn stresses_and_frame_indifference() {
    let g = grid(16);
    let m = model();
    let q = m.rest_state(g, ThermalRole::Entropy, 1.0).unwrap();
    let st = m.stresses(&q).unwrap();
    assert!(st.sigma_e.max_abs() == 0.0);
    let psi = st.psi.data()[0];
    let want = TensorField::identity(g, Kind::OpCV).unwrap().scale(psi);
    assert_eq!(st.cauchy, want);
    assert!(diff_op(&st.cauchy, DiffMode::DivMatrixRows).unwrap().is_zero());
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        let q = m.smooth_state(g, 4, 0.5, role).unwrap();
        assert!(m.frame_residuals(&q).unwrap() <= 1e-12);
        let st = m.stresses(&q).unwrap();
        for k in 0..g.len() {
            let iso = m.material.isothermal_stress(k, &q.f.matrix_at(k), &q.fp.matrix_at(k)).unwrap();
            assert!((iso - st.sigma_e.matrix_at(k)).norm_sq().sqrt() <= 1e-10);
            assert!((st.sigma_e.matrix_at(k) * q.f.matrix_at(k).transpose()).asymmetry() <= 1e-12);
        }
    }
}

#[test]
fn hamiltonian_field_special_cases() {
    let g = grid(16);
    let m = model();
    let q = m.rest_state(g, ThermalRole::Entropy, 1.2).unwrap();
    assert!(m.v_ham(&q).unwrap().max_abs() == 0.0);
    assert!(m.rhs(&q).unwrap().max_abs() <= 1e-12);
    let mut q = m.smooth_state(g, 5, 0.5, ThermalRole::Entropy).unwrap();
    q.pi = q.pi.scale(0.0);
    let vh = m.v_ham_closed(&q).unwrap();
    let divs = diff_op(&m.stresses(&q).unwrap().cauchy, DiffMode::DivMatrixRows).unwrap();
    assert!(vh.pi.sub(&divs.retag(Kind::Momentum)).unwrap().max_abs() < 1e-12);
    assert!(vh.f.max_abs() == 0.0 && vh.fp.max_abs() == 0.0 && vh.tau.max_abs() == 0.0);
}

#[test]
fn plastic_rate_dissipates() {
    let g = grid(16);
    let m = model();
    let q = m.smooth_state(g, 6, 0.5, ThermalRole::Entropy).unwrap();
    let l = m.plastic_rate(&q).unwrap();
    let st = m.stresses(&q).unwrap();
    let prod = crate::thermomech::model::scalar_field(g, Kind::IntensiveScalar, |k| {
        (q.fp.matrix_at(k) * l.matrix_at(k)).ddot(&st.sigma_p.matrix_at(k)) / st.theta.data()[k]
    });
    assert!(prod.data().iter().all(|&x| x <= 0.0));
    let mut m2 = m;
    m2.dissipation.nu_p = 2.0;
    let l2 = m2.plastic_rate(&q).unwrap();
    assert!(l2.sub(&l.scale(0.5)).unwrap().max_abs() <= 1e-15 * l.max_abs().max(1.0));
    m2.dissipation.nu_p = 0.0;
    assert!(m2.plastic_rate(&q).unwrap().is_zero());
}

#[test]
fn dissipative_field_special_cases() {
    let g = grid(16);
    let m = model();
    let q = m.smooth_state(g, 7, 0.5, ThermalRole::Entropy).unwrap();
    assert!(m.conservative().v_diss(&q).unwrap().max_abs() == 0.0);
    let rest = m.rest_state(g, ThermalRole::Entropy, 0.8).unwrap();
    assert!(m.v_diss(&rest).unwrap().max_abs() == 0.0);
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        let q = m.smooth_state(g, 8, 0.5, role).unwrap();
        let vd = m.v_diss(&q).unwrap();
        assert!(vd.f.max_abs() == 0.0);
        let (de, ds) = m.differentials(&q).unwrap();
        let p = pair(&de, &vd).unwrap();
        assert!(p.abs() <= 1e-10 * de.l2_norm() * vd.l2_norm(), "{role:?} {p}");
        assert!(pair(&ds, &vd).unwrap() >= 0.0);
    }
}

#[test]
fn driving_forces_are_the_thermodynamic_ones() {
    let g = grid(16);
    let m = model();
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        let q = m.smooth_state(g, 9, 0.5, role).unwrap();
        let ds = m.entropy_differential(&q).unwrap();
        let eta = ne_star_apply(&m, &q, &ds).unwrap();
        let st = m.stresses(&q).unwrap();
        let (v, _) = m.velocity_and_density(&q).unwrap();
        let dv = strain_rate(&v).unwrap();
        let inv_t = st.theta.map(|t| 1.0 / t);
        let want_m = dv.scaled_by(&inv_t).unwrap().neg();
        let want_p = st.sigma_p.scaled_by(&inv_t).unwrap().neg();
        assert!(eta.eta_m.sub(&want_m).unwrap().max_abs() <= 1e-12);
        assert!(eta.eta_p.sub(&want_p).unwrap().max_abs() <= 1e-12);
        assert!(eta.eta_t.sub(&inv_t).unwrap().max_abs() <= 1e-12);
    }
}

#[test]
fn power_balance_and_entropy_production() {
    let g = grid(16);
    let m = model();
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        for seed in 0..4 {
            let q = m.smooth_state(g, 20 + seed, 0.5, role).unwrap();
            let r = m.rhs(&q).unwrap();
            let (de, ds) = m.differentials(&q).unwrap();
            let p = pair(&de, &r).unwrap() / (de.l2_norm() * r.l2_norm());
            assert!(p.abs() <= 1e-10, "{role:?} {p}");
            assert!(pair(&ds, &r).unwrap() >= -1e-12);
            let (j, lam) = crate::generic::noninteraction_residuals(&m, &q).unwrap();
            assert!(j <= 1e-10 && lam <= 1e-12, "{j} {lam}");
        }
    }
}

#[test]
fn scalar_rates_assemble_the_closed_tau_equation() {
    let g = grid(16);
    let m = model();
    let q = m.smooth_state(g, 30, 0.5, ThermalRole::Entropy).unwrap();
    let r = m.scalar_rates(&q).unwrap();
    let closed_h = m.v_ham_closed(&q).unwrap();
    assert!(r.j_ham_s.sub(&closed_h.tau).unwrap().max_abs() < 1e-13);
    let composed_d = m.v_diss(&q).unwrap();
    let sum = r.j_diss_e.add(&r.heat).unwrap();
    assert!(sum.sub(&composed_d.tau).unwrap().max_abs() < 1e-12);
}

#[test]
fn kinematic_split_is_exact_at_rest_and_frame_indifferent() {
    let g = grid(16);
    let m = model().conservative();
    let mut q = m.smooth_state(g, 31, 0.5, ThermalRole::Entropy).unwrap();
    q.pi = q.pi.scale(0.0);
    let qd = m.rhs(&q).unwrap();
    let (split, frame) = m.kinematic_residuals(&q, &qd).unwrap();
    assert!(split.is_zero());
    assert!(frame <= 1e-12);
    assert!(m.continuity_residual(&q, &qd).unwrap().is_zero());
}

/// least-squares slope of log e against log n
fn fitted_order(ns: &[usize], e: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = e.iter().map(|x| x.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -num / den
}

#[test]
fn refinement_studies() {
    let m = model();
    let ns = [16, 32, 64];
    let (mut ham, mut diss, mut split, mut cont, mut roles) = (vec![], vec![], vec![], vec![], vec![]);
    for n in ns {
        let g = grid(n);
        let q = m.smooth_state(g, 40, 0.5, ThermalRole::Entropy).unwrap();
        ham.push(rel(&m.v_ham(&q).unwrap(), &m.v_ham_closed(&q).unwrap()));
        diss.push(rel(&m.v_diss(&q).unwrap(), &m.v_diss_closed(&q).unwrap()));
        let qd = m.conservative().rhs(&q).unwrap();
        split.push(m.kinematic_residuals(&q, &qd).unwrap().0.l2_norm());
        cont.push(m.continuity_residual(&q, &qd).unwrap().l2_norm());
        // the internal-energy rate, mapped back to the entropy variable
        let qe = m.convert_role(&q, ThermalRole::InternalEnergy).unwrap();
        let b = m.rhs(&qe).unwrap();
        let pts = m.points(&q).unwrap();
        let mut mapped = b.clone();
        mapped.role = ThermalRole::Entropy;
        mapped.tau = crate::thermomech::model::scalar_field(g, Kind::ExtensiveScalar, |k| {
            let p = &pts[k];
            (b.tau.data()[k] - p.de_f.ddot(&b.f.matrix_at(k)) - p.de_fp.ddot(&b.fp.matrix_at(k))) / p.de_tau
        });
        roles.push(rel(&mapped, &m.rhs(&q).unwrap()));
    }
    for (name, e) in [("ham", &ham), ("split", &split), ("cont", &cont)] {
        for o in order(e) {
            assert!(o >= 1.9, "{name} {e:?}");
        }
    }
    assert!(fitted_order(&ns, &diss) >= 1.9, "{diss:?}");
    // the change of thermal variable is pointwise algebra: exact up to rounding
    assert!(roles.iter().all(|&r| r < 1e-13), "{roles:?}");
}
