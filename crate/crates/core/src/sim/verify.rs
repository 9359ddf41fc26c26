//! Property suites behind `eulgen verify`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field_calculus::{
    make_grid, sample_field, strain_rate, Grid, Kind, Preset, TensorField,
};
use crate::generic::{
    jacobi_residual, ne_apply, ne_star_apply, noninteraction_residuals, pair, pair_eta, skew_residual, CotState,
    Functionals, State, ThermalRole,
};
use crate::lie::{commutator_rule_residual, lie_derivative, vector_jacobi_residual, FlowOracle, DEFAULT_DS, DEFAULT_SUBSTEPS};
use crate::thermomech::Model;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lie,
    Generic,
    Thermo,
    Full,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lie" => Ok(Suite::Lie),
            "generic" => Ok(Suite::Generic),
            "thermo" => Ok(Suite::Thermo),
            "full" => Ok(Suite::Full),
            other => Err(Error::Config(format!(
                "unknown suite {other:?} (expected lie, generic, thermo or full)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lie => "lie",
            Suite::Generic => "generic",
            Suite::Thermo => "thermo",
            Suite::Full => "full",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        write!(
            f,
            "{} [{}] {}: {:.3e} {op} {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, "  ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub grids: Vec<usize>,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Sink {
    suite: Suite,
    checks: Vec<Check>,
}

impl Sink {
    fn push(&mut self, name: impl Into<String>, value: f64, bound: Bound, threshold: f64, detail: String) {
        let passed = match bound {
            Bound::AtMost => value <= threshold,
            Bound::AtLeast => value >= threshold,
        };
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            value,
            bound,
            threshold,
            passed,
            detail,
        });
    }
    fn at_most(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.push(name, value, Bound::AtMost, threshold, String::new());
    }
    fn order(&mut self, name: impl Into<String>, ns: &[usize], errs: &[f64], threshold: f64) {
        let detail = format!("errors {}", errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", "));
        self.push(name, fitted_order(ns, errs), Bound::AtLeast, threshold, detail);
    }
}

/// Observed convergence order: least-squares slope of log(error) against log(n).
pub fn fitted_order(ns: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -num / den
}

/// Seeded band-limited test data shared by the suites.
pub mod samples {
    use super::*;

    /// d = 2 on [0, 2π)²
    pub fn grid(n: usize) -> Result<Grid<f64>> {
        make_grid(2, n, std::f64::consts::TAU)
    }

    /// Lowest-mode random field of amplitude 0.5, plus `offset` in every component.
    pub fn smooth(g: Grid<f64>, kind: Kind, seed: u64, offset: f64) -> Result<TensorField<f64>> {
        let f = sample_field(
            g,
            kind,
            &Preset::FourierRandom {
                seed: Some(seed),
                max_mode: 1,
                amplitude: 0.5,
            },
        )?;
        Ok(if offset == 0.0 { f } else { f.map(|x| x + offset) })
    }

    pub fn cot(g: Grid<f64>, seed: u64) -> Result<CotState<f64>> {
        let s = seed.wrapping_mul(8);
        CotState::new(
            smooth(g, Kind::Vector, s, 0.0)?,
            smooth(g, Kind::TwoPoint, s + 1, 0.0)?,
            smooth(g, Kind::IntensiveMatrix, s + 2, 0.0)?,
            smooth(g, Kind::IntensiveScalar, s + 3, 0.0)?,
        )
    }

    /// An admissible physical state of the default model.
    pub fn state(model: &Model<f64>, g: Grid<f64>, seed: u64, role: ThermalRole) -> Result<State<f64>> {
        model.smooth_state(g, seed, 0.5, role)
    }

    /// Uniform state with constant covectors: every derivative vanishes.
    pub fn constant_inputs(g: Grid<f64>) -> Result<(State<f64>, [CotState<f64>; 3])> {
        let q = State::new(
            TensorField::constant(g, Kind::Momentum, &[0.2, 0.1])?,
            TensorField::identity(g, Kind::TwoPoint)?,
            TensorField::identity(g, Kind::IntensiveMatrix)?,
            TensorField::constant(g, Kind::ExtensiveScalar, &[1.0])?,
            ThermalRole::Entropy,
        )?;
        let c = |s: f64| {
            CotState::new(
                TensorField::constant(g, Kind::Vector, &[s, 1.0 - s])?,
                TensorField::constant(g, Kind::TwoPoint, &[s, 0.0, 0.5, -s])?,
                TensorField::constant(g, Kind::IntensiveMatrix, &[0.1, s, 0.0, 1.0])?,
                TensorField::constant(g, Kind::IntensiveScalar, &[s])?,
            )
        };
        Ok((q, [c(0.3)?, c(0.7)?, c(-0.2)?]))
    }
}

use samples::{cot, grid, smooth, state};

fn rel(a: &TensorField<f64>, b: &TensorField<f64>) -> Result<f64> {
    Ok(a.sub(b)?.l2_norm() / b.l2_norm())
}

fn lie_suite(s: &mut Sink, ns: &[usize], seed: u64) -> Result<()> {
    for kind in Kind::ALL {
        let mut oracle = Vec::new();
        let mut comm = Vec::new();
        for &n in ns {
            let g = grid(n)?;
            let v = smooth(g, Kind::Vector, seed, 0.0)?;
            let w = smooth(g, Kind::Vector, seed + 1, 0.0)?;
            let a = smooth(g, kind, seed + 2, 1.0)?;
            let l = lie_derivative(&v, &a, None)?;
            let o = FlowOracle::new(&v, DEFAULT_DS, DEFAULT_SUBSTEPS)?.lie(&a, kind)?;
            oracle.push(rel(&l, &o)?);
            comm.push(commutator_rule_residual(&v, &w, &a)?);
        }
        if let Some(i) = ns.iter().position(|&n| n == 64) {
            s.at_most(format!("oracle discrepancy {kind:?} n=64"), oracle[i], 5e-3);
        }
        s.order(format!("oracle order {kind:?}"), ns, &oracle, 1.9);
        s.order(format!("commutator rule order {kind:?}"), ns, &comm, 1.9);
    }
    let mut jac = Vec::new();
    let mut strain = 0.0f64;
    for &n in ns {
        let g = grid(n)?;
        let (u, v, w) = (
            smooth(g, Kind::Vector, seed + 3, 0.0)?,
            smooth(g, Kind::Vector, seed + 4, 0.0)?,
            smooth(g, Kind::Vector, seed + 5, 0.0)?,
        );
        jac.push(vector_jacobi_residual(&u, &v, &w)?);
        let id = TensorField::identity(g, Kind::OpVC)?;
        strain = strain.max(lie_derivative(&u, &id, None)?.sub(&strain_rate(&u)?.scale(2.0))?.max_abs());
    }
    s.order("vector-field Jacobi order", ns, &jac, 1.9);
    s.at_most("metric Lie derivative = 2 D(v)", strain, 1e-14);
    Ok(())
}

fn generic_suite(s: &mut Sink, ns: &[usize], seed: u64) -> Result<()> {
    let model = Model::<f64>::default();
    let g = grid(ns[0])?;
    let mut skew = 0.0f64;
    let mut nonint = (0.0f64, 0.0f64);
    let mut ne_de = 0.0f64;
    let mut adj = 0.0f64;
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        for k in 0..10u64 {
            let q = state(&model, g, seed + k, role)?;
            let (z1, z2) = (cot(g, seed + 100 + k)?, cot(g, seed + 200 + k)?);
            skew = skew.max(skew_residual(&model, &q, &z1, &z2)?.abs());
        }
        let q = state(&model, g, seed, role)?;
        let (a, b) = noninteraction_residuals(&model, &q)?;
        nonint = (nonint.0.max(a), nonint.1.max(b));
        let de = model.energy_differential(&q)?;
        let eta = ne_star_apply(&model, &q, &de)?;
        ne_de = ne_de
            .max(eta.eta_m.max_abs())
            .max(eta.eta_p.max_abs())
            .max(eta.eta_t.map(|x| x - 1.0).max_abs());
        let z = cot(g, seed + 300)?;
        let mut e = ne_star_apply(&model, &q, &cot(g, seed + 301)?)?;
        e.eta_t = smooth(g, Kind::IntensiveScalar, seed + 302, 0.0)?;
        let x = pair(&z, &ne_apply(&model, &q, &e)?)?;
        let y = pair_eta(&ne_star_apply(&model, &q, &z)?, &e)?;
        adj = adj.max((x - y).abs() / x.abs().max(y.abs()));
    }
    s.at_most("skew residual (both roles, 20 triples)", skew, 1e-10);
    s.at_most("|J DS| normalized", nonint.0, 1e-10);
    s.at_most("R*(q, λDE), λ ∈ {-1, 0.5, 2}", nonint.1, 1e-12);
    s.at_most("N_E* DE = e_τ", ne_de, 1e-12);
    s.at_most("N_E / N_E* adjointness", adj, 1e-12);

    let mut jac = Vec::new();
    for &n in ns {
        let g = grid(n)?;
        let q = state(&model, g, seed + 400, ThermalRole::Entropy)?;
        jac.push(jacobi_residual(&q, &cot(g, seed + 401)?, &cot(g, seed + 402)?, &cot(g, seed + 403)?)?);
    }
    s.order("Jacobi identity order", ns, &jac, 1.9);
    let (q, [a, b, c]) = samples::constant_inputs(g)?;
    s.at_most("Jacobi residual, constant inputs", jacobi_residual(&q, &a, &b, &c)?, 1e-13);
    Ok(())
}

fn thermo_suite(s: &mut Sink, ns: &[usize], seed: u64) -> Result<()> {
    let model = Model::<f64>::default();
    let g = grid(ns[0])?;
    let mut power = 0.0f64;
    let mut production = f64::INFINITY;
    let mut frame = 0.0f64;
    let mut forces = 0.0f64;
    for role in [ThermalRole::Entropy, ThermalRole::InternalEnergy] {
        for k in 0..10u64 {
            let q = state(&model, g, seed + 500 + k, role)?;
            let r = model.rhs(&q)?;
            let (de, ds) = model.differentials(&q)?;
            power = power.max(pair(&de, &r)?.abs() / (de.l2_norm() * r.l2_norm()));
            production = production.min(pair(&ds, &r)?);
            frame = frame.max(model.frame_residuals(&q)?);
        }
        let q = state(&model, g, seed + 600, role)?;
        let ds = model.entropy_differential(&q)?;
        let eta = ne_star_apply(&model, &q, &ds)?;
        let st = model.stresses(&q)?;
        let (v, _) = model.velocity_and_density(&q)?;
        let inv = st.theta.map(|t| 1.0 / t);
        forces = forces
            .max(eta.eta_m.sub(&strain_rate(&v)?.scaled_by(&inv)?.neg())?.max_abs())
            .max(eta.eta_p.sub(&st.sigma_p.scaled_by(&inv)?.neg())?.max_abs())
            .max(eta.eta_t.sub(&inv)?.max_abs());
    }
    s.at_most("power balance |<DE, rhs>| normalized", power, 1e-10);
    s.push("entropy production min <DS, rhs>", production, Bound::AtLeast, -1e-12, String::new());
    s.at_most("frame-indifference residual", frame, 1e-12);
    s.at_most("driving forces N_E* DS = (-D/Θ, -Σ_p/Θ, 1/Θ)", forces, 1e-12);

    let rest = model.rest_state(g, ThermalRole::Entropy, 1.3)?;
    s.at_most("homogeneous equilibrium |rhs|", model.rhs(&rest)?.max_abs(), 1e-12);

    let (mut ham, mut diss, mut split, mut cont) = (vec![], vec![], vec![], vec![]);
    for &n in ns {
        let g = grid(n)?;
        let q = state(&model, g, seed + 700, ThermalRole::Entropy)?;
        let relst = |a: &State<f64>, b: &State<f64>| -> Result<f64> { Ok(a.sub(b)?.l2_norm() / b.l2_norm()) };
        ham.push(relst(&model.v_ham(&q)?, &model.v_ham_closed(&q)?)?);
        diss.push(relst(&model.v_diss(&q)?, &model.v_diss_closed(&q)?)?);
        let qd = model.conservative().rhs(&q)?;
        split.push(model.kinematic_residuals(&q, &qd)?.0.l2_norm());
        cont.push(model.continuity_residual(&q, &qd)?.l2_norm());
    }
    s.order("V_Ham composed vs closed form", ns, &ham, 1.9);
    s.order("V_diss composed vs closed form", ns, &diss, 1.9);
    s.order("kinematic split residual", ns, &split, 1.9);
    s.order("continuity residual", ns, &cont, 1.9);
    Ok(())
}

/// Runs `suite` on d = 2 grids of the given sizes.
pub fn verify(suite: Suite, grids: &[usize], seed: u64) -> Result<Report> {
    if grids.len() < 2 {
        return Err(Error::Config("verify needs at least two grid sizes".into()));
    }
    let mut ns = grids.to_vec();
    ns.sort_unstable();
    ns.dedup();
    for &n in &ns {
        grid(n).map_err(|e| Error::Config(e.to_string()))?;
        if n < 8 {
            return Err(Error::Config(format!("grid size {n} too small")));
        }
    }
    let mut all = Vec::new();
    let suites: &[Suite] = match suite {
        Suite::Full => &[Suite::Lie, Suite::Generic, Suite::Thermo],
        _ => std::slice::from_ref(&suite),
    };
    for &su in suites {
        let mut sink = Sink {
            suite: su,
            checks: Vec::new(),
        };
        match su {
            Suite::Lie => lie_suite(&mut sink, &ns, seed)?,
            Suite::Generic => generic_suite(&mut sink, &ns, seed)?,
            Suite::Thermo => thermo_suite(&mut sink, &ns, seed)?,
            Suite::Full => unreachable!(),
        }
        all.extend(sink.checks);
    }
    Ok(Report {
        suite,
        grids: ns,
        seed,
        checks: all,
    })
}
