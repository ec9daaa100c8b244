//! The projected-geodesic system of the tangent and unit tangent bundles,
//! evolved in a parallel orthonormal frame along the projected curve.
//!
//! With `u = γ′`, `ξ` the transported vector, and `η = ξ′`, the system reads
//!
//! ```text
//! u′ = R_{ηξ} u,   ξ′ = η,   η′ = 0        (tangent bundle)
//! u′ = R_{ηξ} u,   ξ′ = η,   η′ = −ρ²ξ    (unit tangent bundle)
//! ```
//!
//! The bivector η∧ξ — hence the generator operator A = R_{ηξ} — is constant
//! along exact solutions (a consequence of the system, certified by the
//! test suites rather than assumed blindly), which yields the closed-form
//! path: ξ evolves linearly or harmonically and `u(σ) = exp(σA)·u₀`.
//! Positions on the base manifold are never represented; geodesic curvatures
//! depend only on parallel-frame derivative components.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    bivector_invariants, curvature_operator, BivectorInvariants, SpaceFormKind, SpaceFormSpec,
    StructureSet,
};
use crate::error::{Error, Result};
use crate::linalg::{expm, vnorm, Operator, Vector};
use crate::sampling::{gaussian_vector, rng_from_seed};

/// Which of the two bundle geodesic systems to evolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BundleKind {
    #[serde(rename = "tm")]
    TangentBundle,
    #[serde(rename = "t1m")]
    UnitTangentBundle,
}

impl std::fmt::Display for BundleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BundleKind::TangentBundle => "tm",
            BundleKind::UnitTangentBundle => "t1m",
        })
    }
}

/// Initial data (γ′(0), ξ(0), ξ′(0)) with the unit-speed normalization
/// |u₀|² + |η₀|² = 1 and ρ = |η₀|.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u0: Vector,
    pub xi0: Vector,
    pub eta0: Vector,
    pub rho: f64,
}

const INIT_TOL: f64 = 1e-9;

impl InitialData {
    pub fn validate(&self, spec: &SpaceFormSpec, bundle: BundleKind) -> Result<()> {
        for v in [&self.u0, &self.xi0, &self.eta0] {
            spec.check_vector(v)?;
        }
        if !self.rho.is_finite() || !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::RhoOutOfRange(self.rho));
        }
        let speed_sq = self.u0.dot(&self.u0) + self.eta0.dot(&self.eta0);
        if (speed_sq - 1.0).abs() > INIT_TOL {
            return Err(Error::InvalidInitialData(format!(
                "|u0|^2 + |eta0|^2 = {speed_sq}, expected 1"
            )));
        }
        if (vnorm(&self.eta0) - self.rho).abs() > INIT_TOL {
            return Err(Error::InvalidInitialData(format!(
                "|eta0| = {} but rho = {}",
                vnorm(&self.eta0),
                self.rho
            )));
        }
        if bundle == BundleKind::UnitTangentBundle {
            if (vnorm(&self.xi0) - 1.0).abs() > INIT_TOL {
                return Err(Error::InvalidInitialData(format!(
                    "|xi0| = {} on the unit tangent bundle",
                    vnorm(&self.xi0)
                )));
            }
            if self.xi0.dot(&self.eta0).abs() > INIT_TOL {
                return Err(Error::InvalidInitialData(format!(
                    "<xi0, eta0> = {} on the unit tangent bundle",
                    self.xi0.dot(&self.eta0)
                )));
            }
        }
        Ok(())
    }

    /// Constant speed of the projected curve, `ds/dσ = √(1 − ρ²)`.
    pub fn speed(&self) -> f64 {
        (1.0 - self.rho * self.rho).max(0.0).sqrt()
    }
}

/// State of the system at one value of the bundle arc-length parameter σ.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub sigma: f64,
    pub u: Vector,
    pub xi: Vector,
    pub eta: Vector,
}

impl GeodesicState {
    pub fn from_initial(init: &InitialData) -> Self {
        Self {
            sigma: 0.0,
            u: init.u0.clone(),
            xi: init.xi0.clone(),
            eta: init.eta0.clone(),
        }
    }
}

/// States at σ = 0, h, 2h, …, in strictly increasing uniform steps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<GeodesicState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Seeded random initial data for the requested ρ.
///
/// ρ = 0 produces horizontal data (η₀ = 0, |u₀| = 1), ρ = 1 vertical data
/// (u₀ = 0); anything in between is umbilical. On the unit tangent bundle,
/// ξ₀ is normalized and η₀ is projected orthogonal to it before scaling.
pub fn random_initial(
    spec: &SpaceFormSpec,
    bundle: BundleKind,
    rho: f64,
    seed: u64,
) -> Result<InitialData> {
    if !rho.is_finite() || !(0.0..=1.0).contains(&rho) {
        return Err(Error::RhoOutOfRange(rho));
    }
    let n = spec.dim;
    let mut rng = rng_from_seed(seed);
    let mut xi0 = gaussian_vector(&mut rng, n);
    if bundle == BundleKind::UnitTangentBundle {
        loop {
            let norm = vnorm(&xi0);
            if norm > 1e-6 {
                xi0.mapv_inplace(|v| v / norm);
                break;
            }
            xi0 = gaussian_vector(&mut rng, n);
        }
    }
    let eta0 = if rho > 0.0 {
        loop {
            let mut eta = gaussian_vector(&mut rng, n);
            if bundle == BundleKind::UnitTangentBundle {
                let c = eta.dot(&xi0);
                eta.scaled_add(-c, &xi0);
            }
            let norm = vnorm(&eta);
            if norm > 1e-6 {
                break eta.mapv(|v| v * rho / norm);
            }
        }
    } else {
        Vector::zeros(n)
    };
    let speed = (1.0 - rho * rho).max(0.0).sqrt();
    let u0 = if speed > 0.0 {
        loop {
            let u = gaussian_vector(&mut rng, n);
            let norm = vnorm(&u);
            if norm > 1e-6 {
                break u.mapv(|v| v * speed / norm);
            }
        }
    } else {
        Vector::zeros(n)
    };
    let init = InitialData {
        u0,
        xi0,
        eta0,
        rho,
    };
    init.validate(spec, bundle)?;
    Ok(init)
}

/// The operator driving every derivative of the projected curve:
/// `A = R_{η ξ}` evaluated on the state's (η, ξ).
pub fn generator_operator(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    state: &GeodesicState,
) -> Result<Operator> {
    curvature_operator(spec, structures, &state.eta, &state.xi)
}

/// `[u, Au, A²u, …, A^{count−1}u]` — parallel-frame components of
/// γ′, γ″, …, γ^{(count)}.
pub fn derivative_stack(a: &Operator, u: &Vector, count: usize) -> Result<Vec<Vector>> {
    if count < 1 {
        return Err(Error::StackTooShort { needed: 1, got: 0 });
    }
    if a.ncols() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            actual: u.len(),
        });
    }
    let mut out = Vec::with_capacity(count);
    out.push(u.clone());
    for _ in 1..count {
        let next = a.dot(out.last().expect("nonempty"));
        out.push(next);
    }
    Ok(out)
}

fn rhs(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    bundle: BundleKind,
    rho_sq: f64,
    u: &Vector,
    xi: &Vector,
    eta: &Vector,
) -> Result<(Vector, Vector, Vector)> {
    let a = curvature_operator(spec, structures, eta, xi)?;
    let du = a.dot(u);
    let dxi = eta.clone();
    let deta = match bundle {
        BundleKind::TangentBundle => Vector::zeros(xi.len()),
        BundleKind::UnitTangentBundle => xi.mapv(|v| -rho_sq * v),
    };
    Ok((du, dxi, deta))
}

/// Classical fixed-step fourth-order integration of the first-order system.
///
/// The generator is rebuilt from the current (η, ξ) at every stage — its
/// constancy along solutions is a property under test, not an assumption.
/// No constraint renormalization is applied; drift is an accuracy signal.
pub fn integrate_rk4(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    bundle: BundleKind,
    init: &InitialData,
    sigma_max: f64,
    step: f64,
) -> Result<Trajectory> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::InvalidStep(step));
    }
    if sigma_max < 0.0 || !sigma_max.is_finite() {
        return Err(Error::InvalidStep(sigma_max));
    }
    init.validate(spec, bundle)?;
    let nsteps = (sigma_max / step).round() as usize;
    let rho_sq = init.rho * init.rho;
    let h = step;
    let mut u = init.u0.clone();
    let mut xi = init.xi0.clone();
    let mut eta = init.eta0.clone();
    let mut states = Vec::with_capacity(nsteps + 1);
    states.push(GeodesicState {
        sigma: 0.0,
        u: u.clone(),
        xi: xi.clone(),
        eta: eta.clone(),
    });
    for k in 0..nsteps {
        let (k1u, k1x, k1e) = rhs(spec, structures, bundle, rho_sq, &u, &xi, &eta)?;
        let (k2u, k2x, k2e) = rhs(
            spec,
            structures,
            bundle,
            rho_sq,
            &(&u + &k1u.mapv(|v| v * h / 2.0)),
            &(&xi + &k1x.mapv(|v| v * h / 2.0)),
            &(&eta + &k1e.mapv(|v| v * h / 2.0)),
        )?;
        let (k3u, k3x, k3e) = rhs(
            spec,
            structures,
            bundle,
            rho_sq,
            &(&u + &k2u.mapv(|v| v * h / 2.0)),
            &(&xi + &k2x.mapv(|v| v * h / 2.0)),
            &(&eta + &k2e.mapv(|v| v * h / 2.0)),
        )?;
        let (k4u, k4x, k4e) = rhs(
            spec,
            structures,
            bundle,
            rho_sq,
            &(&u + &k3u.mapv(|v| v * h)),
            &(&xi + &k3x.mapv(|v| v * h)),
            &(&eta + &k3e.mapv(|v| v * h)),
        )?;
        let wsum = |k1: &Vector, k2: &Vector, k3: &Vector, k4: &Vector| {
            (k1 + &(k2 * 2.0) + &(k3 * 2.0) + k4).mapv(|v| v * h / 6.0)
        };
        u = &u + &wsum(&k1u, &k2u, &k3u, &k4u);
        xi = &xi + &wsum(&k1x, &k2x, &k3x, &k4x);
        eta = &eta + &wsum(&k1e, &k2e, &k3e, &k4e);
        states.push(GeodesicState {
            sigma: (k + 1) as f64 * h,
            u: u.clone(),
            xi: xi.clone(),
            eta: eta.clone(),
        });
    }
    Ok(Trajectory { states })
}

/// Exact state at σ using the constant-generator closed form:
/// ξ is linear (tangent bundle) or harmonic with frequency ρ (unit tangent
/// bundle), and `u = exp(σA₀)·u₀` via the truncated-series exponential.
pub fn closed_form_state(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    bundle: BundleKind,
    init: &InitialData,
    sigma: f64,
) -> Result<GeodesicState> {
    let a = curvature_operator(spec, structures, &init.eta0, &init.xi0)?;
    let u = expm(&a.mapv(|v| v * sigma)).dot(&init.u0);
    let (xi, eta) = closed_form_transport(bundle, init, sigma);
    Ok(GeodesicState { sigma, u, xi, eta })
}

fn closed_form_transport(bundle: BundleKind, init: &InitialData, sigma: f64) -> (Vector, Vector) {
    match bundle {
        BundleKind::TangentBundle => {
            (&init.xi0 + &init.eta0.mapv(|v| v * sigma), init.eta0.clone())
        }
        BundleKind::UnitTangentBundle => {
            let rho = init.rho;
            if rho == 0.0 {
                return (init.xi0.clone(), init.eta0.clone());
            }
            let (sn, cs) = (rho * sigma).sin_cos();
            let xi = &init.xi0.mapv(|v| v * cs) + &init.eta0.mapv(|v| v * sn / rho);
            let eta = &init.xi0.mapv(|v| v * -rho * sn) + &init.eta0.mapv(|v| v * cs);
            (xi, eta)
        }
    }
}

/// Closed-form states on the same uniform grid as [`integrate_rk4`].
///
/// `exp(h·A₀)` is computed once and iterated, which is exact in exact
/// arithmetic and keeps rounding well below the integration budgets.
pub fn closed_form_trajectory(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    bundle: BundleKind,
    init: &InitialData,
    sigma_max: f64,
    step: f64,
) -> Result<Trajectory> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::InvalidStep(step));
    }
    let nsteps = (sigma_max / step).round() as usize;
    let a = curvature_operator(spec, structures, &init.eta0, &init.xi0)?;
    let m = expm(&a.mapv(|v| v * step));
    let mut u = init.u0.clone();
    let mut states = Vec::with_capacity(nsteps + 1);
    for k in 0..=nsteps {
        let sigma = k as f64 * step;
        let (xi, eta) = closed_form_transport(bundle, init, sigma);
        states.push(GeodesicState {
            sigma,
            u: u.clone(),
            xi,
            eta,
        });
        if k < nsteps {
            u = m.dot(&u);
        }
    }
    Ok(Trajectory { states })
}

/// Conserved quantities of one state: |u|, |η|, b² = |η∧ξ|², the structure
/// moments, and the Sasaki speed |u|² + |η|².
#[derive(Debug, Clone, Serialize)]
pub struct ConservedSample {
    pub sigma: f64,
    pub u_norm: f64,
    pub eta_norm: f64,
    pub b_sq: f64,
    pub m: Vec<f64>,
    pub speed_sq: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    pub samples: Vec<ConservedSample>,
    /// Largest scale-free drift of any quantity from its σ = 0 value.
    pub max_drift: f64,
}

/// Evaluate the constants of motion along a trajectory and report the worst
/// drift relative to the initial state.
pub fn conserved_quantities(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    trajectory: &Trajectory,
) -> Result<ConservationReport> {
    if trajectory.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut samples = Vec::with_capacity(trajectory.len());
    for state in &trajectory.states {
        let inv = bivector_invariants(spec, structures, &state.eta, &state.xi)?;
        let m = match &inv {
            BivectorInvariants::Real { .. } => vec![],
            BivectorInvariants::Complex { m, .. } => vec![*m],
            BivectorInvariants::Quaternionic { m, .. } => m.to_vec(),
        };
        let u_norm = vnorm(&state.u);
        let eta_norm = vnorm(&state.eta);
        samples.push(ConservedSample {
            sigma: state.sigma,
            u_norm,
            eta_norm,
            b_sq: inv.b_sq(),
            m,
            speed_sq: u_norm * u_norm + eta_norm * eta_norm,
        });
    }
    let first = &samples[0];
    let drift = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let mut max_drift: f64 = 0.0;
    for s in &samples[1..] {
        max_drift = max_drift
            .max(drift(s.u_norm, first.u_norm))
            .max(drift(s.eta_norm, first.eta_norm))
            .max(drift(s.b_sq, first.b_sq))
            .max(drift(s.speed_sq, first.speed_sq));
        for (a, b) in s.m.iter().zip(&first.m) {
            max_drift = max_drift.max(drift(*a, *b));
        }
    }
    Ok(ConservationReport { samples, max_drift })
}

/// On-disk form of one geodesic's initial data, pinned to its space form so
/// regression fixtures reproduce bit-for-bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialDataFile {
    pub kind: SpaceFormKind,
    pub bundle: BundleKind,
    pub dim: usize,
    pub curvature: f64,
    pub rho: f64,
    pub u0: Vec<f64>,
    pub xi0: Vec<f64>,
    pub eta0: Vec<f64>,
}

impl InitialDataFile {
    pub fn from_parts(spec: &SpaceFormSpec, bundle: BundleKind, init: &InitialData) -> Self {
        Self {
            kind: spec.kind,
            bundle,
            dim: spec.dim,
            curvature: spec.curvature,
            rho: init.rho,
            u0: init.u0.to_vec(),
            xi0: init.xi0.to_vec(),
            eta0: init.eta0.to_vec(),
        }
    }

    pub fn into_parts(self) -> Result<(SpaceFormSpec, BundleKind, InitialData)> {
        let spec = SpaceFormSpec::new(self.kind, self.dim, self.curvature)?;
        let init = InitialData {
            u0: Vector::from_vec(self.u0),
            xi0: Vector::from_vec(self.xi0),
            eta0: Vector::from_vec(self.eta0),
            rho: self.rho,
        };
        init.validate(&spec, self.bundle)?;
        Ok((spec, self.bundle, init))
    }
}
