//! Generalized Frenet curvatures of projected curves, extracted from
//! parallel-frame derivative stacks, plus the structure certificates built on
//! them: vanishing tails, span-rank bounds, linear dependence relations, and
//! constancy along the flow.

use serde::{Deserialize, Serialize};

use crate::algebra::{SpaceFormKind, SpaceFormSpec, StructureSet};
use crate::error::{Error, Result};
use crate::geodesic::{
    closed_form_state, derivative_stack, generator_operator, BundleKind, InitialData,
};
use crate::linalg::{lstsq, numerical_rank, vnorm, Orthogonalizer, Vector};

/// Speed and geodesic curvatures of a constant-speed curve.
///
/// The chain stops at the first curvature below the relative zero threshold
/// (or at the ambient dimension); curvatures past the stop are zero by
/// convention, since the Frenet frame is no longer determined there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub speed: f64,
    pub curvatures: Vec<f64>,
    /// Number of Frenet directions resolved: `curvatures.len() + 1`.
    pub frenet_rank: usize,
}

impl CurvatureProfile {
    /// k_i (1-based), zero past the resolved chain.
    pub fn k(&self, i: usize) -> f64 {
        if i >= 1 && i <= self.curvatures.len() {
            self.curvatures[i - 1]
        } else {
            0.0
        }
    }
}

/// A curvature chain together with the roundoff amplification of each entry.
///
/// `amplification[i]` is `‖D_{i+2}‖ / |E_{i+2}|`, the factor by which
/// floating-point noise in the stack inflates into `curvatures[i]`: the
/// orthogonal remainder behind kᵢ is obtained by cancelling a vector of norm
/// `‖D‖` down to `|E|`, so its forward error is about machine epsilon times
/// this ratio.
#[derive(Debug, Clone)]
pub struct ChainDetail {
    pub profile: CurvatureProfile,
    pub amplification: Vec<f64>,
}

/// Longest prefix of a chain whose entries are numerically determined at
/// tolerance `tol` in f64 (extraction noise at most half of `tol`).
pub fn well_determined_len(amplification: &[f64], tol: f64) -> usize {
    let limit = 0.5 * tol / f64::EPSILON;
    amplification.iter().take_while(|&&a| a <= limit).count()
}

/// Geodesic curvatures from a stack `[γ′, γ″, …]` of σ-derivatives of a
/// curve with constant speed `v = ds/dσ`.
///
/// Orthogonalizes the stack by modified Gram-Schmidt (one reorthogonalization
/// pass) and returns `kᵢ = |E_{i+1}| / (|Eᵢ|·v)`; because the speed is
/// constant the affine reparametrization to arclength rescales derivative p
/// by `v^{−p}` and leaves these ratios unchanged. The chain truncates at the
/// first `kᵢ < tol_zero·max(1, k₁)`.
pub fn curvature_profile(
    derivs: &[Vector],
    speed: f64,
    tol_zero: f64,
) -> Result<CurvatureProfile> {
    curvature_chain(derivs, speed, tol_zero).map(|d| d.profile)
}

/// [`curvature_profile`] plus per-entry roundoff amplification.
pub fn curvature_chain(derivs: &[Vector], speed: f64, tol_zero: f64) -> Result<ChainDetail> {
    if derivs.is_empty() {
        return Err(Error::StackTooShort { needed: 1, got: 0 });
    }
    if speed <= 0.0 || !speed.is_finite() {
        return Err(Error::DegenerateCurve);
    }
    let dim = derivs[0].len();
    let first_norm = vnorm(&derivs[0]);
    if first_norm <= 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let mut orth = Orthogonalizer::new();
    orth.push(derivs[0].clone());
    let mut prev_norm = first_norm;
    let mut curvatures: Vec<f64> = Vec::new();
    let mut amplification: Vec<f64> = Vec::new();
    for d in derivs.iter().skip(1) {
        if orth.len() == dim {
            break;
        }
        let (r, n) = orth.remainder(d);
        let k = n / (prev_norm * speed);
        let scale = curvatures.first().copied().unwrap_or(k).max(1.0);
        if !k.is_finite() || k < tol_zero * scale {
            break;
        }
        curvatures.push(k);
        amplification.push(vnorm(d) / n);
        orth.push(r);
        prev_norm = n;
    }
    Ok(ChainDetail {
        profile: CurvatureProfile {
            speed,
            frenet_rank: curvatures.len() + 1,
            curvatures,
        },
        amplification,
    })
}

/// Index at which the curvature tail must vanish for each family.
pub fn zero_tail_start(kind: SpaceFormKind) -> usize {
    match kind {
        SpaceFormKind::Real => 3,
        SpaceFormKind::Complex => 6,
        SpaceFormKind::Quaternionic => 10,
    }
}

/// Number of leading curvatures that are generically nonzero per family.
pub fn generic_leading_count(kind: SpaceFormKind) -> usize {
    zero_tail_start(kind) - 1
}

/// Outcome of the vanishing-tail certificate.
#[derive(Debug, Clone, Serialize)]
pub struct TailCheck {
    pub pass: bool,
    pub first_violation: Option<usize>,
    /// Largest `kᵢ / max(1, k₁)` over the tail indices (0 when none resolved).
    pub max_tail_ratio: f64,
}

/// Every curvature with index ≥ 3 / 6 / 10 (real / complex / quaternionic)
/// must satisfy `kᵢ ≤ tol·max(1, k₁)`.
pub fn vanishing_tail_check(
    profile: &CurvatureProfile,
    kind: SpaceFormKind,
    tol: f64,
) -> TailCheck {
    let scale = profile.curvatures.first().copied().unwrap_or(0.0).max(1.0);
    let start = zero_tail_start(kind);
    let mut max_ratio: f64 = 0.0;
    let mut first_violation = None;
    for (idx0, k) in profile.curvatures.iter().enumerate() {
        let i = idx0 + 1;
        if i < start {
            continue;
        }
        let ratio = k / scale;
        max_ratio = max_ratio.max(ratio);
        if ratio > tol && first_violation.is_none() {
            first_violation = Some(i);
        }
    }
    TailCheck {
        pass: first_violation.is_none(),
        first_violation,
        max_tail_ratio: max_ratio,
    }
}

/// Numerical rank of the stacked derivative matrix (rank-revealing
/// orthogonalization, threshold `tol` relative to the largest equilibrated
/// column).
pub fn span_rank(derivs: &[Vector], tol: f64) -> usize {
    numerical_rank(derivs, tol)
}

/// Maximal span rank of a projected geodesic's derivatives per family.
pub fn span_rank_bound(kind: SpaceFormKind) -> usize {
    match kind {
        SpaceFormKind::Real => 3,
        SpaceFormKind::Complex => 6,
        SpaceFormKind::Quaternionic => 10,
    }
}

/// Linear-dependence certificate for the highest structural derivative.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    /// Registry name of the relation: eq6 / eq10 / eq14.
    pub name: &'static str,
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// Check the family's derivative dependence:
///
/// * real: `γ⁽⁴⁾ = −b²c²·γ⁽²⁾`, residual taken directly;
/// * complex: `γ⁽⁷⁾ ∈ span{γ⁽⁵⁾, γ⁽³⁾, γ′}`, least-squares fit;
/// * quaternionic: `γ⁽¹¹⁾ ∈ span{γ⁽⁹⁾, γ⁽⁷⁾, γ⁽⁵⁾, γ⁽³⁾, γ′}`.
pub fn linear_relation_check(
    derivs: &[Vector],
    kind: SpaceFormKind,
    b_sq: f64,
    c: f64,
    tol: f64,
) -> Result<RelationCheck> {
    let needed = match kind {
        SpaceFormKind::Real => 4,
        SpaceFormKind::Complex => 7,
        SpaceFormKind::Quaternionic => 11,
    };
    if derivs.len() < needed {
        return Err(Error::StackTooShort {
            needed,
            got: derivs.len(),
        });
    }
    let pivot_tol = (tol * 1e-3).clamp(1e-14, 1e-10);
    Ok(match kind {
        SpaceFormKind::Real => {
            let coeff = -b_sq * c * c;
            let rhs = derivs[1].mapv(|v| v * coeff);
            let residual = crate::linalg::vec_rel_residual(&derivs[3], &rhs);
            RelationCheck {
                name: crate::report::checks::EQ6,
                coefficients: vec![coeff],
                residual,
            }
        }
        SpaceFormKind::Complex => {
            let cols = [derivs[4].clone(), derivs[2].clone(), derivs[0].clone()];
            let fit = lstsq(&cols, &derivs[6], pivot_tol);
            RelationCheck {
                name: crate::report::checks::EQ10,
                coefficients: fit.coefficients,
                residual: fit.residual,
            }
        }
        SpaceFormKind::Quaternionic => {
            let cols = [
                derivs[8].clone(),
                derivs[6].clone(),
                derivs[4].clone(),
                derivs[2].clone(),
                derivs[0].clone(),
            ];
            let fit = lstsq(&cols, &derivs[10], pivot_tol);
            RelationCheck {
                name: crate::report::checks::EQ14,
                coefficients: fit.coefficients,
                residual: fit.residual,
            }
        }
    })
}

/// Profiles sampled along the flow plus their worst index-wise deviation.
///
/// The gate runs over the numerically well-determined prefix of the chain:
/// past a near-vanishing curvature the Gram-Schmidt remainder is obtained by
/// cancelling many orders of magnitude, and no f64 extraction can certify the
/// following entries at tight tolerances. Those entries are still reported
/// and their deviation surfaces in `full_deviation`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstancyReport {
    pub sigmas: Vec<f64>,
    pub profiles: Vec<CurvatureProfile>,
    /// Curvature count gated per profile (identical across profiles on pass).
    pub gated_len: usize,
    /// Worst index-wise deviation over the gated prefix.
    pub max_deviation: f64,
    /// Worst index-wise deviation over the full reported chains.
    pub full_deviation: f64,
    pub ranks_equal: bool,
    pub pass: bool,
}

/// Recompute the curvature profile at each sample σ (closed-form state,
/// generator rebuilt from the evolved state) and require index-wise agreement
/// within `tol` over the well-determined prefix, with matching prefix length.
pub fn constancy_check(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    bundle: BundleKind,
    init: &InitialData,
    sample_sigmas: &[f64],
    tol: f64,
    tol_zero: f64,
) -> Result<ConstancyReport> {
    if sample_sigmas.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: sample_sigmas.len(),
        });
    }
    if init.rho >= 1.0 {
        return Err(Error::DegenerateCurve);
    }
    let speed = init.speed();
    let mut profiles = Vec::with_capacity(sample_sigmas.len());
    let mut gated_lens = Vec::with_capacity(sample_sigmas.len());
    for &sigma in sample_sigmas {
        let state = closed_form_state(spec, structures, bundle, init, sigma)?;
        let a = generator_operator(spec, structures, &state)?;
        let stack = derivative_stack(&a, &state.u, spec.dim)?;
        let chain = curvature_chain(&stack, speed, tol_zero)?;
        gated_lens.push(well_determined_len(&chain.amplification, tol));
        profiles.push(chain.profile);
    }
    let base = &profiles[0];
    let gated_len = gated_lens[0];
    let lens_equal = gated_lens.iter().all(|&l| l == gated_len);
    let mut max_deviation: f64 = 0.0;
    let mut full_deviation: f64 = 0.0;
    let mut ranks_equal = true;
    for p in &profiles[1..] {
        ranks_equal &= p.frenet_rank == base.frenet_rank;
        let len = p.curvatures.len().max(base.curvatures.len());
        for i in 1..=len {
            let dev = (p.k(i) - base.k(i)).abs();
            full_deviation = full_deviation.max(dev);
            if i <= gated_len {
                max_deviation = max_deviation.max(dev);
            }
        }
    }
    let pass = lens_equal && max_deviation <= tol;
    Ok(ConstancyReport {
        sigmas: sample_sigmas.to_vec(),
        profiles,
        gated_len,
        max_deviation,
        full_deviation,
        ranks_equal,
        pass,
    })
}

/// |γ⁽ᵖ⁾| across sample σ values, used to certify that derivative norms are
/// constants of the flow.
pub fn derivative_norm_drift(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    bundle: BundleKind,
    init: &InitialData,
    sample_sigmas: &[f64],
    max_order: usize,
) -> Result<f64> {
    let mut base: Option<Vec<f64>> = None;
    let mut drift: f64 = 0.0;
    for &sigma in sample_sigmas {
        let state = closed_form_state(spec, structures, bundle, init, sigma)?;
        let a = generator_operator(spec, structures, &state)?;
        let stack = derivative_stack(&a, &state.u, max_order)?;
        let norms: Vec<f64> = stack.iter().map(vnorm).collect();
        match &base {
            None => base = Some(norms),
            Some(b) => {
                for (n, b) in norms.iter().zip(b) {
                    drift = drift.max((n - b).abs() / b.max(1.0));
                }
            }
        }
    }
    Ok(drift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::random_initial;
    use ndarray::array;

    #[test]
    fn planar_unit_circle() {
        let derivs = vec![array![0.0, 1.0], array![-1.0, 0.0]];
        let p = curvature_profile(&derivs, 1.0, 1e-8).unwrap();
        assert_eq!(p.curvatures.len(), 1);
        assert!((p.curvatures[0] - 1.0).abs() < 1e-12);
        assert_eq!(p.frenet_rank, 2);
    }

    #[test]
    fn classical_helix() {
        // (cos t, sin t, t) at t = 0, speed √2: k₁ = k₂ = 1/2
        let derivs = vec![
            array![0.0, 1.0, 1.0],
            array![-1.0, 0.0, 0.0],
            array![0.0, -1.0, 0.0],
        ];
        let p = curvature_profile(&derivs, 2f64.sqrt(), 1e-8).unwrap();
        assert_eq!(p.curvatures.len(), 2);
        assert!((p.curvatures[0] - 0.5).abs() < 1e-12);
        assert!((p.curvatures[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn straight_line_has_empty_profile() {
        let derivs = vec![array![1.0, 0.0, 0.0], array![0.0, 0.0, 0.0]];
        let p = curvature_profile(&derivs, 1.0, 1e-8).unwrap();
        assert!(p.curvatures.is_empty());
        assert_eq!(p.frenet_rank, 1);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let derivs = vec![array![0.0, 0.0]];
        assert!(matches!(
            curvature_profile(&derivs, 1.0, 1e-8),
            Err(Error::DegenerateCurve)
        ));
        assert!(matches!(
            curvature_profile(&[array![1.0, 0.0]], 0.0, 1e-8),
            Err(Error::DegenerateCurve)
        ));
        assert!(curvature_profile(&[], 1.0, 1e-8).is_err());
    }

    #[test]
    fn tail_check_flags_violations() {
        let profile = CurvatureProfile {
            speed: 1.0,
            curvatures: vec![2.0, 1.0, 0.5],
            frenet_rank: 4,
        };
        let t = vanishing_tail_check(&profile, SpaceFormKind::Real, 1e-8);
        assert!(!t.pass);
        assert_eq!(t.first_violation, Some(3));
        assert!((t.max_tail_ratio - 0.25).abs() < 1e-15);
        // same profile is fine for the complex family (tail starts at 6)
        let t = vanishing_tail_check(&profile, SpaceFormKind::Complex, 1e-8);
        assert!(t.pass);
    }

    #[test]
    fn relation_check_needs_long_enough_stack() {
        let spec = SpaceFormSpec::new(SpaceFormKind::Complex, 8, 1.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let init = random_initial(&spec, BundleKind::UnitTangentBundle, 0.5, 7).unwrap();
        let a =
            generator_operator(&spec, &st, &crate::geodesic::GeodesicState::from_initial(&init))
                .unwrap();
        let stack = derivative_stack(&a, &init.u0, 5).unwrap();
        assert!(matches!(
            linear_relation_check(&stack, SpaceFormKind::Complex, 1.0, 1.0, 1e-9),
            Err(Error::StackTooShort { needed: 7, .. })
        ));
    }

    #[test]
    fn constancy_rejects_vertical_and_short_samples() {
        let spec = SpaceFormSpec::new(SpaceFormKind::Real, 5, 1.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let bundle = BundleKind::UnitTangentBundle;
        let vertical = random_initial(&spec, bundle, 1.0, 3).unwrap();
        assert!(matches!(
            constancy_check(&spec, &st, bundle, &vertical, &[0.0, 0.5], 1e-9, 1e-8),
            Err(Error::DegenerateCurve)
        ));
        let umbilical = random_initial(&spec, bundle, 0.5, 3).unwrap();
        assert!(matches!(
            constancy_check(&spec, &st, bundle, &umbilical, &[0.0], 1e-9, 1e-8),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn derivative_norms_constant_along_flow() {
        let spec = SpaceFormSpec::new(SpaceFormKind::Complex, 8, 4.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let bundle = BundleKind::UnitTangentBundle;
        let init = random_initial(&spec, bundle, 0.6, 13).unwrap();
        let drift = derivative_norm_drift(
            &spec,
            &st,
            bundle,
            &init,
            &[0.0, 0.25, 0.5, 0.75, 1.0],
            6,
        )
        .unwrap();
        assert!(drift <= 1e-12, "derivative norms drifted by {drift}");
    }

    #[test]
    fn horizontal_profiles_stay_empty_along_flow() {
        let spec = SpaceFormSpec::new(SpaceFormKind::Real, 5, 1.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let bundle = BundleKind::TangentBundle;
        let init = random_initial(&spec, bundle, 0.0, 5).unwrap();
        let rep =
            constancy_check(&spec, &st, bundle, &init, &[0.0, 0.5, 1.0], 1e-9, 1e-8).unwrap();
        assert!(rep.pass);
        for p in &rep.profiles {
            assert!(p.curvatures.is_empty());
        }
    }
}
