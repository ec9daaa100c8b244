//! Powers of the curvature operator: the direct product oracle, the closed
//! form for the real family, and the low-dimensional span reductions for the
//! complex and quaternionic families.
//!
//! Reduction coefficients are never hard-coded; they are recovered per
//! instance by least squares on flattened operators, and the residual is the
//! certificate. The direct power path stays independent of every reduction so
//! the two routes can check each other.

use serde::Serialize;

use crate::algebra::{SpaceFormKind, SpaceFormSpec, StructureSet};
use crate::error::{Error, Result};
use crate::linalg::{flatten, identity, lstsq, Operator, Vector};
use crate::report::{checks, CheckResult, TrialReport};
use crate::tables::{complex_cubic_residual, complex_ops, quat_ops, quintic_variants};

/// `A^p` by repeated multiplication; `p = 0` gives the identity.
pub fn operator_power(a: &Operator, p: usize) -> Operator {
    let mut acc = identity(a.nrows());
    for _ in 0..p {
        acc = acc.dot(a);
    }
    acc
}

/// Closed-form power for the real family:
/// `R^p = (−b²c²)^{s−1}·R` for `p = 2s−1` and `(−b²c²)^{s−1}·R²` for `p = 2s`.
pub fn real_power_closed_form(r: &Operator, b_sq: f64, c: f64, p: usize) -> Result<Operator> {
    if p < 1 {
        return Err(Error::PowerOutOfRange {
            kind: SpaceFormKind::Real,
            power: p,
            min: 1,
        });
    }
    let s = p.div_ceil(2);
    let factor = (-b_sq * c * c).powi(s as i32 - 1);
    Ok(if p % 2 == 1 {
        r.mapv(|v| v * factor)
    } else {
        r.dot(r).mapv(|v| v * factor)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(p: usize) -> Self {
        if p % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Smallest power covered by the span reduction of the given family.
pub fn min_reduction_power(kind: SpaceFormKind) -> Option<usize> {
    match kind {
        SpaceFormKind::Real => None,
        SpaceFormKind::Complex => Some(3),
        SpaceFormKind::Quaternionic => Some(5),
    }
}

/// The ordered reduction basis. `jop` is the structure operator matching the
/// family: J for complex, the moment-weighted 𝒥 for quaternionic (both built
/// from the same (X, Y) as `r`). Labels use `J` for `jop` in either case.
pub fn reduction_basis(
    kind: SpaceFormKind,
    r: &Operator,
    jop: &Operator,
    parity: Parity,
) -> Result<Vec<(String, Operator)>> {
    let r2 = r.dot(r);
    Ok(match (kind, parity) {
        (SpaceFormKind::Real, _) => {
            return Err(Error::NotDefinedForReal {
                operation: "reduction_basis",
            })
        }
        (SpaceFormKind::Complex, Parity::Odd) => vec![
            ("J*R^2".to_string(), jop.dot(&r2)),
            ("R".to_string(), r.clone()),
            ("J".to_string(), jop.clone()),
        ],
        (SpaceFormKind::Complex, Parity::Even) => vec![
            ("R^2".to_string(), r2),
            ("J*R".to_string(), jop.dot(r)),
            ("E".to_string(), identity(r.nrows())),
        ],
        (SpaceFormKind::Quaternionic, Parity::Odd) => {
            let r3 = r2.dot(r);
            let r4 = r3.dot(r);
            vec![
                ("J*R^4".to_string(), jop.dot(&r4)),
                ("R^3".to_string(), r3),
                ("J*R^2".to_string(), jop.dot(&r2)),
                ("R".to_string(), r.clone()),
                ("J".to_string(), jop.clone()),
            ]
        }
        (SpaceFormKind::Quaternionic, Parity::Even) => {
            let r3 = r2.dot(r);
            let r4 = r3.dot(r);
            vec![
                ("R^4".to_string(), r4),
                ("J*R^3".to_string(), jop.dot(&r3)),
                ("R^2".to_string(), r2),
                ("J*R".to_string(), jop.dot(r)),
                ("E".to_string(), identity(r.nrows())),
            ]
        }
    })
}

/// Coefficients of one span reduction and the residual that certifies it.
#[derive(Debug, Clone, Serialize)]
pub struct PowerReduction {
    pub power: usize,
    pub basis_labels: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// Express `R^p` in the family's reduction basis by least squares.
///
/// Degenerate bases (zero or dependent columns, e.g. when the moment
/// vanishes) are resolved by dropping dependent columns; the pass criterion
/// is the residual, never coefficient uniqueness.
pub fn reduce_power(
    kind: SpaceFormKind,
    r: &Operator,
    jop: &Operator,
    p: usize,
    tol: f64,
) -> Result<PowerReduction> {
    let min = min_reduction_power(kind).ok_or(Error::NotDefinedForReal {
        operation: "reduce_power",
    })?;
    if p < min {
        return Err(Error::PowerOutOfRange {
            kind,
            power: p,
            min,
        });
    }
    let basis = reduction_basis(kind, r, jop, Parity::of(p))?;
    let target = flatten(&operator_power(r, p));
    let columns: Vec<Vector> = basis.iter().map(|(_, op)| flatten(op)).collect();
    let pivot_tol = (tol * 1e-3).clamp(1e-14, 1e-10);
    let fit = lstsq(&columns, &target, pivot_tol);
    Ok(PowerReduction {
        power: p,
        basis_labels: basis.into_iter().map(|(l, _)| l).collect(),
        coefficients: fit.coefficients,
        residual: fit.residual,
    })
}

/// Check the recurrence satisfied by `T = S + Ŝ` on a concrete (X, Y).
///
/// Complex family: the cubic `T³ = (m² − b²)T + 2mJT²`, reported as one
/// check. Quaternionic family: the quintic `T⁵ = −2(b² + m²)T³ + tail`,
/// reported twice — once per candidate tail coefficient (`−(b²−m²)²·T` from
/// the derivation, `−(b²−m²)·T` as printed) — so every report documents which
/// variant actually holds.
pub fn verify_t_recurrence(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    x: &Vector,
    y: &Vector,
    tol: f64,
) -> Result<TrialReport> {
    spec.check_vector(x)?;
    spec.check_vector(y)?;
    structures.check_kind(spec)?;
    let list = match structures {
        StructureSet::Real => {
            return Err(Error::NotDefinedForReal {
                operation: "verify_t_recurrence",
            })
        }
        StructureSet::Complex { j } => {
            let ops = complex_ops(j, x, y);
            vec![CheckResult::new(
                checks::T_CUBIC,
                complex_cubic_residual(&ops),
                tol,
            )]
        }
        StructureSet::Quaternionic { j1, j2, j3 } => {
            let ops = quat_ops(j1, j2, j3, x, y);
            let (squared, unsquared) = quintic_variants(&ops);
            vec![
                CheckResult::new(checks::PROP31_SQUARED, squared, tol),
                CheckResult::new(checks::PROP31_UNSQUARED, unsquared, tol),
            ]
        }
    };
    Ok(TrialReport {
        trial_id: 0,
        kind: spec.kind,
        bundle: None,
        dim: spec.dim,
        curvature: spec.curvature,
        rho: None,
        seed: 0,
        checks: list,
        profile: None,
    })
}
