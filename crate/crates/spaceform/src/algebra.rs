//! Structure operators and curvature operators of the three constant-
//! curvature families.
//!
//! Everything lives in a fixed orthonormal frame adapted to the structure:
//! the complex structure J pairs coordinates (2k−1, 2k), and the quaternionic
//! structures J₁, J₂, J₃ act on each 4-block as left multiplication by the
//! unit quaternions i, j, k. Any parallel adapted frame realizes these
//! matrices, so no base-manifold chart is ever represented.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{outer, Operator, Vector};

pub use crate::tables::verify_operator_tables;

/// Which constant-curvature family a computation runs in.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum SpaceFormKind {
    Real,
    Complex,
    Quaternionic,
}

impl std::fmt::Display for SpaceFormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SpaceFormKind::Real => "real",
            SpaceFormKind::Complex => "complex",
            SpaceFormKind::Quaternionic => "quaternionic",
        };
        f.write_str(s)
    }
}

/// A space form: family, real dimension, and nonzero curvature parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormSpec {
    pub kind: SpaceFormKind,
    pub dim: usize,
    pub curvature: f64,
}

impl SpaceFormSpec {
    pub fn new(kind: SpaceFormKind, dim: usize, curvature: f64) -> Result<Self> {
        if !curvature.is_finite() || curvature == 0.0 {
            return Err(Error::InvalidCurvature(curvature));
        }
        let constraint = match kind {
            SpaceFormKind::Real if dim < 2 => Some("must be at least 2"),
            SpaceFormKind::Complex if dim < 2 || !dim.is_multiple_of(2) => {
                Some("must be even and at least 2")
            }
            SpaceFormKind::Quaternionic if dim < 4 || !dim.is_multiple_of(4) => {
                Some("must be a positive multiple of 4")
            }
            _ => None,
        };
        if let Some(constraint) = constraint {
            return Err(Error::InvalidDimension {
                kind,
                dim,
                constraint,
            });
        }
        Ok(Self {
            kind,
            dim,
            curvature,
        })
    }

    pub(crate) fn check_vector(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        Ok(())
    }
}

/// Block-diagonal rotation pairing coordinates (2k−1, 2k):
/// `e_{2k−1} ↦ e_{2k}`, `e_{2k} ↦ −e_{2k−1}`.
pub fn make_complex_structure(n: usize) -> Result<Operator> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidDimension {
            kind: SpaceFormKind::Complex,
            dim: n,
            constraint: "must be even and at least 2",
        });
    }
    let mut j = Operator::zeros((n, n));
    for k in 0..n / 2 {
        j[[2 * k + 1, 2 * k]] = 1.0;
        j[[2 * k, 2 * k + 1]] = -1.0;
    }
    Ok(j)
}

/// On each 4-block with basis order (1, i, j, k), the three operators act as
/// left multiplication by i, j, k; left multiplication makes the quaternion
/// relations `J₁J₂ = J₃`, `J₂J₃ = J₁`, `J₃J₁ = J₂` automatic.
pub fn make_quaternionic_structures(n: usize) -> Result<(Operator, Operator, Operator)> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::InvalidDimension {
            kind: SpaceFormKind::Quaternionic,
            dim: n,
            constraint: "must be a positive multiple of 4",
        });
    }
    let mut j1 = Operator::zeros((n, n));
    let mut j2 = Operator::zeros((n, n));
    let mut j3 = Operator::zeros((n, n));
    for t in 0..n / 4 {
        let b = 4 * t;
        // i·(a + bi + cj + dk) = −b + ai − dj + ck
        j1[[b + 1, b]] = 1.0;
        j1[[b, b + 1]] = -1.0;
        j1[[b + 3, b + 2]] = 1.0;
        j1[[b + 2, b + 3]] = -1.0;
        // j·(a + bi + cj + dk) = −c + di + aj − bk
        j2[[b + 2, b]] = 1.0;
        j2[[b + 3, b + 1]] = -1.0;
        j2[[b, b + 2]] = -1.0;
        j2[[b + 1, b + 3]] = 1.0;
        // k·(a + bi + cj + dk) = −d − ci + bj + ak
        j3[[b + 3, b]] = 1.0;
        j3[[b + 2, b + 1]] = 1.0;
        j3[[b + 1, b + 2]] = -1.0;
        j3[[b, b + 3]] = -1.0;
    }
    Ok((j1, j2, j3))
}

/// The parallel structure operators attached to a space form.
#[derive(Debug, Clone)]
pub enum StructureSet {
    Real,
    Complex { j: Operator },
    Quaternionic { j1: Operator, j2: Operator, j3: Operator },
}

impl StructureSet {
    pub fn for_spec(spec: &SpaceFormSpec) -> Result<Self> {
        Ok(match spec.kind {
            SpaceFormKind::Real => StructureSet::Real,
            SpaceFormKind::Complex => StructureSet::Complex {
                j: make_complex_structure(spec.dim)?,
            },
            SpaceFormKind::Quaternionic => {
                let (j1, j2, j3) = make_quaternionic_structures(spec.dim)?;
                StructureSet::Quaternionic { j1, j2, j3 }
            }
        })
    }

    pub fn kind(&self) -> SpaceFormKind {
        match self {
            StructureSet::Real => SpaceFormKind::Real,
            StructureSet::Complex { .. } => SpaceFormKind::Complex,
            StructureSet::Quaternionic { .. } => SpaceFormKind::Quaternionic,
        }
    }

    pub(crate) fn check_kind(&self, spec: &SpaceFormSpec) -> Result<()> {
        if self.kind() != spec.kind {
            return Err(Error::StructureMismatch(spec.kind));
        }
        Ok(())
    }
}

/// The sphere-type operator `Z ↦ ⟨Y,Z⟩X − ⟨X,Z⟩Y`, i.e. `XYᵀ − YXᵀ`.
pub fn sphere_type_operator(x: &Vector, y: &Vector) -> Result<Operator> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(outer(x, y) - outer(y, x))
}

/// Curvature operator of the space form on the plane spanned by X and Y.
///
/// * real: `c·S_XY`
/// * complex: `(c/4)(S + Ŝ + 2mJ)` with `Ŝ = S_{JX,JY}`, `m = ⟨X,JY⟩`
/// * quaternionic: `(c/4)(S + S₁ + S₂ + S₃ + 2(m₁J₁ + m₂J₂ + m₃J₃))`
///
/// The result depends on (X, Y) only through the bivector X∧Y.
pub fn curvature_operator(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    x: &Vector,
    y: &Vector,
) -> Result<Operator> {
    spec.check_vector(x)?;
    spec.check_vector(y)?;
    structures.check_kind(spec)?;
    let s = sphere_type_operator(x, y)?;
    let c = spec.curvature;
    Ok(match structures {
        StructureSet::Real => s.mapv(|v| v * c),
        StructureSet::Complex { j } => {
            let jx = j.dot(x);
            let jy = j.dot(y);
            let s_hat = sphere_type_operator(&jx, &jy)?;
            let m = x.dot(&jy);
            let total = &s + &s_hat + &j.mapv(|v| 2.0 * m * v);
            total.mapv(|v| v * c / 4.0)
        }
        StructureSet::Quaternionic { j1, j2, j3 } => {
            let mut total = s;
            for j in [j1, j2, j3] {
                let jx = j.dot(x);
                let jy = j.dot(y);
                let m = x.dot(&jy);
                total = total + sphere_type_operator(&jx, &jy)? + j.mapv(|v| 2.0 * m * v);
            }
            total.mapv(|v| v * c / 4.0)
        }
    })
}

/// Scalar invariants of the bivector X∧Y, with the moment-weighted structure
/// operator in the quaternionic case.
#[derive(Debug, Clone)]
pub enum BivectorInvariants {
    Real {
        b_sq: f64,
    },
    Complex {
        b_sq: f64,
        m: f64,
    },
    Quaternionic {
        b_sq: f64,
        m: [f64; 3],
        m_sq: f64,
        /// `𝒥 = m₁J₁ + m₂J₂ + m₃J₃`; satisfies `𝒥² = −m²E`.
        jscript: Operator,
    },
}

impl BivectorInvariants {
    pub fn b_sq(&self) -> f64 {
        match self {
            BivectorInvariants::Real { b_sq }
            | BivectorInvariants::Complex { b_sq, .. }
            | BivectorInvariants::Quaternionic { b_sq, .. } => *b_sq,
        }
    }

    pub fn m_sq(&self) -> f64 {
        match self {
            BivectorInvariants::Real { .. } => 0.0,
            BivectorInvariants::Complex { m, .. } => m * m,
            BivectorInvariants::Quaternionic { m_sq, .. } => *m_sq,
        }
    }

    pub fn jscript(&self) -> Option<&Operator> {
        match self {
            BivectorInvariants::Quaternionic { jscript, .. } => Some(jscript),
            _ => None,
        }
    }
}

/// `b² = |X|²|Y|² − ⟨X,Y⟩²` plus the kind-appropriate moments.
pub fn bivector_invariants(
    spec: &SpaceFormSpec,
    structures: &StructureSet,
    x: &Vector,
    y: &Vector,
) -> Result<BivectorInvariants> {
    spec.check_vector(x)?;
    spec.check_vector(y)?;
    structures.check_kind(spec)?;
    let b_sq = x.dot(x) * y.dot(y) - x.dot(y).powi(2);
    Ok(match structures {
        StructureSet::Real => BivectorInvariants::Real { b_sq },
        StructureSet::Complex { j } => BivectorInvariants::Complex {
            b_sq,
            m: x.dot(&j.dot(y)),
        },
        StructureSet::Quaternionic { j1, j2, j3 } => {
            let m = [
                x.dot(&j1.dot(y)),
                x.dot(&j2.dot(y)),
                x.dot(&j3.dot(y)),
            ];
            let m_sq = m.iter().map(|v| v * v).sum();
            let mut jscript = Operator::zeros((spec.dim, spec.dim));
            for (mi, j) in m.iter().zip([j1, j2, j3]) {
                jscript.scaled_add(*mi, j);
            }
            BivectorInvariants::Quaternionic {
                b_sq,
                m,
                m_sq,
                jscript,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob, identity, rel_residual, vnorm};
    use ndarray::array;

    fn unit(n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn complex_structure_minimal_block() {
        let j = make_complex_structure(2).unwrap();
        assert_eq!(j.dot(&unit(2, 0)), unit(2, 1));
        assert_eq!(j.dot(&unit(2, 1)), unit(2, 0).mapv(|v| -v));
    }

    #[test]
    fn complex_structure_squares_to_minus_identity() {
        let j = make_complex_structure(4).unwrap();
        let jj = j.dot(&j);
        assert!(rel_residual(&jj, &identity(4).mapv(|v| -v)) == 0.0);
    }

    #[test]
    fn complex_structure_rejects_odd_dimension() {
        assert!(matches!(
            make_complex_structure(3),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn quaternionic_structures_act_as_unit_quaternions() {
        let (j1, j2, j3) = make_quaternionic_structures(4).unwrap();
        assert_eq!(j1.dot(&unit(4, 0)), unit(4, 1));
        assert_eq!(j2.dot(&unit(4, 0)), unit(4, 2));
        assert_eq!(j3.dot(&unit(4, 0)), unit(4, 3));
    }

    #[test]
    fn quaternionic_relations_hold_entrywise() {
        let (j1, j2, j3) = make_quaternionic_structures(4).unwrap();
        assert!(frob(&(j1.dot(&j2) - &j3)) == 0.0);
        assert!(frob(&(j2.dot(&j3) - &j1)) == 0.0);
        assert!(frob(&(j3.dot(&j1) - &j2)) == 0.0);
    }

    #[test]
    fn quaternionic_structures_orthogonal_and_skew() {
        let (j1, j2, j3) = make_quaternionic_structures(8).unwrap();
        for j in [&j1, &j2, &j3] {
            assert!(frob(&(j.t().to_owned() + j)) == 0.0);
            assert!(rel_residual(&j.t().dot(j), &identity(8)) == 0.0);
        }
    }

    #[test]
    fn quaternionic_rejects_bad_dimension() {
        assert!(make_quaternionic_structures(6).is_err());
    }

    #[test]
    fn sphere_operator_on_basis_pair() {
        let x = unit(3, 0);
        let y = unit(3, 1);
        let s = sphere_type_operator(&x, &y).unwrap();
        assert_eq!(s.dot(&unit(3, 0)), unit(3, 1).mapv(|v| -v));
        assert_eq!(s.dot(&unit(3, 1)), unit(3, 0));
        assert_eq!(s.dot(&unit(3, 2)), Vector::zeros(3));
    }

    #[test]
    fn sphere_operator_degenerate_bivector_is_zero() {
        let x: Vector = array![1.0, 2.0, -0.5];
        let s = sphere_type_operator(&x, &x).unwrap();
        assert_eq!(frob(&s), 0.0);
    }

    #[test]
    fn sphere_operator_cube_orthonormal_pair() {
        // S³ = −b²S with b² = 1 for an orthonormal pair
        let x = unit(4, 0);
        let y = unit(4, 1);
        let s = sphere_type_operator(&x, &y).unwrap();
        let s3 = s.dot(&s).dot(&s);
        assert!(rel_residual(&s3, &s.mapv(|v| -v)) < 1e-15);
    }

    #[test]
    fn sphere_operator_antisymmetric_in_arguments() {
        let x: Vector = array![0.3, -1.2, 0.7, 2.0];
        let y: Vector = array![1.1, 0.4, -0.6, 0.2];
        let sxy = sphere_type_operator(&x, &y).unwrap();
        let syx = sphere_type_operator(&y, &x).unwrap();
        assert!(frob(&(&sxy + &syx)) == 0.0);
    }

    #[test]
    fn real_curvature_operator_direct_substitution() {
        let spec = SpaceFormSpec::new(SpaceFormKind::Real, 4, 2.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let r = curvature_operator(&spec, &st, &unit(4, 0), &unit(4, 1)).unwrap();
        assert_eq!(r.dot(&unit(4, 0)), unit(4, 1).mapv(|v| -2.0 * v));
        assert_eq!(r.dot(&unit(4, 1)), unit(4, 0).mapv(|v| 2.0 * v));
        assert_eq!(r.dot(&unit(4, 2)), Vector::zeros(4));
        assert_eq!(r.dot(&unit(4, 3)), Vector::zeros(4));
    }

    #[test]
    fn complex_curvature_totally_real_plane() {
        // X = e1, Y = e3 has m = 0; the sectional curvature is c/4.
        let spec = SpaceFormSpec::new(SpaceFormKind::Complex, 4, 4.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let x = unit(4, 0);
        let y = unit(4, 2);
        let r = curvature_operator(&spec, &st, &x, &y).unwrap();
        assert!(vnorm(&(r.dot(&x) + unit(4, 2))) < 1e-15);
        let sect = r.dot(&y).dot(&x);
        assert!((sect - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quaternionic_line_sectional_curvature_is_c() {
        for &c in &[-4.0, 1.0, 4.0] {
            let spec = SpaceFormSpec::new(SpaceFormKind::Quaternionic, 8, c).unwrap();
            let st = StructureSet::for_spec(&spec).unwrap();
            let x = unit(8, 0);
            let y = match &st {
                StructureSet::Quaternionic { j1, .. } => j1.dot(&x),
                _ => unreachable!(),
            };
            let r = curvature_operator(&spec, &st, &x, &y).unwrap();
            let sect = r.dot(&y).dot(&x);
            assert!((sect - c).abs() < 1e-12, "c={c}, got {sect}");
        }
    }

    #[test]
    fn bivector_invariants_basics() {
        let spec = SpaceFormSpec::new(SpaceFormKind::Real, 4, 1.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let inv = bivector_invariants(&spec, &st, &unit(4, 0), &unit(4, 1)).unwrap();
        assert_eq!(inv.b_sq(), 1.0);
        let inv = bivector_invariants(
            &spec,
            &st,
            &unit(4, 0).mapv(|v| 2.0 * v),
            &unit(4, 1).mapv(|v| 3.0 * v),
        )
        .unwrap();
        assert_eq!(inv.b_sq(), 36.0);
    }

    #[test]
    fn complex_moment_of_holomorphic_pair() {
        let spec = SpaceFormSpec::new(SpaceFormKind::Complex, 4, 1.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let x = unit(4, 0);
        let y = match &st {
            StructureSet::Complex { j } => j.dot(&x),
            _ => unreachable!(),
        };
        match bivector_invariants(&spec, &st, &x, &y).unwrap() {
            BivectorInvariants::Complex { m, .. } => assert_eq!(m, -1.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(SpaceFormSpec::new(SpaceFormKind::Real, 2, 1.0).is_ok());
        assert!(SpaceFormSpec::new(SpaceFormKind::Real, 1, 1.0).is_err());
        assert!(SpaceFormSpec::new(SpaceFormKind::Complex, 7, 1.0).is_err());
        assert!(SpaceFormSpec::new(SpaceFormKind::Quaternionic, 10, 1.0).is_err());
        assert!(SpaceFormSpec::new(SpaceFormKind::Real, 4, 0.0).is_err());
        assert!(SpaceFormSpec::new(SpaceFormKind::Real, 4, f64::NAN).is_err());
    }

    #[test]
    fn curvature_operator_rejects_mismatches() {
        let spec = SpaceFormSpec::new(SpaceFormKind::Real, 4, 1.0).unwrap();
        let st = StructureSet::for_spec(&spec).unwrap();
        let short: Vector = array![1.0, 0.0];
        assert!(curvature_operator(&spec, &st, &short, &unit(4, 1)).is_err());
        let complex_spec = SpaceFormSpec::new(SpaceFormKind::Complex, 4, 1.0).unwrap();
        assert!(curvature_operator(&complex_spec, &st, &unit(4, 0), &unit(4, 1)).is_err());
    }
}
