//! Product tables of the sphere-type and structure operators, and the
//! auxiliary identities used by the quintic recurrence.
//!
//! Each entry is evaluated as a dense-matrix identity on a concrete (X, Y)
//! pair; the residual is the scale-free Frobenius residual. The grids are
//! transcribed row-by-row so they stay auditable against their source.

use crate::linalg::{flatten, identity, lstsq, rel_residual, Operator, Vector};

/// One named operator identity with both sides materialized.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub label: &'static str,
    pub residual: f64,
}

fn check(label: &'static str, lhs: &Operator, rhs: &Operator) -> IdentityCheck {
    IdentityCheck {
        label,
        residual: rel_residual(lhs, rhs),
    }
}

/// Operator bundle for the complex family on a given (X, Y).
pub struct ComplexOps {
    pub s: Operator,
    pub s_hat: Operator,
    pub j: Operator,
    pub m: f64,
    pub b_sq: f64,
}

pub fn complex_ops(j: &Operator, x: &Vector, y: &Vector) -> ComplexOps {
    let s = crate::algebra::sphere_type_operator(x, y).expect("same length");
    let jx = j.dot(x);
    let jy = j.dot(y);
    let s_hat = crate::algebra::sphere_type_operator(&jx, &jy).expect("same length");
    ComplexOps {
        s,
        s_hat,
        j: j.clone(),
        m: x.dot(&jy),
        b_sq: x.dot(x) * y.dot(y) - x.dot(y).powi(2),
    }
}

/// The 3×3 product grid over {S, Ŝ, J}. Diagonal and pass-through entries are
/// definitional; the off-diagonal entries carry the content.
pub fn complex_table(ops: &ComplexOps) -> Vec<IdentityCheck> {
    let ComplexOps { s, s_hat, j, m, .. } = ops;
    let e = identity(s.nrows());
    let scale = |a: &Operator, f: f64| a.mapv(|v| v * f);
    vec![
        check("S*S", &s.dot(s), &s.dot(s)),
        check("S*Shat", &s.dot(s_hat), &scale(&j.dot(s_hat), *m)),
        check("S*J", &s.dot(j), &j.dot(s_hat)),
        check("Shat*S", &s_hat.dot(s), &scale(&j.dot(s), *m)),
        check("Shat*Shat", &s_hat.dot(s_hat), &s_hat.dot(s_hat)),
        check("Shat*J", &s_hat.dot(j), &j.dot(s)),
        check("J*S", &j.dot(s), &j.dot(s)),
        check("J*Shat", &j.dot(s_hat), &j.dot(s_hat)),
        check("J*J", &j.dot(j), &scale(&e, -1.0)),
    ]
}

/// Residual of the cubic recurrence `T³ = (m² − b²)T + 2mJT²` for `T = S + Ŝ`.
pub fn complex_cubic_residual(ops: &ComplexOps) -> f64 {
    let t = &ops.s + &ops.s_hat;
    let t2 = t.dot(&t);
    let t3 = t2.dot(&t);
    let rhs = t.mapv(|v| v * (ops.m * ops.m - ops.b_sq))
        + ops.j.dot(&t2).mapv(|v| v * 2.0 * ops.m);
    rel_residual(&t3, &rhs)
}

/// Operator bundle for the quaternionic family on a given (X, Y).
pub struct QuatOps {
    pub s: Operator,
    pub si: [Operator; 3],
    pub s_hat: Operator,
    pub j: [Operator; 3],
    pub jscript: Operator,
    pub m: [f64; 3],
    pub m_sq: f64,
    pub b_sq: f64,
}

pub fn quat_ops(j1: &Operator, j2: &Operator, j3: &Operator, x: &Vector, y: &Vector) -> QuatOps {
    let s = crate::algebra::sphere_type_operator(x, y).expect("same length");
    let js = [j1, j2, j3];
    let mut si: Vec<Operator> = Vec::with_capacity(3);
    let mut m = [0.0; 3];
    for (idx, j) in js.iter().enumerate() {
        let jx = j.dot(x);
        let jy = j.dot(y);
        si.push(crate::algebra::sphere_type_operator(&jx, &jy).expect("same length"));
        m[idx] = x.dot(&jy);
    }
    let s_hat = &si[0] + &si[1] + &si[2];
    let mut jscript = Operator::zeros(s.raw_dim());
    for (mi, j) in m.iter().zip(js) {
        jscript.scaled_add(*mi, j);
    }
    QuatOps {
        s,
        si: [si[0].clone(), si[1].clone(), si[2].clone()],
        s_hat,
        j: [j1.clone(), j2.clone(), j3.clone()],
        jscript,
        m,
        m_sq: m.iter().map(|v| v * v).sum(),
        b_sq: x.dot(x) * y.dot(y) - x.dot(y).powi(2),
    }
}

/// The 7×7 product grid over {S, S₁, S₂, S₃, J₁, J₂, J₃}.
pub fn quaternionic_table(ops: &QuatOps) -> Vec<IdentityCheck> {
    let QuatOps { s, si, j, m, .. } = ops;
    let [s1, s2, s3] = si;
    let [j1, j2, j3] = j;
    let [m1, m2, m3] = *m;
    let e = identity(s.nrows());
    let sc = |a: Operator, f: f64| a.mapv(|v| v * f);
    vec![
        // row S
        check("S*S", &s.dot(s), &s.dot(s)),
        check("S*S1", &s.dot(s1), &sc(j1.dot(s1), m1)),
        check("S*S2", &s.dot(s2), &sc(j2.dot(s2), m2)),
        check("S*S3", &s.dot(s3), &sc(j3.dot(s3), m3)),
        check("S*J1", &s.dot(j1), &j1.dot(s1)),
        check("S*J2", &s.dot(j2), &j2.dot(s2)),
        check("S*J3", &s.dot(j3), &j3.dot(s3)),
        // row S1
        check("S1*S", &s1.dot(s), &sc(j1.dot(s), m1)),
        check("S1*S1", &s1.dot(s1), &s1.dot(s1)),
        check("S1*S2", &s1.dot(s2), &sc(j3.dot(s2), -m3)),
        check("S1*S3", &s1.dot(s3), &sc(j2.dot(s3), -m2)),
        check("S1*J1", &s1.dot(j1), &j1.dot(s)),
        check("S1*J2", &s1.dot(j2), &j2.dot(s3)),
        check("S1*J3", &s1.dot(j3), &j3.dot(s2)),
        // row S2
        check("S2*S", &s2.dot(s), &sc(j2.dot(s), m2)),
        check("S2*S1", &s2.dot(s1), &sc(j3.dot(s1), -m3)),
        check("S2*S2", &s2.dot(s2), &s2.dot(s2)),
        check("S2*S3", &s2.dot(s3), &sc(j1.dot(s3), -m1)),
        check("S2*J1", &s2.dot(j1), &j1.dot(s3)),
        check("S2*J2", &s2.dot(j2), &j2.dot(s)),
        check("S2*J3", &s2.dot(j3), &j3.dot(s1)),
        // row S3
        check("S3*S", &s3.dot(s), &sc(j3.dot(s), m3)),
        check("S3*S1", &s3.dot(s1), &sc(j2.dot(s1), -m2)),
        check("S3*S2", &s3.dot(s2), &sc(j1.dot(s2), -m1)),
        check("S3*S3", &s3.dot(s3), &s3.dot(s3)),
        check("S3*J1", &s3.dot(j1), &j1.dot(s2)),
        check("S3*J2", &s3.dot(j2), &j2.dot(s1)),
        check("S3*J3", &s3.dot(j3), &j3.dot(s)),
        // row J1
        check("J1*S", &j1.dot(s), &s1.dot(j1)),
        check("J1*S1", &j1.dot(s1), &s.dot(j1)),
        check("J1*S2", &j1.dot(s2), &s3.dot(j1)),
        check("J1*S3", &j1.dot(s3), &s2.dot(j1)),
        check("J1*J1", &j1.dot(j1), &sc(e.clone(), -1.0)),
        check("J1*J2", &j1.dot(j2), j3),
        check("J1*J3", &j1.dot(j3), &sc(j2.clone(), -1.0)),
        // row J2
        check("J2*S", &j2.dot(s), &s2.dot(j2)),
        check("J2*S1", &j2.dot(s1), &s3.dot(j2)),
        check("J2*S2", &j2.dot(s2), &s.dot(j2)),
        check("J2*S3", &j2.dot(s3), &s1.dot(j2)),
        check("J2*J1", &j2.dot(j1), &sc(j3.clone(), -1.0)),
        check("J2*J2", &j2.dot(j2), &sc(e.clone(), -1.0)),
        check("J2*J3", &j2.dot(j3), j1),
        // row J3
        check("J3*S", &j3.dot(s), &s3.dot(j3)),
        check("J3*S1", &j3.dot(s1), &s2.dot(j3)),
        check("J3*S2", &j3.dot(s2), &s1.dot(j3)),
        check("J3*S3", &j3.dot(s3), &s.dot(j3)),
        check("J3*J1", &j3.dot(j1), j2),
        check("J3*J2", &j3.dot(j2), &sc(j1.clone(), -1.0)),
        check("J3*J3", &j3.dot(j3), &sc(e, -1.0)),
    ]
}

/// Auxiliary operator identities for the quaternionic family.
///
/// The first line is used in its proof-consistent reading `S·Ŝ = S·𝒥`; the
/// other printed reading (`Ŝ·Ŝ = S·𝒥`) is exposed by [`line1_variants`] so a
/// run can document which of the two actually holds.
pub fn quaternionic_identities(ops: &QuatOps) -> Vec<IdentityCheck> {
    let QuatOps {
        s,
        si,
        s_hat,
        jscript,
        m_sq,
        b_sq,
        ..
    } = ops;
    let [s1, s2, s3] = si;
    let q = s1.dot(s1) + s2.dot(s2) + s3.dot(s3);
    let s2op = s.dot(s);
    let t = s + s_hat;
    let sc = |a: Operator, f: f64| a.mapv(|v| v * f);
    vec![
        check("S*Shat = S*Js", &s.dot(s_hat), &s.dot(jscript)),
        check("Shat*S = Js*S", &s_hat.dot(s), &jscript.dot(s)),
        check("S*Js*S = -m^2 S", &s.dot(jscript).dot(s), &sc(s.clone(), -m_sq)),
        check(
            "S*Shat*Js = -m^2 S",
            &s.dot(s_hat).dot(jscript),
            &sc(s.clone(), -m_sq),
        ),
        check("S*Q = S^2*Js", &s.dot(&q), &s2op.dot(jscript)),
        check("Shat*S^2 = Js*S^2", &s_hat.dot(&s2op), &jscript.dot(&s2op)),
        check(
            "Shat*S*Js = Js*S*Js",
            &s_hat.dot(s).dot(jscript),
            &jscript.dot(s).dot(jscript),
        ),
        check("Shat*Js*S = Js*S^2", &s_hat.dot(jscript).dot(s), &jscript.dot(&s2op)),
        check(
            "Shat^2 = Q - Shat*Js + Js*S",
            &s_hat.dot(s_hat),
            &(&q - &s_hat.dot(jscript) + jscript.dot(s)),
        ),
        check(
            "Shat*Q = -b^2 Shat - Q*Js + Js*S^2",
            &s_hat.dot(&q),
            &(sc(s_hat.clone(), -b_sq) - q.dot(jscript) + jscript.dot(&s2op)),
        ),
        check("(S+Shat)*Js = Js*(S+Shat)", &t.dot(jscript), &jscript.dot(&t)),
    ]
}

/// Residuals of the two readings of the first auxiliary identity:
/// `(S·Ŝ = S·𝒥, Ŝ·Ŝ = S·𝒥)`.
pub fn line1_variants(ops: &QuatOps) -> (f64, f64) {
    let rhs = ops.s.dot(&ops.jscript);
    (
        rel_residual(&ops.s.dot(&ops.s_hat), &rhs),
        rel_residual(&ops.s_hat.dot(&ops.s_hat), &rhs),
    )
}

/// Residuals of the quintic recurrence for `T = S + Ŝ` with the two candidate
/// tail coefficients: `(squared: −(b²−m²)²·T, unsquared: −(b²−m²)·T)`.
pub fn quintic_variants(ops: &QuatOps) -> (f64, f64) {
    let t = &ops.s + &ops.s_hat;
    let t2 = t.dot(&t);
    let t3 = t2.dot(&t);
    let t5 = t3.dot(&t2);
    let common = t3.mapv(|v| v * -2.0 * (ops.b_sq + ops.m_sq));
    let d = ops.b_sq - ops.m_sq;
    let squared = &common - &t.mapv(|v| v * d * d);
    let unsquared = &common - &t.mapv(|v| v * d);
    (rel_residual(&t5, &squared), rel_residual(&t5, &unsquared))
}

/// Least-squares certificate that `T⁵` lies in span{T³, T}, without assuming
/// either tail coefficient; returns (coefficients, residual).
pub fn quintic_span_fit(ops: &QuatOps) -> (Vec<f64>, f64) {
    let t = &ops.s + &ops.s_hat;
    let t2 = t.dot(&t);
    let t3 = t2.dot(&t);
    let t5 = t3.dot(&t2);
    let fit = lstsq(&[flatten(&t3), flatten(&t)], &flatten(&t5), 1e-12);
    (fit.coefficients, fit.residual)
}

/// Randomized verification of the family's product table (and, for the
/// quaternionic family, the auxiliary identities): draws `trials` Gaussian
/// (X, Y) pairs and reports the worst residual per group.
pub fn verify_operator_tables(
    spec: &crate::algebra::SpaceFormSpec,
    structures: &crate::algebra::StructureSet,
    trials: usize,
    tol: f64,
    seed: u64,
) -> crate::error::Result<crate::report::TrialReport> {
    use crate::report::{checks, CheckResult, TrialReport};
    use crate::sampling::{gaussian_vector, mix_seed, rng_from_seed};

    structures.check_kind(spec)?;
    let mut table_max: f64 = 0.0;
    let mut identities_max: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = rng_from_seed(mix_seed(&[seed, trial as u64]));
        let x = gaussian_vector(&mut rng, spec.dim);
        let y = gaussian_vector(&mut rng, spec.dim);
        match structures {
            crate::algebra::StructureSet::Real => {
                return Err(crate::error::Error::NotDefinedForReal {
                    operation: "verify_operator_tables",
                })
            }
            crate::algebra::StructureSet::Complex { j } => {
                let ops = complex_ops(j, &x, &y);
                for c in complex_table(&ops) {
                    table_max = table_max.max(c.residual);
                }
            }
            crate::algebra::StructureSet::Quaternionic { j1, j2, j3 } => {
                let ops = quat_ops(j1, j2, j3, &x, &y);
                for c in quaternionic_table(&ops) {
                    table_max = table_max.max(c.residual);
                }
                for c in quaternionic_identities(&ops) {
                    identities_max = identities_max.max(c.residual);
                }
            }
        }
    }
    let mut list = Vec::new();
    match spec.kind {
        crate::algebra::SpaceFormKind::Complex => {
            list.push(CheckResult::new(checks::TABLE16, table_max, tol));
        }
        crate::algebra::SpaceFormKind::Quaternionic => {
            list.push(CheckResult::new(checks::TABLE20, table_max, tol));
            list.push(CheckResult::new(checks::IDENTITIES21, identities_max, tol));
        }
        crate::algebra::SpaceFormKind::Real => unreachable!("rejected above"),
    }
    Ok(TrialReport {
        trial_id: 0,
        kind: spec.kind,
        bundle: None,
        dim: spec.dim,
        curvature: spec.curvature,
        rho: None,
        seed,
        checks: list,
        profile: None,
    })
}
