//! Dense kernels shared across the crate: residual norms, the matrix
//! exponential, and the orthogonalization machinery behind Frenet chains,
//! numerical rank, and small least-squares fits.

use ndarray::{Array1, Array2, Axis};

/// Components of a tangent vector in a fixed orthonormal frame.
pub type Vector = Array1<f64>;
/// Dense linear operator acting on frame components.
pub type Operator = Array2<f64>;

pub fn identity(n: usize) -> Operator {
    Array2::eye(n)
}

pub fn vnorm(v: &Vector) -> f64 {
    v.dot(v).sqrt()
}

pub fn frob(a: &Operator) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Scale-free residual `‖lhs − rhs‖_F / max(1, ‖lhs‖_F, ‖rhs‖_F)`.
///
/// The same normalization is used by every check in the crate so that pass
/// criteria stay uniform across operators of very different magnitude.
pub fn rel_residual(lhs: &Operator, rhs: &Operator) -> f64 {
    frob(&(lhs - rhs)) / frob(lhs).max(frob(rhs)).max(1.0)
}

pub fn vec_rel_residual(lhs: &Vector, rhs: &Vector) -> f64 {
    vnorm(&(lhs - rhs)) / vnorm(lhs).max(vnorm(rhs)).max(1.0)
}

/// The rank-one operator `x yᵀ`.
pub fn outer(x: &Vector, y: &Vector) -> Operator {
    let xc = x.view().insert_axis(Axis(1));
    let yr = y.view().insert_axis(Axis(0));
    xc.dot(&yr)
}

/// Row-major flattening, used when operators enter least-squares fits.
pub fn flatten(a: &Operator) -> Vector {
    a.iter().cloned().collect()
}

/// Matrix exponential by scaling and squaring of a truncated series.
///
/// The argument is scaled by `2^-k` until its Frobenius norm is at most 1/2,
/// the exponential series is summed until terms drop below 1e-16 relative,
/// and the result is squared `k` times. For the skew operators this crate
/// feeds it, relative accuracy stays near 1e-15 for norms up to ~32.
pub fn expm(a: &Operator) -> Operator {
    let n = a.nrows();
    let norm = frob(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = 2f64.powi(-squarings);
    let scaled = a.mapv(|x| x * scale);
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=30u32 {
        term = term.dot(&scaled).mapv(|x| x / f64::from(k));
        sum = &sum + &term;
        if frob(&term) <= 1e-16 * frob(&sum) {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Incremental modified Gram-Schmidt with one reorthogonalization pass.
///
/// Directions are accepted explicitly by the caller, which lets the Frenet
/// chain stop at its own curvature threshold instead of a fixed rank cutoff.
#[derive(Debug, Clone, Default)]
pub struct Orthogonalizer {
    dirs: Vec<Vector>,
}

impl Orthogonalizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn directions(&self) -> &[Vector] {
        &self.dirs
    }

    /// Component of `v` orthogonal to the accepted directions, and its norm.
    pub fn remainder(&self, v: &Vector) -> (Vector, f64) {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &self.dirs {
                let c = r.dot(q);
                r.scaled_add(-c, q);
            }
        }
        let n = vnorm(&r);
        (r, n)
    }

    /// Accept a new direction (normalized internally). Returns `false` and
    /// ignores the vector if its norm underflows.
    pub fn push(&mut self, v: Vector) -> bool {
        let n = vnorm(&v);
        if n <= 0.0 || !n.is_finite() {
            return false;
        }
        self.dirs.push(v.mapv(|x| x / n));
        true
    }
}

/// Numerical rank by column-pivoted orthogonalization.
///
/// Columns are equilibrated to unit norm first (rank is invariant under
/// column scaling, and the raw derivative stacks span fifteen orders of
/// magnitude); a pivot is accepted while its remaining norm exceeds `tol`
/// times the largest equilibrated column norm.
pub fn numerical_rank(columns: &[Vector], tol: f64) -> usize {
    let mut work: Vec<Vector> = columns
        .iter()
        .filter_map(|c| {
            let n = vnorm(c);
            (n > 0.0 && n.is_finite()).then(|| c.mapv(|x| x / n))
        })
        .collect();
    let mut rank = 0;
    while !work.is_empty() {
        let (best, best_norm) = work
            .iter()
            .enumerate()
            .map(|(i, w)| (i, vnorm(w)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if best_norm <= tol {
            break;
        }
        let q = work.swap_remove(best).mapv(|x| x / best_norm);
        for w in work.iter_mut() {
            for _ in 0..2 {
                let c = w.dot(&q);
                w.scaled_add(-c, &q);
            }
        }
        rank += 1;
    }
    rank
}

/// Outcome of a least-squares fit: one coefficient per input column and the
/// scale-free residual of the reconstruction, recomputed from scratch.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// Minimize `‖target − Σ xⱼ·colⱼ‖₂` by column-pivoted Gram-Schmidt.
///
/// Columns are equilibrated to unit norm before pivoting. Columns whose
/// remaining norm falls below `pivot_tol` are treated as dependent and get a
/// zero coefficient; the residual is unaffected by that choice, and the pass
/// criterion everywhere in this crate is the residual, never coefficient
/// uniqueness.
pub fn lstsq(columns: &[Vector], target: &Vector, pivot_tol: f64) -> LeastSquares {
    let k = columns.len();
    let mut coefficients = vec![0.0; k];
    let scales: Vec<f64> = columns.iter().map(vnorm).collect();
    let normalized: Vec<Option<Vector>> = columns
        .iter()
        .zip(&scales)
        .map(|(c, &s)| (s > 0.0 && s.is_finite()).then(|| c.mapv(|x| x / s)))
        .collect();

    let mut work: Vec<(usize, Vector)> = normalized
        .iter()
        .enumerate()
        .filter_map(|(j, c)| c.clone().map(|v| (j, v)))
        .collect();
    let mut qs: Vec<Vector> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    while !work.is_empty() {
        let (slot, norm) = work
            .iter()
            .enumerate()
            .map(|(slot, (_, w))| (slot, vnorm(w)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if norm <= pivot_tol {
            break;
        }
        let (j, w) = work.swap_remove(slot);
        let q = w.mapv(|x| x / norm);
        for (_, w) in work.iter_mut() {
            for _ in 0..2 {
                let c = w.dot(&q);
                w.scaled_add(-c, &q);
            }
        }
        qs.push(q);
        pivots.push(j);
    }

    if !qs.is_empty() {
        // R = Qᵀ·A_pivot is upper triangular in pivot order; back-substitute.
        let r = qs.len();
        let mut rmat = vec![vec![0.0; r]; r];
        for (s, &j) in pivots.iter().enumerate() {
            let a = normalized[j].as_ref().expect("pivot column is nonzero");
            for (i, q) in qs.iter().enumerate().take(s + 1) {
                rmat[i][s] = q.dot(a);
            }
        }
        let y: Vec<f64> = qs.iter().map(|q| q.dot(target)).collect();
        let mut x = vec![0.0; r];
        for s in (0..r).rev() {
            let mut acc = y[s];
            for t in s + 1..r {
                acc -= rmat[s][t] * x[t];
            }
            x[s] = if rmat[s][s] != 0.0 { acc / rmat[s][s] } else { 0.0 };
        }
        for (s, &j) in pivots.iter().enumerate() {
            coefficients[j] = x[s] / scales[j];
        }
    }

    let mut recon = Array1::zeros(target.len());
    for (j, c) in columns.iter().enumerate() {
        if coefficients[j] != 0.0 {
            recon.scaled_add(coefficients[j], c);
        }
    }
    let residual = vec_rel_residual(target, &recon);
    LeastSquares {
        coefficients,
        residual,
    }
}
