//! Small linear-algebra kernels shared by the projector and the stepper:
//! weighted conjugate gradients, a block pseudo-inverse for self-adjoint
//! semidefinite operators given by their action, and power iteration.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Weighted inner product `Σ w_k a_k b_k`.
#[inline]
pub(crate) fn wdot(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, a), b)| w * a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    /// Final residual relative to the right-hand side.
    pub residual: f64,
}

/// Conjugate gradients for `A x = b` with `A` self-adjoint and positive
/// semidefinite in the `w`-weighted product. `x` holds the initial guess.
/// For singular `A` the right-hand side must lie in the range; starting from
/// zero the iterates then stay in the range and converge to the minimal-norm
/// solution. Iteration also stops once the residual drops below `abs_tol`,
/// which matters when `b` is itself at round-off level.
#[allow(clippy::too_many_arguments)]
pub(crate) fn conjugate_gradient(
    solver: &'static str,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    w: &[f64],
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    abs_tol: f64,
    max_iter: usize,
) -> Result<CgOutcome> {
    let len = b.len();
    let b_norm = wdot(w, b, b).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome {
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut ap = vec![0.0; len];
    apply(x, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = wdot(w, &r, &r);
    let target = (rel_tol * b_norm).max(abs_tol);
    for it in 0..=max_iter {
        if rr.sqrt() <= target {
            return Ok(CgOutcome {
                iterations: it,
                residual: rr.sqrt() / b_norm,
            });
        }
        if it == max_iter {
            break;
        }
        apply(&p, &mut ap);
        let pap = wdot(w, &p, &ap);
        if !pap.is_finite() || pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for k in 0..len {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = wdot(w, &r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..len {
            p[k] = r[k] + beta * p[k];
        }
    }
    // Recompute the true residual; the recursive one may have drifted.
    apply(x, &mut ap);
    let true_res = b.iter().zip(&ap).map(|(b, a)| b - a).collect::<Vec<_>>();
    let residual = wdot(w, &true_res, &true_res).sqrt() / b_norm;
    if residual * b_norm <= 10.0 * target {
        return Ok(CgOutcome {
            iterations: max_iter,
            residual,
        });
    }
    Err(Error::NoConvergence {
        solver,
        iterations: max_iter,
        residual,
    })
}

/// One connected block of a sparse self-adjoint operator.
#[derive(Debug, Clone)]
struct Block {
    index: Vec<usize>,
    sqrt_w: Vec<f64>,
    pinv: DMatrix<f64>,
    kernel_dim: usize,
}

/// Moore–Penrose pseudo-inverse (in the weighted product) of a sparse
/// operator that is self-adjoint with respect to diagonal weights. The
/// operator is assembled column by column, split into the connected
/// components of its sparsity graph and each component is inverted through a
/// symmetric eigendecomposition of `W^{1/2} M W^{-1/2}`.
#[derive(Debug, Clone)]
pub(crate) struct BlockPseudoInverse {
    blocks: Vec<Block>,
    len: usize,
}

impl BlockPseudoInverse {
    /// `column(c, out)` must write the operator applied to the `c`-th unit
    /// vector into `out` (pre-zeroed). Eigenvalues below `rel_threshold`
    /// times the largest in magnitude are treated as zero.
    pub(crate) fn assemble(
        w: &[f64],
        mut column: impl FnMut(usize, &mut [f64]),
        rel_threshold: f64,
    ) -> Result<Self> {
        let len = w.len();
        let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(len);
        let mut buf = vec![0.0; len];
        for c in 0..len {
            buf.iter_mut().for_each(|v| *v = 0.0);
            column(c, &mut buf);
            cols.push(buf.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(r, v)| (r, *v)).collect());
        }

        // Union-find over the sparsity pattern.
        let mut parent: Vec<usize> = (0..len).collect();
        fn find(parent: &mut [usize], mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for (c, col) in cols.iter().enumerate() {
            for &(r, _) in col {
                let (ra, rb) = (find(&mut parent, r), find(&mut parent, c));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for k in 0..len {
            let root = find(&mut parent, k);
            groups.entry(root).or_default().push(k);
        }

        let global_scale = cols
            .iter()
            .flat_map(|c| c.iter().map(|(_, v)| v.abs()))
            .fold(0.0, f64::max);
        let mut blocks = Vec::with_capacity(groups.len());
        let mut local = vec![usize::MAX; len];
        for index in groups.into_values() {
            for (a, &k) in index.iter().enumerate() {
                local[k] = a;
            }
            let m = index.len();
            let sqrt_w: Vec<f64> = index.iter().map(|&k| w[k].sqrt()).collect();
            let mut s = DMatrix::<f64>::zeros(m, m);
            for (b, &c) in index.iter().enumerate() {
                for &(r, v) in &cols[c] {
                    let a = local[r];
                    s[(a, b)] = sqrt_w[a] * v / sqrt_w[b];
                }
            }
            let s = (&s + s.transpose()) * 0.5;
            let eig = SymmetricEigen::new(s);
            let cutoff = rel_threshold * global_scale;
            let mut pinv = DMatrix::<f64>::zeros(m, m);
            let mut kernel_dim = 0;
            for (e, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda.abs() <= cutoff {
                    kernel_dim += 1;
                    continue;
                }
                let v = eig.eigenvectors.column(e);
                pinv += (v * v.transpose()) / lambda;
            }
            if !pinv.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("pseudo-inverse assembly".into()));
            }
            for &k in &index {
                local[k] = usize::MAX;
            }
            blocks.push(Block {
                index,
                sqrt_w,
                pinv,
                kernel_dim,
            });
        }
        Ok(Self { blocks, len })
    }

    /// Minimal weighted-norm least-squares solution of `M x = f`.
    pub(crate) fn solve(&self, f: &[f64], x: &mut [f64]) {
        debug_assert_eq!(f.len(), self.len);
        for b in &self.blocks {
            let y = DVector::from_iterator(b.index.len(), b.index.iter().zip(&b.sqrt_w).map(|(&k, s)| s * f[k]));
            let z = &b.pinv * y;
            for ((&k, s), v) in b.index.iter().zip(&b.sqrt_w).zip(z.iter()) {
                x[k] = v / s;
            }
        }
    }

    /// Dimension of the numerical kernel.
    pub(crate) fn kernel_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.kernel_dim).sum()
    }
}

/// Estimates the largest eigenvalue of a `w`-self-adjoint positive
/// semidefinite operator by power iteration from `x0`. Stops when successive
/// Rayleigh quotients agree to `rel_tol`.
pub(crate) fn power_iteration(
    mut apply: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    w: &[f64],
    x0: Vec<f64>,
    max_iter: usize,
    rel_tol: f64,
) -> Result<f64> {
    let mut x = x0;
    let norm = wdot(w, &x, &x).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("power iteration needs a nonzero start".into()));
    }
    x.iter_mut().for_each(|v| *v /= norm);
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        let y = apply(&x)?;
        let rayleigh = wdot(w, &x, &y);
        let ny = wdot(w, &y, &y).sqrt();
        if ny == 0.0 {
            return Ok(0.0);
        }
        x = y.into_iter().map(|v| v / ny).collect();
        if (rayleigh - estimate).abs() <= rel_tol * rayleigh.abs() {
            return Ok(rayleigh.max(estimate));
        }
        estimate = rayleigh;
    }
    Ok(estimate)
}
