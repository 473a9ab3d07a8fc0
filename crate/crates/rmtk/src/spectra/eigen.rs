//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicit-shift QL iteration.
//!
//! Eigenvalues-only paths skip all transformation accumulation, which is what
//! every empirical-spectrum computation uses. A with-vectors variant exists
//! for residual spot checks and small-matrix work. Complex Hermitian input is
//! handled through the real embedding `[[X, -Y], [Y, X]]` of `A = X + iY`,
//! whose spectrum is that of `A` with every eigenvalue doubled.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use super::SpectraError;

/// Iteration cap per eigenvalue in the QL loop. The usual bound is ~4–5
/// sweeps; 50 leaves a wide margin before declaring failure.
const MAX_QL_SWEEPS: usize = 50;

/// Eigenvalues of a real symmetric matrix, ascending. Reads the lower
/// triangle only.
pub fn symmetric_eigenvalues(a: ArrayView2<'_, f64>) -> Result<Vec<f64>, SpectraError> {
    let n = a.nrows();
    let mut work = lower_triangle_copy(a);
    let (mut d, mut e) = tridiagonalize(&mut work, n);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(d)
}

/// Eigen-decomposition of a real symmetric matrix: ascending eigenvalues and
/// the orthogonal matrix whose columns are the matching eigenvectors.
pub fn symmetric_eigenpairs(
    a: ArrayView2<'_, f64>,
) -> Result<(Vec<f64>, Array2<f64>), SpectraError> {
    let n = a.nrows();
    let mut work = lower_triangle_copy(a);
    let mut q = identity_flat(n);
    let (mut d, mut e) = tridiagonalize_accumulate(&mut work, &mut q, n);
    ql_implicit(&mut d, &mut e, Some(&mut q))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("eigenvalues are finite"));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = q[row * n + src];
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues of a complex Hermitian matrix, ascending, via the doubled
/// real-symmetric embedding.
pub fn hermitian_eigenvalues(a: ArrayView2<'_, Complex64>) -> Result<Vec<f64>, SpectraError> {
    let doubled = symmetric_eigenvalues(embed_hermitian(a).view())?;
    // Every eigenvalue of A appears twice; adjacent sorted entries pair up.
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Eigen-decomposition of a complex Hermitian matrix. An embedded eigenvector
/// `(u; w)` of `[[X, -Y], [Y, X]]` maps back to the complex vector `u + iw`.
pub fn hermitian_eigenpairs(
    a: ArrayView2<'_, Complex64>,
) -> Result<(Vec<f64>, Array2<Complex64>), SpectraError> {
    let n = a.nrows();
    let (values2, vectors2) = symmetric_eigenpairs(embed_hermitian(a).view())?;
    let values: Vec<f64> = values2.iter().copied().step_by(2).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, src) in (0..2 * n).step_by(2).enumerate() {
        let mut norm = 0.0;
        for row in 0..n {
            let z = Complex64::new(vectors2[(row, src)], vectors2[(n + row, src)]);
            vectors[(row, col)] = z;
            norm += z.norm_sqr();
        }
        let scale = 1.0 / norm.sqrt();
        for row in 0..n {
            vectors[(row, col)] *= scale;
        }
    }
    Ok((values, vectors))
}

fn lower_triangle_copy(a: ArrayView2<'_, f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            out[i * n + j] = a[(i, j)];
        }
    }
    out
}

fn identity_flat(n: usize) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    q
}

fn embed_hermitian(a: ArrayView2<'_, Complex64>) -> Array2<f64> {
    let n = a.nrows();
    let mut c = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            c[(i, j)] = z.re;
            c[(i, n + j)] = -z.im;
            c[(n + i, j)] = z.im;
            c[(n + i, n + j)] = z.re;
        }
    }
    c
}

/// Householder reduction of a symmetric matrix (lower triangle of `a`, flat
/// row-major) to tridiagonal form. Returns (diagonal, subdiagonal) with
/// `e[0] = 0`. `a` is destroyed.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut e = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i; // leading block 0..l is transformed at this step
        if l == 1 {
            e[i] = a[i * n];
            continue;
        }
        let scale: f64 = a[i * n..i * n + l].iter().map(|x| x.abs()).sum();
        if scale == 0.0 {
            e[i] = a[i * n + l - 1];
            continue;
        }
        let mut h = 0.0;
        for k in 0..l {
            u[k] = a[i * n + k] / scale;
            h += u[k] * u[k];
        }
        let f = u[l - 1];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g; // h = |v|^2 / 2 for the Householder vector v
        u[l - 1] = f - g;

        // p = A v / h over the leading block, using symmetry row-wise.
        p[..l].fill(0.0);
        for j in 0..l {
            let row = &a[j * n..j * n + j + 1];
            let mut s = 0.0;
            for k in 0..=j {
                s += row[k] * u[k];
            }
            p[j] += s;
            let uj = u[j];
            for k in 0..j {
                p[k] += row[k] * uj;
            }
        }
        let mut kappa = 0.0;
        for k in 0..l {
            p[k] /= h;
            kappa += p[k] * u[k];
        }
        kappa /= 2.0 * h;
        // rank-2 update A <- A - v q' - q v' with q = p - kappa v
        for k in 0..l {
            p[k] -= kappa * u[k];
        }
        for j in 0..l {
            let (f, g) = (u[j], p[j]);
            let row = &mut a[j * n..j * n + j + 1];
            for k in 0..=j {
                row[k] -= f * p[k] + g * u[k];
            }
        }
    }

    let d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    (d, e)
}

/// Same reduction, accumulating the orthogonal factor into `q` (flat
/// row-major, starts as the identity) so that `A = Q T Q'`.
fn tridiagonalize_accumulate(a: &mut [f64], q: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut e = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i;
        if l == 1 {
            e[i] = a[i * n];
            continue;
        }
        let scale: f64 = a[i * n..i * n + l].iter().map(|x| x.abs()).sum();
        if scale == 0.0 {
            e[i] = a[i * n + l - 1];
            continue;
        }
        let mut h = 0.0;
        for k in 0..l {
            u[k] = a[i * n + k] / scale;
            h += u[k] * u[k];
        }
        let f = u[l - 1];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g;
        u[l - 1] = f - g;

        p[..l].fill(0.0);
        for j in 0..l {
            let row = &a[j * n..j * n + j + 1];
            let mut s = 0.0;
            for k in 0..=j {
                s += row[k] * u[k];
            }
            p[j] += s;
            let uj = u[j];
            for k in 0..j {
                p[k] += row[k] * uj;
            }
        }
        let mut kappa = 0.0;
        for k in 0..l {
            p[k] /= h;
            kappa += p[k] * u[k];
        }
        kappa /= 2.0 * h;
        for k in 0..l {
            p[k] -= kappa * u[k];
        }
        for j in 0..l {
            let (f, g) = (u[j], p[j]);
            let row = &mut a[j * n..j * n + j + 1];
            for k in 0..=j {
                row[k] -= f * p[k] + g * u[k];
            }
        }

        // Q <- Q H with H = I - v v'/h: per row, subtract (row.v / h) v'.
        for r in 0..n {
            let row = &mut q[r * n..r * n + l];
            let mut dot = 0.0;
            for k in 0..l {
                dot += row[k] * u[k];
            }
            let t = dot / h;
            for k in 0..l {
                row[k] -= t * u[k];
            }
        }
    }

    let d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    (d, e)
}

/// Implicit-shift QL iteration on a tridiagonal matrix. `d` is the diagonal,
/// `e` the subdiagonal in `e[1..]`. On return `d` holds the (unsorted)
/// eigenvalues. When `q` is given, its columns are rotated along so they end
/// up as the eigenvectors of the original matrix.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut q: Option<&mut [f64]>) -> Result<(), SpectraError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(SpectraError::EigenNonConvergence { index: l });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(q) = q.as_deref_mut() {
                    let ncols = n;
                    for row in 0..n {
                        let base = row * ncols;
                        f = q[base + i + 1];
                        q[base + i + 1] = s * q[base + i] + c * f;
                        q[base + i] = c * q[base + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
