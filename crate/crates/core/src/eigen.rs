//! Real symmetric eigensolver.
//!
//! The dense path is Householder tridiagonalization followed by the implicit
//! QL algorithm (the EISPACK `tred2`/`tql2` pair). Operators larger than
//! [`DENSE_LIMIT`] go through Lanczos with full reorthogonalization and
//! return only the lowest eigenpairs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::operator::SymmetricOperator;

/// Largest dimension handled by the dense path.
pub const DENSE_LIMIT: usize = 2000;

/// Minimum number of pairs returned by the iterative path.
pub const ITERATIVE_MIN_PAIRS: usize = 10;

/// Ascending eigenvalues with optional orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: Option<Vec<Vec<f64>>>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> Option<&[Vec<f64>]> {
        self.vectors.as_deref()
    }

    pub fn vector(&self, n: usize) -> Option<&[f64]> {
        self.vectors.as_ref()?.get(n).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_finite(op: &SymmetricOperator) -> Result<()> {
    if op.dim() == 0 {
        return Err(Error::EmptyOperator);
    }
    for &(i, j, v) in op.entries() {
        if !v.is_finite() {
            return Err(Error::NonFiniteEntry { row: i, col: j });
        }
    }
    Ok(())
}

/// Full spectrum for `dim <= DENSE_LIMIT`; above that, the lowest
/// [`ITERATIVE_MIN_PAIRS`] pairs.
pub fn eig_sym(op: &SymmetricOperator, want_vectors: bool) -> Result<Spectrum> {
    check_finite(op)?;
    if op.dim() <= DENSE_LIMIT {
        dense(op.dim(), op.to_dense(), want_vectors)
    } else {
        lanczos_lowest(op, ITERATIVE_MIN_PAIRS, want_vectors)
    }
}

/// The lowest `count` pairs (at least [`ITERATIVE_MIN_PAIRS`] on the
/// iterative path).
pub fn eig_sym_lowest(
    op: &SymmetricOperator,
    count: usize,
    want_vectors: bool,
) -> Result<Spectrum> {
    check_finite(op)?;
    if op.dim() <= DENSE_LIMIT {
        let mut s = dense(op.dim(), op.to_dense(), want_vectors)?;
        let keep = count.min(s.values.len());
        s.values.truncate(keep);
        if let Some(v) = s.vectors.as_mut() {
            v.truncate(keep);
        }
        Ok(s)
    } else {
        lanczos_lowest(op, count.max(ITERATIVE_MIN_PAIRS), want_vectors)
    }
}

/// Dense solver on a row-major matrix (only the lower triangle is read).
pub fn eig_dense(dim: usize, matrix: &[f64], want_vectors: bool) -> Result<Spectrum> {
    if dim == 0 {
        return Err(Error::EmptyOperator);
    }
    if matrix.len() != dim * dim {
        return Err(Error::VectorLength {
            expected: dim * dim,
            found: matrix.len(),
        });
    }
    if let Some(pos) = matrix.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteEntry {
            row: pos / dim,
            col: pos % dim,
        });
    }
    dense(dim, matrix.to_vec(), want_vectors)
}

fn dense(n: usize, mut v: Vec<f64>, want_vectors: bool) -> Result<Spectrum> {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;
    Ok(finish(n, d, &v, want_vectors))
}

/// Sorts pairs ascending and fixes each vector's sign so its largest
/// component is positive.
fn finish(n: usize, d: Vec<f64>, v: &[f64], want_vectors: bool) -> Spectrum {
    let cols = d.len();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = want_vectors.then(|| {
        order
            .iter()
            .map(|&k| {
                let mut col: Vec<f64> = (0..n).map(|i| v[i * cols + k]).collect();
                normalize_sign(&mut col);
                col
            })
            .collect()
    });
    Spectrum { values, vectors }
}

fn normalize_sign(x: &mut [f64]) {
    let mut best = 0usize;
    for (i, c) in x.iter().enumerate() {
        if c.abs() > x[best].abs() + 1e-12 {
            best = i;
        }
    }
    if x[best] < 0.0 {
        x.iter_mut().for_each(|c| *c = -*c);
    }
}

/// Householder reduction of the symmetric matrix `v` (row-major `n×n`) to
/// tridiagonal form. On return `d` holds the diagonal, `e[1..]` the
/// subdiagonal and `v` the accumulated orthogonal transformation.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iterations on the tridiagonal `(d, e[1..])`, rotating the
/// columns of `v` (row-major, `rows × n`) along.
fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let rows = v.len() / n;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let max_iter = 30 * n.max(1) + 30;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence {
                        dim: n,
                        iterations: iter,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..rows {
                        let hk = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * hk;
                        v[k * n + i] = c * v[k * n + i] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// SplitMix64 stream for deterministic Lanczos start vectors.
struct SplitMix(u64);

impl SplitMix {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

/// Lowest `count` eigenpairs by Lanczos with full reorthogonalization.
///
/// The Krylov dimension doubles until every requested Ritz pair satisfies
/// `‖Hx − θx‖ <= 1e-9·(1 + |θ|)`; reaching the full dimension without that
/// is reported as [`Error::NoConvergence`].
pub fn lanczos_lowest(
    op: &SymmetricOperator,
    count: usize,
    want_vectors: bool,
) -> Result<Spectrum> {
    check_finite(op)?;
    let n = op.dim();
    let count = count.clamp(1, n);
    let scale = op.max_abs().max(f64::MIN_POSITIVE);
    let mut steps = n.min((2 * count + 30).max(60));
    loop {
        let mut rng = SplitMix(0x5EED_u64 ^ n as u64);
        let mut start: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let s = norm(&start);
        start.iter_mut().for_each(|x| *x /= s);

        let mut q: Vec<Vec<f64>> = Vec::with_capacity(steps);
        let mut alpha = Vec::with_capacity(steps);
        let mut beta = Vec::with_capacity(steps);
        let mut w = vec![0.0; n];
        q.push(start);
        for j in 0..steps {
            op.matvec(&q[j], &mut w);
            let a = dot(&q[j], &w);
            alpha.push(a);
            orthogonalize(&mut w, &q);
            if j + 1 == steps {
                break;
            }
            let b = norm(&w);
            if b <= 1e-12 * scale {
                // Invariant subspace reached; continue in a fresh direction.
                let mut fresh: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
                orthogonalize(&mut fresh, &q);
                let fnorm = norm(&fresh);
                if fnorm <= 1e-12 {
                    break;
                }
                fresh.iter_mut().for_each(|x| *x /= fnorm);
                beta.push(0.0);
                q.push(fresh);
            } else {
                beta.push(b);
                q.push(w.iter().map(|x| x / b).collect());
            }
        }

        let m = alpha.len();
        let mut d = alpha.clone();
        let mut e = vec![0.0; m];
        for (i, b) in beta.iter().take(m - 1).enumerate() {
            e[i + 1] = *b;
        }
        let mut y = vec![0.0; m * m];
        for i in 0..m {
            y[i * m + i] = 1.0;
        }
        tql2(m, &mut y, &mut d, &mut e)?;

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
        let take = count.min(m);
        let mut values = Vec::with_capacity(take);
        let mut vectors = Vec::with_capacity(take);
        let mut converged = take == count;
        let mut hx = vec![0.0; n];
        for &k in order.iter().take(take) {
            let theta = d[k];
            let mut x = vec![0.0; n];
            for (i, qi) in q.iter().enumerate().take(m) {
                let c = y[i * m + k];
                for (xr, qr) in x.iter_mut().zip(qi) {
                    *xr += c * qr;
                }
            }
            let xn = norm(&x);
            x.iter_mut().for_each(|c| *c /= xn);
            op.matvec(&x, &mut hx);
            let res = libm::sqrt(
                hx.iter()
                    .zip(&x)
                    .map(|(h, xi)| (h - theta * xi) * (h - theta * xi))
                    .sum(),
            );
            if res > 1e-9 * (1.0 + theta.abs()) {
                converged = false;
            }
            normalize_sign(&mut x);
            values.push(theta);
            vectors.push(x);
        }
        if converged {
            return Ok(Spectrum {
                values,
                vectors: want_vectors.then_some(vectors),
            });
        }
        if steps >= n {
            return Err(Error::NoConvergence {
                dim: n,
                iterations: steps,
            });
        }
        steps = n.min(2 * steps);
    }
}
