//! Symmetric eigensolvers.
//!
//! Three routines cover every eigenproblem in the crate:
//!
//! * [`tridiag_ql`] - implicit-shift QL for a symmetric tridiagonal matrix,
//!   optionally accumulating the first row of the eigenvector matrix (that
//!   row is all a Gaussian quadrature rule needs for its weights);
//! * [`tridiag_lowest`] - Sturm-count bisection for the lowest eigenvalues
//!   of a large tridiagonal matrix (the finite-difference oracle);
//! * [`dense_sym_eigenvalues`] - cyclic Jacobi up to order 200, Householder
//!   reduction followed by QL above that.

use crate::{Error, Result};

/// Per-eigenvalue iteration cap for the QL sweeps.
const QL_MAX_ITER: usize = 50;

/// Dense symmetric matrix, row-major full storage.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    /// Adds `c` to every diagonal entry.
    pub fn shift_diagonal(&mut self, c: f64) {
        for i in 0..self.n {
            self.a[i * self.n + i] += c;
        }
    }

    /// Largest absolute deviation from symmetry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e` the subdiagonal (`e[i]` couples rows `i` and
/// `i+1`; `e` must have length `d.len()`, the last slot is workspace). On
/// success `d` contains the eigenvalues, unsorted. When `first_row` is
/// provided (length `n`, typically seeded with the first unit vector) the
/// rotations are accumulated into it, so it ends as the first row of the
/// eigenvector matrix.
pub fn tridiag_ql(d: &mut [f64], e: &mut [f64], mut first_row: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    assert_eq!(e.len(), n, "subdiagonal workspace must have length n");
    if n == 0 {
        return Ok(());
    }
    // shift the subdiagonal into e[0..n-1] convention used below
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            // look for a negligible subdiagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::NoConvergence(format!(
                    "tridiagonal QL exceeded {QL_MAX_ITER} iterations at index {l}"
                )));
            }
            // Wilkinson shift
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            while i > l {
                let i0 = i - 1;
                let mut f = s * e[i0];
                let b = c * e[i0];
                r = f.hypot(g);
                e[i] = r;
                if r == 0.0 {
                    d[i] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i] - p;
                r = (d[i0] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i] = g + p;
                g = c * r - b;
                if let Some(z) = first_row.as_deref_mut() {
                    f = z[i];
                    z[i] = s * z[i0] + c * f;
                    z[i0] = c * z[i0] - s * f;
                }
                i -= 1;
            }
            if r == 0.0 && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`,
/// by the Sturm sequence of LDL^T pivots.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let n = d.len();
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..n {
        let off = if i == 0 {
            0.0
        } else {
            let prev = if q.abs() < f64::MIN_POSITIVE {
                f64::MIN_POSITIVE.copysign(q)
            } else {
                q
            };
            e[i - 1] * e[i - 1] / prev
        };
        q = d[i] - x - off;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `k` eigenvalues of a symmetric tridiagonal matrix (diagonal `d`,
/// subdiagonal `e` of length `n - 1`), ascending, by bisection on the Sturm
/// count. Suited to large matrices where only a few eigenvalues matter.
pub fn tridiag_lowest(d: &[f64], e: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = d.len();
    if k > n {
        return Err(Error::Domain(format!(
            "requested {k} eigenvalues from a matrix of order {n}"
        )));
    }
    assert_eq!(e.len() + 1, n, "subdiagonal must have length n - 1");
    // Gershgorin interval
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i == 0 { 0.0 } else { e[i - 1].abs() }
            + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let mut a = if let Some(&prev) = out.last() { prev } else { lo };
        let mut b = hi;
        // invariant: count(a) <= j < count(b)
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(d, e, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
            if (b - a).abs() <= 1e-14 * b.abs().max(1.0) {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form
/// (eigenvalues-only variant: the orthogonal factor is not accumulated).
/// Returns `(d, e)` with `e[i]` coupling rows `i` and `i+1`, `e` of length n
/// (last entry zero, matching the [`tridiag_ql`] workspace convention).
pub fn householder_tridiagonalize(m: &SymMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.size();
    let mut a = m.a.clone();
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    let at = |a: &Vec<f64>, i: usize, j: usize| a[i * n + j];

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0f64;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| at(&a, i, k).abs()).sum();
            if scale == 0.0 {
                e[i] = at(&a, i, l);
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += at(&a, i, k) * at(&a, i, k);
                }
                let f = at(&a, i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f_acc = 0.0f64;
                for j in 0..=l {
                    let mut g_acc = 0.0f64;
                    for k in 0..=j {
                        g_acc += at(&a, j, k) * at(&a, i, k);
                    }
                    for k in (j + 1)..=l {
                        g_acc += at(&a, k, j) * at(&a, i, k);
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * at(&a, i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = at(&a, i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * at(&a, i, k);
                    }
                }
            }
        } else {
            e[i] = at(&a, i, l);
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = at(&a, i, i);
    }
    // repack: e[i] couples i and i+1
    for i in 0..n - 1 {
        e[i] = e[i + 1];
    }
    e[n - 1] = 0.0;
    (d, e)
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// ascending. Robust and simple; kept for moderate orders.
pub fn jacobi_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    const MAX_SWEEPS: usize = 50;
    let n = m.size();
    let mut a = m.clone();
    if n == 1 {
        return Ok(vec![a.get(0, 0)]);
    }
    let fro: f64 = a.a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-14 * fro.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                off += a.get(p, q).abs();
            }
        }
        if off < tol {
            let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(eig);
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                a.set(p, p, a.get(p, p) - h);
                a.set(q, q, a.get(q, q) + h);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a.get(j, p);
                    let ajq = a.get(j, q);
                    let new_p = ajp - s * (ajq + ajp * tau);
                    let new_q = ajq + s * (ajp - ajq * tau);
                    a.set(j, p, new_p);
                    a.set(p, j, new_p);
                    a.set(j, q, new_q);
                    a.set(q, j, new_q);
                }
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "Jacobi sweeps did not reduce off-diagonal norm below {tol} in {MAX_SWEEPS} sweeps"
    )))
}

/// Order above which the dense path switches from Jacobi to Householder+QL.
const JACOBI_LIMIT: usize = 200;

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn dense_sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    if m.size() <= JACOBI_LIMIT {
        jacobi_eigenvalues(m)
    } else {
        let (mut d, mut e) = householder_tridiagonalize(m);
        tridiag_ql(&mut d, &mut e, None)?;
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(d)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// In-place LU factorization with partial pivoting for small dense systems
/// (row-major `n x n`). Returns the pivot permutation.
pub(crate) fn lu_factor(a: &mut [f64], n: usize) -> Result<Vec<usize>> {
    let mut piv: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut best = col;
        let mut best_val = a[piv[col] * n + col].abs();
        for (r, &p) in piv.iter().enumerate().skip(col + 1) {
            let v = a[p * n + col].abs();
            if v > best_val {
                best = r;
                best_val = v;
            }
        }
        if best_val == 0.0 {
            return Err(Error::Validation(format!(
                "singular matrix in LU factorization at column {col}"
            )));
        }
        piv.swap(col, best);
        let prow = piv[col];
        let pivot = a[prow * n + col];
        for &row in piv.iter().skip(col + 1) {
            let factor = a[row * n + col] / pivot;
            a[row * n + col] = factor;
            for j in (col + 1)..n {
                a[row * n + j] -= factor * a[prow * n + j];
            }
        }
    }
    Ok(piv)
}

/// Solves `A x = b` given the output of [`lu_factor`].
pub(crate) fn lu_solve(a: &[f64], piv: &[usize], b: &[f64], out: &mut [f64]) {
    let n = piv.len();
    for i in 0..n {
        let mut s = b[piv[i]];
        for j in 0..i {
            s -= a[piv[i] * n + j] * out[j];
        }
        out[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = out[i];
        for j in (i + 1)..n {
            s -= a[piv[i] * n + j] * out[j];
        }
        out[i] = s / a[piv[i] * n + i];
    }
}

/// Lowest `k` eigenvalues of a symmetric operator given only as a
/// matrix-vector product, by Lanczos with full (two-pass)
/// reorthogonalization. `scale_hint` sets the noise floor for breakdown
/// detection (a bound on the operator norm works). The lowest Ritz values
/// of the growing tridiagonal are monitored and iteration stops once they
/// are stationary.
pub fn lanczos_lowest<F>(n: usize, k: usize, apply: F, scale_hint: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > n {
        return Err(Error::Domain(format!(
            "requested {k} eigenvalues from an operator of dimension {n}"
        )));
    }
    let max_iter = (8 * k + 120).max(700).min(n);
    let scale = scale_hint.abs().max(1.0);

    // deterministic dense start vector
    let mut q_cur: Vec<f64> = (0..n)
        .map(|i| {
            let h = (i as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15);
            0.5 + (h >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    let inv = 1.0 / dot(&q_cur, &q_cur).sqrt();
    q_cur.iter_mut().for_each(|v| *v *= inv);

    let mut q_prev = vec![0.0f64; n];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0f64; n];
    let mut last_probe: Vec<f64> = Vec::new();

    for j in 0..max_iter {
        basis.push(q_cur.clone());
        apply(&q_cur, &mut w);
        let a = dot(&w, &q_cur);
        alpha.push(a);
        for i in 0..n {
            w[i] -= a * q_cur[i];
        }
        if j > 0 {
            let b = beta[j - 1];
            for i in 0..n {
                w[i] -= b * q_prev[i];
            }
        }
        for _ in 0..2 {
            for qv in &basis {
                let c = dot(&w, qv);
                if c != 0.0 {
                    for i in 0..n {
                        w[i] -= c * qv[i];
                    }
                }
            }
        }
        let b = dot(&w, &w).sqrt();

        let have_room = alpha.len() >= (2 * k).min(n - 1) + 2;
        if have_room && (alpha.len() % 8 == 0 || b <= 1e-13 * scale) {
            let probe = tridiag_lowest(&alpha, &beta, k.min(alpha.len()))?;
            if probe.len() == k && !last_probe.is_empty() {
                let drift = probe
                    .iter()
                    .zip(last_probe.iter())
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                if drift <= 1e-12 * scale {
                    return Ok(probe);
                }
            }
            last_probe = probe;
        }
        if b <= 1e-13 * scale {
            // invariant subspace exhausted
            if alpha.len() >= k {
                return tridiag_lowest(&alpha, &beta, k);
            }
            return Err(Error::NoConvergence(
                "Lanczos basis collapsed before enough eigenvalues converged".into(),
            ));
        }
        beta.push(b);
        std::mem::swap(&mut q_prev, &mut q_cur);
        for i in 0..n {
            q_cur[i] = w[i] / b;
        }
    }
    if alpha.len() == n {
        // full Krylov space: the tridiagonal is exact
        return tridiag_lowest(&alpha, &beta[..n - 1], k);
    }
    Err(Error::NoConvergence(format!(
        "Lanczos did not settle the lowest {k} eigenvalues in {max_iter} iterations"
    )))
}
