//! Symmetric tridiagonal eigensolvers.
//!
//! Three routes are provided and cross-checked in tests:
//! implicit-shift QL (eigenvalues only, or with accumulated eigenvectors),
//! Sturm-count bisection for selected eigenvalues, and — behind the `lapack`
//! feature — LAPACK's divide-and-conquer `dstedc` for large decompositions
//! where the O(n^3) rotation accumulation of QL dominates. The QL and
//! bisection paths are pure Rust and fully deterministic.

use crate::error::{Error, Result};

const MAX_QL_ITERS: usize = 60;

/// Eigendecomposition of a symmetric tridiagonal matrix. Eigenvalues are
/// ascending; eigenvector `k` occupies `vectors[k*dim .. (k+1)*dim]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub dim: usize,
    pub values: Vec<f64>,
    vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// First component of every eigenvector: the expansion weights of the
    /// vacuum basis vector `e_0` in the eigenbasis.
    pub fn vacuum_weights(&self) -> Vec<f64> {
        (0..self.dim).map(|k| self.vectors[k * self.dim]).collect()
    }
}

/// All eigenvalues by implicit-shift QL, ascending. `O(dim^2)`.
pub fn eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Full eigendecomposition. Uses LAPACK divide-and-conquer above a size
/// threshold when built with the `lapack` feature, implicit-shift QL with
/// rotation accumulation otherwise.
pub fn eigen_decompose(diag: &[f64], offdiag: &[f64]) -> Result<EigenDecomposition> {
    let n = diag.len();
    #[cfg(feature = "lapack")]
    {
        if n >= 128 {
            return dstedc(diag, offdiag);
        }
    }
    ql_decompose(diag, offdiag)
}

/// Full eigendecomposition by implicit-shift QL (pure Rust path).
pub fn ql_decompose(diag: &[f64], offdiag: &[f64]) -> Result<EigenDecomposition> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for k in 0..n {
        z[k * n + k] = 1.0;
    }
    ql_implicit(&mut d, &mut e, Some(&mut z))?;

    // sort ascending, permuting eigenvector slots to match
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (slot, &src) in order.iter().enumerate() {
        vectors[slot * n..(slot + 1) * n].copy_from_slice(&z[src * n..(src + 1) * n]);
    }
    Ok(EigenDecomposition {
        dim: n,
        values,
        vectors,
    })
}

/// Implicit-shift QL sweeps. `e` must have length `n` with `e[n-1] = 0`.
/// If `z` is given it holds n columns of length n (column `i` contiguous)
/// that the rotations are accumulated into.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // locate a negligible subdiagonal element to split the block
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
            if m == l + 1 {
                // closed-form 2x2 deflation: exact for zero-diagonal blocks
                let (rt1, rt2, cs1, sn1) = sym_eig_2x2(d[l], e[l], d[l + 1]);
                d[l] = rt1;
                d[l + 1] = rt2;
                e[l] = 0.0;
                if let Some(z) = z.as_deref_mut() {
                    rotate_columns(z, n, l, cs1, -sn1);
                }
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERS {
                return Err(Error::EigenConvergence { index: l });
            }

            // Wilkinson-style shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // deflate prematurely and restart the sweep
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    rotate_columns(z, n, i, c, s);
                }
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

/// Eigenvalues and eigenvector rotation of `[[a, b], [b, c]]`, in the stable
/// formulation of LAPACK's dlaev2: returns `(rt1, rt2, cs1, sn1)` with
/// `|rt1| >= |rt2|` and `(cs1, sn1)` the unit eigenvector for `rt1`.
fn sym_eig_2x2(a: f64, b: f64, c: f64) -> (f64, f64, f64, f64) {
    let sm = a + c;
    let df = a - c;
    let adf = df.abs();
    let tb = b + b;
    let ab = tb.abs();
    let (acmx, acmn) = if a.abs() > c.abs() { (a, c) } else { (c, a) };
    let rt = if adf > ab {
        adf * (1.0 + (ab / adf).powi(2)).sqrt()
    } else if adf < ab {
        ab * (1.0 + (adf / ab).powi(2)).sqrt()
    } else {
        ab * 2.0_f64.sqrt()
    };
    let (rt1, rt2, sgn1) = if sm < 0.0 {
        let rt1 = 0.5 * (sm - rt);
        (rt1, (acmx / rt1) * acmn - (b / rt1) * b, -1.0)
    } else if sm > 0.0 {
        let rt1 = 0.5 * (sm + rt);
        (rt1, (acmx / rt1) * acmn - (b / rt1) * b, 1.0)
    } else {
        (0.5 * rt, -0.5 * rt, 1.0)
    };
    let (cs, sgn2) = if df >= 0.0 { (df + rt, 1.0) } else { (df - rt, -1.0) };
    let acs = cs.abs();
    let (mut cs1, mut sn1);
    if acs > ab {
        let ct = -tb / cs;
        sn1 = 1.0 / (1.0 + ct * ct).sqrt();
        cs1 = ct * sn1;
    } else if ab == 0.0 {
        cs1 = 1.0;
        sn1 = 0.0;
    } else {
        let tn = -cs / tb;
        cs1 = 1.0 / (1.0 + tn * tn).sqrt();
        sn1 = tn * cs1;
    }
    if sgn1 == sgn2 {
        let t = cs1;
        cs1 = -sn1;
        sn1 = t;
    }
    (rt1, rt2, cs1, sn1)
}

/// Apply the Givens rotation to columns `i` and `i+1` of `z`.
#[inline]
fn rotate_columns(z: &mut [f64], n: usize, i: usize, c: f64, s: f64) {
    let (lo, hi) = z.split_at_mut((i + 1) * n);
    let zi = &mut lo[i * n..];
    let zi1 = &mut hi[..n];
    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
        let f = *b;
        *b = s * *a + c * f;
        *a = c * *a - s * f;
    }
}

/// Number of eigenvalues strictly below `x`, by the Sturm sequence of
/// leading-principal-minor pivots.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let n = diag.len();
    let e2max = offdiag.iter().fold(0.0_f64, |a, &t| a.max(t * t));
    let pivmin = (e2max * f64::EPSILON * f64::EPSILON).max(f64::MIN_POSITIVE);
    let mut count = 0;
    let mut q = 1.0_f64;
    for i in 0..n {
        q = if i == 0 {
            diag[0] - x
        } else {
            let t = offdiag[i - 1];
            diag[i] - x - t * t / q
        };
        // zero pivots count as negative (eigenvalue exactly at x)
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
pub fn eigenvalue_by_index(diag: &[f64], offdiag: &[f64], k: usize) -> f64 {
    let n = diag.len();
    assert!(k < n, "eigenvalue index {k} out of range for dim {n}");
    let mut bound = 0.0_f64;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        bound = bound.max(diag[i].abs() + left + right);
    }
    let mut lo = -bound;
    let mut hi = bound;
    // 110 halvings take the interval below 1 ulp of the Gershgorin bound
    for _ in 0..110 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, offdiag, mid) >= k + 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(feature = "lapack")]
fn dstedc(diag: &[f64], offdiag: &[f64]) -> Result<EigenDecomposition> {
    use std::os::raw::{c_char, c_int};
    extern "C" {
        fn dstedc_(
            compz: *const c_char,
            n: *const c_int,
            d: *mut f64,
            e: *mut f64,
            z: *mut f64,
            ldz: *const c_int,
            work: *mut f64,
            lwork: *const c_int,
            iwork: *mut c_int,
            liwork: *const c_int,
            info: *mut c_int,
        );
    }

    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    let mut z = vec![0.0_f64; n * n];
    let compz = b'I' as c_char;
    let n_i = n as c_int;
    let mut info: c_int = 0;

    // workspace query
    let mut work_len: f64 = 0.0;
    let mut iwork_len: c_int = 0;
    let query: c_int = -1;
    unsafe {
        dstedc_(
            &compz,
            &n_i,
            d.as_mut_ptr(),
            e.as_mut_ptr(),
            z.as_mut_ptr(),
            &n_i,
            &mut work_len,
            &query,
            &mut iwork_len,
            &query,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigenConvergence {
            index: info.unsigned_abs() as usize,
        });
    }
    let lwork = work_len as usize;
    let liwork = iwork_len as usize;
    let mut work = vec![0.0_f64; lwork.max(1)];
    let mut iwork = vec![0 as c_int; liwork.max(1)];
    let lwork_i = lwork as c_int;
    let liwork_i = liwork as c_int;
    unsafe {
        dstedc_(
            &compz,
            &n_i,
            d.as_mut_ptr(),
            e.as_mut_ptr(),
            z.as_mut_ptr(),
            &n_i,
            work.as_mut_ptr(),
            &lwork_i,
            iwork.as_mut_ptr(),
            &liwork_i,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigenConvergence {
            index: info.unsigned_abs() as usize,
        });
    }
    // column-major Z with ldz = n: column k is z[k*n .. (k+1)*n], matching
    // the layout used by the QL path; d is ascending on exit
    Ok(EigenDecomposition {
        dim: n,
        values: d,
        vectors: z,
    })
}
