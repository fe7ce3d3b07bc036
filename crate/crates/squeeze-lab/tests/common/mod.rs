//! Independent oracles for the integration and acceptance suites.
#![allow(dead_code)] // each test binary uses a different subset
//!
//! These deliberately avoid the code paths of the library under test: the
//! propagator oracle exponentiates the *physical* (complex, pre-gauge)
//! Hamiltonian with a plain scaled Taylor series, and the eigenvalue oracle
//! runs Sturm bisection on the characteristic polynomial in exact rational
//! arithmetic.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use squeeze_lab::operators::{coupling, kerr_diagonal, KerrSpec, TruncationSpec};

/// Dense physical Hamiltonian on the invariant subspace: off-diagonals
/// `H[j+1][j] = +i t_j`, `H[j][j+1] = -i t_j`, Kerr diagonal `d_j`.
pub fn physical_hamiltonian(spec: &TruncationSpec) -> Vec<Complex64> {
    let n = spec.dim;
    let mut h = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        h[j * n + j] = Complex64::new(kerr_diagonal(spec.photons_at(j), spec.kerr), 0.0);
        if j + 1 < n {
            let t = coupling(spec.n, j);
            h[j * n + (j + 1)] = Complex64::new(0.0, -t);
            h[(j + 1) * n + j] = Complex64::new(0.0, t);
        }
    }
    h
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// `exp(-i r H_phys) e_0` by scaling-and-squaring Taylor summation, mapped
/// to the gauged frame with `D^dagger`, `D = diag(i^j)`.
pub fn taylor_oracle_state(spec: &TruncationSpec, r: f64) -> Vec<Complex64> {
    let n = spec.dim;
    let h = physical_hamiltonian(spec);
    // A = -i r H
    let mut a: Vec<Complex64> = h.iter().map(|&v| Complex64::new(0.0, -r) * v).collect();
    let norm1: f64 = (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5_f64.powi(s as i32);
    for v in a.iter_mut() {
        *v *= scale;
    }
    // Taylor: exp(A) = sum A^k / k!
    let mut result = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        result[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let mut term = result.clone();
    for k in 1..60 {
        term = matmul(&term, &a, n);
        let inv = 1.0 / k as f64;
        let mut largest = 0.0_f64;
        for v in term.iter_mut() {
            *v *= inv;
            largest = largest.max(v.norm());
        }
        for (r_, t) in result.iter_mut().zip(&term) {
            *r_ += t;
        }
        if largest < 1e-22 {
            break;
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result, n);
    }
    // psi_phys = exp(.) e_0, then gauge back: psi = D^dagger psi_phys
    let minus_i = Complex64::new(0.0, -1.0);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut psi = Vec::with_capacity(n);
    for j in 0..n {
        psi.push(phase * result[j * n]);
        phase *= minus_i;
    }
    psi
}

/// `min_phi || a - e^{i phi} b ||`.
pub fn phase_aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact rational entries of the Jacobi matrix: `t_j^2` (integers) and the
/// diagonal `d_j`, with the Kerr strength given as an exact rational.
fn rational_entries(
    n: u32,
    dim: usize,
    kerr: Option<(u32, BigRational)>,
) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut t_sq = Vec::with_capacity(dim.saturating_sub(1));
    for j in 0..dim.saturating_sub(1) {
        let mut prod = BigInt::from(1);
        for k in 1..=n as u64 {
            prod *= BigInt::from(n as u64 * j as u64 + k);
        }
        t_sq.push(BigRational::from_integer(prod));
    }
    let mut diag = Vec::with_capacity(dim);
    for j in 0..dim {
        let m = n as u64 * j as u64;
        let d = match &kerr {
            None => big(0),
            Some((order, strength)) => {
                let mut prod = big(1);
                for i in 0..*order as u64 {
                    prod *= big(m as i64 - i as i64);
                }
                if m < *order as u64 {
                    big(0)
                } else {
                    let conv = if *order == 4 { big(24) } else { big(1) };
                    strength.clone() * prod / conv
                }
            }
        };
        diag.push(d);
    }
    (t_sq, diag)
}

/// Sturm count in exact rational arithmetic: the number of eigenvalues of
/// the Jacobi matrix strictly below `x`, via sign variations of the leading
/// principal minors of `A - x I`.
fn rational_sturm_count(
    t_sq: &[BigRational],
    diag: &[BigRational],
    x: &BigRational,
) -> usize {
    let dim = diag.len();
    let mut prev = big(1); // p_0
    let mut cur = diag[0].clone() - x; // p_1
    let mut variations = 0usize;
    let mut last_sign = 1i8; // sign of p_0
    let note_sign = |v: &BigRational, last: &mut i8, variations: &mut usize| {
        use num_traits::Zero;
        let s = if v.is_zero() {
            -*last // zero takes the opposite sign of its predecessor
        } else if v > &big(0) {
            1
        } else {
            -1
        };
        if s != *last {
            *variations += 1;
        }
        *last = s;
    };
    note_sign(&cur, &mut last_sign, &mut variations);
    for k in 2..=dim {
        let next = (diag[k - 1].clone() - x) * cur.clone() - t_sq[k - 2].clone() * prev.clone();
        prev = cur;
        cur = next;
        note_sign(&cur, &mut last_sign, &mut variations);
    }
    variations
}

/// All eigenvalues by exact-rational Sturm bisection, to absolute accuracy
/// `tol`. Only sensible for small dims; every sign decision is exact.
pub fn rational_eigenvalues(
    n: u32,
    dim: usize,
    kerr: Option<(u32, BigRational)>,
    tol: f64,
) -> Vec<f64> {
    let (t_sq, diag) = rational_entries(n, dim, kerr);
    // integer Gershgorin bound
    let mut bound = 0.0_f64;
    for j in 0..dim {
        let d: f64 = rational_to_f64(&diag[j]);
        let tl = if j > 0 {
            rational_to_f64(&t_sq[j - 1]).sqrt()
        } else {
            0.0
        };
        let tr = if j + 1 < dim {
            rational_to_f64(&t_sq[j]).sqrt()
        } else {
            0.0
        };
        bound = bound.max(d.abs() + tl + tr);
    }
    let bound_int = bound.ceil() as i64 + 1;
    (0..dim)
        .map(|k| {
            let mut lo = big(-bound_int);
            let mut hi = big(bound_int);
            let two = big(2);
            let mut width = 2.0 * bound_int as f64;
            while width > tol {
                let mid = (lo.clone() + hi.clone()) / two.clone();
                if rational_sturm_count(&t_sq, &diag, &mid) >= k + 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
                width *= 0.5;
            }
            0.5 * (rational_to_f64(&lo) + rational_to_f64(&hi))
        })
        .collect()
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // adequate for the magnitudes in these tests
    let num = r.numer();
    let den = r.denom();
    bigint_to_f64(num) / bigint_to_f64(den)
}

fn bigint_to_f64(v: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// Dyadic Kerr strength exactly representable in f64 and as a rational.
pub fn dyadic_kerr(order: u32, num: i64, log2_den: u32) -> (KerrSpec, (u32, BigRational)) {
    let strength = num as f64 / 2f64.powi(log2_den as i32);
    let rational = BigRational::new(BigInt::from(num), BigInt::from(2i64.pow(log2_den)));
    (
        KerrSpec::new(order, strength).unwrap(),
        (order, rational),
    )
}
