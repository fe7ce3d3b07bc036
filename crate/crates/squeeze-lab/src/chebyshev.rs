//! Chebyshev expansion of the one-step propagator `exp(-i dr T)`.
//!
//! The matrix is rescaled by a symmetric Gershgorin bound `b` so its spectrum
//! lies in `[-1, 1]`, and the exponential is expanded as
//! `exp(-i z x) = sum_k (2 - delta_k0) (-i)^k J_k(z) T_k(x)` with `z = b dr`.
//! The Bessel coefficients are generated by Miller's backward recurrence with
//! the even-order sum rule as normalization; the series is truncated once the
//! coefficients fall below 1e-16, which keeps every step unitary to roundoff.

use crate::error::{Error, Result};
use crate::operators::JacobiMatrix;

/// Safety margin on the Gershgorin bound.
const BOUND_MARGIN: f64 = 1.05;

/// A reusable one-step Chebyshev propagator for a fixed `(T, dr)`.
pub struct ChebyshevStep {
    bessel: Vec<f64>,
    inv_bound: f64,
    dim: usize,
}

/// Series length needed for `exp(-i z x)` to converge to ~1e-16 on [-1, 1].
pub fn required_terms(z: f64) -> usize {
    let z = z.abs();
    (z + 12.0 * z.cbrt() + 40.0).ceil() as usize
}

impl ChebyshevStep {
    /// Prepare the expansion of `exp(-i dr T)`. Fails when more than
    /// `max_terms` expansion terms would be required.
    pub fn new(h: &JacobiMatrix, dr: f64, max_terms: usize) -> Result<Self> {
        let bound = BOUND_MARGIN * h.norm_bound();
        let z = bound * dr;
        let needed = required_terms(z);
        if needed > max_terms {
            return Err(Error::ChebyshevSeriesTooLong {
                required: needed,
                cap: max_terms,
            });
        }
        Ok(ChebyshevStep {
            bessel: bessel_j_sequence(z, needed),
            inv_bound: 1.0 / bound,
            dim: h.dim(),
        })
    }

    pub fn terms(&self) -> usize {
        self.bessel.len()
    }

    /// Apply one step in place. `re`/`im` are the state's parts; four scratch
    /// buffers of the same length must be provided.
    pub fn apply(
        &self,
        h: &JacobiMatrix,
        re: &mut Vec<f64>,
        im: &mut Vec<f64>,
        scratch: &mut Scratch,
    ) {
        let n = self.dim;
        debug_assert_eq!(re.len(), n);
        let Scratch {
            prev_re,
            prev_im,
            cur_re,
            cur_im,
            next_re,
            next_im,
        } = scratch;

        // phi_0 = psi
        prev_re.clone_from(re);
        prev_im.clone_from(im);
        // phi_1 = (T/b) psi
        h.matvec(prev_re, cur_re);
        h.matvec(prev_im, cur_im);
        for v in cur_re.iter_mut().chain(cur_im.iter_mut()) {
            *v *= self.inv_bound;
        }

        // y = c_0 phi_0 + c_1 phi_1 + ...
        let mut y_re = vec![0.0; n];
        let mut y_im = vec![0.0; n];
        accumulate(&mut y_re, &mut y_im, prev_re, prev_im, 0, self.bessel[0]);
        if self.bessel.len() > 1 {
            accumulate(
                &mut y_re,
                &mut y_im,
                cur_re,
                cur_im,
                1,
                2.0 * self.bessel[1],
            );
        }

        for k in 2..self.bessel.len() {
            // phi_k = 2 (T/b) phi_{k-1} - phi_{k-2}
            h.matvec(cur_re, next_re);
            h.matvec(cur_im, next_im);
            let two_inv = 2.0 * self.inv_bound;
            for j in 0..n {
                next_re[j] = two_inv * next_re[j] - prev_re[j];
                next_im[j] = two_inv * next_im[j] - prev_im[j];
            }
            std::mem::swap(prev_re, cur_re);
            std::mem::swap(prev_im, cur_im);
            std::mem::swap(cur_re, next_re);
            std::mem::swap(cur_im, next_im);
            accumulate(&mut y_re, &mut y_im, cur_re, cur_im, k, 2.0 * self.bessel[k]);
        }

        *re = y_re;
        *im = y_im;
    }
}

pub struct Scratch {
    prev_re: Vec<f64>,
    prev_im: Vec<f64>,
    cur_re: Vec<f64>,
    cur_im: Vec<f64>,
    next_re: Vec<f64>,
    next_im: Vec<f64>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch {
            prev_re: vec![0.0; n],
            prev_im: vec![0.0; n],
            cur_re: vec![0.0; n],
            cur_im: vec![0.0; n],
            next_re: vec![0.0; n],
            next_im: vec![0.0; n],
        }
    }
}

/// Add `c_k * phi_k` to the accumulator, using `(-i)^k` phase structure:
/// the coefficient is real for even k and purely imaginary for odd k.
#[inline]
fn accumulate(
    y_re: &mut [f64],
    y_im: &mut [f64],
    phi_re: &[f64],
    phi_im: &[f64],
    k: usize,
    weight: f64,
) {
    match k % 4 {
        0 => {
            for j in 0..y_re.len() {
                y_re[j] += weight * phi_re[j];
                y_im[j] += weight * phi_im[j];
            }
        }
        1 => {
            // (-i) * phi
            for j in 0..y_re.len() {
                y_re[j] += weight * phi_im[j];
                y_im[j] -= weight * phi_re[j];
            }
        }
        2 => {
            for j in 0..y_re.len() {
                y_re[j] -= weight * phi_re[j];
                y_im[j] -= weight * phi_im[j];
            }
        }
        _ => {
            // (+i) * phi
            for j in 0..y_re.len() {
                y_re[j] -= weight * phi_im[j];
                y_im[j] += weight * phi_re[j];
            }
        }
    }
}

/// `J_0(z) .. J_m(z)` by Miller's backward recurrence with sum-rule
/// normalization `J_0 + 2 J_2 + 2 J_4 + ... = 1`.
pub fn bessel_j_sequence(z: f64, m: usize) -> Vec<f64> {
    let za = z.abs();
    if za < 1e-14 {
        let mut out = vec![0.0; m + 1];
        out[0] = 1.0;
        return out;
    }
    // start far enough above max(m, z) that the seed has decayed away
    let start = m + (10.0 * za.cbrt()).ceil() as usize + 40;
    let mut out = vec![0.0; m + 1];
    let mut jpp = 0.0_f64; // J_{k+2}
    let mut jp = 1e-300_f64; // J_{k+1}, seeded at the top
    let mut even_sum = 0.0_f64;
    for k in (0..=start).rev() {
        // J_k = (2(k+1)/z) J_{k+1} - J_{k+2}
        let jk = (2.0 * (k as f64 + 1.0) / za) * jp - jpp;
        jpp = jp;
        jp = jk;
        if k <= m {
            out[k] = jk;
        }
        if k > 0 && k % 2 == 0 {
            even_sum += jk;
        }
        if jk.abs() > 1e250 {
            let scale = 1e-250;
            jp *= scale;
            jpp *= scale;
            even_sum *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    let norm = out[0] + 2.0 * even_sum;
    let inv = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= inv;
    }
    if z < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_small_order_reference_values() {
        let j = bessel_j_sequence(1.0, 5);
        assert!((j[0] - 0.7651976865579666).abs() < 1e-14);
        assert!((j[1] - 0.4400505857449335).abs() < 1e-14);
        let j = bessel_j_sequence(10.0, 10);
        assert!((j[0] + 0.245935764451348).abs() < 1e-13);
    }

    #[test]
    fn bessel_sum_rule_holds_at_large_argument() {
        for &z in &[50.0, 1000.0, 25_000.0] {
            let m = required_terms(z);
            let j = bessel_j_sequence(z, m);
            let sum = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
            assert!((sum - 1.0).abs() < 1e-12, "z={z} sum={sum}");
        }
    }

    #[test]
    fn scalar_series_matches_complex_exponential() {
        // sum_k c_k T_k(x) must reproduce exp(-i z x) pointwise
        for &z in &[0.7, 35.0, 400.0] {
            let m = required_terms(z);
            let j = bessel_j_sequence(z, m);
            for &x in &[-0.93, -0.4, 0.0, 0.27, 0.99] {
                let (mut tm1, mut tk) = (1.0_f64, x);
                let (mut s_re, mut s_im) = (j[0], 0.0);
                for k in 1..=m {
                    let w = 2.0 * j[k];
                    match k % 4 {
                        0 => s_re += w * tk,
                        1 => s_im -= w * tk,
                        2 => s_re -= w * tk,
                        _ => s_im += w * tk,
                    }
                    let tnext = 2.0 * x * tk - tm1;
                    tm1 = tk;
                    tk = tnext;
                }
                let err = ((s_re - (z * x).cos()).powi(2)
                    + (s_im + (z * x).sin()).powi(2))
                .sqrt();
                assert!(err < 1e-12, "z={z} x={x} err={err:e}");
            }
        }
    }
}
