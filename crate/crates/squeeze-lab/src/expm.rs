//! Dense complex matrix exponential by Padé-13 scaling and squaring.
//!
//! Used by the `powering` propagation mode, which builds the one-step
//! operator `U(dr) = exp(-i dr T)` explicitly and applies it repeatedly.
//! Cost is O(dim^3 log(|T| dr)), so this is a validation mode for modest
//! dimensions, not a production propagator.

use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// 1-norm (max column sum).
    pub fn norm_one(&self) -> f64 {
        let n = self.n;
        let mut best = 0.0_f64;
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += self.at(i, j).norm();
            }
            best = best.max(s);
        }
        best
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut out = CMatrix::zeros(n);
        // i-k-j loop keeps the inner traversal contiguous
        for i in 0..n {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&mut self, s: Complex64) {
        for v in self.data.iter_mut() {
            *v *= s;
        }
    }

    pub fn add_assign(&mut self, other: &CMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn add_scaled_identity(&mut self, s: f64) {
        let n = self.n;
        for i in 0..n {
            self.data[i * n + i] += s;
        }
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.n;
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (&m, &v) in row.iter().zip(x) {
                acc += m * v;
            }
            *yi = acc;
        }
    }
}

/// Solve `A X = B` in place by LU with partial pivoting; returns X.
fn lu_solve(mut a: CMatrix, mut b: CMatrix) -> CMatrix {
    let n = a.n;
    for col in 0..n {
        // pivot
        let mut piv = col;
        let mut best = a.at(col, col).norm();
        for r in col + 1..n {
            let v = a.at(r, col).norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if piv != col {
            for j in 0..n {
                let t = a.at(col, j);
                a.set(col, j, a.at(piv, j));
                a.set(piv, j, t);
                let t = b.at(col, j);
                b.set(col, j, b.at(piv, j));
                b.set(piv, j, t);
            }
        }
        let d = a.at(col, col);
        for r in col + 1..n {
            let f = a.at(r, col) / d;
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a.at(r, j) - f * a.at(col, j);
                a.set(r, j, v);
            }
            for j in 0..n {
                let v = b.at(r, j) - f * b.at(col, j);
                b.set(r, j, v);
            }
        }
    }
    // back substitution
    for col in (0..n).rev() {
        let d = a.at(col, col);
        for j in 0..n {
            let mut v = b.at(col, j);
            for k in col + 1..n {
                v -= a.at(col, k) * b.at(k, j);
            }
            b.set(col, j, v / d);
        }
    }
    b
}

const PADE13_THETA: f64 = 5.371920351148152;
const PADE13_B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(A)` by Padé-13 with scaling and squaring.
pub fn expm(a: &CMatrix) -> CMatrix {
    let norm = a.norm_one();
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let mut a = a.clone();
    if s > 0 {
        a.scale(Complex64::new(1.0 / 2f64.powi(s as i32), 0.0));
    }
    let b = &PADE13_B;
    let n = a.n;
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    // u = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let mut inner = CMatrix::zeros(n);
    let mut t = a6.clone();
    t.scale(b[13].into());
    inner.add_assign(&t);
    let mut t = a4.clone();
    t.scale(b[11].into());
    inner.add_assign(&t);
    let mut t = a2.clone();
    t.scale(b[9].into());
    inner.add_assign(&t);
    let mut u = a6.matmul(&inner);
    let mut t = a6.clone();
    t.scale(b[7].into());
    u.add_assign(&t);
    let mut t = a4.clone();
    t.scale(b[5].into());
    u.add_assign(&t);
    let mut t = a2.clone();
    t.scale(b[3].into());
    u.add_assign(&t);
    u.add_scaled_identity(b[1]);
    let u = a.matmul(&u);

    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut inner = CMatrix::zeros(n);
    let mut t = a6.clone();
    t.scale(b[12].into());
    inner.add_assign(&t);
    let mut t = a4.clone();
    t.scale(b[10].into());
    inner.add_assign(&t);
    let mut t = a2.clone();
    t.scale(b[8].into());
    inner.add_assign(&t);
    let mut v = a6.matmul(&inner);
    let mut t = a6.clone();
    t.scale(b[6].into());
    v.add_assign(&t);
    let mut t = a4.clone();
    t.scale(b[4].into());
    v.add_assign(&t);
    let mut t = a2.clone();
    t.scale(b[2].into());
    v.add_assign(&t);
    v.add_scaled_identity(b[0]);

    // (v - u)^{-1} (v + u)
    let mut vmu = v.clone();
    for (x, y) in vmu.data.iter_mut().zip(&u.data) {
        *x -= y;
    }
    let mut vpu = v;
    for (x, y) in vpu.data.iter_mut().zip(&u.data) {
        *x += y;
    }
    let mut r = lu_solve(vmu, vpu);
    for _ in 0..s {
        r = r.matmul(&r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_zero_is_identity() {
        let e = expm(&CMatrix::zeros(4));
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e.at(i, j) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn expm_diagonal_matches_scalar_exponentials() {
        let mut a = CMatrix::zeros(3);
        for (i, &lam) in [0.3_f64, -1.2, 40.0].iter().enumerate() {
            a.set(i, i, Complex64::new(0.0, -lam));
        }
        let e = expm(&a);
        for (i, &lam) in [0.3_f64, -1.2, 40.0].iter().enumerate() {
            let want = Complex64::new(lam.cos(), -lam.sin());
            assert!((e.at(i, i) - want).norm() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn expm_skew_hermitian_is_unitary() {
        // -i dr T for a small squeezing block with a large norm
        let t = [0.0_f64, 2.449, 0.0, 10.95, 0.0];
        let n = 5;
        let mut a = CMatrix::zeros(n);
        let couplings = [2.449_f64, 10.954, 28.98, 59.96];
        for j in 0..n - 1 {
            a.set(j, j + 1, Complex64::new(0.0, -0.37 * couplings[j]));
            a.set(j + 1, j, Complex64::new(0.0, -0.37 * couplings[j]));
        }
        let _ = t;
        let e = expm(&a);
        // U U^dagger = I
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += e.at(i, k) * e.at(j, k).conj();
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((acc - want).norm() < 1e-13, "({i},{j}) -> {acc}");
            }
        }
    }
}
