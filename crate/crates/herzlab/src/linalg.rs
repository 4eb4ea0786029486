//! Dense complex linear algebra helpers shared by every norm computation.

use crate::pexp::PExponent;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type DenseMatrix = DMatrix<C64>;
pub type PVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> DenseMatrix {
    DenseMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
}

/// ℓ_p norm of a complex slice; ∞ gives the max modulus.
pub fn norm_slice(x: &[C64], p: f64) -> f64 {
    let m2 = x.iter().fold(0.0_f64, |acc, z| acc.max(z.norm_sqr()));
    if m2 == 0.0 || !m2.is_finite() {
        return m2.sqrt();
    }
    let m = m2.sqrt();
    if p.is_infinite() {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|z| z.norm()).sum();
    }
    let e = p / 2.0;
    m * pow_fast(x.iter().map(|z| pow_fast(z.norm_sqr() / m2, e)).sum::<f64>(), 1.0 / p)
}

/// x^e for x ≥ 0, using square roots when 4e is a small integer.
pub fn pow_fast(x: f64, e: f64) -> f64 {
    let k = (4.0 * e).round();
    if (4.0 * e - k).abs() > 1e-12 || k.abs() > 64.0 {
        return x.powf(e);
    }
    if k < 0.0 {
        return 1.0 / pow_fast(x, -e);
    }
    let k = k as i32;
    let frac = match k % 4 {
        0 => 1.0,
        1 => x.sqrt().sqrt(),
        2 => x.sqrt(),
        _ => {
            let s = x.sqrt();
            s * s.sqrt()
        }
    };
    x.powi(k / 4) * frac
}

pub fn pnorm(x: &PVec, p: PExponent) -> f64 {
    norm_slice(x.as_slice(), p.p())
}

/// Unit complex number with the phase of `z`; 1 at the origin.
pub fn sign(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        ONE
    } else {
        z / r
    }
}

/// Signum power Ψ_q(x)_i = |x_i|^{q−1} sign(x_i).
pub fn signum_power(x: &PVec, q: f64) -> PVec {
    x.map(|z| {
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            ZERO
        } else {
            z * pow_fast(r2, (q - 2.0) / 2.0)
        }
    })
}

/// Rescales `x` to unit ℓ_p norm; returns `None` for the zero vector.
pub fn normalize(x: &PVec, p: f64) -> Option<PVec> {
    let n = norm_slice(x.as_slice(), p);
    if n == 0.0 || !n.is_finite() {
        None
    } else {
        Some(x / c(n, 0.0))
    }
}

pub fn max_col_sum(a: &DenseMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_row_sum(a: &DenseMatrix) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    // Σσ² = ‖A‖_F² catches the occasional wrong result from the library routine.
    let fro = a.norm_squared();
    let sum: f64 = s.iter().map(|x| x * x).sum();
    if (sum - fro).abs() > 1e-10 * fro.max(1e-300) {
        return jacobi_svd(a).0;
    }
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn trace_norm(a: &DenseMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Top right singular vector.
pub fn top_right_singular(a: &DenseMatrix) -> PVec {
    thin_svd(a).2.column(0).into_owned()
}

/// Thin SVD `a = Σ_k σ_k u_k v_kᴴ`, returned as (σ, U, V) with singular values descending.
pub fn thin_svd(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix, DenseMatrix) {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return (Vec::new(), DenseMatrix::zeros(m, 0), DenseMatrix::zeros(n, 0));
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested u");
    let v = svd.v_t.expect("requested v_t").adjoint();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DenseMatrix::from_fn(u.nrows(), order.len(), |r, k| u[(r, order[k])]);
    let v = DenseMatrix::from_fn(v.nrows(), order.len(), |r, k| v[(r, order[k])]);
    // The library routine sometimes returns factors that do not reproduce `a`
    // (constant matrices are an example); fall back to Jacobi when it does.
    let scale = a.norm().max(1e-300);
    if svd_residual(a, &s, &u, &v) > 1e-11 * scale {
        return jacobi_svd(a);
    }
    (s, u, v)
}

fn svd_residual(a: &DenseMatrix, s: &[f64], u: &DenseMatrix, v: &DenseMatrix) -> f64 {
    let mut r = a.clone();
    for (k, &sk) in s.iter().enumerate() {
        r -= u.column(k) * v.column(k).adjoint() * C64::new(sk, 0.0);
    }
    r.norm()
}

/// One-sided Jacobi SVD with orthonormal completion of null directions.
pub fn jacobi_svd(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix, DenseMatrix) {
    let (m, n) = a.shape();
    if m < n {
        let (s, u, v) = jacobi_svd(&a.adjoint());
        return (s, v, u);
    }
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n, n);
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = w.column(i).norm_squared();
                let beta = w.column(j).norm_squared();
                let gamma = w.column(i).dotc(&w.column(j));
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut w, &mut v] {
                    for r in 0..mat.nrows() {
                        let xi = mat[(r, i)];
                        let xj = mat[(r, j)] * phase.conj();
                        mat[(r, i)] = xi * cs - xj * sn;
                        mat[(r, j)] = xi * sn + xj * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..n).map(|k| (w.column(k).norm(), k)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let s: Vec<f64> = order.iter().map(|o| o.0).collect();
    let top = s.first().copied().unwrap_or(0.0);
    let vv = DenseMatrix::from_fn(n, n, |r, k| v[(r, order[k].1)]);
    let mut u = DenseMatrix::zeros(m, n);
    let mut filled = 0;
    for (k, &(sk, idx)) in order.iter().enumerate() {
        if sk > 1e-14 * top && sk > 0.0 {
            u.set_column(k, &(w.column(idx) / C64::new(sk, 0.0)));
            filled = k + 1;
        }
    }
    // Complete U by Gram-Schmidt on standard basis vectors.
    let mut next = 0;
    for k in filled..n {
        while next < m {
            let mut x = basis_vector(m, next);
            next += 1;
            for q in 0..k {
                let proj = u.column(q).dotc(&x);
                x -= u.column(q) * proj;
            }
            let nx = x.norm();
            if nx > 1e-8 {
                u.set_column(k, &(x / C64::new(nx, 0.0)));
                break;
            }
        }
    }
    (s, u, vv)
}

pub fn numerical_rank(a: &DenseMatrix, tol: f64) -> usize {
    let s = singular_values(a);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > tol * top.max(1.0)).count()
}

pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.kronecker(b)
}

pub fn max_abs(a: &DenseMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Σ_ij a_ij b_ij without conjugation.
pub fn bilinear(a: &DenseMatrix, b: &DenseMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> PVec {
    PVec::from_fn(n, |_, _| gaussian(rng))
}

pub fn random_real_vector(n: usize, rng: &mut ChaCha8Rng) -> PVec {
    PVec::from_fn(n, |_, _| c(rng.sample(StandardNormal), 0.0))
}

/// Gaussian direction rescaled onto the unit sphere of ℓ_p^n.
pub fn random_sphere_point(n: usize, p: f64, rng: &mut ChaCha8Rng) -> PVec {
    loop {
        let v = random_vector(n, rng);
        if let Some(u) = normalize(&v, p) {
            return u;
        }
    }
}

pub fn basis_vector(n: usize, k: usize) -> PVec {
    let mut v = PVec::zeros(n);
    v[k] = ONE;
    v
}

pub fn matrix_unit(n: usize, i: usize, j: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// Splits complex entries into interleaved real parameters.
pub fn to_real(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}

pub fn from_real(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|w| c(w[0], w[1])).collect()
}

pub fn is_zero(a: &DenseMatrix) -> bool {
    a.iter().all(|z| *z == ZERO)
}

/// Solves the least-squares problem `min ‖M x − b‖_2` through the SVD pseudo-inverse.
pub fn lstsq(m: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    pinv(m, 1e-12 * (m.nrows().max(m.ncols()) as f64)) * b
}

/// Moore-Penrose pseudo-inverse, dropping singular values below `rel_tol` times the largest.
pub fn pinv(m: &DenseMatrix, rel_tol: f64) -> DenseMatrix {
    let (s, u, v) = thin_svd(m);
    let top = s.first().copied().unwrap_or(0.0);
    let mut out = DenseMatrix::zeros(m.ncols(), m.nrows());
    for (k, &sk) in s.iter().enumerate() {
        if sk > rel_tol * top && sk > 0.0 {
            out += v.column(k) * u.column(k).adjoint() * C64::new(1.0 / sk, 0.0);
        }
    }
    out
}

pub fn matrix_unit_rect(rows: usize, cols: usize, i: usize, j: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}
