//! ℓ_p vector norms and certified brackets for ‖A‖_{p→p}.

use crate::error::{Error, Result};
use crate::estimate::{map_indexed, Certificate, NormEstimate, OptimConfig, Witness};
use crate::linalg::{
    basis_vector, c, max_col_sum, max_row_sum, norm_slice, normalize, random_sphere_point, sign, signum_power,
    spectral_norm, top_right_singular, from_real, to_real, DenseMatrix, PVec, C64, ONE,
};
use crate::optim::climb;
use crate::pexp::PExponent;
use rand_chacha::ChaCha8Rng;

pub fn vec_norm(x: &PVec, p: PExponent) -> f64 {
    norm_slice(x.as_slice(), p.p())
}

fn check_shape(a: &DenseMatrix) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::Empty("matrix"));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Closed-form ‖A‖_{p→p} for p ∈ {1, 2, ∞}.
pub fn opnorm_exact(a: &DenseMatrix, p: PExponent) -> Result<f64> {
    check_shape(a)?;
    if p.is_one() {
        Ok(max_col_sum(a))
    } else if p.is_inf() {
        Ok(max_row_sum(a))
    } else if p.is_two() {
        Ok(spectral_norm(a))
    } else {
        Err(Error::Unsupported(format!("no closed form for p = {p}")))
    }
}

/// Best of the plain interpolation bounds: between 1 and ∞, and between 2 and
/// the nearer endpoint. Exact for p ∈ {1, 2, ∞}.
pub fn interpolation_upper(a: &DenseMatrix, p: PExponent) -> (f64, Certificate) {
    if p.has_closed_form() {
        let v = if p.is_one() {
            max_col_sum(a)
        } else if p.is_inf() {
            max_row_sum(a)
        } else {
            spectral_norm(a)
        };
        return (v, Certificate::Exact);
    }
    let pp = p.p();
    let n1 = max_col_sum(a);
    let ninf = max_row_sum(a);
    if n1 == 0.0 || ninf == 0.0 {
        return (0.0, Certificate::Exact);
    }
    let rt = n1.powf(1.0 / pp) * ninf.powf(1.0 - 1.0 / pp);
    let n2 = spectral_norm(a);
    let via_two = if pp < 2.0 {
        let t = 2.0 / pp - 1.0;
        n1.powf(t) * n2.powf(1.0 - t)
    } else {
        let t = 1.0 - 2.0 / pp;
        ninf.powf(t) * n2.powf(1.0 - t)
    };
    (rt.min(via_two), Certificate::Interpolation)
}

#[derive(Clone, Copy)]
enum Lp {
    One,
    Two,
    Inf,
}

impl Lp {
    fn norm(self, m: &DenseMatrix) -> f64 {
        match self {
            Lp::One => max_col_sum(m),
            Lp::Two => spectral_norm(m),
            Lp::Inf => max_row_sum(m),
        }
    }
}

/// Interpolation between weighted endpoint spaces.
///
/// For positive multipliers with ρ0^{1−θ}ρ1^θ = 1 on the range and
/// σ0^{1−θ}σ1^θ = 1 on the domain,
/// ‖A‖_{p→p} ≤ ‖ρ0 A σ0^{-1}‖_{p0}^{1−θ} ‖ρ1 A σ1^{-1}‖_{p1}^θ.
/// The multipliers start from the ones that make `hint` extremal at both
/// endpoints and are then tuned by local search.
pub fn weighted_interpolation_upper(
    a: &DenseMatrix,
    p: PExponent,
    hint: Option<&PVec>,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let (plain, _) = interpolation_upper(a, p);
    if p.has_closed_form() || plain == 0.0 || budget == 0 {
        return plain;
    }
    let pp = p.p();
    let (m, n) = a.shape();
    let mut best = plain;
    let mut pairs = vec![(Lp::One, Lp::Inf, 1.0 - 1.0 / pp, pp - 1.0)];
    if pp > 2.0 {
        pairs.push((Lp::Two, Lp::Inf, 1.0 - 2.0 / pp, (pp - 2.0) / 2.0));
    } else {
        pairs.push((Lp::One, Lp::Two, 2.0 - 2.0 / pp, pp - 1.0));
    }
    for (e0, e1, theta, init_pow) in pairs {
        let k = -(1.0 - theta) / theta;
        let bound = |w: &[f64]| -> f64 {
            let (r, s) = w.split_at(m);
            let m0 = DenseMatrix::from_fn(m, n, |i, j| a[(i, j)] * (r[i] - s[j]).exp());
            let m1 = DenseMatrix::from_fn(m, n, |i, j| a[(i, j)] * (k * (r[i] - s[j])).exp());
            let v = (1.0 - theta) * e0.norm(&m0).ln() + theta * e1.norm(&m1).ln();
            v.exp()
        };
        let mut starts = vec![vec![0.0; m + n]];
        if let Some(x) = hint {
            let y = a * x;
            let lx = log_moduli(x.as_slice());
            let ly = log_moduli(y.as_slice());
            let w: Vec<f64> = ly.iter().chain(lx.iter()).map(|v| init_pow * v).collect();
            starts.push(w);
        }
        for w0 in starts {
            let res = climb(w0, |w| -bound(w).ln(), budget, 0.5, 1e-9, rng);
            let v = bound(&res.x);
            if v.is_finite() && v < best {
                best = v;
            }
        }
    }
    best
}

fn log_moduli(x: &[crate::linalg::C64]) -> Vec<f64> {
    let top = x.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let floor = (top * 1e-8).max(1e-300);
    x.iter().map(|z| z.norm().max(floor).ln()).collect()
}

/// Generalized power iteration x ← normalize(Ψ_{p′}(Aᴴ Ψ_p(Ax))) from `x0`.
///
/// Returns the best value ‖Ax‖_p seen, its unit vector, and the iteration count.
pub fn power_iteration(
    a: &DenseMatrix,
    ah: &DenseMatrix,
    p: PExponent,
    x0: &PVec,
    max_iters: usize,
    tol: f64,
) -> (f64, PVec, usize) {
    let pp = p.p();
    let Some(mut x) = normalize(x0, pp) else {
        return (0.0, x0.clone(), 0);
    };
    let mut best_val = norm_slice((a * &x).as_slice(), pp);
    let mut best = x.clone();
    if p.is_endpoint() {
        return (best_val, best, 0);
    }
    let q = p.q();
    let mut prev = best_val;
    let mut iters = 0;
    for _ in 0..max_iters {
        iters += 1;
        let y = a * &x;
        let w = ah * signum_power(&y, pp);
        let Some(xn) = normalize(&signum_power(&w, q), pp) else { break };
        let val = norm_slice((a * &xn).as_slice(), pp);
        let delta = xn.iter().zip(x.iter()).fold(0.0_f64, |m, (u, v)| m.max((u - v).norm()));
        x = xn;
        if val > best_val {
            best_val = val;
            best = x.clone();
        }
        if delta < tol || (iters > 5 && (val - prev).abs() <= 1e-15 * val) {
            break;
        }
        prev = val;
    }
    (best_val, best, iters)
}

/// Starting points that are optimal for the closed-form exponents.
fn structured_starts(a: &DenseMatrix, p: PExponent) -> Vec<PVec> {
    let n = a.ncols();
    let mut starts: Vec<PVec> = (0..n).map(|j| basis_vector(n, j)).collect();
    if p.is_inf() || !p.has_closed_form() {
        for i in 0..a.nrows() {
            starts.push(PVec::from_fn(n, |j, _| sign(a[(i, j)]).conj()));
        }
    }
    if !p.is_endpoint() {
        starts.push(top_right_singular(a));
        starts.push(PVec::from_element(n, ONE));
    }
    starts
}

/// Multistart lower bound: best ‖Ax‖_p over power-iteration runs.
pub fn opnorm_lower(a: &DenseMatrix, p: PExponent, cfg: &OptimConfig) -> (f64, PVec, u64) {
    let ah = a.adjoint();
    let mut starts = structured_starts(a, p);
    let fixed = starts.len();
    for r in 0..cfg.restarts {
        let mut rng = cfg.rng(r as u64);
        starts.push(random_sphere_point(a.ncols(), p.p().min(1e6), &mut rng));
    }
    let runs = map_indexed(starts.len(), cfg.single_lane || a.len() < 64, |k| {
        let iters = if k < fixed && p.has_closed_form() { 0 } else { cfg.max_iters };
        power_iteration(a, &ah, p, &starts[k], iters, cfg.step_tolerance)
    });
    let mut best = (0.0, starts[0].clone());
    let mut used = 0u64;
    for (v, x, it) in runs {
        used += it as u64 + 1;
        if v > best.0 {
            best = (v, x);
        }
    }
    (best.0, best.1, used)
}

/// Certified bracket for ‖A‖_{p→p}.
pub fn opnorm_estimate(a: &DenseMatrix, p: PExponent, cfg: &OptimConfig) -> Result<NormEstimate> {
    check_shape(a)?;
    if crate::linalg::is_zero(a) {
        return Ok(NormEstimate::exact(0.0, "zero-matrix"));
    }
    let (lower, witness, used) = opnorm_lower(a, p, cfg);
    let (mut upper, mut cert) = interpolation_upper(a, p);
    let mut method = "power-iteration";
    if cert != Certificate::Exact && upper - lower > 1e-9 * upper {
        let mut rng = cfg.rng(u64::MAX);
        let refined = weighted_interpolation_upper(a, p, Some(&witness), cfg.max_iters.min(400), &mut rng);
        if refined < upper {
            upper = refined;
            cert = Certificate::Interpolation;
        }
        if let Some(up) = small_side_upper(a, p, lower, 40 * cfg.max_iters) {
            if up < upper {
                upper = up;
                method = "power-iteration/branch-and-bound";
            }
        }
    }
    let lower = settle(lower, upper);
    Ok(NormEstimate::new(lower, upper, cert, method)
        .with_witness(Witness::Vector(witness))
        .with_budget(used))
}

/// Cheap bracket for inner loops: short multistart and plain interpolation.
pub fn opnorm_quick(a: &DenseMatrix, p: PExponent, cfg: &OptimConfig) -> (f64, f64) {
    if crate::linalg::is_zero(a) {
        return (0.0, 0.0);
    }
    let (lower, _, _) = opnorm_lower(a, p, cfg);
    let (upper, _) = interpolation_upper(a, p);
    (settle(lower, upper), upper)
}

/// Rounding can push a converged lower bound a few ulps past an exact upper bound.
pub(crate) fn settle(lower: f64, upper: f64) -> f64 {
    if lower > upper && lower - upper <= 1e-13 * upper.max(1.0) {
        upper
    } else {
        lower
    }
}

/// Grid search over the unit sphere of ℓ_p^n (n ≤ 3) followed by local polish.
///
/// Magnitudes are parametrized by spherical angles and renormalized in ℓ_p;
/// the first coordinate is real and the remaining phases run over a grid.
pub fn opnorm_bruteforce(a: &DenseMatrix, p: PExponent, cfg: &OptimConfig) -> Result<f64> {
    check_shape(a)?;
    let n = a.ncols();
    if n > 3 {
        return Err(Error::Unsupported(format!("brute force needs at most 3 columns, got {n}")));
    }
    let pp = p.p();
    let eval = |params: &[f64]| -> f64 {
        let x = sphere_point(n, params, pp);
        norm_slice((a * x).as_slice(), pp)
    };
    if n == 1 {
        return Ok(eval(&[]));
    }
    let d = cfg.grid_density.max(4);
    let half = std::f64::consts::FRAC_PI_2;
    let tau = 2.0 * std::f64::consts::PI;
    let mut grid: Vec<Vec<f64>> = Vec::new();
    if n == 2 {
        for i in 0..=d {
            for k in 0..d {
                grid.push(vec![half * i as f64 / d as f64, tau * k as f64 / d as f64]);
            }
        }
    } else {
        let da = (d / 2).max(4);
        let dp = (d / 4).max(4);
        for i in 0..=da {
            for j in 0..=da {
                for k in 0..dp {
                    for l in 0..dp {
                        grid.push(vec![
                            half * i as f64 / da as f64,
                            half * j as f64 / da as f64,
                            tau * k as f64 / dp as f64,
                            tau * l as f64 / dp as f64,
                        ]);
                    }
                }
            }
        }
    }
    let mut scored: Vec<(f64, usize)> = grid.iter().enumerate().map(|(i, g)| (eval(g), i)).collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut best = scored[0].0;
    for (rank, &(_, idx)) in scored.iter().take(4).enumerate() {
        let mut rng = cfg.rng(1_000_000 + rank as u64);
        let step = half / d as f64;
        let res = climb(grid[idx].clone(), eval, 4000, step, 1e-12, &mut rng);
        best = best.max(res.value);
    }
    Ok(best)
}

fn sphere_point(n: usize, params: &[f64], p: f64) -> PVec {
    let x = match n {
        1 => PVec::from_element(1, ONE),
        2 => {
            let (t, ph) = (params[0], params[1]);
            PVec::from_vec(vec![c(t.cos().abs(), 0.0), crate::linalg::C64::from_polar(t.sin().abs(), ph)])
        }
        _ => {
            let (t1, t2, ph2, ph3) = (params[0], params[1], params[2], params[3]);
            PVec::from_vec(vec![
                c(t1.cos().abs(), 0.0),
                crate::linalg::C64::from_polar((t1.sin() * t2.cos()).abs(), ph2),
                crate::linalg::C64::from_polar((t1.sin() * t2.sin()).abs(), ph3),
            ])
        }
    };
    normalize(&x, p).unwrap_or_else(|| basis_vector(n, 0))
}

/// Deterministic certified upper bound for use as a search objective:
/// a short power-iteration hint followed by a budgeted weighted interpolation.
pub fn certified_upper(a: &DenseMatrix, p: PExponent, budget: usize) -> f64 {
    let (plain, cert) = interpolation_upper(a, p);
    if cert == Certificate::Exact || plain == 0.0 {
        return plain;
    }
    let ah = a.adjoint();
    let mut best = (0.0, PVec::zeros(a.ncols()));
    for x0 in structured_starts(a, p).iter().take(4) {
        let (v, x, _) = power_iteration(a, &ah, p, x0, 60, 1e-10);
        if v > best.0 {
            best = (v, x);
        }
    }
    let mut rng = crate::estimate::rng_for(0x5eed, 0);
    let mut up = weighted_interpolation_upper(a, p, Some(&best.1), budget, &mut rng).min(plain);
    if let Some(b) = small_side_upper(a, p, best.0, 4 * budget) {
        up = up.min(b);
    }
    up
}

/// Lower estimate of ‖A‖_{p→p} for search loops over nearby matrices:
/// power iteration restarted from the previous maximizer and from the top
/// singular vector. Closed-form exponents are evaluated directly.
pub struct WarmNorm {
    p: PExponent,
    iters: usize,
    x: Option<PVec>,
}

impl WarmNorm {
    pub fn new(p: PExponent, iters: usize) -> Self {
        Self { p, iters, x: None }
    }

    pub fn eval(&mut self, a: &DenseMatrix) -> f64 {
        if self.p.has_closed_form() {
            return interpolation_upper(a, self.p).0;
        }
        let ah = a.adjoint();
        let mut starts = vec![top_right_singular(a)];
        if let Some(x) = &self.x {
            if x.len() == a.ncols() {
                starts.push(x.clone());
            }
        }
        let mut best = (0.0, None);
        for x0 in &starts {
            let (v, x, _) = power_iteration(a, &ah, self.p, x0, self.iters, 1e-12);
            if v > best.0 {
                best = (v, Some(x));
            }
        }
        if best.1.is_some() {
            self.x = best.1;
        }
        best.0
    }
}

/// Runs `opnorm_dc_upper` on whichever side has at most three entries,
/// using ‖Aᵀ‖_{p′→p′} = ‖A‖_{p→p} for short matrices.
fn small_side_upper(a: &DenseMatrix, p: PExponent, lower: f64, cells: usize) -> Option<f64> {
    if a.ncols() <= 3 {
        opnorm_dc_upper(a, p, lower, cells)
    } else if a.nrows() <= 3 {
        opnorm_dc_upper(&a.transpose(), p.conjugate(), lower, cells)
    } else {
        None
    }
}

/// Checks ‖Ax‖_p ≤ λ‖x‖_p for all x by branch and bound.
///
/// On a box of the chart x_k = 1, ‖Ax‖_p^p − λ^p‖x‖_p^p is bounded above by
/// the convex function ‖Ax‖_p^p − λ^p·(tangent of ‖x‖_p^p at the centre),
/// whose maximum over the box sits at a vertex. The relaxation error is
/// second order in the box size.
///
/// Returns `Ok(())` when certified, `Err(Some(r))` when a point with ratio
/// r > λ turns up, and `Err(None)` when the cell budget runs out.
fn certify_ratio(a: &DenseMatrix, p: PExponent, lambda: f64, max_cells: usize) -> std::result::Result<(), Option<f64>> {
    let n = a.ncols();
    let pp = p.p();
    let lp = lambda.powf(pp);
    let free = n - 1;
    let nv = 1usize << (2 * free);
    let cols: Vec<PVec> = (0..n).map(|j| a.column(j).into_owned()).collect();
    let mut stack: Vec<(usize, f64, Vec<crate::linalg::C64>)> = Vec::new();
    for chart in 0..n {
        stack.push((chart, 1.0, vec![crate::linalg::ZERO; free]));
    }
    let mut cells = 0usize;
    while let Some((chart, h, center)) = stack.pop() {
        cells += 1;
        if cells > max_cells {
            return Err(None);
        }
        if center.iter().any(|z| z.norm() - h * std::f64::consts::SQRT_2 > 1.0) {
            continue;
        }
        let others: Vec<usize> = (0..n).filter(|&j| j != chart).collect();
        let mut y0 = cols[chart].clone();
        for (z, &j) in center.iter().zip(&others) {
            y0 += &cols[j] * *z;
        }
        // g(x) = Σ_j |x_j|^p over the free coordinates (the chart coordinate adds 1).
        let g0: f64 = 1.0 + center.iter().map(|z| crate::linalg::pow_fast(z.norm_sqr(), pp / 2.0)).sum::<f64>();
        let grad: Vec<crate::linalg::C64> = center
            .iter()
            .map(|z| {
                let r2 = z.norm_sqr();
                if r2 == 0.0 {
                    crate::linalg::ZERO
                } else {
                    *z * (pp * crate::linalg::pow_fast(r2, (pp - 2.0) / 2.0))
                }
            })
            .collect();
        let ratio0 = norm_slice(y0.as_slice(), pp) / g0.powf(1.0 / pp);
        if ratio0 > lambda {
            return Err(Some(ratio0));
        }
        let mut worst = f64::NEG_INFINITY;
        for mask in 0..nv {
            let mut y = y0.clone();
            let mut lin = 0.0;
            for (j, &col) in others.iter().enumerate() {
                let dr = if mask >> (2 * j) & 1 == 0 { -h } else { h };
                let di = if mask >> (2 * j + 1) & 1 == 0 { -h } else { h };
                let dz = c(dr, di);
                y += &cols[col] * dz;
                lin += grad[j].re * dr + grad[j].im * di;
            }
            let num: f64 = y.iter().map(|z| crate::linalg::pow_fast(z.norm_sqr(), pp / 2.0)).sum();
            worst = worst.max(num - lp * (g0 + lin));
        }
        if worst <= -1e-13 * lp * g0 {
            continue;
        }
        if h < 1e-7 {
            return Err(None);
        }
        let h2 = h / 2.0;
        for mask in 0..nv {
            let child: Vec<crate::linalg::C64> = center
                .iter()
                .enumerate()
                .map(|(j, z)| {
                    let sr = if mask >> (2 * j) & 1 == 0 { -h2 } else { h2 };
                    let si = if mask >> (2 * j + 1) & 1 == 0 { -h2 } else { h2 };
                    z + c(sr, si)
                })
                .collect();
            stack.push((chart, h2, child));
        }
    }
    Ok(())
}

/// Certified upper bound for matrices with at most four columns (three is
/// the practical limit) by
/// tightening λ = lower·(1 + ε) until `certify_ratio` succeeds.
pub fn opnorm_dc_upper(a: &DenseMatrix, p: PExponent, lower: f64, max_cells: usize) -> Option<f64> {
    let n = a.ncols();
    if n == 0 || n > 4 || p.has_closed_form() {
        return None;
    }
    if n == 1 {
        return Some(norm_slice(a.as_slice(), p.p()));
    }
    let mut lower = lower;
    for eps in [1e-9, 1e-7, 1e-5, 1e-4, 1e-3, 1e-2, 3e-2] {
        let mut tries = 0;
        loop {
            let lambda = lower * (1.0 + eps);
            match certify_ratio(a, p, lambda, max_cells) {
                Ok(()) => return Some(lambda),
                Err(Some(r)) if tries < 3 => {
                    lower = lower.max(r);
                    tries += 1;
                }
                _ => break,
            }
        }
    }
    None
}

/// Certified supremum of ‖num(z)‖ / ‖den(z)‖ over complex parameters z.
///
/// Each candidate scores ‖num(z)‖.lower / ‖den(z)‖.upper, so the returned
/// value is a valid lower bound for the supremum. Returns the value and the
/// best parameters.
pub fn ratio_search<N, D>(
    seeds: &[Vec<C64>],
    num: N,
    den: D,
    p: PExponent,
    budget: usize,
    cfg: &OptimConfig,
    stream: u64,
) -> (f64, Vec<C64>)
where
    N: Fn(&[C64]) -> DenseMatrix + Sync,
    D: Fn(&[C64]) -> DenseMatrix + Sync,
{
    if seeds.is_empty() {
        return (0.0, Vec::new());
    }
    let inner = cfg.inner();
    let (num, den) = (&num, &den);
    let ratio = |a: f64, b: f64| if b > 0.0 && a.is_finite() { a / b } else { 0.0 };
    let proxy = || {
        let (mut wn, mut wd) = (WarmNorm::new(p, 30), WarmNorm::new(p, 30));
        move |w: &[f64]| {
            let z = from_real(w);
            let b = wd.eval(&den(&z));
            ratio(wn.eval(&num(&z)), b)
        }
    };
    let strict = |w: &[f64]| {
        let z = from_real(w);
        ratio(opnorm_lower(&num(&z), p, &inner).0, certified_upper(&den(&z), p, 40))
    };
    let certify = |w: &[f64]| {
        let z = from_real(w);
        match opnorm_estimate(&den(&z), p, cfg) {
            Ok(e) => ratio(opnorm_lower(&num(&z), p, cfg).0, e.upper),
            Err(_) => 0.0,
        }
    };
    let starts: Vec<Vec<f64>> = seeds.iter().map(|z| to_real(z)).collect();
    let (v, w, _) = crate::optim::staged_search(&starts, proxy, strict, certify, budget, cfg, stream);
    (v.max(0.0), from_real(&w))
}
