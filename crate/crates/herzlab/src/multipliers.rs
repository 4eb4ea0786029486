//! Multipliers of A_p(G) and Schur multipliers of B(ℓ_p^n).
//!
//! Multiplier norms are computed on the predual side: u acts on PM_p(G) by
//! Σ_s c_s λ(s) ↦ Σ_s u(s) c_s λ(s). Upper bounds for every variant come
//! from coefficient factorizations ψ(i, j) = ⟨μ_i, x_j⟩.

use crate::error::{Error, Result};
use crate::estimate::{Certificate, NormEstimate, OptimConfig, Witness};
use crate::group::{FiniteGroup, GroupFunction};
use crate::herz::{ap_norm, convolution};
use crate::linalg::{
    c, from_real, gaussian, lstsq, max_abs, norm_slice, random_matrix, sign, thin_svd, to_real, DenseMatrix, PVec, C64,
    ONE, ZERO,
};
use crate::optim::staged_search;
use crate::pexp::PExponent;
use crate::pnorm::ratio_search;
use crate::report::Verdict;
use serde::Serialize;

/// A Schur symbol ψ acting on matrices by entrywise multiplication.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurSymbol {
    pub values: DenseMatrix,
}

impl SchurSymbol {
    pub fn new(values: DenseMatrix) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Empty("Schur symbol"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input("Schur symbol entries must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    /// ψ ∘ T.
    pub fn apply(&self, t: &DenseMatrix) -> DenseMatrix {
        self.values.component_mul(t)
    }

    /// ψ(s, t) = u(st⁻¹).
    pub fn herz(g: &FiniteGroup, u: &GroupFunction) -> Self {
        let n = g.order();
        Self { values: DenseMatrix::from_fn(n, n, |s, t| u.values[g.mul(s, g.inv(t))]) }
    }
}

/// u(ts⁻¹) = ⟨β(t), α(s)⟩ with α(s) ∈ ℓ_p^d and β(t) ∈ ℓ_{p′}^d.
#[derive(Clone, Debug)]
pub struct CoefficientPair {
    pub d: usize,
    pub alpha: Vec<PVec>,
    pub beta: Vec<PVec>,
}

impl CoefficientPair {
    /// sup_t ‖β(t)‖_{p′} · sup_s ‖α(s)‖_p.
    pub fn cost(&self, p: PExponent) -> f64 {
        let b = self.beta.iter().map(|v| norm_slice(v.as_slice(), p.q())).fold(0.0, f64::max);
        let a = self.alpha.iter().map(|v| norm_slice(v.as_slice(), p.p())).fold(0.0, f64::max);
        a * b
    }
}

/// ψ = M Xᵀ, rows μ_i of M in ℓ_{p′}^d and rows x_j of X in ℓ_p^d.
fn factor_cost(m: &DenseMatrix, x: &DenseMatrix, p: PExponent) -> f64 {
    let rm = (0..m.nrows()).map(|i| norm_slice(m.row(i).transpose().as_slice(), p.q())).fold(0.0, f64::max);
    let rx = (0..x.nrows()).map(|j| norm_slice(x.row(j).transpose().as_slice(), p.p())).fold(0.0, f64::max);
    rm * rx
}

/// Smooth stand-in for `factor_cost`: ℓ_r norms of the row norms with r = 24.
fn soft_cost(m: &DenseMatrix, x: &DenseMatrix, p: PExponent) -> f64 {
    let soft = |rows: Vec<f64>| {
        let top = rows.iter().fold(0.0_f64, |a, &b| a.max(b));
        if top == 0.0 {
            return 0.0;
        }
        top * rows.iter().map(|r| (r / top).powi(24)).sum::<f64>().powf(1.0 / 24.0)
    };
    let rm = soft((0..m.nrows()).map(|i| norm_slice(m.row(i).transpose().as_slice(), p.q())).collect());
    let rx = soft((0..x.nrows()).map(|j| norm_slice(x.row(j).transpose().as_slice(), p.p())).collect());
    rm * rx
}

/// Best factorization ψ = M Xᵀ found with inner dimension between rank ψ
/// and `d_max`. Returns (cost, M, X); the residual is checked to 1e-9.
pub fn schur_factor(psi: &DenseMatrix, p: PExponent, d_max: usize, cfg: &OptimConfig) -> Result<(f64, DenseMatrix, DenseMatrix)> {
    let (rows, cols) = psi.shape();
    let scale = max_abs(psi);
    if scale == 0.0 {
        return Ok((0.0, DenseMatrix::zeros(rows, 1), DenseMatrix::zeros(cols, 1)));
    }
    let (s, u, v) = thin_svd(psi);
    let r = s.iter().filter(|&&x| x > 1e-12 * s[0]).count();
    if d_max < r {
        return Err(Error::Infeasible(format!("rank {r} exceeds d_max = {d_max}")));
    }
    let ur = DenseMatrix::from_fn(rows, r, |i, k| u[(i, k)] * s[k]);
    let vr = DenseMatrix::from_fn(cols, r, |j, k| v[(j, k)].conj());
    let mut best: (f64, DenseMatrix, DenseMatrix) = (f64::INFINITY, DenseMatrix::zeros(rows, r), DenseMatrix::zeros(cols, r));

    // Rank family: X = V̄ Sᵀ, M = U Σ S⁻¹ for invertible S (r×r).
    let rank_maps = |w: &[f64]| -> Option<(DenseMatrix, DenseMatrix)> {
        let sm = DenseMatrix::from_column_slice(r, r, &from_real(w));
        let inv = sm.clone().try_inverse()?;
        Some((&ur * inv, &vr * sm.transpose()))
    };
    // Wide family (d ≥ cols): X free with full column rank, M = ψ (Xᵀ)⁺.
    let d_wide = d_max.min(2 * cols).max(cols);
    let wide_maps = |w: &[f64]| -> Option<(DenseMatrix, DenseMatrix)> {
        let xt = DenseMatrix::from_column_slice(d_wide, cols, &from_real(w));
        let m = lstsq(&xt.transpose(), &psi.transpose()).transpose();
        Some((m, xt.transpose()))
    };
    let residual = |m: &DenseMatrix, x: &DenseMatrix| max_abs(&(psi - m * x.transpose()));

    let mut rng = cfg.rng(7000);
    let budget = cfg.max_iters * 2;
    // Balanced SVD seed, with and without a diagonal rescaling toward the
    // row-norm maxima.
    let mut rank_seeds = vec![to_real(DenseMatrix::identity(r, r).as_slice())];
    for _ in 0..2 {
        rank_seeds.push(to_real((DenseMatrix::identity(r, r) + random_matrix(r, r, &mut rng) * c(0.3, 0.0)).as_slice()));
    }
    let eval = |maps: &dyn Fn(&[f64]) -> Option<(DenseMatrix, DenseMatrix)>, w: &[f64], soft: bool| -> f64 {
        match maps(w) {
            Some((m, x)) if residual(&m, &x) <= 1e-9 * (1.0 + scale) => {
                -(if soft { soft_cost(&m, &x, p) } else { factor_cost(&m, &x, p) })
            }
            _ => f64::NEG_INFINITY,
        }
    };
    let (vr_, wr, _) = staged_search(
        &rank_seeds,
        || |w: &[f64]| eval(&rank_maps, w, true),
        |w: &[f64]| eval(&rank_maps, w, false),
        |w: &[f64]| eval(&rank_maps, w, false),
        budget,
        cfg,
        7100,
    );
    if vr_.is_finite() {
        let (m, x) = rank_maps(&wr).expect("feasible");
        best = (-vr_, m, x);
    }
    if d_max >= cols {
        let mut seeds: Vec<Vec<f64>> = Vec::new();
        let mut id = DenseMatrix::zeros(d_wide, cols);
        for j in 0..cols {
            id[(j, j)] = ONE;
        }
        seeds.push(to_real(id.as_slice()));
        let mut pad = DenseMatrix::zeros(d_wide, cols);
        pad.view_mut((0, 0), (r, cols)).copy_from(&best.2.transpose());
        for j in 0..cols.min(d_wide - r) {
            pad[(r + j, j)] = c(1e-3, 0.0);
        }
        seeds.push(to_real(pad.as_slice()));
        let (vw, ww, _) = staged_search(
            &seeds,
            || |w: &[f64]| eval(&wide_maps, w, true),
            |w: &[f64]| eval(&wide_maps, w, false),
            |w: &[f64]| eval(&wide_maps, w, false),
            budget,
            cfg,
            7200,
        );
        if vw.is_finite() && -vw < best.0 {
            let (m, x) = wide_maps(&ww).expect("feasible");
            best = (-vw, m, x);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Infeasible(format!("no factorization with d ≤ {d_max}")));
    }
    Ok(best)
}

/// Factorization of ψ[t, s] = u(ts⁻¹) read off from a decomposition of the
/// invariant preimage N_u = Σ_r g_r f_rᵀ: with y running over G,
/// β(t) = (c_r g_r(ty))_{r,y} and α(s) = (f_r(sy)/c_r)_{r,y}, where the
/// weights c_r make the cost equal Σ_r ‖g_r‖_{p′}‖f_r‖_p.
fn herz_factor_from_decomposition(g: &FiniteGroup, u: &GroupFunction, p: PExponent, cfg: &OptimConfig) -> Option<(f64, DenseMatrix, DenseMatrix)> {
    let k = g.order();
    let nu = crate::herz::invariant_preimage(g, u);
    let (_, dec) = crate::nuclear::decomposition_upper(&nu, p, &[], cfg);
    let terms: Vec<(f64, &PVec, &PVec)> = dec
        .u
        .iter()
        .zip(&dec.v)
        .filter_map(|(a, b)| {
            let (na, nb) = (norm_slice(a.as_slice(), p.q()), norm_slice(b.as_slice(), p.p()));
            (na > 0.0 && nb > 0.0).then(|| (nb.powf(1.0 / p.q()) * na.powf(-1.0 / p.p()), a, b))
        })
        .collect();
    if terms.is_empty() {
        return None;
    }
    let d = terms.len() * k;
    let m = DenseMatrix::from_fn(k, d, |t, col| {
        let (r, y) = (col / k, col % k);
        terms[r].1[g.mul(t, y)] * terms[r].0
    });
    let x = DenseMatrix::from_fn(k, d, |s, col| {
        let (r, y) = (col / k, col % k);
        terms[r].2[g.mul(s, y)] / terms[r].0
    });
    let psi = SchurSymbol::herz(g, u).values;
    if max_abs(&(&psi - &m * x.transpose())) > 1e-9 * (1.0 + max_abs(&psi)) {
        return None;
    }
    Some((factor_cost(&m, &x, p), m, x))
}

/// Best factorization of ψ[t, s] = u(ts⁻¹): the search of `schur_factor`
/// and the one inherited from an A_p decomposition of u.
fn herz_factor(g: &FiniteGroup, u: &GroupFunction, p: PExponent, d_max: usize, cfg: &OptimConfig) -> Result<(f64, DenseMatrix, DenseMatrix)> {
    let psi = SchurSymbol::herz(g, u);
    let searched = schur_factor(&psi.values, p, d_max, cfg);
    let derived = herz_factor_from_decomposition(g, u, p, cfg);
    match (searched, derived) {
        (Ok(a), Some(b)) => Ok(if b.0 < a.0 { b } else { a }),
        (Ok(a), None) => Ok(a),
        (Err(_), Some(b)) => Ok(b),
        (Err(e), None) => Err(e),
    }
}

/// Upper bound for ‖u‖_{M_0}: a factorization u(ts⁻¹) = ⟨β(t), α(s)⟩.
///
/// `d_max` (default 2|G|) caps the searched dimension; the factorization
/// inherited from an A_p decomposition has dimension |G| times its number
/// of terms.
pub fn m0_upper_bound(
    g: &FiniteGroup,
    u: &GroupFunction,
    p: PExponent,
    d_max: Option<usize>,
    cfg: &OptimConfig,
) -> Result<(f64, CoefficientPair)> {
    check_function(g, u)?;
    let d_max = d_max.unwrap_or(2 * g.order());
    // Rows of ψ are indexed by t and columns by s: ψ[t, s] = u(ts⁻¹).
    let (v, m, x) = herz_factor(g, u, p, d_max, cfg)?;
    let d = m.ncols();
    let pair = CoefficientPair {
        d,
        alpha: (0..x.nrows()).map(|s| x.row(s).transpose().into_owned()).collect(),
        beta: (0..m.nrows()).map(|t| m.row(t).transpose().into_owned()).collect(),
    };
    Ok((v, pair))
}

/// ‖ψ‖ as a Schur multiplier of B(ℓ_p^n).
///
/// Lower: matrices T scored as ‖ψ ∘ T‖.lower / ‖T‖.upper. Upper: the best
/// factorization ψ(i, j) = ⟨μ_i, x_j⟩ with d ≤ d_max (default 2n).
pub fn schur_norm(psi: &SchurSymbol, p: PExponent, d_max: Option<usize>, cfg: &OptimConfig) -> Result<NormEstimate> {
    let d_max = d_max.unwrap_or(2 * psi.values.nrows().max(psi.values.ncols()));
    if max_abs(&psi.values) == 0.0 {
        return Ok(NormEstimate::exact(0.0, "zero-symbol"));
    }
    let (upper, _, _) = schur_factor(&psi.values, p, d_max, cfg)?;
    schur_bracket(psi, p, upper, cfg)
}

fn schur_bracket(psi: &SchurSymbol, p: PExponent, upper: f64, cfg: &OptimConfig) -> Result<NormEstimate> {
    let vals = &psi.values;
    let (rows, cols) = vals.shape();

    let mut seeds: Vec<Vec<C64>> = Vec::new();
    seeds.push(vec![ONE; rows * cols]);
    seeds.push(DenseMatrix::identity(rows, cols).as_slice().to_vec());
    seeds.push(vals.map(|z| if z.norm() > 0.0 { sign(z).conj() } else { ZERO }).as_slice().to_vec());
    let (mut bi, mut bj) = (0, 0);
    for i in 0..rows {
        for j in 0..cols {
            if vals[(i, j)].norm() > vals[(bi, bj)].norm() {
                (bi, bj) = (i, j);
            }
        }
    }
    seeds.push(crate::linalg::matrix_unit_rect(rows, cols, bi, bj).as_slice().to_vec());
    let mut rng = cfg.rng(7300);
    seeds.push((0..rows * cols).map(|_| gaussian(&mut rng)).collect());
    let num = |z: &[C64]| psi.apply(&DenseMatrix::from_column_slice(rows, cols, z));
    let den = |z: &[C64]| DenseMatrix::from_column_slice(rows, cols, z);
    let (lower, z) = ratio_search(&seeds, num, den, p, (cfg.max_iters / 2).max(30), cfg, 7400);
    let lower = crate::pnorm::settle(lower, upper);
    Ok(NormEstimate::new(lower.min(upper), upper, Certificate::Factorization, "schur-witness/coefficient-factorization")
        .with_witness(Witness::Coefficients(z)))
}

/// Schur norm of ψ(s, t) = u(st⁻¹).
pub fn herz_schur_norm(g: &FiniteGroup, u: &GroupFunction, p: PExponent, cfg: &OptimConfig) -> Result<NormEstimate> {
    check_function(g, u)?;
    if u.values.iter().all(|z| *z == ZERO) {
        return Ok(NormEstimate::exact(0.0, "zero-symbol"));
    }
    let (upper, _, _) = herz_factor(g, u, p, 2 * g.order(), cfg)?;
    schur_bracket(&SchurSymbol::herz(g, u), p, upper, cfg)
}

/// ψ_n((s, i), (t, j)) = ψ(s, t) with index (s, i) ↦ s·n + i.
pub fn psi_amplify(psi: &SchurSymbol, n: usize) -> Result<SchurSymbol> {
    if n == 0 {
        return Err(Error::Input("n must be at least 1".into()));
    }
    let ones = DenseMatrix::from_element(n, n, ONE);
    Ok(SchurSymbol { values: crate::linalg::kron(&psi.values, &ones) })
}

fn check_function(g: &FiniteGroup, u: &GroupFunction) -> Result<()> {
    if u.len() != g.order() {
        return Err(Error::Dimension(format!("function needs {} values", g.order())));
    }
    Ok(())
}

/// Level-n witnesses: n² coefficient vectors for T ∈ M_n(PM_p(G)).
fn amplified(g: &FiniteGroup, z: &[C64], n: usize, weight: Option<&GroupFunction>) -> DenseMatrix {
    let k = g.order();
    let mut out = DenseMatrix::zeros(n * k, n * k);
    for i in 0..n {
        for j in 0..n {
            let cf = &z[(i * n + j) * k..(i * n + j + 1) * k];
            let cf: Vec<C64> = match weight {
                Some(u) => cf.iter().zip(&u.values).map(|(a, b)| a * b).collect(),
                None => cf.to_vec(),
            };
            out.view_mut((i * k, j * k), (k, k)).copy_from(&convolution(g, &cf));
        }
    }
    out
}

/// Level norms ‖(M_u)_n‖ on M_n(PM_p(G)) for n = 1..=n_max, as lower bounds.
fn multiplier_levels(
    g: &FiniteGroup,
    u: &GroupFunction,
    p: PExponent,
    n_max: usize,
    cfg: &OptimConfig,
) -> Vec<(f64, Vec<C64>)> {
    let k = g.order();
    let mut out: Vec<(f64, Vec<C64>)> = Vec::new();
    for n in 1..=n_max {
        let len = n * n * k;
        let mut seeds: Vec<Vec<C64>> = Vec::new();
        let mut ident = vec![ZERO; len];
        for i in 0..n {
            ident[(i * n + i) * k + g.identity()] = ONE;
        }
        seeds.push(ident);
        if n == 1 {
            seeds.push(vec![c(1.0 / k as f64, 0.0); k]);
            seeds.push(u.values.iter().map(|z| z.conj()).collect());
        }
        if let Some((_, prev)) = out.last() {
            let m = n - 1;
            let mut z = vec![ZERO; len];
            for i in 0..m {
                for j in 0..m {
                    z[(i * n + j) * k..(i * n + j + 1) * k].copy_from_slice(&prev[(i * m + j) * k..(i * m + j + 1) * k]);
                }
            }
            seeds.push(z);
        }
        let mut rng = cfg.rng(7500 + n as u64);
        seeds.push((0..len).map(|_| gaussian(&mut rng)).collect());
        let num = |z: &[C64]| amplified(g, z, n, Some(u));
        let den = |z: &[C64]| amplified(g, z, n, None);
        let budget = (cfg.max_iters / (2 * n)).max(20);
        let (v, z) = ratio_search(&seeds, num, den, p, budget, cfg, 7600 + 10 * n as u64);
        // A level-n witness padded by zeros is also a level-(n+1) witness.
        let prev = out.last().map(|x| x.0).unwrap_or(0.0);
        out.push((v.max(prev), z));
    }
    out
}

/// ‖u‖_M. Lower: convolution witnesses c scored as
/// ‖Σ u(s)c_s λ(s)‖.lower / ‖Σ c_s λ(s)‖.upper. Upper: the smaller of the
/// M_0 factorization and ‖u‖_{A_p}, since A_p(G) is a Banach algebra.
pub fn multiplier_norm(g: &FiniteGroup, u: &GroupFunction, p: PExponent, cfg: &OptimConfig) -> Result<NormEstimate> {
    check_function(g, u)?;
    if u.values.iter().all(|z| *z == ZERO) {
        return Ok(NormEstimate::exact(0.0, "zero-function"));
    }
    let (m0, _) = m0_upper_bound(g, u, p, None, cfg)?;
    let ap = ap_norm(g, u, p, &cfg.fork(7700))?.upper;
    let upper = m0.min(ap);
    let (lower, z) = multiplier_levels(g, u, p, 1, cfg).remove(0);
    let lower = crate::pnorm::settle(lower, upper);
    Ok(NormEstimate::new(lower.min(upper), upper, Certificate::Factorization, "convolution-witness/m0-factorization")
        .with_witness(Witness::Coefficients(z)))
}

#[derive(Clone, Debug, Serialize)]
pub struct CbReport {
    pub estimate: NormEstimate,
    /// Lower bounds for ‖(M_u)_n‖, n = 1..=n_max.
    pub levels: Vec<f64>,
    pub monotone: bool,
}

/// ‖u‖_{M_cb}, truncated at level n_max, with the M_0 factorization as upper bound.
pub fn cb_multiplier_norm(
    g: &FiniteGroup,
    u: &GroupFunction,
    p: PExponent,
    n_max: usize,
    cfg: &OptimConfig,
) -> Result<CbReport> {
    check_function(g, u)?;
    if n_max == 0 {
        return Err(Error::Input("n_max must be at least 1".into()));
    }
    if u.values.iter().all(|z| *z == ZERO) {
        return Ok(CbReport { estimate: NormEstimate::exact(0.0, "zero-function"), levels: vec![0.0; n_max], monotone: true });
    }
    let (upper, _) = m0_upper_bound(g, u, p, None, cfg)?;
    let levels = multiplier_levels(g, u, p, n_max, cfg);
    let values: Vec<f64> = levels.iter().map(|l| l.0).collect();
    let monotone = values.windows(2).all(|w| w[0] <= w[1] + 1e-9);
    let (lower, z) = levels.into_iter().max_by(|a, b| a.0.total_cmp(&b.0)).expect("levels");
    let lower = crate::pnorm::settle(lower, upper);
    Ok(CbReport {
        estimate: NormEstimate::new(lower.min(upper), upper, Certificate::Factorization, format!("levels-1..{n_max}/m0"))
            .with_witness(Witness::Coefficients(z)),
        levels: values,
        monotone,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossReport {
    /// ‖u × 1_H‖_M on G × H.
    pub product: NormEstimate,
    /// ‖u‖_{M_cb} on G.
    pub cb: NormEstimate,
    /// ‖u‖_M on G.
    pub plain: NormEstimate,
    pub verdict: Verdict,
}

/// ‖u‖_M ≤ ‖u × 1_H‖_M ≤ ‖u‖_{M_cb}, checked with tolerance `tol`.
pub fn cross_multiplier_check(
    g: &FiniteGroup,
    u: &GroupFunction,
    h: &FiniteGroup,
    p: PExponent,
    tol: f64,
    cfg: &OptimConfig,
) -> Result<CrossReport> {
    check_function(g, u)?;
    if g.order() * h.order() > 24 {
        return Err(Error::Unsupported(format!("|G|·|H| = {} exceeds 24", g.order() * h.order())));
    }
    let gh = g.product(h);
    let lifted = u.tensor(&GroupFunction::ones(h));
    let product = multiplier_norm(&gh, &lifted, p, &cfg.fork(7800))?;
    let cb = cb_multiplier_norm(g, u, p, 2, &cfg.fork(7801))?.estimate;
    let plain = multiplier_norm(g, u, p, &cfg.fork(7802))?;
    let ok = product.lower <= cb.upper + tol && product.upper >= plain.lower - tol;
    Ok(CrossReport { product, cb, plain, verdict: if ok { Verdict::Pass } else { Verdict::Fail } })
}
