//! Nuclear elements of ℓ_{p′}^d ⊗ ℓ_p^d, their matrix levels, T_n
//! factorization norms and slice maps.
//!
//! A nuclear element Σ_r μ_r ⊗ x_r is stored through its matrix
//! N = Σ_r μ_r x_rᵀ, so the pairing with T ∈ B(ℓ_p^d) is Σ_ab T_ab N_ab.

use crate::error::{Error, Result};
use crate::estimate::{map_indexed, Certificate, NormEstimate, OptimConfig, Witness};
use crate::linalg::{
    bilinear, c, from_real, gaussian, lstsq, max_abs, norm_slice, random_matrix, sign, thin_svd, to_real,
    trace_norm, DenseMatrix, PVec, C64, ZERO,
};
use crate::optim::{climb, staged_search};
use crate::pexp::PExponent;
use crate::pnorm::{certified_upper, opnorm_estimate, opnorm_lower, WarmNorm};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// τ = Σ_r μ_r ⊗ x_r with μ_r ∈ ℓ_{p′}^d and x_r ∈ ℓ_p^d.
#[derive(Clone, Debug)]
pub struct NuclearElement {
    pub p: PExponent,
    pub dim: usize,
    pub terms: Vec<(PVec, PVec)>,
}

impl NuclearElement {
    pub fn new(p: PExponent, dim: usize, terms: Vec<(PVec, PVec)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("nuclear element"));
        }
        if terms.iter().any(|(m, x)| m.len() != dim || x.len() != dim) {
            return Err(Error::Dimension(format!("all vectors must have length {dim}")));
        }
        Ok(Self { p, dim, terms })
    }

    pub fn zero(p: PExponent, dim: usize) -> Self {
        Self { p, dim, terms: Vec::new() }
    }

    pub fn elementary(p: PExponent, mu: PVec, x: PVec) -> Result<Self> {
        let d = mu.len();
        Self::new(p, d, vec![(mu, x)])
    }

    /// Σ_i δ_i ⊗ δ_i, whose pairing with T is the trace.
    pub fn identity_form(p: PExponent, dim: usize) -> Self {
        let terms = (0..dim)
            .map(|i| (crate::linalg::basis_vector(dim, i), crate::linalg::basis_vector(dim, i)))
            .collect();
        Self { p, dim, terms }
    }

    pub fn random(p: PExponent, dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> Self {
        let terms = (0..rank)
            .map(|_| (crate::linalg::random_vector(dim, rng), crate::linalg::random_vector(dim, rng)))
            .collect();
        Self { p, dim, terms }
    }

    /// Splits a matrix into SVD terms.
    pub fn from_matrix(p: PExponent, n: &DenseMatrix) -> Self {
        Self { p, dim: n.nrows(), terms: svd_decomposition(n).terms() }
    }

    pub fn matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (mu, x) in &self.terms {
            m += mu * x.transpose();
        }
        m
    }

    /// ⟨T, τ⟩ = Σ_r ⟨μ_r, T x_r⟩.
    pub fn pair(&self, t: &DenseMatrix) -> C64 {
        self.terms.iter().map(|(mu, x)| crate::linalg::dot(mu.as_slice(), (t * x).as_slice())).sum()
    }

    /// Cost Σ_r ‖μ_r‖_{p′}‖x_r‖_p of the stored decomposition.
    pub fn decomposition_cost(&self) -> f64 {
        Decomp::from_terms(&self.terms).cost(self.p)
    }
}

/// N = Σ_r u_r v_rᵀ with u_r measured in ℓ_{p′} and v_r in ℓ_p.
#[derive(Clone, Debug)]
pub(crate) struct Decomp {
    pub u: Vec<PVec>,
    pub v: Vec<PVec>,
}

impl Decomp {
    fn from_terms(terms: &[(PVec, PVec)]) -> Self {
        Self { u: terms.iter().map(|t| t.0.clone()).collect(), v: terms.iter().map(|t| t.1.clone()).collect() }
    }

    fn terms(&self) -> Vec<(PVec, PVec)> {
        self.u.iter().cloned().zip(self.v.iter().cloned()).collect()
    }

    pub fn cost(&self, p: PExponent) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(a, b)| norm_slice(a.as_slice(), p.q()) * norm_slice(b.as_slice(), p.p()))
            .sum()
    }

    fn matrix(&self, d: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(d, d);
        for (a, b) in self.u.iter().zip(&self.v) {
            m += a * b.transpose();
        }
        m
    }
}

fn svd_decomposition(n: &DenseMatrix) -> Decomp {
    let (s, u, v) = thin_svd(n);
    let top = s.first().copied().unwrap_or(0.0);
    let mut dec = Decomp { u: Vec::new(), v: Vec::new() };
    for (k, &sk) in s.iter().enumerate() {
        if sk > 1e-14 * top.max(1e-300) {
            dec.u.push(u.column(k) * c(sk, 0.0));
            dec.v.push(v.column(k).map(|z| z.conj()));
        }
    }
    dec
}

/// Valid upper bound from the SVD terms; equals the trace norm at p = 2.
pub fn svd_cost(n: &DenseMatrix, p: PExponent) -> f64 {
    if p.is_two() {
        return trace_norm(n);
    }
    svd_decomposition(n).cost(p)
}

fn standard_seeds(n: &DenseMatrix) -> Vec<Decomp> {
    let d = n.nrows();
    let e = |k: usize| crate::linalg::basis_vector(d, k);
    let mut seeds = vec![svd_decomposition(n)];
    seeds.push(Decomp { u: (0..d).map(|b| n.column(b).into_owned()).collect(), v: (0..d).map(e).collect() });
    seeds.push(Decomp { u: (0..d).map(e).collect(), v: (0..d).map(|a| n.row(a).transpose()).collect() });
    let mut ent = Decomp { u: Vec::new(), v: Vec::new() };
    for a in 0..d {
        for b in 0..d {
            if n[(a, b)] != ZERO {
                ent.u.push(e(a) * n[(a, b)]);
                ent.v.push(e(b));
            }
        }
    }
    seeds.push(ent);
    seeds
}

/// Local search over decompositions by random 2×2 mixing of term pairs,
/// (u_r, u_s) ← (u_r, u_s)G and (v_r, v_s) ← (v_r, v_s)G^{-ᵀ}, which keeps
/// Σ u vᵀ fixed. A move is kept when the cost drops.
fn pairwise_search(mut dec: Decomp, p: PExponent, moves: usize, rng: &mut ChaCha8Rng) -> Decomp {
    let r = dec.u.len();
    if r < 2 {
        return dec;
    }
    let (pp, q) = (p.p(), p.q());
    let cost1 = |a: &PVec, b: &PVec| norm_slice(a.as_slice(), q) * norm_slice(b.as_slice(), pp);
    let mut costs: Vec<f64> = dec.u.iter().zip(&dec.v).map(|(a, b)| cost1(a, b)).collect();
    let mut eps = 0.3;
    for _ in 0..moves {
        let i = rng.gen_range(0..r);
        let mut j = rng.gen_range(0..r - 1);
        if j >= i {
            j += 1;
        }
        let g = [
            c(1.0, 0.0) + gaussian(rng) * eps,
            gaussian(rng) * eps,
            gaussian(rng) * eps,
            c(1.0, 0.0) + gaussian(rng) * eps,
        ];
        let det = g[0] * g[3] - g[1] * g[2];
        if det.norm() < 1e-6 {
            continue;
        }
        // H = G^{-ᵀ}
        let h = [g[3] / det, -g[2] / det, -g[1] / det, g[0] / det];
        let ui = &dec.u[i] * g[0] + &dec.u[j] * g[2];
        let uj = &dec.u[i] * g[1] + &dec.u[j] * g[3];
        let vi = &dec.v[i] * h[0] + &dec.v[j] * h[2];
        let vj = &dec.v[i] * h[1] + &dec.v[j] * h[3];
        let (ci, cj) = (cost1(&ui, &vi), cost1(&uj, &vj));
        if ci + cj < costs[i] + costs[j] - 1e-15 * (costs[i] + costs[j]) {
            dec.u[i] = ui;
            dec.u[j] = uj;
            dec.v[i] = vi;
            dec.v[j] = vj;
            costs[i] = ci;
            costs[j] = cj;
            eps = (eps * 1.3).min(1.0);
        } else {
            eps = (eps * 0.97).max(1e-4);
        }
    }
    dec
}

/// Certified decomposition cost: search cost plus the ℓ_1 mass of the rounding residual.
pub(crate) fn decomposition_upper(n: &DenseMatrix, p: PExponent, extra: &[Decomp], cfg: &OptimConfig) -> (f64, Decomp) {
    let d = n.nrows();
    let mut seeds = extra.to_vec();
    seeds.extend(standard_seeds(n));
    let moves = if p.is_two() { 0 } else { cfg.max_iters * 20 };
    let runs = map_indexed(seeds.len(), cfg.single_lane, |k| {
        let mut rng = cfg.rng(500 + k as u64);
        let dec = pairwise_search(seeds[k].clone(), p, moves, &mut rng);
        let resid = n - dec.matrix(d);
        let certified = dec.cost(p) + resid.iter().map(|z| z.norm()).sum::<f64>();
        (certified, dec)
    });
    runs.into_iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("at least one seed")
}

/// Unit vector in ℓ_p norming u ∈ ℓ_{p′}: ⟨u, φ⟩ = ‖u‖_{p′}.
fn norming_vector(u: &PVec, p: PExponent) -> PVec {
    let q = p.q();
    let nu = norm_slice(u.as_slice(), q);
    if nu == 0.0 {
        return PVec::zeros(u.len());
    }
    u.map(|z| sign(z).conj() * (z.norm() / nu).powf(q - 1.0))
}

/// Dual lower bound sup |⟨T, N⟩| / ‖T‖.upper over operator witnesses.
fn dual_lower(n: &DenseMatrix, p: PExponent, dec: &Decomp, cfg: &OptimConfig) -> (f64, DenseMatrix, u64) {
    let d = n.nrows();
    let mut seeds: Vec<DenseMatrix> = Vec::new();
    let (_, u, v) = thin_svd(n);
    seeds.push(u.map(|z| z.conj()) * v.transpose());
    seeds.push(DenseMatrix::identity(d, d));
    seeds.push(DenseMatrix::from_fn(d, d, |a, b| sign(n[(a, b)]).conj()));
    if !dec.u.is_empty() {
        let phi = DenseMatrix::from_fn(d, dec.u.len(), |a, r| norming_vector(&dec.u[r], p)[a]);
        let vh = DenseMatrix::from_fn(d, dec.v.len(), |b, r| {
            let nv = norm_slice(dec.v[r].as_slice(), p.p());
            if nv > 0.0 {
                dec.v[r][b] / nv
            } else {
                ZERO
            }
        });
        // T v̂_r = φ_r in the least-squares sense: Tᵀ solves v̂ᵀ Tᵀ = φᵀ.
        let tt = lstsq(&vh.transpose(), &phi.transpose());
        seeds.push(tt.transpose());
        let best = (0..dec.u.len())
            .max_by(|&a, &b| {
                let ca = norm_slice(dec.u[a].as_slice(), p.q()) * norm_slice(dec.v[a].as_slice(), p.p());
                let cb = norm_slice(dec.u[b].as_slice(), p.q()) * norm_slice(dec.v[b].as_slice(), p.p());
                ca.total_cmp(&cb)
            })
            .expect("nonempty");
        let xv = crate::linalg::signum_power(&dec.v[best], p.p()).map(|z| z.conj());
        seeds.push(norming_vector(&dec.u[best], p) * xv.transpose());
    }
    let value = |t: &DenseMatrix| bilinear(t, n).norm();
    let mat = |w: &[f64]| DenseMatrix::from_column_slice(d, d, &from_real(w));
    let ratio = |w: &[f64], den: f64| if den > 0.0 { value(&mat(w)) / den } else { 0.0 };
    let proxy = || {
        let mut warm = WarmNorm::new(p, 40);
        move |w: &[f64]| ratio(w, warm.eval(&mat(w)))
    };
    let strict = |w: &[f64]| ratio(w, certified_upper(&mat(w), p, 40));
    let certify = |w: &[f64]| match opnorm_estimate(&mat(w), p, cfg) {
        Ok(e) => ratio(w, e.upper),
        Err(_) => 0.0,
    };
    let budget = if p.is_two() { 0 } else { (cfg.max_iters / 2).max(40) };
    let starts: Vec<Vec<f64>> = seeds.iter().map(|t| to_real(t.as_slice())).collect();
    let (v, w, evals) = staged_search(&starts, proxy, strict, certify, budget, cfg, 900);
    (v.max(0.0), mat(&w), evals)
}

/// Projective norm of N in ℓ_{p′}^d ⊗̂ ℓ_p^d.
pub fn nuclear_norm_matrix(n: &DenseMatrix, p: PExponent, cfg: &OptimConfig) -> Result<NormEstimate> {
    nuclear_bracket(n, p, &[], cfg)
}

fn nuclear_bracket(n: &DenseMatrix, p: PExponent, extra: &[Decomp], cfg: &OptimConfig) -> Result<NormEstimate> {
    if n.nrows() == 0 || n.nrows() != n.ncols() {
        return Err(Error::Dimension("nuclear matrix must be square and nonempty".into()));
    }
    if max_abs(n) == 0.0 {
        return Ok(NormEstimate::exact(0.0, "zero-element"));
    }
    if p.is_two() {
        let t = trace_norm(n);
        let (_, u, v) = thin_svd(n);
        let w = u.map(|z| z.conj()) * v.transpose();
        return Ok(NormEstimate::exact(t, "trace-norm").with_witness(Witness::Matrix(w)));
    }
    let (upper, dec) = decomposition_upper(n, p, extra, cfg);
    let (lower, t, evals) = dual_lower(n, p, &dec, cfg);
    let lower = crate::pnorm::settle(lower, upper);
    Ok(NormEstimate::new(lower, upper, Certificate::Factorization, "decomposition/dual-operator")
        .with_witness(Witness::Matrix(t))
        .with_budget(evals + (cfg.max_iters * 20) as u64))
}

/// Projective norm of τ, starting the decomposition search from its own terms.
pub fn nuclear_norm(tau: &NuclearElement, cfg: &OptimConfig) -> Result<NormEstimate> {
    let extra = if tau.terms.is_empty() { vec![] } else { vec![Decomp::from_terms(&tau.terms)] };
    let est = nuclear_bracket(&tau.matrix(), tau.p, &extra, cfg)?;
    if est.upper_certificate == Certificate::Exact {
        return Ok(est);
    }
    // The given decomposition is itself a certificate.
    let own = tau.decomposition_cost();
    if !tau.terms.is_empty() && own < est.upper {
        let mut e = est;
        e.upper = own;
        return Ok(e);
    }
    Ok(est)
}

/// Result of minimizing the projective norm over an affine set of matrices.
#[derive(Clone, Debug)]
pub struct AffineMin {
    pub matrix: DenseMatrix,
    pub upper: f64,
}

/// min ‖N‖_π subject to Σ_ab C_k[a,b] N[a,b] = v_k.
///
/// The search runs over the affine set with the SVD cost as objective and
/// finishes with a full decomposition search at the best point. Seeds must
/// satisfy the constraints.
pub fn affine_nuclear_min_seeded(
    constraints: &[DenseMatrix],
    values: &[C64],
    d: usize,
    p: PExponent,
    seeds: &[DenseMatrix],
    cfg: &OptimConfig,
) -> Result<AffineMin> {
    if constraints.len() != values.len() {
        return Err(Error::Dimension("one value per constraint".into()));
    }
    let dd = d * d;
    // Constraint rows act on vec(N) (column-major): row k is vec(C_k)ᵀ.
    let a = DenseMatrix::from_fn(constraints.len(), dd, |k, idx| constraints[k][(idx % d, idx / d)]);
    let b = DenseMatrix::from_fn(values.len(), 1, |k, _| values[k]);
    let x0 = lstsq(&a, &b);
    if max_abs(&(&a * &x0 - &b)) > 1e-9 * (1.0 + max_abs(&b)) {
        return Err(Error::Infeasible("constraints are inconsistent".into()));
    }
    // Null space of A from the SVD of A padded to d²×d².
    let padded = DenseMatrix::from_fn(dd.max(a.nrows()), dd, |i, j| if i < a.nrows() { a[(i, j)] } else { ZERO });
    let (sv, _, full_v) = crate::linalg::thin_svd(&padded);
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * top.max(1.0)).count();
    let null: Vec<PVec> = (rank..dd).map(|k| full_v.column(k).into_owned()).collect();
    let to_matrix = |t: &[C64]| -> DenseMatrix {
        let mut x = x0.clone();
        for (tk, nk) in t.iter().zip(&null) {
            x += DenseMatrix::from_column_slice(dd, 1, (nk * *tk).as_slice());
        }
        DenseMatrix::from_column_slice(d, d, x.as_slice())
    };
    let coords = |m: &DenseMatrix| -> Vec<C64> {
        let diff = PVec::from_column_slice(m.as_slice()) - PVec::from_column_slice(x0.as_slice());
        null.iter().map(|nk| nk.dotc(&diff)).collect()
    };
    let mut starts: Vec<Vec<C64>> = vec![vec![ZERO; null.len()]];
    starts.extend(seeds.iter().map(coords));
    let budget = if null.is_empty() { 0 } else { cfg.max_iters * 4 };
    let runs = map_indexed(starts.len(), cfg.single_lane, |k| {
        let mut rng = cfg.rng(1300 + k as u64);
        let res = climb(to_real(&starts[k]), |w| -svd_cost(&to_matrix(&from_real(w)), p), budget, 0.2, 1e-9, &mut rng);
        (-res.value, res.x)
    });
    let best = runs.into_iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("start");
    let mut m = to_matrix(&from_real(&best.1));
    // Prefer a supplied seed verbatim when it already beats the search.
    for s in seeds {
        if svd_cost(s, p) < svd_cost(&m, p) {
            m = s.clone();
        }
    }
    let upper = if p.is_two() { trace_norm(&m) } else { decomposition_upper(&m, p, &[], cfg).0 };
    Ok(AffineMin { matrix: m, upper })
}

pub fn affine_nuclear_min(
    constraints: &[DenseMatrix],
    values: &[C64],
    d: usize,
    p: PExponent,
    cfg: &OptimConfig,
) -> Result<AffineMin> {
    affine_nuclear_min_seeded(constraints, values, d, p, &[], cfg)
}

/// An n×n array of nuclear elements over ℓ_p^d, stored as d×d matrices.
#[derive(Clone, Debug)]
pub struct NuclearMatrix {
    pub p: PExponent,
    pub n: usize,
    pub d: usize,
    pub blocks: Vec<DenseMatrix>,
}

impl NuclearMatrix {
    pub fn new(p: PExponent, n: usize, d: usize, blocks: Vec<DenseMatrix>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Empty("nuclear matrix"));
        }
        if blocks.len() != n * n || blocks.iter().any(|b| b.shape() != (d, d)) {
            return Err(Error::Dimension(format!("need {} blocks of size {d}×{d}", n * n)));
        }
        Ok(Self { p, n, d, blocks })
    }

    pub fn from_elements(elems: &[NuclearElement], n: usize) -> Result<Self> {
        let first = elems.first().ok_or(Error::Empty("nuclear matrix"))?;
        if elems.iter().any(|e| e.dim != first.dim || e.p != first.p) {
            return Err(Error::Dimension("entries must share dimension and exponent".into()));
        }
        Self::new(first.p, n, first.dim, elems.iter().map(|e| e.matrix()).collect())
    }

    pub fn random(p: PExponent, n: usize, d: usize, rng: &mut ChaCha8Rng) -> Self {
        Self { p, n, d, blocks: (0..n * n).map(|_| random_matrix(d, d, rng)).collect() }
    }

    pub fn block(&self, i: usize, j: usize) -> &DenseMatrix {
        &self.blocks[i * self.n + j]
    }

    /// The nd×nd matrix with (i,j) block τ_ij.
    pub fn big(&self) -> DenseMatrix {
        let (n, d) = (self.n, self.d);
        DenseMatrix::from_fn(n * d, n * d, |r, s| self.block(r / d, s / d)[(r % d, s % d)])
    }

    /// ⟨⟨T, τ⟩⟩ for T ∈ M_m(B(ℓ_p^d)): the mn×mn matrix [(k,i),(l,j)] ↦ ⟨T_kl, τ_ij⟩.
    pub fn pair_levels(&self, t: &DenseMatrix) -> DenseMatrix {
        let (n, d) = (self.n, self.d);
        let m = t.nrows() / d;
        DenseMatrix::from_fn(m * n, m * n, |r, s| {
            let (k, i, l, j) = (r / n, r % n, s / n, s % n);
            let tk = t.view((k * d, l * d), (d, d));
            let b = self.block(i, j);
            tk.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
        })
    }

    /// ⟨τ, K⟩ = Σ_ij ⟨τ_ij, K_ij⟩.
    pub fn pair_tn(&self, k: &TnElement) -> C64 {
        self.blocks.iter().zip(&k.blocks).map(|(a, b)| bilinear(a, b)).sum()
    }
}

/// The projective norm of Σ_ij (η_i ⊗ μ^{ij}) ⊗ (γ_j ⊗ x^{ij}) on ℓ_p^m ⊗ ℓ_p^d.
/// Each choice of η, γ with Σ‖η_i‖^{p′} ≤ 1 and Σ‖γ_j‖^p ≤ 1 bounds ‖τ‖_n from below.
pub fn level_compression(tau: &NuclearMatrix, eta: &[PVec], gamma: &[PVec]) -> DenseMatrix {
    let m = eta.first().map(|v| v.len()).unwrap_or(1);
    let d = tau.d;
    let mut big = DenseMatrix::zeros(m * d, m * d);
    for i in 0..tau.n {
        for j in 0..tau.n {
            let outer = &eta[i] * gamma[j].transpose();
            big += crate::linalg::kron(&outer, tau.block(i, j));
        }
    }
    big
}

/// Upper bound for ‖τ‖_n from a factorization τ_ij[a,b] = Σ_k V[i,(a,k)] W[(b,k),j],
/// i.e. T ↦ V(T ⊗ I)W, whose cost is ‖V‖‖W‖.
fn factor_maps(tau: &NuclearMatrix, a: &DenseMatrix, b: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    // big = A Bᵀ with A, B of size nd × K.
    let (n, d, kk) = (tau.n, tau.d, a.ncols());
    let v = DenseMatrix::from_fn(n, d * kk, |i, col| a[(i * d + col / kk, col % kk)]);
    let w = DenseMatrix::from_fn(d * kk, n, |row, j| b[(j * d + row / kk, row % kk)]);
    (v, w)
}

fn wittstock_upper(tau: &NuclearMatrix, cfg: &OptimConfig) -> Result<f64> {
    let p = tau.p;
    let big = tau.big();
    let nd = big.nrows();
    // With A invertible, Bᵀ = A^{-1}·big completes the factorization big = A Bᵀ.
    let maps = |w: &[f64]| -> Option<(DenseMatrix, DenseMatrix, f64)> {
        let a = DenseMatrix::from_column_slice(nd, nd, &from_real(w));
        let b = (a.clone().try_inverse()? * &big).transpose();
        let resid: f64 = (&big - &a * b.transpose()).iter().map(|z| z.norm()).sum();
        let (v, wm) = factor_maps(tau, &a, &b);
        Some((v, wm, resid))
    };
    let proxy = || {
        let (mut wv, mut ww) = (WarmNorm::new(p, 40), WarmNorm::new(p, 40));
        move |w: &[f64]| match maps(w) {
            Some((v, wm, _)) => -(wv.eval(&v) * ww.eval(&wm)),
            None => f64::NEG_INFINITY,
        }
    };
    let strict = |w: &[f64]| match maps(w) {
        Some((v, wm, r)) => -(certified_upper(&v, p, 40) * certified_upper(&wm, p, 40) + r),
        None => f64::NEG_INFINITY,
    };
    let certify = |w: &[f64]| match maps(w) {
        Some((v, wm, r)) => match (opnorm_estimate(&v, p, cfg), opnorm_estimate(&wm, p, cfg)) {
            (Ok(ev), Ok(ew)) => -(ev.upper * ew.upper + r),
            _ => f64::NEG_INFINITY,
        },
        None => f64::NEG_INFINITY,
    };
    let (s, u, _) = thin_svd(&big);
    let mut seeds = vec![to_real(DenseMatrix::identity(nd, nd).as_slice())];
    if s.len() == nd && s[nd - 1] > 1e-12 * s[0] {
        let root = DenseMatrix::from_diagonal(&PVec::from_iterator(nd, s.iter().map(|x| c(x.sqrt(), 0.0))));
        seeds.push(to_real((&u * root).as_slice()));
    }
    let budget = if p.is_two() { cfg.max_iters / 2 } else { cfg.max_iters };
    let (v, _, _) = staged_search(&seeds, proxy, strict, certify, budget, cfg, 2100);
    Ok(if v.is_finite() { -v } else { f64::INFINITY })
}

/// Entrywise bound ‖τ‖_n ≤ ‖(‖τ_ij‖_π)_ij‖_{B(ℓ_p^n)}.
fn entrywise_upper(tau: &NuclearMatrix, cfg: &OptimConfig) -> Result<f64> {
    let n = tau.n;
    let mut cm = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let b = tau.block(i, j);
            cm[(i, j)] = c(
                if tau.p.is_two() { trace_norm(b) } else { decomposition_upper(b, tau.p, &[], cfg).0 },
                0.0,
            );
        }
    }
    if max_abs(&cm) == 0.0 {
        return Ok(0.0);
    }
    Ok(opnorm_estimate(&cm, tau.p, cfg)?.upper)
}

/// Dual lower bound sup ‖⟨⟨T, τ⟩⟩‖ / ‖T‖_m over T ∈ M_m(B(ℓ_p^d)), m ≤ m_max.
fn matrix_dual_lower(tau: &NuclearMatrix, m_max: usize, cfg: &OptimConfig) -> Result<(f64, DenseMatrix)> {
    let p = tau.p;
    let d = tau.d;
    let mut best = (0.0, DenseMatrix::zeros(d, d));
    for m in 1..=m_max {
        let md = m * d;
        let mut seeds: Vec<DenseMatrix> = Vec::new();
        if m == tau.n {
            let (_, u, v) = thin_svd(&tau.big());
            seeds.push(u.map(|z| z.conj()) * v.transpose());
            seeds.push(DenseMatrix::identity(md, md));
        }
        if m == 1 {
            for i in 0..tau.n {
                let (_, u, v) = thin_svd(tau.block(i, i));
                seeds.push(u.map(|z| z.conj()) * v.transpose());
            }
        }
        if m > 1 && best.0 > 0.0 {
            // Previous level's witness in the corner.
            let prev = best.1.nrows();
            let mut t = DenseMatrix::zeros(md, md);
            t.view_mut((0, 0), (prev, prev)).copy_from(&best.1);
            seeds.push(t);
        }
        let mc = cfg.fork(3000 + m as u64);
        let mut rng = mc.rng(0);
        seeds.push(random_matrix(md, md, &mut rng));
        let mat = |w: &[f64]| DenseMatrix::from_column_slice(md, md, &from_real(w));
        let proxy = || {
            let (mut wn, mut wd) = (WarmNorm::new(p, 40), WarmNorm::new(p, 40));
            move |w: &[f64]| {
                let t = mat(w);
                let den = wd.eval(&t);
                if den > 0.0 {
                    wn.eval(&tau.pair_levels(&t)) / den
                } else {
                    0.0
                }
            }
        };
        let inner = mc.inner();
        let strict = |w: &[f64]| {
            let t = mat(w);
            let den = certified_upper(&t, p, 40);
            if den > 0.0 {
                opnorm_lower(&tau.pair_levels(&t), p, &inner).0 / den
            } else {
                0.0
            }
        };
        let certify = |w: &[f64]| {
            let t = mat(w);
            match opnorm_estimate(&t, p, &mc) {
                Ok(e) if e.upper > 0.0 => opnorm_lower(&tau.pair_levels(&t), p, &mc).0 / e.upper,
                _ => 0.0,
            }
        };
        let starts: Vec<Vec<f64>> = seeds.iter().map(|t| to_real(t.as_slice())).collect();
        let budget = (cfg.max_iters / 2).max(50);
        let (v, w, _) = staged_search(&starts, proxy, strict, certify, budget, &mc, 10);
        if v > best.0 {
            best = (v, mat(&w));
        }
    }
    Ok(best)
}

/// ‖τ‖_n on M_n(N(ℓ_p^d)).
///
/// Lower: dual witnesses T ∈ M_m(B(ℓ_p^d)) with m ≤ m_max (default 2n).
/// Upper: the better of the entrywise bound and a factorization of τ as
/// T ↦ V(T ⊗ I)W.
pub fn matrix_nuclear_norm(tau: &NuclearMatrix, m_max: Option<usize>, cfg: &OptimConfig) -> Result<NormEstimate> {
    if tau.blocks.iter().all(|b| max_abs(b) == 0.0) {
        return Ok(NormEstimate::exact(0.0, "zero-element"));
    }
    if tau.n == 1 {
        let mut e = nuclear_norm_matrix(&tau.blocks[0], tau.p, cfg)?;
        e.method = format!("level-1/{}", e.method);
        return Ok(e);
    }
    let m_max = m_max.unwrap_or(2 * tau.n).max(1);
    let up1 = entrywise_upper(tau, cfg)?;
    let up2 = wittstock_upper(tau, cfg)?;
    let upper = up1.min(up2);
    let (lower, t) = matrix_dual_lower(tau, m_max, cfg)?;
    let lower = crate::pnorm::settle(lower, upper);
    Ok(NormEstimate::new(lower, upper, Certificate::Factorization, "dual-levels/factorization")
        .with_witness(Witness::Matrix(t)))
}

/// K = (k_ij), an n×n array of operators on ℓ_p^d.
#[derive(Clone, Debug)]
pub struct TnElement {
    pub n: usize,
    pub d: usize,
    pub blocks: Vec<DenseMatrix>,
}

impl TnElement {
    pub fn new(n: usize, d: usize, blocks: Vec<DenseMatrix>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Empty("T_n element"));
        }
        if blocks.len() != n * n || blocks.iter().any(|b| b.shape() != (d, d)) {
            return Err(Error::Dimension(format!("need {} blocks of size {d}×{d}", n * n)));
        }
        Ok(Self { n, d, blocks })
    }

    pub fn random(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Self {
        Self { n, d, blocks: (0..n * n).map(|_| random_matrix(d, d, rng)).collect() }
    }

    pub fn block(&self, i: usize, j: usize) -> &DenseMatrix {
        &self.blocks[i * self.n + j]
    }

    pub fn big(&self) -> DenseMatrix {
        let (n, d) = (self.n, self.d);
        DenseMatrix::from_fn(n * d, n * d, |r, s| self.block(r / d, s / d)[(r % d, s % d)])
    }
}

/// Factorization cost ‖T‖·‖α‖_{ℓ_p}·‖β‖_{ℓ_p′} for K = (βᵀ ⊗ I) T (α ⊗ I).
fn tn_factor(k: &TnElement, alpha: &DenseMatrix, beta: &DenseMatrix) -> Option<DenseMatrix> {
    let d = k.d;
    let id = DenseMatrix::identity(d, d);
    let left = crate::linalg::pinv(&crate::linalg::kron(&beta.transpose(), &id), 1e-12);
    let right = crate::linalg::pinv(&crate::linalg::kron(alpha, &id), 1e-12);
    Some(left * k.big() * right)
}

fn entries_norm(m: &DenseMatrix, p: f64) -> f64 {
    norm_slice(m.as_slice(), p)
}

/// The element τ_ij[a,b] = Σ_k V[i,(a,k)] U[(b,k),j] used as a dual witness,
/// with ‖τ‖_n ≤ ‖V‖‖U‖.
fn tau_from_maps(n: usize, d: usize, v: &DenseMatrix, u: &DenseMatrix) -> Vec<DenseMatrix> {
    let kk = v.ncols() / d;
    (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            DenseMatrix::from_fn(d, d, |a, b| (0..kk).map(|k| v[(i, a * kk + k)] * u[(b * kk + k, j)]).sum())
        })
        .collect()
}

/// Bracket for ‖K‖ in T_n(B(ℓ_p^d)), plus the best dual witness τ.
pub fn tn_norm(k: &TnElement, p: PExponent, cfg: &OptimConfig) -> Result<NormEstimate> {
    Ok(tn_norm_with_witness(k, p, cfg)?.0)
}

pub fn tn_norm_with_witness(k: &TnElement, p: PExponent, cfg: &OptimConfig) -> Result<(NormEstimate, NuclearMatrix)> {
    let (n, d) = (k.n, k.d);
    let zero_tau = NuclearMatrix { p, n, d, blocks: vec![DenseMatrix::zeros(d, d); n * n] };
    if k.blocks.iter().all(|b| max_abs(b) == 0.0) {
        return Ok((NormEstimate::exact(0.0, "zero-element"), zero_tau));
    }
    let (pp, q) = (p.p(), p.q());
    let big = k.big();
    let scale = 1.0 + max_abs(&big);
    // Upper: entrywise factorization Σ_ij ‖K_ij‖.
    let mut upper = 0.0;
    for b in &k.blocks {
        if max_abs(b) > 0.0 {
            upper += opnorm_estimate(b, p, cfg)?.upper;
        }
    }
    let mt = n;
    let split_ab = |w: &[f64], m: usize| -> (DenseMatrix, DenseMatrix) {
        let z = from_real(w);
        (DenseMatrix::from_column_slice(m, n, &z[..m * n]), DenseMatrix::from_column_slice(m, n, &z[m * n..]))
    };

    // Upper: K = (βᵀ ⊗ I) T (α ⊗ I) over invertible α, β.
    let full = |w: &[f64]| -> Option<(DenseMatrix, f64)> {
        let (alpha, beta) = split_ab(w, mt);
        let t = tn_factor(k, &alpha, &beta)?;
        let id = DenseMatrix::identity(d, d);
        let recon = crate::linalg::kron(&beta.transpose(), &id) * &t * crate::linalg::kron(&alpha, &id);
        if crate::linalg::max_abs_diff(&recon, &big) > 1e-9 * scale {
            return None;
        }
        Some((t, entries_norm(&alpha, pp) * entries_norm(&beta, q)))
    };
    let proxy = || {
        let mut warm = WarmNorm::new(p, 40);
        move |w: &[f64]| match full(w) {
            Some((t, s)) => -(warm.eval(&t) * s),
            None => f64::NEG_INFINITY,
        }
    };
    let strict = |w: &[f64]| match full(w) {
        Some((t, s)) => -(certified_upper(&t, p, 40) * s),
        None => f64::NEG_INFINITY,
    };
    let certify = |w: &[f64]| match full(w) {
        Some((t, s)) => opnorm_estimate(&t, p, cfg).map(|e| -(e.upper * s)).unwrap_or(f64::NEG_INFINITY),
        None => f64::NEG_INFINITY,
    };
    let pad = |m: &DenseMatrix| DenseMatrix::from_fn(mt, n, |i, j| if i < n { m[(i, j)] } else { ZERO });
    let id = DenseMatrix::identity(n, n);
    let mut seeds: Vec<Vec<f64>> = vec![to_real(&pad(&id).iter().chain(pad(&id).iter()).copied().collect::<Vec<_>>())];
    if n > 1 {
        // Scalar structure K ≈ c ⊗ S: split the SVD of c across α and β.
        let cm = DenseMatrix::from_fn(n, n, |i, j| k.block(i, j).iter().map(|z| z * z.conj()).sum::<C64>().sqrt());
        let csum = DenseMatrix::from_fn(n, n, |i, j| k.block(i, j).trace());
        for base in [csum, cm] {
            let (s, u, v) = thin_svd(&base);
            if s.len() == n && s[n - 1] > 1e-9 * s[0] {
                let sq = DenseMatrix::from_diagonal(&PVec::from_iterator(n, s.iter().map(|x| c(x.sqrt(), 0.0))));
                let alpha = &sq * v.adjoint();
                let beta = (&u * &sq).transpose();
                seeds.push(to_real(&pad(&alpha).iter().chain(pad(&beta).iter()).copied().collect::<Vec<_>>()));
            }
        }
    }
    let (v, best_ab, _) = staged_search(&seeds, proxy, strict, certify, cfg.max_iters, cfg, 4000);
    if v.is_finite() {
        upper = f64::min(upper, -v);
    }
    let best_factor = full(&best_ab).map(|(t, _)| {
        let (alpha, beta) = split_ab(&best_ab, mt);
        (alpha, beta, t)
    });

    // Upper: block-diagonal middle factor, K_ij = Σ_k β_ki α_kj T_k with m = n² blocks,
    // cost max_k ‖T_k‖ · ‖α‖_{ℓ_p} · ‖β‖_{ℓ_p′}.
    if n > 1 {
        let m = n * n;
        let blocks_for = |w: &[f64]| -> Option<(Vec<DenseMatrix>, f64, f64)> {
            let (alpha, beta) = split_ab(w, m);
            let coef = DenseMatrix::from_fn(n * n, m, |ij, kk| beta[(kk, ij / n)] * alpha[(kk, ij % n)]);
            let inv = coef.clone().try_inverse()?;
            let ts: Vec<DenseMatrix> = (0..m)
                .map(|kk| {
                    let mut t = DenseMatrix::zeros(d, d);
                    for ij in 0..n * n {
                        t += &k.blocks[ij] * inv[(kk, ij)];
                    }
                    t
                })
                .collect();
            let mut resid = 0.0;
            for ij in 0..n * n {
                let mut r = k.blocks[ij].clone();
                for (kk, t) in ts.iter().enumerate() {
                    r -= t * coef[(ij, kk)];
                }
                resid += r.iter().map(|z| z.norm()).sum::<f64>();
            }
            Some((ts, entries_norm(&alpha, pp) * entries_norm(&beta, q), resid))
        };
        let cost_with = |w: &[f64], norm: &mut dyn FnMut(&DenseMatrix) -> f64| -> f64 {
            match blocks_for(w) {
                Some((ts, s, r)) => -(ts.iter().map(|t| norm(t)).fold(0.0, f64::max) * s + r),
                None => f64::NEG_INFINITY,
            }
        };
        let proxy = || {
            let mut warm: Vec<WarmNorm> = (0..m).map(|_| WarmNorm::new(p, 40)).collect();
            move |w: &[f64]| {
                let mut idx = 0;
                cost_with(w, &mut |t| {
                    idx += 1;
                    warm[idx - 1].eval(t)
                })
            }
        };
        let strict = |w: &[f64]| cost_with(w, &mut |t| certified_upper(t, p, 40));
        let certify = |w: &[f64]| {
            cost_with(w, &mut |t| opnorm_estimate(t, p, cfg).map(|e| e.upper).unwrap_or(f64::INFINITY))
        };
        // Seed: matrix units in (i,j) with T_k = K_ij.
        let mut alpha = DenseMatrix::zeros(m, n);
        let mut beta = DenseMatrix::zeros(m, n);
        for ij in 0..m {
            alpha[(ij, ij % n)] = c(1.0, 0.0);
            beta[(ij, ij / n)] = c(1.0, 0.0);
        }
        let mut rng = cfg.rng(4300);
        let jitter = random_matrix(m, n, &mut rng) * c(1e-3, 0.0);
        let seed = to_real(&(alpha + &jitter).iter().chain(beta.iter()).copied().collect::<Vec<_>>());
        let (v, _, _) = staged_search(&[seed], proxy, strict, certify, cfg.max_iters, cfg, 4200);
        if v.is_finite() {
            upper = f64::min(upper, -v);
        }
    }

    // Lower: τ_ij[a,b] = Σ_k V[i,(a,k)] U[(b,k),j] with ‖τ‖_n ≤ ‖V‖‖U‖.
    let kk = n;
    let split = |w: &[f64]| -> (DenseMatrix, DenseMatrix) {
        let z = from_real(w);
        let v = DenseMatrix::from_column_slice(n, d * kk, &z[..n * d * kk]);
        let u = DenseMatrix::from_column_slice(d * kk, n, &z[n * d * kk..]);
        (v, u)
    };
    let value = |w: &[f64]| -> f64 {
        let (v, u) = split(w);
        let tau = tau_from_maps(n, d, &v, &u);
        tau.iter().zip(&k.blocks).map(|(a, b)| bilinear(a, b)).sum::<C64>().norm()
    };
    let ratio = |w: &[f64], den: f64| if den > 0.0 { value(w) / den } else { 0.0 };
    let lproxy = || {
        let (mut wv, mut wu) = (WarmNorm::new(p, 40), WarmNorm::new(p, 40));
        move |w: &[f64]| {
            let (v, u) = split(w);
            ratio(w, wv.eval(&v) * wu.eval(&u))
        }
    };
    let lstrict = |w: &[f64]| {
        let (v, u) = split(w);
        ratio(w, certified_upper(&v, p, 40) * certified_upper(&u, p, 40))
    };
    let den_of = |w: &[f64]| -> f64 {
        let (v, u) = split(w);
        match (opnorm_estimate(&v, p, cfg), opnorm_estimate(&u, p, cfg)) {
            (Ok(a), Ok(b)) => a.upper * b.upper,
            _ => 0.0,
        }
    };
    let lcertify = |w: &[f64]| ratio(w, den_of(w));
    let mut lseeds: Vec<Vec<f64>> = Vec::new();
    {
        // Norming pair of K as an operator on ℓ_p^{nd}, reshaped.
        let (_, x, _) = opnorm_lower(&big, p, &cfg.inner());
        let y = &big * &x;
        let phi = norming_vector(&y, p.conjugate());
        let v = DenseMatrix::from_fn(n, d * kk, |i, col| if col % kk == 0 { phi[i * d + col / kk] } else { ZERO });
        let u = DenseMatrix::from_fn(d * kk, n, |row, j| if row % kk == 0 { x[j * d + row / kk] } else { ZERO });
        lseeds.push(to_real(&v.iter().chain(u.iter()).copied().collect::<Vec<_>>()));
        // From the best factorization K = (βᵀ⊗I)T(α⊗I) with norming pair (x, φ) of T:
        // βV = Φ and Uαᵀ = X give ⟨τ, K⟩ = φᵀTx.
        if let Some((alpha, beta, t)) = &best_factor {
            let (_, x, _) = opnorm_lower(t, p, &cfg.inner());
            let phi = norming_vector(&(t * &x), p.conjugate());
            let phim = DenseMatrix::from_fn(n, d, |k, a| phi[k * d + a]);
            let xm = DenseMatrix::from_fn(d, n, |b, l| x[l * d + b]);
            if let (Some(bi), Some(ai)) = (beta.clone().try_inverse(), alpha.transpose().try_inverse()) {
                let v1 = bi * phim;
                let u1 = xm * ai;
                let v = DenseMatrix::from_fn(n, d * kk, |i, col| if col % kk == 0 { v1[(i, col / kk)] } else { ZERO });
                let u = DenseMatrix::from_fn(d * kk, n, |row, j| if row % kk == 0 { u1[(row / kk, j)] } else { ZERO });
                lseeds.push(to_real(&v.iter().chain(u.iter()).copied().collect::<Vec<_>>()));
            }
        }
        // Polar part of the scalar trace matrix.
        if n > 1 {
            let csum = DenseMatrix::from_fn(n, n, |i, j| k.block(i, j).trace());
            let (_, uu, vv) = thin_svd(&csum);
            let pol = (uu * vv.adjoint()).map(|z| z.conj());
            let v = DenseMatrix::from_fn(n, d * kk, |i, col| {
                let (a, kx) = (col / kk, col % kk);
                if a < d && kx < n { pol[(i, kx)] * c(1.0 / d as f64, 0.0) } else { ZERO }
            });
            let u = DenseMatrix::from_fn(d * kk, n, |row, j| if row % kk == j { c(1.0, 0.0) } else { ZERO });
            lseeds.push(to_real(&v.iter().chain(u.iter()).copied().collect::<Vec<_>>()));
        }
        let mut rng = cfg.rng(4500);
        for _ in 0..2 {
            lseeds.push(to_real(&(0..2 * n * d * kk).map(|_| gaussian(&mut rng)).collect::<Vec<_>>()));
        }
    }
    let (lv, lw, _) = staged_search(&lseeds, lproxy, lstrict, lcertify, cfg.max_iters, cfg, 4600);
    let tau = if lv > 0.0 {
        let (v, u) = split(&lw);
        let den = den_of(&lw);
        let blocks = tau_from_maps(n, d, &v, &u).into_iter().map(|b| b / c(den, 0.0)).collect();
        NuclearMatrix { p, n, d, blocks }
    } else {
        zero_tau
    };
    let lower = crate::pnorm::settle(lv.max(0.0), upper);
    Ok((NormEstimate::new(lower, upper, Certificate::Factorization, "factorization/dual-maps"), tau))
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub trials: usize,
    /// Trials with |⟨τ,K⟩| > ‖τ‖_n.upper · ‖K‖.upper + tolerance.
    pub violations: usize,
    /// Smallest value of ‖τ‖.upper·‖K‖.upper − |⟨τ,K⟩|.
    pub worst_slack: f64,
    /// min over trials of (best certified |⟨τ,K⟩| / ‖τ‖_n.upper) / ‖K‖.lower.
    pub attainment: f64,
    /// The same ratio against ‖K‖.upper, measuring the closed duality gap.
    pub attainment_vs_upper: f64,
    pub pass: bool,
}

/// Random checks of |⟨τ,K⟩| ≤ ‖τ‖_n‖K‖ and of norm attainment by optimized τ.
pub fn check_nuclear_duality(
    n: usize,
    d: usize,
    p: PExponent,
    trials: usize,
    attainment_ratio: f64,
    cfg: &OptimConfig,
) -> Result<DualityReport> {
    if n * d > 8 {
        return Err(Error::Input("n·d must be at most 8".into()));
    }
    let results = map_indexed(trials, cfg.single_lane, |t| -> Result<(f64, f64, f64)> {
        let tc = cfg.fork(7000 + t as u64);
        let mut rng = tc.rng(0);
        let tau = NuclearMatrix::random(p, n, d, &mut rng);
        let k = TnElement::random(n, d, &mut rng);
        let et = matrix_nuclear_norm(&tau, None, &tc)?;
        let (ek, wit) = tn_norm_with_witness(&k, p, &tc)?;
        let pairing = tau.pair_tn(&k).norm();
        let slack = et.upper * ek.upper - pairing;
        // Attained ratio, certified with the full bracket for the witness.
        let ew = matrix_nuclear_norm(&wit, None, &tc)?;
        let attained = if ew.upper > 0.0 { wit.pair_tn(&k).norm() / ew.upper } else { 0.0 };
        let attained = attained.max(ek.lower);
        Ok((slack, attained / ek.lower.max(1e-300), attained / ek.upper))
    });
    let mut rep = DualityReport {
        trials,
        violations: 0,
        worst_slack: f64::INFINITY,
        attainment: f64::INFINITY,
        attainment_vs_upper: f64::INFINITY,
        pass: true,
    };
    for r in results {
        let (slack, att, att_up) = r?;
        rep.worst_slack = rep.worst_slack.min(slack);
        if slack < -1e-8 {
            rep.violations += 1;
        }
        rep.attainment = rep.attainment.min(att);
        rep.attainment_vs_upper = rep.attainment_vs_upper.min(att_up);
    }
    rep.pass = rep.violations == 0 && rep.attainment >= attainment_ratio;
    Ok(rep)
}

/// R(w)(U): the d2×d2 matrix with ⟨R(w)(U), τ⟩ = ⟨U, w ⊗ τ⟩ for all τ ∈ N(ℓ_p^{d2}).
pub fn slice_right(w: &NuclearElement, u: &DenseMatrix) -> Result<DenseMatrix> {
    let d1 = w.dim;
    if u.nrows() != u.ncols() || u.nrows() % d1 != 0 {
        return Err(Error::Dimension(format!("U must be square with size divisible by {d1}")));
    }
    let d2 = u.nrows() / d1;
    let nw = w.matrix();
    Ok(DenseMatrix::from_fn(d2, d2, |c2, e| {
        let mut s = ZERO;
        for a in 0..d1 {
            for b in 0..d1 {
                s += u[(a * d2 + c2, b * d2 + e)] * nw[(a, b)];
            }
        }
        s
    }))
}

/// L(w)(U): the d1×d1 matrix with ⟨L(w)(U), σ⟩ = ⟨U, σ ⊗ w⟩ for all σ ∈ N(ℓ_p^{d1}).
pub fn slice_left(w: &NuclearElement, u: &DenseMatrix) -> Result<DenseMatrix> {
    let d2 = w.dim;
    if u.nrows() != u.ncols() || u.nrows() % d2 != 0 {
        return Err(Error::Dimension(format!("U must be square with size divisible by {d2}")));
    }
    let d1 = u.nrows() / d2;
    let nw = w.matrix();
    Ok(DenseMatrix::from_fn(d1, d1, |a, b| {
        let mut s = ZERO;
        for c2 in 0..d2 {
            for e in 0..d2 {
                s += u[(a * d2 + c2, b * d2 + e)] * nw[(c2, e)];
            }
        }
        s
    }))
}

/// w ⊗ τ as a nuclear matrix on ℓ_p^{d1} ⊗ ℓ_p^{d2}.
pub fn tensor_nuclear(w: &NuclearElement, tau: &NuclearElement) -> DenseMatrix {
    crate::linalg::kron(&w.matrix(), &tau.matrix())
}
