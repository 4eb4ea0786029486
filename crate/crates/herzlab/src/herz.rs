//! Regular representations of finite groups, the Figà-Talamanca–Herz algebra
//! A_p(G), the convolution operators PM_p(G), and the averaging projection
//! onto them.
//!
//! ℓ_p(G) uses counting measure, with coordinates indexed by group element.
//! A nuclear element N pairs with λ(s) as Σ_ab λ(s)_ab N_ab, so the
//! coefficient function of N is u(s) = Σ_t N[st, t].

use crate::error::{Error, Result};
use crate::estimate::{Certificate, NormEstimate, OptimConfig, Witness};
use crate::group::{FiniteGroup, GroupFunction};
use crate::linalg::{c, kron, max_abs, max_abs_diff, numerical_rank, random_matrix, sign, DenseMatrix, C64, ONE, ZERO};
use crate::nuclear::{matrix_nuclear_norm, nuclear_norm_matrix, svd_cost, NuclearElement, NuclearMatrix};
use crate::pexp::PExponent;
use crate::pnorm::{certified_upper, opnorm_estimate, ratio_search};
use crate::report::Verdict;
use serde::Serialize;

/// λ(s): f ↦ f(s⁻¹ ·), the permutation e_t ↦ e_{st}.
pub fn left_regular(g: &FiniteGroup, s: usize) -> DenseMatrix {
    let n = g.order();
    let mut m = DenseMatrix::zeros(n, n);
    for t in 0..n {
        m[(g.mul(s, t), t)] = ONE;
    }
    m
}

/// ρ(s): f ↦ f(· s). The modular factor is 1 for finite groups.
pub fn right_regular(g: &FiniteGroup, s: usize) -> DenseMatrix {
    let n = g.order();
    let mut m = DenseMatrix::zeros(n, n);
    for t in 0..n {
        m[(t, g.mul(t, s))] = c(g.modular_function(s), 0.0);
    }
    m
}

/// Coefficient function s ↦ ⟨λ(s), N⟩ of a nuclear matrix.
pub fn lambda_map_matrix(g: &FiniteGroup, n: &DenseMatrix) -> Result<GroupFunction> {
    let k = g.order();
    if n.shape() != (k, k) {
        return Err(Error::Dimension(format!("nuclear matrix must be {k}×{k}")));
    }
    Ok(GroupFunction::new((0..k).map(|s| (0..k).map(|t| n[(g.mul(s, t), t)]).sum()).collect()))
}

/// Λ_p(τ)(s) = Σ_r ⟨μ_r, λ(s) x_r⟩.
pub fn lambda_map(g: &FiniteGroup, tau: &NuclearElement) -> Result<GroupFunction> {
    lambda_map_matrix(g, &tau.matrix())
}

/// The unique preimage of u under Λ_p that is invariant under right
/// translations: N_u = |G|⁻¹ Σ_s u(s) λ(s).
///
/// Averaging any preimage over right translations yields N_u without
/// increasing its norm, at every matrix level, so N_u realizes the quotient
/// norm.
pub fn invariant_preimage(g: &FiniteGroup, u: &GroupFunction) -> DenseMatrix {
    convolution(g, &u.values) / c(g.order() as f64, 0.0)
}

/// Σ_s c_s λ(s).
pub fn convolution(g: &FiniteGroup, coeffs: &[C64]) -> DenseMatrix {
    let n = g.order();
    let mut m = DenseMatrix::zeros(n, n);
    for s in 0..n {
        for t in 0..n {
            m[(g.mul(s, t), t)] += coeffs[s];
        }
    }
    m
}

/// Σ_s c_s λ(s) ∈ PM_p(G).
#[derive(Clone, Debug, PartialEq)]
pub struct PMElement {
    pub coeffs: Vec<C64>,
}

impl PMElement {
    pub fn new(g: &FiniteGroup, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != g.order() {
            return Err(Error::Dimension(format!("need {} coefficients", g.order())));
        }
        Ok(Self { coeffs })
    }

    pub fn translation(g: &FiniteGroup, s: usize) -> Self {
        Self { coeffs: GroupFunction::delta(g, s).values }
    }

    /// |G|⁻¹ Σ_s λ(s), the projection onto constants.
    pub fn averaging(g: &FiniteGroup) -> Self {
        Self { coeffs: vec![c(1.0 / g.order() as f64, 0.0); g.order()] }
    }

    pub fn matrix(&self, g: &FiniteGroup) -> DenseMatrix {
        convolution(g, &self.coeffs)
    }

    /// ⟨T, u⟩ = Σ_s c_s u(s).
    pub fn pair(&self, u: &GroupFunction) -> C64 {
        self.coeffs.iter().zip(&u.values).map(|(a, b)| a * b).sum()
    }
}

/// Coefficients of Q(T), read off as c_s = |G|⁻¹ Σ_t T[st, t].
pub fn pm_coefficients(g: &FiniteGroup, t: &DenseMatrix) -> Vec<C64> {
    let n = g.order();
    (0..n).map(|s| (0..n).map(|r| t[(g.mul(s, r), r)]).sum::<C64>() / c(n as f64, 0.0)).collect()
}

pub fn pm_norm(g: &FiniteGroup, t: &PMElement, p: PExponent, cfg: &OptimConfig) -> Result<NormEstimate> {
    opnorm_estimate(&t.matrix(g), p, cfg)
}

/// Q(T) = |G|⁻¹ Σ_s ρ(s) T ρ(s)⁻¹, the averaging projection of B(ℓ_p(G))
/// onto the commutant of the right translations, which is PM_p(G).
pub fn quasi_expectation(g: &FiniteGroup, t: &DenseMatrix) -> Result<DenseMatrix> {
    let n = g.order();
    if t.shape() != (n, n) {
        return Err(Error::Dimension(format!("operator must be {n}×{n}")));
    }
    Ok(convolution(g, &pm_coefficients(g, t)))
}

/// Q applied to every block of an element of M_n(B(ℓ_p(G))).
pub fn quasi_expectation_blocks(g: &FiniteGroup, t: &DenseMatrix) -> Result<DenseMatrix> {
    let k = g.order();
    if t.nrows() % k != 0 || t.nrows() != t.ncols() {
        return Err(Error::Dimension("block size must divide the matrix".into()));
    }
    let m = t.nrows() / k;
    let mut out = DenseMatrix::zeros(m * k, m * k);
    for i in 0..m {
        for j in 0..m {
            let q = quasi_expectation(g, &t.view((i * k, j * k), (k, k)).into_owned())?;
            out.view_mut((i * k, j * k), (k, k)).copy_from(&q);
        }
    }
    Ok(out)
}

/// The exact diagonal d = |G|⁻¹ Σ_s δ_s ⊗ δ_{s⁻¹} of the group algebra,
/// as a |G|×|G| coefficient array d[a, b]. Returns the largest residual of
/// a·d = d·a (over all a = δ_r) and of Δ(d) = δ_e.
pub fn diagonal_residual(g: &FiniteGroup) -> f64 {
    let n = g.order();
    let w = 1.0 / n as f64;
    let mut d = vec![vec![0.0; n]; n];
    for s in 0..n {
        d[s][g.inv(s)] += w;
    }
    let mut worst: f64 = 0.0;
    for r in 0..n {
        // δ_r·(δ_a ⊗ δ_b) = δ_{ra} ⊗ δ_b and (δ_a ⊗ δ_b)·δ_r = δ_a ⊗ δ_{br}.
        let mut left = vec![vec![0.0; n]; n];
        let mut right = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                left[g.mul(r, a)][b] += d[a][b];
                right[a][g.mul(b, r)] += d[a][b];
            }
        }
        for a in 0..n {
            for b in 0..n {
                worst = worst.max((left[a][b] - right[a][b]).abs());
            }
        }
    }
    let mut prod = vec![0.0; n];
    for a in 0..n {
        for b in 0..n {
            prod[g.mul(a, b)] += d[a][b];
        }
    }
    for (s, v) in prod.iter().enumerate() {
        let target = if s == g.identity() { 1.0 } else { 0.0 };
        worst = worst.max((v - target).abs());
    }
    worst
}

fn unit_phase(z: C64) -> C64 {
    if z.norm() == 0.0 {
        ONE
    } else {
        sign(z).conj()
    }
}

/// ‖u‖ in A_p(G).
///
/// Upper: decomposition costs of preimages (the entrywise one
/// Σ_s u(s) δ_s ⊗ δ_e and the invariant one N_u). Lower: convolution
/// witnesses c scored as |Σ_s c_s u(s)| / ‖Σ_s c_s λ(s)‖.upper.
pub fn ap_norm(g: &FiniteGroup, u: &GroupFunction, p: PExponent, cfg: &OptimConfig) -> Result<NormEstimate> {
    let k = g.order();
    if u.len() != k {
        return Err(Error::Dimension(format!("function needs {k} values")));
    }
    if u.values.iter().all(|z| *z == ZERO) {
        return Ok(NormEstimate::exact(0.0, "zero-function"));
    }
    let nu = invariant_preimage(g, u);
    if p.is_two() {
        let e = nuclear_norm_matrix(&nu, p, cfg)?;
        let w = pm_coefficients(g, witness_matrix(&e).unwrap_or(&DenseMatrix::identity(k, k)));
        return Ok(NormEstimate::exact(e.upper, "invariant-preimage/trace-norm").with_witness(Witness::Coefficients(w)));
    }
    let entrywise: f64 = u.values.iter().map(|z| z.norm()).sum();
    let mut upper = entrywise.min(svd_cost(&nu, p));

    let mut seeds: Vec<Vec<C64>> = Vec::new();
    let e = g.identity();
    let mut delta = vec![ZERO; k];
    delta[e] = unit_phase(u.values[e]);
    seeds.push(delta);
    let total: C64 = u.values.iter().sum();
    seeds.push(vec![unit_phase(total) / c(k as f64, 0.0); k]);
    seeds.push(u.values.iter().map(|z| z.conj()).collect());
    if g.is_abelian() && k <= 16 {
        // Σ_χ phase(⟨χ̄, u⟩) χ̄, a Fourier-sign witness.
        let mut z = vec![ZERO; k];
        for chi in g.characters() {
            let coef: C64 = chi.values.iter().zip(&u.values).map(|(a, b)| a.conj() * b).sum();
            for s in 0..k {
                z[s] += unit_phase(coef) * chi.values[s].conj();
            }
        }
        seeds.push(z);
    }
    let score = |z: &[C64]| -> f64 {
        let den = certified_upper(&convolution(g, z), p, 40);
        let num: C64 = z.iter().zip(&u.values).map(|(a, b)| a * b).sum();
        if den > 0.0 {
            num.norm() / den
        } else {
            0.0
        }
    };
    let mut best = seeds.iter().map(|z| (score(z), z.clone())).max_by(|a, b| a.0.total_cmp(&b.0)).expect("seeds");
    if upper - best.0 <= 1e-12 * upper {
        return Ok(NormEstimate::new(best.0.min(upper), upper, Certificate::Factorization, "closed-witnesses")
            .with_witness(Witness::Coefficients(best.1)));
    }

    let full = nuclear_norm_matrix(&nu, p, cfg)?;
    upper = upper.min(full.upper);
    if let Some(t) = witness_matrix(&full) {
        seeds.push(pm_coefficients(g, t));
    }
    let num = |z: &[C64]| DenseMatrix::from_element(1, 1, z.iter().zip(&u.values).map(|(a, b)| a * b).sum());
    let den = |z: &[C64]| convolution(g, z);
    let (v, z) = ratio_search(&seeds, num, den, p, (cfg.max_iters / 2).max(30), cfg, 5100);
    if v > best.0 {
        best = (v, z);
    }
    let lower = crate::pnorm::settle(best.0.max(full.lower), upper);
    Ok(NormEstimate::new(lower, upper, Certificate::Factorization, "invariant-preimage/convolution-dual")
        .with_witness(Witness::Coefficients(best.1))
        .with_budget(full.budget_used))
}

fn witness_matrix(e: &NormEstimate) -> Option<&DenseMatrix> {
    match &e.lower_witness {
        Some(Witness::Matrix(t)) => Some(t),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiReport {
    /// max |Q(Q(T)) − Q(T)| over trials.
    pub idempotence: f64,
    /// max |Q(T)ρ(s) − ρ(s)Q(T)| over trials and s.
    pub commutation: f64,
    /// max |Q(ATB) − A·Q(T)·B| for A, B in the commutant.
    pub module: f64,
    /// Whether Q(λ(s)) = λ(s) holds entrywise for every s.
    pub fixes_translations: bool,
    /// Residual of the exact diagonal identities.
    pub diagonal: f64,
    /// ‖Q_n‖ for n = 1..=n_max; the upper bound 1 holds because Q_n is an
    /// average of isometric conjugations.
    pub levels: Vec<NormEstimate>,
    pub verdict: Verdict,
}

/// Checks the averaging projection: idempotence, commutation with ρ, the
/// module property, fixing of λ(s), and level norms up to `n_max`.
pub fn check_quasi_expectation(
    g: &FiniteGroup,
    p: PExponent,
    n_max: usize,
    trials: usize,
    cfg: &OptimConfig,
) -> Result<QuasiReport> {
    let k = g.order();
    let mut rng = cfg.rng(5200);
    let rhos: Vec<DenseMatrix> = (0..k).map(|s| right_regular(g, s)).collect();
    let (mut idem, mut comm, mut module) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..trials {
        let t = random_matrix(k, k, &mut rng);
        let q = quasi_expectation(g, &t)?;
        idem = idem.max(max_abs_diff(&quasi_expectation(g, &q)?, &q));
        for r in &rhos {
            comm = comm.max(max_abs_diff(&(&q * r), &(r * &q)));
        }
        let a = PMElement { coeffs: (0..k).map(|_| crate::linalg::gaussian(&mut rng)).collect() }.matrix(g);
        let b = PMElement { coeffs: (0..k).map(|_| crate::linalg::gaussian(&mut rng)).collect() }.matrix(g);
        let lhs = quasi_expectation(g, &(&a * &t * &b))?;
        module = module.max(max_abs_diff(&lhs, &(&a * &q * &b)));
    }
    let fixes = (0..k).all(|s| {
        let l = left_regular(g, s);
        quasi_expectation(g, &l).map(|q| q == l).unwrap_or(false)
    });
    let diagonal = diagonal_residual(g);
    let mut levels = Vec::new();
    for n in 1..=n_max {
        let lc = cfg.fork(5300 + n as u64);
        let mut lrng = lc.rng(0);
        let mut best: f64 = 0.0;
        let mut cands: Vec<DenseMatrix> = vec![DenseMatrix::identity(n * k, n * k)];
        cands.extend((0..trials.max(1)).map(|_| random_matrix(n * k, n * k, &mut lrng)));
        for t in cands {
            let num = opnorm_estimate(&quasi_expectation_blocks(g, &t)?, p, &lc.inner())?.lower;
            let den = certified_upper(&t, p, 40);
            if den > 0.0 {
                best = best.max(num / den);
            }
        }
        levels.push(NormEstimate::new(best.min(1.0), 1.0, Certificate::Submultiplicative, "averaged-conjugation"));
    }
    let ok = idem <= 1e-12
        && comm <= 1e-12
        && module <= 1e-10
        && fixes
        && diagonal <= 1e-12
        && levels.iter().all(|l| l.lower <= 1.0 + 1e-6);
    Ok(QuasiReport {
        idempotence: idem,
        commutation: comm,
        module,
        fixes_translations: fixes,
        diagonal,
        levels,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    /// Dual structure: convolution witnesses T ∈ M_m(PM_p(G)), m ≤ m_max.
    pub dual: NormEstimate,
    /// Quotient structure: the matrix nuclear norm of the invariant preimages.
    pub quotient: NormEstimate,
    pub verdict: Verdict,
}

/// The two matrix norms of a ∈ M_n(A_p(G)) (`a` row-major, n² functions).
///
/// The dual bound never exceeds the quotient one, so each side's bracket
/// borrows the other's certificate: dual.upper ≤ quotient.upper and
/// quotient.lower ≥ dual.lower.
pub fn structure_norms(
    g: &FiniteGroup,
    a: &[GroupFunction],
    n: usize,
    p: PExponent,
    m_max: Option<usize>,
    cfg: &OptimConfig,
) -> Result<StructureReport> {
    let k = g.order();
    if a.len() != n * n || a.iter().any(|u| u.len() != k) {
        return Err(Error::Dimension(format!("need {} functions of length {k}", n * n)));
    }
    let m_max = m_max.unwrap_or(2).max(1);
    let blocks: Vec<DenseMatrix> = a.iter().map(|u| invariant_preimage(g, u)).collect();
    let tau = NuclearMatrix::new(p, n, k, blocks)?;
    let q = matrix_nuclear_norm(&tau, Some(m_max), cfg)?;

    let mut best: (f64, Vec<C64>, usize) = (0.0, Vec::new(), 1);
    let q_witness = witness_matrix(&q).cloned();
    for m in 1..=m_max {
        let len = m * m * k;
        let mut seeds: Vec<Vec<C64>> = Vec::new();
        if let Some(t) = &q_witness {
            if t.nrows() == m * k {
                seeds.push(block_coefficients(g, &quasi_expectation_blocks(g, t)?, m));
            }
        }
        if best.2 < m && !best.1.is_empty() {
            seeds.push(embed_blocks(&best.1, best.2, m, k));
        }
        let mut ident = vec![ZERO; len];
        for i in 0..m {
            ident[(i * m + i) * k + g.identity()] = ONE;
        }
        seeds.push(ident);
        let mut rng = cfg.rng(5400 + m as u64);
        seeds.push((0..len).map(|_| crate::linalg::gaussian(&mut rng)).collect());
        let num = |z: &[C64]| pair_structure(g, a, n, z, m);
        let den = |z: &[C64]| amplified_convolution(g, z, m);
        let (v, z) = ratio_search(&seeds, num, den, p, (cfg.max_iters / 2).max(30), cfg, 5500 + m as u64);
        if v > best.0 {
            best = (v, z, m);
        }
    }
    let lower = crate::pnorm::settle(best.0, q.upper);
    let dual = NormEstimate::new(lower, q.upper, Certificate::Factorization, format!("convolution-dual/m={}", best.2))
        .with_witness(Witness::Coefficients(best.1));
    let quotient = NormEstimate { lower: q.lower.max(lower).min(q.upper), ..q };
    let verdict = if dual.lower <= quotient.upper + 1e-6 && dual.overlaps(&quotient, 5e-2) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(StructureReport { dual, quotient, verdict })
}

/// [(k,i),(l,j)] ↦ ⟨T_kl, a_ij⟩ for T given by m² coefficient vectors.
fn pair_structure(g: &FiniteGroup, a: &[GroupFunction], n: usize, z: &[C64], m: usize) -> DenseMatrix {
    let k = g.order();
    DenseMatrix::from_fn(m * n, m * n, |r, s| {
        let (kk, i, l, j) = (r / n, r % n, s / n, s % n);
        let cf = &z[(kk * m + l) * k..(kk * m + l + 1) * k];
        cf.iter().zip(&a[i * n + j].values).map(|(x, y)| x * y).sum()
    })
}

fn amplified_convolution(g: &FiniteGroup, z: &[C64], m: usize) -> DenseMatrix {
    let k = g.order();
    let mut out = DenseMatrix::zeros(m * k, m * k);
    for i in 0..m {
        for j in 0..m {
            let b = convolution(g, &z[(i * m + j) * k..(i * m + j + 1) * k]);
            out.view_mut((i * k, j * k), (k, k)).copy_from(&b);
        }
    }
    out
}

fn block_coefficients(g: &FiniteGroup, t: &DenseMatrix, m: usize) -> Vec<C64> {
    let k = g.order();
    let mut out = Vec::with_capacity(m * m * k);
    for i in 0..m {
        for j in 0..m {
            out.extend(pm_coefficients(g, &t.view((i * k, j * k), (k, k)).into_owned()));
        }
    }
    out
}

fn embed_blocks(z: &[C64], from: usize, to: usize, k: usize) -> Vec<C64> {
    let mut out = vec![ZERO; to * to * k];
    for i in 0..from {
        for j in 0..from {
            out[(i * to + j) * k..(i * to + j + 1) * k].copy_from_slice(&z[(i * from + j) * k..(i * from + j + 1) * k]);
        }
    }
    out
}

/// (Wf)(s, t) = f(s, st) on ℓ_p(G × G), coordinates (s, t) ↦ s·|G| + t.
pub fn fell_w(g: &FiniteGroup) -> DenseMatrix {
    let n = g.order();
    let mut w = DenseMatrix::zeros(n * n, n * n);
    for s in 0..n {
        for t in 0..n {
            w[(s * n + t, s * n + g.mul(s, t))] = ONE;
        }
    }
    w
}

/// Γ(T) = W⁻¹ (T ⊗ I) W.
pub fn coproduct(g: &FiniteGroup, t: &PMElement) -> DenseMatrix {
    let w = fell_w(g);
    let n = g.order();
    w.transpose() * kron(&t.matrix(g), &DenseMatrix::identity(n, n)) * w
}

#[derive(Clone, Debug, Serialize)]
pub struct PmTensorReport {
    /// Pairs (s, t) where λ_G(s) ⊗ λ_H(t) ≠ λ_{G×H}(s, t).
    pub mismatches: usize,
    pub span_left: usize,
    pub span_right: usize,
    pub verdict: Verdict,
}

/// λ_G(s) ⊗ λ_H(t) = λ_{G×H}(s, t), and both families span spaces of
/// dimension |G|·|H|.
pub fn check_pm_tensor(g: &FiniteGroup, h: &FiniteGroup) -> Result<PmTensorReport> {
    let (n, m) = (g.order(), h.order());
    if n * m > 64 {
        return Err(Error::Unsupported(format!("|G|·|H| = {} exceeds 64", n * m)));
    }
    let gh = g.product(h);
    let mut mismatches = 0;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for s in 0..n {
        for t in 0..m {
            let a = kron(&left_regular(g, s), &left_regular(h, t));
            let b = left_regular(&gh, s * m + t);
            if a != b {
                mismatches += 1;
            }
            left.push(a);
            right.push(b);
        }
    }
    let span = |ms: &[DenseMatrix]| {
        let rows = DenseMatrix::from_fn(ms.len(), (n * m) * (n * m), |r, idx| ms[r].as_slice()[idx]);
        numerical_rank(&rows, 1e-10)
    };
    let (span_left, span_right) = (span(&left), span(&right));
    let ok = mismatches == 0 && span_left == n * m && span_right == n * m;
    Ok(PmTensorReport { mismatches, span_left, span_right, verdict: if ok { Verdict::Pass } else { Verdict::Fail } })
}

/// Largest entry of Γ(λ(s)) − λ(s) ⊗ λ(s) over all s.
pub fn coproduct_residual(g: &FiniteGroup) -> f64 {
    (0..g.order())
        .map(|s| {
            let l = left_regular(g, s);
            max_abs(&(coproduct(g, &PMElement::translation(g, s)) - kron(&l, &l)))
        })
        .fold(0.0, f64::max)
}
