//! Concrete p-operator spaces X ⊆ B(ℓ_p^d) and their matrix levels.

use crate::error::{Error, Result};
use crate::estimate::{map_indexed, Certificate, NormEstimate, OptimConfig, Witness};
use crate::linalg::{
    c, from_real, gaussian, matrix_unit, norm_slice, numerical_rank, random_matrix,
    signum_power, to_real, DenseMatrix, PVec, C64, ZERO,
};
use crate::nuclear::{affine_nuclear_min, nuclear_norm_matrix};
use crate::optim::climb;
use crate::pexp::PExponent;
use crate::pnorm::{opnorm_estimate, opnorm_quick};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A subspace of B(ℓ_p^d) spanned by linearly independent d×d matrices.
#[derive(Clone, Debug)]
pub struct ConcretePOpSpace {
    p: PExponent,
    d: usize,
    basis: Vec<DenseMatrix>,
}

impl ConcretePOpSpace {
    pub fn new(p: PExponent, basis: Vec<DenseMatrix>) -> Result<Self> {
        let d = basis.first().map(|b| b.nrows()).ok_or(Error::Empty("basis"))?;
        if d == 0 {
            return Err(Error::Empty("base space"));
        }
        if basis.iter().any(|b| b.shape() != (d, d)) {
            return Err(Error::Dimension("basis matrices must all be d×d".into()));
        }
        let stacked = DenseMatrix::from_fn(d * d, basis.len(), |r, k| basis[k][(r / d, r % d)]);
        if numerical_rank(&stacked, 1e-10) != basis.len() {
            return Err(Error::Input("basis matrices are linearly dependent".into()));
        }
        Ok(Self { p, d, basis })
    }

    /// All of B(ℓ_p^d), with matrix units in row-major order as basis.
    pub fn full(p: PExponent, d: usize) -> Self {
        let basis = (0..d * d).map(|k| matrix_unit(d, k / d, k % d)).collect();
        Self { p, d, basis }
    }

    pub fn random_subspace(p: PExponent, d: usize, k: usize, rng: &mut ChaCha8Rng) -> Self {
        loop {
            let basis: Vec<DenseMatrix> = (0..k).map(|_| random_matrix(d, d, rng)).collect();
            if let Ok(s) = Self::new(p, basis) {
                return s;
            }
        }
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    pub fn base_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DenseMatrix] {
        &self.basis
    }

    pub fn element(&self, coeffs: &[C64]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.d, self.d);
        for (b, &w) in self.basis.iter().zip(coeffs) {
            if w != ZERO {
                m += b * w;
            }
        }
        m
    }

    /// Coordinates of `m` if it lies in the span, to 1e−9.
    pub fn coordinates(&self, m: &DenseMatrix) -> Option<Vec<C64>> {
        let d = self.d;
        let stacked = DenseMatrix::from_fn(d * d, self.dim(), |r, k| self.basis[k][(r / d, r % d)]);
        let rhs = DenseMatrix::from_fn(d * d, 1, |r, _| m[(r / d, r % d)]);
        let x = crate::linalg::lstsq(&stacked, &rhs);
        let coeffs: Vec<C64> = x.iter().copied().collect();
        let back = self.element(&coeffs);
        (crate::linalg::max_abs_diff(&back, m) < 1e-9).then_some(coeffs)
    }
}

/// An element of M_n(X): an n×n array of coordinate vectors over the basis of X.
#[derive(Clone, Debug)]
pub struct MatrixLevelElement<'a> {
    pub space: &'a ConcretePOpSpace,
    pub n: usize,
    coeffs: Vec<C64>,
}

impl<'a> MatrixLevelElement<'a> {
    /// `coeffs` holds the n² coordinate vectors in row-major block order.
    pub fn new(space: &'a ConcretePOpSpace, n: usize, coeffs: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("matrix level"));
        }
        if coeffs.len() != n * n * space.dim() {
            return Err(Error::Dimension(format!(
                "level {n} over a {}-dimensional space needs {} coordinates, got {}",
                space.dim(),
                n * n * space.dim(),
                coeffs.len()
            )));
        }
        Ok(Self { space, n, coeffs })
    }

    pub fn zeros(space: &'a ConcretePOpSpace, n: usize) -> Self {
        Self { space, n, coeffs: vec![ZERO; n * n * space.dim()] }
    }

    pub fn random(space: &'a ConcretePOpSpace, n: usize, rng: &mut ChaCha8Rng) -> Self {
        let coeffs = (0..n * n * space.dim()).map(|_| gaussian(rng)).collect();
        Self { space, n, coeffs }
    }

    /// The level-1 element with the given coordinates.
    pub fn single(space: &'a ConcretePOpSpace, coeffs: Vec<C64>) -> Result<Self> {
        Self::new(space, 1, coeffs)
    }

    pub fn entry(&self, i: usize, j: usize) -> &[C64] {
        let k = self.space.dim();
        let start = (i * self.n + j) * k;
        &self.coeffs[start..start + k]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { space: self.space, n: self.n, coeffs: self.coeffs.iter().map(|z| z * s).collect() }
    }

    /// Block diagonal u ⊕ v.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m, k) = (self.n, other.n, self.space.dim());
        let t = n + m;
        let mut coeffs = vec![ZERO; t * t * k];
        for i in 0..t {
            for j in 0..t {
                let src = if i < n && j < n {
                    Some(self.entry(i, j))
                } else if i >= n && j >= n {
                    Some(other.entry(i - n, j - n))
                } else {
                    None
                };
                if let Some(s) = src {
                    coeffs[(i * t + j) * k..(i * t + j + 1) * k].copy_from_slice(s);
                }
            }
        }
        Self { space: self.space, n: t, coeffs }
    }

    /// α u β for scalar matrices α (r×n) and β (n×r).
    pub fn sandwich(&self, alpha: &DenseMatrix, beta: &DenseMatrix) -> Self {
        let (r, k, n) = (alpha.nrows(), self.space.dim(), self.n);
        let mut coeffs = vec![ZERO; r * r * k];
        for i in 0..r {
            for j in 0..r {
                let out = &mut coeffs[(i * r + j) * k..(i * r + j + 1) * k];
                for a in 0..n {
                    for b in 0..n {
                        let w = alpha[(i, a)] * beta[(b, j)];
                        if w != ZERO {
                            for (o, v) in out.iter_mut().zip(self.entry(a, b)) {
                                *o += w * v;
                            }
                        }
                    }
                }
            }
        }
        Self { space: self.space, n: r, coeffs }
    }
}

/// The (n·d)×(n·d) block matrix of x; the outer index is the ℓ_p^n coordinate.
pub fn amplify(x: &MatrixLevelElement) -> DenseMatrix {
    let (n, d) = (x.n, x.space.base_dim());
    let mut m = DenseMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            let block = x.space.element(x.entry(i, j));
            m.view_mut((i * d, j * d), (d, d)).copy_from(&block);
        }
    }
    m
}

pub fn level_norm(x: &MatrixLevelElement, cfg: &OptimConfig) -> Result<NormEstimate> {
    opnorm_estimate(&amplify(x), x.space.p(), cfg)
}

/// A linear map between concrete spaces; column j holds the coordinates of the
/// image of the j-th domain basis vector.
#[derive(Clone, Debug)]
pub struct LinearSpaceMap<'a> {
    pub domain: &'a ConcretePOpSpace,
    pub codomain: &'a ConcretePOpSpace,
    pub matrix: DenseMatrix,
}

impl<'a> LinearSpaceMap<'a> {
    pub fn new(domain: &'a ConcretePOpSpace, codomain: &'a ConcretePOpSpace, matrix: DenseMatrix) -> Result<Self> {
        if matrix.shape() != (codomain.dim(), domain.dim()) {
            return Err(Error::Dimension(format!(
                "map matrix must be {}×{}",
                codomain.dim(),
                domain.dim()
            )));
        }
        if domain.p() != codomain.p() {
            return Err(Error::Input("domain and codomain use different exponents".into()));
        }
        Ok(Self { domain, codomain, matrix })
    }

    pub fn identity(space: &'a ConcretePOpSpace) -> Self {
        Self { domain: space, codomain: space, matrix: DenseMatrix::identity(space.dim(), space.dim()) }
    }

    /// The map T ↦ f(T) for a linear f that keeps `space` invariant.
    pub fn from_fn(space: &'a ConcretePOpSpace, f: impl Fn(&DenseMatrix) -> DenseMatrix) -> Result<Self> {
        let k = space.dim();
        let mut matrix = DenseMatrix::zeros(k, k);
        for (j, b) in space.basis().iter().enumerate() {
            let img = space
                .coordinates(&f(b))
                .ok_or_else(|| Error::Input("map does not preserve the space".into()))?;
            for (i, v) in img.into_iter().enumerate() {
                matrix[(i, j)] = v;
            }
        }
        Ok(Self { domain: space, codomain: space, matrix })
    }

    /// The amplification (u)_n applied entrywise.
    pub fn apply(&self, x: &MatrixLevelElement) -> MatrixLevelElement<'a> {
        let (n, k) = (x.n, self.domain.dim());
        let kc = self.codomain.dim();
        let mut coeffs = Vec::with_capacity(n * n * kc);
        for i in 0..n {
            for j in 0..n {
                let v = PVec::from_column_slice(x.entry(i, j));
                debug_assert_eq!(v.len(), k);
                coeffs.extend((&self.matrix * v).iter().copied());
            }
        }
        MatrixLevelElement { space: self.codomain, n, coeffs }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub d_infinity_violations: usize,
    pub m_p_violations: usize,
    /// Trials where the brackets could not separate the two sides.
    pub undecided: usize,
    /// Largest mismatch between ‖u⊕v‖ and max(‖u‖,‖v‖) beyond the brackets.
    pub worst_d_infinity: f64,
    /// Most negative value of ‖α‖‖u‖‖β‖ − ‖αuβ‖ over certified bounds.
    pub worst_m_p: f64,
    pub pass: bool,
}

/// Random checks of ‖u⊕v‖ = max(‖u‖,‖v‖) and ‖αuβ‖ ≤ ‖α‖‖u‖‖β‖ at levels ≤ 3.
pub fn check_axioms(x: &ConcretePOpSpace, trials: usize, cfg: &OptimConfig) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::Input("at least one trial is required".into()));
    }
    let tol = 1e-6;
    let p = x.p();
    let results = map_indexed(trials, cfg.single_lane, |t| -> Result<(f64, f64, bool)> {
        let tc = cfg.fork(t as u64);
        let mut rng = tc.rng(0);
        let n = 1 + t % 3;
        let m = 1 + (t / 3) % 3;
        let u = MatrixLevelElement::random(x, n, &mut rng);
        let v = if t % 7 == 0 { MatrixLevelElement::zeros(x, m) } else { MatrixLevelElement::random(x, m, &mut rng) };
        let eu = level_norm(&u, &tc)?;
        let ev = level_norm(&v, &tc)?;
        let es = level_norm(&u.direct_sum(&v), &tc)?;
        let max_lo = eu.lower.max(ev.lower);
        let max_hi = eu.upper.max(ev.upper);
        let d_gap = (es.lower - max_hi).max(max_lo - es.upper).max(0.0);

        let (alpha, beta) = if t % 11 == 0 {
            (DenseMatrix::identity(m, m), DenseMatrix::identity(m, m))
        } else {
            (random_matrix(n, m, &mut rng), random_matrix(m, n, &mut rng))
        };
        let w = v.sandwich(&alpha, &beta);
        let ew = level_norm(&w, &tc)?;
        let ea = opnorm_estimate(&alpha, p, &tc)?;
        let eb = opnorm_estimate(&beta, p, &tc)?;
        let rhs_hi = ea.upper * ev.upper * eb.upper;
        let rhs_lo = ea.lower * ev.lower * eb.lower;
        let m_slack = rhs_hi - ew.lower;
        let decided = ew.upper <= rhs_lo + tol || ew.lower > rhs_hi + tol;
        Ok((d_gap, m_slack, decided))
    });
    let mut rep = AxiomReport {
        trials,
        d_infinity_violations: 0,
        m_p_violations: 0,
        undecided: 0,
        worst_d_infinity: 0.0,
        worst_m_p: f64::INFINITY,
        pass: true,
    };
    for r in results {
        let (d_gap, m_slack, decided) = r?;
        rep.worst_d_infinity = rep.worst_d_infinity.max(d_gap);
        rep.worst_m_p = rep.worst_m_p.min(m_slack);
        if d_gap > tol {
            rep.d_infinity_violations += 1;
        }
        if m_slack < -1e-8 {
            rep.m_p_violations += 1;
        }
        if !decided {
            rep.undecided += 1;
        }
    }
    rep.pass = rep.d_infinity_violations == 0 && rep.m_p_violations == 0;
    Ok(rep)
}

/// A subquotient of ℓ_p^N: the span of `subspace` columns modulo the span of `kernel` columns.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub p: PExponent,
    pub subspace: DenseMatrix,
    pub kernel: DenseMatrix,
}

impl Subquotient {
    /// ℓ_p^n itself.
    pub fn lp(p: PExponent, n: usize) -> Self {
        Self { p, subspace: DenseMatrix::identity(n, n), kernel: DenseMatrix::zeros(n, 0) }
    }

    pub fn new(p: PExponent, subspace: DenseMatrix, kernel: DenseMatrix) -> Result<Self> {
        if subspace.ncols() == 0 || subspace.nrows() == 0 {
            return Err(Error::Empty("subquotient"));
        }
        if kernel.nrows() != subspace.nrows() {
            return Err(Error::Dimension("kernel and subspace live in different ambient spaces".into()));
        }
        let r_sub = numerical_rank(&subspace, 1e-10);
        if kernel.ncols() > 0 {
            let joined = DenseMatrix::from_fn(subspace.nrows(), subspace.ncols() + kernel.ncols(), |i, j| {
                if j < subspace.ncols() {
                    subspace[(i, j)]
                } else {
                    kernel[(i, j - subspace.ncols())]
                }
            });
            if numerical_rank(&joined, 1e-10) != r_sub {
                return Err(Error::Input("kernel must lie inside the subspace".into()));
            }
            if numerical_rank(&kernel, 1e-10) >= r_sub {
                return Err(Error::Input("quotient is zero".into()));
            }
        }
        Ok(Self { p, subspace, kernel })
    }

    pub fn coords_dim(&self) -> usize {
        self.subspace.ncols()
    }

    /// Bracket for the quotient norm of the element with coordinates `coeffs`.
    pub fn norm(&self, coeffs: &PVec) -> (f64, f64) {
        let y = &self.subspace * coeffs;
        quotient_norm(&y, &self.kernel, self.p)
    }
}

/// dist(y, span K) in ℓ_p^N: upper bound by reweighted least squares, lower
/// bound from the norming functional of the residual projected onto K^⊥.
pub fn quotient_norm(y: &PVec, kernel: &DenseMatrix, p: PExponent) -> (f64, f64) {
    let pp = p.p();
    let direct = norm_slice(y.as_slice(), pp);
    if kernel.ncols() == 0 || direct == 0.0 {
        return (direct, direct);
    }
    let mut t = PVec::zeros(kernel.ncols());
    let mut best_r = y.clone();
    let mut best = direct;
    let mut eps = 1e-2 * direct;
    for _ in 0..200 {
        let r = y + kernel * &t;
        let w: Vec<f64> = r.iter().map(|z| z.norm().max(eps).powf(pp - 2.0)).collect();
        let kw = DenseMatrix::from_fn(kernel.nrows(), kernel.ncols(), |i, j| kernel[(i, j)] * w[i].sqrt());
        let yw = DenseMatrix::from_fn(y.len(), 1, |i, _| -y[i] * w[i].sqrt());
        let sol = crate::linalg::lstsq(&kw, &yw);
        let t_new = PVec::from_iterator(kernel.ncols(), sol.iter().copied());
        let r_new = y + kernel * &t_new;
        let v = norm_slice(r_new.as_slice(), pp);
        if v < best {
            best = v;
            best_r = r_new;
        }
        t = &t * c(0.5, 0.0) + &t_new * c(0.5, 0.0);
        eps = (eps * 0.7).max(1e-14 * direct);
    }
    // Norming functional of the residual, made to annihilate the kernel.
    let phi = signum_power(&best_r, pp).map(|z| z.conj());
    let kc = kernel.map(|z| z.conj());
    let q = crate::linalg::thin_svd(&kc).1;
    let rank = numerical_rank(&kc, 1e-12);
    let q = q.columns(0, rank).into_owned();
    let phi = &phi - &q * (q.adjoint() * &phi);
    let pair: C64 = phi.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
    let nphi = norm_slice(phi.as_slice(), p.q());
    let lower = if nphi > 0.0 { (pair.norm() / nphi).min(best) } else { 0.0 };
    (lower, best)
}

#[derive(Clone, Debug, Serialize)]
pub struct KwapienReport {
    /// Lower bound for sup (Σ_i‖Σ_j a_ij x_j‖^p)^{1/p} over Σ_j‖x_j‖^p ≤ 1.
    pub sup_lower: f64,
    pub a_lower: f64,
    pub a_upper: f64,
    /// ‖a‖.upper − sup.lower; negative means the inequality failed.
    pub margin: f64,
    pub verdict: crate::report::Verdict,
}

/// Searches for vectors in E violating ‖a ⊗ I_E‖ ≤ ‖a‖_{B(ℓ_p^n)}.
pub fn kwapien_check(e: &Subquotient, a: &DenseMatrix, cfg: &OptimConfig) -> Result<KwapienReport> {
    let n = a.nrows();
    if a.ncols() != n || n == 0 {
        return Err(Error::Dimension("a must be a nonempty square matrix".into()));
    }
    let k = e.coords_dim();
    let p = e.p;
    let pp = p.p();
    let ea = opnorm_estimate(a, p, cfg)?;
    // Unit element of E used to replicate the scalar maximizer.
    let unit = (0..k)
        .map(|j| crate::linalg::basis_vector(k, j))
        .max_by(|u, v| e.norm(u).1.total_cmp(&e.norm(v).1))
        .expect("k ≥ 1");
    let ratio = |cols: &[PVec], certified: bool| -> f64 {
        let mut num = 0.0;
        for i in 0..n {
            let mut s = PVec::zeros(k);
            for (j, x) in cols.iter().enumerate() {
                s += x * a[(i, j)];
            }
            let (lo, hi) = e.norm(&s);
            num += if certified { lo } else { hi }.powf(pp);
        }
        let den: f64 = cols.iter().map(|x| e.norm(x).1.powf(pp)).sum();
        if den == 0.0 {
            0.0
        } else {
            (num / den).powf(1.0 / pp)
        }
    };
    let unpack = |w: &[f64]| -> Vec<PVec> {
        let z = from_real(w);
        (0..n).map(|j| PVec::from_column_slice(&z[j * k..(j + 1) * k])).collect()
    };
    let mut seeds: Vec<Vec<PVec>> = Vec::new();
    if let Some(Witness::Vector(alpha)) = &ea.lower_witness {
        seeds.push(alpha.iter().map(|&s| &unit * s).collect());
    }
    let runs = map_indexed(cfg.restarts.clamp(1, 8), cfg.single_lane, |r| {
        let mut rng = cfg.rng(r as u64 + 17);
        let start: Vec<PVec> = if r < seeds.len() {
            seeds[r].clone()
        } else {
            (0..n).map(|_| crate::linalg::random_vector(k, &mut rng)).collect()
        };
        let x0 = to_real(&start.iter().flat_map(|v| v.iter().copied()).collect::<Vec<_>>());
        let res = climb(x0, |w| ratio(&unpack(w), false), cfg.max_iters, 0.3, 1e-8, &mut rng);
        let cols = unpack(&res.x);
        let cert = ratio(&cols, true);
        let seed_cert = ratio(&start, true);
        cert.max(seed_cert)
    });
    let sup_lower = runs.into_iter().fold(0.0, f64::max);
    let tol = 1e-6;
    let margin = ea.upper - sup_lower;
    let verdict = if sup_lower > ea.upper + tol {
        crate::report::Verdict::Fail
    } else if sup_lower > ea.lower + tol {
        crate::report::Verdict::Indecisive
    } else {
        crate::report::Verdict::Pass
    };
    Ok(KwapienReport { sup_lower, a_lower: ea.lower, a_upper: ea.upper, margin, verdict })
}

#[derive(Clone, Debug)]
pub struct LevelReport {
    /// Bracket for the supremum over the computed levels.
    pub estimate: NormEstimate,
    /// One bracket per level 1..=n_max.
    pub levels: Vec<NormEstimate>,
    /// Whether level lower bounds are nondecreasing within bracket widths.
    pub monotone: bool,
}

/// Truncated p-cb norm: max over n ≤ n_max of ‖(u)_n‖.
///
/// Lower bounds come from optimized witnesses x ∈ M_n(X), certified as
/// ‖(u)_n x‖.lower / ‖x‖.upper. `upper` is an externally supplied bound.
pub fn pcb_norm(
    u: &LinearSpaceMap,
    n_max: usize,
    upper: Option<(f64, Certificate)>,
    cfg: &OptimConfig,
) -> Result<LevelReport> {
    if n_max == 0 {
        return Err(Error::Input("n_max must be at least 1".into()));
    }
    let p = u.domain.p();
    let k = u.domain.dim();
    let (up, cert) = upper.unwrap_or((f64::INFINITY, Certificate::Factorization));
    let inner = cfg.inner();
    let mut levels: Vec<NormEstimate> = Vec::new();
    let mut carry: Option<Vec<C64>> = None;
    for n in 1..=n_max {
        let lc = cfg.fork(n as u64);
        let mut seeds: Vec<Vec<C64>> = Vec::new();
        if let Some(prev) = &carry {
            seeds.push(embed_corner(prev, n - 1, n, k));
        }
        seeds.extend(identity_like(u.domain, n));
        let proxy = |z: &[C64]| -> f64 {
            let x = MatrixLevelElement { space: u.domain, n, coeffs: z.to_vec() };
            let (den, _) = opnorm_quick(&amplify(&x), p, &inner);
            if den == 0.0 {
                return 0.0;
            }
            let (num, _) = opnorm_quick(&amplify(&u.apply(&x)), p, &inner);
            num / den
        };
        let certify = |z: &[C64]| -> Result<f64> {
            let x = MatrixLevelElement { space: u.domain, n, coeffs: z.to_vec() };
            let den = level_norm(&x, &lc)?;
            if den.upper == 0.0 {
                return Ok(0.0);
            }
            Ok(level_norm(&u.apply(&x), &lc)?.lower / den.upper)
        };
        let (best_z, best, evals) = maximize_coeffs(&seeds, n * n * k, proxy, certify, &lc)?;
        carry = Some(best_z.clone());
        levels.push(
            NormEstimate::new(best.min(up), up, cert, format!("level-{n}-witness"))
                .with_witness(Witness::Coefficients(best_z))
                .with_budget(evals),
        );
    }
    let lower = levels.iter().fold(0.0_f64, |m, e| m.max(e.lower));
    let monotone = levels.windows(2).all(|w| w[1].lower + 2.0 * w[1].width().min(1.0).max(1e-9) >= w[0].lower - 1e-9);
    let budget = levels.iter().map(|l| l.budget_used).sum();
    let estimate = NormEstimate::new(lower, up, cert, format!("pcb-levels-1..{n_max}")).with_budget(budget);
    Ok(LevelReport { estimate, levels, monotone })
}

/// Places an m×m block array in the top-left corner of an n×n one.
fn embed_corner(z: &[C64], m: usize, n: usize, k: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n * n * k];
    for i in 0..m {
        for j in 0..m {
            out[(i * n + j) * k..(i * n + j + 1) * k].copy_from_slice(&z[(i * m + j) * k..(i * m + j + 1) * k]);
        }
    }
    out
}

/// Level-n elements built from the identity and diagonal matrix units, when they lie in X.
fn identity_like(x: &ConcretePOpSpace, n: usize) -> Vec<Vec<C64>> {
    let d = x.base_dim();
    let k = x.dim();
    let mut cands = vec![DenseMatrix::identity(d, d)];
    cands.extend((0..d).map(|i| matrix_unit(d, i, i)));
    cands
        .iter()
        .filter_map(|m| x.coordinates(m))
        .map(|co| {
            let mut out = vec![ZERO; n * n * k];
            for i in 0..n {
                out[(i * n + i) * k..(i * n + i + 1) * k].copy_from_slice(&co);
            }
            out
        })
        .collect()
}

/// Multistart maximization of a ratio over complex coordinates.
///
/// `proxy` steers the search; `certify` turns each final point into a
/// certified lower bound. Returns the best point, its certified value and the
/// number of proxy evaluations.
pub(crate) fn maximize_coeffs<P, Q>(
    seeds: &[Vec<C64>],
    len: usize,
    proxy: P,
    certify: Q,
    cfg: &OptimConfig,
) -> Result<(Vec<C64>, f64, u64)>
where
    P: Fn(&[C64]) -> f64 + Sync,
    Q: Fn(&[C64]) -> Result<f64> + Sync,
{
    let starts = seeds.len() + (cfg.restarts / 8).clamp(2, 6);
    let budget = (cfg.max_iters / 2).max(50);
    let runs = map_indexed(starts, cfg.single_lane, |r| -> Result<(Vec<C64>, f64, u64)> {
        let mut rng = cfg.rng(r as u64 + 101);
        let z0: Vec<C64> = if r < seeds.len() { seeds[r].clone() } else { (0..len).map(|_| gaussian(&mut rng)).collect() };
        let seed_val = certify(&z0)?;
        let res = climb(to_real(&z0), |w| proxy(&from_real(w)), budget, 0.3, 1e-7, &mut rng);
        let z = from_real(&res.x);
        let v = certify(&z)?;
        Ok(if seed_val > v { (z0, seed_val, res.evals as u64) } else { (z, v, res.evals as u64) })
    });
    let mut best: (Vec<C64>, f64, u64) = (vec![ZERO; len], 0.0, 0);
    let mut evals = 0;
    for r in runs {
        let (z, v, e) = r?;
        evals += e;
        if v > best.1 {
            best = (z, v, 0);
        }
    }
    Ok((best.0, best.1, evals))
}

#[derive(Clone, Debug)]
pub struct FunctionalReport {
    /// ‖μ‖ at level 1.
    pub norm: NormEstimate,
    /// ‖(μ)_n‖ for n = 1..=n_max, with (μ)_n: M_n(X) → B(ℓ_p^n).
    pub levels: Vec<NormEstimate>,
    /// max_n level lower bound minus the level-1 lower bound.
    pub deviation: f64,
    /// Largest bracket width over all levels.
    pub width: f64,
    pub verdict: crate::report::Verdict,
}

/// Level norms of a functional μ on X, given by its values on the basis.
///
/// Upper bounds come from a nuclear extension of μ to B(ℓ_p^d), whose
/// decomposition cost bounds every level at once.
pub fn functional_levels(
    x: &ConcretePOpSpace,
    mu: &[C64],
    n_max: usize,
    cfg: &OptimConfig,
) -> Result<FunctionalReport> {
    if mu.len() != x.dim() {
        return Err(Error::Dimension("functional needs one value per basis element".into()));
    }
    if n_max == 0 {
        return Err(Error::Input("n_max must be at least 1".into()));
    }
    let p = x.p();
    let k = x.dim();
    let d = x.base_dim();
    if mu.iter().all(|z| *z == ZERO) {
        let zero = NormEstimate::exact(0.0, "zero-functional");
        return Ok(FunctionalReport {
            norm: zero.clone(),
            levels: vec![zero; n_max],
            deviation: 0.0,
            width: 0.0,
            verdict: crate::report::Verdict::Pass,
        });
    }
    // Extension: N with Σ_ab B_k[a,b] N[a,b] = μ_k for all k.
    let constraints: Vec<DenseMatrix> = x.basis().to_vec();
    let ext = affine_nuclear_min(&constraints, mu, d, p, cfg)?;
    let upper = ext.upper;
    let inner = cfg.inner();
    let mut levels = Vec::new();
    let mut carry: Option<Vec<C64>> = None;
    for n in 1..=n_max {
        let lc = cfg.fork(n as u64 + 1000);
        let mut seeds: Vec<Vec<C64>> = Vec::new();
        if let Some(prev) = &carry {
            seeds.push(embed_corner(prev, n - 1, n, k));
        }
        seeds.extend(identity_like(x, n));
        if n == 1 {
            // The element of X closest to the extension's dual direction.
            seeds.push(mu.iter().map(|z| z.conj()).collect());
        }
        let image = |z: &[C64]| -> DenseMatrix {
            DenseMatrix::from_fn(n, n, |i, j| {
                z[(i * n + j) * k..(i * n + j + 1) * k].iter().zip(mu).map(|(a, b)| a * b).sum()
            })
        };
        let proxy = |z: &[C64]| -> f64 {
            let xe = MatrixLevelElement { space: x, n, coeffs: z.to_vec() };
            let (den, _) = opnorm_quick(&amplify(&xe), p, &inner);
            if den == 0.0 {
                return 0.0;
            }
            opnorm_quick(&image(z), p, &inner).0 / den
        };
        let certify = |z: &[C64]| -> Result<f64> {
            let xe = MatrixLevelElement { space: x, n, coeffs: z.to_vec() };
            let den = level_norm(&xe, &lc)?;
            if den.upper == 0.0 {
                return Ok(0.0);
            }
            Ok(opnorm_estimate(&image(z), p, &lc)?.lower / den.upper)
        };
        let (best_z, best, evals) = maximize_coeffs(&seeds, n * n * k, proxy, certify, &lc)?;
        carry = Some(best_z.clone());
        levels.push(
            NormEstimate::new(best.min(upper), upper, Certificate::Factorization, format!("level-{n}-witness"))
                .with_witness(Witness::Coefficients(best_z))
                .with_budget(evals),
        );
    }
    // Compressing a level-n witness z with norming vectors (η, ξ) of μ_n(z)
    // gives x = Σ η_i ξ_j z_ij with |μ(x)| = ‖μ_n(z)ξ‖ and ‖x‖ ≤ ‖z‖; fold
    // these back into level one.
    let c1 = cfg.fork(1001);
    let pp = p.p();
    for n in 2..=n_max {
        let Some(Witness::Coefficients(z)) = levels[n - 1].lower_witness.clone() else { continue };
        let a = DenseMatrix::from_fn(n, n, |i, j| z[(i * n + j) * k..(i * n + j + 1) * k].iter().zip(mu).map(|(a, b)| a * b).sum());
        let (_, xi, _) = crate::pnorm::opnorm_lower(&a, p, &c1);
        let y = &a * &xi;
        let ny = norm_slice(y.as_slice(), pp);
        if ny == 0.0 {
            continue;
        }
        let eta: Vec<C64> = y.iter().map(|v| crate::linalg::sign(*v).conj() * (v.norm() / ny).powf(pp - 1.0)).collect();
        let comp: Vec<C64> = (0..k)
            .map(|b| (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| eta[i] * xi[j] * z[(i * n + j) * k + b]).sum())
            .collect();
        let den = level_norm(&MatrixLevelElement { space: x, n: 1, coeffs: comp.clone() }, &c1)?;
        if den.upper == 0.0 {
            continue;
        }
        let num: C64 = comp.iter().zip(mu).map(|(a, b)| a * b).sum();
        let r = (num.norm() / den.upper).min(upper);
        if r > levels[0].lower {
            levels[0] = NormEstimate::new(r, upper, Certificate::Factorization, "level-1-compressed-witness")
                .with_witness(Witness::Coefficients(comp))
                .with_budget(levels[0].budget_used);
        }
    }
    let norm = levels[0].clone();
    let deviation = levels.iter().map(|l| l.lower - norm.lower).fold(0.0, f64::max);
    let width = levels.iter().map(|l| l.width()).fold(0.0, f64::max);
    let verdict = if deviation <= (2.0 * width).max(1e-9) {
        crate::report::Verdict::Pass
    } else {
        crate::report::Verdict::Fail
    };
    Ok(FunctionalReport { norm, levels, deviation, width, verdict })
}

/// Nuclear norm bracket of the extension itself, for reporting.
pub fn extension_norm(x: &ConcretePOpSpace, mu: &[C64], cfg: &OptimConfig) -> Result<NormEstimate> {
    let ext = affine_nuclear_min(x.basis(), mu, x.base_dim(), x.p(), cfg)?;
    nuclear_norm_matrix(&ext.matrix, x.p(), cfg)
}
