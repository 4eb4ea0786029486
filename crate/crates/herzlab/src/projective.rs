//! The p-operator space projective tensor norm at level one.
//!
//! An element w of X ⊗ Y is a dim X × dim Y coefficient matrix over fixed
//! bases. Upper bounds come from splittings w = Σ_t x_t ⊗ y_t, each term
//! costing at most ‖x_t‖‖y_t‖. Lower bounds pair w against bilinear forms
//! whose associated maps X → Y′ are p-completely contractive.

use crate::error::{Error, Result};
use crate::estimate::{Certificate, NormEstimate, OptimConfig};
use crate::group::{FiniteGroup, GroupFunction};
use crate::herz::ap_norm;
use crate::linalg::{kron, max_abs, thin_svd, DenseMatrix, PVec, C64, ZERO};
use crate::nuclear::nuclear_norm_matrix;
use crate::opspace::ConcretePOpSpace;
use crate::pexp::PExponent;
use crate::pnorm::opnorm_estimate;

/// A factor of a tensor product together with its coordinates.
#[derive(Clone, Debug)]
pub enum FactorSpace {
    /// X ⊆ B(ℓ_p^d) spanned by a basis; coordinates are basis coefficients.
    Concrete(ConcretePOpSpace),
    /// N(ℓ_p^d); coordinates are the entries N[a, b] at a·d + b.
    Nuclear { p: PExponent, d: usize },
    /// A_p(G) with its operator space structure; coordinates are values.
    Herz { group: FiniteGroup, p: PExponent },
}

impl FactorSpace {
    pub fn p(&self) -> PExponent {
        match self {
            FactorSpace::Concrete(x) => x.p(),
            FactorSpace::Nuclear { p, .. } | FactorSpace::Herz { p, .. } => *p,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FactorSpace::Concrete(x) => x.dim(),
            FactorSpace::Nuclear { d, .. } => d * d,
            FactorSpace::Herz { group, .. } => group.order(),
        }
    }

    /// Norm of a single element.
    pub fn element_norm(&self, coords: &[C64], cfg: &OptimConfig) -> Result<NormEstimate> {
        if coords.len() != self.dim() {
            return Err(Error::Dimension(format!("expected {} coordinates", self.dim())));
        }
        match self {
            FactorSpace::Concrete(x) => opnorm_estimate(&x.element(coords), x.p(), cfg),
            FactorSpace::Nuclear { p, d } => nuclear_norm_matrix(&DenseMatrix::from_row_slice(*d, *d, coords), *p, cfg),
            FactorSpace::Herz { group, p } => ap_norm(group, &GroupFunction::new(coords.to_vec()), *p, cfg),
        }
    }
}

/// Lower bound from the natural realization of X ⊗ Y.
///
/// Concrete spaces: the spatial norm in B(ℓ_p^{d₁d₂}), which the projective
/// norm dominates. Nuclear spaces: operators T on ℓ_p^{d₁d₂}, whose slice
/// maps N(ℓ_p^{d₁}) → B(ℓ_p^{d₂}) are p-cb with norm ≤ ‖T‖. Herz algebras:
/// convolution operators on ℓ_p(G × H), which slice the same way.
fn joint_lower(x: &FactorSpace, y: &FactorSpace, w: &DenseMatrix, cfg: &OptimConfig) -> Result<f64> {
    match (x, y) {
        (FactorSpace::Concrete(a), FactorSpace::Concrete(b)) => {
            let (d1, d2) = (a.base_dim(), b.base_dim());
            let mut m = DenseMatrix::zeros(d1 * d2, d1 * d2);
            for (i, ai) in a.basis().iter().enumerate() {
                for (j, bj) in b.basis().iter().enumerate() {
                    if w[(i, j)] != ZERO {
                        m += kron(ai, bj) * w[(i, j)];
                    }
                }
            }
            Ok(opnorm_estimate(&m, a.p(), cfg)?.lower)
        }
        (FactorSpace::Nuclear { p, d: d1 }, FactorSpace::Nuclear { d: d2, .. }) => {
            Ok(nuclear_norm_matrix(&nuclear_product(w, *d1, *d2), *p, cfg)?.lower)
        }
        (FactorSpace::Herz { group: g, p }, FactorSpace::Herz { group: h, .. }) => {
            let gh = g.product(h);
            let f = GroupFunction::new(w.transpose().as_slice().to_vec());
            Ok(ap_norm(&gh, &f, *p, cfg)?.lower)
        }
        _ => Err(Error::Unsupported("factors must be of the same kind".into())),
    }
}

/// Σ_ij w[i, j] N_i ⊗ N_j as a nuclear matrix on ℓ_p^{d₁} ⊗ ℓ_p^{d₂}.
pub fn nuclear_product(w: &DenseMatrix, d1: usize, d2: usize) -> DenseMatrix {
    DenseMatrix::from_fn(d1 * d2, d1 * d2, |r, s| {
        let (a, a2, b, b2) = (r / d2, r % d2, s / d2, s % d2);
        w[(a * d1 + b, a2 * d2 + b2)]
    })
}

/// Splittings of w: columns, rows and the singular value decomposition.
fn splittings(w: &DenseMatrix) -> Vec<Vec<(PVec, PVec)>> {
    let (m, n) = w.shape();
    let mut out = Vec::new();
    out.push(
        (0..n)
            .filter(|&j| w.column(j).iter().any(|z| *z != ZERO))
            .map(|j| (w.column(j).into_owned(), crate::linalg::basis_vector(n, j)))
            .collect(),
    );
    out.push(
        (0..m)
            .filter(|&i| w.row(i).iter().any(|z| *z != ZERO))
            .map(|i| (crate::linalg::basis_vector(m, i), w.row(i).transpose().into_owned()))
            .collect(),
    );
    let (s, u, v) = thin_svd(w);
    let top = s.first().copied().unwrap_or(0.0);
    out.push(
        s.iter()
            .enumerate()
            .filter(|(_, &x)| x > 1e-14 * top)
            .map(|(k, &x)| (u.column(k).into_owned() * C64::new(x, 0.0), v.column(k).map(|z| z.conj())))
            .collect(),
    );
    out
}

/// ‖w‖ in X ⊗̂ Y at level one.
pub fn posp_projective_norm(x: &FactorSpace, y: &FactorSpace, w: &DenseMatrix, cfg: &OptimConfig) -> Result<NormEstimate> {
    if x.p() != y.p() {
        return Err(Error::Input("factors must share the exponent".into()));
    }
    if w.shape() != (x.dim(), y.dim()) {
        return Err(Error::Dimension(format!("coefficients must be {}×{}", x.dim(), y.dim())));
    }
    if max_abs(w) == 0.0 {
        return Ok(NormEstimate::exact(0.0, "zero-tensor"));
    }
    let mut upper = f64::INFINITY;
    for (k, terms) in splittings(w).into_iter().enumerate() {
        let kc = cfg.fork(6000 + k as u64);
        let mut cost = 0.0;
        for (a, b) in &terms {
            cost += x.element_norm(a.as_slice(), &kc)?.upper * y.element_norm(b.as_slice(), &kc)?.upper;
            if cost >= upper {
                break;
            }
        }
        upper = upper.min(cost);
    }
    let lower = crate::pnorm::settle(joint_lower(x, y, w, cfg)?, upper);
    Ok(NormEstimate::new(lower, upper, Certificate::Factorization, "splitting/joint-dual"))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct TensorIdentityReport {
    /// Projective norm in X ⊗̂ Y.
    pub projective: NormEstimate,
    /// Norm of the same element in the identified space.
    pub identified: NormEstimate,
    pub verdict: crate::report::Verdict,
}

fn overlap_verdict(a: &NormEstimate, b: &NormEstimate, tol: f64) -> crate::report::Verdict {
    if a.overlaps(b, tol) {
        crate::report::Verdict::Pass
    } else {
        crate::report::Verdict::Fail
    }
}

/// N(ℓ_p^{d₁}) ⊗̂ N(ℓ_p^{d₂}) against N(ℓ_p^{d₁d₂}) for one element.
pub fn check_nuclear_tensor(
    w: &DenseMatrix,
    d1: usize,
    d2: usize,
    p: PExponent,
    tol: f64,
    cfg: &OptimConfig,
) -> Result<TensorIdentityReport> {
    let x = FactorSpace::Nuclear { p, d: d1 };
    let y = FactorSpace::Nuclear { p, d: d2 };
    let projective = posp_projective_norm(&x, &y, w, cfg)?;
    let identified = nuclear_norm_matrix(&nuclear_product(w, d1, d2), p, &cfg.fork(6100))?;
    let verdict = overlap_verdict(&projective, &identified, tol);
    Ok(TensorIdentityReport { projective, identified, verdict })
}

/// A_p(G) ⊗̂ A_p(H) against A_p(G × H) for u ⊗ v.
pub fn check_ap_tensor(
    g: &FiniteGroup,
    h: &FiniteGroup,
    u: &GroupFunction,
    v: &GroupFunction,
    p: PExponent,
    tol: f64,
    cfg: &OptimConfig,
) -> Result<TensorIdentityReport> {
    if g.order() * h.order() > 12 {
        return Err(Error::Unsupported(format!("|G|·|H| = {} exceeds 12", g.order() * h.order())));
    }
    if u.len() != g.order() || v.len() != h.order() {
        return Err(Error::Dimension("functions must match their groups".into()));
    }
    let w = DenseMatrix::from_fn(g.order(), h.order(), |s, t| u.values[s] * v.values[t]);
    let x = FactorSpace::Herz { group: g.clone(), p };
    let y = FactorSpace::Herz { group: h.clone(), p };
    let projective = posp_projective_norm(&x, &y, &w, cfg)?;
    let identified = ap_norm(&g.product(h), &u.tensor(v), p, &cfg.fork(6200))?;
    let verdict = overlap_verdict(&projective, &identified, tol);
    Ok(TensorIdentityReport { projective, identified, verdict })
}
