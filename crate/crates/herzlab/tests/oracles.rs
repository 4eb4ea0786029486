//! Brackets checked against values computed independently in this file.

use herzlab::group::{FiniteGroup, GroupFunction};
use herzlab::herz::{ap_norm, coproduct, fell_w, left_regular, PMElement};
use herzlab::linalg::{jacobi_svd, random_matrix, singular_values, thin_svd, C64};
use herzlab::multipliers::{multiplier_norm, schur_norm, SchurSymbol};
use herzlab::nuclear::nuclear_norm_matrix;
use herzlab::opspace::quotient_norm;
use herzlab::pnorm::{opnorm_estimate, opnorm_exact};
use herzlab::{DenseMatrix, OptimConfig, PExponent, PVec};

fn cfg(seed: u64) -> OptimConfig {
    OptimConfig { restarts: 8, max_iters: 200, ..OptimConfig::default().with_seed(seed) }
}

fn pnorm(x: &[C64], p: f64) -> f64 {
    x.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn max_col_sum(a: &DenseMatrix) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn max_row_sum(a: &DenseMatrix) -> f64 {
    (0..a.nrows()).map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest singular value by power iteration on AᴴA.
fn spectral_by_power(a: &DenseMatrix) -> f64 {
    let h = a.adjoint() * a;
    let mut x = PVec::from_fn(a.ncols(), |i, _| C64::new(1.0 + i as f64 * 0.37, 0.1 * i as f64));
    let mut lam = 0.0;
    for _ in 0..5000 {
        let y = &h * &x;
        let n = y.norm();
        if n == 0.0 {
            return 0.0;
        }
        lam = n / x.norm();
        x = y / C64::new(n, 0.0);
    }
    lam.sqrt()
}

#[test]
fn closed_form_operator_norms() {
    let c = cfg(1);
    let mut rng = c.rng(0);
    for t in 0..40 {
        let a = random_matrix(1 + t % 5, 1 + (t / 5) % 5, &mut rng);
        let cases = [
            (PExponent::one(), max_col_sum(&a)),
            (PExponent::infinity(), max_row_sum(&a)),
            (PExponent::two(), spectral_by_power(&a)),
        ];
        for (p, want) in cases {
            assert!((opnorm_exact(&a, p).unwrap() - want).abs() < 1e-8 * (1.0 + want));
            let e = opnorm_estimate(&a, p, &c).unwrap();
            assert!(e.contains(want, 1e-8), "p={p} want {want} got [{}, {}]", e.lower, e.upper);
        }
    }
}

#[test]
fn rank_one_operator_norm() {
    // ‖x yᵀ‖_{p→p} = ‖x‖_p ‖y‖_{p′}.
    let c = cfg(2);
    let mut rng = c.rng(0);
    for (t, &pv) in [1.3, 1.5, 2.5, 3.0, 4.0].iter().cycle().take(15).enumerate() {
        let p = PExponent::new(pv).unwrap();
        let x = random_matrix(2 + t % 3, 1, &mut rng);
        let y = random_matrix(2 + (t / 3) % 3, 1, &mut rng);
        let a = &x * y.transpose();
        let want = pnorm(x.as_slice(), pv) * pnorm(y.as_slice(), p.q());
        let e = opnorm_estimate(&a, p, &c).unwrap();
        assert!(e.contains(want, 1e-7), "p={pv} want {want} got [{}, {}]", e.lower, e.upper);
    }
}

#[test]
fn diagonal_operator_norm() {
    let c = cfg(3);
    let d = DenseMatrix::from_diagonal(&PVec::from_vec(vec![C64::new(0.5, 0.0), C64::new(0.0, -2.0), C64::new(1.5, 0.0)]));
    for pv in [1.2, 1.7, 3.5] {
        let e = opnorm_estimate(&d, PExponent::new(pv).unwrap(), &c).unwrap();
        assert!(e.contains(2.0, 1e-9));
    }
}

#[test]
fn svd_reconstructs_rank_deficient_matrices() {
    let constant = DenseMatrix::from_element(5, 5, C64::new(0.2, 0.0));
    let (s, u, v) = thin_svd(&constant);
    assert!((s[0] - 1.0).abs() < 1e-12);
    assert!(s[1..].iter().all(|x| x.abs() < 1e-12));
    let r = &u * DenseMatrix::from_diagonal(&PVec::from_iterator(s.len(), s.iter().map(|x| C64::new(*x, 0.0)))) * v.adjoint();
    assert!((r - &constant).norm() < 1e-12);

    let mut rng = cfg(4).rng(0);
    for t in 0..30 {
        let a = random_matrix(1 + t % 6, 1 + (t / 6) % 6, &mut rng);
        let (s, u, v) = jacobi_svd(&a);
        let k = s.len();
        assert!((u.adjoint() * &u - DenseMatrix::identity(k, k)).norm() < 1e-12);
        assert!((v.adjoint() * &v - DenseMatrix::identity(k, k)).norm() < 1e-12);
        let fro: f64 = s.iter().map(|x| x * x).sum();
        assert!((fro - a.norm_squared()).abs() < 1e-10);
        let sv = singular_values(&a);
        assert!((sv[0] - spectral_by_power(&a)).abs() < 1e-8);
    }
}

#[test]
fn rank_one_nuclear_norm() {
    // N = μ xᵀ has nuclear norm ‖μ‖_{p′} ‖x‖_p.
    let c = cfg(5);
    let mut rng = c.rng(0);
    for pv in [1.5, 2.0, 3.0] {
        let p = PExponent::new(pv).unwrap();
        let mu = random_matrix(3, 1, &mut rng);
        let x = random_matrix(3, 1, &mut rng);
        let want = pnorm(mu.as_slice(), p.q()) * pnorm(x.as_slice(), pv);
        let e = nuclear_norm_matrix(&(&mu * x.transpose()), p, &c).unwrap();
        assert!(e.contains(want, 1e-6), "p={pv} want {want} got [{}, {}]", e.lower, e.upper);
    }
}

#[test]
fn quotient_of_lp_by_a_coordinate() {
    // ℓ_p^3 / span(e_3): the class of y has norm ‖(y_1, y_2)‖_p.
    let p = PExponent::new(1.7).unwrap();
    let y = PVec::from_vec(vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.0), C64::new(4.0, 1.0)]);
    let kernel = DenseMatrix::from_column_slice(3, 1, &[C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let (lo, hi) = quotient_norm(&y, &kernel, p);
    let want = pnorm(&y.as_slice()[..2], 1.7);
    assert!(lo <= want + 1e-9 && hi >= want - 1e-9 && hi - lo < 1e-6, "[{lo}, {hi}] vs {want}");
}

/// û(k) = |G|⁻¹ Σ_j u(j) e^{−2πijk/n}.
fn fourier_l1(u: &GroupFunction) -> f64 {
    let n = u.len();
    (0..n)
        .map(|k| {
            let s: C64 = (0..n)
                .map(|j| u.values[j] * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64))
                .sum();
            s.norm() / n as f64
        })
        .sum()
}

#[test]
fn fourier_algebra_norm_on_cyclic_groups() {
    let c = cfg(6);
    let mut rng = c.rng(0);
    for n in [3, 5, 6, 8] {
        let g = FiniteGroup::cyclic(n);
        for _ in 0..5 {
            let u = GroupFunction::random(&g, &mut rng);
            let e = ap_norm(&g, &u, PExponent::two(), &c).unwrap();
            assert!(e.contains(fourier_l1(&u), 1e-9));
        }
    }
}

#[test]
fn characters_have_unit_norm() {
    let c = cfg(7);
    for name in ["Z_3", "Z_5", "D_4", "S_3"] {
        let g = FiniteGroup::builtin(name).unwrap();
        for chi in g.characters() {
            for pv in [1.5, 3.0] {
                let p = PExponent::new(pv).unwrap();
                let e = ap_norm(&g, &chi, p, &c).unwrap();
                assert!(e.contains(1.0, 1e-6) && e.width() < 1e-6, "{name} p={pv}: [{}, {}]", e.lower, e.upper);
            }
        }
    }
}

#[test]
fn schur_norm_of_rank_one_symbols() {
    // (a bᵀ) ∘ T = D_a T D_b, with norm max|a|·max|b| attained on a matrix unit.
    let c = cfg(8);
    let mut rng = c.rng(0);
    for pv in [1.5, 3.0] {
        let p = PExponent::new(pv).unwrap();
        let a = random_matrix(3, 1, &mut rng);
        let b = random_matrix(3, 1, &mut rng);
        let want = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let e = schur_norm(&SchurSymbol::new(&a * b.transpose()).unwrap(), p, None, &c).unwrap();
        assert!(e.contains(want, 1e-6), "p={pv} want {want} got [{}, {}]", e.lower, e.upper);
    }
}

#[test]
fn multiplier_norm_of_point_mass() {
    // v ↦ v(e)δ_e has norm 1: |v(e)| ≤ ‖v‖_∞ ≤ ‖v‖ with equality at δ_e.
    let g = FiniteGroup::cyclic(4);
    let e = multiplier_norm(&g, &GroupFunction::delta(&g, g.identity()), PExponent::new(1.5).unwrap(), &cfg(9)).unwrap();
    assert!(e.contains(1.0, 1e-6), "[{}, {}]", e.lower, e.upper);
}

#[test]
fn coproduct_of_translations_by_brute_force() {
    // Γ(λ(s)) and λ(s) ⊗ λ(s) built entry by entry.
    for g in [FiniteGroup::symmetric(3), FiniteGroup::quaternion()] {
        let n = g.order();
        for s in 0..n {
            let lam = left_regular(&g, s);
            for a in 0..n {
                assert_eq!(lam[(g.mul(s, a), a)], C64::new(1.0, 0.0));
            }
            let gamma = coproduct(&g, &PMElement::translation(&g, s));
            let want = DenseMatrix::from_fn(n * n, n * n, |r, c| lam[(r / n, c / n)] * lam[(r % n, c % n)]);
            assert_eq!(gamma, want);
        }
        let w = fell_w(&g);
        assert_eq!(w.adjoint() * &w, DenseMatrix::identity(n * n, n * n));
    }
}

#[test]
fn group_loading() {
    assert_eq!(FiniteGroup::load("Z_6").unwrap().order(), 6);
    let s3 = FiniteGroup::load("S_3").unwrap();
    assert_eq!(s3.order(), 6);
    let (a, b) = s3.noncommuting_pair().expect("S_3 is nonabelian");
    assert_ne!(s3.mul(a, b), s3.mul(b, a));

    let err = FiniteGroup::from_json(r#"{"order": 3, "identity": 0, "table": [0,1,2, 1,2,0, 2,2,1]}"#).unwrap_err();
    assert!(err.to_string().contains("row 2"), "{err}");
    let err = FiniteGroup::from_json(r#"{"order": 2, "identity": 1, "table": [0,1, 1,0]}"#).unwrap_err();
    assert!(err.to_string().contains("identity"), "{err}");
    // A Latin square that is not associative.
    let err = FiniteGroup::from_json(
        r#"{"order": 5, "identity": 0, "table": [0,1,2,3,4, 1,0,3,4,2, 2,4,0,1,3, 3,2,4,0,1, 4,3,1,2,0]}"#,
    )
    .unwrap_err();
    assert!(err.to_string().contains("associativ"), "{err}");
}
