//! Multiplier norms of functions on S_3 and a Schur multiplier of B(ℓ_p^3).
use herzlab::group::{FiniteGroup, GroupFunction};
use herzlab::linalg::real_matrix;
use herzlab::multipliers::{cb_multiplier_norm, herz_schur_norm, m0_upper_bound, multiplier_norm, schur_norm, SchurSymbol};
use herzlab::{OptimConfig, PExponent};

fn main() -> herzlab::Result<()> {
    let cfg = OptimConfig { restarts: 8, max_iters: 200, ..OptimConfig::default().with_seed(13) };
    let g = FiniteGroup::symmetric(3);
    let p = PExponent::new(3.0)?;
    let sign = g.characters().pop().expect("S_3 has a sign character");
    let rand = GroupFunction::random(&g, &mut cfg.rng(0));
    for (name, u) in [("sign", sign), ("random", rand)] {
        let m = multiplier_norm(&g, &u, p, &cfg)?;
        let cb = cb_multiplier_norm(&g, &u, p, 2, &cfg)?;
        let fs = herz_schur_norm(&g, &u, p, &cfg)?;
        let (m0, pair) = m0_upper_bound(&g, &u, p, None, &cfg)?;
        println!("{name}: M [{:.5}, {:.5}]  M_cb [{:.5}, {:.5}]", m.lower, m.upper, cb.estimate.lower, cb.estimate.upper);
        println!("{:width$}  FS [{:.5}, {:.5}]  M_0 ≤ {:.5} (d = {})", "", fs.lower, fs.upper, m0, pair.d, width = name.len());
    }

    let psi = SchurSymbol::new(real_matrix(3, 3, &[1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0]))?;
    let e = schur_norm(&psi, PExponent::new(2.0)?, None, &cfg)?;
    println!("triangular truncation on 3×3, p = 2: [{:.5}, {:.5}]", e.lower, e.upper);
    Ok(())
}
