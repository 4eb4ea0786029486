//! Projective tensor products: nuclear spaces and Herz algebras.
use herzlab::group::{FiniteGroup, GroupFunction};
use herzlab::herz::check_pm_tensor;
use herzlab::linalg::random_matrix;
use herzlab::projective::{check_ap_tensor, check_nuclear_tensor};
use herzlab::{OptimConfig, PExponent};

fn main() -> herzlab::Result<()> {
    let cfg = OptimConfig { restarts: 8, max_iters: 200, ..OptimConfig::default().with_seed(17) };
    let p = PExponent::new(1.5)?;

    let w = random_matrix(4, 4, &mut cfg.rng(0));
    let r = check_nuclear_tensor(&w, 2, 2, p, 5e-2, &cfg)?;
    println!(
        "N ⊗ N: projective [{:.5}, {:.5}], nuclear on the product [{:.5}, {:.5}], {:?}",
        r.projective.lower, r.projective.upper, r.identified.lower, r.identified.upper, r.verdict
    );

    let g = FiniteGroup::cyclic(2);
    let h = FiniteGroup::cyclic(3);
    let pm = check_pm_tensor(&g, &h)?;
    println!("translations on Z_2 × Z_3: {} mismatches, {:?}", pm.mismatches, pm.verdict);
    let u = GroupFunction::random(&g, &mut cfg.rng(1));
    let v = GroupFunction::random(&h, &mut cfg.rng(2));
    let r = check_ap_tensor(&g, &h, &u, &v, p, 5e-2, &cfg)?;
    println!(
        "A_p ⊗ A_p: projective [{:.5}, {:.5}], product group [{:.5}, {:.5}], {:?}",
        r.projective.lower, r.projective.upper, r.identified.lower, r.identified.upper, r.verdict
    );
    Ok(())
}
