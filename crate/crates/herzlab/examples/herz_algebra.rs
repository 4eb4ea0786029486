//! Norms in A_p(G) for small groups, the averaging projection, and the two
//! matrix norms at level two.
use herzlab::group::{FiniteGroup, GroupFunction};
use herzlab::herz::{ap_norm, check_quasi_expectation, structure_norms};
use herzlab::{OptimConfig, PExponent};

fn main() -> herzlab::Result<()> {
    let cfg = OptimConfig { restarts: 8, max_iters: 200, ..OptimConfig::default().with_seed(11) };
    for name in ["Z_6", "S_3"] {
        let g = FiniteGroup::builtin(name)?;
        let u = GroupFunction::random(&g, &mut cfg.rng(0));
        for pv in [1.5, 2.0, 3.0] {
            let e = ap_norm(&g, &u, PExponent::new(pv)?, &cfg)?;
            println!("{name}, p = {pv}: ‖u‖ ∈ [{:.6}, {:.6}]  (sup {:.4})", e.lower, e.upper, u.sup_norm());
        }
        let q = check_quasi_expectation(&g, PExponent::new(3.0)?, 2, 2, &cfg)?;
        println!("{name}: averaging projection idempotence {:.1e}, fixes translations {}, {:?}", q.idempotence, q.fixes_translations, q.verdict);
    }

    let g = FiniteGroup::cyclic(3);
    let a: Vec<GroupFunction> = (0..4).map(|k| GroupFunction::random(&g, &mut cfg.rng(10 + k))).collect();
    let s = structure_norms(&g, &a, 2, PExponent::new(1.5)?, None, &cfg)?;
    println!(
        "Z_3, level 2: dual [{:.5}, {:.5}], quotient [{:.5}, {:.5}], {:?}",
        s.dual.lower, s.dual.upper, s.quotient.lower, s.quotient.upper, s.verdict
    );
    Ok(())
}
