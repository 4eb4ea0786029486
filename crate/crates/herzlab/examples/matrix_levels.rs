//! Matrix levels of B(ℓ_p^d): norm axioms, a completely bounded map, and a
//! functional whose level norms do not grow.
use herzlab::linalg::{c, DenseMatrix, C64};
use herzlab::opspace::{check_axioms, functional_levels, kwapien_check, pcb_norm, ConcretePOpSpace, LinearSpaceMap, Subquotient};
use herzlab::{OptimConfig, PExponent};

fn main() -> herzlab::Result<()> {
    let cfg = OptimConfig { restarts: 8, max_iters: 200, ..OptimConfig::default().with_seed(3) };
    let p = PExponent::new(1.5)?;
    let x = ConcretePOpSpace::full(p, 2);

    let axioms = check_axioms(&x, 10, &cfg)?;
    println!("axioms: {} trials, violations {} + {}", axioms.trials, axioms.d_infinity_violations, axioms.m_p_violations);

    let diag = LinearSpaceMap::from_fn(&x, |t| DenseMatrix::from_fn(2, 2, |i, j| if i == j { t[(i, j)] } else { C64::new(0.0, 0.0) }))?;
    let r = pcb_norm(&diag, 2, Some((1.0, herzlab::Certificate::Exact)), &cfg)?;
    for (n, l) in r.levels.iter().enumerate() {
        println!("diagonal projection, level {}: [{:.6}, {:.6}]", n + 1, l.lower, l.upper);
    }

    let mu = [c(1.0, 0.0), c(0.5, -0.5), c(0.0, 0.25), c(-1.0, 0.0)];
    let f = functional_levels(&x, &mu, 3, &cfg)?;
    for (n, l) in f.levels.iter().enumerate() {
        println!("functional, level {}: [{:.6}, {:.6}]", n + 1, l.lower, l.upper);
    }
    println!("functional deviation {:.2e} (max width {:.2e})", f.deviation, f.width);

    let a = herzlab::linalg::real_matrix(2, 2, &[1.0, 1.0, 1.0, -1.0]);
    let k = kwapien_check(&Subquotient::lp(p, 2), &a, &cfg)?;
    println!("‖a ⊗ I_E‖ ≥ {:.6}, ‖a‖ ≤ {:.6}: {:?}", k.sup_lower, k.a_upper, k.verdict);
    Ok(())
}
