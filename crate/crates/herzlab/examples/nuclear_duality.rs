//! Nuclear norms on ℓ_p^d, their matrix levels, and the pairing with
//! matrices of operators.
use herzlab::linalg::real_matrix;
use herzlab::nuclear::{check_nuclear_duality, matrix_nuclear_norm, nuclear_norm_matrix, NuclearMatrix};
use herzlab::{OptimConfig, PExponent};

fn main() -> herzlab::Result<()> {
    let cfg = OptimConfig { restarts: 8, max_iters: 200, ..OptimConfig::default().with_seed(5) };
    for pv in [1.5, 2.0, 3.0] {
        let p = PExponent::new(pv)?;
        // The identity form on ℓ_p^2 and a rank-one element.
        let id = real_matrix(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let r1 = real_matrix(2, 2, &[1.0, 2.0, 1.0, 2.0]);
        let a = nuclear_norm_matrix(&id, p, &cfg)?;
        let b = nuclear_norm_matrix(&r1, p, &cfg)?;
        println!("p = {pv}: ‖I‖_N ∈ [{:.6}, {:.6}], ‖rank one‖_N ∈ [{:.6}, {:.6}]", a.lower, a.upper, b.lower, b.upper);

        let tau = NuclearMatrix::random(p, 2, 2, &mut cfg.rng(1));
        let m = matrix_nuclear_norm(&tau, None, &cfg)?;
        println!("         level-2 element: [{:.6}, {:.6}] ({})", m.lower, m.upper, m.method);

        let d = check_nuclear_duality(2, 2, p, 3, 0.95, &cfg)?;
        println!(
            "         pairing: {} violations, attainment {:.3} (against the upper bound {:.3})",
            d.violations, d.attainment, d.attainment_vs_upper
        );
    }
    Ok(())
}
