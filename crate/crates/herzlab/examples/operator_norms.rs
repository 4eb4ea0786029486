//! Brackets for ‖A‖ on ℓ_p^n and how they compare with closed forms.
use herzlab::linalg::{random_matrix, real_matrix};
use herzlab::pnorm::{opnorm_estimate, opnorm_exact};
use herzlab::{OptimConfig, PExponent};

fn main() -> herzlab::Result<()> {
    let cfg = OptimConfig::default().with_seed(1);
    let a = real_matrix(2, 2, &[1.0, 2.0, -1.0, 3.0]);
    for token in ["1", "1.5", "2", "3", "inf"] {
        let p = PExponent::parse(token)?;
        let e = opnorm_estimate(&a, p, &cfg)?;
        let exact = if p.has_closed_form() { format!("{:.10}", opnorm_exact(&a, p)?) } else { "-".into() };
        println!(
            "p = {token:>3}: [{:.10}, {:.10}]  certificate {:<18} closed form {exact}",
            e.lower,
            e.upper,
            e.upper_certificate.as_str()
        );
    }

    // A random complex 5×5 matrix: wider matrices get looser certified uppers.
    let b = random_matrix(5, 5, &mut cfg.rng(7));
    let e = opnorm_estimate(&b, PExponent::new(3.0)?, &cfg)?;
    println!("5×5 complex, p = 3: [{:.6}, {:.6}] via {}", e.lower, e.upper, e.method);
    Ok(())
}
