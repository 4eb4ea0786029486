//! A group given by its Cayley table, and a JSON report for it.
use herzlab::group::{FiniteGroup, GroupFunction};
use herzlab::herz::{ap_norm, coproduct_residual};
use herzlab::report::{ReportRecord, Verdict};
use herzlab::{OptimConfig, PExponent};

// The Klein four-group.
const TABLE: &str = r#"{"name": "V_4", "order": 4, "identity": 0,
  "table": [0,1,2,3, 1,0,3,2, 2,3,0,1, 3,2,1,0]}"#;

fn main() -> herzlab::Result<()> {
    let g = FiniteGroup::from_json(TABLE)?;
    println!("{}: order {}, abelian {}, {} characters", g.name(), g.order(), g.is_abelian(), g.characters().len());

    let cfg = OptimConfig::default().with_seed(19);
    let mut rec = ReportRecord::new("custom-group", &serde_json::json!({"table": TABLE}), cfg.seed);
    let u = GroupFunction::random(&g, &mut cfg.rng(0));
    rec.estimate("ap_norm", ap_norm(&g, &u, PExponent::new(3.0)?, &cfg)?);
    let residual = coproduct_residual(&g);
    rec.residual("coproduct", residual);
    rec.verdict(if residual == 0.0 { Verdict::Pass } else { Verdict::Fail });
    print!("{}", rec.to_json());

    // A table that is not a group is rejected with the failing row.
    let broken = r#"{"order": 3, "identity": 0, "table": [0,1,2, 1,1,0, 2,0,1]}"#;
    println!("broken table: {}", FiniteGroup::from_json(broken).unwrap_err());
    Ok(())
}
