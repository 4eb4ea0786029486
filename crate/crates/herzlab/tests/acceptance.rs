//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.
//!
//! Tolerances are the pinned ones. Budgets are the library defaults unless a
//! criterion says otherwise next to its trial loop.

use herzlab::group::{FiniteGroup, GroupFunction};
use herzlab::herz::{ap_norm, check_quasi_expectation, coproduct_residual, structure_norms};
use herzlab::linalg::{random_matrix, C64};
use herzlab::multipliers::{cb_multiplier_norm, cross_multiplier_check, herz_schur_norm, m0_upper_bound, multiplier_norm};
use herzlab::nuclear::check_nuclear_duality;
use herzlab::opspace::{check_axioms, functional_levels, ConcretePOpSpace};
use herzlab::pnorm::{opnorm_bruteforce, opnorm_estimate, opnorm_exact};
use herzlab::projective::{check_ap_tensor, check_nuclear_tensor};
use herzlab::report::Verdict;
use herzlab::{NormEstimate, OptimConfig, PExponent};
use rand::Rng;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn pe(p: f64) -> PExponent {
    PExponent::new(p).unwrap()
}

fn cfg(seed: u64) -> OptimConfig {
    OptimConfig::default().with_seed(seed)
}

/// Σ_χ |û(χ)| with û(χ) = |G|⁻¹ Σ_s u(s) conj χ(s), from an explicit DFT.
fn fourier_l1_cyclic(u: &GroupFunction) -> f64 {
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

fn criterion_1() -> Outcome {
    let c = OptimConfig { restarts: 8, max_iters: 200, ..cfg(101) };
    let brute_cfg = OptimConfig { grid_density: 24, ..cfg(102) };
    let mut rng = c.rng(1);
    let (mut exact_bad, mut brute_bad, mut brute_checked) = (0, 0, 0);
    let mut worst_exact: f64 = 0.0;
    let mut worst_brute: f64 = f64::INFINITY;
    let start = Instant::now();
    for t in 0..1000 {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a = random_matrix(m, n, &mut rng);
        for p in [PExponent::one(), PExponent::two(), PExponent::infinity()] {
            let e = opnorm_estimate(&a, p, &c).unwrap();
            let x = opnorm_exact(&a, p).unwrap();
            let dev = (e.lower - x).abs().max((e.upper - x).abs());
            worst_exact = worst_exact.max(dev);
            if dev > 1e-8 {
                exact_bad += 1;
            }
        }
        // Brute force needs at most three columns; a quarter of the
        // matrices with n ≤ 3 are checked at every non-closed exponent.
        if n <= 3 {
            for p in [1.3, 1.5, 3.0, 4.0] {
                let tc = c.fork(t as u64);
                let e = opnorm_estimate(&a, pe(p), &tc).unwrap();
                let b = opnorm_bruteforce(&a, pe(p), &brute_cfg).unwrap();
                brute_checked += 1;
                worst_brute = worst_brute.min(e.lower - b);
                if e.lower < b - 1e-6 || !e.is_consistent() {
                    brute_bad += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: exact_bad == 0 && brute_bad == 0 && secs <= 300.0,
        detail: format!(
            "closed-form mismatches {exact_bad} (worst {worst_exact:.1e}); brute-force shortfalls {brute_bad}/{brute_checked} (min lower−brute {worst_brute:.1e}); {secs:.0}s"
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = cfg(201).rng(0);
    let (mut trials, mut viol, mut undecided) = (0, 0, 0);
    let mut k = 0;
    for p in [1.5, 2.0, 3.0] {
        for sub in [false, true] {
            let x = if sub {
                ConcretePOpSpace::random_subspace(pe(p), 2, 2, &mut rng)
            } else {
                ConcretePOpSpace::full(pe(p), 2)
            };
            // 6 configurations × 34 trials ≥ 200.
            let c = OptimConfig { restarts: 8, max_iters: 200, ..cfg(210 + k) };
            k += 1;
            let r = check_axioms(&x, 34, &c).unwrap();
            trials += r.trials;
            viol += r.d_infinity_violations + r.m_p_violations;
            undecided += r.undecided;
        }
    }
    Outcome { pass: viol == 0 && trials >= 200, detail: format!("{trials} trials, {viol} violations, {undecided} undecided") }
}

fn criterion_3() -> Outcome {
    let mut rng = cfg(301).rng(0);
    let (mut worst_dev, mut worst_ratio): (f64, f64) = (0.0, 0.0);
    let mut bad = 0;
    for t in 0..50 {
        let p = [1.5, 2.0, 3.0][t % 3];
        let x = if t % 2 == 0 {
            ConcretePOpSpace::full(pe(p), 2)
        } else {
            ConcretePOpSpace::random_subspace(pe(p), 2, 2, &mut rng)
        };
        let mu: Vec<C64> = (0..x.dim()).map(|_| herzlab::linalg::gaussian(&mut rng)).collect();
        let r = functional_levels(&x, &mu, 3, &cfg(310 + t as u64)).unwrap();
        worst_dev = worst_dev.max(r.deviation);
        if r.deviation > (2.0 * r.width).max(1e-12) || r.deviation > 1e-3 {
            bad += 1;
        }
        if r.width > 0.0 {
            worst_ratio = worst_ratio.max(r.deviation / r.width);
        }
    }
    Outcome {
        pass: bad == 0,
        detail: format!("50 functionals, {bad} failures, max deviation {worst_dev:.1e}, max deviation/width {worst_ratio:.2}"),
    }
}

fn criterion_4() -> Outcome {
    let mut bad = 0;
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let g = FiniteGroup::cyclic(n);
        let mut rng = cfg(400 + n as u64).rng(0);
        for t in 0..20 {
            let u = GroupFunction::random(&g, &mut rng);
            let e = ap_norm(&g, &u, PExponent::two(), &cfg(t)).unwrap();
            let f = fourier_l1_cyclic(&u);
            worst = worst.max((e.lower - f).abs()).max((e.upper - f).abs());
            if !e.contains(f, 1e-4) {
                bad += 1;
            }
        }
    }
    Outcome { pass: bad == 0, detail: format!("Z_2..Z_8 × 20 functions, {bad} misses, worst deviation {worst:.1e}") }
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for g in FiniteGroup::all_builtin() {
        for p in [1.5, 2.0, 3.0] {
            for (name, u) in [("delta_e", GroupFunction::delta(&g, g.identity())), ("ones", GroupFunction::ones(&g))] {
                let e = ap_norm(&g, &u, pe(p), &cfg(500)).unwrap();
                count += 1;
                if (e.lower - 1.0).abs() > 1e-6 || (e.upper - 1.0).abs() > 1e-6 {
                    bad.push(format!("{} p={p} {name} [{}, {}]", g.name(), e.lower, e.upper));
                }
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{count} cases, failures: {bad:?}") }
}

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for g in FiniteGroup::all_builtin().into_iter().filter(|g| g.order() <= 8) {
        for p in [1.5, 2.0, 3.0] {
            let r = check_quasi_expectation(&g, pe(p), 3, 4, &cfg(600)).unwrap();
            let level_max = r.levels.iter().map(|l| l.upper).fold(0.0, f64::max);
            worst = worst.max(r.idempotence).max(r.commutation);
            let ok = r.idempotence <= 1e-12
                && r.commutation <= 1e-12
                && r.fixes_translations
                && r.levels.len() == 3
                && level_max <= 1.0 + 1e-6
                && r.levels.iter().all(NormEstimate::is_consistent);
            if !ok {
                bad.push(format!("{} p={p}", g.name()));
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("worst residual {worst:.1e}, failures: {bad:?}") }
}

fn criterion_7() -> Outcome {
    let (mut order_bad, mut overlap_bad, mut runs) = (0, 0, 0);
    let mut worst_gap: f64 = 0.0;
    for g in [FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4)] {
        for p in [1.5, 3.0] {
            let mut rng = cfg(700 + g.order() as u64).rng(p as u64);
            for t in 0..10 {
                let a: Vec<GroupFunction> = (0..4).map(|_| GroupFunction::random(&g, &mut rng)).collect();
                let r = structure_norms(&g, &a, 2, pe(p), None, &cfg(710 + t)).unwrap();
                runs += 1;
                if r.dual.lower > r.quotient.upper + 1e-6 {
                    order_bad += 1;
                }
                if !r.dual.overlaps(&r.quotient, 5e-2) {
                    overlap_bad += 1;
                }
                worst_gap = worst_gap.max(r.dual.separation(&r.quotient));
            }
        }
    }
    Outcome {
        pass: order_bad == 0 && overlap_bad == 0,
        detail: format!("{runs} runs, order violations {order_bad}, non-overlapping {overlap_bad}, worst separation {worst_gap:.1e}"),
    }
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for p in [1.5, 2.0, 3.0] {
        let r = check_nuclear_duality(2, 2, pe(p), 20, 0.95, &cfg(800)).unwrap();
        pass &= r.violations == 0 && r.attainment >= 0.95;
        parts.push(format!(
            "p={p}: violations {} attainment {:.3} (vs upper {:.3})",
            r.violations, r.attainment, r.attainment_vs_upper
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_9() -> Outcome {
    let mut bad = 0;
    let mut rng = cfg(901).rng(0);
    for p in [1.5, 2.0, 3.0] {
        for t in 0..10 {
            let w = random_matrix(4, 4, &mut rng);
            let r = check_nuclear_tensor(&w, 2, 2, pe(p), 5e-2, &cfg(910 + t)).unwrap();
            if r.verdict != Verdict::Pass {
                bad += 1;
            }
        }
    }
    Outcome { pass: bad == 0, detail: format!("30 elements, {bad} non-overlapping") }
}

fn criterion_10() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for g in FiniteGroup::all_builtin().into_iter().filter(|g| g.order() <= 8) {
        n += 1;
        if coproduct_residual(&g) != 0.0 {
            bad.push(g.name().to_string());
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{n} groups, mismatches: {bad:?}") }
}

fn criterion_11() -> Outcome {
    let (mut overlap_bad, mut char_bad, mut runs) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    for g in [FiniteGroup::cyclic(4), FiniteGroup::symmetric(3)] {
        for p in [1.5, 2.0, 3.0] {
            let p = pe(p);
            let mut rng = cfg(1100 + g.order() as u64).rng((p.p() * 10.0) as u64);
            let mut fns: Vec<(bool, GroupFunction)> = g.characters().into_iter().map(|c| (true, c)).collect();
            fns.extend((0..10).map(|_| (false, GroupFunction::random(&g, &mut rng))));
            for (t, (is_char, u)) in fns.iter().enumerate() {
                let c = OptimConfig { restarts: 8, max_iters: 200, ..cfg(1110 + t as u64) };
                let m = multiplier_norm(&g, u, p, &c).unwrap();
                let cb = cb_multiplier_norm(&g, u, p, 3, &c).unwrap().estimate;
                let fs = herz_schur_norm(&g, u, p, &c).unwrap();
                let (m0, _) = m0_upper_bound(&g, u, p, None, &c).unwrap();
                let m0 = NormEstimate::new(m.lower.min(m0), m0, herzlab::Certificate::Factorization, "m0");
                let all = [&m, &cb, &fs, &m0];
                runs += 1;
                for i in 0..4 {
                    for j in i + 1..4 {
                        worst = worst.max(all[i].separation(all[j]));
                        if !all[i].overlaps(all[j], 5e-2) {
                            overlap_bad += 1;
                        }
                    }
                }
                if *is_char && all.iter().any(|e| (e.lower - 1.0).abs() > 1e-6 || (e.upper - 1.0).abs() > 1e-6) {
                    char_bad += 1;
                }
            }
        }
    }
    Outcome {
        pass: overlap_bad == 0 && char_bad == 0,
        detail: format!("{runs} functions, non-overlapping pairs {overlap_bad}, characters off 1: {char_bad}, worst separation {worst:.1e}"),
    }
}

fn criterion_12() -> Outcome {
    let (g, h) = (FiniteGroup::cyclic(2), FiniteGroup::cyclic(3));
    let mut bad = 0;
    let mut rng = cfg(1201).rng(0);
    for p in [1.5, 3.0] {
        for t in 0..10 {
            let u = GroupFunction::random(&g, &mut rng);
            let r = cross_multiplier_check(&g, &u, &h, pe(p), 5e-2, &cfg(1210 + t)).unwrap();
            if r.verdict != Verdict::Pass {
                bad += 1;
            }
        }
    }
    Outcome { pass: bad == 0, detail: format!("20 trials, {bad} violations") }
}

fn criterion_13() -> Outcome {
    let g = FiniteGroup::cyclic(2);
    let mut bad = 0;
    let mut rng = cfg(1301).rng(0);
    for p in [1.5, 2.0, 3.0] {
        for t in 0..10 {
            let u = GroupFunction::random(&g, &mut rng);
            let v = GroupFunction::random(&g, &mut rng);
            let r = check_ap_tensor(&g, &g, &u, &v, pe(p), 5e-2, &cfg(1310 + t)).unwrap();
            if r.verdict != Verdict::Pass {
                bad += 1;
            }
        }
    }
    Outcome { pass: bad == 0, detail: format!("30 pairs, {bad} non-overlapping") }
}

fn criterion_14() -> Outcome {
    let dir = std::env::temp_dir().join(format!("herzlab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let start = Instant::now();
    let mut reports = Vec::new();
    let mut codes = Vec::new();
    for k in 0..2 {
        let out = dir.join(format!("suite{k}.json"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_herzlab"))
            .args(["group-suite", "--group", "S_3", "--p", "3", "--seed", "7", "--single-lane", "--output"])
            .arg(&out)
            .env_remove("HERZLAB_SEED")
            .status()
            .unwrap();
        codes.push(status.code());
        let text = std::fs::read_to_string(&out).unwrap_or_default();
        reports.push(text.lines().filter(|l| !l.trim_start().starts_with("\"wall_time\"")).collect::<Vec<_>>().join("\n"));
    }
    let secs = start.elapsed().as_secs_f64();
    let _ = std::fs::remove_dir_all(&dir);
    let identical = !reports[0].is_empty() && reports[0] == reports[1];
    Outcome {
        pass: identical && secs <= 900.0 && codes.iter().all(|c| *c == Some(0)),
        detail: format!("identical {identical}, exit codes {codes:?}, {secs:.1}s for both runs"),
    }
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("exact-oracle agreement", criterion_1),
        ("matrix norm axioms", criterion_2),
        ("functional flatness", criterion_3),
        ("Fourier oracle", criterion_4),
        ("unit values", criterion_5),
        ("averaging projection", criterion_6),
        ("structure agreement", criterion_7),
        ("nuclear duality", criterion_8),
        ("finite nuclear tensor identity", criterion_9),
        ("coproduct", criterion_10),
        ("multiplier collapse", criterion_11),
        ("cross-group bound", criterion_12),
        ("Herz tensor identity", criterion_13),
        ("CLI determinism", criterion_14),
    ];
    let only: Option<usize> = std::env::var("HERZLAB_CRITERION").ok().and_then(|s| s.parse().ok());
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
