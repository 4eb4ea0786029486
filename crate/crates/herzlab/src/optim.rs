//! Derivative-free local search used by the bracket optimizers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Climb {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// (1+1) evolution strategy with the one-fifth success rule, maximizing `f`.
///
/// Alternates full Gaussian steps with single-coordinate moves. Stops when the
/// step falls below `min_step` or after `budget` evaluations.
pub fn climb<F>(x0: Vec<f64>, mut f: F, budget: usize, step0: f64, min_step: f64, rng: &mut ChaCha8Rng) -> Climb
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut fx = finite_or_neg(f(&x));
    let mut evals = 1;
    if n == 0 {
        return Climb { x, value: fx, evals };
    }
    let mut step = step0;
    let mut trial = x.clone();
    while evals < budget && step > min_step {
        trial.copy_from_slice(&x);
        if evals % 2 == 0 {
            let scale = step / (n as f64).sqrt();
            for t in trial.iter_mut() {
                *t += scale * rng.sample::<f64, _>(StandardNormal);
            }
        } else {
            let k = rng.gen_range(0..n);
            trial[k] += if rng.gen::<bool>() { step } else { -step };
        }
        let ft = finite_or_neg(f(&trial));
        evals += 1;
        if ft > fx {
            std::mem::swap(&mut x, &mut trial);
            fx = ft;
            step *= 1.5;
        } else {
            step *= 0.904;
        }
    }
    Climb { x, value: fx, evals }
}

fn finite_or_neg(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximizes a ratio-type objective in two stages from each seed: CMA-ES on a
/// cheap proxy (built per run by `proxy`, so it can carry warm starts), then
/// a local polish against `strict`. The two runs with the best strict values
/// are scored with `certify`, and the better certified point wins.
pub fn staged_search<P, FP, S, C>(
    seeds: &[Vec<f64>],
    proxy: FP,
    strict: S,
    certify: C,
    budget: usize,
    cfg: &crate::estimate::OptimConfig,
    stream: u64,
) -> (f64, Vec<f64>, u64)
where
    P: FnMut(&[f64]) -> f64,
    FP: Fn() -> P + Sync,
    S: Fn(&[f64]) -> f64 + Sync,
    C: Fn(&[f64]) -> f64 + Sync,
{
    let runs = crate::estimate::map_indexed(seeds.len(), cfg.single_lane, |k| {
        let mut rng = cfg.rng(stream + k as u64);
        let x0 = seeds[k].clone();
        let mut best = (strict(&x0), x0.clone());
        if budget == 0 {
            return (best.0, best.1, 0u64);
        }
        let scale = (x0.iter().map(|v| v * v).sum::<f64>() / x0.len().max(1) as f64).sqrt();
        let sigma = if scale > 0.0 { 0.3 * scale } else { 0.3 };
        let first = cma(x0, proxy(), budget, sigma, 1e-9 * sigma, &mut rng);
        let second = climb(first.x, &strict, (budget / 3).max(20), 0.05, 1e-9, &mut rng);
        if second.value > best.0 {
            best = (second.value, second.x);
        }
        (best.0, best.1, (first.evals + second.evals) as u64)
    });
    let evals = runs.iter().map(|r| r.2).sum();
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| runs[b].0.total_cmp(&runs[a].0));
    let mut out = (f64::NEG_INFINITY, seeds.first().cloned().unwrap_or_default());
    for &k in order.iter().take(2) {
        let v = certify(&runs[k].1);
        if v > out.0 {
            out = (v, runs[k].1.clone());
        }
    }
    (out.0, out.1, evals)
}

/// CMA-ES maximizer with rank-one and rank-μ covariance updates.
///
/// Returns the best point seen. Stops after `budget` evaluations or once the
/// search distribution has shrunk below `min_step` in every direction.
pub fn cma<F>(x0: Vec<f64>, mut f: F, budget: usize, sigma0: f64, min_step: f64, rng: &mut ChaCha8Rng) -> Climb
where
    F: FnMut(&[f64]) -> f64,
{
    use nalgebra::{DMatrix, DVector};
    let n = x0.len();
    let f0 = finite_or_neg(f(&x0));
    let mut best = Climb { x: x0.clone(), value: f0, evals: 1 };
    if n == 0 || budget <= 1 {
        return best;
    }
    let nf = n as f64;
    let lambda = 4 + (3.0 * nf.ln()).floor() as usize;
    let mu = lambda / 2;
    let raw: Vec<f64> = (0..mu).map(|i| (mu as f64 + 0.5).ln() - ((i + 1) as f64).ln()).collect();
    let wsum: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|v| v / wsum).collect();
    let mu_eff = 1.0 / w.iter().map(|v| v * v).sum::<f64>();
    let cs = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
    let ds = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
    let cc = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
    let c1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
    let cmu = (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
    let chi = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

    let mut mean = DVector::from_vec(x0);
    let mut sigma = sigma0;
    let mut cov = DMatrix::<f64>::identity(n, n);
    let mut b = DMatrix::<f64>::identity(n, n);
    let mut dvec = DVector::<f64>::from_element(n, 1.0);
    let mut ps = DVector::<f64>::zeros(n);
    let mut pc = DVector::<f64>::zeros(n);
    let mut gen = 0usize;
    while best.evals + lambda <= budget {
        gen += 1;
        let mut pop: Vec<(f64, DVector<f64>)> = Vec::with_capacity(lambda);
        for _ in 0..lambda {
            let z = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal));
            let y = &b * dvec.component_mul(&z);
            let x = &mean + &y * sigma;
            let v = finite_or_neg(f(x.as_slice()));
            best.evals += 1;
            if v > best.value {
                best.value = v;
                best.x = x.as_slice().to_vec();
            }
            pop.push((v, y));
        }
        pop.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut yw = DVector::<f64>::zeros(n);
        for i in 0..mu {
            yw += &pop[i].1 * w[i];
        }
        mean += &yw * sigma;
        // C^{-1/2} yw
        let inv_sqrt = &b * DMatrix::from_diagonal(&dvec.map(|v| 1.0 / v)) * b.transpose();
        ps = &ps * (1.0 - cs) + (&inv_sqrt * &yw) * (cs * (2.0 - cs) * mu_eff).sqrt();
        let hs = ps.norm() / (1.0 - (1.0 - cs).powi(2 * gen as i32)).sqrt() / chi < 1.4 + 2.0 / (nf + 1.0);
        pc = &pc * (1.0 - cc) + &yw * if hs { (cc * (2.0 - cc) * mu_eff).sqrt() } else { 0.0 };
        let mut rank_mu = DMatrix::<f64>::zeros(n, n);
        for i in 0..mu {
            rank_mu += &pop[i].1 * pop[i].1.transpose() * w[i];
        }
        let delta = if hs { 0.0 } else { cc * (2.0 - cc) };
        cov = &cov * (1.0 - c1 - cmu + c1 * delta) + &pc * pc.transpose() * c1 + rank_mu * cmu;
        sigma *= ((cs / ds) * (ps.norm() / chi - 1.0)).exp();
        if gen % (1 + n / 10) == 0 {
            cov = (&cov + cov.transpose()) * 0.5;
            let eig = nalgebra::SymmetricEigen::new(cov.clone());
            b = eig.eigenvectors;
            dvec = eig.eigenvalues.map(|v| v.max(1e-30).sqrt());
        }
        let spread = sigma * dvec.max();
        if !spread.is_finite() || spread < min_step {
            break;
        }
    }
    best
}
