//! Oracles shared by the integration suites. Nothing here calls the
//! closed-form PFD routines under test.

#![allow(dead_code)]

use pfd_core::pfd::system_unavailability_direct_in;
use pfd_core::{SystemSpec, TestPolicy};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod integration to relative tolerance `rel_tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (whole, err) = gauss_kronrod(&f, a, b);
    let mut pieces = vec![(a, b, whole, err)];
    for _ in 0..2000 {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= rel_tol * total.abs() || total == 0.0 {
            return total;
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (l, le) = gauss_kronrod(&f, lo, mid);
        let (r, re) = gauss_kronrod(&f, mid, hi);
        pieces.push((lo, mid, l, le));
        pieces.push((mid, hi, r, re));
    }
    pieces.iter().map(|p| p.2).sum()
}

/// Mean of the binomial-form unavailability over interval `i`, by quadrature.
pub fn quadrature_pfd(spec: &SystemSpec, policy: &TestPolicy, i: usize) -> f64 {
    let s = policy.schedule();
    let (a, b) = (s.start(i), s.end(i));
    integrate(
        |t| system_unavailability_direct_in(spec, policy, i, t),
        a,
        b,
        1e-13,
    ) / (b - a)
}

/// Randomized configuration: `M <= N <= max_n`, `lambda tau` in `(0, max_lt]`,
/// `E` in `[0, 1]`, `1..=max_tests` tests at random instants of `[0, tau]`.
pub struct RandomConfig {
    pub spec: SystemSpec,
    pub policy: TestPolicy,
}

pub fn random_configs(
    seed: u64,
    count: usize,
    max_n: u32,
    max_lt: f64,
    max_tests: usize,
) -> Vec<RandomConfig> {
    let mut rng = StdRng::seed_from_u64(seed);
    let tau = 8760.0;
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            let m = rng.random_range(1..=n);
            let lt: f64 = max_lt * (1.0 - rng.random::<f64>());
            let e: f64 = rng.random();
            let tests = rng.random_range(1..=max_tests);
            let mut times: Vec<f64> = (1..tests).map(|_| tau * rng.random::<f64>()).collect();
            times.sort_by(f64::total_cmp);
            times.dedup();
            times.retain(|&t| t > 0.0 && t < tau);
            times.push(tau);
            RandomConfig {
                spec: SystemSpec::new(m, n, lt / tau).unwrap(),
                policy: TestPolicy::from_times(e, times).unwrap(),
            }
        })
        .collect()
}

/// Exact binomial draw by summing Bernoulli trials.
pub fn binomial_draw(rng: &mut StdRng, trials: u64, p: f64) -> u64 {
    (0..trials).filter(|_| rng.random::<f64>() < p).count() as u64
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
