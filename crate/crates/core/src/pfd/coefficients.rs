//! Time-independent combinatorial coefficients of the MooN availability sum.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::model::MAX_COMPONENTS;

/// Exact binomial coefficient C(n, k); zero when k > n.
pub fn binomial(n: u32, k: u32) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for j in 0..k {
        // exact at every step: acc * (n - j) is divisible by (j + 1)
        acc = acc * (n - j) as i128 / (j + 1) as i128;
    }
    acc
}

/// S(M, N, x) = sum_{k=M}^{x} C(N, x) C(x, k) (-1)^(x-k), in exact integer
/// arithmetic. The MooN availability is sum_x S(M, N, x) A_e^x.
pub fn s_coefficient(m: u32, n: u32, x: u32) -> Result<i128> {
    if m < 1 || m > x || x > n || n > MAX_COMPONENTS {
        return Err(Error::invalid(format!(
            "S(M, N, x) requires 1 <= M <= x <= N <= {MAX_COMPONENTS}, got M={m}, N={n}, x={x}"
        )));
    }
    let cnx = binomial(n, x);
    let sum: i128 = (m..=x)
        .map(|k| {
            let sign = if (x - k).is_multiple_of(2) { 1 } else { -1 };
            sign * binomial(x, k)
        })
        .sum();
    Ok(cnx * sum)
}

/// Highest power kept in the small-hazard moment expansion.
pub(crate) const MAX_MOMENT_ORDER: usize = 160;

/// Moment tables keyed by `(M, N)`.
type MomentCache = Mutex<HashMap<(u32, u32), Arc<[f64]>>>;

/// Coefficients of one MooN architecture, ready for floating-point use.
#[derive(Debug, Clone)]
pub(crate) struct Coefficients {
    pub m: u32,
    pub n: u32,
    /// `(x, S(M, N, x))` for x = M..=N.
    pub terms: Vec<(u32, f64)>,
}

impl Coefficients {
    pub fn new(m: u32, n: u32) -> Self {
        let terms = (m..=n)
            .map(|x| {
                let s = s_coefficient(m, n, x).expect("validated architecture");
                (x, s as f64)
            })
            .collect();
        Coefficients { m, n, terms }
    }

    /// Moments mu_k = sum_x S(M, N, x) x^k for k = 0..=MAX_MOMENT_ORDER.
    ///
    /// mu_0 = 1 and mu_k = 0 for 0 < k < N - M + 1. They are evaluated in
    /// arbitrary precision and cached per architecture.
    pub fn moments(&self) -> Arc<[f64]> {
        static CACHE: OnceLock<MomentCache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().unwrap().get(&(self.m, self.n)) {
            return hit.clone();
        }
        let moments: Arc<[f64]> = compute_moments(self.m, self.n).into();
        cache
            .lock()
            .unwrap()
            .entry((self.m, self.n))
            .or_insert(moments)
            .clone()
    }
}

fn compute_moments(m: u32, n: u32) -> Vec<f64> {
    let coeffs: Vec<(BigInt, BigInt)> = (m..=n)
        .map(|x| {
            (
                BigInt::from(x),
                BigInt::from(s_coefficient(m, n, x).expect("validated architecture")),
            )
        })
        .collect();
    let mut powers: Vec<BigInt> = coeffs.iter().map(|(_, s)| s.clone()).collect();
    let mut out = Vec::with_capacity(MAX_MOMENT_ORDER + 1);
    for _ in 0..=MAX_MOMENT_ORDER {
        let mu: BigInt = powers.iter().sum();
        out.push(mu.to_f64().unwrap_or(f64::INFINITY));
        for (p, (x, _)) in powers.iter_mut().zip(&coeffs) {
            *p *= x;
        }
    }
    out
}
