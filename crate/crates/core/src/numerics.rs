//! Small numeric helpers shared across modules.

/// Compensated (Kahan) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Polynomial (Neville) extrapolation of `f(h) -> f(0)` from samples at
/// decreasing step sizes. Returns the best estimate and the difference
/// between the last two extrapolation orders as an error indicator.
pub fn richardson(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len();
    assert!(n >= 2, "need at least two samples to extrapolate");
    let mut table: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let hs: Vec<f64> = samples.iter().map(|&(h, _)| h).collect();
    let mut prev_best = table[n - 1];
    let mut last_diff = f64::INFINITY;
    for level in 1..n {
        for i in (level..n).rev() {
            let h_hi = hs[i - level];
            let h_lo = hs[i];
            table[i] = (h_hi * table[i] - h_lo * table[i - 1]) / (h_hi - h_lo);
        }
        last_diff = (table[n - 1] - prev_best).abs();
        prev_best = table[n - 1];
    }
    (table[n - 1], last_diff)
}
