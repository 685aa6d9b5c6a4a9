use rand::Rng as _;

use crate::rng::Rng;

/// Random draws that collapse to their modal value in deterministic mode.
pub(crate) struct Draw<'a> {
    rng: &'a mut Rng,
    deterministic: bool,
}

impl<'a> Draw<'a> {
    pub fn new(rng: &'a mut Rng, deterministic: bool) -> Self {
        Draw { rng, deterministic }
    }

    /// Deterministic mode fires iff `p > 0.5`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if self.deterministic {
            return p > 0.5;
        }
        self.rng.gen::<f64>() < p
    }

    /// Uniform on `[lo, hi)`; the midpoint in deterministic mode.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if self.deterministic || hi <= lo {
            return 0.5 * (lo + hi);
        }
        self.rng.gen_range(lo..hi)
    }

    /// Index drawn proportionally to `weights`; the first largest weight in
    /// deterministic mode.
    pub fn weighted(&mut self, weights: &[f64]) -> usize {
        if self.deterministic {
            let mut best = 0;
            for (i, &w) in weights.iter().enumerate() {
                if w > weights[best] {
                    best = i;
                }
            }
            return best;
        }
        let total: f64 = weights.iter().sum();
        let mut u = self.rng.gen::<f64>() * total;
        for (i, &w) in weights.iter().enumerate() {
            if u < w {
                return i;
            }
            u -= w;
        }
        weights.len() - 1
    }

    /// Uniform index below `n`; the middle index in deterministic mode.
    pub fn index(&mut self, n: usize) -> usize {
        if self.deterministic {
            return n / 2;
        }
        self.rng.gen_range(0..n)
    }
}
