//! Seeded random polynomials for the randomized identity suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{ChartRef, Scalar, VarId};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Up to `terms` monomials of total degree at most `deg` in the chart's
    /// non-periodic coordinates, with small integer coefficients.
    pub fn poly(&mut self, chart: &ChartRef, deg: u32, terms: usize) -> Scalar {
        let vars: Vec<_> = chart.coords().iter().filter(|c| !c.periodic).map(|c| c.var).collect();
        self.poly_in(&vars, deg, terms)
    }

    /// Same as `poly` over an explicit variable list.
    pub fn poly_in(&mut self, vars: &[VarId], deg: u32, terms: usize) -> Scalar {
        let mut out = Scalar::zero();
        for _ in 0..terms {
            let c = self.rng.gen_range(-3i64..=3);
            if c == 0 {
                continue;
            }
            let d = self.rng.gen_range(0..=deg);
            let mut m = Scalar::from_int(c);
            for _ in 0..d {
                if vars.is_empty() {
                    break;
                }
                let v = vars[self.rng.gen_range(0..vars.len())];
                m = &m * &Scalar::var(v);
            }
            out = &out + &m;
        }
        out
    }

    /// Like `poly` but never zero.
    pub fn nonzero_poly(&mut self, chart: &ChartRef, deg: u32, terms: usize) -> Scalar {
        loop {
            let p = self.poly(chart, deg, terms);
            if !p.is_zero() {
                return p;
            }
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}
