use rayon::prelude::*;

use crate::rng::{derive_seed, stream, Stream};

const BLOCK: usize = 1 << 14;

/// Sample mean with a three-standard-error half width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub half_width: f64,
}

impl McEstimate {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width
    }
}

/// Mean of `f` over `n` draws. Draws are split into fixed blocks, each with
/// its own stream derived from `seed`; block sums are combined in block
/// order, so the result does not depend on the thread count.
pub(crate) fn mc_mean<F>(n: usize, seed: u64, f: F) -> McEstimate
where
    F: Fn(&mut Stream) -> f64 + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(derive_seed(seed, &[b as u64]));
            let len = BLOCK.min(n - b * BLOCK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let v = f(&mut rng);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let nf = n as f64;
    let mean = s1 / nf;
    let var = if n > 1 { ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
    McEstimate {
        mean,
        half_width: 3.0 * (var / nf).sqrt(),
    }
}
