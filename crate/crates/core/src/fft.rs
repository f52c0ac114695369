//! Minimal power-of-two FFT used by the spectral calculus.
//!
//! Grids are restricted to powers of two, so a plain iterative radix-2
//! transform with precomputed twiddle factors is exact fit. The forward
//! transform is the unnormalized DFT `X_k = Σ_j x_j e^{-2πijk/n}`; the
//! inverse divides by `n`. Tables are built once per grid and shared, so
//! transforms allocate nothing and are safe to call concurrently.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Precomputed bit-reversal permutation and twiddle factors for one size.
#[derive(Debug)]
pub(crate) struct FftPlan {
    n: usize,
    bitrev: Vec<u32>,
    /// `e^{-2πi j / n}` for `j = 0 .. n/2`.
    twiddle: Vec<Complex64>,
}

impl FftPlan {
    /// Build a plan for transforms of length `n` (a power of two).
    pub(crate) fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let bits = n.trailing_zeros();
        let bitrev = (0..n as u32)
            .map(|i| i.reverse_bits() >> (32 - bits))
            .collect();
        let step = -2.0 * core::f64::consts::PI / n as f64;
        let twiddle = (0..n / 2)
            .map(|j| {
                let a = step * j as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        FftPlan { n, bitrev, twiddle }
    }

    /// In-place forward DFT (unnormalized).
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// In-place inverse DFT (scaled by `1/n`).
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.n as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], invert: bool) {
        let n = self.n;
        assert_eq!(data.len(), n, "plan length mismatch");
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for block in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddle[k * stride];
                    if invert {
                        w = w.conj();
                    }
                    let a = data[block + k];
                    let b = data[block + k + half] * w;
                    data[block + k] = a + b;
                    data[block + k + half] = a - b;
                }
            }
            len *= 2;
        }
    }
}
