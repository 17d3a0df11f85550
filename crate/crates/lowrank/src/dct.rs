//! Orthonormal DCT-II with an O(n log n) fast path for every length.
//!
//! The transform is computed through a same-length complex FFT (even/odd
//! reordering plus a quarter-sample phase twist). Power-of-two lengths use
//! iterative radix-2 Cooley-Tukey; everything else goes through Bluestein's
//! chirp-z reduction to a power-of-two convolution, so no padding of the
//! data itself is ever needed.

use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    #[inline]
    fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    #[inline]
    fn mul(self, o: Complex) -> Complex {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    #[inline]
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }

    #[inline]
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }

    #[inline]
    fn conj(self) -> Complex {
        Complex::new(self.re, -self.im)
    }

    #[inline]
    fn scale(self, s: f64) -> Complex {
        Complex::new(self.re * s, self.im * s)
    }
}

/// e^{-2 pi i k / n}
fn root_of_unity(k: f64, n: f64) -> Complex {
    let angle = -2.0 * PI * k / n;
    Complex::new(angle.cos(), angle.sin())
}

/// In-place iterative radix-2 FFT; `x.len()` must be a power of two.
fn fft_pow2(x: &mut [Complex], inverse: bool) {
    let n = x.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    // bit reversal
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            x.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let angle = sign * 2.0 * PI / len as f64;
        let wlen = Complex::new(angle.cos(), angle.sin());
        let mut i = 0;
        while i < n {
            let mut w = Complex::new(1.0, 0.0);
            for k in 0..len / 2 {
                let even = x[i + k];
                let odd = x[i + k + len / 2].mul(w);
                x[i + k] = even.add(odd);
                x[i + k + len / 2] = even.sub(odd);
                w = w.mul(wlen);
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let inv = 1.0 / n as f64;
        for v in x.iter_mut() {
            *v = v.scale(inv);
        }
    }
}

/// Forward DFT of arbitrary length via Bluestein's algorithm.
fn fft_bluestein(x: &[Complex]) -> Vec<Complex> {
    let n = x.len();
    let m = (2 * n - 1).next_power_of_two();
    // chirp[k] = e^{-pi i k^2 / n}; computed with k^2 mod 2n to keep angles sane
    let chirp: Vec<Complex> = (0..n)
        .map(|k| {
            let kk = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            let angle = -PI * kk / n as f64;
            Complex::new(angle.cos(), angle.sin())
        })
        .collect();
    let mut a = vec![Complex::ZERO; m];
    for k in 0..n {
        a[k] = x[k].mul(chirp[k]);
    }
    let mut b = vec![Complex::ZERO; m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        let c = chirp[k].conj();
        b[k] = c;
        b[m - k] = c;
    }
    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for (ai, bi) in a.iter_mut().zip(&b) {
        *ai = ai.mul(*bi);
    }
    fft_pow2(&mut a, true);
    (0..n).map(|k| a[k].mul(chirp[k])).collect()
}

fn dft(x: &[Complex]) -> Vec<Complex> {
    if x.len().is_power_of_two() {
        let mut y = x.to_vec();
        fft_pow2(&mut y, false);
        y
    } else {
        fft_bluestein(x)
    }
}

/// Orthonormal DCT-II of `x`:
/// y[k] = sqrt(2/n) * a_k * sum_j x[j] cos(pi (2j+1) k / (2n)),
/// with a_0 = 1/sqrt(2) and a_k = 1 otherwise. The matrix is orthogonal.
pub fn dct2_orthonormal(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![x[0]];
    }
    // even/odd reordering: v = [x0, x2, x4, ..., x5, x3, x1]
    let mut v = vec![Complex::ZERO; n];
    let half = n.div_ceil(2);
    for j in 0..half {
        v[j] = Complex::new(x[2 * j], 0.0);
    }
    for j in 0..n / 2 {
        v[n - 1 - j] = Complex::new(x[2 * j + 1], 0.0);
    }
    let big_v = dft(&v);
    let scale = (2.0 / n as f64).sqrt();
    let mut out = vec![0.0; n];
    for k in 0..n {
        // unnormalized coefficient: Re( e^{-i pi k / (2n)} V[k] )
        let w = root_of_unity(k as f64 / 4.0, n as f64);
        let c = w.mul(big_v[k]).re;
        let alpha = if k == 0 { (0.5_f64).sqrt() } else { 1.0 };
        out[k] = scale * alpha * c;
    }
    out
}

/// Naive O(n^2) orthonormal DCT-II; the oracle the fast path is tested against.
#[cfg(test)]
pub fn dct2_orthonormal_naive(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let scale = (2.0 / n as f64).sqrt();
    (0..n)
        .map(|k| {
            let alpha = if k == 0 { (0.5_f64).sqrt() } else { 1.0 };
            let sum: f64 = x
                .iter()
                .enumerate()
                .map(|(j, &v)| v * (PI * (2 * j + 1) as f64 * k as f64 / (2.0 * n as f64)).cos())
                .sum();
            scale * alpha * sum
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn fast_matches_naive_across_lengths() {
        for &n in &[1usize, 2, 3, 5, 8, 16, 37, 64, 100, 128, 200] {
            let mut s = Stream::new(n as u64, 0);
            let x: Vec<f64> = (0..n).map(|_| s.next_normal()).collect();
            let fast = dct2_orthonormal(&x);
            let naive = dct2_orthonormal_naive(&x);
            let err: f64 = fast
                .iter()
                .zip(&naive)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-11, "n = {n}, err = {err}");
        }
    }

    #[test]
    fn transform_is_an_isometry() {
        for &n in &[4usize, 17, 64, 101] {
            let mut s = Stream::new(77, n as u64);
            let x: Vec<f64> = (0..n).map(|_| s.next_normal()).collect();
            let y = dct2_orthonormal(&x);
            let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ny: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((nx - ny).abs() <= 1e-12 * nx, "n = {n}");
        }
    }
}
