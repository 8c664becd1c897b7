//! In-place radix-2 FFT for the power-of-two transform sizes used by the
//! witness and bridge constructions.

use core::f64::consts::PI;
use num_complex::Complex64;

/// Forward transform `X_k = sum_j x_j e^{-2 pi i jk/n}`. Panics unless `n` is a power of two.
pub fn forward(data: &mut [Complex64]) {
    transform(data, -1.0);
}

/// Inverse transform without the `1/n` factor.
pub fn inverse_unscaled(data: &mut [Complex64]) {
    transform(data, 1.0);
}

fn transform(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft size must be a power of two");
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // twiddles computed directly to avoid drift from repeated products
                let w = Complex64::from_polar(1.0, ang * k as f64);
                let u = data[start + k];
                let v = data[start + k + half] * w;
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Index `n` in `[-size/2, size/2)` of FFT bin `k`.
pub fn signed_frequency(k: usize, size: usize) -> i64 {
    if k < size / 2 {
        k as i64
    } else {
        k as i64 - size as i64
    }
}
