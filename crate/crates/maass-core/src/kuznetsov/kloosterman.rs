//! Kloosterman sums.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::primes::{gcd, mod_inverse};
use crate::{Error, Result};

/// `S(a, b; c) = Σ_{d mod c, (d,c)=1} e((a d + b d̄)/c)`.
///
/// The sum is real; the imaginary part is checked to vanish and dropped.
pub fn kloosterman(a: i64, b: i64, c: i64) -> Result<f64> {
    if c < 1 {
        return Err(Error::Domain("Kloosterman modulus must be at least 1"));
    }
    if c == 1 {
        return Ok(1.0);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for d in 1..c {
        if gcd(d as u64, c as u64) != 1 {
            continue;
        }
        let dbar = mod_inverse(d, c).expect("unit has an inverse");
        let k = ((a as i128 * d as i128 + b as i128 * dbar as i128).rem_euclid(c as i128)) as f64;
        let (s, co) = (2.0 * PI * k / c as f64).sin_cos();
        re += co;
        im += s;
    }
    debug_assert!(
        im.abs() < 1e-9 * (c as f64),
        "Kloosterman sum not real: {im}"
    );
    Ok(re)
}

/// `S(n, 1; c)` for `n = 1..=n_max` at once, sharing the inverse table.
pub fn kloosterman_row(n_max: usize, c: usize) -> Vec<f64> {
    if c == 1 {
        return alloc::vec![1.0; n_max];
    }
    let cos: Vec<f64> = (0..c)
        .map(|k| (2.0 * PI * k as f64 / c as f64).cos())
        .collect();
    let mut out = alloc::vec![0.0; n_max];
    for d in 1..c {
        if gcd(d as u64, c as u64) != 1 {
            continue;
        }
        let dbar = mod_inverse(d as i64, c as i64).expect("unit has an inverse") as usize;
        let mut k = (d + dbar) % c;
        for slot in out.iter_mut() {
            *slot += cos[k];
            k += d;
            if k >= c {
                k -= c;
            }
        }
    }
    out
}

/// `S(m, n; c)` for all `1 <= m, n <= n_max`, row-major, from one cosine
/// table and one pass over the units mod `c`.
pub fn kloosterman_block(n_max: usize, c: usize) -> Vec<f64> {
    if c == 1 {
        return alloc::vec![1.0; n_max * n_max];
    }
    let cos: Vec<f64> = (0..c)
        .map(|k| (2.0 * PI * k as f64 / c as f64).cos())
        .collect();
    let mut out = alloc::vec![0.0; n_max * n_max];
    let mut left = alloc::vec![0usize; n_max];
    let mut right = alloc::vec![0usize; n_max];
    for d in 1..c {
        if gcd(d as u64, c as u64) != 1 {
            continue;
        }
        let dbar = mod_inverse(d as i64, c as i64).expect("unit has an inverse") as usize;
        let (mut a, mut b) = (0, 0);
        for i in 0..n_max {
            a = (a + d) % c;
            b = (b + dbar) % c;
            left[i] = a;
            right[i] = b;
        }
        for (i, &a) in left.iter().enumerate() {
            let row = &mut out[i * n_max..(i + 1) * n_max];
            for (slot, &b) in row.iter_mut().zip(&right) {
                let k = a + b;
                *slot += cos[if k >= c { k - c } else { k }];
            }
        }
    }
    out
}
