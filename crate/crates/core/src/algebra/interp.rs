//! Interpolation of functions `F_p^k -> F_p` by reduced polynomials.

use std::collections::HashMap;

use super::field::{pow_mod, Field};
use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// The unique polynomial with per-variable degree `< p` that agrees with
/// `table` on all of `F_p^k`.
pub fn interpolate(p: u64, k: usize, table: &HashMap<Vec<u64>, u64>) -> Result<MultiPoly> {
    let field = Field::prime(p)?;
    let size = checked_size(p, k)?;
    let mut dense = Vec::with_capacity(size);
    let mut tuple = vec![0u64; k];
    for idx in 0..size {
        decode(idx, p, &mut tuple);
        match table.get(&tuple) {
            Some(&v) => dense.push(v % p),
            None => return Err(Error::IncompleteTable(tuple)),
        }
    }
    let _ = field;
    interpolate_dense(p, k, &dense)
}

/// Dense variant: `values[i]` is the value at the tuple whose base-`p`
/// digits (least significant first) are the coordinates of `i`.
pub fn interpolate_dense(p: u64, k: usize, values: &[u64]) -> Result<MultiPoly> {
    let field = Field::prime(p)?;
    let size = checked_size(p, k)?;
    if values.len() != size {
        return Err(Error::Arity {
            expected: size,
            got: values.len(),
        });
    }
    let basis = delta_coefficients(p);
    let pu = p as usize;

    // Apply the one-variable change of basis along each axis in turn.
    let mut coeffs: Vec<u64> = values.iter().map(|v| v % p).collect();
    let mut stride = 1usize;
    for _ in 0..k {
        let mut next = vec![0u64; size];
        for base in 0..size {
            if (base / stride) % pu != 0 {
                continue;
            }
            for e in 0..pu {
                let mut acc = 0u128;
                for a in 0..pu {
                    acc += basis[e][a] as u128 * coeffs[base + a * stride] as u128;
                }
                next[base + e * stride] = (acc % p as u128) as u64;
            }
        }
        coeffs = next;
        stride *= pu;
    }

    let mut exps = vec![0u64; k];
    let terms = coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| {
        decode(i, p, &mut exps);
        (
            exps.iter().map(|&e| e as u32).collect::<Vec<_>>(),
            field.from_i64(c as i64),
        )
    });
    let terms: Vec<_> = terms.collect();
    Ok(MultiPoly::from_terms(field, k, terms))
}

/// `basis[e][a]` is the coefficient of `x^e` in `1 - (x - a)^(p-1)`,
/// the indicator of `a` on `F_p`.
fn delta_coefficients(p: u64) -> Vec<Vec<u64>> {
    let n = p - 1;
    let binom = binomials_mod(n, p);
    (0..p)
        .map(|e| {
            (0..p)
                .map(|a| {
                    let neg_a = (p - a % p) % p;
                    let term = binom[e as usize] * pow_mod(neg_a, n - e, p) % p;
                    let one = if e == 0 { 1 } else { 0 };
                    (one + p - term) % p
                })
                .collect()
        })
        .collect()
}

fn binomials_mod(n: u64, p: u64) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for j in 1..row.len() {
            next[j] = (row[j - 1] + row[j]) % p;
        }
        row = next;
    }
    row
}

fn checked_size(p: u64, k: usize) -> Result<usize> {
    const CAP: u128 = 1 << 24;
    let needed = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > CAP {
        return Err(Error::CapExceeded { needed, cap: CAP });
    }
    Ok(needed as usize)
}

fn decode(mut idx: usize, p: u64, out: &mut [u64]) {
    for d in out.iter_mut() {
        *d = (idx % p as usize) as u64;
        idx /= p as usize;
    }
}
