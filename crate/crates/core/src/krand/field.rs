//! Finite fields for polynomial hashing: prime fields and GF(2^b) with
//! log/antilog tables.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Field choice as it appears in configs: `{"prime": 65537}` or `{"binary": 16}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSpec {
    Prime(u32),
    Binary(u32),
}

impl FieldSpec {
    pub fn size(&self) -> u64 {
        match *self {
            FieldSpec::Prime(p) => p as u64,
            FieldSpec::Binary(b) => 1u64 << b,
        }
    }
}

/// Primitive polynomials for GF(2^b), `b = 1..=16`, including the `x^b` bit.
const PRIMITIVE: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
];

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone)]
enum Repr {
    Prime(u64),
    Binary { bits: u32, log: Vec<u32>, exp: Vec<u32> },
}

/// Field arithmetic on elements encoded as integers `0..size`.
#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    repr: Repr,
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let repr = match spec {
            FieldSpec::Prime(p) => {
                if !is_prime(p) || p > i32::MAX as u32 {
                    return Err(invalid(format!("{p} is not a prime below 2^31")));
                }
                Repr::Prime(p as u64)
            }
            FieldSpec::Binary(bits) => {
                if !(1..=16).contains(&bits) {
                    return Err(invalid(format!("GF(2^{bits}) unsupported; need 1 <= b <= 16")));
                }
                let q = 1usize << bits;
                let order = q - 1;
                let mut exp = vec![0u32; 2 * order.max(1)];
                let mut log = vec![0u32; q];
                let mut x = 1u32;
                for (i, e) in exp.iter_mut().take(order).enumerate() {
                    *e = x;
                    log[x as usize] = i as u32;
                    x <<= 1;
                    if x & (1 << bits) != 0 {
                        x ^= PRIMITIVE[bits as usize];
                    }
                }
                for i in order..2 * order {
                    exp[i] = exp[i - order];
                }
                Repr::Binary { bits, log, exp }
            }
        };
        Ok(Self { spec, repr })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn size(&self) -> u64 {
        self.spec.size()
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Prime(p) => ((a as u64 + b as u64) % p) as u32,
            Repr::Binary { .. } => a ^ b,
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Prime(p) => ((a as u64 * b as u64) % p) as u32,
            Repr::Binary { log, exp, .. } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
        }
    }

    /// Horner evaluation of `sum_j coeffs[j] x^j`.
    #[inline]
    pub fn eval_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Bit width for binary fields.
    pub fn bits(&self) -> Option<u32> {
        match &self.repr {
            Repr::Binary { bits, .. } => Some(*bits),
            Repr::Prime(_) => None,
        }
    }
}
