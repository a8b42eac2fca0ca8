use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::krand::field::{Field, FieldSpec};

/// Joint counts of `(h(a_1), ..., h(a_m))` at points `a = positions` over all
/// `q^k` hash polynomials `h` of degree below `k`.
pub fn enumerate_joint_counts(field: FieldSpec, k: usize, positions: &[u32]) -> Result<BTreeMap<Vec<u32>, u64>> {
    let f = Field::new(field)?;
    let q = f.size();
    let total = (q as u128).checked_pow(k as u32).filter(|&t| t <= 1 << 28);
    let total = total.ok_or_else(|| invalid("enumeration too large"))? as u64;
    if positions.iter().any(|&p| p as u64 >= q) {
        return Err(invalid("evaluation point outside the field"));
    }
    let mut counts = BTreeMap::new();
    let mut coeffs = vec![0u32; k];
    for idx in 0..total {
        let mut r = idx;
        for c in coeffs.iter_mut() {
            *c = (r % q) as u32;
            r /= q;
        }
        let key: Vec<u32> = positions.iter().map(|&a| f.eval_poly(&coeffs, a)).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(counts)
}

/// `true` when every tuple of `q^m` appears equally often.
pub fn is_exactly_uniform(counts: &BTreeMap<Vec<u32>, u64>, q: u64, m: usize) -> bool {
    let cells = q.pow(m as u32);
    if counts.len() as u64 != cells {
        return false;
    }
    let first = counts.values().next().copied().unwrap_or(0);
    counts.values().all(|&c| c == first)
}
