//! Dense monomial polynomials with `rug::Float` coefficients, lowest degree first.

use rug::Float;

pub type Poly = Vec<Float>;

pub fn monomial(prec: u32, deg: usize) -> Poly {
    let mut c = vec![Float::new(prec); deg + 1];
    c[deg] = Float::with_val(prec, 1);
    c
}

pub fn scale(p: &[Float], s: &Float) -> Poly {
    p.iter().map(|c| Float::with_val(c.prec(), c * s)).collect()
}

/// `a - b`, padded to the longer length.
pub fn sub(a: &[Float], b: &[Float]) -> Poly {
    let prec = a.first().or(b.first()).map(|c| c.prec()).unwrap_or(64);
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let mut v = a.get(i).cloned().unwrap_or_else(|| Float::new(prec));
            if let Some(bi) = b.get(i) {
                v -= bi;
            }
            v
        })
        .collect()
}

/// `p(-x)`.
pub fn reflect(p: &[Float]) -> Poly {
    p.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() }).collect()
}

/// Split `p(x) = E(x^2) + x O(x^2)` into `(E, O)`.
pub fn even_odd(p: &[Float]) -> (Poly, Poly) {
    let e = p.iter().step_by(2).cloned().collect();
    let o = p.iter().skip(1).step_by(2).cloned().collect();
    (e, o)
}

/// Trim trailing exact zeros, keeping at least one coefficient.
pub fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}
