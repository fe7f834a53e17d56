//! Dense polynomials over F_p, coefficients low-degree-first.

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn mul_mod_p(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod_p(a: u64, p: u64) -> u64 {
    crate::arith::mod_inverse(a as u128, p as u128).expect("nonzero residue") as u64
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod_p(x, y, p)) % p;
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub(crate) fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = inv_mod_p(b[db], p);
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    let mut q = vec![0u64; r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = mul_mod_p(r[dr], lead_inv, p);
        let shift = dr - db;
        q[shift] = c;
        for (i, &bc) in b[..=db].iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod_p(c, bc, p)) % p;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    div_rem(a, b, p).1
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn pow_mod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Poly {
    let mut result: Poly = vec![1];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(&result, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    rem(&result, m, p)
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut x: Poly = a.to_vec();
    let mut y: Poly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(d) = degree(&x) {
        let inv = inv_mod_p(x[d], p);
        for c in x.iter_mut() {
            *c = mul_mod_p(*c, inv, p);
        }
    }
    x
}

/// Inverse of `a` modulo the irreducible `m` via the extended Euclidean
/// algorithm.
pub(crate) fn inv_mod(a: &[u64], m: &[u64], p: u64) -> Poly {
    let (mut old_r, mut r) = (rem(a, m, p), m.to_vec());
    let (mut old_s, mut s): (Poly, Poly) = (vec![1], Vec::new());
    while !r.is_empty() {
        let (q, rr) = div_rem(&old_r, &r, p);
        let next_s = sub(&old_s, &mul(&q, &s, p), p);
        old_r = std::mem::replace(&mut r, rr);
        old_s = std::mem::replace(&mut s, next_s);
    }
    let d = degree(&old_r).expect("element is invertible");
    debug_assert_eq!(d, 0);
    let inv = inv_mod_p(old_r[0], p);
    let scaled: Poly = old_s.iter().map(|&c| mul_mod_p(c, inv, p)).collect();
    rem(&scaled, m, p)
}

/// Irreducibility test for a monic `f` of degree `d`: `gcd(x^{p^i} - x, f) = 1`
/// for every `i <= d/2`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = match degree(f) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    let x: Poly = vec![0, 1];
    let mut power = rem(&x, f, p);
    for _ in 1..=d / 2 {
        power = pow_mod(&power, p as u128, f, p);
        let diff = sub(&power, &x, p);
        let g = gcd(f, &diff, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}
