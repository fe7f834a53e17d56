//! Exact arithmetic in a single ambient field F_{p^D}.
//!
//! Every computation in the crate happens inside one [`AmbientField`]. The
//! subfield F_{p^d} for `d | D` is never materialized on its own; it is the
//! fixed set of `x -> x^{p^d}` and is enumerated as the null space of that
//! F_p-linear map.
//!
//! Elements are stored as packed base-`p` codes with the constant
//! coefficient as the most significant digit, so that the integer order on
//! codes is the lexicographic order on coefficient sequences read
//! low-degree-first.

mod poly;
mod roots;

pub use roots::RootSolver;

use crate::arith;
use crate::error::{Error, Result};

/// Default bound on the number of elements a full scan may visit.
pub const DEFAULT_SCAN_LIMIT: u64 = 1 << 24;
/// Largest field size representable by a packed `u64` code.
pub const MAX_FIELD_SIZE: u64 = 1 << 62;
const TABLE_LIMIT: u64 = 1 << 16;

/// An element of the ambient field, as a packed coefficient code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Fe(u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);

    pub fn code(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug)]
struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The field F_{p^D} with the lexicographically smallest monic irreducible
/// modulus of degree `D`.
#[derive(Debug)]
pub struct AmbientField {
    p: u64,
    degree: usize,
    size: u64,
    modulus: Vec<u64>,
    weights: Vec<u64>,
    tables: Option<LogTables>,
}

impl AmbientField {
    /// Builds F_{p^degree}, rejecting fields with more than `bound` elements.
    pub fn with_bound(p: u64, degree: usize, bound: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degree == 0 {
            return Err(Error::ZeroDegree);
        }
        let size = u32::try_from(degree)
            .ok()
            .and_then(|d| arith::pow_u64(p, d))
            .filter(|&s| s <= bound.min(MAX_FIELD_SIZE))
            .ok_or(Error::FieldTooLarge { p, degree, bound: bound.min(MAX_FIELD_SIZE) })?;
        let modulus = smallest_irreducible(p, degree);
        let weights = (0..degree).map(|i| p.pow((degree - 1 - i) as u32)).collect();
        let mut field = AmbientField { p, degree, size, modulus, weights, tables: None };
        if size <= TABLE_LIMIT && degree > 1 {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    /// Builds F_{p^degree} with the largest representable size bound.
    pub fn new(p: u64, degree: usize) -> Result<Self> {
        Self::with_bound(p, degree, MAX_FIELD_SIZE)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// Modulus coefficients, low-degree-first, including the leading 1.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe(self.weights[0])
    }

    /// The image of the integer `c` in the prime field.
    pub fn from_int(&self, c: i64) -> Fe {
        Fe(c.rem_euclid(self.p as i64) as u64 * self.weights[0])
    }

    /// Element with the given coefficients (low-degree-first, reduced mod p).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Fe {
        let mut reduced: Vec<u64> = coeffs.iter().map(|c| c % self.p).collect();
        if reduced.len() > self.degree {
            reduced = poly::rem(&reduced, &self.modulus, self.p);
        }
        self.encode(&reduced)
    }

    /// Coefficients of `x` (low-degree-first, length `D`).
    pub fn coeffs(&self, x: Fe) -> Vec<u64> {
        self.weights.iter().map(|w| (x.0 / w) % self.p).collect()
    }

    /// Element from a raw code; `None` when out of range.
    pub fn element(&self, code: u64) -> Option<Fe> {
        (code < self.size).then_some(Fe(code))
    }

    fn encode(&self, coeffs: &[u64]) -> Fe {
        Fe(coeffs.iter().zip(&self.weights).map(|(c, w)| c * w).sum())
    }

    fn to_poly(&self, x: Fe) -> Vec<u64> {
        let mut c = self.coeffs(x);
        poly::trim(&mut c);
        c
    }

    /// The polynomial generator `t` (the class of x modulo the modulus).
    pub fn generator_t(&self) -> Fe {
        self.from_coeffs(&[0, 1])
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if self.degree == 1 {
            return Fe((a.0 + b.0) % self.p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        for &w in self.weights.iter().rev() {
            let s = (x % self.p + y % self.p) % self.p;
            out += s * w;
            x /= self.p;
            y /= self.p;
        }
        Fe(out)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0;
        for &w in self.weights.iter().rev() {
            let c = x % self.p;
            out += ((self.p - c) % self.p) * w;
            x /= self.p;
        }
        Fe(out)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            return Fe::ZERO;
        }
        if self.degree == 1 {
            return Fe(((a.0 as u128 * b.0 as u128) % self.p as u128) as u64);
        }
        if let Some(t) = &self.tables {
            let n = self.size - 1;
            let e = (t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64) % n;
            return Fe(t.exp[e as usize] as u64);
        }
        self.mul_poly(a, b)
    }

    fn mul_poly(&self, a: Fe, b: Fe) -> Fe {
        let prod = poly::mul_mod(&self.to_poly(a), &self.to_poly(b), &self.modulus, self.p);
        self.encode(&prod)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return None;
        }
        if self.degree == 1 {
            return arith::mod_inverse(a.0 as u128, self.p as u128).map(|v| Fe(v as u64));
        }
        if let Some(t) = &self.tables {
            let n = self.size - 1;
            let e = (n - t.log[a.0 as usize] as u64) % n;
            return Some(Fe(t.exp[e as usize] as u64));
        }
        Some(self.encode(&poly::inv_mod(&self.to_poly(a), &self.modulus, self.p)))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fe, e: u128) -> Fe {
        if e == 0 {
            return self.one();
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        if let Some(t) = &self.tables {
            let n = (self.size - 1) as u128;
            let idx = (t.log[a.0 as usize] as u128 * (e % n)) % n;
            return Fe(t.exp[idx as usize] as u64);
        }
        let mut result = self.one();
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// `x^{p^e}`, the `e`-th power of the absolute Frobenius.
    pub fn frobenius_power(&self, x: Fe, e: u64) -> Fe {
        let e = (e % self.degree as u64) as u32;
        if e == 0 || self.degree == 1 {
            return x;
        }
        self.pow(x, (self.p as u128).pow(e))
    }

    /// Whether `x` lies in the subfield F_{p^d}.
    pub fn in_subfield(&self, x: Fe, d: usize) -> Result<bool> {
        self.check_divisor(d)?;
        Ok(self.frobenius_power(x, d as u64) == x)
    }

    fn check_divisor(&self, d: usize) -> Result<()> {
        if d == 0 || self.degree % d != 0 {
            return Err(Error::NotDivisor { d, degree: self.degree });
        }
        Ok(())
    }

    /// An F_p-basis of the subfield F_{p^d}, computed as the null space of
    /// `x -> x^{p^d} - x` on the power basis.
    pub fn subfield_basis(&self, d: usize) -> Result<Vec<Fe>> {
        self.check_divisor(d)?;
        let dim = self.degree;
        let p = self.p;
        // Column j holds frob(t^j) - t^j.
        let mut rows = vec![vec![0u64; dim]; dim];
        for j in 0..dim {
            let mut unit = vec![0u64; dim];
            unit[j] = 1;
            let tj = self.encode(&unit);
            let image = self.coeffs(self.sub(self.frobenius_power(tj, d as u64), tj));
            for i in 0..dim {
                rows[i][j] = image[i];
            }
        }
        let basis = null_space_mod_p(rows, p);
        debug_assert_eq!(basis.len(), d);
        Ok(basis.iter().map(|v| self.encode(v)).collect())
    }

    /// All `p^d` elements of F_{p^d} in canonical (code) order.
    pub fn enumerate_subfield(&self, d: usize) -> Result<Vec<Fe>> {
        self.enumerate_subfield_bounded(d, DEFAULT_SCAN_LIMIT)
    }

    pub fn enumerate_subfield_bounded(&self, d: usize, limit: u64) -> Result<Vec<Fe>> {
        self.check_divisor(d)?;
        let count = self.p.pow(d as u32);
        if count > limit {
            return Err(Error::BoundExceeded {
                what: format!("subfield F_{}^{}", self.p, d),
                size: count as u128,
                bound: limit as u128,
            });
        }
        if d == self.degree {
            return Ok((0..count).map(Fe).collect());
        }
        let basis = self.subfield_basis(d)?;
        let mut out = vec![Fe::ZERO];
        for b in basis {
            let mut next = Vec::with_capacity(out.len() * self.p as usize);
            let mut multiple = Fe::ZERO;
            for _ in 0..self.p {
                next.extend(out.iter().map(|&x| self.add(x, multiple)));
                multiple = self.add(multiple, b);
            }
            out = next;
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Multiplicative order of a nonzero element whose order divides `n`.
    pub fn order_dividing(&self, x: Fe, n: u64) -> u64 {
        let mut order = n;
        for r in arith::prime_divisors(n) {
            while order % r == 0 && self.pow(x, (order / r) as u128) == self.one() {
                order /= r;
            }
        }
        order
    }

    /// The smallest-code generator of the cyclic group F_{p^d}^*.
    pub fn subfield_primitive(&self, d: usize) -> Result<Fe> {
        let n = self.p.pow(d as u32) - 1;
        for x in self.enumerate_subfield(d)? {
            if !x.is_zero() && self.order_dividing(x, n) == n {
                return Ok(x);
            }
        }
        unreachable!("finite fields have cyclic unit groups")
    }

    fn build_tables(&self) -> LogTables {
        let n = self.size - 1;
        let g = (1..self.size)
            .map(Fe)
            .find(|&x| is_primitive_poly(self, x, n))
            .expect("cyclic unit group");
        let mut exp = Vec::with_capacity(n as usize);
        let mut log = vec![0u32; self.size as usize];
        let mut x = self.one();
        for i in 0..n {
            exp.push(x.0 as u32);
            log[x.0 as usize] = i as u32;
            x = self.mul_poly(x, g);
        }
        LogTables { exp, log }
    }
}

fn is_primitive_poly(f: &AmbientField, x: Fe, n: u64) -> bool {
    let px = f.to_poly(x);
    arith::prime_divisors(n).into_iter().all(|r| {
        let y = poly::pow_mod(&px, (n / r) as u128, &f.modulus, f.p);
        y != vec![1]
    })
}

/// The lexicographically smallest monic irreducible polynomial of degree `d`
/// over F_p, comparing coefficient sequences low-degree-first.
pub fn smallest_irreducible(p: u64, d: usize) -> Vec<u64> {
    let mut coeffs = vec![0u64; d];
    // Every candidate with zero constant term is divisible by x.
    if d > 1 {
        coeffs[0] = 1;
    }
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if poly::is_irreducible(&f, p) {
            return f;
        }
        // Odometer with the constant term most significant.
        let mut i = d;
        loop {
            assert!(i > 0, "an irreducible polynomial of every degree exists");
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
        }
    }
}

/// Null space of a square matrix over F_p, as basis vectors in reduced
/// form.
fn null_space_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = poly::inv_mod_p(rows[r][c], p);
        for v in rows[r].iter_mut() {
            *v = (*v as u128 * inv as u128 % p as u128) as u64;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..n {
                    let sub = (f as u128 * rows[r][j] as u128 % p as u128) as u64;
                    rows[i][j] = (rows[i][j] + p - sub) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; n];
            v[fc] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - rows[row][fc]) % p;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests;
