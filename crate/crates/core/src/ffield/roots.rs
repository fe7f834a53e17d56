use std::collections::HashMap;

use super::{AmbientField, Fe};
use crate::arith;
use crate::error::{Error, Result};

const SYLOW_LIMIT: u64 = 1 << 22;

/// Solves `y^k = x` in the full unit group of an ambient field.
///
/// The unit group has order `N = M * N'` where `M` collects the primes of
/// `k`. On the `N'` part the `k`-th power map is a bijection; the `M` part is
/// a cyclic Sylow subgroup with an explicit generator and a discrete-log
/// table.
#[derive(Debug)]
pub struct RootSolver<'a> {
    field: &'a AmbientField,
    k: u64,
    sylow_order: u64,
    coprime_order: u64,
    sylow_gen: Fe,
    dlog: HashMap<Fe, u64>,
}

impl<'a> RootSolver<'a> {
    pub fn new(field: &'a AmbientField, k: u64) -> Result<Self> {
        assert!(k >= 1, "root degree must be positive");
        let n = field.size() - 1;
        let mut sylow = 1u64;
        let mut rest = n;
        for r in arith::prime_divisors(k) {
            while rest % r == 0 {
                rest /= r;
                sylow *= r;
            }
        }
        if sylow > SYLOW_LIMIT {
            return Err(Error::BoundExceeded {
                what: format!("Sylow part of the unit group for {k}-th roots"),
                size: sylow as u128,
                bound: SYLOW_LIMIT as u128,
            });
        }
        let one = field.one();
        let sylow_gen = if sylow == 1 {
            one
        } else {
            let primes = arith::prime_divisors(sylow);
            (1..field.size())
                .map(|c| field.pow(Fe(c), rest as u128))
                .find(|&g| {
                    primes
                        .iter()
                        .all(|&r| field.pow(g, (sylow / r) as u128) != one)
                })
                .expect("the Sylow subgroup of a cyclic group is cyclic")
        };
        let mut dlog = HashMap::with_capacity(sylow as usize);
        let mut x = one;
        for i in 0..sylow {
            dlog.insert(x, i);
            x = field.mul(x, sylow_gen);
        }
        Ok(RootSolver { field, k, sylow_order: sylow, coprime_order: rest, sylow_gen, dlog })
    }

    /// All `y` in the ambient field with `y^k = x`, sorted. Empty when `x`
    /// is not a `k`-th power here (or is zero).
    pub fn roots(&self, x: Fe) -> Vec<Fe> {
        if x.is_zero() {
            return Vec::new();
        }
        let f = self.field;
        let (m, np) = (self.sylow_order as u128, self.coprime_order as u128);
        // CRT idempotents split x into its Sylow and coprime components.
        let e1 = np * arith::mod_inverse(np % m, m).unwrap();
        let e2 = m * arith::mod_inverse(m % np, np).unwrap();
        let x1 = f.pow(x, e1);
        let x2 = f.pow(x, e2);
        let y2 = f.pow(x2, arith::mod_inverse(self.k as u128 % np, np).unwrap());
        let j = self.dlog[&x1] as u128;
        let d = arith::gcd_u128(self.k as u128, m);
        if j % d != 0 {
            return Vec::new();
        }
        let md = m / d;
        let kd_inv = arith::mod_inverse((self.k as u128 / d) % md, md).unwrap();
        let i0 = (j / d) % md * kd_inv % md;
        let mut out: Vec<Fe> = (0..d)
            .map(|t| f.mul(f.pow(self.sylow_gen, i0 + t * md), y2))
            .collect();
        out.sort_unstable();
        out
    }

    /// The `k`-th roots of unity in the ambient field.
    pub fn roots_of_unity(&self) -> Vec<Fe> {
        self.roots(self.field.one())
    }
}

impl AmbientField {
    /// Primitive cube root of unity `xi` with the smallest code, when the
    /// field contains one (i.e. `t^2 + t + 1` has a simple root).
    pub fn primitive_cube_root(&self) -> Option<Fe> {
        if self.characteristic() == 3 {
            return None;
        }
        let solver = RootSolver::new(self, 3).ok()?;
        solver.roots_of_unity().into_iter().find(|&x| x != self.one())
    }
}
