//! Order polynomials for rational-point groups: the BN-pair product formula
//! and classical closed forms, in arbitrary precision.

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::matgroup::{GroupSpec, SpecKind};

/// BN-pair data of a split group: `|G(F_q)| = q^N |T(F_q)| sum_w q^{l(w)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BnData {
    /// Number of positive roots `N`.
    pub positive_roots: u32,
    /// `|T(F_q)|` as integer coefficients in `q`, constant term first.
    pub torus: Vec<i64>,
    /// Lengths of the Weyl group elements, one entry per element.
    pub weyl_lengths: Vec<u32>,
}

impl BnData {
    /// Rejects an empty Weyl group or one without the identity (length 0).
    pub fn new(positive_roots: u32, torus: Vec<i64>, weyl_lengths: Vec<u32>) -> Result<Self> {
        if weyl_lengths.is_empty() {
            return Err(Error::Config("the Weyl group contains at least the identity".into()));
        }
        if weyl_lengths.iter().filter(|&&l| l == 0).count() != 1 {
            return Err(Error::Config("exactly one Weyl element has length 0".into()));
        }
        if weyl_lengths.iter().any(|&l| l > positive_roots) {
            return Err(Error::Config("Weyl lengths are bounded by the number of positive roots".into()));
        }
        Ok(BnData { positive_roots, torus, weyl_lengths })
    }

    pub fn sl2() -> Self {
        BnData::new(1, vec![-1, 1], vec![0, 1]).expect("valid data")
    }

    pub fn sl3() -> Self {
        BnData::new(3, vec![1, -2, 1], vec![0, 1, 1, 2, 2, 3]).expect("valid data")
    }

    pub fn sp4() -> Self {
        BnData::new(4, vec![1, -2, 1], vec![0, 1, 1, 2, 2, 3, 3, 4]).expect("valid data")
    }
}

/// A symbolic order formula for a spec tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderFormula {
    pub tag: String,
    pub bn: Option<BnData>,
}

impl OrderFormula {
    /// The shipped BN data: `SL2`, `SL3`, `Sp4`.
    pub fn for_tag(tag: &str) -> Result<Self> {
        let bn = match tag {
            "SL2" => BnData::sl2(),
            "SL3" => BnData::sl3(),
            "Sp4" => BnData::sp4(),
            other => return Err(Error::Unsupported(format!("no BN data for '{other}'"))),
        };
        Ok(OrderFormula { tag: tag.to_string(), bn: Some(bn) })
    }
}

fn eval_poly(coeffs: &[i64], q: &BigInt) -> BigInt {
    coeffs.iter().rev().fold(BigInt::from(0), |acc, &c| acc * q + BigInt::from(c))
}

fn to_unsigned(x: BigInt) -> Result<BigUint> {
    x.to_biguint().ok_or_else(|| Error::HypothesisViolated("order formula evaluated to a negative number".into()))
}

/// Evaluates `q^N |T(F_q)| sum_w q^{l(w)}` exactly.
pub fn bn_order(formula: &OrderFormula, q: u64) -> Result<BigUint> {
    let bn = formula
        .bn
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("'{}' carries no BN data", formula.tag)))?;
    let qb = BigInt::from(q);
    let sum: BigInt = bn.weyl_lengths.iter().map(|&l| qb.pow(l)).sum();
    to_unsigned(qb.pow(bn.positive_roots) * eval_poly(&bn.torus, &qb) * sum)
}

/// `Q = q^n` as a big integer.
fn level(spec: &GroupSpec, n: usize) -> BigUint {
    BigUint::from(spec.q()).pow(n as u32)
}

fn torus_order(spec: &GroupSpec, qn: &BigUint) -> BigUint {
    let one = BigUint::from(1u32);
    if spec.characteristic() == 3 {
        return qn * (qn - &one);
    }
    if qn % 3u32 == one {
        (qn - &one) * (qn - &one)
    } else {
        qn * qn - one
    }
}

/// Classical product formula for `|G(F_{q^n})|`.
pub fn closed_order(spec: &GroupSpec, n: usize) -> Result<BigUint> {
    let qn = level(spec, n);
    let one = BigUint::from(1u32);
    let gl = |m: usize| -> BigUint {
        let mut out = qn.pow((m * (m - 1) / 2) as u32);
        for i in 1..=m {
            out *= qn.pow(i as u32) - &one;
        }
        out
    };
    Ok(match spec.kind() {
        SpecKind::GL(m) => gl(m),
        SpecKind::SL(m) => gl(m) / (&qn - &one),
        SpecKind::Sp(d) => {
            let m = d / 2;
            let mut out = qn.pow((m * m) as u32);
            for i in 1..=m {
                out *= qn.pow(2 * i as u32) - &one;
            }
            out
        }
        SpecKind::SO(d) => {
            if spec.characteristic() == 2 {
                return Err(Error::Unsupported("SO order formula in characteristic 2".into()));
            }
            let m = d / 2;
            if d % 2 == 1 {
                let mut out = qn.pow((m * m) as u32);
                for i in 1..=m {
                    out *= qn.pow(2 * i as u32) - &one;
                }
                out
            } else {
                let mut out = qn.pow((m * (m - 1)) as u32) * (qn.pow(m as u32) - &one);
                for i in 1..m {
                    out *= qn.pow(2 * i as u32) - &one;
                }
                out
            }
        }
        SpecKind::SU(m) => {
            let mut out = BigInt::from(qn.pow((m * (m - 1) / 2) as u32));
            let qi = BigInt::from(qn.clone());
            for i in 2..=m {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                out *= qi.pow(i as u32) - BigInt::from(sign);
            }
            to_unsigned(out)?
        }
        SpecKind::Gm => qn - one,
        SpecKind::Ga => qn,
        SpecKind::NormTorus => torus_order(spec, &qn),
        SpecKind::NormTorusCover => {
            // in characteristic 3 the norm is a square, so every torus point
            // has two lifts
            let t = torus_order(spec, &qn);
            if spec.characteristic() == 3 {
                t * 2u32
            } else {
                t
            }
        }
    })
}

/// Closed-form order of the center of `G(F_{q^n})`.
pub fn center_order(spec: &GroupSpec, n: usize) -> Result<BigUint> {
    let qn = level(spec, n);
    let one = BigUint::from(1u32);
    let small = |m: u64, modulus: &BigUint| -> BigUint {
        let r = u64::try_from(modulus % m).expect("small residue");
        BigUint::from(arith::gcd(m, r))
    };
    Ok(match spec.kind() {
        SpecKind::GL(_) => qn - one,
        SpecKind::SL(m) => small(m as u64, &(qn - one)),
        SpecKind::Sp(_) => small(2, &(qn - one)),
        SpecKind::SU(m) => small(m as u64, &(qn + one)),
        SpecKind::SO(d) => {
            if spec.characteristic() == 2 {
                return Err(Error::Unsupported("SO center in characteristic 2".into()));
            }
            BigUint::from(if d % 2 == 0 { 2u32 } else { 1 })
        }
        SpecKind::Gm | SpecKind::Ga | SpecKind::NormTorus | SpecKind::NormTorusCover => closed_order(spec, n)?,
    })
}
