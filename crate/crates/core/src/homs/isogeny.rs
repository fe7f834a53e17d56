use std::collections::HashMap;
use std::fmt;

use crate::arith;
use crate::error::{Error, Result};
use crate::ffield::{AmbientField, Fe, RootSolver};
use crate::matgroup::{cover_matrix, norm, top_left_block, torus_coords, torus_matrix, GroupSpec, Matrix, SpecKind};

/// Stable isogeny names accepted by [`Isogeny::parse`].
pub const ISOGENY_CATALOG: &[&str] = &["id", "pow:k", "normcover", "compose:(a,b)"];

/// A homomorphism with finite geometric kernel between built-in groups.
///
/// Inseparable maps (Frobenius twists) are deliberately absent: the kernel
/// order is always the number of geometric points of the kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Isogeny {
    Identity(GroupSpec),
    /// `g -> g^k` on a commutative group.
    Power { spec: GroupSpec, k: u64 },
    /// `diag(T, c) -> T` from the cover onto the norm torus.
    NormCover { cover: GroupSpec, torus: GroupSpec },
    /// `outer ∘ inner`.
    Compose(Box<Isogeny>, Box<Isogeny>),
}

impl Isogeny {
    pub fn identity(spec: GroupSpec) -> Self {
        Isogeny::Identity(spec)
    }

    /// The `k`-th power map on a torus-like group, defined for `gcd(k, q) = 1`.
    pub fn power(spec: GroupSpec, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::NotIsogeny("power map needs k >= 1".into()));
        }
        if arith::gcd(k, spec.q()) != 1 {
            return Err(Error::NotIsogeny(format!("gcd({k}, {}) != 1", spec.q())));
        }
        match spec.kind() {
            SpecKind::Gm | SpecKind::NormTorus => {}
            SpecKind::NormTorusCover if spec.characteristic() != 3 => {}
            _ => return Err(Error::NotIsogeny(format!("power map is only provided on tori, not {spec}"))),
        }
        Ok(Isogeny::Power { spec, k })
    }

    /// The double cover of the norm torus by `c^2 = a^2 - ab + b^2`.
    ///
    /// In characteristic 3 the norm form is a square and the cover is not
    /// connected; in characteristic 2 the map is inseparable. Both are
    /// rejected.
    pub fn norm_cover(q: u64) -> Result<Self> {
        let torus = GroupSpec::new(SpecKind::NormTorus, q)?;
        match torus.characteristic() {
            2 => return Err(Error::NotIsogeny("the norm cover is inseparable in characteristic 2".into())),
            3 => return Err(Error::NotIsogeny("the norm cover is disconnected in characteristic 3".into())),
            _ => {}
        }
        let cover = GroupSpec::new(SpecKind::NormTorusCover, q)?;
        Ok(Isogeny::NormCover { cover, torus })
    }

    pub fn compose(outer: Isogeny, inner: Isogeny) -> Result<Self> {
        if inner.codomain() != outer.domain() {
            return Err(Error::NotIsogeny(format!(
                "cannot compose: {} does not map into {}",
                inner.name(),
                outer.domain()
            )));
        }
        Ok(Isogeny::Compose(Box::new(outer), Box::new(inner)))
    }

    /// Parses a catalog name with the given codomain.
    pub fn parse(name: &str, codomain: &GroupSpec) -> Result<Self> {
        let name = name.trim();
        if name == "id" {
            return Ok(Isogeny::identity(codomain.clone()));
        }
        if name == "normcover" {
            let iso = Isogeny::norm_cover(codomain.q())?;
            if iso.codomain() != *codomain {
                return Err(Error::NotIsogeny(format!("normcover maps onto NormTorus, not {codomain}")));
            }
            return Ok(iso);
        }
        if let Some(k) = name.strip_prefix("pow:") {
            let k = k.parse().map_err(|_| Error::Config(format!("bad exponent in '{name}'")))?;
            return Isogeny::power(codomain.clone(), k);
        }
        if let Some(inner) = name.strip_prefix("compose:(").and_then(|s| s.strip_suffix(')')) {
            let (a, b) = split_top_level(inner)
                .ok_or_else(|| Error::Config(format!("expected compose:(a,b), got '{name}'")))?;
            let outer = Isogeny::parse(a, codomain)?;
            let inner = Isogeny::parse(b, &outer.domain())?;
            return Isogeny::compose(outer, inner);
        }
        Err(Error::Config(format!("unknown isogeny '{name}'")))
    }

    pub fn name(&self) -> String {
        match self {
            Isogeny::Identity(_) => "id".into(),
            Isogeny::Power { k, .. } => format!("pow:{k}"),
            Isogeny::NormCover { .. } => "normcover".into(),
            Isogeny::Compose(a, b) => format!("compose:({},{})", a.name(), b.name()),
        }
    }

    pub fn domain(&self) -> GroupSpec {
        match self {
            Isogeny::Identity(s) | Isogeny::Power { spec: s, .. } => s.clone(),
            Isogeny::NormCover { cover, .. } => cover.clone(),
            Isogeny::Compose(_, inner) => inner.domain(),
        }
    }

    pub fn codomain(&self) -> GroupSpec {
        match self {
            Isogeny::Identity(s) | Isogeny::Power { spec: s, .. } => s.clone(),
            Isogeny::NormCover { torus, .. } => torus.clone(),
            Isogeny::Compose(outer, _) => outer.codomain(),
        }
    }

    fn characteristic(&self) -> u64 {
        self.codomain().characteristic()
    }

    /// Number of geometric points of the kernel.
    pub fn order(&self) -> usize {
        match self {
            Isogeny::Identity(_) => 1,
            Isogeny::Power { spec, k } => {
                let rank = match spec.kind() {
                    SpecKind::NormTorus if spec.characteristic() == 3 => 1,
                    SpecKind::NormTorus | SpecKind::NormTorusCover => 2,
                    _ => 1,
                };
                (*k as usize).pow(rank)
            }
            Isogeny::NormCover { .. } => 2,
            Isogeny::Compose(a, b) => a.order() * b.order(),
        }
    }

    /// Degree `s_max` over F_q such that the kernel is contained in the
    /// points over F_{q^s} for some `s <= s_max`.
    pub fn kernel_degree_bound(&self) -> usize {
        match self {
            Isogeny::Identity(_) | Isogeny::NormCover { .. } => 1,
            Isogeny::Power { spec, k } => {
                let ord = arith::multiplicative_order(spec.q() % k, *k).unwrap_or(1) as usize;
                match spec.kind() {
                    SpecKind::Gm => ord,
                    _ => arith::lcm(ord as u64, split_degree(spec.q()) as u64) as usize,
                }
            }
            Isogeny::Compose(a, b) => {
                2 * arith::lcm(a.kernel_degree_bound() as u64, b.kernel_degree_bound() as u64) as usize
            }
        }
    }

    /// Degree over F_p the ambient field must be divisible by for
    /// [`Isogeny::fiber`] to work (cube roots of unity for the torus).
    pub fn aux_degree(&self) -> usize {
        let torus_like = |s: &GroupSpec| matches!(s.kind(), SpecKind::NormTorus | SpecKind::NormTorusCover);
        let needs = match self {
            Isogeny::Identity(_) => false,
            Isogeny::Power { spec, .. } => torus_like(spec),
            Isogeny::NormCover { .. } => false,
            Isogeny::Compose(a, b) => return arith::lcm(a.aux_degree() as u64, b.aux_degree() as u64) as usize,
        };
        if needs && self.characteristic() != 3 {
            2
        } else {
            1
        }
    }

    /// Evaluates the map on a matrix of the domain.
    pub fn apply(&self, g: &Matrix, f: &AmbientField) -> Matrix {
        match self {
            Isogeny::Identity(_) => g.clone(),
            Isogeny::Power { k, .. } => g.pow(*k, f),
            Isogeny::NormCover { .. } => top_left_block(g, f),
            Isogeny::Compose(a, b) => a.apply(&b.apply(g, f), f),
        }
    }

    /// All preimages of `x` with entries anywhere in the ambient field,
    /// sorted. Solved directly (roots of unity, square roots) rather than by
    /// scanning the domain.
    pub fn fiber(&self, x: &Matrix, f: &AmbientField) -> Result<Vec<Matrix>> {
        FiberSolver::new(self, f)?.fiber(x)
    }

    fn root_exponents(&self, out: &mut Vec<u64>) {
        match self {
            Isogeny::Identity(_) => {}
            Isogeny::Power { spec, k } => {
                out.push(*k);
                if spec.kind() == SpecKind::NormTorusCover {
                    out.push(2);
                }
            }
            Isogeny::NormCover { .. } => out.push(2),
            Isogeny::Compose(a, b) => {
                a.root_exponents(out);
                b.root_exponents(out);
            }
        }
    }
}

/// Preimage solver with the root-extraction tables of an isogeny built once
/// for a fixed ambient field.
pub struct FiberSolver<'a> {
    iso: &'a Isogeny,
    field: &'a AmbientField,
    solvers: HashMap<u64, RootSolver<'a>>,
    xi: Option<Fe>,
}

impl<'a> FiberSolver<'a> {
    pub fn new(iso: &'a Isogeny, field: &'a AmbientField) -> Result<Self> {
        let aux = iso.aux_degree();
        if field.degree() % aux != 0 {
            return Err(Error::SubfieldUnavailable { needed: aux, degree: field.degree() });
        }
        let mut exps = Vec::new();
        iso.root_exponents(&mut exps);
        let mut solvers = HashMap::new();
        for k in exps {
            if let std::collections::hash_map::Entry::Vacant(e) = solvers.entry(k) {
                e.insert(RootSolver::new(field, k)?);
            }
        }
        let xi = field.primitive_cube_root();
        Ok(FiberSolver { iso, field, solvers, xi })
    }

    pub fn isogeny(&self) -> &Isogeny {
        self.iso
    }

    /// All preimages of `x`, sorted.
    pub fn fiber(&self, x: &Matrix) -> Result<Vec<Matrix>> {
        let mut out = self.fiber_of(self.iso, x)?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn fiber_of(&self, iso: &Isogeny, x: &Matrix) -> Result<Vec<Matrix>> {
        let f = self.field;
        Ok(match iso {
            Isogeny::Identity(_) => vec![x.clone()],
            Isogeny::Power { spec, k } => match spec.kind() {
                SpecKind::Gm => {
                    self.solvers[k].roots(x.get(0, 0)).into_iter().map(|y| Matrix::from_entries(1, vec![y])).collect()
                }
                SpecKind::NormTorus => {
                    let (a, b) = torus_coords(x, f).ok_or_else(|| shape_error(x))?;
                    self.torus_roots(a, b, *k)?.into_iter().map(|(a, b)| torus_matrix(f, a, b)).collect()
                }
                SpecKind::NormTorusCover => {
                    if x.dim() != 3 {
                        return Err(shape_error(x));
                    }
                    let block = top_left_block(x, f);
                    let (a, b) = torus_coords(&block, f).ok_or_else(|| shape_error(x))?;
                    let c = x.get(2, 2);
                    let mut out = Vec::new();
                    for (ra, rb) in self.torus_roots(a, b, *k)? {
                        for rc in self.solvers[&2].roots(norm(f, ra, rb)) {
                            if f.pow(rc, *k as u128) == c {
                                out.push(cover_matrix(f, ra, rb, rc));
                            }
                        }
                    }
                    out
                }
                _ => unreachable!("power maps are only built on tori"),
            },
            Isogeny::NormCover { .. } => {
                let (a, b) = torus_coords(x, f).ok_or_else(|| shape_error(x))?;
                self.solvers[&2].roots(norm(f, a, b)).into_iter().map(|c| cover_matrix(f, a, b, c)).collect()
            }
            Isogeny::Compose(outer, inner) => {
                let mut out = Vec::new();
                for y in self.fiber_of(outer, x)? {
                    out.extend(self.fiber_of(inner, &y)?);
                }
                out
            }
        })
    }

    /// All `(a', b')` with `(a' + b' xi)^k = a + b xi` in F[xi]/(xi^2 + xi + 1).
    fn torus_roots(&self, a: Fe, b: Fe, k: u64) -> Result<Vec<(Fe, Fe)>> {
        let f = self.field;
        let solver = &self.solvers[&k];
        if f.characteristic() == 3 {
            // xi = 1 + eps with eps^2 = 0, so a + b xi = u + w eps with u = a + b.
            let u = f.add(a, b);
            let kk = f.from_int(k as i64);
            let mut out = Vec::new();
            for ru in solver.roots(u) {
                let denom = f.mul(kk, f.pow(ru, (k - 1) as u128));
                let rw = f.div(b, denom).expect("k is a unit and u is nonzero");
                out.push((f.sub(ru, rw), rw));
            }
            return Ok(out);
        }
        let xi = self.xi.ok_or(Error::SubfieldUnavailable { needed: 2, degree: f.degree() })?;
        let xi2 = f.mul(xi, xi);
        let u = f.add(a, f.mul(xi, b));
        let v = f.add(a, f.mul(xi2, b));
        let denom_inv = f.inv(f.sub(xi, xi2)).expect("distinct cube roots");
        let v_roots = solver.roots(v);
        let mut out = Vec::new();
        for ru in solver.roots(u) {
            for &rv in &v_roots {
                let rb = f.mul(f.sub(ru, rv), denom_inv);
                out.push((f.sub(ru, f.mul(xi, rb)), rb));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Isogeny {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.name(), self.domain(), self.codomain())
    }
}

/// The `k`-th power map on a torus (`gcd(k, q) = 1` enforced).
pub fn power_isogeny(spec: &GroupSpec, k: u64) -> Result<Isogeny> {
    Isogeny::power(spec.clone(), k)
}

/// Smallest `s` with F_{q^s} containing a primitive cube root of unity.
fn split_degree(q: u64) -> usize {
    if q % 3 == 0 || q % 3 == 1 {
        1
    } else {
        2
    }
}

fn shape_error(x: &Matrix) -> Error {
    Error::HypothesisViolated(format!("matrix of size {} is not a norm-torus element", x.dim()))
}

fn split_top_level(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}
