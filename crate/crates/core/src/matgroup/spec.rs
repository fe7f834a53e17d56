use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FiniteGroup, Matrix};
use crate::arith;
use crate::error::{Error, Result};
use crate::ffield::{AmbientField, Fe, DEFAULT_SCAN_LIMIT};

/// Stable catalog names accepted by [`GroupSpec::from_name`].
pub const CATALOG: &[&str] = &["GL", "SL", "Sp", "SO", "SU", "Gm", "Ga", "NormTorus", "NormTorusCover"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecKind {
    GL(usize),
    SL(usize),
    /// Symplectic group of the given (even) matrix size.
    Sp(usize),
    /// Split special orthogonal group for the antidiagonal form.
    SO(usize),
    /// Special unitary group for the antidiagonal hermitian form.
    SU(usize),
    Gm,
    /// Additive group as upper unitriangular 2x2 matrices.
    Ga,
    /// `[[a, -b], [b, a - b]]` with `a^2 - ab + b^2 != 0`.
    NormTorus,
    /// `diag([[a, -b], [b, a - b]], c)` with `c^2 = a^2 - ab + b^2`.
    NormTorusCover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Parametrized,
    GeneratorClosure,
    FullScan,
}

/// Size limits for enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumBounds {
    pub max_order: usize,
    pub scan_limit: u64,
}

impl Default for EnumBounds {
    fn default() -> Self {
        EnumBounds { max_order: 1 << 20, scan_limit: DEFAULT_SCAN_LIMIT }
    }
}

/// A matrix group defined over F_q with `q = p^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    kind: SpecKind,
    p: u64,
    e: u32,
    /// Optional generators with integer (prime-field) entries, row-major.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    generators: Vec<Vec<i64>>,
}

impl GroupSpec {
    pub fn new(kind: SpecKind, q: u64) -> Result<Self> {
        let (p, e) = arith::prime_power(q)
            .ok_or_else(|| Error::Unsupported(format!("q = {q} is not a prime power")))?;
        match kind {
            SpecKind::GL(0) | SpecKind::SL(0) | SpecKind::SO(0) | SpecKind::SU(0) => {
                return Err(Error::Unsupported("matrix size must be positive".into()))
            }
            SpecKind::Sp(m) if m == 0 || m % 2 == 1 => {
                return Err(Error::Unsupported(format!("Sp needs an even positive size, got {m}")))
            }
            _ => {}
        }
        Ok(GroupSpec { kind, p, e, generators: Vec::new() })
    }

    /// Looks up a catalog name; `dim` is used by the classical families.
    pub fn from_name(name: &str, dim: usize, q: u64) -> Result<Self> {
        let kind = match name {
            "GL" => SpecKind::GL(dim),
            "SL" => SpecKind::SL(dim),
            "Sp" => SpecKind::Sp(dim),
            "SO" => SpecKind::SO(dim),
            "SU" => SpecKind::SU(dim),
            "Gm" => SpecKind::Gm,
            "Ga" => SpecKind::Ga,
            "NormTorus" => SpecKind::NormTorus,
            "NormTorusCover" => SpecKind::NormTorusCover,
            other => return Err(Error::Unsupported(format!("unknown group '{other}'"))),
        };
        Self::new(kind, q)
    }

    /// Supplies generators (integer entries) for closure enumeration.
    pub fn with_generators(mut self, generators: Vec<Vec<i64>>) -> Result<Self> {
        let d = self.dim();
        if generators.iter().any(|g| g.len() != d * d) {
            return Err(Error::Unsupported(format!("generators must have {} entries", d * d)));
        }
        self.generators = generators;
        Ok(self)
    }

    pub fn kind(&self) -> SpecKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SpecKind::GL(_) => "GL",
            SpecKind::SL(_) => "SL",
            SpecKind::Sp(_) => "Sp",
            SpecKind::SO(_) => "SO",
            SpecKind::SU(_) => "SU",
            SpecKind::Gm => "Gm",
            SpecKind::Ga => "Ga",
            SpecKind::NormTorus => "NormTorus",
            SpecKind::NormTorusCover => "NormTorusCover",
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SpecKind::GL(m) | SpecKind::SL(m) | SpecKind::Sp(m) | SpecKind::SO(m) | SpecKind::SU(m) => m,
            SpecKind::Gm => 1,
            SpecKind::Ga | SpecKind::NormTorus => 2,
            SpecKind::NormTorusCover => 3,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Degree `e` of F_q over F_p.
    pub fn base_degree(&self) -> usize {
        self.e as usize
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// Same group over a different base field of the same characteristic.
    pub fn with_q(&self, q: u64) -> Result<Self> {
        let mut s = Self::new(self.kind, q)?;
        s.generators = self.generators.clone();
        Ok(s)
    }

    /// Degree over F_p of the field holding the entries of `G(F_{q^n})`.
    pub fn entry_degree(&self, n: usize) -> usize {
        match self.kind {
            SpecKind::SU(_) => 2 * self.base_degree() * n,
            _ => self.base_degree() * n,
        }
    }

    /// The p-power exponent implementing `sigma_{q^n}`.
    pub fn frobenius_exponent(&self, n: usize) -> u64 {
        (self.base_degree() * n) as u64
    }

    pub fn default_strategy(&self) -> Strategy {
        match self.kind {
            SpecKind::Gm | SpecKind::Ga | SpecKind::NormTorus | SpecKind::NormTorusCover => Strategy::Parametrized,
            SpecKind::GL(_) | SpecKind::SL(_) => Strategy::GeneratorClosure,
            _ if !self.generators.is_empty() => Strategy::GeneratorClosure,
            _ => Strategy::FullScan,
        }
    }

    fn form(&self, f: &AmbientField) -> Option<Matrix> {
        match self.kind {
            SpecKind::Sp(m) => {
                let h = m / 2;
                let mut j = Matrix::from_entries(m, vec![f.zero(); m * m]);
                for i in 0..h {
                    j.set(i, h + i, f.one());
                    j.set(h + i, i, f.from_int(-1));
                }
                Some(j)
            }
            SpecKind::SO(m) | SpecKind::SU(m) => {
                let mut j = Matrix::from_entries(m, vec![f.zero(); m * m]);
                for i in 0..m {
                    j.set(i, m - 1 - i, f.one());
                }
                Some(j)
            }
            _ => None,
        }
    }

    /// Defining equations only (entries may be anywhere in the ambient
    /// field). `n` selects the Frobenius used by the unitary condition.
    pub fn satisfies_equations(&self, g: &Matrix, n: usize, f: &AmbientField) -> bool {
        if g.dim() != self.dim() {
            return false;
        }
        let one = f.one();
        match self.kind {
            SpecKind::GL(_) => !g.det(f).is_zero(),
            SpecKind::SL(_) => g.det(f) == one,
            SpecKind::Sp(_) => {
                let j = self.form(f).unwrap();
                g.transpose().mul(&j, f).mul(g, f) == j
            }
            SpecKind::SO(_) => {
                let j = self.form(f).unwrap();
                g.det(f) == one && g.transpose().mul(&j, f).mul(g, f) == j
            }
            SpecKind::SU(_) => {
                let j = self.form(f).unwrap();
                let conj = g.frobenius(self.frobenius_exponent(n), f).transpose();
                g.det(f) == one && conj.mul(&j, f).mul(g, f) == j
            }
            SpecKind::Gm => !g.get(0, 0).is_zero(),
            SpecKind::Ga => g.get(0, 0) == one && g.get(1, 1) == one && g.get(1, 0).is_zero(),
            SpecKind::NormTorus => torus_coords(g, f).is_some_and(|(a, b)| !norm(f, a, b).is_zero()),
            SpecKind::NormTorusCover => {
                let block = top_left_block(g, f);
                let Some((a, b)) = torus_coords(&block, f) else { return false };
                let zero_border = [(0, 2), (1, 2), (2, 0), (2, 1)].iter().all(|&(i, j)| g.get(i, j).is_zero());
                let c = g.get(2, 2);
                let nm = norm(f, a, b);
                zero_border && !nm.is_zero() && f.mul(c, c) == nm
            }
        }
    }

    /// Membership in `G(F_{q^n})`: entries in the right subfield and the
    /// defining equations hold.
    pub fn contains(&self, g: &Matrix, n: usize, f: &AmbientField) -> bool {
        let d = self.entry_degree(n);
        f.degree() % d == 0 && g.entries_in_subfield(d, f) && self.satisfies_equations(g, n, f)
    }

    fn check_level(&self, n: usize, f: &AmbientField) -> Result<()> {
        if n == 0 {
            return Err(Error::Unsupported("level n must be positive".into()));
        }
        if f.characteristic() != self.p {
            return Err(Error::Unsupported(format!(
                "characteristic {} does not match field characteristic {}",
                self.p,
                f.characteristic()
            )));
        }
        let needed = self.entry_degree(n);
        if f.degree() % needed != 0 {
            return Err(Error::SubfieldUnavailable { needed, degree: f.degree() });
        }
        Ok(())
    }

    /// Standard generators of `G(F_{q^n})` for closure enumeration.
    pub fn standard_generators(&self, n: usize, f: &AmbientField) -> Result<Vec<Matrix>> {
        self.check_level(n, f)?;
        let d = self.entry_degree(n);
        match self.kind {
            SpecKind::GL(m) | SpecKind::SL(m) => {
                let basis = f.subfield_basis(d)?;
                let mut gens = Vec::new();
                for i in 0..m {
                    for j in 0..m {
                        if i == j {
                            continue;
                        }
                        for &t in &basis {
                            let mut g = Matrix::identity(f, m);
                            g.set(i, j, t);
                            gens.push(g);
                        }
                    }
                }
                if let SpecKind::GL(_) = self.kind {
                    let mut diag = vec![f.one(); m];
                    diag[0] = f.subfield_primitive(d)?;
                    gens.push(Matrix::diagonal(f, &diag));
                }
                Ok(gens)
            }
            _ if !self.generators.is_empty() => {
                let gens: Vec<Matrix> =
                    self.generators.iter().map(|g| Matrix::from_ints(f, self.dim(), g)).collect();
                if let Some(bad) = gens.iter().position(|g| !self.contains(g, n, f)) {
                    return Err(Error::Unsupported(format!("supplied generator {bad} is not in {self}")));
                }
                Ok(gens)
            }
            _ => Err(Error::Unsupported(format!("{self} has no standard generators"))),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpecKind::GL(m) | SpecKind::SL(m) | SpecKind::Sp(m) | SpecKind::SO(m) | SpecKind::SU(m) => {
                write!(f, "{}({m}, q={})", self.name(), self.q())
            }
            _ => write!(f, "{}(q={})", self.name(), self.q()),
        }
    }
}

/// `a^2 - ab + b^2`.
pub fn norm(f: &AmbientField, a: Fe, b: Fe) -> Fe {
    f.add(f.sub(f.mul(a, a), f.mul(a, b)), f.mul(b, b))
}

/// The matrix `[[a, -b], [b, a - b]]`.
pub fn torus_matrix(f: &AmbientField, a: Fe, b: Fe) -> Matrix {
    Matrix::from_entries(2, vec![a, f.neg(b), b, f.sub(a, b)])
}

/// The cover element `diag([[a, -b], [b, a - b]], c)`.
pub fn cover_matrix(f: &AmbientField, a: Fe, b: Fe, c: Fe) -> Matrix {
    let z = f.zero();
    Matrix::from_entries(3, vec![a, f.neg(b), z, b, f.sub(a, b), z, z, z, c])
}

/// Recovers `(a, b)` when `g` has the torus shape.
pub fn torus_coords(g: &Matrix, f: &AmbientField) -> Option<(Fe, Fe)> {
    if g.dim() != 2 {
        return None;
    }
    let (a, b) = (g.get(0, 0), g.get(1, 0));
    (g.get(0, 1) == f.neg(b) && g.get(1, 1) == f.sub(a, b)).then_some((a, b))
}

pub fn top_left_block(g: &Matrix, _f: &AmbientField) -> Matrix {
    Matrix::from_entries(2, vec![g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1)])
}

/// Enumerates `G(F_{q^n})` inside the ambient field with the spec's default
/// strategy.
pub fn rational_points(spec: &GroupSpec, n: usize, field: &Arc<AmbientField>, bounds: EnumBounds) -> Result<FiniteGroup> {
    rational_points_with(spec, n, field, spec.default_strategy(), bounds)
}

pub fn rational_points_with(
    spec: &GroupSpec,
    n: usize,
    field: &Arc<AmbientField>,
    strategy: Strategy,
    bounds: EnumBounds,
) -> Result<FiniteGroup> {
    spec.check_level(n, field)?;
    let f: &AmbientField = field;
    let d = spec.entry_degree(n);
    let too_big = |size: usize| Error::BoundExceeded {
        what: format!("{spec} at n={n}"),
        size: size as u128,
        bound: bounds.max_order as u128,
    };
    let elements = match strategy {
        Strategy::Parametrized => {
            let sub = f.enumerate_subfield_bounded(d, bounds.scan_limit)?;
            let mut out = Vec::new();
            match spec.kind {
                SpecKind::Gm => out.extend(sub.iter().filter(|x| !x.is_zero()).map(|&x| Matrix::from_entries(1, vec![x]))),
                SpecKind::Ga => out.extend(
                    sub.iter().map(|&x| Matrix::from_entries(2, vec![f.one(), x, f.zero(), f.one()])),
                ),
                SpecKind::NormTorus | SpecKind::NormTorusCover => {
                    check_scan(sub.len() as u128 * sub.len() as u128, bounds, spec)?;
                    let mut roots: HashMap<Fe, Vec<Fe>> = HashMap::new();
                    if spec.kind == SpecKind::NormTorusCover {
                        for &c in &sub {
                            roots.entry(f.mul(c, c)).or_default().push(c);
                        }
                    }
                    for &a in &sub {
                        for &b in &sub {
                            let nm = norm(f, a, b);
                            if nm.is_zero() {
                                continue;
                            }
                            if spec.kind == SpecKind::NormTorus {
                                out.push(torus_matrix(f, a, b));
                            } else if let Some(cs) = roots.get(&nm) {
                                out.extend(cs.iter().map(|&c| cover_matrix(f, a, b, c)));
                            }
                            if out.len() > bounds.max_order {
                                return Err(too_big(out.len()));
                            }
                        }
                    }
                }
                _ => return Err(Error::Unsupported(format!("{spec} has no parametrization"))),
            }
            out
        }
        Strategy::GeneratorClosure => {
            let gens = spec.standard_generators(n, f)?;
            return FiniteGroup::closure(field.clone(), spec.dim(), &gens, bounds.max_order);
        }
        Strategy::FullScan => {
            let sub = f.enumerate_subfield_bounded(d, bounds.scan_limit)?;
            let m = spec.dim();
            let total = (sub.len() as u128).checked_pow((m * m) as u32).unwrap_or(u128::MAX);
            check_scan(total, bounds, spec)?;
            let mut out = Vec::new();
            let mut digits = vec![0usize; m * m];
            loop {
                let g = Matrix::from_entries(m, digits.iter().map(|&i| sub[i]).collect());
                if spec.satisfies_equations(&g, n, f) {
                    out.push(g);
                    if out.len() > bounds.max_order {
                        return Err(too_big(out.len()));
                    }
                }
                let mut i = m * m;
                loop {
                    if i == 0 {
                        return FiniteGroup::from_elements(field.clone(), m, out);
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < sub.len() {
                        break;
                    }
                    digits[i] = 0;
                }
            }
        }
    };
    if elements.len() > bounds.max_order {
        return Err(too_big(elements.len()));
    }
    FiniteGroup::from_elements(field.clone(), spec.dim(), elements)
}

fn check_scan(total: u128, bounds: EnumBounds, spec: &GroupSpec) -> Result<()> {
    if total > bounds.scan_limit as u128 {
        return Err(Error::BoundExceeded {
            what: format!("scan domain of {spec}"),
            size: total,
            bound: bounds.scan_limit as u128,
        });
    }
    Ok(())
}

/// Builds the smallest ambient field containing `G(F_{q^n})`.
pub fn field_for(spec: &GroupSpec, n: usize) -> Result<Arc<AmbientField>> {
    Ok(Arc::new(AmbientField::new(spec.characteristic(), spec.entry_degree(n))?))
}
