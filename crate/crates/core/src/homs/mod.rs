//! Isogenies between built-in groups: kernels, rational images, the Lang
//! map, the cokernel isomorphism `mu`, quotient isogenies and fiber products.

mod cokernel;
mod isogeny;

pub use cokernel::{
    cokernel, kernel_points, kernel_points_in, CokernelData, KernelData, MuCheck, MuContext, ReachOutcome,
    MU_TABLE_LIMIT,
};
pub use isogeny::{power_isogeny, FiberSolver, Isogeny, ISOGENY_CATALOG};

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffield::AmbientField;
use crate::group::{self, Group};
use crate::matgroup::{field_for, rational_points, EnumBounds, FiniteGroup, GroupSpec, Matrix};

/// Pairs checked exhaustively below this many; sampled above.
const EXHAUSTIVE_PAIRS: usize = 512;
const SAMPLED_PAIRS: usize = 2000;

/// `phi(G'(F_{q^n}))` inside `G(F_{q^n})`, with the map on rational points.
#[derive(Debug, Clone)]
pub struct ImageData {
    pub domain: FiniteGroup,
    pub codomain: FiniteGroup,
    /// `map[y]` is the codomain id of `phi(y)`.
    pub map: Vec<usize>,
    /// Sorted codomain ids of the image.
    pub image: Vec<usize>,
    /// Domain ids mapping to the identity.
    pub kernel_rational: Vec<usize>,
}

impl ImageData {
    pub fn index(&self) -> usize {
        self.codomain.order() / self.image.len()
    }
}

/// The rational image at level `n`, computed in the smallest ambient field
/// containing both point groups.
pub fn image_of_rational(phi: &Isogeny, n: usize, bounds: EnumBounds) -> Result<ImageData> {
    let field = field_for(&phi.codomain(), n)?;
    image_in_field(phi, n, &field, bounds)
}

/// As [`image_of_rational`], inside a caller-chosen ambient field.
pub fn image_in_field(phi: &Isogeny, n: usize, field: &Arc<AmbientField>, bounds: EnumBounds) -> Result<ImageData> {
    let domain = rational_points(&phi.domain(), n, field, bounds)?;
    let codomain = rational_points(&phi.codomain(), n, field, bounds)?;
    let mut map = Vec::with_capacity(domain.order());
    for y in domain.elements() {
        let x = phi.apply(y, field);
        let id = codomain
            .id_of(&x)
            .ok_or_else(|| Error::NotIsogeny(format!("{} leaves the codomain", phi.name())))?;
        map.push(id);
    }
    let mut image = map.clone();
    image.sort_unstable();
    image.dedup();
    let kernel_rational = (0..domain.order()).filter(|&y| map[y] == codomain.identity()).collect();
    let gens = group::small_generating_set(&codomain, 0);
    if !group::is_subgroup(&codomain, &image) || !group::is_normalized_by(&codomain, &image, &gens) {
        return Err(Error::NotHomomorphism(format!("image of {} is not a normal subgroup", phi.name())));
    }
    Ok(ImageData { domain, codomain, map, image, kernel_rational })
}

/// `[G(F_{q^n}) : phi(G'(F_{q^n}))]` against `|ker phi(F_{q^n})|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageIndexCheck {
    pub index: usize,
    pub kernel_rational_size: usize,
    pub equal: bool,
}

pub fn check_image_index(phi: &Isogeny, n: usize, bounds: EnumBounds) -> Result<ImageIndexCheck> {
    let data = image_of_rational(phi, n, bounds)?;
    let index = data.index();
    let kernel_rational_size = data.kernel_rational.len();
    Ok(ImageIndexCheck { index, kernel_rational_size, equal: index == kernel_rational_size })
}

/// The Lang map `y -> y^{-1} sigma_{q^n}(y)` for `y` in a group of `spec`.
pub fn lang_map(y: &Matrix, spec: &GroupSpec, n: usize, f: &AmbientField) -> Matrix {
    let inv = y.inverse(f).expect("group elements are invertible");
    inv.mul(&y.frobenius(spec.frobenius_exponent(n), f), f)
}

/// `G / K` for a central subgroup `K`, on canonical coset representatives
/// (the smallest id of each coset). Products are computed through the parent.
#[derive(Debug, Clone)]
pub struct QuotientGroup<'a, G: Group + ?Sized> {
    parent: &'a G,
    reps: Vec<usize>,
    class_of: Vec<u32>,
}

impl<G: Group + ?Sized> QuotientGroup<'_, G> {
    /// Smallest parent id of each coset, indexed by quotient id.
    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    /// Quotient id of a parent element.
    pub fn project(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }
}

impl<G: Group + ?Sized> Group for QuotientGroup<'_, G> {
    fn order(&self) -> usize {
        self.reps.len()
    }

    fn identity(&self) -> usize {
        self.project(self.parent.identity())
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.project(self.parent.mul(self.reps[a], self.reps[b]))
    }

    fn inv(&self, a: usize) -> usize {
        self.project(self.parent.inv(self.reps[a]))
    }
}

/// Quotient by a central subgroup together with the projection
/// `parent id -> quotient id`.
pub fn quotient_by_central<'a, G: Group + ?Sized>(
    g: &'a G,
    k: &[usize],
) -> Result<(QuotientGroup<'a, G>, Vec<usize>)> {
    let mut k = k.to_vec();
    k.sort_unstable();
    k.dedup();
    if !group::is_subgroup(g, &k) {
        return Err(Error::NotSubgroup("quotient by a non-subgroup".into()));
    }
    let gens = group::small_generating_set(g, 0);
    if !k.iter().all(|&a| gens.iter().all(|&s| g.mul(a, s) == g.mul(s, a))) {
        return Err(Error::NotCentral);
    }
    const UNSET: u32 = u32::MAX;
    let mut class_of = vec![UNSET; g.order()];
    let mut reps = Vec::with_capacity(g.order() / k.len());
    for x in 0..g.order() {
        if class_of[x] != UNSET {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(x);
        for &a in &k {
            class_of[g.mul(x, a)] = c;
        }
    }
    let projection = class_of.iter().map(|&c| c as usize).collect();
    Ok((QuotientGroup { parent: g, reps, class_of }, projection))
}

/// Checks `f(ab) = f(a)f(b)` on all pairs of a small domain, or on seeded
/// random pairs of a large one.
pub fn check_homomorphism<A: Group + ?Sized, C: Group + ?Sized>(a: &A, f: &[usize], c: &C, seed: u64) -> bool {
    if f.len() != a.order() || f[a.identity()] != c.identity() {
        return false;
    }
    let n = a.order();
    if n <= EXHAUSTIVE_PAIRS {
        return (0..n).all(|x| (0..n).all(|y| f[a.mul(x, y)] == c.mul(f[x], f[y])));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..SAMPLED_PAIRS).all(|_| {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        f[a.mul(x, y)] == c.mul(f[x], f[y])
    })
}

/// The subgroup `{(a, b) : psi(a) = pi(b)}` of `A x B` with its projections.
#[derive(Debug, Clone)]
pub struct FiberProduct<'a, A: Group + ?Sized, B: Group + ?Sized> {
    a: &'a A,
    b: &'a B,
    pairs: Vec<(usize, usize)>,
}

impl<A: Group + ?Sized, B: Group + ?Sized> FiberProduct<'_, A, B> {
    /// Member pairs in lexicographic order; the id of a pair is its position.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn project_a(&self, id: usize) -> usize {
        self.pairs[id].0
    }

    pub fn project_b(&self, id: usize) -> usize {
        self.pairs[id].1
    }

    fn id_of(&self, pair: (usize, usize)) -> usize {
        self.pairs.binary_search(&pair).expect("fiber product is closed")
    }
}

impl<A: Group + ?Sized, B: Group + ?Sized> Group for FiberProduct<'_, A, B> {
    fn order(&self) -> usize {
        self.pairs.len()
    }

    fn identity(&self) -> usize {
        self.id_of((self.a.identity(), self.b.identity()))
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        let (a1, b1) = self.pairs[x];
        let (a2, b2) = self.pairs[y];
        self.id_of((self.a.mul(a1, a2), self.b.mul(b1, b2)))
    }

    fn inv(&self, x: usize) -> usize {
        let (a, b) = self.pairs[x];
        self.id_of((self.a.inv(a), self.b.inv(b)))
    }
}

/// Fiber product of `psi: A -> C` and `pi: B -> C`, given as id maps.
pub fn fiber_product<'a, A, B, C>(
    a: &'a A,
    psi: &[usize],
    b: &'a B,
    pi: &[usize],
    c: &C,
) -> Result<FiberProduct<'a, A, B>>
where
    A: Group + ?Sized,
    B: Group + ?Sized,
    C: Group + ?Sized,
{
    if !check_homomorphism(a, psi, c, 0) {
        return Err(Error::NotHomomorphism("first map of the fiber product".into()));
    }
    if !check_homomorphism(b, pi, c, 1) {
        return Err(Error::NotHomomorphism("second map of the fiber product".into()));
    }
    let mut by_value: Vec<Vec<usize>> = vec![Vec::new(); c.order()];
    for (y, &v) in pi.iter().enumerate() {
        by_value[v].push(y);
    }
    let mut pairs = Vec::new();
    for (x, &v) in psi.iter().enumerate() {
        pairs.extend(by_value[v].iter().map(|&y| (x, y)));
    }
    Ok(FiberProduct { a, b, pairs })
}
