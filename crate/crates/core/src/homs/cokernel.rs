use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_homomorphism, image_of_rational, lang_map, quotient_by_central, FiberSolver, Isogeny};
use crate::arith;
use crate::error::{Error, Result};
use crate::ffield::{AmbientField, MAX_FIELD_SIZE};
use crate::group::{self, Group};
use crate::matgroup::{rational_points, EnumBounds, FiniteGroup, Matrix};

/// Largest `|G(F_{q^n})|` for which `cokernel` fills and verifies `mu`.
pub const MU_TABLE_LIMIT: usize = 512;

/// Kernels are checked to be central against every domain point up to this
/// size and against a random sample above it.
const CENTRALITY_EXHAUSTIVE: usize = 4096;

/// The geometric kernel of an isogeny, captured in some ambient field.
#[derive(Debug, Clone)]
pub struct KernelData {
    pub group: FiniteGroup,
    /// Smallest `m` with every kernel point rational over F_{q^m}.
    pub minimal_degree: usize,
}

/// Kernel points of `phi` in the given ambient field; fails unless the
/// whole geometric kernel is present.
pub fn kernel_points_in(phi: &Isogeny, field: &Arc<AmbientField>) -> Result<KernelData> {
    let solver = FiberSolver::new(phi, field)?;
    kernel_with_solver(phi, field, &solver)
}

fn kernel_with_solver(phi: &Isogeny, field: &Arc<AmbientField>, solver: &FiberSolver) -> Result<KernelData> {
    let identity = Matrix::identity(field, phi.codomain().dim());
    let points = solver.fiber(&identity)?;
    if points.len() != phi.order() {
        return Err(Error::KernelNotCaptured {
            found: points.len(),
            expected: phi.order(),
            max_degree: field.degree(),
        });
    }
    let e = phi.codomain().base_degree();
    if field.degree() % e != 0 {
        return Err(Error::NotDivisor { d: e, degree: field.degree() });
    }
    let top = field.degree() / e;
    let minimal_degree = (1..=top)
        .filter(|d| top % d == 0)
        .find(|&d| points.iter().all(|g| g.entries_in_subfield(e * d, field)))
        .expect("the ambient field itself contains the kernel");
    let group = FiniteGroup::from_elements(field.clone(), phi.domain().dim(), points)?;
    Ok(KernelData { group, minimal_degree })
}

/// Escalates the ambient degree `s = 1, 2, ...` up to the isogeny's
/// kernel-degree bound until the full kernel appears.
pub fn kernel_points(phi: &Isogeny) -> Result<KernelData> {
    let cod = phi.codomain();
    let (p, e) = (cod.characteristic(), cod.base_degree());
    let s_max = phi.kernel_degree_bound();
    let mut found = 0;
    for s in 1..=s_max {
        let degree = arith::lcm((e * s) as u64, phi.aux_degree() as u64) as usize;
        let field = Arc::new(AmbientField::new(p, degree)?);
        match kernel_points_in(phi, &field) {
            Ok(k) => return Ok(k),
            Err(Error::KernelNotCaptured { found: f, .. }) => found = f,
            Err(err) => return Err(err),
        }
    }
    Err(Error::KernelNotCaptured { found, expected: phi.order(), max_degree: s_max })
}

/// Both sides of the cokernel isomorphism at level `n`.
#[derive(Debug, Clone)]
pub struct CokernelData {
    pub group_order: usize,
    pub image_order: usize,
    /// Invariant factors of `G(F_{q^n}) / phi(G'(F_{q^n}))`.
    pub cokernel_invariants: Vec<u64>,
    pub kernel_order: usize,
    pub minimal_kernel_degree: usize,
    /// `lambda_{q^n}(ker phi)`, as matrices of the kernel's ambient field.
    pub lambda_kernel: Vec<Matrix>,
    /// Invariant factors of `ker phi / lambda_{q^n}(ker phi)`.
    pub kernel_quotient_invariants: Vec<u64>,
    pub isomorphic: bool,
    /// Present when `|G(F_{q^n})|` is within the table limit.
    pub mu: Option<MuCheck>,
}

impl CokernelData {
    pub fn cokernel_order(&self) -> usize {
        self.group_order / self.image_order
    }
}

/// Computes the cokernel, `lambda(ker)`, and (for small groups) the `mu`
/// table, searching preimages up to degree `n * s_search` over F_q.
pub fn cokernel(
    phi: &Isogeny,
    n: usize,
    s_search: Option<usize>,
    mu_limit: usize,
    bounds: EnumBounds,
) -> Result<CokernelData> {
    let image = image_of_rational(phi, n, bounds)?;
    let g = &image.codomain;
    let gens = group::small_generating_set(g, 0);
    let cokernel_invariants = group::quotient_abelian_invariants(g, &image.image, &gens)?;

    let kernel = kernel_points(phi)?;
    let kf = kernel.group.field().clone();
    let spec = phi.domain();
    let lambda_ids = lambda_ids(&kernel.group, |a| lang_map(a, &spec, n, &kf))?;
    let kgens = group::small_generating_set(&kernel.group, 0);
    let kernel_quotient_invariants = group::quotient_abelian_invariants(&kernel.group, &lambda_ids, &kgens)?;

    let mu = if g.order() <= mu_limit {
        let s_search = s_search.unwrap_or(phi.order() * phi.order()).max(1);
        let ctx = MuContext::build(phi, n, s_search, bounds)?;
        Some(ctx.verify(0))
    } else {
        None
    };
    Ok(CokernelData {
        group_order: g.order(),
        image_order: image.image.len(),
        isomorphic: cokernel_invariants == kernel_quotient_invariants,
        cokernel_invariants,
        kernel_order: kernel.group.order(),
        minimal_kernel_degree: kernel.minimal_degree,
        lambda_kernel: lambda_ids.iter().map(|&i| kernel.group.element(i).clone()).collect(),
        kernel_quotient_invariants,
        mu,
    })
}

fn lambda_ids(kernel: &FiniteGroup, lang: impl Fn(&Matrix) -> Matrix) -> Result<Vec<usize>> {
    let mut ids = Vec::with_capacity(kernel.order());
    for a in kernel.elements() {
        let l = lang(a);
        ids.push(
            kernel
                .id_of(&l)
                .ok_or_else(|| Error::HypothesisViolated("kernel is not Frobenius-stable".into()))?,
        );
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

/// Outcome of verifying `mu` on a finite instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuCheck {
    /// Degree over F_p of the field where all preimages were found.
    pub ambient_degree: usize,
    /// The escalation step `s` that succeeded.
    pub s_used: usize,
    pub homomorphism: bool,
    pub surjective: bool,
    pub kernel_is_image: bool,
    /// Every kernel point commutes with the rational domain points.
    pub kernel_central: bool,
    /// `(x, mu(x))` for the smallest `x` of each coset of the image; ids are
    /// relative to the enumeration in the `mu` ambient field.
    pub transversal: Vec<(usize, usize)>,
}

impl MuCheck {
    pub fn passed(&self) -> bool {
        self.homomorphism && self.surjective && self.kernel_is_image && self.kernel_central
    }
}

/// Everything needed to evaluate `mu_{q^n}` inside one ambient field that
/// holds the kernel and a preimage of every rational point.
#[derive(Debug, Clone)]
pub struct MuContext {
    phi: Isogeny,
    n: usize,
    s_used: usize,
    group: FiniteGroup,
    domain: FiniteGroup,
    kernel: FiniteGroup,
    lambda: Vec<usize>,
    /// Coset of `lambda(ker)` for every kernel id.
    class_of: Vec<usize>,
    preimages: Vec<Matrix>,
    mu: Vec<usize>,
    image: Vec<usize>,
}

/// Whether the induced isogeny built from a subgroup `H` reaches it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachOutcome {
    /// Kernel ids (in [`MuContext::kernel`]) of `K_{q^n}`.
    pub kernel_subgroup: Vec<usize>,
    /// `|G''(F_{q^n})|`, which must equal `|G(F_{q^n})|`.
    pub quotient_order: usize,
    pub reaches: bool,
}

impl MuContext {
    /// Tries `s = 1..=s_search`, using the smallest ambient field that holds
    /// `G(F_{q^{ns}})`, the kernel and the isogeny's auxiliary roots.
    pub fn build(phi: &Isogeny, n: usize, s_search: usize, bounds: EnumBounds) -> Result<Self> {
        let kernel = kernel_points(phi)?;
        let cod = phi.codomain();
        let (p, e) = (cod.characteristic(), cod.base_degree() as u64);
        let mut last = String::from("no escalation step attempted");
        for s in 1..=s_search {
            let degree = arith::lcm(
                arith::lcm(e * (n * s) as u64, e * kernel.minimal_degree as u64),
                phi.aux_degree() as u64,
            ) as usize;
            let field = match AmbientField::with_bound(p, degree, MAX_FIELD_SIZE) {
                Ok(f) => Arc::new(f),
                Err(Error::FieldTooLarge { .. }) => {
                    last = format!("F_{p}^{degree} exceeds the field size limit at s = {s}");
                    break;
                }
                Err(err) => return Err(err),
            };
            match Self::in_field(phi, n, &field, bounds) {
                Ok(mut ctx) => {
                    ctx.s_used = s;
                    return Ok(ctx);
                }
                Err(Error::PreimageNotFound { detail, .. }) => last = detail,
                Err(err) => return Err(err),
            }
        }
        Err(Error::PreimageNotFound { s_search, detail: last })
    }

    /// Builds the context in a fixed ambient field, failing with
    /// `PreimageNotFound` when some rational point has no preimage there.
    pub fn in_field(phi: &Isogeny, n: usize, field: &Arc<AmbientField>, bounds: EnumBounds) -> Result<Self> {
        let solver = FiberSolver::new(phi, field)?;
        let kernel = kernel_with_solver(phi, field, &solver)?.group;
        let group = rational_points(&phi.codomain(), n, field, bounds)?;
        let mut preimages = Vec::with_capacity(group.order());
        for (i, x) in group.elements().iter().enumerate() {
            match solver.fiber(x)?.into_iter().next() {
                Some(y) => preimages.push(y),
                None => {
                    return Err(Error::PreimageNotFound {
                        s_search: 0,
                        detail: format!(
                            "element {i} of {} has no preimage over F_{}^{}",
                            phi.codomain(),
                            field.characteristic(),
                            field.degree()
                        ),
                    })
                }
            }
        }
        let spec = phi.domain();
        let lambda = lambda_ids(&kernel, |a| lang_map(a, &spec, n, field))?;
        let (_, class_of) = quotient_by_central(&kernel, &lambda)?;
        let mut mu = Vec::with_capacity(group.order());
        for y in &preimages {
            let l = lang_map(y, &spec, n, field);
            let a = kernel
                .id_of(&l)
                .ok_or_else(|| Error::HypothesisViolated("Lang image of a preimage left the kernel".into()))?;
            mu.push(class_of[a]);
        }
        let domain = rational_points(&spec, n, field, bounds)?;
        let mut image: Vec<usize> = domain
            .elements()
            .iter()
            .map(|y| group.id_of(&phi.apply(y, field)).expect("rational points map to rational points"))
            .collect();
        image.sort_unstable();
        image.dedup();
        Ok(MuContext {
            phi: phi.clone(),
            n,
            s_used: 1,
            group,
            domain,
            kernel,
            lambda,
            class_of,
            preimages,
            mu,
            image,
        })
    }

    pub fn field(&self) -> &Arc<AmbientField> {
        self.group.field()
    }

    /// `G(F_{q^n})` enumerated in this context's ambient field.
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// `G'(F_{q^n})` in the same ambient field.
    pub fn domain(&self) -> &FiniteGroup {
        &self.domain
    }

    pub fn kernel(&self) -> &FiniteGroup {
        &self.kernel
    }

    pub fn lambda(&self) -> &[usize] {
        &self.lambda
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn s_used(&self) -> usize {
        self.s_used
    }

    /// `mu(x)` as a coset index of `lambda(ker)` in the kernel.
    pub fn mu(&self, x: usize) -> usize {
        self.mu[x]
    }

    /// Checks that `mu` is a surjective homomorphism with kernel the image.
    pub fn verify(&self, seed: u64) -> MuCheck {
        let (quot, _) = quotient_by_central(&self.kernel, &self.lambda).expect("lambda(ker) is a subgroup");
        let homomorphism = check_homomorphism(&self.group, &self.mu, &quot, seed);
        let mut hit = vec![false; quot.order()];
        for &c in &self.mu {
            hit[c] = true;
        }
        let surjective = hit.iter().all(|&h| h);
        let trivial = quot.identity();
        let kernel_of_mu: Vec<usize> = (0..self.group.order()).filter(|&x| self.mu[x] == trivial).collect();
        let kernel_is_image = kernel_of_mu == self.image;
        let transversal = group::right_coset_representatives(&self.group, &self.image)
            .into_iter()
            .map(|x| (x, self.mu[x]))
            .collect();
        MuCheck {
            ambient_degree: self.field().degree(),
            s_used: self.s_used,
            homomorphism,
            surjective,
            kernel_is_image,
            kernel_central: self.kernel_is_central(seed),
            transversal,
        }
    }

    /// Whether every kernel point commutes with the rational domain points
    /// (all of them up to a size limit, a seeded sample above).
    pub fn kernel_is_central(&self, seed: u64) -> bool {
        let f = self.field();
        let commutes = |a: &Matrix, y: &Matrix| a.mul(y, f) == y.mul(a, f);
        let dom = self.domain.elements();
        if dom.len() <= CENTRALITY_EXHAUSTIVE {
            return self.kernel.elements().iter().all(|a| dom.iter().all(|y| commutes(a, y)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..CENTRALITY_EXHAUSTIVE).all(|_| {
            let y = &dom[rng.gen_range(0..dom.len())];
            self.kernel.elements().iter().all(|a| commutes(a, y))
        })
    }

    /// Builds the quotient `G'' = G'/K` for `K = mu^{-1}`-pullback of
    /// `mu(H)` and checks whether its induced isogeny reaches `H`.
    ///
    /// `h` holds sorted ids of a subgroup of [`MuContext::group`] that must
    /// contain the rational image.
    pub fn induced_reaches(&self, h: &[usize]) -> Result<ReachOutcome> {
        let g = &self.group;
        let mut h = h.to_vec();
        h.sort_unstable();
        h.dedup();
        if !group::is_subgroup(g, &h) {
            return Err(Error::NotSubgroup("H is not a subgroup".into()));
        }
        let in_h = group::mask(g.order(), &h);
        if !self.image.iter().all(|&x| in_h[x]) {
            return Err(Error::HypothesisViolated("H does not contain the rational image".into()));
        }
        let mut in_kbar = vec![false; self.kernel.order()];
        for &x in &h {
            in_kbar[self.mu[x]] = true;
        }
        let kernel_subgroup: Vec<usize> = (0..self.kernel.order()).filter(|&a| in_kbar[self.class_of[a]]).collect();
        let in_k = group::mask(self.kernel.order(), &kernel_subgroup);

        // The full preimage of G(F_{q^n}) under phi.
        let f = self.field();
        let mut gens: Vec<Matrix> =
            group::small_generating_set(g, 0).into_iter().map(|x| self.preimages[x].clone()).collect();
        gens.extend(group::small_generating_set(&self.kernel, 0).into_iter().map(|a| self.kernel.element(a).clone()));
        let bound = g.order() * self.kernel.order();
        let dim = self.phi.domain().dim();
        let full = FiniteGroup::closure(f.clone(), dim, &gens, bound)?;
        if full.order() != bound {
            return Err(Error::HypothesisViolated(format!(
                "preimage group has order {} instead of {bound}",
                full.order()
            )));
        }
        let spec = self.phi.domain();
        let selected: Vec<Matrix> = full
            .elements()
            .iter()
            .filter(|y| {
                let l = lang_map(y, &spec, self.n, f);
                self.kernel.id_of(&l).is_some_and(|a| in_k[a])
            })
            .cloned()
            .collect();
        let yk = FiniteGroup::from_elements(f.clone(), dim, selected)?;
        let k_in_yk: Vec<usize> = kernel_subgroup
            .iter()
            .map(|&a| yk.id_of(self.kernel.element(a)).expect("K lies in the selected group"))
            .collect();
        let (quot, projection) = quotient_by_central(&yk, &k_in_yk)?;
        let mut induced = vec![usize::MAX; quot.order()];
        for (y, m) in yk.elements().iter().enumerate() {
            let x = g
                .id_of(&self.phi.apply(m, f))
                .ok_or_else(|| Error::HypothesisViolated("induced map leaves G(F_{q^n})".into()))?;
            let c = projection[y];
            if induced[c] == usize::MAX {
                induced[c] = x;
            } else if induced[c] != x {
                return Err(Error::NotHomomorphism("induced map is not constant on cosets of K".into()));
            }
        }
        let mut reached = induced.clone();
        reached.sort_unstable();
        reached.dedup();
        Ok(ReachOutcome { kernel_subgroup, quotient_order: quot.order(), reaches: reached == h })
    }
}
