//! Matrices over the ambient field, group specifications, and enumeration
//! of rational-point groups `G(F_{q^n})` as Frobenius fixed points.

mod finite;
mod matrix;
mod spec;

pub use finite::{FiniteGroup, DEFAULT_TABLE_THRESHOLD};
pub use matrix::Matrix;
pub use spec::{
    cover_matrix, field_for, norm, rational_points, rational_points_with, top_left_block, torus_coords,
    torus_matrix, EnumBounds, GroupSpec, SpecKind, Strategy, CATALOG,
};

use crate::error::Result;
use crate::ffield::AmbientField;
use crate::group::Group;

/// Entrywise Frobenius `x -> x^{p^e}`; `sigma_{q^n}` is `e = base_degree * n`.
pub fn frobenius_map(g: &Matrix, e: u64, field: &AmbientField) -> Matrix {
    g.frobenius(e, field)
}

/// The subgroup of `group` fixed by the entrywise Frobenius with exponent `e`.
pub fn fixed_subgroup(group: &FiniteGroup, e: u64) -> Result<FiniteGroup> {
    let f = group.field();
    let ids: Vec<usize> = (0..group.order())
        .filter(|&i| {
            let g = group.element(i);
            &g.frobenius(e, f) == g
        })
        .collect();
    group.subgroup(&ids)
}

/// Constructors available in the built-in catalog, one per stable name.
pub fn builtin_specs(dim: usize, q: u64) -> Vec<Result<GroupSpec>> {
    CATALOG.iter().map(|name| GroupSpec::from_name(name, dim, q)).collect()
}
