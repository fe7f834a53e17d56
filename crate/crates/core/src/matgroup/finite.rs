use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Matrix;
use crate::error::{Error, Result};
use crate::ffield::AmbientField;
use crate::group::Group;

/// Default size up to which a full multiplication table is cached.
pub const DEFAULT_TABLE_THRESHOLD: usize = 1024;

/// An explicitly enumerated group of matrices with canonical element ids.
///
/// Element ids follow the lexicographic order of the matrices, so id 0 is
/// the smallest matrix (not necessarily the identity).
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    field: Arc<AmbientField>,
    dim: usize,
    elements: Vec<Matrix>,
    index: HashMap<Matrix, u32>,
    identity: usize,
    inverses: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl FiniteGroup {
    /// Builds the group on a set of matrices already known to be closed
    /// (sorted and deduplicated here). Fails when the identity or an
    /// inverse is missing.
    pub fn from_elements(field: Arc<AmbientField>, dim: usize, elements: Vec<Matrix>) -> Result<Self> {
        Self::from_elements_with_threshold(field, dim, elements, DEFAULT_TABLE_THRESHOLD)
    }

    pub fn from_elements_with_threshold(
        field: Arc<AmbientField>,
        dim: usize,
        mut elements: Vec<Matrix>,
        table_threshold: usize,
    ) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        let index: HashMap<Matrix, u32> =
            elements.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let id = Matrix::identity(&field, dim);
        let identity = *index
            .get(&id)
            .ok_or_else(|| Error::NotSubgroup("identity missing".into()))? as usize;
        let mut inverses = Vec::with_capacity(elements.len());
        for m in &elements {
            let inv = m
                .inverse(&field)
                .and_then(|i| index.get(&i).copied())
                .ok_or_else(|| Error::NotSubgroup("inverse missing".into()))?;
            inverses.push(inv);
        }
        let mut group = FiniteGroup { field, dim, elements, index, identity, inverses, table: None };
        if group.order() <= table_threshold {
            let n = group.order();
            let mut table = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    let prod = group.elements[a].mul(&group.elements[b], &group.field);
                    table[a * n + b] = *group
                        .index
                        .get(&prod)
                        .ok_or_else(|| Error::NotSubgroup("not closed under products".into()))?;
                }
            }
            group.table = Some(table);
        }
        Ok(group)
    }

    /// Breadth-first closure of `gens` under right multiplication.
    pub fn closure(field: Arc<AmbientField>, dim: usize, gens: &[Matrix], bound: usize) -> Result<Self> {
        let id = Matrix::identity(&field, dim);
        let mut seen: HashMap<Matrix, ()> = HashMap::new();
        seen.insert(id.clone(), ());
        let mut queue = vec![id];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i].clone();
            for s in gens {
                let y = x.mul(s, &field);
                if !seen.contains_key(&y) {
                    if seen.len() >= bound {
                        return Err(Error::BoundExceeded {
                            what: "generator closure".into(),
                            size: seen.len() as u128 + 1,
                            bound: bound as u128,
                        });
                    }
                    seen.insert(y.clone(), ());
                    queue.push(y);
                }
            }
            i += 1;
        }
        Self::from_elements(field, dim, queue)
    }

    pub fn field(&self) -> &Arc<AmbientField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &Matrix {
        &self.elements[id]
    }

    pub fn id_of(&self, m: &Matrix) -> Option<usize> {
        self.index.get(m).map(|&i| i as usize)
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.index.contains_key(m)
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// The subgroup on the given ids, as a group in its own right.
    pub fn subgroup(&self, ids: &[usize]) -> Result<FiniteGroup> {
        let elems = ids.iter().map(|&i| self.elements[i].clone()).collect();
        FiniteGroup::from_elements(self.field.clone(), self.dim, elems)
    }

    /// Checks `g * h^-1` is in the group for `samples` random pairs.
    pub fn closure_audit(&self, samples: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.order();
        (0..samples).all(|_| {
            let g = &self.elements[rng.gen_range(0..n)];
            let h = &self.elements[rng.gen_range(0..n)];
            match h.inverse(&self.field) {
                Some(hi) => self.contains(&g.mul(&hi, &self.field)),
                None => false,
            }
        })
    }
}

impl Group for FiniteGroup {
    fn order(&self) -> usize {
        self.elements.len()
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        if let Some(t) = &self.table {
            return t[a * self.order() + b] as usize;
        }
        let prod = self.elements[a].mul(&self.elements[b], &self.field);
        self.index[&prod] as usize
    }

    fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }
}
