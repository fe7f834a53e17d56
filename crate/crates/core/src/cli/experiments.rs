use num_bigint::BigUint;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::report::{ordered_merge, CellRecord, Status};
use crate::arith;
use crate::census::{self, CensusBounds};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::homs::{check_image_index, cokernel, Isogeny, MuContext};
use crate::matgroup::{field_for, rational_points, FiniteGroup, GroupSpec, SpecKind};
use crate::orderform::{bn_order, center_order, closed_order, OrderFormula};

/// Short report label: `SL2`, `Gm`, `NormTorus`, ...
pub fn label(spec: &GroupSpec) -> String {
    match spec.kind() {
        SpecKind::GL(m) | SpecKind::SL(m) | SpecKind::Sp(m) | SpecKind::SO(m) | SpecKind::SU(m) => {
            format!("{}{m}", spec.name())
        }
        _ => spec.name().to_string(),
    }
}

/// Enumerates `G(F_{q^n})` in its natural ambient field.
pub fn enumerate(spec: &GroupSpec, n: usize, config: &ExperimentConfig) -> Result<FiniteGroup> {
    let field = field_for(spec, n)?;
    rational_points(spec, n, &field, config.enum_bounds())
}

/// Records the closed-form order and skips the cell when it exceeds the
/// configured group bound. Returns whether the cell may proceed.
fn admit(rec: &mut CellRecord, spec: &GroupSpec, n: usize, config: &ExperimentConfig) -> bool {
    match closed_order(spec, n) {
        Ok(order) => {
            rec.order = Some(order.to_string());
            if order > BigUint::from(config.bounds.group_order) {
                rec.skip(format!("|G| exceeds bounds.group_order = {}", config.bounds.group_order));
                return false;
            }
            true
        }
        Err(e) => {
            rec.skip(format!("no closed-form order: {e}"));
            false
        }
    }
}

fn record_enumerated(rec: &mut CellRecord, g: &FiniteGroup) {
    match &rec.order {
        Some(expected) => {
            let ok = *expected == g.order().to_string();
            rec.check(ok, "enumerated order equals the closed form");
        }
        None => rec.order = Some(g.order().to_string()),
    }
}

fn primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&p| arith::is_prime(p)).collect()
}

/// Runs one experiment and returns its cells in report order.
pub fn run_experiment(id: &str, config: &ExperimentConfig) -> Result<Vec<CellRecord>> {
    config.validate()?;
    let records = match id {
        "E1" => image_grid(config),
        "E2" => cokernel_grid(config),
        "E3" => progression(config),
        "E4" => simply_connected(config),
        "E5" => norm_torus(config),
        "E6" => order_formulas(config),
        "E7" => characteristic_scan(config),
        "E8" => additive(config),
        other => return Err(Error::Config(format!("unknown experiment '{other}'"))),
    };
    Ok(ordered_merge(records))
}

/// `(group, isogeny, q, n)` cells of an isogeny grid.
fn isogeny_cells(grid: &super::config::IsogenyGrid) -> Vec<(String, String, u64, usize)> {
    let mut names: Vec<String> = grid.powers.iter().map(|k| format!("pow:{k}")).collect();
    names.extend(grid.isogenies.iter().cloned());
    let mut cells = Vec::new();
    for group in &grid.groups {
        for name in &names {
            for &q in &grid.q {
                for n in 1..=grid.n_max {
                    cells.push((group.clone(), name.clone(), q, n));
                }
            }
        }
    }
    cells
}

/// Parses the cell's group and isogeny; skips the cell when the isogeny
/// does not apply to it.
fn isogeny_cell(
    experiment: &str,
    group: &str,
    name: &str,
    q: u64,
    n: usize,
    config: &ExperimentConfig,
) -> (CellRecord, Option<Isogeny>) {
    let mut rec = CellRecord::new(experiment, group, q, n);
    rec.isogeny = Some(name.to_string());
    let spec = match GroupSpec::from_name(group, 1, q) {
        Ok(s) => s,
        Err(e) => {
            rec.fail(e.to_string());
            return (rec, None);
        }
    };
    let phi = match Isogeny::parse(name, &spec) {
        Ok(phi) => phi,
        Err(e @ (Error::NotIsogeny(_) | Error::Unsupported(_))) => {
            rec.skip(format!("not applicable: {e}"));
            return (rec, None);
        }
        Err(e) => {
            rec.fail(e.to_string());
            return (rec, None);
        }
    };
    if !admit(&mut rec, &spec, n, config) {
        return (rec, None);
    }
    rec.flag("kernel_order", phi.order());
    (rec, Some(phi))
}

fn image_grid(config: &ExperimentConfig) -> Vec<CellRecord> {
    isogeny_cells(&config.e1)
        .par_iter()
        .map(|(group, name, q, n)| {
            let (mut rec, phi) = isogeny_cell("E1", group, name, *q, *n, config);
            let Some(phi) = phi else { return rec };
            match check_image_index(&phi, *n, config.enum_bounds()) {
                Ok(c) => {
                    rec.count = Some(c.index as u64);
                    rec.flag("index", c.index);
                    rec.flag("kernel_rational", c.kernel_rational_size);
                    rec.check(c.equal, "image index equals |ker(F_{q^n})|");
                }
                Err(e) => rec.fail(e.to_string()),
            }
            rec
        })
        .collect()
}

fn cokernel_grid(config: &ExperimentConfig) -> Vec<CellRecord> {
    isogeny_cells(&config.e2)
        .par_iter()
        .map(|(group, name, q, n)| {
            let (mut rec, phi) = isogeny_cell("E2", group, name, *q, *n, config);
            let Some(phi) = phi else { return rec };
            match cokernel(&phi, *n, config.bounds.s_search, config.bounds.mu_order, config.enum_bounds()) {
                Ok(c) => {
                    rec.count = Some(c.cokernel_order() as u64);
                    rec.flag("cokernel_invariants", &c.cokernel_invariants);
                    rec.flag("kernel_quotient_invariants", &c.kernel_quotient_invariants);
                    rec.flag("lambda_kernel_order", c.lambda_kernel.len());
                    rec.flag("minimal_kernel_degree", c.minimal_kernel_degree);
                    rec.check(c.isomorphic, "cokernel invariants equal those of ker/lambda(ker)");
                    match &c.mu {
                        Some(mu) => {
                            rec.flag("mu_checked", true);
                            rec.flag("mu_ambient_degree", mu.ambient_degree);
                            rec.flag("mu_s_used", mu.s_used);
                            rec.flag("mu_homomorphism", mu.homomorphism);
                            rec.flag("mu_surjective", mu.surjective);
                            rec.flag("mu_kernel_is_image", mu.kernel_is_image);
                            rec.flag("kernel_central", mu.kernel_central);
                            rec.flag("mu_transversal", &mu.transversal);
                            rec.check(mu.passed(), "mu is a surjective homomorphism with kernel the image");
                        }
                        None => rec.flag("mu_checked", false),
                    }
                }
                Err(e) => rec.fail(e.to_string()),
            }
            rec
        })
        .collect()
}

/// Index-`k` subgroup count, cross-checked against the lattice oracle when
/// the group is small enough.
fn census_count<G: Group + ?Sized>(rec: &mut CellRecord, g: &G, k: usize, bounds: &CensusBounds) -> Option<usize> {
    let subs = match census::index_k_subgroups(g, k, bounds) {
        Ok(s) => s,
        Err(e) => {
            rec.fail(e.to_string());
            return None;
        }
    };
    rec.count = Some(subs.len() as u64);
    rec.flag("normal", subs.iter().filter(|h| h.normal).count());
    if g.order() <= bounds.oracle_order {
        match census::subgroup_lattice_oracle(g, bounds.oracle_order) {
            Ok(all) => {
                let want = all.iter().filter(|h| h.len() * k == g.order()).count();
                rec.flag("oracle_count", want);
                rec.check(want == subs.len(), "census agrees with the subgroup-lattice oracle");
            }
            Err(e) => rec.fail(e.to_string()),
        }
    }
    Some(subs.len())
}

fn progression(config: &ExperimentConfig) -> Vec<CellRecord> {
    let c = &config.e3;
    let bounds = config.census_bounds();
    let cells: Vec<CellRecord> = (1..=c.n_max)
        .into_par_iter()
        .map(|n| {
            let mut rec = CellRecord::new("E3", &c.group, c.q, n);
            rec.k = Some(c.k);
            let spec = match GroupSpec::from_name(&c.group, c.dim, c.q) {
                Ok(s) => s,
                Err(e) => {
                    rec.fail(e.to_string());
                    return rec;
                }
            };
            rec.spec = label(&spec);
            if !admit(&mut rec, &spec, n, config) {
                return rec;
            }
            match enumerate(&spec, n, config) {
                Ok(g) => {
                    record_enumerated(&mut rec, &g);
                    census_count(&mut rec, &g, c.k, &bounds);
                }
                Err(e) => rec.fail(e.to_string()),
            }
            rec
        })
        .collect();

    let spec_label = cells.first().map(|r| r.spec.clone()).unwrap_or_else(|| c.group.clone());
    let mut summary = CellRecord::new("E3", &spec_label, c.q, 0);
    summary.k = Some(c.k);
    summary.isogeny = c.isogeny.clone();
    let checked: Vec<usize> = cells.iter().filter(|r| r.status == Status::Pass).map(|r| r.n).collect();
    let set: Vec<usize> = cells
        .iter()
        .filter(|r| r.status == Status::Pass && r.count.unwrap_or(0) > 0)
        .map(|r| r.n)
        .collect();
    let n_max = c.n_max;
    let holds_from = |m: usize| (1..=n_max / m).all(|j| set.contains(&(j * m)) || !checked.contains(&(j * m)));
    let start = set.iter().copied().find(|&m| holds_from(m));
    summary.count = Some(set.len() as u64);
    summary.flag("n_max", n_max);
    summary.flag("n_checked", &checked);
    summary.flag("n_with_subgroup", &set);
    summary.flag("progression_start", start);
    summary.flag("contains_progression", start.is_some());
    summary.check(set.is_empty() || start.is_some(), "the set contains an arithmetic progression");
    if let Some(name) = &c.isogeny {
        let degree = GroupSpec::from_name(&c.group, c.dim, c.q)
            .and_then(|spec| Isogeny::parse(name, &spec))
            .and_then(|phi| crate::homs::kernel_points(&phi));
        match degree {
            Ok(kernel) => {
                let m = kernel.minimal_degree;
                summary.flag("isogeny_minimal_degree", m);
                summary.flag("isogeny_progression_holds", holds_from(m));
                summary.check(holds_from(m), "multiples of the kernel degree carry index-k subgroups");
            }
            Err(e) => summary.fail(e.to_string()),
        }
    }
    let mut out = cells;
    out.push(summary);
    out
}

fn simply_connected(config: &ExperimentConfig) -> Vec<CellRecord> {
    let c = &config.e4;
    let bounds = config.census_bounds();
    let levels: Vec<(u64, usize)> = c.q.iter().flat_map(|&q| (1..=c.n_max).map(move |n| (q, n))).collect();
    let groups: Vec<Vec<CellRecord>> = levels
        .par_iter()
        .map(|&(q, n)| {
            let blank = |k: usize| {
                let mut rec = CellRecord::new("E4", "SL2", q, n);
                rec.k = Some(k);
                rec
            };
            let spec = match GroupSpec::new(SpecKind::SL(2), q) {
                Ok(s) => s,
                Err(e) => {
                    return c
                        .k
                        .iter()
                        .map(|&k| {
                            let mut rec = blank(k);
                            rec.fail(e.to_string());
                            rec
                        })
                        .collect();
                }
            };
            let mut probe = blank(0);
            if !admit(&mut probe, &spec, n, config) {
                return c
                    .k
                    .iter()
                    .map(|&k| {
                        let mut rec = probe.clone();
                        rec.k = Some(k);
                        rec
                    })
                    .collect();
            }
            let g = enumerate(&spec, n, config);
            let qn = q.pow(n as u32);
            c.k.iter()
                .map(|&k| {
                    let mut rec = probe.clone();
                    rec.k = Some(k);
                    match &g {
                        Ok(g) => {
                            record_enumerated(&mut rec, g);
                            let expect_zero = qn >= 4;
                            rec.flag("expected_zero", expect_zero);
                            if let Some(count) = census_count(&mut rec, g, k, &bounds) {
                                if expect_zero {
                                    rec.check(count == 0, "no subgroup of index k");
                                }
                            }
                        }
                        Err(e) => rec.fail(e.to_string()),
                    }
                    rec
                })
                .collect()
        })
        .collect();
    groups.into_iter().flatten().collect()
}

fn norm_torus(config: &ExperimentConfig) -> Vec<CellRecord> {
    let c = &config.e5;
    let bounds = config.census_bounds();
    primes(2, c.p_max)
        .par_iter()
        .map(|&p| {
            let mut rec = CellRecord::new("E5", "NormTorus", p, 1);
            rec.k = Some(c.k);
            if !c.isogenies.is_empty() {
                rec.isogeny = Some(c.isogenies.join(","));
            }
            if let Err(e) = norm_torus_cell(&mut rec, p, config, &bounds) {
                if rec.status != Status::Skipped {
                    rec.fail(e.to_string());
                }
            }
            rec
        })
        .collect()
}

fn norm_torus_cell(rec: &mut CellRecord, p: u64, config: &ExperimentConfig, bounds: &CensusBounds) -> Result<()> {
    let c = &config.e5;
    let spec = GroupSpec::new(SpecKind::NormTorus, p)?;
    let split = p % 3 == 1;
    rec.flag("split", split);
    if !admit(rec, &spec, 1, config) {
        return Ok(());
    }
    let mut phis = Vec::new();
    let mut inapplicable = Vec::new();
    for name in &c.isogenies {
        match Isogeny::parse(name, &spec) {
            Ok(phi) => phis.push((name.clone(), phi)),
            Err(e @ Error::NotIsogeny(_)) => inapplicable.push(format!("{name}: {e}")),
            Err(e) => return Err(e),
        }
    }
    if !inapplicable.is_empty() {
        // the census value is still recorded for the skipped cell
        let g = enumerate(&spec, 1, config)?;
        let subs = census::index_k_subgroup_ids(&g, c.k, bounds)?;
        rec.count = Some(subs.len() as u64);
        rec.skip(format!("not applicable: {}", inapplicable.join("; ")));
        return Ok(());
    }
    let contexts = phis
        .iter()
        .map(|(name, phi)| {
            let s = config.bounds.s_search.unwrap_or(phi.order() * phi.order());
            Ok((name.clone(), MuContext::build(phi, 1, s, config.enum_bounds())?))
        })
        .collect::<Result<Vec<_>>>()?;
    let plain;
    let g: &FiniteGroup = match contexts.first() {
        Some((_, ctx)) => ctx.group(),
        None => {
            plain = enumerate(&spec, 1, config)?;
            &plain
        }
    };
    record_enumerated(rec, g);
    let invariants = census::abelianization_invariants(g)?;
    rec.flag("invariants", &invariants);
    rec.check(split == (invariants.len() == 2), "the torus is split iff p = 1 mod 3");

    let subs = census::index_k_subgroup_ids(g, c.k, bounds)?;
    rec.count = Some(subs.len() as u64);
    if c.k == 2 {
        let rank = invariants.iter().filter(|&&d| d % 2 == 0).count();
        rec.check(subs.len() == (1 << rank) - 1, "index-2 count is 2^r - 1 for the 2-rank r");
    }
    let catalog: Vec<(String, &MuContext)> = contexts.iter().map(|(n, ctx)| (n.clone(), ctx)).collect();
    let mut reached_by = Vec::with_capacity(subs.len());
    for h in &subs {
        let flags = census::reached_by(h, &catalog)?;
        reached_by.push(flags.into_iter().filter(|f| f.1).map(|f| f.0).collect::<Vec<_>>());
    }
    let reached = reached_by.iter().filter(|r| !r.is_empty()).count();
    rec.flag("reached", reached);
    rec.flag("reached_by", &reached_by);
    if split && c.k == 2 && !contexts.is_empty() {
        rec.check(subs.len() - reached >= 2, "at least two index-2 subgroups are not reached");
    }
    Ok(())
}

fn order_formulas(config: &ExperimentConfig) -> Vec<CellRecord> {
    let c = &config.e6;
    let formula = OrderFormula::for_tag("SL2").expect("SL2 data ships");
    let mut cells: Vec<(u64, usize, bool)> = c.q.iter().map(|&q| (q, 1, true)).collect();
    for &q in &c.ratio_q {
        cells.extend((1..=c.n_max).map(|n| (q, n, false)));
    }
    let mut records: Vec<CellRecord> = cells
        .par_iter()
        .map(|&(q, n, bn)| {
            let mut rec = CellRecord::new("E6", "SL2", q, n);
            rec.flag("check", if bn { "bn_formula" } else { "ratio" });
            if let Err(e) = order_cell(&mut rec, &formula, q, n, bn, config) {
                rec.fail(e.to_string());
            }
            rec
        })
        .collect();
    for &q in &c.ratio_q {
        let ratios: Vec<BigUint> = (1..=c.n_max)
            .filter_map(|n| {
                let spec = GroupSpec::new(SpecKind::SL(2), q).ok()?;
                Some(closed_order(&spec, n).ok()? / center_order(&spec, n).ok()?)
            })
            .collect();
        let mut rec = CellRecord::new("E6", "SL2", q, 0);
        rec.flag("check", "ratio_increasing");
        rec.flag("n_max", c.n_max);
        rec.flag("ratios", ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>());
        rec.check(ratios.len() == c.n_max, "every ratio is defined");
        rec.check(ratios.windows(2).all(|w| w[0] < w[1]), "|G|/|Z| is strictly increasing in n");
        records.push(rec);
    }
    records
}

fn order_cell(
    rec: &mut CellRecord,
    formula: &OrderFormula,
    q: u64,
    n: usize,
    bn: bool,
    config: &ExperimentConfig,
) -> Result<()> {
    let spec = GroupSpec::new(SpecKind::SL(2), q)?;
    let closed = closed_order(&spec, n)?;
    let center = center_order(&spec, n)?;
    let qn = BigUint::from(q).pow(n as u32);
    rec.order = Some(closed.to_string());
    rec.flag("closed_order", closed.to_string());
    rec.flag("center_closed", center.to_string());
    rec.flag("ratio", (&closed / &center).to_string());
    rec.check(closed == qn.pow(3) - &qn, "|SL2(F_q)| = q^3 - q");
    let expected_center = BigUint::from(if q % 2 == 0 { 1u32 } else { 2 });
    rec.check(center == expected_center, "|Z| = gcd(2, q - 1)");
    if bn {
        let b = bn_order(formula, q.pow(n as u32))?;
        rec.flag("bn_order", b.to_string());
        rec.check(b == closed, "BN formula equals the closed form");
    }
    if closed <= BigUint::from(config.bounds.group_order) {
        let g = enumerate(&spec, n, config)?;
        record_enumerated(rec, &g);
        let z = census::center(&g).order();
        rec.flag("center_enumerated", z);
        rec.check(BigUint::from(z) == center, "enumerated center equals the closed form");
    } else {
        rec.flag("enumerated", false);
    }
    Ok(())
}

fn characteristic_scan(config: &ExperimentConfig) -> Vec<CellRecord> {
    let c = &config.e7;
    let bounds = config.census_bounds();
    let per_prime: Vec<Vec<CellRecord>> = primes(c.p_min, c.p_max)
        .par_iter()
        .map(|&p| {
            let mut probe = CellRecord::new("E7", "SL2", p, 1);
            let ks = 2..=c.k_max;
            let spec = GroupSpec::new(SpecKind::SL(2), p).expect("p is prime");
            let g = if admit(&mut probe, &spec, 1, config) { Some(enumerate(&spec, 1, config)) } else { None };
            ks.map(|k| {
                let mut rec = probe.clone();
                rec.k = Some(k);
                match &g {
                    Some(Ok(g)) => {
                        record_enumerated(&mut rec, g);
                        if let Some(count) = census_count(&mut rec, g, k, &bounds) {
                            rec.check(count == 0, "no subgroup of index k");
                        }
                    }
                    Some(Err(e)) => rec.fail(e.to_string()),
                    None => {}
                }
                rec
            })
            .collect()
        })
        .collect();
    per_prime.into_iter().flatten().collect()
}

fn additive(config: &ExperimentConfig) -> Vec<CellRecord> {
    let c = &config.e8;
    let bounds = config.census_bounds();
    let cells: Vec<(u64, usize)> = c.p.iter().flat_map(|&p| (1..=c.n_max).map(move |n| (p, n))).collect();
    cells
        .par_iter()
        .map(|&(p, n)| {
            let mut rec = CellRecord::new("E8", "Ga", p, n);
            rec.k = Some(p as usize);
            if !arith::is_prime(p) {
                rec.fail(format!("{p} is not a prime"));
                return rec;
            }
            let spec = GroupSpec::new(SpecKind::Ga, p).expect("p is prime");
            if !admit(&mut rec, &spec, n, config) {
                return rec;
            }
            match enumerate(&spec, n, config) {
                Ok(g) => {
                    record_enumerated(&mut rec, &g);
                    let expected = (p.pow(n as u32) - 1) / (p - 1);
                    rec.flag("expected", expected);
                    if let Some(count) = census_count(&mut rec, &g, p as usize, &bounds) {
                        rec.check(count as u64 == expected, "index-p count is (p^n - 1)/(p - 1)");
                    }
                }
                Err(e) => rec.fail(e.to_string()),
            }
            rec
        })
        .collect()
}
