//! Command-line harness: thin wrappers over the library and the batch
//! experiments E1..E8 with deterministic reports.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::{json, Value};

pub use config::{ExperimentConfig, OutputFormat, EXPERIMENT_IDS};
pub use experiments::run_experiment;
pub use report::{CellRecord, ExperimentSummary, Status, Summary};

use crate::census::{self, CensusReport};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::homs::{self, Isogeny, MuContext};
use crate::matgroup::GroupSpec;
use crate::orderform::{bn_order, center_order, closed_order, OrderFormula};

#[derive(Parser, Debug)]
#[command(name = "fqgroups", about = "Rational points, isogenies and low-index subgroups over finite fields", version)]
pub struct Cli {
    /// JSON configuration file; defaults apply to absent fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report directory (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format (overrides the config).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Seed for generator searches (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// Catalog name: GL, SL, Sp, SO, SU, Gm, Ga, NormTorus, NormTorusCover.
    #[arg(long)]
    pub group: String,
    /// Matrix size for the classical families.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

impl GroupArgs {
    fn spec(&self) -> Result<GroupSpec> {
        GroupSpec::from_name(&self.group, self.dim, self.q)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate G(F_{q^n}).
    Points {
        #[command(flatten)]
        group: GroupArgs,
        /// Print every point as coefficient rows.
        #[arg(long)]
        list: bool,
    },
    /// Closed-form, BN-formula and enumerated orders.
    Order {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Geometric kernel of an isogeny onto the given group.
    Kernel {
        #[arg(long)]
        isogeny: String,
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Index of the rational image against the rational kernel.
    Image {
        #[arg(long)]
        isogeny: String,
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Cokernel, ker/lambda(ker), and the mu check for small groups.
    Cokernel {
        #[arg(long)]
        isogeny: String,
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Subgroups of index k.
    Census {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        k: usize,
        /// Include subgroup elements in the output.
        #[arg(long)]
        list: bool,
        /// Isogenies (comma separated) whose induced maps are tested
        /// against each subgroup.
        #[arg(long, value_delimiter = ',')]
        reach: Vec<String>,
    },
    /// Run one experiment (E1..E8) and write its reports.
    Experiment { id: String },
    /// Run every experiment and write all reports.
    All,
    /// Print the effective configuration.
    Config,
}

/// The configuration after applying command-line overrides.
pub fn effective_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    if let Some(format) = cli.format {
        config.output.format = format;
    }
    config.validate()?;
    Ok(config)
}

/// Runs the experiments, writes their reports and `summary.json` under
/// `dir`, and returns the summary.
pub fn run_and_write(ids: &[&str], config: &ExperimentConfig, dir: &Path) -> Result<Summary> {
    let mut summaries = Vec::with_capacity(ids.len());
    for id in ids {
        let records = run_experiment(id, config)?;
        report::write_records(dir, id, &records, config.output.format)?;
        summaries.push(ExperimentSummary::of(id, &records));
    }
    let summary = Summary::new(summaries);
    report::write_summary(dir, &summary)?;
    Ok(summary)
}

fn print(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("value serializes"));
}

/// Executes a parsed command line; `Ok(true)` iff every assertion held.
pub fn run(cli: &Cli) -> Result<bool> {
    let config = effective_config(cli)?;
    let bounds = config.enum_bounds();
    match &cli.command {
        Command::Points { group, list } => {
            let spec = group.spec()?;
            let g = experiments::enumerate(&spec, group.n, &config)?;
            let closed = closed_order(&spec, group.n).ok();
            let ok = closed.as_ref().map_or(true, |c| *c == BigUint::from(g.order()));
            let mut out = json!({
                "spec": spec.to_string(),
                "n": group.n,
                "field_degree": g.field().degree(),
                "order": g.order(),
                "closed_order": closed.map(|c| c.to_string()),
                "matches_closed_form": ok,
            });
            if *list {
                let f = g.field();
                out["points"] = g.elements().iter().map(|m| json!(m.to_coeff_rows(f))).collect();
            }
            print(&out);
            Ok(ok)
        }
        Command::Order { group } => {
            let spec = group.spec()?;
            let closed = closed_order(&spec, group.n)?;
            let center = center_order(&spec, group.n)?;
            let mut ok = true;
            let mut out = json!({
                "spec": spec.to_string(),
                "n": group.n,
                "closed_order": closed.to_string(),
                "center_order": center.to_string(),
            });
            if let Ok(formula) = OrderFormula::for_tag(&experiments::label(&spec)) {
                let b = bn_order(&formula, spec.q().pow(group.n as u32))?;
                ok &= b == closed;
                out["bn_order"] = json!(b.to_string());
            }
            if closed <= BigUint::from(config.bounds.group_order) {
                let g = experiments::enumerate(&spec, group.n, &config)?;
                let z = census::center(&g).order();
                ok &= BigUint::from(g.order()) == closed && BigUint::from(z) == center;
                out["enumerated_order"] = json!(g.order());
                out["enumerated_center"] = json!(z);
            }
            out["consistent"] = json!(ok);
            print(&out);
            Ok(ok)
        }
        Command::Kernel { isogeny, group } => {
            let spec = group.spec()?;
            let phi = Isogeny::parse(isogeny, &spec)?;
            let k = homs::kernel_points(&phi)?;
            print(&json!({
                "isogeny": phi.name(),
                "domain": phi.domain().to_string(),
                "codomain": spec.to_string(),
                "order": k.group.order(),
                "minimal_degree": k.minimal_degree,
                "ambient_degree": k.group.field().degree(),
            }));
            Ok(k.group.order() == phi.order())
        }
        Command::Image { isogeny, group } => {
            let spec = group.spec()?;
            let phi = Isogeny::parse(isogeny, &spec)?;
            let c = homs::check_image_index(&phi, group.n, bounds)?;
            print(&json!({
                "isogeny": phi.name(),
                "codomain": spec.to_string(),
                "n": group.n,
                "index": c.index,
                "kernel_rational": c.kernel_rational_size,
                "equal": c.equal,
            }));
            Ok(c.equal)
        }
        Command::Cokernel { isogeny, group } => {
            let spec = group.spec()?;
            let phi = Isogeny::parse(isogeny, &spec)?;
            let c = homs::cokernel(&phi, group.n, config.bounds.s_search, config.bounds.mu_order, bounds)?;
            let mu = c.mu.as_ref().map(|m| {
                json!({
                    "ambient_degree": m.ambient_degree,
                    "s_used": m.s_used,
                    "homomorphism": m.homomorphism,
                    "surjective": m.surjective,
                    "kernel_is_image": m.kernel_is_image,
                    "kernel_central": m.kernel_central,
                    "transversal": m.transversal,
                })
            });
            let ok = c.isomorphic && c.mu.as_ref().map_or(true, |m| m.passed());
            print(&json!({
                "isogeny": phi.name(),
                "codomain": spec.to_string(),
                "n": group.n,
                "group_order": c.group_order,
                "image_order": c.image_order,
                "cokernel_invariants": c.cokernel_invariants,
                "kernel_order": c.kernel_order,
                "minimal_kernel_degree": c.minimal_kernel_degree,
                "kernel_quotient_invariants": c.kernel_quotient_invariants,
                "isomorphic": c.isomorphic,
                "mu": mu,
            }));
            Ok(ok)
        }
        Command::Census { group, k, list, reach } => {
            let spec = group.spec()?;
            let cb = config.census_bounds();
            let contexts = reach
                .iter()
                .map(|name| {
                    let phi = Isogeny::parse(name, &spec)?;
                    let s = config.bounds.s_search.unwrap_or(phi.order() * phi.order());
                    Ok((phi.name(), MuContext::build(&phi, group.n, s, bounds)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let plain;
            let g = match contexts.first() {
                Some((_, ctx)) => ctx.group(),
                None => {
                    plain = experiments::enumerate(&spec, group.n, &config)?;
                    &plain
                }
            };
            let subs = census::index_k_subgroups(g, *k, &cb)?;
            let mut ok = true;
            if g.order() <= cb.oracle_order {
                let all = census::subgroup_lattice_oracle(g, cb.oracle_order)?;
                ok = all.iter().filter(|h| h.len() * k == g.order()).count() == subs.len();
            }
            let catalog: Vec<(String, &MuContext)> = contexts.iter().map(|(n, c)| (n.clone(), c)).collect();
            let mut reached_by = Vec::new();
            if !catalog.is_empty() {
                for h in &subs {
                    let flags = census::reached_by(&h.elements, &catalog)?;
                    reached_by.push(flags.into_iter().filter(|f| f.1).map(|f| f.0).collect());
                }
            }
            let report = CensusReport {
                spec: spec.to_string(),
                q: spec.q(),
                n: group.n,
                k: *k,
                order: g.order(),
                count: subs.len(),
                subgroups: if *list { Some(subs) } else { None },
                reached_by,
            };
            print(&serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?);
            Ok(ok)
        }
        Command::Experiment { id } => {
            let id = id.to_uppercase();
            let known = EXPERIMENT_IDS
                .iter()
                .find(|&&e| e == id)
                .ok_or_else(|| Error::Config(format!("unknown experiment '{id}', expected one of E1..E8")))?;
            let summary = run_and_write(&[known], &config, &config.output.dir)?;
            print(&serde_json::to_value(&summary).expect("summary serializes"));
            Ok(summary.all_passed)
        }
        Command::All => {
            let summary = run_and_write(EXPERIMENT_IDS, &config, &config.output.dir)?;
            print(&serde_json::to_value(&summary).expect("summary serializes"));
            Ok(summary.all_passed)
        }
        Command::Config => {
            println!("{}", config.to_json());
            Ok(true)
        }
    }
}
