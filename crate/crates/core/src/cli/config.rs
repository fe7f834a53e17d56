use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::census::CensusBounds;
use crate::error::{Error, Result};
use crate::homs::MU_TABLE_LIMIT;
use crate::matgroup::EnumBounds;

/// Experiment identifiers, in run order.
pub const EXPERIMENT_IDS: &[&str] = &["E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("reports"), format: OutputFormat::Json }
    }
}

/// Size limits shared by every experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Bounds {
    /// Cells whose point group is larger are skipped.
    pub group_order: usize,
    pub max_k: usize,
    pub max_gens: usize,
    pub max_search: u128,
    /// Largest group cross-checked against the subgroup-lattice oracle.
    pub oracle_order: usize,
    /// Largest group whose `mu` table is built and verified.
    pub mu_order: usize,
    /// Preimage escalation limit; `None` means `|ker|^2`.
    pub s_search: Option<usize>,
    /// Largest field scanned during enumeration.
    pub scan_limit: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        let c = CensusBounds::default();
        Bounds {
            group_order: c.max_order,
            max_k: c.max_k,
            max_gens: c.max_gens,
            max_search: c.max_search,
            oracle_order: c.oracle_order,
            mu_order: MU_TABLE_LIMIT,
            s_search: None,
            scan_limit: EnumBounds::default().scan_limit,
        }
    }
}

/// Isogeny grid shared by the image and cokernel experiments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsogenyGrid {
    pub groups: Vec<String>,
    pub powers: Vec<u64>,
    /// Extra isogenies by catalog name, each tried on every group.
    pub isogenies: Vec<String>,
    pub q: Vec<u64>,
    pub n_max: usize,
}

impl Default for IsogenyGrid {
    fn default() -> Self {
        IsogenyGrid {
            groups: vec!["Gm".into(), "NormTorus".into()],
            powers: vec![2, 3, 4, 5],
            isogenies: vec!["normcover".into()],
            q: vec![2, 3, 5, 7],
            n_max: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProgressionConfig {
    pub group: String,
    pub dim: usize,
    pub q: u64,
    pub k: usize,
    pub n_max: usize,
    /// Isogeny whose minimal kernel degree is compared with the detected
    /// progression.
    pub isogeny: Option<String>,
}

impl Default for ProgressionConfig {
    fn default() -> Self {
        ProgressionConfig { group: "Gm".into(), dim: 1, q: 2, k: 3, n_max: 12, isogeny: Some("pow:3".into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimplyConnectedConfig {
    pub q: Vec<u64>,
    pub n_max: usize,
    pub k: Vec<usize>,
}

impl Default for SimplyConnectedConfig {
    fn default() -> Self {
        SimplyConnectedConfig { q: vec![2, 3, 4, 5, 7, 8, 9], n_max: 1, k: vec![2, 3, 4] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormTorusConfig {
    pub p_max: u64,
    pub k: usize,
    pub isogenies: Vec<String>,
}

impl Default for NormTorusConfig {
    fn default() -> Self {
        NormTorusConfig { p_max: 100, k: 2, isogenies: vec!["normcover".into()] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrderConfig {
    pub q: Vec<u64>,
    /// Fields whose ratio `|G|/|Z|` is followed over `n`.
    pub ratio_q: Vec<u64>,
    pub n_max: usize,
}

impl Default for OrderConfig {
    fn default() -> Self {
        OrderConfig { q: vec![2, 3, 4, 5, 7, 9], ratio_q: vec![2], n_max: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CharacteristicConfig {
    pub p_min: u64,
    pub p_max: u64,
    pub k_max: usize,
}

impl Default for CharacteristicConfig {
    fn default() -> Self {
        CharacteristicConfig { p_min: 5, p_max: 31, k_max: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdditiveConfig {
    pub p: Vec<u64>,
    pub n_max: usize,
}

impl Default for AdditiveConfig {
    fn default() -> Self {
        AdditiveConfig { p: vec![2, 3], n_max: 4 }
    }
}

/// The whole harness configuration, read from a single JSON file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub bounds: Bounds,
    pub output: OutputConfig,
    pub e1: IsogenyGrid,
    pub e2: IsogenyGrid,
    pub e3: ProgressionConfig,
    pub e4: SimplyConnectedConfig,
    pub e5: NormTorusConfig,
    pub e6: OrderConfig,
    pub e7: CharacteristicConfig,
    pub e8: AdditiveConfig,
}

fn nonempty<T>(what: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{what} must be nonempty")));
    }
    Ok(())
}

fn positive(what: &str, v: u128) -> Result<()> {
    if v == 0 {
        return Err(Error::Config(format!("{what} must be positive")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.bounds;
        positive("bounds.group_order", b.group_order as u128)?;
        positive("bounds.max_k", b.max_k as u128)?;
        positive("bounds.max_gens", b.max_gens as u128)?;
        positive("bounds.max_search", b.max_search)?;
        positive("bounds.oracle_order", b.oracle_order as u128)?;
        positive("bounds.mu_order", b.mu_order as u128)?;
        positive("bounds.scan_limit", b.scan_limit as u128)?;
        if b.s_search == Some(0) {
            return Err(Error::Config("bounds.s_search must be positive".into()));
        }
        for (name, grid) in [("e1", &self.e1), ("e2", &self.e2)] {
            nonempty(&format!("{name}.groups"), &grid.groups)?;
            nonempty(&format!("{name}.q"), &grid.q)?;
            if grid.powers.is_empty() && grid.isogenies.is_empty() {
                return Err(Error::Config(format!("{name} needs at least one power or isogeny")));
            }
            positive(&format!("{name}.n_max"), grid.n_max as u128)?;
        }
        positive("e3.n_max", self.e3.n_max as u128)?;
        positive("e3.k", self.e3.k as u128)?;
        nonempty("e4.q", &self.e4.q)?;
        nonempty("e4.k", &self.e4.k)?;
        positive("e4.n_max", self.e4.n_max as u128)?;
        positive("e5.p_max", self.e5.p_max as u128)?;
        positive("e5.k", self.e5.k as u128)?;
        nonempty("e6.q", &self.e6.q)?;
        positive("e6.n_max", self.e6.n_max as u128)?;
        if self.e7.p_min > self.e7.p_max {
            return Err(Error::Config("e7.p_min exceeds e7.p_max".into()));
        }
        positive("e7.k_max", self.e7.k_max as u128)?;
        nonempty("e8.p", &self.e8.p)?;
        positive("e8.n_max", self.e8.n_max as u128)?;
        Ok(())
    }

    pub fn census_bounds(&self) -> CensusBounds {
        let b = &self.bounds;
        CensusBounds {
            max_order: b.group_order,
            max_k: b.max_k,
            max_gens: b.max_gens,
            max_search: b.max_search,
            oracle_order: b.oracle_order,
            seed: self.seed,
        }
    }

    pub fn enum_bounds(&self) -> EnumBounds {
        EnumBounds { max_order: self.bounds.group_order, scan_limit: self.bounds.scan_limit }
    }
}
