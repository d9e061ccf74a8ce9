//! Run configuration: built-in defaults, then an optional JSON file, then
//! command-line flags, later layers winning.

use std::path::Path;

use anyhow::{bail, Context, Result};
use branch_lab_core::ideals::UnitSearch;
use branch_lab_core::pairing::{Panel, TestFunction};
use branch_lab_core::tolerances;
use branch_lab_core::weaklimit::Schedule;
use branch_lab_core::DomainInterval;
use serde::{Deserialize, Serialize};

/// Either an equally spaced panel or an explicit list of bumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PanelSpec {
    EquallySpaced { count: usize, normalized: bool },
    Members(Vec<TestFunction>),
}

impl Default for PanelSpec {
    fn default() -> Self {
        PanelSpec::EquallySpaced { count: 8, normalized: false }
    }
}

impl PanelSpec {
    pub fn build(&self, dom: &DomainInterval) -> Result<Panel> {
        Ok(match self {
            PanelSpec::EquallySpaced { count, normalized } => Panel::equally_spaced(dom, *count, *normalized)?,
            PanelSpec::Members(m) => Panel::new(m.clone(), dom)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `None` selects the subcommand's default domain.
    pub domain: Option<DomainInterval>,
    pub panel: PanelSpec,
    /// Largest index of the power-of-two schedule.
    pub nu_max: u32,
    pub tol: f64,
    pub cell_width: f64,
    /// Largest index searched by zero-density certificates.
    pub certificate_nu_max: u32,
    pub unit: UnitSearch,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            domain: None,
            panel: PanelSpec::default(),
            nu_max: 4096,
            tol: tolerances::WEAK_LIMIT_TOL,
            cell_width: 0.05,
            certificate_nu_max: 200,
            unit: UnitSearch::default(),
        }
    }
}

/// Flag values; `None` leaves the lower layer in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub domain: Option<DomainInterval>,
    pub panel: Option<PanelSpec>,
    pub nu_max: Option<u32>,
    pub tol: Option<f64>,
    pub cell_width: Option<f64>,
    pub certificate_nu_max: Option<u32>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn merge(mut self, o: Overrides) -> Self {
        self.domain = o.domain.or(self.domain);
        self.panel = o.panel.unwrap_or(self.panel);
        self.nu_max = o.nu_max.unwrap_or(self.nu_max);
        self.tol = o.tol.unwrap_or(self.tol);
        self.cell_width = o.cell_width.unwrap_or(self.cell_width);
        self.certificate_nu_max = o.certificate_nu_max.unwrap_or(self.certificate_nu_max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("tol must be positive, got {}", self.tol);
        }
        if !(self.cell_width > 0.0 && self.cell_width.is_finite()) {
            bail!("cell_width must be positive, got {}", self.cell_width);
        }
        if self.certificate_nu_max == 0 {
            bail!("certificate_nu_max must be at least 1");
        }
        if self.unit.margin.is_nan() || self.unit.margin <= 0.0 || self.unit.nu_count == 0 || self.unit.x_count == 0 {
            bail!("unit search needs a positive margin and a nonempty lattice");
        }
        self.schedule()?;
        Ok(())
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Ok(Schedule::powers_of_two(self.nu_max)?)
    }

    /// Fills in the domain so the report echoes what was actually used.
    pub fn resolve_domain(&mut self, fallback: DomainInterval) -> DomainInterval {
        *self.domain.get_or_insert(fallback)
    }
}
