//! The four subcommands. Each builds its whole CSV in memory and returns it.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use vbslab::fcs::{aklt_tensor, deformed_tensor, ChainSpec, FcsTensor};
use vbslab::localizable::{deformed_xi_e, le_closed_form, string_order, string_order_reduced, xi_e};
use vbslab::report::{number, row};
use vbslab::transfer::{correlation_length_spectral, deformed_xi_c, model_correlation_length_fit};
use vbslab::verify::{self, Criterion, Level, VerifyOptions};

/// Chain length and window for the correlator fit.
pub const FIT_CHAIN: usize = 30;
pub const FIT_WINDOW: std::ops::RangeInclusive<usize> = 2..=12;
/// Sizes for the fitted entanglement length.
pub const LE_FIT_SIZES: std::ops::RangeInclusive<usize> = 4..=20;
/// Largest Heisenberg chain the dense solver is asked for.
pub const HEISENBERG_MAX: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub phi_min: f64,
    pub phi_max: f64,
    pub steps: usize,
    pub n_list: Vec<usize>,
    /// Recorded for reproducibility; no sweep column is randomized.
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            phi_min: -1.0,
            phi_max: 1.0,
            steps: 41,
            n_list: vec![4, 8, 12, 16, 20],
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            bail!("steps must be at least 2, got {}", self.steps);
        }
        if !(self.phi_min < self.phi_max) {
            bail!("need phi-min < phi-max, got {} and {}", self.phi_min, self.phi_max);
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            bail!("n-list needs positive chain sizes");
        }
        Ok(())
    }

    /// Grid points; written so that a symmetric range gives exactly
    /// opposite points.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                let k = k as f64;
                (self.phi_min * (last - k) + self.phi_max * k) / last
            })
            .collect()
    }
}

fn sweep_row(phi: f64, n_list: &[usize]) -> Result<String> {
    let tensor = deformed_tensor(phi)?;
    let spectral = correlation_length_spectral(&tensor)?;
    let fit = model_correlation_length_fit(&ChainSpec::new(FIT_CHAIN, tensor.clone())?, FIT_WINDOW)
        .with_context(|| format!("correlator fit at phi = {phi}"))?;
    let sizes: Vec<usize> = LE_FIT_SIZES.collect();
    let le_fit = xi_e(&tensor, &sizes).with_context(|| format!("entanglement fit at phi = {phi}"))?;
    let mut cells = vec![
        number(phi)?,
        number(deformed_xi_c(phi))?,
        number(spectral.value())?,
        number(fit.xi)?,
        number(deformed_xi_e(phi).value())?,
        number(le_fit.xi.value())?,
    ];
    for &n in n_list {
        cells.push(number(le_closed_form(&tensor, n)?)?);
    }
    Ok(row(&cells))
}

/// Correlation and entanglement lengths of the deformed family over a
/// grid of deformations. Rows come out in grid order.
pub fn sweep_phi(config: &SweepConfig) -> Result<String> {
    config.validate()?;
    let mut header = ["phi", "xi_c_closed", "xi_c_spectral", "xi_c_fit", "xi_e_closed", "xi_e_fit"]
        .map(String::from)
        .to_vec();
    header.extend(config.n_list.iter().map(|n| format!("le_n{n}")));
    let rows: Vec<String> = config
        .grid()
        .par_iter()
        .map(|&phi| sweep_row(phi, &config.n_list))
        .collect::<Result<_>>()?;
    let mut out = row(&header);
    out.extend(rows);
    Ok(out)
}

/// End-to-end LE of Heisenberg ground states measured in the Bell basis.
pub fn heisenberg_le(n_max: usize) -> Result<String> {
    if !(1..=HEISENBERG_MAX).contains(&n_max) {
        bail!("n-max must be between 1 and {HEISENBERG_MAX}, got {n_max}");
    }
    let rows: Vec<String> = (1..=n_max)
        .into_par_iter()
        .map(|n| -> Result<String> {
            let (le, gap) = verify::heisenberg_le(n)?;
            Ok(row(&[n.to_string(), number(le)?, number(gap)?]))
        })
        .collect::<Result<_>>()?;
    let mut out = row(&["n".into(), "le".into(), "gap".into()]);
    out.extend(rows);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Aklt,
    Deformed(f64),
}

impl Model {
    pub fn parse(name: &str, phi: Option<f64>) -> Result<Self> {
        match (name, phi) {
            ("aklt", None) => Ok(Model::Aklt),
            ("aklt", Some(_)) => bail!("model aklt takes no --phi"),
            ("deformed", Some(phi)) => Ok(Model::Deformed(phi)),
            ("deformed", None) => bail!("model deformed needs --phi"),
            (other, _) => bail!("unknown model {other:?} (expected aklt or deformed)"),
        }
    }

    fn tensor(self) -> Result<FcsTensor> {
        Ok(match self {
            Model::Aklt => aklt_tensor(),
            Model::Deformed(phi) => deformed_tensor(phi)?,
        })
    }
}

/// String order and the diagonal of the reduced end operator per size.
pub fn string_order_table(model: Model, n_list: &[usize]) -> Result<String> {
    let tensor = model.tensor()?;
    let mut out = row(&["n", "string_order", "rho_00", "rho_11", "rho_22", "rho_33"].map(String::from));
    for &n in n_list {
        let chain = ChainSpec::new(n, tensor.clone())?;
        let rho = string_order_reduced(&chain)?;
        let mut cells = vec![n.to_string(), number(string_order(&chain)?)?];
        for k in 0..4 {
            cells.push(number(rho[(k, k)].re)?);
        }
        out.push_str(&row(&cells));
    }
    Ok(out)
}

/// Pass/fail table for the acceptance criteria.
pub fn verify_table(level: Level, pauli_scale: f64, seed: u64) -> (String, Vec<Criterion>) {
    let opts = VerifyOptions {
        level,
        pauli_scale,
        seed,
    };
    let results = verify::run_all(&opts);
    let mut out = String::new();
    for crit in &results {
        out.push_str(&crit.summary());
        out.push('\n');
        for check in crit.failures() {
            out.push_str(&format!("      {check}\n"));
        }
    }
    let bad: Vec<String> = results
        .iter()
        .filter(|c| !c.acceptable())
        .map(|c| c.id.to_string())
        .collect();
    if bad.is_empty() {
        out.push_str("all criteria met (known unattainable checks excepted)\n");
    } else {
        out.push_str(&format!("failed criteria: {}\n", bad.join(", ")));
    }
    (out, results)
}
