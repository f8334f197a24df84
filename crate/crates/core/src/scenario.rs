//! Passive versus active storage of a qubit under iterated Pauli noise.
//!
//! Passive: the asymptotic upper bound for `Φ^{2t}` (held at odd iteration
//! counts) and the hashing bound of the iterated channel. Active: the hashing
//! bound of the `τ`-fold composed logical channel of the five-qubit code at
//! each concatenation level, divided by the `5^ℓ` physical qubits it uses.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::bounds::{self, EntropicConstants, EntropyPlacement, TimeMode};
use crate::channel::DensityMatrix;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pauli::PauliChannel;
use crate::spectral::BlockDims;
use crate::stabilizer::five_qubit_code;

pub const PASSIVE_C_UB: &str = "passive_c_ub";
pub const PASSIVE_Q_UB: &str = "passive_q_ub";
pub const PASSIVE_Q_LB_HASHING: &str = "passive_q_lb_hashing";
pub const PASSIVE_C_UB_ONE_SHOT: &str = "passive_c_ub_oneshot";
pub const PASSIVE_Q_UB_ONE_SHOT: &str = "passive_q_ub_oneshot";

pub fn active_series_name(level: u32) -> String {
    format!("active_q_lb_l{level}")
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub p: PauliChannel,
    pub t_max: u64,
    pub t_stride: u64,
    pub delta: Option<f64>,
    pub levels: Vec<u32>,
    pub mode: TimeMode,
}

impl ScenarioConfig {
    pub fn new(p: PauliChannel, t_max: u64) -> Self {
        Self { p, t_max, t_stride: 1, delta: None, levels: vec![1, 2], mode: TimeMode::Discrete }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 || self.t_stride < 1 {
            return Err(Error::InvalidInput("t_max and t_stride must be at least 1".into()));
        }
        if self.levels.is_empty() || self.levels.contains(&0) {
            return Err(Error::InvalidInput("levels must be nonempty and at least 1".into()));
        }
        if let Some(d) = self.delta {
            if !(0.0..0.5).contains(&d) {
                return Err(Error::DeltaOutOfRange(d));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<u64> {
        (0..=self.t_max).step_by(self.t_stride as usize).collect()
    }
}

/// Everything needed to evaluate any series at an arbitrary `τ`.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioModel {
    pub p: PauliChannel,
    pub dims: BlockDims,
    pub constants: EntropicConstants,
    pub mode: TimeMode,
    pub delta: Option<f64>,
    /// `(level, per-step logical channel)`.
    pub logical: Vec<(u32, PauliChannel)>,
}

impl ScenarioModel {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let sigma = DensityMatrix::maximally_mixed(2);
        let constants = EntropicConstants::new(cfg.p.lambda_gap(), sigma)?;
        let code = five_qubit_code();
        let logical = cfg
            .levels
            .iter()
            .map(|&l| Ok((l, code.concatenated_logical_channel(&cfg.p, l)?.q)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p: cfg.p, dims: cfg.p.peripheral_dims(), constants, mode: cfg.mode, delta: cfg.delta, logical })
    }

    /// Bound-module time for iteration count `τ`: `t = τ/2`, rounded down to
    /// the last even `τ` in discrete mode.
    fn bound_time(&self, tau: u64) -> f64 {
        match self.mode {
            TimeMode::Discrete => (tau / 2) as f64,
            TimeMode::Semigroup => tau as f64 / 2.0,
        }
    }

    pub fn is_held(&self, tau: u64) -> bool {
        self.mode == TimeMode::Discrete && tau % 2 == 1
    }

    fn asymptotic(&self, tau: u64) -> bounds::CapacityBounds {
        let t = self.bound_time(tau);
        // Bound time is a valid nonnegative integer (or real) by construction.
        bounds::asymptotic_bounds(&self.dims, &self.constants, t, self.mode).expect("bound time is valid")
    }

    fn hashing(p: &PauliChannel, tau: u64) -> f64 {
        p.power(tau as f64).expect("integer powers always exist").hashing_lb()
    }

    pub fn value(&self, series: &str, tau: u64) -> Result<f64> {
        match series {
            PASSIVE_Q_UB => Ok(self.asymptotic(tau).quantum_ub),
            PASSIVE_C_UB => Ok(self.asymptotic(tau).classical_ub),
            PASSIVE_Q_LB_HASHING => Ok(Self::hashing(&self.p, tau)),
            PASSIVE_Q_UB_ONE_SHOT | PASSIVE_C_UB_ONE_SHOT => {
                let delta = self.delta.ok_or_else(|| Error::SeriesMissing(series.into()))?;
                let b = bounds::one_shot_bounds(
                    &self.dims,
                    &self.constants,
                    self.bound_time(tau),
                    delta,
                    self.mode,
                    EntropyPlacement::InsideFraction,
                )?;
                Ok(if series == PASSIVE_Q_UB_ONE_SHOT { b.quantum_ub } else { b.classical_ub })
            }
            other => {
                let (level, q) = self
                    .logical
                    .iter()
                    .find(|(l, _)| active_series_name(*l) == other)
                    .ok_or_else(|| Error::SeriesMissing(other.into()))?;
                Ok(Self::hashing(q, tau) / 5f64.powi(*level as i32))
            }
        }
    }

    pub fn series_names(&self) -> Vec<String> {
        let mut names = vec![PASSIVE_C_UB.to_string(), PASSIVE_Q_UB.into(), PASSIVE_Q_LB_HASHING.into()];
        names.extend(self.logical.iter().map(|(l, _)| active_series_name(*l)));
        if self.delta.is_some() {
            names.push(PASSIVE_C_UB_ONE_SHOT.into());
            names.push(PASSIVE_Q_UB_ONE_SHOT.into());
        }
        names
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCurve {
    pub grid: Vec<u64>,
    pub columns: Vec<Series>,
    /// Odd `τ` in discrete mode, where upper bounds repeat the previous even `τ`.
    pub held: Vec<bool>,
    pub model: Option<ScenarioModel>,
}

impl BoundCurve {
    /// Curve from raw tabulated values, with no model for refinement.
    pub fn from_series(grid: Vec<u64>, columns: Vec<Series>) -> Result<Self> {
        if columns.iter().any(|s| s.values.len() != grid.len()) {
            return Err(Error::DimensionMismatch("series length differs from grid".into()));
        }
        let held = vec![false; grid.len()];
        Ok(Self { grid, columns, held, model: None })
    }

    pub fn series(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.values.as_slice())
            .ok_or_else(|| Error::SeriesMissing(name.into()))
    }

    fn push(&mut self, other: BoundCurve) {
        self.columns.extend(other.columns);
    }
}

fn tabulate(model: &ScenarioModel, grid: &[u64], names: &[String], exec: Execution) -> BoundCurve {
    let rows: Vec<Vec<f64>> =
        exec.map(grid, |&tau| names.iter().map(|n| model.value(n, tau).expect("series known to the model")).collect());
    let columns = names
        .iter()
        .enumerate()
        .map(|(k, n)| Series { name: n.clone(), values: rows.iter().map(|r| r[k]).collect() })
        .collect();
    BoundCurve {
        grid: grid.to_vec(),
        columns,
        held: grid.iter().map(|&t| model.is_held(t)).collect(),
        model: Some(model.clone()),
    }
}

pub fn passive_curves(cfg: &ScenarioConfig, exec: Execution) -> Result<BoundCurve> {
    let model = ScenarioModel::new(cfg)?;
    let mut names = vec![PASSIVE_C_UB.to_string(), PASSIVE_Q_UB.into(), PASSIVE_Q_LB_HASHING.into()];
    if cfg.delta.is_some() {
        names.push(PASSIVE_C_UB_ONE_SHOT.into());
        names.push(PASSIVE_Q_UB_ONE_SHOT.into());
    }
    Ok(tabulate(&model, &cfg.grid(), &names, exec))
}

pub fn active_curves(cfg: &ScenarioConfig, exec: Execution) -> Result<BoundCurve> {
    let model = ScenarioModel::new(cfg)?;
    let names: Vec<String> = cfg.levels.iter().map(|&l| active_series_name(l)).collect();
    Ok(tabulate(&model, &cfg.grid(), &names, exec))
}

/// All series in CSV column order.
pub fn full_curve(cfg: &ScenarioConfig, exec: Execution) -> Result<BoundCurve> {
    let mut passive = passive_curves(cfg, exec)?;
    let one_shot: Vec<Series> = passive.columns.iter().filter(|s| s.name.ends_with("_oneshot")).cloned().collect();
    passive.columns.retain(|s| !s.name.ends_with("_oneshot"));
    passive.push(active_curves(cfg, exec)?);
    passive.columns.extend(one_shot);
    Ok(passive)
}

/// Smallest `τ` with `ub(τ) < lb(τ)`. With a model and a coarse grid, the
/// bracket around the first crossing grid point is bisected.
pub fn find_crossover(curve: &BoundCurve, lb_series: &str, ub_series: &str) -> Result<Option<u64>> {
    let lb = curve.series(lb_series)?;
    let ub = curve.series(ub_series)?;
    let Some(k) = (0..curve.grid.len()).find(|&k| ub[k] < lb[k]) else {
        return Ok(None);
    };
    let hit = curve.grid[k];
    let (Some(model), true) = (&curve.model, k > 0) else {
        return Ok(Some(hit));
    };
    let crosses = |tau: u64| -> Result<bool> { Ok(model.value(ub_series, tau)? < model.value(lb_series, tau)?) };
    // Invariant: no crossing at `lo`, crossing at `hi`.
    let (mut lo, mut hi) = (curve.grid[k - 1], hit);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if crosses(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

pub const CSV_SIGNIFICANT_DIGITS: usize = 10;

/// Formats `x` with `digits` significant digits in plain decimal notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let text = format!("{x:.decimals$}");
    // Rounding can carry into a new digit (9.99… → 10.0); reformat once.
    let rounded: f64 = text.parse().unwrap_or(x);
    let magnitude2 = rounded.abs().log10().floor() as i64;
    if magnitude2 != magnitude {
        let decimals = (digits as i64 - 1 - magnitude2).max(0) as usize;
        return format!("{rounded:.decimals$}");
    }
    text
}

pub fn csv_string(curve: &BoundCurve) -> String {
    let mut out = String::from("t");
    for s in &curve.columns {
        out.push(',');
        out.push_str(&s.name);
    }
    out.push('\n');
    for (k, tau) in curve.grid.iter().enumerate() {
        write!(out, "{tau}").expect("write to string");
        for s in &curve.columns {
            out.push(',');
            out.push_str(&format_significant(s.values[k], CSV_SIGNIFICANT_DIGITS));
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(curve: &BoundCurve, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(curve))?;
    Ok(())
}

/// Plain gnuplot script plotting the CSV written to `csv_path`.
pub fn gnuplot_script(curve: &BoundCurve, csv_path: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key top right\nset xlabel 'channel iteration t'\nset ylabel 'capacity (bits)'\n");
    s.push_str("set yrange [0:0.2]\n");
    let plots: Vec<String> = curve
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.name != PASSIVE_C_UB && !c.name.ends_with("_oneshot"))
        .map(|(k, c)| format!("'{csv_path}' using 1:{} with lines title '{}'", k + 2, c.name))
        .collect();
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}
