//! Sweep configuration and runner: the full verification matrix from one
//! JSON config, emitting an aggregate JSON report and a per-trial CSV table.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;

use spaceform::algebra::{SpaceFormKind, SpaceFormSpec, StructureSet};
use spaceform::geodesic::BundleKind;
use spaceform::report::TrialReport;
use spaceform::sampling::mix_seed;
use spaceform::suite::{curvature_trial, is_generic_profile, Tolerances};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kinds: Vec<SpaceFormKind>,
    /// Dimension list per family, so every cell satisfies the family's
    /// divisibility requirements.
    pub dims: BTreeMap<SpaceFormKind, Vec<usize>>,
    pub curvatures: Vec<f64>,
    pub rhos: Vec<f64>,
    pub bundles: Vec<BundleKind>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Output stem: the runner writes `<out>.json` and `<out>.csv`.
    pub out: PathBuf,
}

pub struct SweepCell {
    pub spec: SpaceFormSpec,
    pub bundle: BundleKind,
    pub rho: f64,
}

impl SweepConfig {
    /// Validate and expand into the ordered cell list.
    pub fn cells(&self) -> Result<Vec<SweepCell>, String> {
        if self.kinds.is_empty() {
            return Err("kinds must be nonempty".into());
        }
        if self.curvatures.is_empty() {
            return Err("curvatures must be nonempty".into());
        }
        if self.rhos.is_empty() {
            return Err("rhos must be nonempty".into());
        }
        if self.bundles.is_empty() {
            return Err("bundles must be nonempty".into());
        }
        if self.trials < 1 {
            return Err("trials must be at least 1".into());
        }
        for rho in &self.rhos {
            if !rho.is_finite() || !(0.0..=1.0).contains(rho) {
                return Err(format!("rho {rho} outside [0, 1]"));
            }
        }
        let mut cells = Vec::new();
        for &kind in &self.kinds {
            let dims = self
                .dims
                .get(&kind)
                .filter(|d| !d.is_empty())
                .ok_or_else(|| format!("no dims listed for kind {kind}"))?;
            for &dim in dims {
                for &c in &self.curvatures {
                    let spec = SpaceFormSpec::new(kind, dim, c).map_err(|e| e.to_string())?;
                    for &bundle in &self.bundles {
                        for &rho in &self.rhos {
                            cells.push(SweepCell { spec, bundle, rho });
                        }
                    }
                }
            }
        }
        if cells.is_empty() {
            return Err("configuration expands to no cells".into());
        }
        Ok(cells)
    }
}

pub struct SweepOutcome {
    pub csv: String,
    pub aggregate: serde_json::Value,
    pub all_pass: bool,
}

const CSV_K_COLUMNS: usize = 12;

/// Run the matrix. Trials are seeded per (master, cell, trial), so any
/// execution order reproduces the same reports.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome, String> {
    let cells = config.cells()?;
    let mut csv = String::from("kind,dim,c,rho,bundle,trial");
    for i in 1..=CSV_K_COLUMNS {
        csv.push_str(&format!(",k{i}"));
    }
    csv.push_str(",first_zero_index,all_pass\n");

    let mut max_residuals: BTreeMap<String, f64> = BTreeMap::new();
    let mut generic: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut all_pass = true;
    let mut trial_count = 0usize;
    for (cell_idx, cell) in cells.iter().enumerate() {
        let structures = StructureSet::for_spec(&cell.spec).map_err(|e| e.to_string())?;
        for trial in 0..config.trials {
            let seed = mix_seed(&[config.seed, cell_idx as u64, trial as u64]);
            let report = curvature_trial(
                &cell.spec,
                &structures,
                cell.bundle,
                cell.rho,
                trial,
                seed,
                &config.tolerances,
            )
            .map_err(|e| e.to_string())?;
            let pass = report.all_pass();
            all_pass &= pass;
            trial_count += 1;
            for c in &report.checks {
                let slot = max_residuals.entry(c.name.clone()).or_insert(0.0);
                *slot = slot.max(c.residual);
            }
            if let Some(profile) = &report.profile {
                let entry = generic
                    .entry(cell.spec.kind.to_string())
                    .or_insert((0, 0));
                entry.1 += 1;
                if is_generic_profile(profile, cell.spec.kind, config.tolerances.generic_floor) {
                    entry.0 += 1;
                }
            }
            csv.push_str(&csv_row(cell, trial, &report, pass));
        }
    }

    let genericity: BTreeMap<String, serde_json::Value> = generic
        .iter()
        .map(|(kind, (hit, total))| {
            (
                kind.clone(),
                serde_json::json!({
                    "generic": hit,
                    "total": total,
                    "fraction": *hit as f64 / (*total).max(1) as f64,
                }),
            )
        })
        .collect();
    let aggregate = serde_json::json!({
        "command": "sweep",
        "cells": cells.len(),
        "trials_per_cell": config.trials,
        "trials_total": trial_count,
        "seed": config.seed,
        "all_pass": all_pass,
        "max_residual_per_check": max_residuals,
        "genericity": genericity,
    });
    Ok(SweepOutcome {
        csv,
        aggregate,
        all_pass,
    })
}

fn csv_row(cell: &SweepCell, trial: usize, report: &TrialReport, pass: bool) -> String {
    let mut row = format!(
        "{},{},{},{},{},{}",
        cell.spec.kind, cell.spec.dim, cell.spec.curvature, cell.rho, cell.bundle, trial
    );
    let (ks, first_zero): (Vec<f64>, usize) = match &report.profile {
        Some(p) => (
            (1..=CSV_K_COLUMNS).map(|i| p.k(i)).collect(),
            p.frenet_rank,
        ),
        // vertical geodesics have no projected curve: all-zero row, index 0
        None => (vec![0.0; CSV_K_COLUMNS], 0),
    };
    for k in ks {
        row.push_str(&format!(",{k}"));
    }
    row.push_str(&format!(",{first_zero},{pass}\n"));
    row
}

