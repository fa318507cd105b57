//! Layer-count sweeps of both models with a grid search per cell.

use serde::{Deserialize, Serialize};

use crate::circuit::Axis;
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::model::{build_medq_with_axis, build_reuploading_baseline, CircuitSpec, ModelKind};
use crate::training::{derive_seed, grid_search, GridReport, GridSettings, Lattice, LatticePoint};

/// Builds a circuit. For MEDQ `layers` counts layers per block (the circuit
/// has `3·layers` layers); for the baseline it is the total.
pub fn build_model(
    kind: ModelKind,
    layers: usize,
    feature_dim: usize,
    n_qubits: usize,
    angle_axis: Axis,
) -> Result<CircuitSpec> {
    match kind {
        ModelKind::Medq => build_medq_with_axis(layers, feature_dim, n_qubits, angle_axis),
        ModelKind::Reuploading => build_reuploading_baseline(layers, feature_dim, n_qubits),
    }
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPlan {
    pub models: Vec<ModelKind>,
    pub layer_counts: Vec<usize>,
    pub angle_axis: Axis,
    /// `None` uses [`Lattice::default_for`] the feature dimension.
    pub lattice: Option<Lattice>,
    pub settings: GridSettings,
}

/// One (model, layer count) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub model: ModelKind,
    pub layers: usize,
    pub seed: u64,
    pub selected: LatticePoint,
    pub mean_test_accuracy: f64,
    pub grid: GridReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub layer_counts: Vec<usize>,
    pub cells: Vec<BenchmarkCell>,
}

impl BenchmarkReport {
    pub fn cell(&self, model: ModelKind, layers: usize) -> Option<&BenchmarkCell> {
        self.cells.iter().find(|c| c.model == model && c.layers == layers)
    }

    /// Mean accuracies for `model` in `layer_counts` order.
    pub fn row(&self, model: ModelKind) -> Vec<Option<f64>> {
        self.layer_counts
            .iter()
            .map(|&l| self.cell(model, l).map(|c| c.mean_test_accuracy))
            .collect()
    }

    fn models(&self) -> Vec<ModelKind> {
        let mut out = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.model) {
                out.push(c.model);
            }
        }
        out
    }

    /// Aligned text table, one row per model.
    pub fn to_text_table(&self) -> String {
        let mut out = format!("{:<14}", "Layer Num");
        for l in &self.layer_counts {
            out.push_str(&format!("{l:>9}"));
        }
        out.push('\n');
        for m in self.models() {
            out.push_str(&format!("{:<14}", m.to_string()));
            for v in self.row(m) {
                match v {
                    Some(v) => out.push_str(&format!("{v:>9.4}")),
                    None => out.push_str(&format!("{:>9}", "-")),
                }
            }
            out.push('\n');
        }
        out
    }

    /// CSV with header `model,layers,...` and one row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,layers,learning_rate,n_qubits,mean_test_accuracy\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.model, c.layers, c.selected.learning_rate, c.selected.n_qubits, c.mean_test_accuracy
            ));
        }
        out
    }
}

/// Runs the grid search for every model and layer count. Each cell gets its
/// own seed derived from the plan seed, so cells can be re-run in isolation.
pub fn run_benchmark(plan: &BenchmarkPlan, train_data: &LabeledDataset, test_data: &LabeledDataset) -> Result<BenchmarkReport> {
    if plan.models.is_empty() || plan.layer_counts.is_empty() {
        return Err(Error::invalid("benchmark needs at least one model and one layer count"));
    }
    if train_data.dim() != test_data.dim() {
        return Err(Error::invalid(format!(
            "train and test dimensions differ ({} vs {})",
            train_data.dim(),
            test_data.dim()
        )));
    }
    let d = train_data.dim();
    let mut cells = Vec::new();
    for (mi, &model) in plan.models.iter().enumerate() {
        let lattice = plan.lattice.clone().unwrap_or_else(|| Lattice::default_for(d));
        for (li, &layers) in plan.layer_counts.iter().enumerate() {
            let seed = cell_seed(plan.settings.seed, mi, li);
            let grid = run_cell(plan, model, layers, seed, &lattice, train_data, test_data)?;
            cells.push(BenchmarkCell {
                model,
                layers,
                seed,
                selected: grid.best().point,
                mean_test_accuracy: grid.mean_test_accuracy(),
                grid,
            });
        }
    }
    Ok(BenchmarkReport {
        layer_counts: plan.layer_counts.clone(),
        cells,
    })
}

/// Seed of the cell at (`model_index`, `layer_index`) of a plan.
pub fn cell_seed(plan_seed: u64, model_index: usize, layer_index: usize) -> u64 {
    derive_seed(derive_seed(plan_seed, 1_000 + model_index as u64), layer_index as u64)
}

/// Grid search for a single cell.
pub fn run_cell(
    plan: &BenchmarkPlan,
    model: ModelKind,
    layers: usize,
    seed: u64,
    lattice: &Lattice,
    train_data: &LabeledDataset,
    test_data: &LabeledDataset,
) -> Result<GridReport> {
    let d = train_data.dim();
    let settings = GridSettings {
        seed,
        ..plan.settings.clone()
    };
    grid_search(
        |p: &LatticePoint| build_model(model, layers, d, p.n_qubits, plan.angle_axis),
        lattice,
        &settings,
        train_data,
        test_data,
    )
}

/// Smallest layer count whose mean is within `tolerance` of the row maximum.
pub fn layers_to_near_best(report: &BenchmarkReport, model: ModelKind, tolerance: f64) -> Option<usize> {
    let row = report.row(model);
    let best = row.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    report
        .layer_counts
        .iter()
        .zip(row)
        .find(|(_, v)| v.is_some_and(|v| v >= best - tolerance))
        .map(|(&l, _)| l)
}
