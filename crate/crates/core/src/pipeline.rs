//! End-to-end compilation: circuit -> layout -> schedule -> metrics.

use crate::circuit::Circuit;
use crate::layout::{build_layout, GridLayout, LayoutError};
use crate::metrics::{compute_metrics, MetricsError, MetricsReport};
use crate::occupancy::MappingMode;
use crate::scheduler::{
    remove_redundant_moves, retime_schedule, schedule, validate_schedule, LatencyModel, Schedule,
    ScheduleError, SchedulerConfig, ValidationReport,
};
use thiserror::Error;

#[derive(Clone, Copy, Debug)]
pub struct CompileOptions {
    pub r: usize,
    pub n_msf: usize,
    pub latency: LatencyModel,
    pub mapping: MappingMode,
    pub factory_footprint: usize,
}

impl CompileOptions {
    pub fn new(r: usize, n_msf: usize) -> Self {
        CompileOptions {
            r,
            n_msf,
            latency: LatencyModel::default(),
            mapping: MappingMode::Grid2d,
            factory_footprint: crate::layout::DEFAULT_FACTORY_FOOTPRINT,
        }
    }
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

pub struct CompileOutput {
    pub layout: GridLayout,
    pub schedule: Schedule,
    pub schedule_unit: Schedule,
    pub report: MetricsReport,
    pub validation: ValidationReport,
}

/// Smallest square data block that fits the circuit (at least 2x2).
pub fn side_length_for(n_qubits: usize) -> usize {
    let mut l = 2;
    while l * l < n_qubits {
        l += 1;
    }
    l
}

/// Run the full pipeline: build the layout, schedule, cancel redundant
/// moves, retime at unit cost and compute the metrics report.
pub fn compile(circuit: &Circuit, opts: &CompileOptions) -> Result<CompileOutput, CompileError> {
    let side = side_length_for(circuit.n_qubits);
    let mut layout = build_layout(side, opts.r)?.place_factories(opts.n_msf)?;
    layout.factory_footprint = opts.factory_footprint;

    let cfg = SchedulerConfig {
        n_msf: opts.n_msf,
        latency: opts.latency,
        unit_cost: false,
        mapping: opts.mapping,
    };
    let raw = schedule(circuit, &layout, &cfg)?;
    let exec = remove_redundant_moves(&raw, circuit, &opts.latency);
    let unit = retime_schedule(&exec, circuit, &opts.latency, true);
    let report = compute_metrics(&exec, &unit, &layout, circuit)?;
    let validation = validate_schedule(&exec, circuit, &layout, opts.mapping);

    Ok(CompileOutput {
        layout,
        schedule: exec,
        schedule_unit: unit,
        report,
        validation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{generate, LatticeModel, LatticeSpec};

    #[test]
    fn side_length_covers_circuit() {
        assert_eq!(side_length_for(1), 2);
        assert_eq!(side_length_for(4), 2);
        assert_eq!(side_length_for(5), 3);
        assert_eq!(side_length_for(100), 10);
        assert_eq!(side_length_for(28), 6);
    }

    #[test]
    fn pipeline_compiles_a_small_benchmark() {
        let c = generate(&LatticeSpec::new(LatticeModel::Ising2d, 2)).unwrap();
        let out = compile(&c, &CompileOptions::new(3, 1)).unwrap();
        assert!(out.validation.is_clean(), "{:?}", out.validation.violations);
        assert!(out.report.exec_time_d >= out.report.lower_bound_d);
        assert!(out.report.unit_cost_time_d <= out.report.exec_time_d);
        assert_eq!(out.report.n_t, 8);
        assert_eq!(out.schedule.consume_count(), 8);
    }
}
