//! Capacitively coupled LC resonator networks: design, netlists, coupler
//! islands and S-parameter sweeps.

mod coupler;
mod coupling;
mod modes;
mod netlist;
mod ports;
mod sweep;

use crate::analysis::AnalysisError;

pub use coupler::{reduce_coupler, synthesize_coupler, Coupler, CouplerNetwork, CouplerReduction};
pub use coupling::{derive_couplings, CouplingPlan};
pub use modes::{normal_modes, PortTermination};
pub use netlist::{
    describe, single_resonator_netlist, site_node, synthesize_netlist, CircuitDesign, Element, ElementKind, Netlist,
    Port, ResonatorSpec, DEFAULT_PORT_COUPLING, DEFAULT_PORT_IMPEDANCE, DEFAULT_RESONATOR_FREQUENCY,
    DEFAULT_RESONATOR_IMPEDANCE,
};
pub use ports::select_port_vertices;
pub use sweep::{ac_sweep, simulated_trace, FrequencyGrid, SweepResult, DEFAULT_SWEEP_POINTS, DEFAULT_SWEEP_SPAN};

pub const DEFAULT_REFERENCE_CAPACITANCE: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("edge {edge} has zero or non-finite length")]
    ZeroDistance { edge: usize },
    #[error("coupling plan has {plan} values for {edges} edges")]
    PlanMismatch { plan: usize, edges: usize },
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("invalid resonator: {0}")]
    InvalidResonator(String),
    #[error("node {node} carries more than one port")]
    DuplicatePort { node: usize },
    #[error("vertex {vertex} is not in the lattice")]
    UnknownVertex { vertex: usize },
    #[error("port {port} out of range for {ports} ports")]
    PortOutOfRange { port: usize, ports: usize },
    #[error("netlist has no ports")]
    NoPorts,
    #[error("node {node} has no path to ground")]
    Floating { node: usize },
    #[error("coupling load leaves site {site} with shunt capacitance {shunt:e} F")]
    LoadingTooLarge { site: usize, shunt: f64 },
    #[error("degenerate coupler: {0}")]
    Degenerate(String),
    #[error("netlist line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Trace(#[from] AnalysisError),
}
