use std::f64::consts::TAU;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::coupling::check_capacitance;
use super::{CircuitError, CouplingPlan};
use crate::lattice::LatticeGraph;

pub const DEFAULT_RESONATOR_FREQUENCY: f64 = 6.5e9;
pub const DEFAULT_RESONATOR_IMPEDANCE: f64 = 50.0;
pub const DEFAULT_PORT_COUPLING: f64 = 2e-15;
pub const DEFAULT_PORT_IMPEDANCE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Capacitor,
    Inductor,
    /// Shunt loss; not part of the ideal model, only used to broaden peaks.
    Conductance,
}

impl ElementKind {
    fn letter(self) -> char {
        match self {
            ElementKind::Capacitor => 'C',
            ElementKind::Inductor => 'L',
            ElementKind::Conductance => 'G',
        }
    }
}

/// Two-terminal element between nodes `a` and `b` (node 0 is ground).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    pub a: usize,
    pub b: usize,
    /// Farads, henries or siemens.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Port {
    pub node: usize,
    pub impedance: f64,
}

/// Lumped-element circuit. Ports are listed in their S-matrix order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    comments: Vec<String>,
    elements: Vec<Element>,
    ports: Vec<Port>,
}

impl Netlist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn count(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }

    /// Number of nodes including ground.
    pub fn node_count(&self) -> usize {
        let elements = self.elements.iter().map(|e| e.a.max(e.b));
        let ports = self.ports.iter().map(|p| p.node);
        elements.chain(ports).max().map_or(1, |m| m + 1)
    }

    pub fn add_comment(&mut self, text: impl Into<String>) {
        self.comments.push(text.into());
    }

    pub fn add(&mut self, kind: ElementKind, a: usize, b: usize, value: f64) -> Result<(), CircuitError> {
        if a == b {
            return Err(CircuitError::InvalidValue(format!("element shorted on node {a}")));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(CircuitError::InvalidValue(format!(
                "{} between {a} and {b} has value {value}",
                kind.letter()
            )));
        }
        self.elements.push(Element { kind, a, b, value });
        Ok(())
    }

    pub fn add_port(&mut self, node: usize, impedance: f64) -> Result<(), CircuitError> {
        if node == 0 {
            return Err(CircuitError::InvalidValue("port on the ground node".into()));
        }
        if !(impedance > 0.0 && impedance.is_finite()) {
            return Err(CircuitError::InvalidValue(format!("port impedance {impedance}")));
        }
        if self.ports.iter().any(|p| p.node == node) {
            return Err(CircuitError::DuplicatePort { node });
        }
        self.ports.push(Port { node, impedance });
        Ok(())
    }

    /// Every node from 1 to the highest index must reach ground through
    /// elements or a port termination.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let n = self.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut union = |a: usize, b: usize| {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        };
        for e in &self.elements {
            union(e.a, e.b);
        }
        for p in &self.ports {
            union(p.node, 0);
        }
        match (1..n).find(|&v| find(&mut parent, v) != 0) {
            Some(node) => Err(CircuitError::Floating { node }),
            None => Ok(()),
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, CircuitError> {
        text.parse()
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.comments {
            writeln!(f, "#{c}")?;
        }
        for e in &self.elements {
            writeln!(f, "{} {} {} {:e}", e.kind.letter(), e.a, e.b, e.value)?;
        }
        for p in &self.ports {
            writeln!(f, "P {} {}", p.node, p.impedance)?;
        }
        Ok(())
    }
}

impl FromStr for Netlist {
    type Err = CircuitError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut net = Netlist::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let bad = |message: String| CircuitError::Parse { line, message };
            let trimmed = raw.trim_start();
            if let Some(comment) = trimmed.strip_prefix('#') {
                net.comments.push(comment.to_string());
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let Some(&head) = fields.first() else { continue };
            let node = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad node `{s}`")));
            let number = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad value `{s}`")));
            let kind = match head {
                "C" => Some(ElementKind::Capacitor),
                "L" => Some(ElementKind::Inductor),
                "G" => Some(ElementKind::Conductance),
                "P" => None,
                other => return Err(bad(format!("unknown element `{other}`"))),
            };
            match kind {
                Some(kind) => {
                    if fields.len() != 4 {
                        return Err(bad(format!("expected `{head} <node> <node> <value>`")));
                    }
                    let (a, b, v) = (node(fields[1])?, node(fields[2])?, number(fields[3])?);
                    net.add(kind, a, b, v).map_err(|e| bad(e.to_string()))?;
                }
                None => {
                    if fields.len() != 3 {
                        return Err(bad("expected `P <node> <ohms>`".into()));
                    }
                    let (n, z) = (node(fields[1])?, number(fields[2])?);
                    net.add_port(n, z).map_err(|e| bad(e.to_string()))?;
                }
            }
        }
        Ok(net)
    }
}

/// Target resonance and characteristic impedance of one lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorSpec {
    pub frequency: f64,
    pub impedance: f64,
}

impl Default for ResonatorSpec {
    fn default() -> Self {
        Self {
            frequency: DEFAULT_RESONATOR_FREQUENCY,
            impedance: DEFAULT_RESONATOR_IMPEDANCE,
        }
    }
}

impl ResonatorSpec {
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.frequency > 0.0 && self.frequency.is_finite() && self.impedance > 0.0 && self.impedance.is_finite() {
            Ok(())
        } else {
            Err(CircuitError::InvalidResonator(format!(
                "f0 = {} Hz, Z = {} ohm",
                self.frequency, self.impedance
            )))
        }
    }

    /// `1 / (2π f₀ Z)`
    pub fn capacitance(&self) -> f64 {
        1.0 / (TAU * self.frequency * self.impedance)
    }

    /// `Z / (2π f₀)`
    pub fn inductance(&self) -> f64 {
        self.impedance / (TAU * self.frequency)
    }
}

/// Circuit-level choices that are independent of the lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CircuitDesign {
    pub resonator: ResonatorSpec,
    /// Series capacitor between a site and its port.
    pub port_coupling: f64,
    pub port_impedance: f64,
    /// Reduce each shunt capacitor by the coupling capacitance hanging on
    /// the node so every loaded site still resonates at `f₀`. Without it
    /// the diagonal loading differs between sites and shifts the spectrum
    /// away from the plain adjacency matrix.
    pub compensate_loading: bool,
    /// Optional shunt conductance per site (siemens), zero for lossless.
    pub shunt_conductance: f64,
    /// Relative half-width of a uniform random spread of site frequencies.
    pub frequency_spread: f64,
    pub seed: u64,
}

impl Default for CircuitDesign {
    fn default() -> Self {
        Self {
            resonator: ResonatorSpec::default(),
            port_coupling: DEFAULT_PORT_COUPLING,
            port_impedance: DEFAULT_PORT_IMPEDANCE,
            compensate_loading: true,
            shunt_conductance: 0.0,
            frequency_spread: 0.0,
            seed: 0,
        }
    }
}

impl CircuitDesign {
    pub fn validate(&self) -> Result<(), CircuitError> {
        self.resonator.validate()?;
        check_capacitance("port coupling", self.port_coupling)?;
        if !(self.port_impedance > 0.0 && self.port_impedance.is_finite()) {
            return Err(CircuitError::InvalidValue(format!("port impedance {}", self.port_impedance)));
        }
        if !(self.shunt_conductance >= 0.0 && self.shunt_conductance.is_finite()) {
            return Err(CircuitError::InvalidValue(format!("shunt conductance {}", self.shunt_conductance)));
        }
        if !(0.0..0.5).contains(&self.frequency_spread) {
            return Err(CircuitError::InvalidValue(format!("frequency spread {}", self.frequency_spread)));
        }
        Ok(())
    }

    /// Per-site inductances, including the optional random spread.
    fn inductances(&self, sites: usize) -> Vec<f64> {
        let l = self.resonator.inductance();
        if self.frequency_spread == 0.0 {
            return vec![l; sites];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..sites)
            .map(|_| {
                let d: f64 = rng.random_range(-self.frequency_spread..=self.frequency_spread);
                l / (1.0 + d).powi(2)
            })
            .collect()
    }
}

/// Site `v` of the lattice lives on node `v + 1`.
pub fn site_node(v: usize) -> usize {
    v + 1
}

/// Builds the resonator network: a parallel LC to ground per site, a
/// coupling capacitor per edge and a series capacitor per port.
pub fn synthesize_netlist(
    g: &LatticeGraph,
    plan: &CouplingPlan,
    design: &CircuitDesign,
    port_vertices: &[usize],
) -> Result<Netlist, CircuitError> {
    if plan.capacitances().len() != g.edge_count() {
        return Err(CircuitError::PlanMismatch {
            plan: plan.capacitances().len(),
            edges: g.edge_count(),
        });
    }
    let mut load = vec![0.0; g.vertex_count()];
    let couplings: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .zip(plan.capacitances())
        .map(|(e, &c)| {
            load[e.i] += c;
            load[e.j] += c;
            (site_node(e.i), site_node(e.j), c)
        })
        .collect();
    let mut net = resonator_network(g.vertex_count(), 0, &couplings, &load, design, port_vertices)?;
    net.comments.insert(
        0,
        format!(
            " {} sites, {} couplings, {} ports, f0 {:e} Hz, Z {} ohm",
            g.vertex_count(),
            g.edge_count(),
            port_vertices.len(),
            design.resonator.frequency,
            design.resonator.impedance
        ),
    );
    Ok(net)
}

/// Two-port reference device: one LC resonator with a port capacitor on
/// each side.
pub fn single_resonator_netlist(design: &CircuitDesign) -> Result<Netlist, CircuitError> {
    design.validate()?;
    let mut net = Netlist::new();
    net.add_comment(" single resonator, two ports");
    let c = design.resonator.capacitance();
    let shunt = if design.compensate_loading {
        c - 2.0 * design.port_coupling
    } else {
        c
    };
    if shunt <= 0.0 {
        return Err(CircuitError::LoadingTooLarge { site: 0, shunt });
    }
    net.add(ElementKind::Inductor, 1, 0, design.inductances(1)[0])?;
    net.add(ElementKind::Capacitor, 1, 0, shunt)?;
    if design.shunt_conductance > 0.0 {
        net.add(ElementKind::Conductance, 1, 0, design.shunt_conductance)?;
    }
    for port in [2, 3] {
        net.add(ElementKind::Capacitor, 1, port, design.port_coupling)?;
    }
    for port in [2, 3] {
        net.add_port(port, design.port_impedance)?;
    }
    Ok(net)
}

/// Shared builder. `couplings` are capacitors in node numbering (sites on
/// `1..=sites`, then `islands` floating coupler nodes); `coupling_load[v]`
/// is the capacitance they add to site `v` as seen after eliminating any
/// islands, which compensation subtracts from the shunt.
pub(crate) fn resonator_network(
    sites: usize,
    islands: usize,
    couplings: &[(usize, usize, f64)],
    coupling_load: &[f64],
    design: &CircuitDesign,
    port_vertices: &[usize],
) -> Result<Netlist, CircuitError> {
    design.validate()?;
    for (k, &v) in port_vertices.iter().enumerate() {
        if v >= sites {
            return Err(CircuitError::UnknownVertex { vertex: v });
        }
        if port_vertices[..k].contains(&v) {
            return Err(CircuitError::DuplicatePort { node: site_node(v) });
        }
    }

    let c_res = design.resonator.capacitance();
    let mut load = coupling_load.to_vec();
    for &v in port_vertices {
        load[v] += design.port_coupling;
    }

    let mut net = Netlist::new();
    for (v, l) in design.inductances(sites).into_iter().enumerate() {
        let shunt = if design.compensate_loading { c_res - load[v] } else { c_res };
        if !(shunt > 0.0) {
            return Err(CircuitError::LoadingTooLarge { site: v, shunt });
        }
        net.add(ElementKind::Inductor, site_node(v), 0, l)?;
        net.add(ElementKind::Capacitor, site_node(v), 0, shunt)?;
        if design.shunt_conductance > 0.0 {
            net.add(ElementKind::Conductance, site_node(v), 0, design.shunt_conductance)?;
        }
    }
    for &(a, b, c) in couplings {
        net.add(ElementKind::Capacitor, a, b, c)?;
    }
    let first_port = sites + islands + 1;
    for (k, &v) in port_vertices.iter().enumerate() {
        net.add(ElementKind::Capacitor, site_node(v), first_port + k, design.port_coupling)?;
    }
    for k in 0..port_vertices.len() {
        net.add_port(first_port + k, design.port_impedance)?;
    }
    Ok(net)
}

/// Summary line used by the command-line tools.
pub fn describe(net: &Netlist) -> String {
    let mut s = String::new();
    write!(
        s,
        "nodes={} C={} L={} G={} P={}",
        net.node_count() - 1,
        net.count(ElementKind::Capacitor),
        net.count(ElementKind::Inductor),
        net.count(ElementKind::Conductance),
        net.ports().len()
    )
    .expect("write to string");
    s
}
