use std::f64::consts::TAU;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CircuitError, ElementKind, Netlist};
use crate::analysis::Trace;

pub const DEFAULT_SWEEP_POINTS: usize = 20_001;
pub const DEFAULT_SWEEP_SPAN: f64 = 0.05;
/// Transmission below this magnitude is reported at this floor in dB.
const MAGNITUDE_FLOOR: f64 = 1e-15;

/// Evenly spaced frequency grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl FrequencyGrid {
    /// `centre · (1 ± span)`.
    pub fn around(centre: f64, span: f64, points: usize) -> Self {
        Self {
            start: centre * (1.0 - span),
            stop: centre * (1.0 + span),
            points,
        }
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let ok = self.start > 0.0 && self.stop.is_finite() && self.points >= 1 && (self.points == 1 || self.stop > self.start);
        if ok {
            Ok(())
        } else {
            Err(CircuitError::InvalidValue(format!(
                "frequency grid {} .. {} Hz with {} points",
                self.start, self.stop, self.points
            )))
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| if k + 1 == self.points { self.stop } else { self.start + k as f64 * step })
            .collect()
    }
}

/// S-matrices over a frequency sweep. A point whose nodal system could not
/// be solved holds `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    frequencies: Vec<f64>,
    impedances: Vec<f64>,
    matrices: Vec<Option<DMatrix<Complex64>>>,
}

impl SweepResult {
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn port_count(&self) -> usize {
        self.impedances.len()
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn matrix(&self, point: usize) -> Option<&DMatrix<Complex64>> {
        self.matrices[point].as_ref()
    }

    /// `S_{out,in}` at one point, zero-based port indices.
    pub fn s(&self, point: usize, out: usize, inp: usize) -> Option<Complex64> {
        self.matrix(point).map(|m| m[(out, inp)])
    }

    /// Indices of points where the solve failed.
    pub fn failures(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.matrices[k].is_none()).collect()
    }

    /// `frequency_hz,re_s11,im_s11,re_s12,...` with one-based port labels,
    /// row-major over the S-matrix.
    pub fn to_csv(&self) -> String {
        let n = self.port_count();
        let mut out = String::from("frequency_hz");
        for a in 1..=n {
            for b in 1..=n {
                write!(out, ",re_s{a}{b},im_s{a}{b}").expect("write to string");
            }
        }
        out.push('\n');
        for (f, m) in self.frequencies.iter().zip(&self.matrices) {
            write!(out, "{f:?}").expect("write to string");
            for a in 0..n {
                for b in 0..n {
                    let z = m.as_ref().map_or(Complex64::new(f64::NAN, f64::NAN), |m| m[(a, b)]);
                    write!(out, ",{:?},{:?}", z.re, z.im).expect("write to string");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Touchstone 1.0 magnitude/angle export. Two-port data uses the
    /// S11 S21 S12 S22 order of the format; larger matrices are written row
    /// by row, four entries per line. Failed points are left out.
    pub fn to_touchstone(&self) -> Result<String, CircuitError> {
        let z0 = self.impedances.first().copied().unwrap_or(50.0);
        if self.impedances.iter().any(|&z| z != z0) {
            return Err(CircuitError::InvalidValue("touchstone export needs one reference impedance".into()));
        }
        let n = self.port_count();
        let mut out = format!("! {n}-port S-parameters\n# HZ S MA R {z0}\n");
        let pair = |z: Complex64| format!(" {:e} {:e}", z.norm(), z.arg().to_degrees());
        for (f, m) in self.frequencies.iter().zip(&self.matrices) {
            let Some(m) = m else {
                writeln!(out, "! {f:e} Hz not solved").expect("write to string");
                continue;
            };
            write!(out, "{f:e}").expect("write to string");
            if n == 2 {
                for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    out.push_str(&pair(m[(a, b)]));
                }
                out.push('\n');
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    if b > 0 && b % 4 == 0 {
                        out.push('\n');
                    }
                    out.push_str(&pair(m[(a, b)]));
                }
                out.push('\n');
            }
        }
        Ok(out)
    }
}

/// Real node matrices, ground removed (node `k` at index `k - 1`).
pub(crate) struct NodalMatrices {
    pub capacitance: DMatrix<f64>,
    pub conductance: DMatrix<f64>,
    pub inverse_inductance: DMatrix<f64>,
}

impl NodalMatrices {
    pub fn assemble(net: &Netlist) -> Self {
        let n = net.node_count() - 1;
        let mut m = Self {
            capacitance: DMatrix::zeros(n, n),
            conductance: DMatrix::zeros(n, n),
            inverse_inductance: DMatrix::zeros(n, n),
        };
        for e in net.elements() {
            let (target, v) = match e.kind {
                ElementKind::Capacitor => (&mut m.capacitance, e.value),
                ElementKind::Conductance => (&mut m.conductance, e.value),
                ElementKind::Inductor => (&mut m.inverse_inductance, 1.0 / e.value),
            };
            stamp(target, e.a, e.b, v);
        }
        m
    }
}

fn stamp(m: &mut DMatrix<f64>, a: usize, b: usize, v: f64) {
    if a > 0 {
        m[(a - 1, a - 1)] += v;
    }
    if b > 0 {
        m[(b - 1, b - 1)] += v;
    }
    if a > 0 && b > 0 {
        m[(a - 1, b - 1)] -= v;
        m[(b - 1, a - 1)] -= v;
    }
}

/// Nodal-admittance sweep over `Y = jωC + G + Γ/(jω)`.
///
/// The port block of the scattering matrix is
/// `S = (I + Ỹ)⁻¹ (I − Ỹ)` with `Ỹ = √Z Y_p √Z` and `Y_p` the Schur
/// complement of the non-port nodes. It is evaluated as
/// `S = 2 √Z⁻¹ [(Y + Z⁻¹)⁻¹]_pp √Z⁻¹ − I`: loading each port with its
/// reference conductance first keeps the solve well conditioned when an
/// internal node sits exactly on resonance, where eliminating it explicitly
/// would divide by a vanishing admittance.
pub fn ac_sweep(net: &Netlist, frequencies: &[f64]) -> Result<SweepResult, CircuitError> {
    net.validate()?;
    if net.ports().is_empty() {
        return Err(CircuitError::NoPorts);
    }
    if let Some(&f) = frequencies.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
        return Err(CircuitError::InvalidValue(format!("sweep frequency {f}")));
    }
    let m = NodalMatrices::assemble(net);
    let ports: Vec<usize> = net.ports().iter().map(|p| p.node - 1).collect();
    let impedances: Vec<f64> = net.ports().iter().map(|p| p.impedance).collect();

    let matrices = frequencies
        .par_iter()
        .map(|&f| port_scattering(&m, &ports, &impedances, TAU * f))
        .collect();
    Ok(SweepResult {
        frequencies: frequencies.to_vec(),
        impedances,
        matrices,
    })
}

fn port_scattering(m: &NodalMatrices, ports: &[usize], impedances: &[f64], omega: f64) -> Option<DMatrix<Complex64>> {
    let n = m.capacitance.nrows();
    let mut y = DMatrix::from_fn(n, n, |r, c| {
        Complex64::new(
            m.conductance[(r, c)],
            omega * m.capacitance[(r, c)] - m.inverse_inductance[(r, c)] / omega,
        )
    });
    let np = ports.len();
    let mut rhs = DMatrix::<Complex64>::zeros(n, np);
    for (k, (&p, &z)) in ports.iter().zip(impedances).enumerate() {
        y[(p, p)] += 1.0 / z;
        rhs[(p, k)] = Complex64::from(1.0);
    }
    let x = y.lu().solve(&rhs)?;
    let s = DMatrix::from_fn(np, np, |a, b| {
        let delta = if a == b { 1.0 } else { 0.0 };
        2.0 * x[(ports[a], b)] / (impedances[a] * impedances[b]).sqrt() - delta
    });
    s.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(s)
}

/// Per-frequency maximum of `20 log₁₀ |S(out, in)|` over `in_ports`
/// (zero-based). Unsolved points are dropped.
pub fn simulated_trace(sweep: &SweepResult, out_port: usize, in_ports: &[usize]) -> Result<Trace, CircuitError> {
    let n = sweep.port_count();
    if in_ports.is_empty() {
        return Err(CircuitError::InvalidValue("no input ports selected".into()));
    }
    if let Some(&p) = std::iter::once(&out_port).chain(in_ports).find(|&&p| p >= n) {
        return Err(CircuitError::PortOutOfRange { port: p, ports: n });
    }
    let mut freqs = Vec::with_capacity(sweep.len());
    let mut db = Vec::with_capacity(sweep.len());
    for (k, &f) in sweep.frequencies().iter().enumerate() {
        let Some(m) = sweep.matrix(k) else { continue };
        let best = in_ports
            .iter()
            .map(|&i| 20.0 * m[(out_port, i)].norm().max(MAGNITUDE_FLOOR).log10())
            .fold(f64::NEG_INFINITY, f64::max);
        freqs.push(f);
        db.push(best);
    }
    Ok(Trace::new(freqs, db)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{single_resonator_netlist, CircuitDesign};

    /// Closed form for one parallel LC (plus optional conductance) with a
    /// series capacitor to each of two ports: the source sees `Z0` in series
    /// with the port capacitor, so with `y_b = 1/(Z0 + 1/(jωCp))` the load
    /// port voltage gives `S21 = 2 Z0 y_b² / (Y_res + 2 y_b)`.
    fn closed_form_s21(l: f64, c: f64, g: f64, cp: f64, z0: f64, f: f64) -> Complex64 {
        let w = TAU * f;
        let j = Complex64::i();
        let y_res = j * w * c + 1.0 / (j * w * l) + g;
        let y_b = 1.0 / (z0 + 1.0 / (j * w * cp));
        2.0 * z0 * y_b * y_b / (y_res + 2.0 * y_b)
    }

    fn element(net: &Netlist, kind: ElementKind, a: usize, b: usize) -> f64 {
        net.elements().iter().find(|e| e.kind == kind && e.a == a && e.b == b).unwrap().value
    }

    #[test]
    fn single_resonator_matches_closed_form() {
        let design = CircuitDesign {
            port_coupling: 20e-15,
            ..CircuitDesign::default()
        };
        let net = single_resonator_netlist(&design).unwrap();
        let (l, c, cp) = (
            element(&net, ElementKind::Inductor, 1, 0),
            element(&net, ElementKind::Capacitor, 1, 0),
            element(&net, ElementKind::Capacitor, 1, 2),
        );
        let grid = FrequencyGrid::around(6.5e9, 0.01, 2001).values();
        let sweep = ac_sweep(&net, &grid).unwrap();
        let mut worst: f64 = 0.0;
        for (k, &f) in grid.iter().enumerate() {
            let want = closed_form_s21(l, c, 0.0, cp, 50.0, f).norm();
            let got = sweep.s(k, 1, 0).unwrap().norm();
            worst = worst.max((got / want - 1.0).abs());
        }
        assert!(worst < 1e-6, "relative error {worst}");
    }

    #[test]
    fn lossless_sweep_is_reciprocal_and_unitary() {
        let net = single_resonator_netlist(&CircuitDesign::default()).unwrap();
        let grid = FrequencyGrid::around(6.5e9, 0.001, 101).values();
        let sweep = ac_sweep(&net, &grid).unwrap();
        for k in 0..sweep.len() {
            let s = sweep.matrix(k).unwrap();
            assert!((s[(0, 1)] - s[(1, 0)]).norm() < 1e-9);
            let u = s.adjoint() * s;
            assert!((u - DMatrix::identity(2, 2)).norm() < 1e-6);
        }
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = FrequencyGrid::around(6.5e9, 0.05, DEFAULT_SWEEP_POINTS);
        let v = g.values();
        assert_eq!(v.len(), 20_001);
        assert_eq!(v[0], g.start);
        assert_eq!(v[20_000], g.stop);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!(FrequencyGrid { start: 0.0, stop: 1.0, points: 3 }.validate().is_err());
    }

    #[test]
    fn csv_and_touchstone_have_one_row_per_point() {
        let net = single_resonator_netlist(&CircuitDesign::default()).unwrap();
        let grid = FrequencyGrid::around(6.5e9, 0.01, 11).values();
        let sweep = ac_sweep(&net, &grid).unwrap();
        let csv = sweep.to_csv();
        assert_eq!(csv.lines().count(), 12);
        assert!(csv.starts_with("frequency_hz,re_s11,im_s11,re_s12,im_s12,re_s21"));
        let ts = sweep.to_touchstone().unwrap();
        assert!(ts.contains("# HZ S MA R 50"));
        assert_eq!(ts.lines().filter(|l| !l.starts_with(['!', '#'])).count(), 11);
    }

    #[test]
    fn trace_takes_the_maximum_over_inputs() {
        let net = single_resonator_netlist(&CircuitDesign::default()).unwrap();
        let grid = FrequencyGrid::around(6.5e9, 0.01, 51).values();
        let sweep = ac_sweep(&net, &grid).unwrap();
        let t21 = simulated_trace(&sweep, 1, &[0]).unwrap();
        let t11 = simulated_trace(&sweep, 1, &[1]).unwrap();
        let both = simulated_trace(&sweep, 1, &[0, 1]).unwrap();
        for k in 0..grid.len() {
            let expect = t21.transmission()[k].max(t11.transmission()[k]);
            assert_eq!(both.transmission()[k], expect);
            let direct = 20.0 * sweep.s(k, 1, 0).unwrap().norm().log10();
            assert!((t21.transmission()[k] - direct).abs() < 1e-12);
        }
        assert!(matches!(
            simulated_trace(&sweep, 2, &[0]),
            Err(CircuitError::PortOutOfRange { port: 2, ports: 2 })
        ));
    }
}
