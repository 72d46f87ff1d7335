use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Transmission in dB on a strictly increasing frequency grid (hertz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrace")]
pub struct Trace {
    frequencies: Vec<f64>,
    transmission: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTrace {
    frequencies: Vec<f64>,
    transmission: Vec<f64>,
}

impl TryFrom<RawTrace> for Trace {
    type Error = AnalysisError;

    fn try_from(raw: RawTrace) -> Result<Self, Self::Error> {
        Trace::new(raw.frequencies, raw.transmission)
    }
}

impl Trace {
    pub fn new(frequencies: Vec<f64>, transmission: Vec<f64>) -> Result<Self, AnalysisError> {
        if frequencies.len() != transmission.len() {
            return Err(AnalysisError::LengthMismatch {
                frequencies: frequencies.len(),
                values: transmission.len(),
            });
        }
        if frequencies.is_empty() {
            return Err(AnalysisError::Empty);
        }
        if let Some(index) = (0..frequencies.len()).find(|&k| !frequencies[k].is_finite() || !transmission[k].is_finite()) {
            return Err(AnalysisError::NonFinite { index });
        }
        if let Some(index) = (1..frequencies.len()).find(|&k| frequencies[k] <= frequencies[k - 1]) {
            return Err(AnalysisError::NotIncreasing { index });
        }
        Ok(Self {
            frequencies,
            transmission,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn transmission(&self) -> &[f64] {
        &self.transmission
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// `frequency_hz,db`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency_hz,db\n");
        for (f, t) in self.frequencies.iter().zip(&self.transmission) {
            writeln!(out, "{f:?},{t:?}").expect("write to string");
        }
        out
    }

    /// Two numeric columns; a non-numeric first line is taken as a header.
    pub fn from_csv(text: &str) -> Result<Self, AnalysisError> {
        let mut traces = from_multi_csv(text)?;
        match traces.len() {
            1 => Ok(traces.remove(0).1),
            n => Err(AnalysisError::Parse {
                line: 1,
                message: format!("expected one data column, found {n}"),
            }),
        }
    }

    /// Adds uniform noise in `±amplitude` dB, reproducible from `seed`.
    pub fn with_noise(&self, amplitude: f64, seed: u64) -> Result<Self, AnalysisError> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(AnalysisError::InvalidParameter(format!("noise amplitude {amplitude}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noisy = self
            .transmission
            .iter()
            .map(|t| if amplitude == 0.0 { *t } else { t + rng.random_range(-amplitude..=amplitude) })
            .collect();
        Trace::new(self.frequencies.clone(), noisy)
    }
}

/// Reads a CSV whose first column is frequency. Columns named `re_X` and
/// `im_X` are combined into `|X|` in dB; every other column is taken as dB
/// already. Returns `(name, trace)` per resulting series.
pub fn from_multi_csv(text: &str) -> Result<Vec<(String, Trace)>, AnalysisError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let Some((first_no, first)) = lines.next() else {
        return Err(AnalysisError::Empty);
    };
    let split = |l: &str| l.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>();
    let first_fields = split(first);
    let has_header = first_fields.iter().any(|f| f.parse::<f64>().is_err());
    let names: Vec<String> = if has_header {
        first_fields[1..].to_vec()
    } else {
        (1..first_fields.len()).map(|k| format!("column{k}")).collect()
    };
    if names.is_empty() {
        return Err(AnalysisError::Parse {
            line: first_no + 1,
            message: "need a frequency column and at least one value column".into(),
        });
    }
    let mut freqs = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let data = (!has_header).then_some((first_no, first)).into_iter().chain(lines);
    for (no, line) in data {
        let fields = split(line);
        if fields.len() != names.len() + 1 {
            return Err(AnalysisError::Parse {
                line: no + 1,
                message: format!("expected {} fields, found {}", names.len() + 1, fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| AnalysisError::Parse {
                line: no + 1,
                message: format!("bad number `{s}`"),
            })
        };
        freqs.push(parse(&fields[0])?);
        for (col, field) in columns.iter_mut().zip(&fields[1..]) {
            col.push(parse(field)?);
        }
    }

    let mut out = Vec::new();
    let mut k = 0;
    while k < names.len() {
        let paired = names[k]
            .strip_prefix("re_")
            .filter(|stem| names.get(k + 1).map(String::as_str) == Some(&format!("im_{stem}")));
        if let Some(stem) = paired {
            let db = columns[k]
                .iter()
                .zip(&columns[k + 1])
                .map(|(&re, &im)| magnitude_db(Complex64::new(re, im)))
                .collect();
            out.push((stem.to_string(), Trace::new(freqs.clone(), db)?));
            k += 2;
        } else {
            out.push((names[k].clone(), Trace::new(freqs.clone(), columns[k].clone())?));
            k += 1;
        }
    }
    Ok(out)
}

pub(crate) fn magnitude_db(z: Complex64) -> f64 {
    20.0 * z.norm().max(1e-15).log10()
}

/// Two-port Touchstone data (`.s2p`), any of the RI, MA or DB formats.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortData {
    pub frequencies: Vec<f64>,
    /// `[S11, S21, S12, S22]` per frequency.
    pub s: Vec<[Complex64; 4]>,
    pub reference_impedance: f64,
}

impl TwoPortData {
    pub fn parse(text: &str) -> Result<Self, AnalysisError> {
        let mut scale = 1e9;
        let mut format = "MA".to_string();
        let mut z0 = 50.0;
        let mut numbers: Vec<(usize, f64)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('!').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(options) = line.strip_prefix('#') {
                let tokens: Vec<String> = options.split_whitespace().map(str::to_uppercase).collect();
                let mut t = tokens.iter();
                while let Some(tok) = t.next() {
                    match tok.as_str() {
                        "HZ" => scale = 1.0,
                        "KHZ" => scale = 1e3,
                        "MHZ" => scale = 1e6,
                        "GHZ" => scale = 1e9,
                        "S" => {}
                        "RI" | "MA" | "DB" => format = tok.clone(),
                        "R" => {
                            z0 = t.next().and_then(|v| v.parse().ok()).ok_or_else(|| AnalysisError::Parse {
                                line: no + 1,
                                message: "bad reference impedance".into(),
                            })?
                        }
                        other => {
                            return Err(AnalysisError::Parse {
                                line: no + 1,
                                message: format!("unsupported option `{other}`"),
                            })
                        }
                    }
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let v = tok.parse::<f64>().map_err(|_| AnalysisError::Parse {
                    line: no + 1,
                    message: format!("bad number `{tok}`"),
                })?;
                numbers.push((no + 1, v));
            }
        }
        if !numbers.len().is_multiple_of(9) {
            return Err(AnalysisError::Parse {
                line: numbers.last().map_or(1, |n| n.0),
                message: "two-port records need 9 numbers".into(),
            });
        }
        let mut frequencies = Vec::new();
        let mut s = Vec::new();
        for rec in numbers.chunks(9) {
            frequencies.push(rec[0].1 * scale);
            let mut row = [Complex64::default(); 4];
            for (k, z) in row.iter_mut().enumerate() {
                let (a, b) = (rec[1 + 2 * k].1, rec[2 + 2 * k].1);
                *z = match format.as_str() {
                    "RI" => Complex64::new(a, b),
                    "MA" => Complex64::from_polar(a, b.to_radians()),
                    _ => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
                };
            }
            s.push(row);
        }
        if frequencies.is_empty() {
            return Err(AnalysisError::Empty);
        }
        Ok(Self {
            frequencies,
            s,
            reference_impedance: z0,
        })
    }

    /// `|S_ab|` in dB, one-based port labels.
    pub fn trace(&self, a: usize, b: usize) -> Result<Trace, AnalysisError> {
        let k = match (a, b) {
            (1, 1) => 0,
            (2, 1) => 1,
            (1, 2) => 2,
            (2, 2) => 3,
            _ => return Err(AnalysisError::InvalidParameter(format!("S{a}{b} in a two-port file"))),
        };
        Trace::new(self.frequencies.clone(), self.s.iter().map(|r| magnitude_db(r[k])).collect())
    }
}

/// Pointwise maximum of traces sharing one frequency grid.
pub fn aggregate_max(traces: &[Trace]) -> Result<Trace, AnalysisError> {
    let (first, rest) = traces.split_first().ok_or(AnalysisError::Empty)?;
    let mut out = first.transmission.clone();
    for (k, t) in rest.iter().enumerate() {
        let same = t.len() == first.len()
            && t.frequencies
                .iter()
                .zip(&first.frequencies)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs());
        if !same {
            return Err(AnalysisError::GridMismatch { trace: k + 1 });
        }
        for (o, &v) in out.iter_mut().zip(&t.transmission) {
            *o = o.max(v);
        }
    }
    Trace::new(first.frequencies.clone(), out)
}

/// Linear interpolation of `trace` onto `grid`, which must lie inside the
/// trace's frequency range.
pub fn resample(trace: &Trace, grid: &[f64]) -> Result<Trace, AnalysisError> {
    let f = trace.frequencies();
    let (lo, hi) = (f[0], f[f.len() - 1]);
    if let Some(&x) = grid.iter().find(|&&x| !(lo..=hi).contains(&x)) {
        return Err(AnalysisError::OutOfRange { frequency: x, lo, hi });
    }
    let t = trace.transmission();
    let values = grid
        .iter()
        .map(|&x| {
            let k = f.partition_point(|&v| v <= x);
            if k == 0 {
                return t[0];
            }
            if k == f.len() {
                return t[f.len() - 1];
            }
            let u = (x - f[k - 1]) / (f[k] - f[k - 1]);
            t[k - 1] * (1.0 - u) + t[k] * u
        })
        .collect();
    Trace::new(grid.to_vec(), values)
}

/// One resonance line of a synthetic trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLine {
    pub frequency: f64,
    pub height_db: f64,
}

/// Sum of Lorentzian magnitude lines (half-width `linewidth`) over a floor,
/// converted to dB.
pub fn synthetic_trace(grid: &[f64], lines: &[SyntheticLine], linewidth: f64, floor_db: f64) -> Result<Trace, AnalysisError> {
    if !(linewidth > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!("linewidth {linewidth}")));
    }
    let floor = 10f64.powf(floor_db / 20.0);
    let g2 = linewidth * linewidth;
    let values = grid
        .iter()
        .map(|&f| {
            let mag: f64 = lines
                .iter()
                .map(|l| 10f64.powf(l.height_db / 20.0) * g2 / ((f - l.frequency).powi(2) + g2))
                .sum();
            20.0 * (mag + floor).log10()
        })
        .collect();
    Trace::new(grid.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| 6.0e9 + k as f64 * 1e5).collect()
    }

    #[test]
    fn invalid_traces_are_rejected() {
        assert!(matches!(Trace::new(vec![1.0, 1.0], vec![0.0, 0.0]), Err(AnalysisError::NotIncreasing { index: 1 })));
        assert!(matches!(Trace::new(vec![1.0], vec![f64::NAN]), Err(AnalysisError::NonFinite { index: 0 })));
        assert!(Trace::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(Trace::new(vec![], vec![]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = synthetic_trace(&grid(50), &[SyntheticLine { frequency: 6.002e9, height_db: -10.0 }], 1e5, -80.0).unwrap();
        assert_eq!(Trace::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn multi_column_csv_pairs_real_and_imaginary_parts() {
        let text = "frequency_hz,re_s21,im_s21,s31\n1.0,0.6,0.8,-3.0\n2.0,0.0,0.1,-4.0\n";
        let traces = from_multi_csv(text).unwrap();
        assert_eq!(traces.len(), 2);
        assert_eq!(traces[0].0, "s21");
        assert!(traces[0].1.transmission()[0].abs() < 1e-12);
        assert!((traces[0].1.transmission()[1] + 20.0).abs() < 1e-12);
        assert_eq!(traces[1].1.transmission(), &[-3.0, -4.0]);
    }

    #[test]
    fn touchstone_formats_agree() {
        let ma = "# GHz S MA R 50\n6.5 0.1 0 0.5 90 0.5 90 0.1 0\n";
        let ri = "# GHz S RI R 50\n6.5 0.1 0 0 0.5 0 0.5 0.1 0\n";
        let db = "! comment\n# GHz S DB R 50\n6.5 -20 0\n -6.020599913279624 90 -6.020599913279624 90 -20 0\n";
        let a = TwoPortData::parse(ma).unwrap();
        let b = TwoPortData::parse(ri).unwrap();
        let c = TwoPortData::parse(db).unwrap();
        assert_eq!(a.frequencies, vec![6.5e9]);
        for k in 0..4 {
            assert!((a.s[0][k] - b.s[0][k]).norm() < 1e-12);
            assert!((a.s[0][k] - c.s[0][k]).norm() < 1e-12);
        }
        let s21 = a.trace(2, 1).unwrap();
        assert!((s21.transmission()[0] + 6.020599913279624).abs() < 1e-12);
        assert!(TwoPortData::parse("# GHz S MA R 50\n6.5 0.1 0\n").is_err());
    }

    #[test]
    fn aggregation_rejects_other_grids() {
        let a = Trace::new(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        let b = Trace::new(vec![1.0, 3.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(aggregate_max(&[a.clone(), b]), Err(AnalysisError::GridMismatch { trace: 1 })));
        assert_eq!(aggregate_max(std::slice::from_ref(&a)).unwrap(), a);
        assert!(aggregate_max(&[]).is_err());
    }

    #[test]
    fn resampling_interpolates_linearly() {
        let t = Trace::new(vec![0.0, 1.0, 2.0], vec![0.0, 10.0, 0.0]).unwrap();
        let r = resample(&t, &[0.5, 1.0, 1.25]).unwrap();
        assert_eq!(r.transmission(), &[5.0, 10.0, 7.5]);
        assert!(resample(&t, &[2.5]).is_err());
    }

    fn trace_strategy(n: usize) -> impl Strategy<Value = Trace> {
        prop::collection::vec(-100.0f64..0.0, n).prop_map(move |v| Trace::new(grid(n), v).unwrap())
    }

    proptest! {
        #[test]
        fn aggregate_max_is_a_semilattice(a in trace_strategy(16), b in trace_strategy(16), c in trace_strategy(16)) {
            let ab = aggregate_max(&[a.clone(), b.clone()]).unwrap();
            prop_assert_eq!(&ab, &aggregate_max(&[b.clone(), a.clone()]).unwrap());
            prop_assert_eq!(aggregate_max(&[a.clone(), a.clone()]).unwrap(), a.clone());
            let left = aggregate_max(&[ab.clone(), c.clone()]).unwrap();
            let right = aggregate_max(&[a.clone(), aggregate_max(&[b.clone(), c.clone()]).unwrap()]).unwrap();
            prop_assert_eq!(&left, &right);
            for k in 0..16 {
                prop_assert!(ab.transmission()[k] >= a.transmission()[k]);
                prop_assert!(ab.transmission()[k] >= b.transmission()[k]);
            }
        }
    }
}
