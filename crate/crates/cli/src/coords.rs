//! Coordinate flags shared by `convert` and `transition`.

use clap::{Args, ValueEnum};
use gluing_core::coords::{
    double_log_to_log, from_log, log_to_double_log, log_to_single_log, single_log_to_log, to_log, DoubleLogCoords,
    LogCoords, LogPair, NodeParams, SingleLogCoords,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{input, CliResult};
use crate::output::complex;
use gluing_core::estimates::csv::sig17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    /// `r` and `sigma`.
    Raw,
    /// `T = -log r` and `z = T + i theta`.
    Log,
    /// `t = 1/T` and `rho = e^{i theta}/T`.
    SingleLog,
    /// `s = 1/log T` and `phi = e^{i theta}/log T`.
    DoubleLog,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Raw => "raw",
            System::Log => "log",
            System::SingleLog => "single-log",
            System::DoubleLog => "double-log",
        }
    }

    /// Boundary and interior coordinate names.
    fn labels(self) -> (&'static str, &'static str) {
        match self {
            System::Raw => ("r", "sigma"),
            System::Log => ("T", "z"),
            System::SingleLog => ("t", "rho"),
            System::DoubleLog => ("s", "phi"),
        }
    }
}

/// Node values, one flag per occurrence, in boundary and interior node order.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CoordArgs {
    /// Raw boundary parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Vec<f64>,
    /// Raw interior parameter, e.g. "4.5e-05+0i".
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Vec<String>,
    /// Boundary T (may be inf).
    #[arg(long, allow_negative_numbers = true)]
    pub log_t: Vec<f64>,
    /// Interior z = T + i theta, or "inf".
    #[arg(long, allow_hyphen_values = true)]
    pub log_z: Vec<String>,
    /// Single-log boundary coordinate.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// Single-log interior coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Vec<String>,
    /// Double-log boundary coordinate.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Vec<f64>,
    /// Double-log interior coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Vec<String>,
}

pub fn parse_complex(flag: &str, text: &str) -> CliResult<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(x) = t.parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    t.parse::<Complex64>()
        .map_err(|_| input(format!("--{flag} '{text}' is not a complex number like 0.1-0.2i")))
}

fn parse_all(flag: &str, v: &[String]) -> CliResult<Vec<Complex64>> {
    v.iter().map(|s| parse_complex(flag, s)).collect()
}

fn parse_log_z(text: &str) -> CliResult<LogPair> {
    if matches!(text.trim(), "inf" | "+inf" | "infinity") {
        return Ok(LogPair {
            t: f64::INFINITY,
            theta: None,
        });
    }
    let z = parse_complex("log-z", text)?;
    Ok(LogPair {
        t: z.re,
        theta: Some(z.im),
    })
}

/// Coordinates in one of the four systems.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "system", rename_all = "kebab-case")]
pub enum Coords {
    Raw(NodeParams),
    Log(LogCoords),
    SingleLog(SingleLogCoords),
    DoubleLog(DoubleLogCoords),
}

impl CoordArgs {
    fn used(&self) -> Vec<(System, &'static str)> {
        let mut u = Vec::new();
        let mut add = |used: bool, sys, flag| {
            if used {
                u.push((sys, flag))
            }
        };
        add(!self.r.is_empty(), System::Raw, "r");
        add(!self.sigma.is_empty(), System::Raw, "sigma");
        add(!self.log_t.is_empty(), System::Log, "log-t");
        add(!self.log_z.is_empty(), System::Log, "log-z");
        add(!self.t.is_empty(), System::SingleLog, "t");
        add(!self.rho.is_empty(), System::SingleLog, "rho");
        add(!self.s.is_empty(), System::DoubleLog, "s");
        add(!self.phi.is_empty(), System::DoubleLog, "phi");
        u
    }

    pub fn is_empty(&self) -> bool {
        self.used().is_empty()
    }

    /// Reads the flags of `system`; flags of other systems are an error.
    pub fn parse(&self, system: System, cutoff: f64) -> CliResult<Coords> {
        if let Some((other, flag)) = self.used().into_iter().find(|(s, _)| *s != system) {
            return Err(input(format!(
                "--{flag} is a {} coordinate but the system is {}",
                other.name(),
                system.name()
            )));
        }
        let c = match system {
            System::Raw => Coords::Raw(NodeParams {
                boundary: self.r.clone(),
                interior: parse_all("sigma", &self.sigma)?,
                cutoff,
            }),
            System::Log => Coords::Log(LogCoords {
                boundary: self.log_t.clone(),
                interior: self.log_z.iter().map(|z| parse_log_z(z)).collect::<CliResult<_>>()?,
                cutoff,
            }),
            System::SingleLog => Coords::SingleLog(SingleLogCoords {
                boundary: self.t.clone(),
                interior: parse_all("rho", &self.rho)?,
                cutoff,
            }),
            System::DoubleLog => Coords::DoubleLog(DoubleLogCoords {
                boundary: self.s.clone(),
                interior: parse_all("phi", &self.phi)?,
                cutoff,
            }),
        };
        c.to_log()?;
        Ok(c)
    }
}

impl Coords {
    pub fn system(&self) -> System {
        match self {
            Coords::Raw(_) => System::Raw,
            Coords::Log(_) => System::Log,
            Coords::SingleLog(_) => System::SingleLog,
            Coords::DoubleLog(_) => System::DoubleLog,
        }
    }

    /// Zeros of `system`: the deepest corner.
    pub fn corner(system: System, m_d: usize, m_s: usize, cutoff: f64) -> Coords {
        let zero = Complex64::new(0.0, 0.0);
        match system {
            System::Raw => Coords::Raw(NodeParams::zeros(m_d, m_s, cutoff)),
            System::Log => Coords::Log(LogCoords {
                boundary: vec![f64::INFINITY; m_d],
                interior: vec![
                    LogPair {
                        t: f64::INFINITY,
                        theta: None
                    };
                    m_s
                ],
                cutoff,
            }),
            System::SingleLog => Coords::SingleLog(SingleLogCoords {
                boundary: vec![0.0; m_d],
                interior: vec![zero; m_s],
                cutoff,
            }),
            System::DoubleLog => Coords::DoubleLog(DoubleLogCoords {
                boundary: vec![0.0; m_d],
                interior: vec![zero; m_s],
                cutoff,
            }),
        }
    }

    pub fn counts(&self) -> (usize, usize) {
        match self {
            Coords::Raw(c) => (c.boundary.len(), c.interior.len()),
            Coords::Log(c) => (c.boundary.len(), c.interior.len()),
            Coords::SingleLog(c) => (c.boundary.len(), c.interior.len()),
            Coords::DoubleLog(c) => (c.boundary.len(), c.interior.len()),
        }
    }

    pub fn to_log(&self) -> CliResult<LogCoords> {
        Ok(match self {
            Coords::Raw(c) => to_log(c)?,
            Coords::Log(c) => {
                c.validate()?;
                c.clone()
            }
            Coords::SingleLog(c) => single_log_to_log(c)?,
            Coords::DoubleLog(c) => double_log_to_log(c)?,
        })
    }

    pub fn from_log(l: &LogCoords, system: System) -> CliResult<Coords> {
        Ok(match system {
            System::Raw => Coords::Raw(from_log(l)?),
            System::Log => Coords::Log(l.clone()),
            System::SingleLog => Coords::SingleLog(log_to_single_log(l)?),
            System::DoubleLog => Coords::DoubleLog(log_to_double_log(l)?),
        })
    }

    /// One `name[k] = value` line per coordinate.
    pub fn lines(&self) -> Vec<String> {
        let (bn, iname) = self.system().labels();
        let (b, i): (Vec<String>, Vec<String>) = match self {
            Coords::Raw(c) => (
                c.boundary.iter().map(|x| sig17(*x)).collect(),
                c.interior.iter().map(|z| complex(*z)).collect(),
            ),
            Coords::Log(c) => (
                c.boundary.iter().map(|x| sig17(*x)).collect(),
                c.interior
                    .iter()
                    .map(|p| p.z().map_or_else(|| "inf".to_string(), complex))
                    .collect(),
            ),
            Coords::SingleLog(c) => (
                c.boundary.iter().map(|x| sig17(*x)).collect(),
                c.interior.iter().map(|z| complex(*z)).collect(),
            ),
            Coords::DoubleLog(c) => (
                c.boundary.iter().map(|x| sig17(*x)).collect(),
                c.interior.iter().map(|z| complex(*z)).collect(),
            ),
        };
        let mut out: Vec<String> = b.iter().enumerate().map(|(k, v)| format!("{bn}[{k}] = {v}")).collect();
        out.extend(i.iter().enumerate().map(|(k, v)| format!("{iname}[{k}] = {v}")));
        out
    }
}
