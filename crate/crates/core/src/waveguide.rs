//! Guided photons in a hollow waveguide behave like massive particles with
//! rest mass `hbar omega_c / c^2`. Below cutoff the mode is evanescent.

use std::io;

use thiserror::Error;

use crate::kinematics::{tunnel_probability, Constants, Event, KinematicsError, TunnelOutcome};

#[derive(Debug, Error)]
pub enum WaveguideError {
    #[error("cutoff frequency must be positive and finite, got {0}")]
    Cutoff(f64),
    #[error("guide width must be positive and finite, got {0}")]
    Width(f64),
    #[error("{name} must be non-negative and finite, got {value}")]
    Input { name: &'static str, value: f64 },
    #[error("scan step must be positive and finite, got {0}")]
    Step(f64),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveguideParams {
    omega_c: f64,
    width: Option<f64>,
}

impl WaveguideParams {
    pub fn from_cutoff(omega_c: f64) -> Result<Self, WaveguideError> {
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(WaveguideError::Cutoff(omega_c));
        }
        Ok(Self {
            omega_c,
            width: None,
        })
    }

    /// Rectangular guide of broad-wall width `a`, lowest mode: `omega_c = pi c / a`.
    pub fn from_width(a: f64, k: &Constants) -> Result<Self, WaveguideError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(WaveguideError::Width(a));
        }
        Ok(Self {
            omega_c: std::f64::consts::PI * k.c() / a,
            width: Some(a),
        })
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn width(&self) -> Option<f64> {
        self.width
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveQuantities {
    pub m_eff: f64,
    pub lambda_c: f64,
}

pub fn effective_quantities(w: &WaveguideParams, k: &Constants) -> EffectiveQuantities {
    EffectiveQuantities {
        m_eff: effective_mass(w, k),
        lambda_c: k.c() / w.omega_c,
    }
}

fn effective_mass(w: &WaveguideParams, k: &Constants) -> f64 {
    k.hbar() * w.omega_c / (k.c() * k.c())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DispersionInput {
    Omega(f64),
    AxialWavenumber(f64),
}

/// A guided mode. Propagating modes carry `k_x` and a group velocity;
/// evanescent ones carry the decay constant `kappa` instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuidedPhotonState {
    pub omega: f64,
    pub k_x: Option<f64>,
    pub kappa: Option<f64>,
    pub group_velocity: Option<f64>,
}

impl GuidedPhotonState {
    pub fn is_evanescent(&self) -> bool {
        self.kappa.is_some()
    }
}

/// Complete `(omega, k_x)` from `omega^2 = k_x^2 c^2 + omega_c^2`.
pub fn dispersion(
    input: DispersionInput,
    w: &WaveguideParams,
    k: &Constants,
) -> Result<GuidedPhotonState, WaveguideError> {
    let (c, wc) = (k.c(), w.omega_c);
    match input {
        DispersionInput::Omega(omega) => {
            if !(omega >= 0.0 && omega.is_finite()) {
                return Err(WaveguideError::Input {
                    name: "omega",
                    value: omega,
                });
            }
            let r = wc / omega;
            if omega >= wc {
                let root = (1.0 - r * r).max(0.0).sqrt();
                Ok(GuidedPhotonState {
                    omega,
                    k_x: Some(omega * root / c),
                    kappa: None,
                    group_velocity: Some(c * root),
                })
            } else {
                let q = omega / wc;
                Ok(GuidedPhotonState {
                    omega,
                    k_x: None,
                    kappa: Some(wc * (1.0 - q * q).sqrt() / c),
                    group_velocity: None,
                })
            }
        }
        DispersionInput::AxialWavenumber(k_x) => {
            if !(k_x >= 0.0 && k_x.is_finite()) {
                return Err(WaveguideError::Input {
                    name: "k_x",
                    value: k_x,
                });
            }
            let omega = (k_x * c).hypot(wc);
            Ok(GuidedPhotonState {
                omega,
                k_x: Some(k_x),
                kappa: None,
                group_velocity: Some(c * c * k_x / omega),
            })
        }
    }
}

/// Tunneling outcome for a guided photon; the particle formula evaluated at
/// the effective mass.
pub fn guided_tunnel_probability(
    e: Event,
    w: &WaveguideParams,
    k: &Constants,
) -> Result<TunnelOutcome, WaveguideError> {
    Ok(tunnel_probability(e, effective_mass(w, k), k)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRange {
    pub x0: f64,
    pub x1: f64,
    pub step: f64,
}

impl ScanRange {
    pub fn new(x0: f64, x1: f64, step: f64) -> Result<Self, WaveguideError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(WaveguideError::Step(step));
        }
        Ok(Self { x0, x1, step })
    }

    /// Points `x0 + i*step` up to `x1`, inclusive within a small tolerance
    /// so that `0:1:0.1` yields eleven points.
    pub fn points(&self) -> Vec<f64> {
        if self.x1.is_nan() || self.x0.is_nan() || self.x1 < self.x0 {
            return Vec::new();
        }
        let span = (self.x1 - self.x0) / self.step;
        let count = (span + 1e-9 * span.max(1.0)).floor() as usize + 1;
        (0..count).map(|i| self.x0 + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub x: f64,
    pub outcome: TunnelOutcome,
}

pub fn scan(
    w: &WaveguideParams,
    k: &Constants,
    t: f64,
    range: &ScanRange,
) -> Result<Vec<ScanRow>, WaveguideError> {
    range
        .points()
        .into_iter()
        .map(|x| {
            Ok(ScanRow {
                x,
                outcome: guided_tunnel_probability(Event::new(t, x), w, k)?,
            })
        })
        .collect()
}

pub const CSV_HEADER: [&str; 5] = ["x", "interval", "s", "classification", "probability"];

/// Shortest text that parses back to `v`: positional notation for
/// magnitudes in `[1e-4, 1e16)`, exponent notation otherwise.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// Write rows as CSV. Floats use the shortest representation that parses
/// back to the same value.
pub fn write_csv<W: io::Write>(rows: &[ScanRow], out: W) -> Result<(), WaveguideError> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(CSV_HEADER)?;
    for r in rows {
        wr.write_record([
            format_float(r.x),
            format_float(r.outcome.interval),
            opt(r.outcome.s),
            r.outcome.classification.to_string(),
            opt(r.outcome.probability),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
