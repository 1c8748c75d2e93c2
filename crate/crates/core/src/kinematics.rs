//! Classical boosts, on-shell relations, the spacelike propagation window and
//! the tunneling amplitude for a massive particle in 1+1 dimensions.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("frame speed |v| = {v} is not below c = {c}")]
    SuperluminalFrame { v: f64, c: f64 },
    #[error("rest mass must be positive for a massive frame")]
    MasslessFrame,
    #[error("mass must be positive, got {0}")]
    Domain(f64),
    #[error("state violates the on-shell relations: {0}")]
    Invariant(String),
    #[error("constants must be finite and positive")]
    BadConstants,
}

/// Values of `hbar` and `c` in the chosen unit system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    hbar: f64,
    c: f64,
}

impl Constants {
    pub const SI: Constants = Constants {
        hbar: 1.054_571_817e-34,
        c: 2.997_924_58e8,
    };
    pub const NATURAL: Constants = Constants { hbar: 1.0, c: 1.0 };

    pub fn new(hbar: f64, c: f64) -> Result<Self, KinematicsError> {
        if hbar.is_finite() && c.is_finite() && hbar > 0.0 && c > 0.0 {
            Ok(Self { hbar, c })
        } else {
            Err(KinematicsError::BadConstants)
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::SI
    }
}

/// A spacetime event; `y` and `z` are suppressed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    /// `c^2 t^2 - x^2`.
    pub fn interval(&self, k: &Constants) -> f64 {
        let ct = k.c * self.t;
        ct * ct - self.x * self.x
    }
}

const ON_SHELL_RTOL: f64 = 1e-12;

/// Rest mass with energy, momentum and velocity on the mass shell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleState {
    m: f64,
    e: f64,
    p: f64,
    v: f64,
}

impl ParticleState {
    pub fn mass(&self) -> f64 {
        self.m
    }
    pub fn energy(&self) -> f64 {
        self.e
    }
    pub fn momentum(&self) -> f64 {
        self.p
    }
    pub fn velocity(&self) -> f64 {
        self.v
    }

    /// Re-check `E^2 = p^2 c^2 + m^2 c^4`, `p = E v / c^2` and `|v| < c`.
    pub fn validate(&self, k: &Constants) -> Result<(), KinematicsError> {
        let c2 = k.c * k.c;
        let (e2, rhs) = (
            self.e * self.e,
            self.p * self.p * c2 + self.m * self.m * c2 * c2,
        );
        if (e2 - rhs).abs() > ON_SHELL_RTOL * e2.max(rhs) {
            return Err(KinematicsError::Invariant(format!(
                "E^2 = {e2:e} but p^2c^2 + m^2c^4 = {rhs:e}"
            )));
        }
        if self.v.abs() >= k.c {
            return Err(KinematicsError::SuperluminalFrame { v: self.v, c: k.c });
        }
        let p_from_v = self.e * self.v / c2;
        if (p_from_v - self.p).abs() > ON_SHELL_RTOL * self.p.abs().max(self.m * k.c) {
            return Err(KinematicsError::Invariant(format!(
                "p = {:e} but Ev/c^2 = {p_from_v:e}",
                self.p
            )));
        }
        Ok(())
    }
}

/// What is known about a particle besides its rest mass. Pair variants are
/// checked against the mass shell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShellInput {
    Velocity(f64),
    Momentum(f64),
    Energy(f64),
    EnergyMomentum { e: f64, p: f64 },
    EnergyVelocity { e: f64, v: f64 },
    MomentumVelocity { p: f64, v: f64 },
}

/// Complete `(E, p, v)` on the mass shell. A negative sign of the momentum
/// given through `Energy` cannot be recovered; such states take `p >= 0`.
pub fn shell_relations(
    given: ShellInput,
    m: f64,
    k: &Constants,
) -> Result<ParticleState, KinematicsError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(KinematicsError::Domain(m));
    }
    let c = k.c;
    let c2 = c * c;
    let rest = m * c2;
    let from_velocity = |v: f64| -> Result<ParticleState, KinematicsError> {
        if v.is_nan() || v.abs() >= c {
            return Err(KinematicsError::SuperluminalFrame { v, c });
        }
        let beta = v / c;
        let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
        let e = gamma * rest;
        Ok(ParticleState {
            m,
            e,
            p: gamma * m * v,
            v,
        })
    };
    let from_momentum = |p: f64| {
        let e = (p * p * c2 + rest * rest).sqrt();
        ParticleState {
            m,
            e,
            p,
            v: p * c2 / e,
        }
    };
    let state = match given {
        ShellInput::Velocity(v) => from_velocity(v)?,
        ShellInput::Momentum(p) => from_momentum(p),
        ShellInput::Energy(e) => {
            if e.is_nan() || e < rest {
                return Err(KinematicsError::Invariant(format!(
                    "E = {e:e} is below the rest energy {rest:e}"
                )));
            }
            let p = ((e * e - rest * rest).max(0.0)).sqrt() / c;
            ParticleState {
                m,
                e,
                p,
                v: p * c2 / e,
            }
        }
        ShellInput::EnergyMomentum { e, p } => ParticleState {
            m,
            e,
            p,
            v: p * c2 / e,
        },
        ShellInput::EnergyVelocity { e, v } => ParticleState {
            m,
            e,
            p: e * v / c2,
            v,
        },
        ShellInput::MomentumVelocity { p, v } => {
            let e = (p * p * c2 + rest * rest).sqrt();
            ParticleState { m, e, p, v }
        }
    };
    state.validate(k)?;
    Ok(state)
}

/// Standard Lorentz boost into a frame moving with velocity `v` along `x`.
pub fn boost_classical(e: Event, v: f64, k: &Constants) -> Result<Event, KinematicsError> {
    let c = k.c;
    if v.is_nan() || v.abs() >= c {
        return Err(KinematicsError::SuperluminalFrame { v, c });
    }
    let beta = v / c;
    let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
    Ok(Event {
        t: gamma * (e.t - v * e.x / (c * c)),
        x: gamma * (e.x - v * e.t),
    })
}

/// The same boost written with the energy and momentum of the particle
/// carrying the primed frame: `t' = (E t - p x) / m c^2`,
/// `x' = (E x - c^2 p t) / m c^2`.
pub fn boost_energy_form(
    e: Event,
    s: &ParticleState,
    k: &Constants,
) -> Result<Event, KinematicsError> {
    if s.m == 0.0 {
        return Err(KinematicsError::MasslessFrame);
    }
    s.validate(k)?;
    let c2 = k.c * k.c;
    let mc2 = s.m * c2;
    Ok(Event {
        t: (s.e * e.t - s.p * e.x) / mc2,
        x: (s.e * e.x - c2 * s.p * e.t) / mc2,
    })
}

/// Reduced Compton wavelength `hbar / (m c)`.
pub fn compton_wavelength(m: f64, k: &Constants) -> Result<f64, KinematicsError> {
    if m.is_nan() || m <= 0.0 {
        return Err(KinematicsError::Domain(m));
    }
    Ok(k.hbar / (m * k.c))
}

/// Half-width `hbar / (2 m c)` of the allowed spacelike interval.
pub fn spacelike_window(m: f64, k: &Constants) -> Result<f64, KinematicsError> {
    Ok(compton_wavelength(m, k)? / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Timelike,
    Lightlike,
    SpacelikeAllowed,
    SpacelikeSuppressed,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Timelike => "timelike",
            Classification::Lightlike => "lightlike",
            Classification::SpacelikeAllowed => "spacelike-allowed",
            Classification::SpacelikeSuppressed => "spacelike-suppressed",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Propagation outcome for an event reached from the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TunnelOutcome {
    pub classification: Classification,
    /// `c^2 t^2 - x^2`.
    pub interval: f64,
    /// Spacelike distance `sqrt(x^2 - c^2 t^2)`; zero on the light cone.
    pub s: Option<f64>,
    pub amplitude: Option<f64>,
    pub probability: Option<f64>,
}

/// Amplitude `exp(-s / lambda)` and probability `amplitude^2`, both
/// normalized to one on the light cone. Timelike events get no amplitude.
/// Spacelike events are allowed while `interval >= -(lambda/2)^2`.
pub fn tunnel_probability(
    e: Event,
    m: f64,
    k: &Constants,
) -> Result<TunnelOutcome, KinematicsError> {
    let lambda = compton_wavelength(m, k)?;
    Ok(classify_with_wavelength(e, lambda, k))
}

pub(crate) fn classify_with_wavelength(e: Event, lambda: f64, k: &Constants) -> TunnelOutcome {
    let interval = e.interval(k);
    if interval > 0.0 {
        return TunnelOutcome {
            classification: Classification::Timelike,
            interval,
            s: None,
            amplitude: None,
            probability: None,
        };
    }
    let s = if interval == 0.0 {
        0.0
    } else {
        (-interval).sqrt()
    };
    let amplitude = (-s / lambda).exp();
    let half = lambda / 2.0;
    let classification = if interval == 0.0 {
        Classification::Lightlike
    } else if interval >= -(half * half) {
        Classification::SpacelikeAllowed
    } else {
        Classification::SpacelikeSuppressed
    };
    TunnelOutcome {
        classification,
        interval,
        s: Some(s),
        amplitude: Some(amplitude),
        probability: Some(amplitude * amplitude),
    }
}
