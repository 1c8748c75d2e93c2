//! Momentum-space wave packets as an independent numerical check of the
//! symbolic engine.
//!
//! Natural units throughout: `hbar = c = 1` and the mass symbol binds to the
//! packet mass. `p` and `H = sqrt(p^2 + m^2)` act by multiplication, `x` acts
//! as `i d/dp` and `t` is a scalar parameter. Words apply right to left.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::identities::builtin_expressions;
use crate::opalg::{OpExpr, OpWord};

/// Edge amplitude above which a packet is not contained in its grid.
pub const EDGE_THRESHOLD: f64 = 1e-12;
/// Edge amplitude, relative to `max(1, sup |psi|)`, above which an
/// intermediate state is flagged. Spectral round-off grows by up to
/// `pi / dp` per derivative, so this sits well above that floor.
pub const STATE_EDGE_THRESHOLD: f64 = 1e-9;
/// Minimum distance of a Gaussian centre from either grid edge, in widths.
pub const CONTAINMENT_WIDTHS: f64 = 8.0;
/// Time step of the finite-difference slope in [`Oracle::ehrenfest_check`].
pub const EHRENFEST_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid size must be a power of two and at least 64, got {0}")]
    GridSize(usize),
    #[error("momentum half-range must be positive and finite, got {0}")]
    GridRange(f64),
    #[error("packet mass must be positive and finite, got {0}")]
    Mass(f64),
    #[error("packet width must be positive and finite, got {0}")]
    Width(f64),
    #[error("grid too small: {0}")]
    NotContained(String),
    #[error("amplitude count {got} does not match grid size {want}")]
    Length { got: usize, want: usize },
    #[error("packet is not normalized: norm = {0}")]
    Norm(f64),
    #[error("unsupported factor {0} (the oracle acts with t, x, p, H and H^-k)")]
    Factor(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumGrid {
    p_max: f64,
    n: usize,
}

impl MomentumGrid {
    pub fn new(p_max: f64, n: usize) -> Result<Self, OracleError> {
        if n < 64 || !n.is_power_of_two() {
            return Err(OracleError::GridSize(n));
        }
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(OracleError::GridRange(p_max));
        }
        Ok(Self { p_max, n })
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.p_max / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.p_max + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WavePacket {
    grid: MomentumGrid,
    amplitudes: Vec<Complex64>,
    mass: f64,
}

impl WavePacket {
    /// Wrap sampled amplitudes, checking normalization and containment.
    pub fn new(
        grid: MomentumGrid,
        amplitudes: Vec<Complex64>,
        mass: f64,
    ) -> Result<Self, OracleError> {
        if amplitudes.len() != grid.len() {
            return Err(OracleError::Length {
                got: amplitudes.len(),
                want: grid.len(),
            });
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(OracleError::Mass(mass));
        }
        let norm = squared_norm(&amplitudes, grid.spacing());
        if norm.is_nan() || (norm - 1.0).abs() > 1e-12 {
            return Err(OracleError::Norm(norm));
        }
        let edge = amplitudes[0].norm().max(amplitudes[grid.len() - 1].norm());
        if edge >= EDGE_THRESHOLD {
            return Err(OracleError::NotContained(format!(
                "edge amplitude {edge:e} is not below {EDGE_THRESHOLD:e}"
            )));
        }
        Ok(Self {
            grid,
            amplitudes,
            mass,
        })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn norm(&self) -> f64 {
        squared_norm(&self.amplitudes, self.grid.spacing())
    }
}

fn squared_norm(v: &[Complex64], dp: f64) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>() * dp
}

/// `psi(p) = (2 pi sigma^2)^(-1/4) exp(-(p - p0)^2 / (4 sigma^2))`, centred
/// at the position origin and renormalized on the grid.
pub fn gaussian_packet(
    p0: f64,
    sigma: f64,
    mass: f64,
    grid: MomentumGrid,
) -> Result<WavePacket, OracleError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(OracleError::Width(sigma));
    }
    let reach = CONTAINMENT_WIDTHS * sigma;
    if !(p0.is_finite() && p0 - reach >= -grid.p_max && p0 + reach <= grid.p_max) {
        return Err(OracleError::NotContained(format!(
            "centre {p0} must lie {CONTAINMENT_WIDTHS} widths ({reach}) inside [-{0}, {0})",
            grid.p_max
        )));
    }
    let pref = (2.0 * PI * sigma * sigma).powf(-0.25);
    let mut amps: Vec<Complex64> = grid
        .points()
        .map(|p| {
            let d = p - p0;
            Complex64::new(pref * (-d * d / (4.0 * sigma * sigma)).exp(), 0.0)
        })
        .collect();
    let scale = squared_norm(&amps, grid.spacing()).sqrt().recip();
    for a in &mut amps {
        *a *= scale;
    }
    WavePacket::new(grid, amps, mass)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Derivative {
    /// Multiplication by the conjugate wavenumber in the discrete Fourier basis.
    #[default]
    Spectral,
    /// Periodic fourth-order central differences.
    FiniteDifference4,
}

impl fmt::Display for Derivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Derivative::Spectral => "spectral",
            Derivative::FiniteDifference4 => "fd4",
        })
    }
}

/// An unnormalized state produced by applying operators to a packet.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub values: Vec<Complex64>,
    /// Cleared when some intermediate state reached the grid edges.
    pub contained: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expectation {
    pub value: Complex64,
    pub contained: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalCheck {
    /// `<t'^2 - x'^2>` by direct operator composition.
    pub lhs: Complex64,
    /// `t^2 - <x^2> + <H^-2>/4`.
    pub rhs: Complex64,
    pub residual: f64,
    pub contained: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EhrenfestReport {
    pub slope_measured: f64,
    pub slope_predicted: f64,
    /// `<i [H, x]>`.
    pub velocity_commutator: Complex64,
    /// `<p H^-1>`.
    pub velocity_direct: Complex64,
    pub contained: bool,
}

/// A packet together with a differentiation scheme.
pub struct Oracle {
    packet: WavePacket,
    scheme: Derivative,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl Oracle {
    pub fn new(packet: WavePacket, scheme: Derivative) -> Self {
        let n = packet.grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let span = n as f64 * packet.grid.spacing();
        let wavenumbers = (0..n)
            .map(|k| match k.cmp(&(n / 2)) {
                std::cmp::Ordering::Less => 2.0 * PI * k as f64 / span,
                std::cmp::Ordering::Equal => 0.0,
                std::cmp::Ordering::Greater => 2.0 * PI * (k as f64 - n as f64) / span,
            })
            .collect();
        Self {
            packet,
            scheme,
            forward,
            inverse,
            wavenumbers,
        }
    }

    pub fn packet(&self) -> &WavePacket {
        &self.packet
    }

    pub fn scheme(&self) -> Derivative {
        self.scheme
    }

    pub fn initial(&self) -> State {
        State {
            values: self.packet.amplitudes.clone(),
            contained: true,
        }
    }

    fn derivative(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = v.len();
        match self.scheme {
            Derivative::Spectral => {
                let mut buf = v.to_vec();
                self.forward.process(&mut buf);
                for (b, k) in buf.iter_mut().zip(&self.wavenumbers) {
                    *b *= Complex64::new(0.0, *k / n as f64);
                }
                self.inverse.process(&mut buf);
                buf
            }
            Derivative::FiniteDifference4 => {
                let h = self.packet.grid.spacing();
                (0..n)
                    .map(|j| {
                        let at = |o: isize| v[(j as isize + o).rem_euclid(n as isize) as usize];
                        (at(-2) - at(-1) * 8.0 + at(1) * 8.0 - at(2)) / (12.0 * h)
                    })
                    .collect()
            }
        }
    }

    fn contained(v: &[Complex64]) -> bool {
        let sup = v.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let edge = v[0].norm().max(v[v.len() - 1].norm());
        edge <= STATE_EDGE_THRESHOLD * sup.max(1.0)
    }

    /// Apply the factors of `word` right to left, with `t` bound to `t`.
    pub fn apply_word(
        &self,
        word: &OpWord,
        gens: &crate::opalg::GeneratorSet,
        state: &State,
        t: f64,
    ) -> Result<State, OracleError> {
        let m = self.packet.mass;
        let grid = &self.packet.grid;
        let mut values = state.values.clone();
        let mut contained = state.contained;
        for f in word.factors().iter().rev() {
            let name = gens.get(f.gen).name.as_str();
            match (name, f.power) {
                ("t", k) => {
                    let s = t.powi(k);
                    values.iter_mut().for_each(|v| *v *= s);
                }
                ("x", k) if k > 0 => {
                    for _ in 0..k {
                        values = self.derivative(&values);
                        values.iter_mut().for_each(|v| *v *= Complex64::i());
                        contained &= Self::contained(&values);
                    }
                }
                ("p", k) if k > 0 => {
                    for (j, v) in values.iter_mut().enumerate() {
                        *v *= grid.point(j).powi(k);
                    }
                }
                ("H", k) => {
                    for (j, v) in values.iter_mut().enumerate() {
                        let p = grid.point(j);
                        let e2 = p * p + m * m;
                        *v *= if k % 2 == 0 {
                            e2.powi(k / 2)
                        } else {
                            e2.sqrt().powi(k)
                        };
                    }
                    contained &= Self::contained(&values);
                }
                (name, k) => return Err(OracleError::Factor(format!("{name}^{k}"))),
            }
        }
        Ok(State { values, contained })
    }

    /// Apply `e` term by term, with coefficients evaluated at `hbar = c = 1`
    /// and `m` equal to the packet mass.
    pub fn apply_expr(&self, e: &OpExpr, state: &State, t: f64) -> Result<State, OracleError> {
        let mut acc = vec![Complex64::new(0.0, 0.0); state.values.len()];
        let mut contained = state.contained;
        for (word, coeff) in e.terms() {
            let (re, im) = coeff.eval(1.0, 1.0, self.packet.mass);
            let w = Complex64::new(re, im);
            let s = self.apply_word(word, e.generators(), state, t)?;
            contained &= s.contained;
            for (a, v) in acc.iter_mut().zip(&s.values) {
                *a += w * v;
            }
        }
        Ok(State {
            values: acc,
            contained,
        })
    }

    /// `<psi, phi>` on the grid.
    pub fn inner(&self, phi: &State) -> Complex64 {
        let dp = self.packet.grid.spacing();
        self.packet
            .amplitudes
            .iter()
            .zip(&phi.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * dp
    }

    pub fn expectation(&self, e: &OpExpr, t: f64) -> Result<Expectation, OracleError> {
        let s = self.apply_expr(e, &self.initial(), t)?;
        Ok(Expectation {
            value: self.inner(&s),
            contained: s.contained,
        })
    }

    /// Compare `<c^2 t'^2 - x'^2>`, built by applying the primed operators
    /// twice, with `c^2 t^2 - <x^2> + hbar^2 c^2 <H^-2> / 4`.
    pub fn check_interval_identity(&self, t: f64) -> Result<IntervalCheck, OracleError> {
        let b = builtin_expressions();
        let gens = b.xprime5.generators().clone();
        let psi = self.initial();
        let tt = self.apply_expr(&b.tprime5, &self.apply_expr(&b.tprime5, &psi, t)?, t)?;
        let xx = self.apply_expr(&b.xprime5, &self.apply_expr(&b.xprime5, &psi, t)?, t)?;
        let lhs = self.inner(&tt) - self.inner(&xx);
        let x = gens.lookup("x").expect("x");
        let h = gens.lookup("H").expect("H");
        let x2 = self.apply_word(&OpWord::single(x, 2), &gens, &psi, t)?;
        let h2 = self.apply_word(&OpWord::single(h, -2), &gens, &psi, t)?;
        let ex2 = self.inner(&x2);
        let rhs = Complex64::new(t * t, 0.0) - ex2 + self.inner(&h2) / 4.0;
        Ok(IntervalCheck {
            lhs,
            rhs,
            residual: (lhs - rhs).norm() / ex2.norm().max(1.0),
            contained: tt.contained && xx.contained && x2.contained && h2.contained,
        })
    }

    /// Slope of `<x'>(t)` against `-<p>/m`, and the velocity operator
    /// `i [H, x]` against `p H^-1`.
    pub fn ehrenfest_check(&self) -> Result<EhrenfestReport, OracleError> {
        let b = builtin_expressions();
        let gens = b.xprime5.generators().clone();
        let id = |n: &str| gens.lookup(n).expect("generator");
        let (x, p, h) = (id("x"), id("p"), id("H"));
        let psi = self.initial();

        let x0 = self.expectation(&b.xprime5, 0.0)?;
        let x1 = self.expectation(&b.xprime5, EHRENFEST_STEP)?;
        let mean_p = self.inner(&self.apply_word(&OpWord::single(p, 1), &gens, &psi, 0.0)?);

        let hx = self.apply_word(&OpWord::from_factors([(h, 1), (x, 1)]), &gens, &psi, 0.0)?;
        let xh = self.apply_word(&OpWord::from_factors([(x, 1), (h, 1)]), &gens, &psi, 0.0)?;
        let comm = self.inner(&hx) - self.inner(&xh);
        let direct = self.apply_word(&OpWord::from_factors([(p, 1), (h, -1)]), &gens, &psi, 0.0)?;

        Ok(EhrenfestReport {
            slope_measured: (x1.value.re - x0.value.re) / EHRENFEST_STEP,
            slope_predicted: -mean_p.re / self.packet.mass,
            velocity_commutator: comm * Complex64::i(),
            velocity_direct: self.inner(&direct),
            contained: x0.contained && x1.contained && hx.contained && xh.contained,
        })
    }
}

/// Interval-identity residuals for a Gaussian packet on grids of each size.
pub fn convergence_sweep(
    p0: f64,
    sigma: f64,
    mass: f64,
    p_max: f64,
    t: f64,
    sizes: &[usize],
    scheme: Derivative,
) -> Result<Vec<(usize, f64)>, OracleError> {
    sizes
        .iter()
        .map(|&n| {
            let pk = gaussian_packet(p0, sigma, mass, MomentumGrid::new(p_max, n)?)?;
            let r = Oracle::new(pk, scheme).check_interval_identity(t)?;
            Ok((n, r.residual))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::relativistic_algebra;
    use crate::exprlang::parse;

    fn packet(p0: f64, sigma: f64, n: usize) -> WavePacket {
        gaussian_packet(p0, sigma, 1.0, MomentumGrid::new(20.0, n).unwrap()).unwrap()
    }

    fn expect(o: &Oracle, text: &str) -> Complex64 {
        let e = parse(text, &relativistic_algebra()).unwrap();
        o.expectation(&e, 0.0).unwrap().value
    }

    #[test]
    fn grid_validation() {
        assert!(MomentumGrid::new(1.0, 32).is_err());
        assert!(MomentumGrid::new(1.0, 100).is_err());
        assert!(MomentumGrid::new(0.0, 64).is_err());
        let g = MomentumGrid::new(2.0, 64).unwrap();
        assert_eq!(g.spacing(), 0.0625);
        assert_eq!(g.point(0), -2.0);
    }

    #[test]
    fn containment_enforced() {
        let g = MomentumGrid::new(4.0, 256).unwrap();
        assert!(matches!(
            gaussian_packet(0.0, 1.0, 1.0, g),
            Err(OracleError::NotContained(_))
        ));
        assert!(matches!(
            gaussian_packet(3.0, 0.1, 1.0, g),
            Err(OracleError::NotContained(_))
        ));
        assert!(gaussian_packet(0.0, 0.5, 0.0, g).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let o = Oracle::new(packet(1.0, 0.5, 4096), Derivative::Spectral);
        assert!((o.packet().norm() - 1.0).abs() < 1e-12);
        assert!((expect(&o, "1") - 1.0).norm() < 1e-12);
        let mean = expect(&o, "p");
        assert!((mean - 1.0).norm() < 1e-10);
        let var = expect(&o, "p*p").re - mean.re * mean.re;
        assert!((var - 0.25).abs() < 1e-8, "{var}");
    }

    #[test]
    fn multiplicative_actions() {
        let o = Oracle::new(packet(0.5, 0.5, 256), Derivative::Spectral);
        let gens = relativistic_algebra().generators().clone();
        let p = gens.lookup("p").unwrap();
        let h = gens.lookup("H").unwrap();
        let out = o
            .apply_word(&OpWord::single(p, 1), &gens, &o.initial(), 0.0)
            .unwrap();
        for (j, (a, b)) in out.values.iter().zip(o.packet().amplitudes()).enumerate() {
            assert_eq!(*a, b * o.packet().grid().point(j));
        }
        let hh = o
            .apply_word(
                &OpWord::from_factors([(h, 1), (h, -1)]),
                &gens,
                &o.initial(),
                0.0,
            )
            .unwrap();
        assert_eq!(hh.values, o.initial().values);
        let s = o
            .apply_word(&OpWord::single(h, -1), &gens, &o.initial(), 0.0)
            .unwrap();
        let back = o.apply_word(&OpWord::single(h, 1), &gens, &s, 0.0).unwrap();
        for (a, b) in back.values.iter().zip(o.packet().amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn position_variance_of_gaussian() {
        // momentum width 1/2 is a position-space Gaussian of width 1
        for scheme in [Derivative::Spectral, Derivative::FiniteDifference4] {
            let o = Oracle::new(packet(1.0, 0.5, 4096), scheme);
            let x2 = expect(&o, "x^2");
            assert!((x2.re - 1.0).abs() < 1e-6, "{scheme}: {x2}");
            assert!(expect(&o, "x").norm() < 1e-10);
        }
    }

    #[test]
    fn energy_bounded_by_mass() {
        for (p0, sigma) in [(0.0, 0.5), (1.0, 0.5), (-2.0, 0.3), (3.0, 1.0)] {
            let o = Oracle::new(packet(p0, sigma, 1024), Derivative::Spectral);
            assert!(expect(&o, "H").re >= 1.0);
        }
    }

    #[test]
    fn symmetrized_product_is_real() {
        let o = Oracle::new(packet(1.0, 0.5, 1024), Derivative::Spectral);
        assert!(expect(&o, "sym(H,x)").im.abs() < 1e-8);
    }

    #[test]
    fn interval_identity_holds() {
        let o = Oracle::new(packet(1.0, 0.5, 4096), Derivative::Spectral);
        let r = o.check_interval_identity(0.3).unwrap();
        assert!(r.contained);
        assert!(r.residual < 1e-6, "{}", r.residual);
        let fd = Oracle::new(packet(1.0, 0.5, 4096), Derivative::FiniteDifference4);
        assert!(fd.check_interval_identity(0.3).unwrap().residual < 1e-4);
    }

    #[test]
    fn ehrenfest_symmetric_packet() {
        let o = Oracle::new(packet(0.0, 0.5, 1024), Derivative::Spectral);
        let r = o.ehrenfest_check().unwrap();
        assert!(r.slope_measured.abs() < 1e-10);
        assert!(r.slope_predicted.abs() < 1e-10);
    }

    #[test]
    fn ehrenfest_moving_packet() {
        let o = Oracle::new(packet(1.0, 0.5, 4096), Derivative::Spectral);
        let r = o.ehrenfest_check().unwrap();
        assert!((r.slope_measured - r.slope_predicted).abs() < 1e-8);
        assert!((r.velocity_commutator - r.velocity_direct).norm() < 1e-8);
    }

    #[test]
    fn non_oracle_factor_rejected() {
        let o = Oracle::new(packet(0.0, 0.5, 256), Derivative::Spectral);
        let nonrel = crate::algebras::nonrelativistic_algebra();
        let e = parse("p^-1", &nonrel).unwrap();
        assert!(matches!(
            o.expectation(&e, 0.0),
            Err(OracleError::Factor(_))
        ));
    }
}
