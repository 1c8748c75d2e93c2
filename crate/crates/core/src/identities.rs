//! Named operator identities and the verification driver.
//!
//! Each identity is checked by normalizing `lhs - rhs`; it passes exactly
//! when the residual is the empty expression. Identity names are the stable
//! external handles used by the CLI.

use std::fmt;

use thiserror::Error;

use crate::algebras::{nonrelativistic_algebra, relativistic_algebra, AlgebraKind};
use crate::exprlang::{parse, render};
use crate::opalg::{reduce, AlgebraSpec, NormalizeError, OpExpr, Scalar, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("unknown identity {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

/// The symmetrized transformation operators and the time-of-arrival pieces.
#[derive(Clone, Debug)]
pub struct Builtins {
    /// Fully symmetrized primed position, before using `[H, t] = [p, t] = 0`.
    pub xprime3: OpExpr,
    pub tprime3: OpExpr,
    /// Primed position after pulling the central `t` out.
    pub xprime5: OpExpr,
    pub tprime5: OpExpr,
    /// `m (p^-1 x + x p^-1) / 2` in the nonrelativistic algebra.
    pub tnon: OpExpr,
    /// Inverse free Hamiltonian `2 m p^-2` in the nonrelativistic algebra.
    pub hnon_inv: OpExpr,
}

const XPRIME3: &str = "((H*x + x*H) - c^2*(p*t + t*p)) / (2*m*c^2)";
const TPRIME3: &str = "((H*t + t*H) - (p*x + x*p)) / (2*m*c^2)";
const XPRIME5: &str = "(H*x + x*H)/(2*m*c^2) - t*p/m";
const TPRIME5: &str = "t*H/(m*c^2) - (p*x + x*p)/(2*m*c^2)";
const TNON: &str = "m*(p^-1*x + x*p^-1)/2";
const HNON_INV: &str = "2*m*p^-2";

fn p(text: &str, spec: &AlgebraSpec) -> OpExpr {
    parse(text, spec).unwrap_or_else(|e| panic!("builtin {text:?}: {e}"))
}

pub fn builtin_expressions() -> Builtins {
    let rel = relativistic_algebra();
    let nonrel = nonrelativistic_algebra();
    Builtins {
        xprime3: p(XPRIME3, &rel),
        tprime3: p(TPRIME3, &rel),
        xprime5: p(XPRIME5, &rel),
        tprime5: p(TPRIME5, &rel),
        tnon: p(TNON, &nonrel),
        hnon_inv: p(HNON_INV, &nonrel),
    }
}

#[derive(Clone, Debug)]
pub struct Identity {
    pub name: &'static str,
    pub algebra: AlgebraKind,
    pub lhs: OpExpr,
    pub rhs: OpExpr,
    pub description: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub name: String,
    pub algebra: AlgebraKind,
    pub status: Status,
    pub residual: String,
    pub steps: usize,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<8} algebra={:<6} steps={:<5} residual={}",
            self.status, self.name, self.algebra, self.steps, self.residual
        )
    }
}

/// Normalize `lhs - rhs` and report.
pub fn verify_pair(
    name: &str,
    algebra: AlgebraKind,
    lhs: &OpExpr,
    rhs: &OpExpr,
    spec: &AlgebraSpec,
) -> Result<VerificationReport, NormalizeError> {
    let diff = lhs.try_sub(rhs)?;
    let red = reduce(&diff, spec, Strategy::Leftmost)?;
    Ok(VerificationReport {
        name: name.to_string(),
        algebra,
        status: if red.expr.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        residual: render(&red.expr),
        steps: red.steps,
    })
}

/// The identity registry, in its fixed registration order.
pub struct Registry {
    rel: AlgebraSpec,
    nonrel: AlgebraSpec,
    identities: Vec<Identity>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::new()
    }
}

impl Registry {
    pub fn new() -> Self {
        let rel = relativistic_algebra();
        let nonrel = nonrelativistic_algebra();
        let b = builtin_expressions();
        let mut ids = Vec::new();
        let mut add = |name, algebra, lhs: OpExpr, rhs: OpExpr, description| {
            ids.push(Identity {
                name,
                algebra,
                lhs,
                rhs,
                description,
            })
        };
        let rel_kind = AlgebraKind::Relativistic;
        let r = |t: &str| p(t, &rel);

        add(
            "eq4",
            rel_kind,
            r("comm(H,t)"),
            r("0"),
            "H commutes with the time parameter",
        );
        add(
            "eq6",
            rel_kind,
            r("comm(H^2,x)"),
            r("2*H*comm(H,x)"),
            "[H^2, x] = 2 H [H, x] under constant velocity",
        );
        add(
            "eq7",
            rel_kind,
            r("comm(H^2,x)"),
            r("-2*i*hbar*p*c^2"),
            "[H^2, x] from the mass shell",
        );
        add(
            "eq8",
            rel_kind,
            r("comm(H,x)"),
            r("-i*hbar*H^-1*p*c^2"),
            "[H, x] = -i hbar H^-1 p c^2",
        );
        add(
            "velocity",
            rel_kind,
            r("(i/hbar)*comm(H,x)"),
            r("c^2*p*H^-1"),
            "Heisenberg velocity dx/dt = H^-1 p c^2",
        );

        let interval = |xp: &OpExpr, tp: &OpExpr| {
            &(tp * tp).scale(&Scalar::c().pow(2).expect("c invertible")) - &(xp * xp)
        };
        add(
            "eq9",
            rel_kind,
            interval(&b.xprime5, &b.tprime5),
            r("c^2*t^2 - x^2 + hbar^2*c^2*H^-2/4"),
            "primed interval equals the lab interval plus hbar^2 c^2 H^-2 / 4",
        );
        add(
            "a2",
            rel_kind,
            r(
                "(-t*H*(p*x + x*p) - (p*x + x*p)*t*H + (H*x + x*H)*t*p + t*p*(H*x + x*H)) \
               / (2*m^2*c^2)",
            ),
            r("0"),
            "cross terms of the squared interval cancel",
        );
        add(
            "a5",
            rel_kind,
            r("(2*x*p - i*hbar)*(2*x*p - i*hbar)"),
            r("4*x^2*p^2 - 8*i*hbar*x*p - hbar^2"),
            "square of the symmetrized x p",
        );
        add(
            "a6",
            rel_kind,
            r("(2*x*H - i*hbar*H^-1*p*c^2)*(2*x*H - i*hbar*H^-1*p*c^2)"),
            r("4*x^2*H^2 - 8*i*hbar*x*p*c^2 - 2*hbar^2*c^2 + hbar^2*H^-2*p^2*c^4"),
            "square of the symmetrized x H",
        );
        add(
            "a7",
            rel_kind,
            r("(2*x*p - i*hbar)*(2*x*p - i*hbar)/(4*m^2*c^2) \
               - (2*x*H - i*hbar*H^-1*p*c^2)*(2*x*H - i*hbar*H^-1*p*c^2)/(4*m^2*c^4)"),
            r("-x^2 + hbar^2*c^2*H^-2/4"),
            "difference of the two squares",
        );
        add(
            "b2",
            rel_kind,
            r("((H*x + x*H)*H - H*(H*x + x*H)) + c^2*(p*(p*x + x*p) - (p*x + x*p)*p)"),
            r("0"),
            "t-proportional part of the primed commutator vanishes",
        );
        add(
            "b3",
            rel_kind,
            r("(p*x + x*p)*(H*x + x*H) - (H*x + x*H)*(p*x + x*p)"),
            r("-2*m^2*c^4*i*hbar*(x*H^-1 + H^-1*x)"),
            "commutator of the two symmetrized products",
        );
        add(
            "eq18",
            rel_kind,
            &(&b.xprime5 * &b.tprime5) - &(&b.tprime5 * &b.xprime5),
            r("-i*hbar*(H^-1*x + x*H^-1)/2"),
            "primed coordinates do not commute",
        );

        let nr_x = nonrel.var("x", 1);
        let nr_rhs = {
            let sym = &(&b.hnon_inv * &nr_x) + &(&nr_x * &b.hnon_inv);
            sym.scale(&(&(&Scalar::i() * &Scalar::hbar()) * &Scalar::ratio(-1, 4)))
        };
        add(
            "eq19",
            AlgebraKind::Nonrelativistic,
            &(&nr_x * &b.tnon) - &(&b.tnon * &nr_x),
            nr_rhs,
            "position and free time-of-arrival do not commute",
        );

        Self {
            rel,
            nonrel,
            identities: ids,
        }
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.identities.iter().map(|i| i.name)
    }

    pub fn get(&self, name: &str) -> Option<&Identity> {
        self.identities.iter().find(|i| i.name == name)
    }

    pub fn spec(&self, kind: AlgebraKind) -> &AlgebraSpec {
        match kind {
            AlgebraKind::Relativistic => &self.rel,
            AlgebraKind::Nonrelativistic => &self.nonrel,
        }
    }

    pub fn verify(&self, id: &Identity) -> Result<VerificationReport, NormalizeError> {
        verify_pair(id.name, id.algebra, &id.lhs, &id.rhs, self.spec(id.algebra))
    }

    pub fn verify_identity(&self, name: &str) -> Result<VerificationReport, IdentityError> {
        let id = self
            .get(name)
            .ok_or_else(|| IdentityError::Unknown(name.to_string()))?;
        Ok(self.verify(id)?)
    }

    /// Every identity, optionally restricted to one algebra, in registration
    /// order.
    pub fn verify_all(
        &self,
        filter: Option<AlgebraKind>,
    ) -> Result<Vec<VerificationReport>, IdentityError> {
        self.identities
            .iter()
            .filter(|id| filter.is_none_or(|k| id.algebra == k))
            .map(|id| self.verify(id).map_err(IdentityError::from))
            .collect()
    }
}

pub fn verify_identity(name: &str) -> Result<VerificationReport, IdentityError> {
    Registry::new().verify_identity(name)
}

pub fn verify_all() -> Result<Vec<VerificationReport>, IdentityError> {
    Registry::new().verify_all(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{adjoint, equals, normalize, BracketKind};

    #[test]
    fn registry_has_fourteen_entries_in_order() {
        let reg = Registry::new();
        let names: Vec<_> = reg.names().collect();
        assert_eq!(
            names,
            [
                "eq4", "eq6", "eq7", "eq8", "velocity", "eq9", "a2", "a5", "a6", "a7", "b2", "b3",
                "eq18", "eq19"
            ]
        );
    }

    #[test]
    fn every_identity_passes() {
        for report in verify_all().unwrap() {
            assert_eq!(report.status, Status::Pass, "{report}");
            assert_eq!(report.residual, "0");
        }
    }

    #[test]
    fn unknown_name() {
        assert_eq!(
            verify_identity("eq99").unwrap_err(),
            IdentityError::Unknown("eq99".into())
        );
    }

    #[test]
    fn nonrel_filter_selects_eq19() {
        let reg = Registry::new();
        let reports = reg.verify_all(Some(AlgebraKind::Nonrelativistic)).unwrap();
        let names: Vec<_> = reports.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["eq19"]);
    }

    #[test]
    fn mutated_interval_correction_fails_with_quarter_residual() {
        let reg = Registry::new();
        let eq9 = reg.get("eq9").unwrap();
        let rel = reg.spec(AlgebraKind::Relativistic);
        let bad_rhs = parse("c^2*t^2 - x^2 + hbar^2*c^2*H^-2/2", rel).unwrap();
        let report = verify_pair("eq9-mut", eq9.algebra, &eq9.lhs, &bad_rhs, rel).unwrap();
        assert_eq!(report.status, Status::Fail);
        assert_eq!(report.residual, "-1/4*hbar^2*c^2*H^-2");
    }

    #[test]
    fn two_forms_of_the_transformation_agree() {
        let b = builtin_expressions();
        let rel = relativistic_algebra();
        assert!(equals(&b.xprime3, &b.xprime5, &rel).unwrap());
        assert!(equals(&b.tprime3, &b.tprime5, &rel).unwrap());
    }

    #[test]
    fn eq9_also_holds_for_unsimplified_forms() {
        let b = builtin_expressions();
        let rel = relativistic_algebra();
        let c2 = Scalar::c().pow(2).unwrap();
        let lhs3 = &(&b.tprime3 * &b.tprime3).scale(&c2) - &(&b.xprime3 * &b.xprime3);
        let rhs = parse("c^2*t^2 - x^2 + hbar^2*c^2*H^-2/4", &rel).unwrap();
        assert!(equals(&lhs3, &rhs, &rel).unwrap());
    }

    #[test]
    fn xprime5_matches_symmetrized_form() {
        let b = builtin_expressions();
        let rel = relativistic_algebra();
        let formal = parse("sym(H,x)/(m*c^2) - t*p/m", &rel).unwrap();
        assert!(equals(&b.xprime5, &formal, &rel).unwrap());
    }

    #[test]
    fn tnon_is_m_times_sym() {
        let b = builtin_expressions();
        let nonrel = nonrelativistic_algebra();
        let formal = parse("m*sym(p^-1, x)", &nonrel).unwrap();
        assert!(equals(&b.tnon, &formal, &nonrel).unwrap());
    }

    #[test]
    fn transformation_operators_are_self_adjoint() {
        let b = builtin_expressions();
        let rel = relativistic_algebra();
        let nonrel = nonrelativistic_algebra();
        for e in [&b.xprime5, &b.tprime5, &b.xprime3, &b.tprime3] {
            assert_eq!(adjoint(e, &rel).unwrap(), normalize(e, &rel).unwrap());
        }
        assert_eq!(
            adjoint(&b.tnon, &nonrel).unwrap(),
            normalize(&b.tnon, &nonrel).unwrap()
        );
    }

    #[test]
    fn eq18_is_the_commutator_of_builtins() {
        let b = builtin_expressions();
        let rel = relativistic_algebra();
        let c = crate::opalg::brackets(&b.xprime5, &b.tprime5, BracketKind::Comm, &rel).unwrap();
        assert_eq!(render(&c), "1/2*hbar^2*c^2*p*H^-3 - i*hbar*x*H^-1");
    }

    #[test]
    fn reports_are_deterministic() {
        assert_eq!(verify_all().unwrap(), verify_all().unwrap());
    }
}
