//! The two concrete operator algebras.
//!
//! `rel`: generators `t < x < p < H`, `H` invertible. `t` is a central
//! parameter, `[x, p] = i hbar`, `[H, x] = -i hbar c^2 p H^-1`, `H` commutes
//! with `p`, and the mass shell `H^2 = p^2 c^2 + m^2 c^4` is used to eliminate
//! `p^2`. The `H^-1 x` rule follows from `[H^-1, x] = -H^-1 [H, x] H^-1`.
//!
//! `nonrel`: generators `x < p`, `p` invertible, with `[x, p] = i hbar` and
//! `[x, p^-1] = -i hbar p^-2`. The free Hamiltonian `p^2 / 2m` is built by
//! callers, there is no mass-shell rule.

use std::fmt;
use std::str::FromStr;

use crate::opalg::{AlgebraSpec, Generator, OpExpr, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraKind {
    Relativistic,
    Nonrelativistic,
}

impl AlgebraKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::Relativistic => "rel",
            AlgebraKind::Nonrelativistic => "nonrel",
        }
    }

    pub fn spec(self) -> AlgebraSpec {
        match self {
            AlgebraKind::Relativistic => relativistic_algebra(),
            AlgebraKind::Nonrelativistic => nonrelativistic_algebra(),
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for AlgebraKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rel" => Ok(AlgebraKind::Relativistic),
            "nonrel" => Ok(AlgebraKind::Nonrelativistic),
            other => Err(format!(
                "unknown algebra {other:?} (expected rel or nonrel)"
            )),
        }
    }
}

fn i_hbar() -> Scalar {
    &Scalar::i() * &Scalar::hbar()
}

fn c_pow(n: i32) -> Scalar {
    Scalar::c().pow(n).expect("c is invertible")
}

pub fn relativistic_algebra() -> AlgebraSpec {
    let b = AlgebraSpec::builder(
        "rel",
        vec![
            Generator::new("t", false, true),
            Generator::new("x", false, true),
            Generator::new("p", false, true),
            Generator::new("H", true, true),
        ],
    );
    let gens = b.generators().clone();
    let (x, p) = (b.var("x", 1), b.var("p", 1));
    let (h, h_inv, h_inv3) = (b.var("H", 1), b.var("H", -1), b.var("H", -3));
    let ihc2 = &i_hbar() * &c_pow(2);

    // p x -> x p - i hbar
    let px = &(&x * &p) - &OpExpr::scalar(&gens, i_hbar());
    // H x -> x H - i hbar c^2 p H^-1
    let hx = &(&x * &h) - &(&p * &h_inv).scale(&ihc2);
    // H^-1 x -> x H^-1 + i hbar c^2 p H^-3
    let hinv_x = &(&x * &h_inv) + &(&p * &h_inv3).scale(&ihc2);
    // p^2 -> c^-2 H^2 - m^2 c^2
    let m2c2 = &Scalar::m().pow(2).expect("power") * &c_pow(2);
    let p2 = &b.var("H", 2).scale(&c_pow(-2)) - &OpExpr::scalar(&gens, m2c2);

    b.commute("x", "t")
        .commute("p", "t")
        .commute("H", "t")
        .swap(("p", 1), ("x", 1), px)
        .swap(("H", 1), ("x", 1), hx)
        .swap(("H", -1), ("x", 1), hinv_x)
        .commute("H", "p")
        .power("p", 2, p2)
        .build()
        .expect("relativistic algebra is well formed")
}

pub fn nonrelativistic_algebra() -> AlgebraSpec {
    let b = AlgebraSpec::builder(
        "nonrel",
        vec![
            Generator::new("x", false, true),
            Generator::new("p", true, true),
        ],
    );
    let gens = b.generators().clone();
    let x = b.var("x", 1);
    let px = &(&x * &b.var("p", 1)) - &OpExpr::scalar(&gens, i_hbar());
    let pinv_x = &(&x * &b.var("p", -1)) + &b.var("p", -2).scale(&i_hbar());
    b.swap(("p", 1), ("x", 1), px)
        .swap(("p", -1), ("x", 1), pinv_x)
        .build()
        .expect("nonrelativistic algebra is well formed")
}

pub fn algebra_by_name(name: &str) -> Result<AlgebraSpec, String> {
    name.parse::<AlgebraKind>().map(AlgebraKind::spec)
}
