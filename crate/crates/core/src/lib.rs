//! Exact verification of the operator identities behind the quantum Lorentz
//! transformation, plus the evanescent-mode numerics built on them.
//!
//! * [`opalg`]: exact scalars and the noncommutative rewrite engine.
//! * [`algebras`]: the relativistic and nonrelativistic operator algebras.
//! * [`exprlang`]: text syntax, parser and canonical printer.
//! * [`identities`]: the named identity registry and verification driver.
//! * [`kinematics`], [`waveguide`]: floating-point boosts, windows and
//!   tunneling probabilities.
//! * [`packet_oracle`]: an independent momentum-space wave-packet check.

pub mod algebras;
pub mod exprlang;
pub mod identities;
pub mod kinematics;
pub mod opalg;
pub mod packet_oracle;
pub mod waveguide;
