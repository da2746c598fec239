//! Certification of S-arithmeticity, and hence non-freeness, of the parabolic
//! Moebius groups `G(a/b) = <A(a/b), B(a/b)>` inside `SL(2, Z[1/b])`.

pub mod arith;
pub mod certify;
pub mod congruence;
pub mod coset;
pub mod exact;
pub mod modular;
pub mod presentation;
pub mod relator;
