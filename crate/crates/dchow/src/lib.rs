//! Differential Chow forms of prime differential ideals, computed exactly.
//!
//! Given a characteristic set `A` of a prime differential ideal in the
//! differential polynomial ring ℚ{y1, …, yn}, this crate searches for the
//! ideal's *differential Chow form*: the unique (up to a rational scalar)
//! irreducible polynomial in the coefficients of `d + 1` generic
//! differential hyperplanes whose saturation ideal cuts out exactly the
//! intersection behavior of the ideal, where `d = n − |A|` is the ideal's
//! differential dimension.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals,
//! reduction is Ritt–Kolchin pseudo-division with certificates, and the
//! linear solving is fraction-free elimination over the integers.
//!
//! The crate is organized bottom-up:
//!
//! * [`dpoly`] — sparse differential polynomials and the formal derivation,
//! * [`ranking`] — rankings and the leader/initial/separant anatomy,
//! * [`reduction`] — pseudo-remainders, prolongation, differential remainder,
//! * [`bounds`] — Jacobi order bounds and the two degree bounds,
//! * [`linalg`] — exact assembly and nullspace of the ansatz linear system,
//! * [`chow`] — the three search algorithms and the verification ladder,
//! * [`frontend`] — text grammar, serialization, and the `dchow` CLI.

pub mod dpoly;
pub mod ranking;
pub mod reduction;
pub mod bounds;
pub mod linalg;
pub mod chow;
pub mod frontend;
pub mod guide;
