//! Exact polynomial arithmetic over Z, Q and Z/p.

pub mod factor;
pub mod field;
pub mod int_poly;
pub mod mod_poly;
pub mod modular;
pub mod multi_poly;
pub mod primes;
pub mod rat_poly;
pub mod subres;

pub use factor::{check_irreducible, factor_monic_squarefree, Irreducibility, IrreducibilityCheck};
pub use int_poly::{resultant, resultant_in_y, IntPoly};
pub use mod_poly::{decomposition_type, is_fully_split, powmod_x, roots_mod_p, DecompositionType, ModPoly};
pub use multi_poly::MultiPoly;
pub use primes::{is_probable_prime, prime_factors, PrimeRange};
pub use rat_poly::{poly_gcd_q, RatPoly};

/// Squarefree part of a non-zero integer polynomial (primitive, positive
/// leading coefficient).
pub fn squarefree_part(g: &IntPoly) -> crate::Result<IntPoly> {
    g.squarefree_part()
}
