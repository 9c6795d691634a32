//! Physical constants and unit conversions shared by every module.

/// Bohr per ångström.
pub const BOHR_PER_ANGSTROM: f64 = 1.8897259886;

/// kcal/mol per hartree. Every kcal/mol number in a report is derived with this factor.
pub const KCAL_PER_HARTREE: f64 = 627.5095;

#[inline]
pub fn hartree_to_kcal(e: f64) -> f64 {
    e * KCAL_PER_HARTREE
}
