const SYMBOLS: [&str; 36] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr",
];

/// Nuclear charge for an element symbol (case-insensitive).
pub fn atomic_number(symbol: &str) -> Option<u32> {
    SYMBOLS
        .iter()
        .position(|s| s.eq_ignore_ascii_case(symbol))
        .map(|i| i as u32 + 1)
}

/// Canonical capitalization of an element symbol.
pub fn symbol(z: u32) -> Option<&'static str> {
    SYMBOLS.get((z as usize).checked_sub(1)?).copied()
}

/// Bondi van der Waals radius in ångström.
pub fn bondi_radius(z: u32) -> Option<f64> {
    let r = match z {
        1 => 1.20,
        2 => 1.40,
        3 => 1.82,
        6 => 1.70,
        7 => 1.55,
        8 => 1.52,
        9 => 1.47,
        10 => 1.54,
        11 => 2.27,
        12 => 1.73,
        14 => 2.10,
        15 => 1.80,
        16 => 1.80,
        17 => 1.75,
        18 => 1.88,
        35 => 1.85,
        36 => 2.02,
        _ => return None,
    };
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_table() {
        assert_eq!(atomic_number("O"), Some(8));
        assert_eq!(atomic_number("he"), Some(2));
        assert_eq!(atomic_number("Xx"), None);
        assert_eq!(symbol(6), Some("C"));
        assert_eq!(symbol(0), None);
    }
}
