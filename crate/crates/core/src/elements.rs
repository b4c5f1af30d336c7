//! Periodic table symbols and atomic-number lookup.

/// IUPAC element symbols indexed by atomic number minus one.
pub const SYMBOLS: [&str; 118] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar", "K", "Ca",
    "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",
    "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce",
    "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir",
    "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc",
    "Lv", "Ts", "Og",
];

/// Symbol for an atomic number in `1..=118`.
pub fn symbol_for(atomic_number: u32) -> Option<&'static str> {
    match atomic_number {
        1..=118 => Some(SYMBOLS[atomic_number as usize - 1]),
        _ => None,
    }
}

/// Atomic number of a canonical symbol.
pub fn atomic_number(symbol: &str) -> Option<u32> {
    SYMBOLS.iter().position(|s| *s == symbol).map(|i| i as u32 + 1)
}

/// Canonical capitalization of a user-typed symbol ("fe" -> "Fe"), if it is a
/// real element.
pub fn canonical_symbol(raw: &str) -> Option<&'static str> {
    let raw = raw.trim();
    let mut chars = raw.chars();
    let first = chars.next()?;
    let candidate: String = first.to_uppercase().chain(chars.flat_map(char::to_lowercase)).collect();
    SYMBOLS.iter().copied().find(|s| *s == candidate)
}
