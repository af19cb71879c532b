//! Protocol constants used by the original digit and artwork studies.

/// Row cap per label for matrix cells and power-curve draws.
pub const SAMPLE_CAP: usize = 400;
pub const TRIALS: usize = 100;
pub const SAMPLE_SIZES: [usize; 10] = [4, 5, 6, 7, 8, 9, 10, 12, 16, 24];
pub const DIGIT_PERMUTATIONS: usize = 1000;
pub const ART_PERMUTATIONS: usize = 2500;
/// Images loaded per artwork category before embedding.
pub const ART_IMAGES_PER_CATEGORY: usize = 3000;

/// Digit pairs discussed in the digit validation write-up.
pub const DIGIT_PAIRS_SHORT: [(&str, &str); 5] =
    [("0", "1"), ("1", "7"), ("2", "8"), ("3", "5"), ("4", "9")];

/// The longer digit pair list used by the accompanying study script.
pub const DIGIT_PAIRS_FULL: [(&str, &str); 9] = [
    ("0", "1"),
    ("1", "7"),
    ("2", "8"),
    ("3", "8"),
    ("5", "8"),
    ("2", "3"),
    ("4", "9"),
    ("3", "5"),
    ("6", "8"),
];

/// Named pair lists accepted wherever a pair list is configured.
pub fn pair_preset(name: &str) -> Option<Vec<(String, String)>> {
    let pairs: &[(&str, &str)] = match name {
        "digits-short" => &DIGIT_PAIRS_SHORT,
        "digits-full" => &DIGIT_PAIRS_FULL,
        _ => return None,
    };
    Some(
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    )
}
