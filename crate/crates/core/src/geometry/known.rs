//! Best known container-to-circle radius ratios for small equal-circle packings.
//!
//! Values for n ≤ 13 and n = 19 are proven optimal; the remaining entries are the
//! long-standing best known packings. They are only ever used as lower bounds on
//! the achievable ratio.

const BEST_KNOWN: [f64; 20] = [
    1.0,
    2.0,
    2.154_700_538, // 1 + 2/√3
    2.414_213_562, // 1 + √2
    2.701_301_617,
    3.0,
    3.0,
    3.304_764_871, // 1 + 1/sin(π/7)
    3.613_125_930,
    3.813_026_151,
    3.923_804_400, // 1 + 1/sin(π/9)
    4.029_170_000,
    4.236_067_977, // 2 + √5
    4.328_427_125,
    4.521_356_000,
    4.615_425_000,
    4.792_033_000,
    4.863_703_305, // 1 + √2 + √6
    4.863_703_305,
    5.122_030_000,
];

/// Largest `n` covered by the table.
pub const MAX_TABULATED: usize = BEST_KNOWN.len();

/// Best known minimal ratio `R/r` for `n` unit circles, when tabulated.
pub fn best_known_ratio(n: usize) -> Option<f64> {
    if n == 0 {
        return None;
    }
    BEST_KNOWN.get(n - 1).copied()
}
