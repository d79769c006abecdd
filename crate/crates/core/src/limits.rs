/// Size caps applied by the exponential enumerations in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest composed rule table, as log2 of the entry count.
    pub table_log2: u32,
    /// Largest region length accepted by graph construction.
    pub max_region: usize,
    /// Largest successor table (log2 of `2^n * 2^(2r)`).
    pub successor_log2: u32,
    /// Widest seed enumerated by trace computations, in cells.
    pub seed_width: usize,
    /// Largest context enumerated by blocking checks, in cells.
    pub context_width: usize,
    /// Largest strip width for the set-based blocking certificate.
    pub strip_width: usize,
    /// Largest exact-time synthesis horizon.
    pub horizon: usize,
    /// Default search cap for the index of primitivity.
    pub index_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            table_log2: 25,
            max_region: 16,
            successor_log2: 26,
            seed_width: 26,
            context_width: 24,
            strip_width: 20,
            horizon: 4096,
            index_cap: 4096,
        }
    }
}
