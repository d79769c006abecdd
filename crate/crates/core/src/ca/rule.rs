use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::word::{mask, RegionWord};
use crate::error::{input, resource, Result};
use crate::limits::Limits;

/// Radius-`r` Boolean local rule, stored as a packed lookup table over
/// neighborhoods of `2r + 1` cells (leftmost cell most significant).
#[derive(Clone, PartialEq, Eq)]
pub struct Rule {
    radius: usize,
    table: Vec<u64>,
    name: String,
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule")
            .field("name", &self.name)
            .field("radius", &self.radius)
            .finish()
    }
}

fn packed_len(entries: usize) -> usize {
    entries.div_ceil(64)
}

impl Rule {
    /// Parses `wolfram:<0..255>` or `table:r=<r>:<bits>`.
    ///
    /// Table bits are listed in Wolfram order: the first character is the
    /// output for the all-ones neighborhood and the last for all zeros, so
    /// `table:r=1:01011010` is the same rule as `wolfram:90`.
    pub fn parse(spec: &str) -> Result<Rule> {
        let spec = spec.trim();
        if let Some(code) = spec.strip_prefix("wolfram:") {
            let code: u16 = code
                .parse()
                .map_err(|_| crate::Error::Input(format!("bad Wolfram code in \"{spec}\"")))?;
            if code > 255 {
                return input(format!("Wolfram code {code} out of range 0..=255"));
            }
            return Ok(Rule::wolfram(code as u8));
        }
        if let Some(rest) = spec.strip_prefix("table:r=") {
            let (r, bits) = rest
                .split_once(':')
                .ok_or_else(|| crate::Error::Input(format!("missing table bits in \"{spec}\"")))?;
            let radius: usize = r
                .parse()
                .map_err(|_| crate::Error::Input(format!("bad radius in \"{spec}\"")))?;
            if radius == 0 || radius > 12 {
                return input(format!("radius {radius} outside supported range 1..=12"));
            }
            let entries = 1usize << (2 * radius + 1);
            if bits.len() != entries {
                return input(format!(
                    "radius {radius} needs {entries} table bits, got {}",
                    bits.len()
                ));
            }
            let mut table = vec![0u64; packed_len(entries)];
            for (pos, c) in bits.chars().enumerate() {
                let idx = entries - 1 - pos;
                match c {
                    '0' => {}
                    '1' => table[idx / 64] |= 1 << (idx % 64),
                    other => return input(format!("'{other}' is not a table bit")),
                }
            }
            return Ok(Rule {
                radius,
                table,
                name: spec.to_string(),
            });
        }
        input(format!(
            "rule spec \"{spec}\" must be wolfram:<code> or table:r=<r>:<bits>"
        ))
    }

    /// Elementary (radius 1) rule with the given Wolfram code.
    pub fn wolfram(code: u8) -> Rule {
        Rule {
            radius: 1,
            table: vec![u64::from(code)],
            name: format!("wolfram:{code}"),
        }
    }

    /// Builds a rule from an explicit output function over neighborhood codes.
    pub fn from_fn(radius: usize, name: impl Into<String>, f: impl Fn(u64) -> u8) -> Result<Rule> {
        if radius == 0 || radius > 12 {
            return input(format!("radius {radius} outside supported range 1..=12"));
        }
        let entries = 1usize << (2 * radius + 1);
        let mut table = vec![0u64; packed_len(entries)];
        for idx in 0..entries {
            if f(idx as u64) & 1 == 1 {
                table[idx / 64] |= 1 << (idx % 64);
            }
        }
        Ok(Rule {
            radius,
            table,
            name: name.into(),
        })
    }

    fn identity() -> Rule {
        Rule {
            radius: 0,
            table: vec![0b10],
            name: "identity".into(),
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Neighborhood width `2r + 1`.
    pub fn width(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn entries(&self) -> usize {
        1 << self.width()
    }

    /// Table lookup on a neighborhood code; `code < 2^(2r+1)`.
    #[inline]
    pub fn lookup(&self, code: u64) -> u8 {
        ((self.table[(code / 64) as usize] >> (code % 64)) & 1) as u8
    }

    pub fn apply_local(&self, neighborhood: &RegionWord) -> Result<u8> {
        if neighborhood.len() != self.width() {
            return input(format!(
                "neighborhood of length {} given to a rule of width {}",
                neighborhood.len(),
                self.width()
            ));
        }
        Ok(self.lookup(neighborhood.bits()))
    }

    /// One free step on a packed row of `width` cells; returns the
    /// `width - 2r` cells that have a full neighborhood.
    #[inline]
    pub(crate) fn step_bits(&self, bits: u64, width: usize) -> u64 {
        let span = self.width();
        debug_assert!(width >= span && width <= 64);
        let out = width + 1 - span;
        let nmask = mask(span);
        let mut result = 0u64;
        for j in 0..out {
            let code = (bits >> (out - 1 - j)) & nmask;
            result = (result << 1) | u64::from(self.lookup(code));
        }
        result
    }

    /// `steps` free steps; the row shrinks by `2r` cells per step.
    pub(crate) fn iterate_bits(&self, mut bits: u64, mut width: usize, steps: usize) -> u64 {
        for _ in 0..steps {
            bits = self.step_bits(bits, width);
            width -= 2 * self.radius;
        }
        bits
    }

    /// Table of the `t`-th iterate, radius `r * t`; `t = 0` gives the
    /// radius-0 identity.
    pub(crate) fn power(&self, t: usize, limits: &Limits) -> Result<Rule> {
        let radius = self.radius * t;
        let width = 2 * radius + 1;
        if width as u32 > limits.table_log2 {
            return resource(format!(
                "table for {}^{t} needs 2^{width} entries, cap is 2^{}",
                self.name, limits.table_log2
            ));
        }
        if t == 0 {
            return Ok(Rule::identity());
        }
        let mut current = self.clone();
        for s in 2..=t {
            let w = 2 * self.radius * s + 1;
            let entries = 1usize << w;
            let mut table = vec![0u64; packed_len(entries)];
            let prev = &current;
            table.par_iter_mut().enumerate().for_each(|(chunk, slot)| {
                let base = chunk * 64;
                let mut word = 0u64;
                for off in 0..64.min(entries - base) {
                    let u = (base + off) as u64;
                    let inner = self.step_bits(u, w);
                    word |= u64::from(prev.lookup(inner)) << off;
                }
                *slot = word;
            });
            current = Rule {
                radius: self.radius * s,
                table,
                name: String::new(),
            };
        }
        current.name = format!("{}^{t}", self.name);
        Ok(current)
    }

    /// Table of `F^t` as a single radius-`r t` block map.
    pub fn compose(&self, t: usize, limits: &Limits) -> Result<Rule> {
        if t == 0 {
            return input("composition exponent must be positive");
        }
        self.power(t, limits)
    }

    /// True when the two block maps define the same global map.
    pub fn same_global_map(&self, other: &Rule) -> bool {
        let (small, big) = if self.radius <= other.radius {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (big.radius - small.radius) as u32;
        let small_mask = mask(small.width());
        let entries = big.entries();
        (0..packed_len(entries)).into_par_iter().all(|chunk| {
            let base = chunk * 64;
            (0..64.min(entries - base)).all(|off| {
                let u = (base + off) as u64;
                big.lookup(u) == small.lookup((u >> shift) & small_mask)
            })
        })
    }

    /// Constant output value if the table is constant.
    pub fn constant_value(&self) -> Option<u8> {
        let entries = self.entries();
        let first = self.lookup(0);
        (0..entries as u64)
            .all(|u| self.lookup(u) == first)
            .then_some(first)
    }

    /// Least `(m, p)` in lexicographic order with `m <= m_max`,
    /// `1 <= p <= p_max` and `F^(m+p) = F^m`. `None` only means none was
    /// found within the bounds.
    pub fn check_eventually_periodic(
        &self,
        m_max: usize,
        p_max: usize,
        limits: &Limits,
    ) -> Result<Option<EventualPeriod>> {
        let top = m_max + p_max;
        if 2 * self.radius * top + 1 > limits.table_log2 as usize {
            return resource(format!(
                "eventual periodicity search up to F^{top} exceeds the 2^{} table cap",
                limits.table_log2
            ));
        }
        let powers = (0..=top)
            .into_par_iter()
            .map(|t| self.power(t, limits))
            .collect::<Result<Vec<_>>>()?;
        for m in 0..=m_max {
            for p in 1..=p_max {
                if powers[m].same_global_map(&powers[m + p]) {
                    return Ok(Some(EventualPeriod {
                        preperiod: m,
                        period: p,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Least `T <= t_max` with `F^T` constant. `None` does not prove
    /// non-nilpotence.
    pub fn check_nilpotent_bounded(&self, t_max: usize, limits: &Limits) -> Result<Option<Nilpotency>> {
        if 2 * self.radius * t_max + 1 > limits.table_log2 as usize {
            return resource(format!(
                "nilpotency search up to F^{t_max} exceeds the 2^{} table cap",
                limits.table_log2
            ));
        }
        for t in 1..=t_max {
            if let Some(q) = self.power(t, limits)?.constant_value() {
                return Ok(Some(Nilpotency { symbol: q, time: t }));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `F^(preperiod + period) = F^preperiod`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventualPeriod {
    pub preperiod: usize,
    pub period: usize,
}

/// `F^time` maps every configuration to the constant `symbol` configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nilpotency {
    pub symbol: u8,
    pub time: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> RegionWord {
        s.parse().unwrap()
    }

    #[test]
    fn parse_wolfram_90() {
        let r = Rule::parse("wolfram:90").unwrap();
        assert_eq!(r.radius(), 1);
        assert_eq!(r.apply_local(&w("101")).unwrap(), 0);
        assert_eq!(r.apply_local(&w("100")).unwrap(), 1);
        assert_eq!(r.apply_local(&w("001")).unwrap(), 1);
        assert_eq!(r.apply_local(&w("000")).unwrap(), 0);
    }

    #[test]
    fn wolfram_bit_expansion() {
        for code in 0..=255u8 {
            let r = Rule::wolfram(code);
            for idx in 0..8u64 {
                assert_eq!(u64::from(r.lookup(idx)), (u64::from(code) >> idx) & 1);
            }
        }
    }

    #[test]
    fn parse_identity_and_zero() {
        let id = Rule::parse("wolfram:204").unwrap();
        for u in 0..8u64 {
            assert_eq!(u64::from(id.lookup(u)), (u >> 1) & 1);
        }
        let zero = Rule::parse("table:r=1:00000000").unwrap();
        assert_eq!(zero.constant_value(), Some(0));
        assert_eq!(zero.apply_local(&w("111")).unwrap(), 0);
        assert_eq!(id.apply_local(&w("011")).unwrap(), 1);
    }

    #[test]
    fn table_spec_uses_wolfram_order() {
        let t = Rule::parse("table:r=1:01011010").unwrap();
        assert_eq!(t.table, Rule::wolfram(90).table);
        let r2 = Rule::parse(&format!("table:r=2:{}", "01".repeat(16))).unwrap();
        assert_eq!(r2.radius(), 2);
        assert_eq!(r2.lookup(0), 1);
        assert_eq!(r2.lookup(31), 0);
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "wolfram:256",
            "wolfram:-1",
            "wolfram:x",
            "table:r=1:0000000",
            "table:r=1:0000000a",
            "table:r=0:0",
            "table:1:00000000",
            "life",
        ] {
            assert!(
                matches!(Rule::parse(bad), Err(crate::Error::Input(_))),
                "{bad} should be rejected"
            );
        }
    }

    #[test]
    fn apply_local_length_mismatch() {
        assert!(Rule::wolfram(90).apply_local(&w("10")).is_err());
    }

    #[test]
    fn compose_identity_and_zero() {
        let limits = Limits::default();
        let id = Rule::wolfram(204).compose(5, &limits).unwrap();
        assert_eq!(id.radius(), 5);
        for u in 0..id.entries() as u64 {
            assert_eq!(u64::from(id.lookup(u)), (u >> 5) & 1);
        }
        let zero = Rule::wolfram(0).compose(1, &limits).unwrap();
        assert_eq!(zero.table, Rule::wolfram(0).table);
        assert!(Rule::wolfram(0).compose(0, &limits).is_err());
    }

    #[test]
    fn compose_rule_90_twice_is_outer_xor() {
        let r2 = Rule::wolfram(90).compose(2, &Limits::default()).unwrap();
        for u in 0..32u64 {
            assert_eq!(u64::from(r2.lookup(u)), ((u >> 4) ^ u) & 1, "u={u:05b}");
        }
    }

    #[test]
    fn compose_cap() {
        let limits = Limits {
            table_log2: 9,
            ..Limits::default()
        };
        assert!(Rule::wolfram(90).compose(4, &limits).is_ok());
        assert!(matches!(
            Rule::wolfram(90).compose(5, &limits),
            Err(crate::Error::Resource(_))
        ));
    }

    #[test]
    fn eventual_periodicity_examples() {
        let limits = Limits::default();
        assert_eq!(
            Rule::wolfram(204).check_eventually_periodic(3, 3, &limits).unwrap(),
            Some(EventualPeriod { preperiod: 0, period: 1 })
        );
        assert_eq!(
            Rule::wolfram(0).check_eventually_periodic(3, 3, &limits).unwrap(),
            Some(EventualPeriod { preperiod: 1, period: 1 })
        );
        assert_eq!(Rule::wolfram(90).check_eventually_periodic(3, 3, &limits).unwrap(), None);
        // complement: F^2 = id
        assert_eq!(
            Rule::wolfram(51).check_eventually_periodic(3, 3, &limits).unwrap(),
            Some(EventualPeriod { preperiod: 0, period: 2 })
        );
        assert!(Rule::wolfram(90).check_eventually_periodic(10, 10, &limits).is_err());
    }

    #[test]
    fn nilpotency_examples() {
        let limits = Limits::default();
        assert_eq!(
            Rule::wolfram(0).check_nilpotent_bounded(4, &limits).unwrap(),
            Some(Nilpotency { symbol: 0, time: 1 })
        );
        assert_eq!(Rule::wolfram(204).check_nilpotent_bounded(4, &limits).unwrap(), None);
        assert_eq!(Rule::wolfram(90).check_nilpotent_bounded(4, &limits).unwrap(), None);
        assert_eq!(
            Rule::wolfram(255).check_nilpotent_bounded(4, &limits).unwrap(),
            Some(Nilpotency { symbol: 1, time: 1 })
        );
        // 128 (AND of three) is nilpotent on the full shift only in the limit.
        assert_eq!(Rule::wolfram(128).check_nilpotent_bounded(4, &limits).unwrap(), None);
    }

    /// Naive iteration over a symbol vector, independent of the packed path.
    fn naive_iterate(rule: &Rule, mut cells: Vec<u8>, t: usize) -> Vec<u8> {
        let span = rule.width();
        for _ in 0..t {
            cells = cells
                .windows(span)
                .map(|nb| {
                    let code = nb.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
                    rule.lookup(code)
                })
                .collect();
        }
        cells
    }

    proptest! {
        #[test]
        fn composition_soundness(code in any::<u8>(), t in 1usize..=4, seed in any::<u64>()) {
            let rule = Rule::wolfram(code);
            let composed = rule.compose(t, &Limits::default()).unwrap();
            let u = seed & mask(composed.width());
            let cells = RegionWord::from_bits(composed.width(), u).unwrap().symbols();
            prop_assert_eq!(naive_iterate(&rule, cells, t), vec![composed.lookup(u)]);
        }
    }
}
