//! Stuck-at fault injection on TA action outputs.
//!
//! Every automaton's observed action passes through an AND bit and an OR bit:
//! `observed = (action AND and_bit) OR or_bit`. The fault-free mapping is
//! `and=1, or=0`; forcing `and=0` pins the output to 0 (stuck-at-0), forcing
//! `or=1` pins it to 1 (stuck-at-1). Masks sit on the read path only — the
//! underlying TA states keep evolving under feedback, so clearing a mask
//! reveals whatever the automaton has learned in the meantime.

use std::fmt;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::Randomizer;
use crate::tm::TmConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaultMask {
    pub and_bit: bool,
    pub or_bit: bool,
}

impl FaultMask {
    pub const FAULT_FREE: FaultMask = FaultMask {
        and_bit: true,
        or_bit: false,
    };

    pub fn stuck_at_0() -> FaultMask {
        FaultMask {
            and_bit: false,
            or_bit: false,
        }
    }

    pub fn stuck_at_1() -> FaultMask {
        FaultMask {
            and_bit: true,
            or_bit: true,
        }
    }

    pub fn is_fault_free(self) -> bool {
        self == FaultMask::FAULT_FREE
    }
}

/// `(action AND and_bit) OR or_bit`, composed in that order.
pub fn apply_mask(action: bool, mask: FaultMask) -> bool {
    (action && mask.and_bit) || mask.or_bit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StuckAtKind {
    StuckAt0,
    StuckAt1,
}

impl StuckAtKind {
    pub fn mask(self) -> FaultMask {
        match self {
            StuckAtKind::StuckAt0 => FaultMask::stuck_at_0(),
            StuckAtKind::StuckAt1 => FaultMask::stuck_at_1(),
        }
    }
}

impl fmt::Display for StuckAtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckAtKind::StuckAt0 => write!(f, "stuck0"),
            StuckAtKind::StuckAt1 => write!(f, "stuck1"),
        }
    }
}

impl std::str::FromStr for StuckAtKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stuck0" | "stuck-at-0" | "0" => Ok(StuckAtKind::StuckAt0),
            "stuck1" | "stuck-at-1" | "1" => Ok(StuckAtKind::StuckAt1),
            other => Err(Error::Input(format!("unknown fault kind '{other}'"))),
        }
    }
}

/// Addressable dimensions of a machine's TA array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineDims {
    pub classes: usize,
    pub clauses: usize,
    pub literals: usize,
}

impl MachineDims {
    pub fn of(config: &TmConfig) -> MachineDims {
        MachineDims {
            classes: config.num_classes_max,
            clauses: config.num_clauses_max,
            literals: config.num_literals(),
        }
    }

    pub fn total_tas(&self) -> usize {
        self.classes * self.clauses * self.literals
    }

    fn index(&self, addr: TaAddress) -> Result<usize> {
        if addr.class >= self.classes
            || addr.clause >= self.clauses
            || addr.literal >= self.literals
        {
            return Err(Error::Address(format!(
                "TA ({}, {}, {}) outside {}x{}x{}",
                addr.class, addr.clause, addr.literal, self.classes, self.clauses, self.literals
            )));
        }
        Ok((addr.class * self.clauses + addr.clause) * self.literals + addr.literal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaAddress {
    pub class: usize,
    pub clause: usize,
    pub literal: usize,
}

/// One mask per addressable TA; entries never written stay fault-free.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultPlan {
    dims: MachineDims,
    masks: Vec<FaultMask>,
    faulted: usize,
}

impl FaultPlan {
    pub fn fault_free(dims: MachineDims) -> FaultPlan {
        FaultPlan {
            dims,
            masks: vec![FaultMask::FAULT_FREE; dims.total_tas()],
            faulted: 0,
        }
    }

    pub fn dims(&self) -> MachineDims {
        self.dims
    }

    pub fn is_fault_free(&self) -> bool {
        self.faulted == 0
    }

    pub fn faulted_count(&self) -> usize {
        self.faulted
    }

    /// Writes the mask at `addr`; last write wins.
    pub fn set_fault(&mut self, addr: TaAddress, mask: FaultMask) -> Result<()> {
        let i = self.dims.index(addr)?;
        let was_faulted = !self.masks[i].is_fault_free();
        let is_faulted = !mask.is_fault_free();
        self.masks[i] = mask;
        match (was_faulted, is_faulted) {
            (false, true) => self.faulted += 1,
            (true, false) => self.faulted -= 1,
            _ => {}
        }
        Ok(())
    }

    /// Restores every mask to fault-free.
    pub fn clear_all(&mut self) {
        self.masks.fill(FaultMask::FAULT_FREE);
        self.faulted = 0;
    }

    pub fn mask_at(&self, addr: TaAddress) -> Result<FaultMask> {
        Ok(self.masks[self.dims.index(addr)?])
    }

    /// Hot-path read: the observed include bit for an action. In range by
    /// machine construction.
    #[inline]
    pub fn observe(&self, class: usize, clause: usize, literal: usize, action: bool) -> bool {
        if self.faulted == 0 {
            return action;
        }
        let i = (class * self.dims.clauses + clause) * self.dims.literals + literal;
        apply_mask(action, self.masks[i])
    }

    pub fn iter_faults(&self) -> impl Iterator<Item = (TaAddress, FaultMask)> + '_ {
        let dims = self.dims;
        self.masks
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_fault_free())
            .map(move |(i, &m)| {
                let literal = i % dims.literals;
                let rest = i / dims.literals;
                (
                    TaAddress {
                        class: rest / dims.clauses,
                        clause: rest % dims.clauses,
                        literal,
                    },
                    m,
                )
            })
    }

    /// Generates a plan with `round(fraction * total_TAs)` faulted automata
    /// spread evenly: every (class, clause) slot receives its floor or ceil
    /// share, with remainders and literal positions drawn from `seed`.
    pub fn generate_even_spread(
        fraction: f64,
        kind: StuckAtKind,
        dims: MachineDims,
        seed: u64,
    ) -> Result<FaultPlan> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::Input(format!(
                "fault fraction must be in [0, 1], got {fraction}"
            )));
        }
        let total = (fraction * dims.total_tas() as f64).round() as usize;
        let mut plan = FaultPlan::fault_free(dims);
        let slots = dims.classes * dims.clauses;
        if total == 0 || slots == 0 {
            return Ok(plan);
        }

        let mut rng = Randomizer::new(seed);
        let base = total / slots;
        let extra = total % slots;

        // Which slots carry one extra fault.
        let mut slot_order: Vec<usize> = (0..slots).collect();
        shuffle(&mut slot_order, &mut rng);

        let mut per_slot = vec![base; slots];
        for &slot in slot_order.iter().take(extra) {
            per_slot[slot] += 1;
        }

        let mask = kind.mask();
        for (slot, &count) in per_slot.iter().enumerate() {
            let mut literal_order: Vec<usize> = (0..dims.literals).collect();
            shuffle(&mut literal_order, &mut rng);
            for &literal in literal_order.iter().take(count) {
                plan.set_fault(
                    TaAddress {
                        class: slot / dims.clauses,
                        clause: slot % dims.clauses,
                        literal,
                    },
                    mask,
                )?;
            }
        }
        Ok(plan)
    }

    /// One `class,clause,literal,and_bit,or_bit` row per non-default mask,
    /// in address order.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (addr, mask) in self.iter_faults() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                addr.class, addr.clause, addr.literal, mask.and_bit as u8, mask.or_bit as u8
            ));
        }
        out
    }

    pub fn from_table(text: &str, dims: MachineDims) -> Result<FaultPlan> {
        let mut plan = FaultPlan::fault_free(dims);
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 5 comma-separated fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str, what: &str| -> Result<usize> {
                s.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid {what} '{s}'"),
                })
            };
            let addr = TaAddress {
                class: parse(fields[0], "class")?,
                clause: parse(fields[1], "clause")?,
                literal: parse(fields[2], "literal")?,
            };
            let bit = |s: &str, what: &str| -> Result<bool> {
                match s.trim() {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(Error::Parse {
                        line: line_no,
                        msg: format!("invalid {what} bit '{other}'"),
                    }),
                }
            };
            let mask = FaultMask {
                and_bit: bit(fields[3], "and")?,
                or_bit: bit(fields[4], "or")?,
            };
            plan.set_fault(addr, mask)?;
        }
        Ok(plan)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_table())?;
        Ok(())
    }

    pub fn load(path: &Path, dims: MachineDims) -> Result<FaultPlan> {
        let text = std::fs::read_to_string(path)?;
        FaultPlan::from_table(&text, dims)
    }
}

fn shuffle(values: &mut [usize], rng: &mut Randomizer) {
    for i in (1..values.len()).rev() {
        let j = rng.index(i + 1);
        values.swap(i, j);
    }
}

// Serialized as the sparse text table so plans embedded in event logs stay
// small and diffable.
#[derive(Serialize, Deserialize)]
struct FaultPlanRepr {
    dims: MachineDims,
    table: String,
}

impl Serialize for FaultPlan {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FaultPlanRepr {
            dims: self.dims,
            table: self.to_table(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FaultPlan {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FaultPlanRepr::deserialize(deserializer)?;
        FaultPlan::from_table(&repr.table, repr.dims).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIMS: MachineDims = MachineDims {
        classes: 3,
        clauses: 16,
        literals: 32,
    };

    #[test]
    fn mask_formula_all_eight_combinations() {
        for action in [false, true] {
            for and_bit in [false, true] {
                for or_bit in [false, true] {
                    let mask = FaultMask { and_bit, or_bit };
                    let expected = (action && and_bit) || or_bit;
                    assert_eq!(apply_mask(action, mask), expected);
                    // Idempotent: masking an already-masked value is a no-op.
                    assert_eq!(apply_mask(apply_mask(action, mask), mask), expected);
                }
            }
        }
    }

    #[test]
    fn fault_free_and_forced_values() {
        assert!(apply_mask(true, FaultMask::FAULT_FREE));
        assert!(!apply_mask(true, FaultMask::stuck_at_0()));
        assert!(apply_mask(false, FaultMask::stuck_at_1()));
    }

    #[test]
    fn set_then_clear_restores_fault_free() {
        let mut plan = FaultPlan::fault_free(DIMS);
        let addr = TaAddress {
            class: 1,
            clause: 2,
            literal: 3,
        };
        plan.set_fault(addr, FaultMask::stuck_at_0()).unwrap();
        assert_eq!(plan.faulted_count(), 1);
        assert!(!plan.observe(1, 2, 3, true));
        plan.clear_all();
        assert!(plan.is_fault_free());
        assert!(plan.observe(1, 2, 3, true));
        assert_eq!(plan, FaultPlan::fault_free(DIMS));
    }

    #[test]
    fn last_write_wins() {
        let mut plan = FaultPlan::fault_free(DIMS);
        let addr = TaAddress {
            class: 0,
            clause: 0,
            literal: 0,
        };
        plan.set_fault(addr, FaultMask::stuck_at_0()).unwrap();
        plan.set_fault(addr, FaultMask::stuck_at_1()).unwrap();
        assert_eq!(plan.mask_at(addr).unwrap(), FaultMask::stuck_at_1());
        assert_eq!(plan.faulted_count(), 1);
        plan.set_fault(addr, FaultMask::FAULT_FREE).unwrap();
        assert!(plan.is_fault_free());
    }

    #[test]
    fn out_of_range_address_rejected() {
        let mut plan = FaultPlan::fault_free(DIMS);
        let addr = TaAddress {
            class: 3,
            clause: 0,
            literal: 0,
        };
        assert!(plan.set_fault(addr, FaultMask::stuck_at_0()).is_err());
    }

    #[test]
    fn even_spread_matches_expected_count() {
        // 3 classes x 16 clauses x 32 TAs at 20% -> 307 faulted TAs.
        let plan = FaultPlan::generate_even_spread(0.2, StuckAtKind::StuckAt0, DIMS, 9).unwrap();
        assert_eq!(plan.faulted_count(), 307);

        let mut per_clause = vec![0usize; DIMS.classes * DIMS.clauses];
        for (addr, mask) in plan.iter_faults() {
            assert_eq!(mask, FaultMask::stuck_at_0());
            per_clause[addr.class * DIMS.clauses + addr.clause] += 1;
        }
        let min = per_clause.iter().min().unwrap();
        let max = per_clause.iter().max().unwrap();
        assert!(
            max - min <= 1,
            "per-clause counts {min}..{max} differ by >1"
        );
    }

    #[test]
    fn even_spread_edge_fractions() {
        let empty = FaultPlan::generate_even_spread(0.0, StuckAtKind::StuckAt1, DIMS, 1).unwrap();
        assert!(empty.is_fault_free());

        let full = FaultPlan::generate_even_spread(1.0, StuckAtKind::StuckAt1, DIMS, 1).unwrap();
        assert_eq!(full.faulted_count(), DIMS.total_tas());
        // Every TA forced to 1: each clause becomes the full conjunction.
        assert!(full.observe(0, 0, 0, false));
    }

    #[test]
    fn even_spread_deterministic_per_seed() {
        let a = FaultPlan::generate_even_spread(0.2, StuckAtKind::StuckAt0, DIMS, 5).unwrap();
        let b = FaultPlan::generate_even_spread(0.2, StuckAtKind::StuckAt0, DIMS, 5).unwrap();
        let c = FaultPlan::generate_even_spread(0.2, StuckAtKind::StuckAt0, DIMS, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn table_round_trip() {
        let plan = FaultPlan::generate_even_spread(0.1, StuckAtKind::StuckAt1, DIMS, 11).unwrap();
        let table = plan.to_table();
        let back = FaultPlan::from_table(&table, DIMS).unwrap();
        assert_eq!(plan, back);
    }

    #[test]
    fn table_parse_errors_carry_line_numbers() {
        let err = FaultPlan::from_table("0,0,0,1\n", DIMS).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = FaultPlan::from_table("0,0,0,1,0\n0,0,2,2,0\n", DIMS).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
