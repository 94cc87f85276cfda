//! Versioned text snapshot of a trained machine: the full config echo plus
//! every TA state, so a run can be resumed or inspected bit-exactly.

use std::path::Path;

use super::clause::{ClauseTeam, Polarity};
use super::machine::TsetlinMachine;
use super::TmConfig;
use crate::error::{Error, Result};

const MAGIC: &str = "otm-snapshot v1";

pub fn to_snapshot(machine: &TsetlinMachine) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&serde_json::to_string(machine.config()).expect("config serializes"));
    out.push('\n');
    for class in 0..machine.config().num_classes_max {
        for (j, team) in machine.bank(class).iter().enumerate() {
            let states: Vec<String> = team.ta_states().iter().map(|s| s.to_string()).collect();
            out.push_str(&format!("c{class}.{j} {}\n", states.join(" ")));
        }
    }
    out
}

pub fn from_snapshot(text: &str) -> Result<TsetlinMachine> {
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty snapshot".into(),
    })?;
    if magic.trim() != MAGIC {
        return Err(Error::Parse {
            line: 1,
            msg: format!("bad magic '{magic}', expected '{MAGIC}'"),
        });
    }
    let (_, config_line) = lines.next().ok_or(Error::Parse {
        line: 2,
        msg: "missing config line".into(),
    })?;
    let config: TmConfig = serde_json::from_str(config_line).map_err(|e| Error::Parse {
        line: 2,
        msg: format!("config: {e}"),
    })?;

    let mut banks: Vec<Vec<ClauseTeam>> = (0..config.num_classes_max)
        .map(|_| Vec::with_capacity(config.num_clauses_max))
        .collect();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (addr, states) = line.split_once(' ').ok_or(Error::Parse {
            line: line_no,
            msg: "expected 'c<class>.<clause> <states...>'".into(),
        })?;
        let addr = addr.strip_prefix('c').ok_or(Error::Parse {
            line: line_no,
            msg: format!("bad clause address '{addr}'"),
        })?;
        let (class, clause) = addr.split_once('.').ok_or(Error::Parse {
            line: line_no,
            msg: format!("bad clause address 'c{addr}'"),
        })?;
        let class: usize = class.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad class index '{class}'"),
        })?;
        let clause: usize = clause.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad clause index '{clause}'"),
        })?;
        if class >= config.num_classes_max || clause != banks[class].len() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("clause c{class}.{clause} out of order or out of range"),
            });
        }
        let mut team = ClauseTeam::new(
            config.num_literals(),
            config.ta_half_states,
            Polarity::from_index(clause),
        );
        let parsed: Vec<u32> = states
            .split_whitespace()
            .map(|s| {
                s.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad TA state '{s}'"),
                })
            })
            .collect::<Result<_>>()?;
        if parsed.len() != config.num_literals() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!(
                    "expected {} TA states, got {}",
                    config.num_literals(),
                    parsed.len()
                ),
            });
        }
        team.ta_states_mut().copy_from_slice(&parsed);
        banks[class].push(team);
    }
    TsetlinMachine::from_parts(config, banks)
}

pub fn save(machine: &TsetlinMachine, path: &Path) -> Result<()> {
    std::fs::write(path, to_snapshot(machine))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TsetlinMachine> {
    from_snapshot(&std::fs::read_to_string(path)?)
}
