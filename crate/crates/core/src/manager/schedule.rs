//! The execution-flow program: offline epochs, online iterations, checkpoint
//! cadence and timed runtime interventions.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::fault::FaultPlan;
use crate::tm::TmConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetId {
    Offline,
    Validation,
    Online,
}

impl SetId {
    pub fn as_str(self) -> &'static str {
        match self {
            SetId::Offline => "offline",
            SetId::Validation => "validation",
            SetId::Online => "online",
        }
    }
}

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One runtime intervention, applied atomically before the training pass of
/// the iteration it names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EventAction {
    /// Activates a class in the machine and stops filtering it from the data
    /// streams: the full introduction of a previously unseen classification.
    EnableClass(usize),
    /// Data-side only: stop filtering, without activating anything in the
    /// machine.
    DisableClassFilter,
    InjectFaultPlan(FaultPlan),
    SetActiveClauses(usize),
    SetS(f64),
    SetThreshold(u32),
    EnableOnlineLearning(bool),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Online iteration this event fires before (1-based). An event "after
    /// iteration k" in the measurement convention fires at `k + 1`: one
    /// training pass runs on the new conditions before accuracy is re-read.
    pub at_online_iteration: usize,
    pub action: EventAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckpointGranularity {
    /// One accuracy analysis per online iteration (the default).
    PerIteration,
    /// Additional analyses every `k` online train steps.
    PerDatapoints(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub offline_epochs: usize,
    /// Truncates the offline set to its first `n` datapoints when set.
    pub offline_points: Option<usize>,
    pub online_iterations: usize,
    pub checkpoint: CheckpointGranularity,
    pub sets_to_analyze: Vec<SetId>,
    /// Initial state of the online-learning enable flag.
    pub online_learning: bool,
    pub s_offline: f64,
    pub s_online: f64,
    /// Class filtered from every data stream at the start of the run.
    pub filtered_class: Option<usize>,
    /// Online buffer capacity; defaults to the full online set length.
    pub buffer_capacity: Option<usize>,
    pub events: Vec<Event>,
}

impl Schedule {
    /// Parses the declarative schedule format: `key = value` lines plus
    /// repeatable `event = <iteration> <action> [args...]` lines. `#` starts
    /// a comment. Fault-injection events need the machine config to size
    /// their plans.
    pub fn parse(text: &str, config: &TmConfig) -> Result<Schedule> {
        let mut schedule = Schedule::basic(0, 0, config.s_offline, config.s_online);
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: line_no,
                msg: "expected 'key = value'".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |msg: String| Error::Parse { line: line_no, msg };
            let parse_num = |what: &str, v: &str| -> Result<usize> {
                v.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid {what} '{v}'"),
                })
            };
            match key {
                "offline_epochs" => schedule.offline_epochs = parse_num(key, value)?,
                "offline_points" => schedule.offline_points = Some(parse_num(key, value)?),
                "online_iterations" => schedule.online_iterations = parse_num(key, value)?,
                "checkpoint_every_datapoints" => {
                    schedule.checkpoint =
                        CheckpointGranularity::PerDatapoints(parse_num(key, value)?)
                }
                "analyze" => {
                    schedule.sets_to_analyze = value
                        .split(',')
                        .map(|s| match s.trim() {
                            "offline" => Ok(SetId::Offline),
                            "validation" => Ok(SetId::Validation),
                            "online" => Ok(SetId::Online),
                            other => Err(bad(format!("unknown set '{other}'"))),
                        })
                        .collect::<Result<_>>()?
                }
                "online_learning" => {
                    schedule.online_learning = parse_on_off(value).map_err(&bad)?
                }
                "s_offline" => {
                    schedule.s_offline =
                        value.parse().map_err(|_| bad(format!("bad s '{value}'")))?
                }
                "s_online" => {
                    schedule.s_online =
                        value.parse().map_err(|_| bad(format!("bad s '{value}'")))?
                }
                "filter_class" => schedule.filtered_class = Some(parse_num(key, value)?),
                "buffer_capacity" => schedule.buffer_capacity = Some(parse_num(key, value)?),
                "event" => {
                    let mut parts = value.split_whitespace();
                    let at = parts
                        .next()
                        .ok_or_else(|| bad("event needs an iteration".into()))?;
                    let at_online_iteration = parse_num("event iteration", at)?;
                    let action =
                        parse_event_action(&parts.collect::<Vec<_>>(), config).map_err(&bad)?;
                    schedule.events.push(Event {
                        at_online_iteration,
                        action,
                    });
                }
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }
        Ok(schedule)
    }

    /// A plain run: offline training then `online_iterations` labelled online
    /// passes, analyzing all three sets every iteration.
    pub fn basic(
        offline_epochs: usize,
        online_iterations: usize,
        s_offline: f64,
        s_online: f64,
    ) -> Self {
        Schedule {
            offline_epochs,
            offline_points: None,
            online_iterations,
            checkpoint: CheckpointGranularity::PerIteration,
            sets_to_analyze: vec![SetId::Offline, SetId::Validation, SetId::Online],
            online_learning: true,
            s_offline,
            s_online,
            filtered_class: None,
            buffer_capacity: None,
            events: Vec::new(),
        }
    }

    /// Rejects events that reference invalid resources or fire outside the
    /// run, before anything executes.
    pub fn validate(&self, config: &TmConfig) -> Result<()> {
        if let CheckpointGranularity::PerDatapoints(0) = self.checkpoint {
            return Err(Error::Schedule("checkpoint interval must be >= 1".into()));
        }
        if self.sets_to_analyze.is_empty() {
            return Err(Error::Schedule("no sets selected for analysis".into()));
        }
        if self.s_offline < 1.0 || self.s_online < 1.0 {
            return Err(Error::Schedule(format!(
                "s must be >= 1, got offline {} / online {}",
                self.s_offline, self.s_online
            )));
        }
        if let Some(class) = self.filtered_class {
            if class >= config.num_classes_max {
                return Err(Error::Schedule(format!(
                    "filtered class {class} out of range"
                )));
            }
        }
        if self.buffer_capacity == Some(0) {
            return Err(Error::Schedule("buffer capacity must be >= 1".into()));
        }
        for event in &self.events {
            if event.at_online_iteration == 0 || event.at_online_iteration > self.online_iterations
            {
                return Err(Error::Schedule(format!(
                    "event at iteration {} outside run of {} iterations",
                    event.at_online_iteration, self.online_iterations
                )));
            }
            match &event.action {
                EventAction::EnableClass(c) if *c >= config.num_classes_max => {
                    return Err(Error::Schedule(format!("enable_class({c}) out of range")));
                }
                EventAction::SetActiveClauses(k)
                    if *k == 0 || *k % 2 != 0 || *k > config.num_clauses_max =>
                {
                    return Err(Error::Schedule(format!(
                        "set_active_clauses({k}) invalid for max {}",
                        config.num_clauses_max
                    )));
                }
                EventAction::InjectFaultPlan(plan)
                    if plan.dims() != crate::fault::MachineDims::of(config) =>
                {
                    return Err(Error::Schedule(
                        "fault plan dimensions do not match the machine".into(),
                    ));
                }
                EventAction::SetS(s) if *s < 1.0 => {
                    return Err(Error::Schedule(format!("set_s({s}) below 1")));
                }
                EventAction::SetThreshold(0) => {
                    return Err(Error::Schedule("set_threshold(0) invalid".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn parse_on_off(value: &str) -> std::result::Result<bool, String> {
    match value {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        other => Err(format!("expected on/off, got '{other}'")),
    }
}

fn parse_event_action(
    parts: &[&str],
    config: &TmConfig,
) -> std::result::Result<EventAction, String> {
    let arg = |i: usize| -> std::result::Result<&str, String> {
        parts
            .get(i)
            .copied()
            .ok_or_else(|| "missing event argument".to_string())
    };
    let action = match *parts.first().ok_or("event needs an action")? {
        "enable_class" => {
            EventAction::EnableClass(arg(1)?.parse().map_err(|_| "bad class id".to_string())?)
        }
        "disable_class_filter" => EventAction::DisableClassFilter,
        "inject_faults" => {
            let fraction: f64 = arg(1)?.parse().map_err(|_| "bad fraction".to_string())?;
            let kind: crate::fault::StuckAtKind = arg(2)?.parse().map_err(|e| format!("{e}"))?;
            let seed: u64 = match parts.get(3) {
                Some(s) => s.parse().map_err(|_| "bad seed".to_string())?,
                None => 0,
            };
            let plan = FaultPlan::generate_even_spread(
                fraction,
                kind,
                crate::fault::MachineDims::of(config),
                seed,
            )
            .map_err(|e| format!("{e}"))?;
            EventAction::InjectFaultPlan(plan)
        }
        "set_active_clauses" => EventAction::SetActiveClauses(
            arg(1)?
                .parse()
                .map_err(|_| "bad clause count".to_string())?,
        ),
        "set_s" => EventAction::SetS(arg(1)?.parse().map_err(|_| "bad s".to_string())?),
        "set_threshold" => {
            EventAction::SetThreshold(arg(1)?.parse().map_err(|_| "bad T".to_string())?)
        }
        "online_learning" => EventAction::EnableOnlineLearning(parse_on_off(arg(1)?)?),
        other => return Err(format!("unknown event action '{other}'")),
    };
    Ok(action)
}
