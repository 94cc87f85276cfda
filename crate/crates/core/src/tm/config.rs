//! Machine configuration: dimensions fixed at construction (the software
//! analog of synthesis-time parameters) and the runtime-adjustable knobs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which classes currently take part in voting and training. Banks for masked
/// classes still exist (over-provisioned storage) but are never consulted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMask(Vec<bool>);

impl ClassMask {
    pub fn all(num_classes: usize) -> Self {
        ClassMask(vec![true; num_classes])
    }

    /// Mask with only the listed classes enabled.
    pub fn only(classes: &[usize], num_classes: usize) -> Result<Self> {
        let mut bits = vec![false; num_classes];
        for &c in classes {
            if c >= num_classes {
                return Err(Error::Config(format!(
                    "class {c} out of range (num_classes_max = {num_classes})"
                )));
            }
            bits[c] = true;
        }
        let mask = ClassMask(bits);
        mask.require_non_empty()?;
        Ok(mask)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_active(&self, class: usize) -> bool {
        self.0.get(class).copied().unwrap_or(false)
    }

    pub fn set(&mut self, class: usize, active: bool) -> Result<()> {
        if class >= self.0.len() {
            return Err(Error::Config(format!(
                "class {class} out of range (num_classes_max = {})",
                self.0.len()
            )));
        }
        self.0[class] = active;
        Ok(())
    }

    pub fn active_classes(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(c, _)| c)
    }

    pub fn active_count(&self) -> usize {
        self.0.iter().filter(|&&on| on).count()
    }

    pub fn require_non_empty(&self) -> Result<()> {
        if self.active_count() == 0 {
            return Err(Error::Config("class mask has no active class".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmConfig {
    pub num_classes_max: usize,
    pub num_clauses_max: usize,
    pub num_clauses_active: usize,
    pub num_features: usize,
    /// `N`: automata have `2N` states, the action flips at the midpoint.
    pub ta_half_states: u32,
    pub s_offline: f64,
    pub s_online: f64,
    /// `T`: vote clamp and feedback budget target.
    pub threshold: u32,
    pub class_active_mask: ClassMask,
    pub rng_seed: u64,
}

impl TmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_clauses_max == 0 || !self.num_clauses_max.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "num_clauses_max must be even and positive, got {}",
                self.num_clauses_max
            )));
        }
        validate_active_clauses(self.num_clauses_active, self.num_clauses_max)?;
        if self.num_features == 0 {
            return Err(Error::Config("num_features must be positive".into()));
        }
        if self.num_classes_max == 0 {
            return Err(Error::Config("num_classes_max must be positive".into()));
        }
        if self.ta_half_states < 1 {
            return Err(Error::Config("ta_half_states must be >= 1".into()));
        }
        if self.s_offline < 1.0 || self.s_online < 1.0 {
            return Err(Error::Config(format!(
                "s must be >= 1 for both phases, got offline {} / online {}",
                self.s_offline, self.s_online
            )));
        }
        if self.threshold < 1 {
            return Err(Error::Config("threshold T must be >= 1".into()));
        }
        if self.class_active_mask.len() != self.num_classes_max {
            return Err(Error::Config(format!(
                "class mask length {} does not match num_classes_max {}",
                self.class_active_mask.len(),
                self.num_classes_max
            )));
        }
        self.class_active_mask.require_non_empty()?;
        Ok(())
    }

    pub fn num_literals(&self) -> usize {
        2 * self.num_features
    }
}

pub(crate) fn validate_active_clauses(active: usize, max: usize) -> Result<()> {
    if active == 0 || !active.is_multiple_of(2) || active > max {
        return Err(Error::Config(format!(
            "active clause count must be even and in (0, {max}], got {active}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> TmConfig {
        TmConfig {
            num_classes_max: 3,
            num_clauses_max: 16,
            num_clauses_active: 16,
            num_features: 16,
            ta_half_states: 128,
            s_offline: 1.375,
            s_online: 1.0,
            threshold: 15,
            class_active_mask: ClassMask::all(3),
            rng_seed: 42,
        }
    }

    #[test]
    fn valid_config_passes() {
        base().validate().unwrap();
    }

    #[test]
    fn odd_clause_count_rejected() {
        let mut cfg = base();
        cfg.num_clauses_active = 15;
        assert!(cfg.validate().is_err());
        cfg.num_clauses_active = 18;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn empty_mask_rejected() {
        let mut cfg = base();
        cfg.class_active_mask = ClassMask(vec![false; 3]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn s_below_one_rejected() {
        let mut cfg = base();
        cfg.s_online = 0.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn mask_only_selects() {
        let mask = ClassMask::only(&[2], 3).unwrap();
        assert!(!mask.is_active(0));
        assert!(mask.is_active(2));
        assert_eq!(mask.active_classes().collect::<Vec<_>>(), vec![2]);
        assert!(ClassMask::only(&[], 3).is_err());
        assert!(ClassMask::only(&[3], 3).is_err());
    }
}
