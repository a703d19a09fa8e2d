//! Closed-form overhead models: signaling messages, computation time from
//! primitive-operation counts, communication bits, and the average cost under
//! unknown attacks.

mod schemes;
pub mod tables;

pub use schemes::{scheme, ComputationRow, SchemeId, SchemeModel};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OverheadError {
    #[error("cost constants must be positive and finite")]
    InvalidConstants,
    #[error("p_fail must lie in [0, 1), got {0}")]
    PFailOutOfRange(f64),
    #[error("step cost vector is empty")]
    NoSteps,
}

/// Per-operation cost in ms: pairing, modular exponentiation, EC scalar
/// multiplication, RSA verification, hash.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveCosts {
    pub t_p: f64,
    pub t_e: f64,
    pub t_m: f64,
    pub t_r: f64,
    pub t_h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostConstants {
    pub md: PrimitiveCosts,
    /// Base station; the twin is costed with these constants too.
    pub bs: PrimitiveCosts,
}

impl Default for CostConstants {
    fn default() -> Self {
        CostConstants {
            md: PrimitiveCosts {
                t_p: 2.87,
                t_e: 0.225,
                t_m: 0.203,
                t_r: 0.127,
                t_h: 0.0013,
            },
            bs: PrimitiveCosts {
                t_p: 0.762,
                t_e: 0.034,
                t_m: 0.03,
                t_r: 0.019,
                t_h: 0.0008,
            },
        }
    }
}

impl CostConstants {
    pub fn validate(&self) -> Result<(), OverheadError> {
        let all = [self.md, self.bs]
            .into_iter()
            .flat_map(|c| [c.t_p, c.t_e, c.t_m, c.t_r, c.t_h]);
        for v in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(OverheadError::InvalidConstants);
            }
        }
        Ok(())
    }
}

/// `per_n·n + constant`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub per_n: f64,
    pub constant: f64,
}

impl Linear {
    pub fn eval(&self, n: f64) -> f64 {
        self.per_n * n + self.constant
    }
}

/// Counts of each primitive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpVec {
    pub p: f64,
    pub e: f64,
    pub m: f64,
    pub r: f64,
    pub h: f64,
}

impl OpVec {
    pub const ZERO: OpVec = OpVec {
        p: 0.0,
        e: 0.0,
        m: 0.0,
        r: 0.0,
        h: 0.0,
    };

    pub fn cost(&self, c: &PrimitiveCosts) -> f64 {
        self.p * c.t_p + self.e * c.t_e + self.m * c.t_m + self.r * c.t_r + self.h * c.t_h
    }
}

/// Symbolic op count `per_n·n + constant`, as in a table cell like `(5n+3)T_m + 11nT_h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpExpr {
    pub per_n: OpVec,
    pub constant: OpVec,
}

impl OpExpr {
    pub fn at(&self, n: f64) -> OpVec {
        let (a, b) = (self.per_n, self.constant);
        OpVec {
            p: a.p * n + b.p,
            e: a.e * n + b.e,
            m: a.m * n + b.m,
            r: a.r * n + b.r,
            h: a.h * n + b.h,
        }
    }

    pub fn cost(&self, n: f64, c: &PrimitiveCosts) -> f64 {
        self.at(n).cost(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Every computation of the handover.
    Normal,
    /// Only what happens after the MD enters the target cell.
    Optimized,
}

impl SchemeModel {
    pub fn computation(&self, scenario: Scenario) -> &ComputationRow {
        match scenario {
            Scenario::Normal => &self.normal,
            Scenario::Optimized => &self.optimized,
        }
    }

    /// Messages in one MD's authentication exchange, used as `N` in the unknown-attack model.
    pub fn messages_per_device(&self) -> usize {
        if self.id == SchemeId::Ours {
            OURS_HANDOVER_MESSAGES
        } else if self.signaling.per_n > 0.0 {
            self.signaling.per_n as usize
        } else {
            self.signaling.constant as usize
        }
    }
}

/// Computation time in ms: MD-side counts at MD constants plus base-station
/// side counts at base-station constants.
pub fn analytic_computation(id: SchemeId, n: u64, scenario: Scenario, k: &CostConstants) -> f64 {
    let row = *scheme(id).computation(scenario);
    let n = n as f64;
    row.md.cost(n, &k.md) + row.bs.cost(n, &k.bs)
}

/// Signaling messages between MDs and the base station, in units of `a`.
pub fn analytic_signaling(id: SchemeId, n: u64) -> f64 {
    scheme(id).signaling.eval(n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Communication {
    pub uplink: f64,
    pub downlink: f64,
    pub total: f64,
}

pub fn analytic_communication(id: SchemeId, n: u64) -> Communication {
    let s = scheme(id);
    let n = n as f64;
    Communication {
        uplink: s.uplink.eval(n),
        downlink: s.downlink.eval(n),
        total: s.total.eval(n),
    }
}

pub const GROUP_ELEMENT_BITS: u64 = 256;
pub const DIGEST_BITS: u64 = 128;
pub const TIMESTAMP_BITS: u64 = 32;
/// `(C_g2, ID_g2, h6, TS3)` sent by the twin to the MD.
pub const NOTIFICATION_BITS: u64 = GROUP_ELEMENT_BITS + 2 * DIGEST_BITS + TIMESTAMP_BITS;
/// `(TID_i, MAC4, TS4)` sent by the MD to the target gNB.
pub const ACK_BITS: u64 = 2 * DIGEST_BITS + TIMESTAMP_BITS;
/// Request, response, notification, ack.
pub const OURS_HANDOVER_MESSAGES: usize = 4;

/// `Com_1..Com_N`: cost accrued when an unknown attack hits message `i`.
///
/// For Ours these are the wireless bits of the four handover messages (the
/// first two travel over wired links). Other schemes are modeled as
/// accruing their total evenly over their `N` messages.
pub fn step_profile(id: SchemeId, n: u64) -> Vec<f64> {
    let n_f = n as f64;
    if id == SchemeId::Ours {
        let per = [0, 0, NOTIFICATION_BITS, ACK_BITS];
        let mut acc = 0.0;
        return per
            .iter()
            .map(|b| {
                acc += *b as f64 * n_f;
                acc
            })
            .collect();
    }
    let s = scheme(id);
    let big_n = s.messages_per_device().max(1);
    let total = analytic_communication(id, n).total;
    (1..=big_n).map(|i| total * i as f64 / big_n as f64).collect()
}

/// `Com_avg = (Com_fail·p + Com_succ·(1 − p)) / (1 − p)` with `Com_fail = ΣCom_i / N`.
pub fn unknown_attack_average(steps: &[f64], com_succ: f64, p_fail: f64) -> Result<f64, OverheadError> {
    if !(0.0..1.0).contains(&p_fail) {
        return Err(OverheadError::PFailOutOfRange(p_fail));
    }
    if steps.is_empty() {
        return Err(OverheadError::NoSteps);
    }
    let com_fail = steps.iter().sum::<f64>() / steps.len() as f64;
    let p_succ = 1.0 - p_fail;
    Ok((com_fail * p_fail + com_succ * p_succ) / p_succ)
}

/// Unknown-attack average for a scheme at `n` devices, using its own step profile.
pub fn scheme_unknown_attack(id: SchemeId, n: u64, p_fail: f64) -> Result<f64, OverheadError> {
    let steps = step_profile(id, n);
    let succ = *steps.last().ok_or(OverheadError::NoSteps)?;
    unknown_attack_average(&steps, succ, p_fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ours_computation_matches_formula() {
        let k = CostConstants::default();
        let v = analytic_computation(SchemeId::Ours, 1, Scenario::Normal, &k);
        assert!((v - (0.203 + 7.0 * 0.0013 + 8.0 * 0.03 + 11.0 * 0.0008)).abs() < 1e-12);
        let o = analytic_computation(SchemeId::Ours, 1, Scenario::Optimized, &k);
        assert!((o - 0.0021).abs() < 1e-12);
    }

    #[test]
    fn zero_devices_leave_constant_term() {
        let k = CostConstants::default();
        for id in SchemeId::ALL {
            let s = scheme(id);
            let c = s.normal.md.constant.cost(&k.md) + s.normal.bs.constant.cost(&k.bs);
            assert!((analytic_computation(id, 0, Scenario::Normal, &k) - c).abs() < 1e-12);
            assert_eq!(analytic_signaling(id, 0), s.signaling.constant);
        }
    }

    #[test]
    fn message_sizes() {
        assert_eq!(NOTIFICATION_BITS, 544);
        assert_eq!(ACK_BITS, 288);
    }

    #[test]
    fn p_fail_one_is_rejected() {
        assert_eq!(
            unknown_attack_average(&[1.0], 1.0, 1.0),
            Err(OverheadError::PFailOutOfRange(1.0))
        );
        assert!(unknown_attack_average(&[], 1.0, 0.5).is_err());
    }

    #[test]
    fn single_step_collapses() {
        let v = unknown_attack_average(&[10.0], 10.0, 0.5).unwrap();
        assert!((v - 20.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_constants() {
        let mut k = CostConstants::default();
        k.bs.t_h = 0.0;
        assert_eq!(k.validate(), Err(OverheadError::InvalidConstants));
        assert!(CostConstants::default().validate().is_ok());
    }
}
