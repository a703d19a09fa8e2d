//! CSV emission, one file per table.

use super::{
    analytic_communication, analytic_computation, analytic_signaling, unknown_attack_average, CostConstants,
    OverheadError, Scenario, SchemeId,
};

#[derive(Clone, Debug, PartialEq)]
pub struct TableSpec {
    /// Device counts `1..=max_n` are tabulated.
    pub max_n: u64,
    /// Device count used for the unknown-attack sweep.
    pub sweep_n: u64,
    pub p_fail: Vec<f64>,
    pub constants: CostConstants,
    /// Per-step costs for Ours at `sweep_n`; the analytic profile is used when absent.
    pub ours_steps: Option<Vec<f64>>,
}

impl TableSpec {
    pub fn new(max_n: u64) -> Self {
        TableSpec {
            max_n,
            sweep_n: max_n,
            p_fail: default_sweep(),
            constants: CostConstants::default(),
            ours_steps: None,
        }
    }
}

pub fn default_sweep() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

pub const FILES: [&str; 7] = [
    "signaling.csv",
    "computation-normal.csv",
    "computation-optimized.csv",
    "communication.csv",
    "communication-uplink.csv",
    "communication-downlink.csv",
    "unknown-attack.csv",
];

fn number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.4}")
    }
}

fn table(key: &str, rows: impl Iterator<Item = (SchemeId, String, String)>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scheme", key, "value"]).expect("in-memory write");
    for (s, k, v) in rows {
        w.write_record([s.name(), &k, &v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}

fn per_n(max_n: u64, f: impl Fn(SchemeId, u64) -> String) -> impl Iterator<Item = (SchemeId, String, String)> {
    SchemeId::ALL
        .into_iter()
        .flat_map(move |s| (1..=max_n).map(move |n| (s, n)))
        .map(move |(s, n)| (s, n.to_string(), f(s, n)))
}

/// All tables as `(file name, contents)`, in [`FILES`] order.
pub fn render(spec: &TableSpec) -> Result<Vec<(&'static str, String)>, OverheadError> {
    spec.constants.validate()?;
    let k = spec.constants;
    let mut sweep = Vec::new();
    for s in SchemeId::ALL {
        let steps = match (&spec.ours_steps, s) {
            (Some(v), SchemeId::Ours) => v.clone(),
            _ => super::step_profile(s, spec.sweep_n),
        };
        let succ = *steps.last().ok_or(OverheadError::NoSteps)?;
        for p in &spec.p_fail {
            let v = unknown_attack_average(&steps, succ, *p)?;
            sweep.push((s, format!("{p}"), format!("{v:.4}")));
        }
    }
    Ok(vec![
        (FILES[0], table("n", per_n(spec.max_n, |s, n| number(analytic_signaling(s, n))))),
        (
            FILES[1],
            table(
                "n",
                per_n(spec.max_n, |s, n| format!("{:.4}", analytic_computation(s, n, Scenario::Normal, &k))),
            ),
        ),
        (
            FILES[2],
            table(
                "n",
                per_n(spec.max_n, |s, n| format!("{:.4}", analytic_computation(s, n, Scenario::Optimized, &k))),
            ),
        ),
        (FILES[3], table("n", per_n(spec.max_n, |s, n| number(analytic_communication(s, n).total)))),
        (FILES[4], table("n", per_n(spec.max_n, |s, n| number(analytic_communication(s, n).uplink)))),
        (FILES[5], table("n", per_n(spec.max_n, |s, n| number(analytic_communication(s, n).downlink)))),
        (FILES[6], table("p_fail", sweep.into_iter())),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_every_file() {
        let out = render(&TableSpec::new(10)).unwrap();
        assert_eq!(out.iter().map(|(f, _)| *f).collect::<Vec<_>>(), FILES.to_vec());
        let comm = &out[3].1;
        assert!(comm.lines().any(|l| l == "Ours,10,2880"));
        let opt = &out[2].1;
        assert!(opt.lines().any(|l| l == "Ours,10,0.0210"));
    }
}
