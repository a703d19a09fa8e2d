//! Published cost rows of the compared handover schemes, transcribed as printed.

use super::{Linear, OpExpr, OpVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeId {
    FiveGAka,
    Lai,
    MaI,
    MaII,
    Cao,
    Zhang,
    Yan,
    Gupta,
    He,
    Wang,
    Li,
    Ours,
}

impl SchemeId {
    pub const ALL: [SchemeId; 12] = [
        SchemeId::FiveGAka,
        SchemeId::Lai,
        SchemeId::MaI,
        SchemeId::MaII,
        SchemeId::Cao,
        SchemeId::Zhang,
        SchemeId::Yan,
        SchemeId::Gupta,
        SchemeId::He,
        SchemeId::Wang,
        SchemeId::Li,
        SchemeId::Ours,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::FiveGAka => "5G-AKA",
            SchemeId::Lai => "Lai",
            SchemeId::MaI => "Ma-I",
            SchemeId::MaII => "Ma-II",
            SchemeId::Cao => "Cao",
            SchemeId::Zhang => "Zhang",
            SchemeId::Yan => "Yan",
            SchemeId::Gupta => "Gupta",
            SchemeId::He => "He",
            SchemeId::Wang => "Wang",
            SchemeId::Li => "Li",
            SchemeId::Ours => "Ours",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        SchemeId::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }
}

/// One computation column pair: MD-side and base-station-side symbolic op counts
/// and the total printed next to them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComputationRow {
    pub md: OpExpr,
    pub bs: OpExpr,
    pub printed_total: Linear,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeModel {
    pub id: SchemeId,
    /// Signaling messages between MD and base station, in units of `a`.
    pub signaling: Linear,
    pub normal: ComputationRow,
    pub optimized: ComputationRow,
    pub uplink: Linear,
    pub downlink: Linear,
    /// Total bits as printed; not always `uplink + downlink`.
    pub total: Linear,
}

const Z: OpVec = OpVec::ZERO;

const fn ops(p: f64, e: f64, m: f64, r: f64, h: f64) -> OpVec {
    OpVec { p, e, m, r, h }
}

const fn per_n(v: OpVec) -> OpExpr {
    OpExpr { per_n: v, constant: Z }
}

const fn lin(per_n: f64, constant: f64) -> Linear {
    Linear { per_n, constant }
}

const fn row(md: OpExpr, bs: OpExpr, printed_total: Linear) -> ComputationRow {
    ComputationRow { md, bs, printed_total }
}

pub fn scheme(id: SchemeId) -> SchemeModel {
    use SchemeId::*;
    let (signaling, normal, optimized, uplink, downlink) = match id {
        FiveGAka => (
            lin(5.0, 0.0),
            row(per_n(ops(0., 0., 0., 0., 4.)), per_n(ops(0., 0., 0., 0., 2.)), lin(0.016, 0.0)),
            row(per_n(ops(0., 0., 0., 0., 4.)), per_n(ops(0., 0., 0., 0., 2.)), lin(0.016, 0.0)),
            lin(256.0, 0.0),
            lin(256.0, 0.0),
        ),
        Lai => (
            lin(0.0, 2.0),
            row(
                OpExpr {
                    per_n: ops(2., 0., 0., 1., 0.),
                    constant: ops(0., 0., 2., 0., 1.),
                },
                OpExpr {
                    per_n: ops(0., 0., 1., 0., 0.),
                    constant: ops(0., 3., 0., 0., 0.),
                },
                lin(5.897, 0.509),
            ),
            row(
                per_n(ops(2., 0., 0., 1., 0.)),
                OpExpr {
                    per_n: ops(0., 0., 1., 0., 0.),
                    constant: ops(0., 3., 0., 0., 0.),
                },
                lin(5.897, 0.102),
            ),
            lin(3328.0, 3328.0),
            lin(0.0, 6400.0),
        ),
        MaI => (
            lin(0.0, 2.0),
            row(per_n(ops(0., 0., 0., 0., 5.)), per_n(ops(0., 0., 0., 0., 1.)), lin(0.007, 0.0)),
            row(per_n(ops(0., 0., 0., 0., 5.)), per_n(ops(0., 0., 0., 0., 1.)), lin(0.007, 0.0)),
            lin(128.0, 384.0),
            lin(0.0, 384.0),
        ),
        MaII => (
            lin(0.0, 2.0),
            row(per_n(ops(0., 0., 3., 0., 4.)), per_n(ops(0., 0., 2., 0., 1.)), lin(0.675, 0.0)),
            row(per_n(ops(0., 0., 3., 0., 4.)), per_n(ops(0., 0., 2., 0., 1.)), lin(0.675, 0.0)),
            lin(384.0, 464.0),
            lin(0.0, 512.0),
        ),
        Cao => (
            lin(3.0, 0.0),
            row(per_n(ops(0., 0., 0., 0., 4.)), per_n(ops(0., 0., 0., 0., 5.)), lin(0.0092, 0.0)),
            row(per_n(ops(0., 0., 0., 0., 3.)), per_n(ops(0., 0., 0., 0., 3.)), lin(0.0063, 0.0)),
            lin(640.0, 0.0),
            lin(424.0, 0.0),
        ),
        Zhang => (
            lin(3.0, 0.0),
            row(per_n(ops(0., 0., 6., 0., 4.)), per_n(ops(0., 0., 6., 0., 5.)), lin(2.001, 0.0)),
            row(per_n(ops(0., 0., 3., 0., 2.)), per_n(ops(0., 0., 3., 0., 6.)), lin(1.067, 0.0)),
            lin(928.0, 0.0),
            lin(928.0, 0.0),
        ),
        Yan => (
            lin(2.0, 4.0),
            row(
                per_n(ops(5., 0., 7., 0., 8.)),
                OpExpr {
                    per_n: ops(0., 0., 2., 0., 4.),
                    constant: ops(5., 0., 9., 0., 4.),
                },
                lin(15.781, 0.063),
            ),
            row(per_n(ops(0., 0., 0., 0., 2.)), per_n(ops(0., 0., 0., 0., 2.)), lin(0.004, 0.0)),
            lin(288.0, 512.0),
            lin(32.0, 512.0),
        ),
        Gupta => (
            lin(3.0, 0.0),
            row(per_n(ops(0., 0., 7., 0., 7.)), per_n(ops(0., 0., 12., 0., 7.)), lin(1.878, 0.0)),
            row(per_n(ops(0., 0., 3., 0., 4.)), per_n(ops(0., 0., 3., 0., 4.)), lin(0.754, 0.0)),
            lin(1104.0, 0.0),
            lin(1104.0, 0.0),
        ),
        He => (
            lin(3.0, 0.0),
            row(
                per_n(ops(0., 3., 4., 0., 0.)),
                OpExpr {
                    per_n: ops(3., 1., 0., 0., 0.),
                    constant: ops(0., 0., 2., 0., 0.),
                },
                lin(3.64, 0.0),
            ),
            row(per_n(ops(0., 1., 0., 0., 0.)), per_n(ops(3., 0., 1., 0., 0.)), lin(2.541, 0.0)),
            lin(1128.0, 0.0),
            lin(384.0, 0.0),
        ),
        Wang => (
            lin(3.0, 0.0),
            row(per_n(ops(0., 0., 2., 0., 2.)), per_n(ops(0., 0., 7., 0., 5.)), lin(0.623, 0.0)),
            row(per_n(ops(0., 0., 2., 0., 2.)), per_n(ops(0., 0., 0., 0., 1.)), lin(0.409, 0.0)),
            lin(672.0, 0.0),
            lin(832.0, 0.0),
        ),
        Li => (
            lin(3.0, 0.0),
            row(per_n(ops(0., 0., 14., 0., 5.)), per_n(ops(0., 0., 8., 0., 5.)), lin(3.093, 0.0)),
            row(per_n(ops(0., 0., 4., 0., 3.)), per_n(ops(0., 0., 7., 0., 4.)), lin(1.029, 0.0)),
            lin(1712.0, 0.0),
            lin(1008.0, 0.0),
        ),
        Ours => (
            lin(1.0, 0.0),
            row(
                per_n(ops(0., 0., 1., 0., 7.)),
                OpExpr {
                    per_n: ops(0., 0., 5., 0., 11.),
                    constant: ops(0., 0., 3., 0., 0.),
                },
                lin(0.372, 0.09),
            ),
            row(per_n(ops(0., 0., 0., 0., 1.)), per_n(ops(0., 0., 0., 0., 1.)), lin(0.002, 0.0)),
            lin(288.0, 0.0),
            lin(0.0, 0.0),
        ),
    };
    let total = match id {
        Cao => lin(1184.0, 0.0),
        _ => lin(uplink.per_n + downlink.per_n, uplink.constant + downlink.constant),
    };
    SchemeModel {
        id,
        signaling,
        normal,
        optimized,
        uplink,
        downlink,
        total,
    }
}
