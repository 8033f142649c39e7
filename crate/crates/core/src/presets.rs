//! Parameter sets and sweep grids for the standard figures.
//!
//! All figures share `λ = 2`, `β = 3`, `η = 20`, `m = 2`, `P_M = 0 dB` and,
//! unless swept, `T = −10 dB`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{CsiParams, Metric, StPower, SystemParams};
use crate::montecarlo::{CsiMode, Scenario};

/// Decibels to linear scale.
pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Common parameter set with the given user count, rank and power cap.
pub fn base_params(n_users: u32, k_rank: u32, p_s: StPower) -> SystemParams {
    SystemParams {
        lambda: 2.0,
        beta: 3.0,
        m: 2.0,
        eta: 20.0,
        p_m: 1.0,
        t_intf: db(-10.0),
        p_s,
        n_users,
        k_rank,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
    ];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = FigureId::ALL.iter().position(|x| x == self).unwrap_or(0) + 2;
        write!(f, "fig{n}")
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .iter()
            .copied()
            .find(|id| id.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param("figure", format!("unknown figure id `{s}` (expected fig2..fig9)")))
    }
}

/// One plotted point: a curve label, the abscissa and what to evaluate there.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePoint {
    pub series: String,
    pub x: f64,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: FigureId,
    /// Name of the abscissa column.
    pub x_name: &'static str,
    pub points: Vec<FigurePoint>,
}

/// Power cap from a dB value; `None` means unlimited.
fn cap(p_s_db: Option<f64>) -> StPower {
    p_s_db.map_or(StPower::Unlimited, |x| StPower::Limited(db(x)))
}

fn cap_label(p_s_db: Option<f64>) -> String {
    match p_s_db {
        Some(x) => format!("P_S={x}dB"),
        None => "P_S=inf".to_string(),
    }
}

/// `start, start+step, …` for `count` points, computed without accumulation.
fn grid(start: f64, step: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| start + step * i as f64)
}

fn users_grid() -> impl Iterator<Item = u32> {
    (1..=20).map(|i| 10 * i)
}

/// Versus-N figures (2, 5, 8): every rank and power cap on N = 10, 20, …, 200.
fn versus_n(metric: Metric, ranks: &[u32], caps: &[Option<f64>]) -> Vec<FigurePoint> {
    let mut pts = Vec::new();
    for &c in caps {
        for &k in ranks {
            for n in users_grid() {
                pts.push(FigurePoint {
                    series: format!("k={k} {}", cap_label(c)),
                    x: f64::from(n),
                    scenario: Scenario::new(metric, base_params(n, k, cap(c))),
                });
            }
        }
    }
    pts
}

/// Builds the point list of a figure.
pub fn figure(id: FigureId) -> Figure {
    let (x_name, points) = match id {
        FigureId::Fig2 => ("N", versus_n(Metric::AvgThroughput, &[1, 2, 3], &[Some(10.0), None])),
        FigureId::Fig3 => {
            let mut pts = Vec::new();
            for n in [6, 30] {
                for limited in [true, false] {
                    for x in grid(-10.0, 2.0, 21) {
                        let c = limited.then_some(x);
                        pts.push(FigurePoint {
                            series: format!("N={n} {}", if limited { "P_S=x" } else { "P_S=inf" }),
                            x,
                            scenario: Scenario::new(Metric::AvgThroughput, base_params(n, 1, cap(c))),
                        });
                    }
                }
            }
            ("P_S_dB", pts)
        }
        FigureId::Fig4 => {
            let mut pts = Vec::new();
            for n in [20, 100] {
                for c in [Some(-20.0), None] {
                    for t in grid(-40.0, 2.0, 21) {
                        let p = SystemParams {
                            t_intf: db(t),
                            ..base_params(n, 1, cap(c))
                        };
                        pts.push(FigurePoint {
                            series: format!("N={n} {}", cap_label(c)),
                            x: t,
                            scenario: Scenario::new(Metric::AvgThroughput, p),
                        });
                    }
                }
            }
            ("T_dB", pts)
        }
        FigureId::Fig5 => (
            "N",
            versus_n(Metric::EffThroughput { a_exp: 0.5 }, &[1, 2, 4], &[Some(5.0), None]),
        ),
        FigureId::Fig6 => {
            let mut pts = Vec::new();
            for c in [Some(-10.0), Some(0.0), Some(10.0), None] {
                for a in grid(0.25, 0.25, 20) {
                    pts.push(FigurePoint {
                        series: cap_label(c),
                        x: a,
                        scenario: Scenario::new(Metric::EffThroughput { a_exp: a }, base_params(30, 1, cap(c))),
                    });
                }
            }
            ("A", pts)
        }
        FigureId::Fig7 => {
            let metric = Metric::Outage { x0: db(13.0) };
            let mut pts = Vec::new();
            for c in [Some(-10.0), None] {
                for k in [1, 2] {
                    for t in grid(-40.0, 2.5, 15) {
                        let p = SystemParams {
                            t_intf: db(t),
                            ..base_params(30, k, cap(c))
                        };
                        pts.push(FigurePoint {
                            series: format!("k={k} {}", cap_label(c)),
                            x: t,
                            scenario: Scenario::new(metric, p),
                        });
                    }
                }
            }
            ("T_dB", pts)
        }
        FigureId::Fig8 => ("N", versus_n(Metric::AvgBer { c: 0.5, v: 0.5 }, &[1], &[Some(-5.0), None])),
        FigureId::Fig9 => {
            let mut pts = Vec::new();
            for a in [0.0, 0.5] {
                // A = 0 carries no delay constraint: plain average throughput.
                let metric = if a == 0.0 {
                    Metric::AvgThroughput
                } else {
                    Metric::EffThroughput { a_exp: a }
                };
                for k in [1, 2] {
                    for i in 0..=10 {
                        let rho = f64::from(50 + 5 * i) / 100.0;
                        let csi = CsiParams {
                            rho,
                            delta: 1.0,
                            gamma0: 0.1,
                            eta_hat: 20.0,
                            beta_hat: 3.0,
                        };
                        pts.push(FigurePoint {
                            series: format!("k={k} A={a}"),
                            x: rho,
                            scenario: Scenario::new(metric, base_params(40, k, StPower::Unlimited))
                                .with_csi(csi, CsiMode::Substitution),
                        });
                    }
                }
            }
            ("rho", pts)
        }
    };
    Figure { id, x_name, points }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.to_string().parse::<FigureId>().unwrap(), id);
        }
        assert_eq!("FIG7".parse::<FigureId>().unwrap(), FigureId::Fig7);
        assert!("fig1".parse::<FigureId>().is_err());
    }

    #[test]
    fn grids_hit_exact_endpoints() {
        let f7 = figure(FigureId::Fig7);
        assert_eq!(f7.points.first().unwrap().x, -40.0);
        assert_eq!(f7.points[14].x, -5.0);
        let f9 = figure(FigureId::Fig9);
        assert_eq!(f9.points[10].x, 1.0);
        assert_eq!(f9.points[10].scenario.csi.unwrap().rho, 1.0);
        assert_eq!(db(-10.0), 0.1);
    }

    #[test]
    fn every_preset_point_is_valid() {
        for id in FigureId::ALL {
            let f = figure(id);
            assert!(!f.points.is_empty());
            for pt in &f.points {
                pt.scenario.metric.validate().unwrap();
                pt.scenario.params.validate_for_simulation().unwrap();
            }
        }
    }

    #[test]
    fn figure_two_layout() {
        let f = figure(FigureId::Fig2);
        assert_eq!(f.points.len(), 2 * 3 * 20);
        assert_eq!(f.points[0].scenario.params.p_s, StPower::Limited(10.0));
        assert_eq!(f.points[0].series, "k=1 P_S=10dB");
    }
}
