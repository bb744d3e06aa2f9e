//! Two-parameter sweeps of the Hopf and Turing stability boundaries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{hopf_threshold, turing_threshold};
use crate::error::{Error, Result};
use crate::model::NondimParams;

/// Which pair of parameters is swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// `x = η²`, `y = Q²` at fixed `b`.
    EtaQ { b: f64 },
    /// `x = Q²`, `y = b` at fixed `η²`.
    QB { eta2: f64 },
}

impl SweepKind {
    pub fn axis_names(&self) -> (&'static str, &'static str) {
        match self {
            SweepKind::EtaQ { .. } => ("eta2", "Q2"),
            SweepKind::QB { .. } => ("Q2", "b"),
        }
    }

    fn params(&self, base: &NondimParams, x: f64, y: f64) -> Result<NondimParams> {
        match *self {
            SweepKind::EtaQ { b } => NondimParams::from_squares(y, x, b, base.gamma, base.m, base.n),
            SweepKind::QB { eta2 } => NondimParams::from_squares(x, eta2, y, base.gamma, base.m, base.n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "stable")]
    Stable,
    H,
    T,
    #[serde(rename = "T-H")]
    TuringHopf,
}

impl Region {
    pub fn classify(b: f64, b_hopf: f64, b_turing: Option<f64>) -> Region {
        let hopf = b > b_hopf;
        let turing = b_turing.is_some_and(|bt| b > bt);
        match (turing, hopf) {
            (false, false) => Region::Stable,
            (false, true) => Region::H,
            (true, false) => Region::T,
            (true, true) => Region::TuringHopf,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Region::Stable => "stable",
            Region::H => "H",
            Region::T => "T",
            Region::TuringHopf => "T-H",
        }
    }

    pub fn turing_unstable(&self) -> bool {
        matches!(self, Region::T | Region::TuringHopf)
    }
}

/// Sign of the cubic Landau coefficient at the Turing threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    Supercritical,
    Subcritical,
}

impl Criticality {
    pub fn from_landau(l: f64) -> Criticality {
        if l > 0.0 {
            Criticality::Supercritical
        } else {
            Criticality::Subcritical
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Criticality::Supercritical => "supercritical",
            Criticality::Subcritical => "subcritical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub y: f64,
    pub b_hopf: f64,
    /// `None` where no Turing branch exists.
    pub b_turing: Option<f64>,
    pub kc2: Option<f64>,
    pub region: Region,
    /// Filled only for Turing-unstable points when requested.
    pub criticality: Option<Criticality>,
}

/// Boundary polylines in sweep coordinates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurves {
    pub hopf: Vec<(f64, f64)>,
    pub turing: Vec<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
    pub curves: BoundaryCurves,
}

impl Sweep {
    /// CSV with one row per grid point (x-major order).
    pub fn to_csv(&self) -> String {
        let (xn, yn) = self.kind.axis_names();
        let mut s = format!("{xn},{yn},b_hopf,b_turing,kc2,region,criticality\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        for r in &self.rows {
            s.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{},{},{},{}\n",
                r.x,
                r.y,
                r.b_hopf,
                opt(r.b_turing),
                opt(r.kc2),
                r.region.label(),
                r.criticality.map(|c| c.label()).unwrap_or("")
            ));
        }
        s
    }

    pub fn row_at(&self, x: f64, y: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| (r.x - x).abs() <= 1e-12 * x.abs().max(1.0) && (r.y - y).abs() <= 1e-12 * y.abs().max(1.0))
    }
}

fn check_grid(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Grid(format!("{name} grid is empty")));
    }
    if v.windows(2).any(|w| !(w[1] > w[0])) || v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Grid(format!("{name} grid must be positive and strictly increasing")));
    }
    Ok(())
}

/// Evaluates thresholds over the tensor grid `xs × ys`.
///
/// With `criticality` set, the sign of the Landau coefficient is attached to
/// every Turing-unstable point; this costs one normal-form computation per point.
pub fn boundary_sweep(
    base: &NondimParams,
    kind: SweepKind,
    xs: &[f64],
    ys: &[f64],
    criticality: bool,
) -> Result<Sweep> {
    let (xn, yn) = kind.axis_names();
    check_grid(xn, xs)?;
    check_grid(yn, ys)?;
    let points: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let rows = points
        .par_iter()
        .map(|&(x, y)| -> Result<SweepRow> {
            let np = kind.params(base, x, y)?;
            let b_hopf = hopf_threshold(&np);
            let th = turing_threshold(&np).ok();
            let region = Region::classify(np.b, b_hopf, th.map(|t| t.b_turing));
            let crit = if criticality && region.turing_unstable() {
                crate::wnl::landau_coefficient(&np).ok().map(Criticality::from_landau)
            } else {
                None
            };
            Ok(SweepRow {
                x,
                y,
                b_hopf,
                b_turing: th.map(|t| t.b_turing),
                kc2: th.map(|t| t.kc2),
                region,
                criticality: crit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let curves = curves(base, kind, xs, ys)?;
    Ok(Sweep { kind, rows, curves })
}

fn curves(base: &NondimParams, kind: SweepKind, xs: &[f64], ys: &[f64]) -> Result<BoundaryCurves> {
    let (ylo, yhi) = (ys[0], ys[ys.len() - 1]);
    let mut out = BoundaryCurves::default();
    match kind {
        SweepKind::EtaQ { b } => {
            // b = 1 + Q²/η²  ⇔  Q² = (b − 1) η²
            out.hopf = xs
                .iter()
                .map(|&x| (x, (b - 1.0) * x))
                .filter(|&(_, y)| y >= ylo && y <= yhi)
                .collect();
            // b^c does not depend on η², so each crossing in Q² is a horizontal line.
            let excess = |q2: f64| -> Option<f64> {
                let np = NondimParams::from_squares(q2, 1.0, b, base.gamma, base.m, base.n).ok()?;
                turing_threshold(&np).ok().map(|t| t.b_turing - b)
            };
            for w in ys.windows(2) {
                let (Some(f0), Some(f1)) = (excess(w[0]), excess(w[1])) else {
                    continue;
                };
                if (f0 < 0.0) != (f1 < 0.0) {
                    let (mut lo, mut hi, mut flo) = (w[0], w[1], f0);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        match excess(mid) {
                            Some(fm) if (fm < 0.0) == (flo < 0.0) => {
                                lo = mid;
                                flo = fm;
                            }
                            Some(_) => hi = mid,
                            None => break,
                        }
                    }
                    let q2 = 0.5 * (lo + hi);
                    out.turing.push(xs.iter().map(|&x| (x, q2)).collect());
                }
            }
        }
        SweepKind::QB { eta2 } => {
            out.hopf = xs
                .iter()
                .map(|&x| (x, 1.0 + x / eta2))
                .filter(|&(_, y)| y >= ylo && y <= yhi)
                .collect();
            let line: Vec<(f64, f64)> = xs
                .iter()
                .filter_map(|&x| {
                    let np = NondimParams::from_squares(x, eta2, 2.0, base.gamma, base.m, base.n).ok()?;
                    turing_threshold(&np).ok().map(|t| (x, t.b_turing))
                })
                .collect();
            if !line.is_empty() {
                out.turing.push(line);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn region_labels() {
        assert_eq!(Region::classify(1.0, 2.0, Some(3.0)), Region::Stable);
        assert_eq!(Region::classify(2.5, 2.0, Some(3.0)), Region::H);
        assert_eq!(Region::classify(3.5, 4.0, Some(3.0)), Region::T);
        assert_eq!(Region::classify(5.0, 4.0, Some(3.0)), Region::TuringHopf);
        assert_eq!(Region::classify(5.0, 6.0, None), Region::Stable);
    }

    #[test]
    fn turing_curve_is_eta_independent() {
        let base = NondimParams::from_squares(1.0, 1.0, 11.0, 1.0, 1.0, 1.0).unwrap();
        let qs = grid(0.5, 10.0, 12);
        let a = boundary_sweep(&base, SweepKind::QB { eta2: 0.36 }, &qs, &grid(1.0, 20.0, 3), false).unwrap();
        let b = boundary_sweep(&base, SweepKind::QB { eta2: 2.0 }, &qs, &grid(1.0, 20.0, 3), false).unwrap();
        assert_eq!(a.curves.turing, b.curves.turing);
        assert_ne!(a.curves.hopf, b.curves.hopf);
    }

    #[test]
    fn rejects_non_monotone_grid() {
        let base = NondimParams::from_squares(1.0, 1.0, 11.0, 1.0, 1.0, 1.0).unwrap();
        let r = boundary_sweep(&base, SweepKind::EtaQ { b: 11.0 }, &[1.0, 0.5], &[1.0], false);
        assert!(matches!(r, Err(Error::Grid(_))));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let base = NondimParams::from_squares(1.0, 1.0, 11.0, 1.0, 1.0, 1.0).unwrap();
        let s = boundary_sweep(&base, SweepKind::EtaQ { b: 11.0 }, &[0.36, 1.0], &[0.14, 3.0], false).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("eta2,Q2,b_hopf,b_turing,kc2,region,criticality\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
