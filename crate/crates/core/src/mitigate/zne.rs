use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::ProblemHamiltonian;
use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::sim::{expectation, simulate, NoiseModel, SimOptions};

pub const SCALES_3: [f64; 3] = [1.0, 2.0, 3.0];
pub const SCALES_5: [f64; 5] = [1.0, 1.5, 2.0, 2.5, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "UPPERCASE")]
pub enum Extrapolation {
    #[default]
    Linear,
    Poly2,
}

impl std::str::FromStr for Extrapolation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LINEAR" => Ok(Extrapolation::Linear),
            "POLY2" => Ok(Extrapolation::Poly2),
            other => Err(Error::InvalidInput(format!("unknown extrapolation {other:?}"))),
        }
    }
}

/// Number of CX gates that receive one fold beyond the uniform `2k + 1`
/// copies at scale `s`: `⌈((s − 1)/2 − k)·N⌉`, leftmost first.
pub fn partial_folds(scale: f64, n_cx: usize) -> (usize, usize) {
    let half = (scale - 1.0) / 2.0;
    let k = half.floor();
    let extra = ((half - k) * n_cx as f64 - 1e-9).ceil().max(0.0) as usize;
    (k as usize, extra.min(n_cx))
}

/// Replaces each CX by `2k + 1` copies, with the leftmost CX gates folded once
/// more for fractional scales.
pub fn fold(c: &Circuit, scale: f64) -> Result<Circuit> {
    if !(scale >= 1.0 && scale.is_finite()) {
        return Err(Error::InvalidScale(scale));
    }
    if let Some(g) = c.gates().iter().find(|g| g.kind.is_two_qubit() && g.kind != GateKind::Cx) {
        return Err(Error::Precondition(format!("{} must be lowered before folding", g.kind.name())));
    }
    let n_cx = c.count(GateKind::Cx);
    let (k, extra) = partial_folds(scale, n_cx);
    let mut gates = Vec::with_capacity(c.len() + 2 * (k * n_cx + extra));
    let mut seen = 0;
    for g in c.gates() {
        if g.kind == GateKind::Cx {
            let copies = 2 * k + 1 + if seen < extra { 2 } else { 0 };
            seen += 1;
            gates.extend(std::iter::repeat(g.clone()).take(copies));
        } else {
            gates.push(g.clone());
        }
    }
    c.with_gates(gates)
}

/// Least-squares polynomial fit of `(scale, value)` evaluated at zero.
pub fn zne(points: &[(f64, f64)], method: Extrapolation) -> Result<f64> {
    let degree = match method {
        Extrapolation::Linear => 1,
        Extrapolation::Poly2 => 2,
    };
    if points.len() < degree + 1 {
        return Err(Error::InvalidInput(format!("{} points cannot fit a degree-{degree} model", points.len())));
    }
    let mut scales: Vec<f64> = points.iter().map(|p| p.0).collect();
    scales.sort_by(f64::total_cmp);
    if scales.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("duplicate scale factors".into()));
    }
    // fit in a centred variable for conditioning
    let mid = scales.iter().sum::<f64>() / scales.len() as f64;
    let m = degree + 1;
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    for &(s, y) in points {
        let x = s - mid;
        let row: Vec<f64> = (0..m).map(|p| x.powi(p as i32)).collect();
        for i in 0..m {
            atb[i] += row[i] * y;
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve_dense(ata, atb, 1e-300).ok_or_else(|| Error::Degenerate("singular extrapolation fit".into()))?;
    let x0 = -mid;
    Ok(coef.iter().enumerate().map(|(p, c)| c * x0.powi(p as i32)).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZneReport {
    pub points: Vec<(f64, f64)>,
    pub mitigated: f64,
}

/// Noisy `⟨H⟩` at each scale of a lowered circuit, then extrapolated.
pub fn zne_expectation(
    c: &Circuit,
    noise: &NoiseModel,
    h: &ProblemHamiltonian,
    scales: &[f64],
    method: Extrapolation,
    opts: &SimOptions,
) -> Result<ZneReport> {
    zne_with(c, scales, method, |folded| expectation(&simulate(folded, Some(noise), opts)?, h))
}

/// ZNE with an arbitrary evaluator of folded circuits. The fit uses the
/// realized scale `CX(folded)/CX(original)`; requested scales that round to
/// the same circuit are evaluated once.
pub fn zne_with(
    c: &Circuit,
    scales: &[f64],
    method: Extrapolation,
    eval: impl Fn(&Circuit) -> Result<f64> + Sync,
) -> Result<ZneReport> {
    let n_cx = c.count(GateKind::Cx);
    let mut folded: Vec<(f64, Circuit)> = Vec::new();
    for &s in scales {
        let f = fold(c, s)?;
        let realized = if n_cx == 0 { s } else { f.count(GateKind::Cx) as f64 / n_cx as f64 };
        if !folded.iter().any(|(r, _)| *r == realized) {
            folded.push((realized, f));
        }
    }
    let points: Vec<(f64, f64)> =
        folded.par_iter().map(|(s, f)| Ok((*s, eval(f)?))).collect::<Result<_>>()?;
    let mitigated = zne(&points, method)?;
    Ok(ZneReport { points, mitigated })
}
