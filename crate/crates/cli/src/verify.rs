use std::fmt::Write as _;

use anyhow::Result;
use expsub_core::bspline::verify_generation;
use expsub_core::correction::hermite_correction;
use expsub_core::frequency::GammaSet;
use expsub_core::laurent::{RealMask, SymmetryClass};
use expsub_core::pseudo::{asymptotic_report, verify_interpolatory, verify_reproduction, AsymptoticRow, SchemeFamily};
use expsub_core::scalar::Dd;
use rayon::prelude::*;
use serde::Serialize;

pub const GENERATION_TOL: f64 = 1e-11;
pub const REPRODUCTION_TOL: f64 = 1e-11;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const INTERPOLATORY_TOL: f64 = 1e-12;
pub const DECAY_BAND: f64 = 0.10;
pub const DECAY_FIRST_LEVEL: u32 = 6;
pub const ASYMPTOTIC_FIRST_LEVEL: u32 = 4;
/// Values below this are treated as exact zeros when forming decay ratios.
pub const NOISE_FLOOR: f64 = 1e-26;

#[derive(Clone, Copy, Debug, Default)]
pub struct Selection {
    pub generation: bool,
    pub reproduction: bool,
    pub symmetry: bool,
    pub interpolatory: bool,
    pub asymptotic: bool,
    pub decay: bool,
}

impl Selection {
    pub fn all() -> Self {
        Selection { generation: true, reproduction: true, symmetry: true, interpolatory: true, asymptotic: true, decay: true }
    }

    pub fn any(&self) -> bool {
        self.generation || self.reproduction || self.symmetry || self.interpolatory || self.asymptotic || self.decay
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub level: Option<u32>,
    pub residual: f64,
    pub tol: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    fn measured(name: &'static str, level: Option<u32>, residual: f64, tol: f64) -> Self {
        let status = if residual <= tol { Status::Pass } else { Status::Fail };
        Check { name, level, residual, tol, status, note: String::new() }
    }

    fn skipped(name: &'static str, note: impl Into<String>) -> Self {
        Check { name, level: None, residual: 0.0, tol: 0.0, status: Status::Skipped, note: note.into() }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub gamma: String,
    pub sub: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub asymptotic: Vec<AsymptoticRow>,
    pub passed: bool,
}

impl Report {
    fn new(gamma: &GammaSet, sub: &GammaSet, checks: Vec<Check>, asymptotic: Vec<AsymptoticRow>) -> Self {
        let passed = checks.iter().all(|c| c.status != Status::Fail);
        Report { gamma: gamma.to_string(), sub: sub.to_string(), checks, asymptotic, passed }
    }

    pub fn pretty(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Γ = {}   Γ̃ = {}", self.gamma, self.sub);
        for c in &self.checks {
            let level = c.level.map_or_else(|| "   ".to_string(), |k| format!("k={k}"));
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            if c.status == Status::Skipped {
                let _ = writeln!(s, "{status}  {:<14} {level:<5} {}", c.name, c.note);
            } else {
                let _ = writeln!(
                    s,
                    "{status}  {:<14} {level:<5} residual {:>10.3e}  tol {:>8.1e}  {}",
                    c.name, c.residual, c.tol, c.note
                );
            }
        }
        if !self.asymptotic.is_empty() {
            let _ = writeln!(s, "{:>4} {:>12} {:>12}", "k", "sup_dist", "|a(1)-2|");
            for r in &self.asymptotic {
                let _ = writeln!(s, "{:>4} {:>12.4e} {:>12.4e}", r.k, r.sup_dist, r.sum_defect);
            }
        }
        let _ = writeln!(s, "{}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

fn expected_class(g: &GammaSet) -> SymmetryClass {
    if g.is_even() {
        SymmetryClass::Odd(0)
    } else {
        SymmetryClass::Even(0)
    }
}

fn interpolatory_applies(g: &GammaSet, sub: &GammaSet) -> bool {
    g.is_even() && g == sub
}

/// Checks on one mask that do not need other levels.
fn mask_checks(
    mask: &RealMask,
    g: &GammaSet,
    sub: &GammaSet,
    k: u32,
    sel: Selection,
    tol: Option<f64>,
    explicit_interp: bool,
) -> Vec<Check> {
    let a = mask.to_laurent::<f64>();
    let mut out = Vec::new();
    if sel.generation {
        let t = tol.unwrap_or(GENERATION_TOL);
        out.push(Check::measured("generation", Some(k), verify_generation(&a, g, k, t).max_residual(), t));
    }
    if sel.reproduction {
        let t = tol.unwrap_or(REPRODUCTION_TOL);
        let rep = verify_reproduction(&a, sub, k, t);
        out.push(
            Check::measured("reproduction", Some(k), rep.max_residual(), t)
                .with_note(format!("mirror {:.2e}", rep.mirror_residual())),
        );
    }
    if sel.symmetry {
        let t = tol.unwrap_or(SYMMETRY_TOL);
        let class = expected_class(g);
        out.push(Check::measured("symmetry", Some(k), a.symmetry_residual(class), t).with_note(format!("{class:?}")));
    }
    if sel.interpolatory {
        if explicit_interp || interpolatory_applies(g, sub) {
            let t = tol.unwrap_or(INTERPOLATORY_TOL);
            out.push(Check::measured("interpolatory", Some(k), verify_interpolatory(mask, t).residual, t));
        } else {
            out.push(Check::skipped("interpolatory", "needs Γ̃ = Γ with even N"));
        }
    }
    out
}

fn correction_check(g: &GammaSet, sub: &GammaSet, k: u32, tol: Option<f64>) -> Result<Check> {
    let c = hermite_correction::<Dd>(g, sub, k)?;
    let poly = c.poly.convert::<f64>();
    let w = c.half_width();
    let inside = poly.support().map_or(true, |(lo, hi)| lo >= -w && hi <= w);
    let t = tol.unwrap_or(SYMMETRY_TOL);
    let mut check = Check::measured("correction", Some(k), poly.symmetry_residual(SymmetryClass::Odd(0)), t);
    if !inside {
        check.status = Status::Fail;
        check.note = format!("support {:?} exceeds ±{w}", poly.support());
    }
    Ok(check)
}

fn ratio_excess(prev: f64, next: f64, rate: f64) -> Option<f64> {
    (prev > NOISE_FLOOR && next > NOISE_FLOOR).then(|| next / prev / rate - 1.0)
}

/// Decay of `|a(1) - 2|` at rate `2^-M` and of `|d^s a(-1)|` at rate `2^-(N-s)`.
fn decay_check(rows: &[AsymptoticRow], m: u32, n: u32) -> Check {
    let mut worst: Option<f64> = None;
    let mut pairs = 0;
    for w in rows.windows(2).filter(|w| w[0].k >= DECAY_FIRST_LEVEL && w[1].k == w[0].k + 1) {
        pairs += 1;
        let mut push = |x: Option<f64>| {
            if let Some(x) = x {
                worst = Some(worst.map_or(x, |y: f64| y.max(x)));
            }
        };
        push(ratio_excess(w[0].sum_defect, w[1].sum_defect, 2f64.powi(-(m as i32))));
        for (s, (a, b)) in w[0].minus_one.iter().zip(&w[1].minus_one).enumerate() {
            push(ratio_excess(*a, *b, 2f64.powi(-((n - s as u32) as i32))));
        }
    }
    match (pairs, worst) {
        (0, _) => Check::skipped("decay", format!("needs two consecutive levels >= {DECAY_FIRST_LEVEL}")),
        (_, None) => Check::measured("decay", None, 0.0, DECAY_BAND).with_note("all defects below noise floor"),
        (_, Some(x)) => Check::measured("decay", None, x.max(0.0), DECAY_BAND)
            .with_note("largest excess of a level ratio over its bound"),
    }
}

fn asymptotic_check(rows: &[AsymptoticRow]) -> Check {
    let tail: Vec<_> = rows.iter().filter(|r| r.k >= ASYMPTOTIC_FIRST_LEVEL).collect();
    if tail.len() < 2 {
        return Check::skipped("asymptotic", format!("needs two levels >= {ASYMPTOTIC_FIRST_LEVEL}"));
    }
    // largest increase of the distance to the stationary mask between consecutive levels
    let growth = tail
        .windows(2)
        .map(|w| if w[0].sup_dist == 0.0 { w[1].sup_dist } else { w[1].sup_dist / w[0].sup_dist - 1.0 + f64::EPSILON })
        .fold(f64::NEG_INFINITY, f64::max);
    let mut c = Check::measured("asymptotic", None, growth.max(0.0), 0.0);
    c.note = format!("sup_dist {:.3e} -> {:.3e}", tail[0].sup_dist, tail[tail.len() - 1].sup_dist);
    c.status = if growth <= 0.0 || tail.iter().all(|r| r.sup_dist == 0.0) { Status::Pass } else { Status::Fail };
    c
}

pub fn verify_family(fam: &SchemeFamily, levels: (u32, u32), sel: Selection, tol: Option<f64>, explicit_interp: bool) -> Result<Report> {
    let (g, sub) = (fam.gamma(), fam.sub());
    let per_level: Vec<Vec<Check>> = (levels.0..=levels.1)
        .into_par_iter()
        .map(|k| -> Result<Vec<Check>> {
            let mask = fam.symbol_at(k)?;
            let mut checks = mask_checks(&mask, g, sub, k, sel, tol, explicit_interp);
            if sel.symmetry {
                checks.push(correction_check(g, sub, k, tol)?);
            }
            Ok(checks)
        })
        .collect::<Result<_>>()?;
    let mut checks: Vec<Check> = per_level.into_iter().flatten().collect();
    let mut rows = Vec::new();
    if sel.asymptotic || sel.decay {
        rows = asymptotic_report(fam, levels.0..=levels.1)?;
        if sel.asymptotic {
            checks.push(asymptotic_check(&rows));
        }
        if sel.decay {
            checks.push(decay_check(&rows, sub.cardinality(), g.cardinality()));
        }
    }
    Ok(Report::new(g, sub, checks, rows))
}

pub fn verify_mask(mask: &RealMask, g: &GammaSet, sub: &GammaSet, k: u32, sel: Selection, tol: Option<f64>, explicit_interp: bool) -> Report {
    let mut checks = mask_checks(mask, g, sub, k, sel, tol, explicit_interp);
    if sel.asymptotic {
        checks.push(Check::skipped("asymptotic", "not defined for a single mask"));
    }
    if sel.decay {
        checks.push(Check::skipped("decay", "not defined for a single mask"));
    }
    Report::new(g, sub, checks, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: u32, sup_dist: f64, sum_defect: f64, minus_one: Vec<f64>) -> AsymptoticRow {
        AsymptoticRow { k, sup_dist, sum_defect, minus_one }
    }

    #[test]
    fn decay_at_the_predicted_rate_passes() {
        let rows: Vec<_> = (6..10).map(|k| row(k, 0.0, 4f64.powi(-(k as i32)), vec![8f64.powi(-(k as i32))])).collect();
        let c = decay_check(&rows, 2, 3);
        assert_eq!(c.status, Status::Pass);
        assert!(c.residual < 1e-12);
    }

    #[test]
    fn slow_decay_fails() {
        let rows: Vec<_> = (6..10).map(|k| row(k, 0.0, 2f64.powi(-(k as i32)), vec![0.0])).collect();
        assert_eq!(decay_check(&rows, 2, 3).status, Status::Fail);
    }

    #[test]
    fn decay_ignores_noise_and_short_ranges() {
        let noise: Vec<_> = (6..9).map(|k| row(k, 0.0, 1e-30, vec![1e-31])).collect();
        assert_eq!(decay_check(&noise, 4, 4).status, Status::Pass);
        let early: Vec<_> = (0..6).map(|k| row(k, 0.0, 1.0, vec![1.0])).collect();
        assert_eq!(decay_check(&early, 4, 4).status, Status::Skipped);
    }

    #[test]
    fn growing_distance_fails_the_asymptotic_check() {
        let shrinking: Vec<_> = (4..8).map(|k| row(k, 4f64.powi(-(k as i32)), 0.0, vec![])).collect();
        assert_eq!(asymptotic_check(&shrinking).status, Status::Pass);
        let mut growing = shrinking.clone();
        growing[3].sup_dist = 1.0;
        assert_eq!(asymptotic_check(&growing).status, Status::Fail);
        let exact: Vec<_> = (4..8).map(|k| row(k, 0.0, 0.0, vec![])).collect();
        assert_eq!(asymptotic_check(&exact).status, Status::Pass);
    }
}
