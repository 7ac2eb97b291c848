//! Running non-stationary subdivision on finite data.
//!
//! Data live on the grid `t_i = (i + p) / 2^k`. One step computes
//! `(S f)_i = sum_j a_{i-2j} f_j` with the mask of the data's own level.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frequency::{GammaSet, Theta};
use crate::laurent::RealMask;
use crate::pseudo::SchemeFamily;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinedData {
    /// Index of `values[0]`.
    pub offset: i64,
    pub values: Vec<f64>,
    pub level: u32,
    pub p: f64,
}

impl RefinedData {
    pub fn new(offset: i64, values: Vec<f64>, level: u32, p: f64) -> Self {
        RefinedData { offset, values, level, p }
    }

    /// Unit impulse at index 0.
    pub fn delta(level: u32, p: f64) -> Self {
        RefinedData::new(0, vec![1.0], level, p)
    }

    /// Samples `f(t_i)` for `i` in `first..=last`.
    pub fn sample(f: impl Fn(f64) -> f64, first: i64, last: i64, level: u32, p: f64) -> Self {
        let mut d = RefinedData::new(first, Vec::new(), level, p);
        d.values = (first..=last).map(|i| f(d.t(i))).collect();
        d
    }

    pub fn t(&self, i: i64) -> f64 {
        (i as f64 + self.p) / 2f64.powi(self.level as i32)
    }

    pub fn last(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    pub fn get(&self, i: i64) -> Option<f64> {
        if i < self.offset {
            return None;
        }
        self.values.get((i - self.offset) as usize).copied()
    }

    /// `(t_i, value)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(n, v)| (self.t(self.offset + n as i64), *v))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum BoundaryPolicy {
    /// Treat missing samples as zero and keep every output the mask reaches.
    ZeroPad,
    /// Keep only outputs whose whole stencil lies inside the data.
    #[default]
    Trim,
}

/// A real mask tagged with the level it belongs to.
#[derive(Clone, Debug)]
pub struct LevelMask<'a> {
    pub level: Option<u32>,
    pub mask: &'a RealMask,
}

/// Output index range of one step on input indices `[s, e]`.
pub fn output_range(mask: &RealMask, s: i64, e: i64, policy: BoundaryPolicy) -> Option<(i64, i64)> {
    let (lo, hi) = (mask.lo, mask.hi());
    let (a, b) = match policy {
        BoundaryPolicy::ZeroPad => (2 * s + lo, 2 * e + hi),
        BoundaryPolicy::Trim => (2 * s + hi - 1, 2 * e + lo + 1),
    };
    (a <= b).then_some((a, b))
}

pub fn refine(mask: LevelMask<'_>, data: &RefinedData, policy: BoundaryPolicy) -> Result<RefinedData> {
    if let Some(l) = mask.level {
        if l != data.level {
            return Err(Error::LevelMismatch { mask: l, data: data.level });
        }
    }
    let m = mask.mask;
    if data.values.is_empty() {
        return Err(Error::DataExhausted { level: data.level });
    }
    let (a, b) = output_range(m, data.offset, data.last(), policy)
        .ok_or(Error::DataExhausted { level: data.level })?;
    let values = (a..=b)
        .map(|i| {
            let j_lo = (i - m.hi()).div_euclid(2) + ((i - m.hi()).rem_euclid(2) != 0) as i64;
            let j_hi = (i - m.lo).div_euclid(2);
            (j_lo.max(data.offset)..=j_hi.min(data.last()))
                .map(|j| m.get(i - 2 * j) * data.values[(j - data.offset) as usize])
                .sum()
        })
        .collect();
    Ok(RefinedData::new(a, values, data.level + 1, data.p))
}

/// Applies `levels` steps, each with the mask matching the current data level.
pub fn run(fam: &SchemeFamily, data0: &RefinedData, levels: u32, policy: BoundaryPolicy) -> Result<RefinedData> {
    let mut data = data0.clone();
    for _ in 0..levels {
        let mask = fam.symbol_at(data.level)?;
        data = refine(LevelMask { level: Some(data.level), mask: &mask }, &data, policy)?;
    }
    Ok(data)
}

/// Index windows `(level, first, last)` that survive trimming, starting from
/// `first..=last` at `level` and continuing for `levels` steps.
pub fn usable_window(fam: &SchemeFamily, first: i64, last: i64, level: u32, levels: u32) -> Result<Vec<(u32, i64, i64)>> {
    let mut out = vec![(level, first, last)];
    let (mut s, mut e) = (first, last);
    for k in level..level + levels {
        let mask = fam.symbol_at(k)?;
        let (a, b) = output_range(&mask, s, e, BoundaryPolicy::Trim).ok_or(Error::DataExhausted { level: k })?;
        out.push((k + 1, a, b));
        s = a;
        e = b;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    Re,
    Im,
}

/// `x^power * Re/Im e^(theta x)` with complex `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasisFunction {
    pub theta: (f64, f64),
    pub power: u32,
    pub part: Part,
}

impl BasisFunction {
    pub fn new(theta: Complex64, power: u32, part: Part) -> Self {
        BasisFunction { theta: (theta.re, theta.im), power, part }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = (Complex64::new(self.theta.0, self.theta.1) * x).exp() * x.powi(self.power as i32);
        match self.part {
            Part::Re => w.re,
            Part::Im => w.im,
        }
    }
}

/// A real basis of the exponential polynomials reproduced for `sub`.
pub fn basis_functions(sub: &GammaSet) -> Vec<BasisFunction> {
    let mut out = Vec::new();
    for f in sub.pairs() {
        let th = f.theta.as_complex::<f64>();
        for r in 0..f.tau {
            match f.theta {
                Theta::Imag(_) => {
                    out.push(BasisFunction::new(th, r, Part::Re));
                    out.push(BasisFunction::new(th, r, Part::Im));
                }
                _ => {
                    out.push(BasisFunction::new(th, r, Part::Re));
                    out.push(BasisFunction::new(-th, r, Part::Re));
                }
            }
        }
    }
    for r in 0..sub.zero_mult() {
        out.push(BasisFunction::new(Complex64::new(0.0, 0.0), r, Part::Re));
    }
    out
}

/// Refines exact samples of `f` on `first..=last` at `level` for `levels`
/// steps and returns the largest deviation from the exact finer samples,
/// relative to the largest sample magnitude.
pub fn reproduction_experiment(
    fam: &SchemeFamily,
    f: &BasisFunction,
    first: i64,
    last: i64,
    level: u32,
    levels: u32,
) -> Result<f64> {
    let data = RefinedData::sample(|x| f.eval(x), first, last, level, fam.p());
    let out = run(fam, &data, levels, BoundaryPolicy::Trim)?;
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for (t, v) in out.points() {
        let exact = f.eval(t);
        err = err.max((v - exact).abs());
        scale = scale.max(exact.abs());
    }
    Ok(if scale > 0.0 { err / scale } else { err })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub level: u32,
    /// `sup_i |f_(i+1) - f_i|` at this level.
    pub max_difference: f64,
    /// Ratio to the previous level's value, if defined.
    pub ratio: Option<f64>,
}

/// First-difference decay of the refined impulse.
pub fn convergence_probe(fam: &SchemeFamily, levels: u32) -> Result<Vec<ProbeRow>> {
    convergence_probe_from(fam, &RefinedData::delta(0, fam.p()), levels)
}

pub fn convergence_probe_from(fam: &SchemeFamily, data0: &RefinedData, levels: u32) -> Result<Vec<ProbeRow>> {
    let mut rows: Vec<ProbeRow> = Vec::new();
    let mut data = data0.clone();
    for step in 0..=levels {
        if step > 0 {
            data = run(fam, &data, 1, BoundaryPolicy::ZeroPad)?;
        }
        let d = data.values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        let ratio = rows.last().and_then(|r| (r.max_difference > 0.0).then(|| d / r.max_difference));
        rows.push(ProbeRow { level: data.level, max_difference: d, ratio });
    }
    Ok(rows)
}
