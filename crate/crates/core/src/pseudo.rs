//! Exponential pseudo-spline symbols `a = B c` and the diagnostics that go
//! with them.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use num_traits::One;
use serde::Serialize;

use crate::bspline::{normalized_symbol, stationary_bspline, verify_generation, GenerationReport, Normalization};
use crate::correction::{correction_for_symbol, rhs, stationary_correction};
use crate::error::Result;
use crate::frequency::{GammaSet, Node, NodeSource, Theta};
use crate::laurent::{LaurentPoly, RealMask, SymmetryClass, REALIZE_TOL};
use crate::scalar::{abs64, to_c64, Cx, Dd, Real};

/// Level-k pseudo-spline symbol `B^(k)_{N,Γ} c^(k)_{M,Γ̃}`.
pub fn symbol<R: Real>(g: &GammaSet, sub: &GammaSet, k: u32) -> Result<LaurentPoly<R>> {
    g.check_subset(sub)?;
    let b = normalized_symbol::<R>(g, Normalization::Auto, k)?.poly;
    let c = correction_for_symbol(&b, g.p(), sub, k)?;
    Ok(&b * &c.poly)
}

/// The symbol computed in double-double and rounded to a real mask.
pub fn real_symbol(g: &GammaSet, sub: &GammaSet, k: u32) -> Result<RealMask> {
    symbol::<Dd>(g, sub, k)?.realize(REALIZE_TOL)
}

/// Generates the level-k masks of one `(Γ, Γ̃)` pair and remembers them.
#[derive(Debug)]
pub struct SchemeFamily {
    gamma: GammaSet,
    sub: GammaSet,
    stationary_limit: RealMask,
    cache: RwLock<BTreeMap<u32, Arc<RealMask>>>,
}

impl SchemeFamily {
    pub fn new(gamma: GammaSet, sub: GammaSet) -> Result<Self> {
        gamma.check_subset(&sub)?;
        let n = gamma.cardinality();
        let m = sub.cardinality();
        let limit = &stationary_bspline::<f64>(n) * &stationary_correction::<f64>(m, n)?;
        Ok(SchemeFamily {
            gamma,
            sub,
            stationary_limit: limit.realize(REALIZE_TOL)?,
            cache: RwLock::new(BTreeMap::new()),
        })
    }

    /// `Γ = Γ̃ = {(±θ, ρ)}`: the interpolatory 2ρ-point family.
    pub fn family(theta: Theta, rho: u32) -> Result<Self> {
        let g = GammaSet::family(theta, rho)?;
        SchemeFamily::new(g.clone(), g)
    }

    pub fn gamma(&self) -> &GammaSet {
        &self.gamma
    }

    pub fn sub(&self) -> &GammaSet {
        &self.sub
    }

    pub fn p(&self) -> f64 {
        self.gamma.p()
    }

    pub fn stationary_limit(&self) -> &RealMask {
        &self.stationary_limit
    }

    pub fn symbol_at(&self, k: u32) -> Result<Arc<RealMask>> {
        if let Some(hit) = self.cache.read().expect("cache lock").get(&k) {
            return Ok(Arc::clone(hit));
        }
        let mask = Arc::new(real_symbol(&self.gamma, &self.sub, k)?);
        let mut w = self.cache.write().expect("cache lock");
        Ok(Arc::clone(w.entry(k).or_insert(mask)))
    }

    /// Un-rounded symbol, for diagnostics that need more than `f64`.
    pub fn symbol_dd(&self, k: u32) -> Result<LaurentPoly<Dd>> {
        symbol::<Dd>(&self.gamma, &self.sub, k)
    }

    pub fn cached_levels(&self) -> Vec<u32> {
        self.cache.read().expect("cache lock").keys().copied().collect()
    }
}

/// Closed-form interpolatory 4-point mask of the `ρ = 2` family.
pub fn family_oracle_4pt(theta: Theta, k: u32) -> RealMask {
    let v = theta.v_f64(k);
    let outer = -1.0 / (16.0 * v.powi(3));
    let inner = 3.0 * (4.0 * v * v - 1.0) / (16.0 * v.powi(3));
    RealMask::new(-3, vec![outer, 0.0, inner, 1.0, inner, 0.0, outer])
}

/// Closed-form interpolatory 6-point mask of the `ρ = 3` family.
pub fn family_oracle_6pt(theta: Theta, k: u32) -> RealMask {
    let v = theta.v_f64(k);
    let v5 = v.powi(5);
    let a = 3.0 / (256.0 * v5);
    let b = -5.0 * (8.0 * v * v - 3.0) / (256.0 * v5);
    let c = 15.0 * (8.0 * v.powi(4) - 4.0 * v * v + 1.0) / (128.0 * v5);
    RealMask::new(-5, vec![a, 0.0, b, 0.0, c, 1.0, c, 0.0, b, 0.0, a])
}

/// One checked condition `d^r a(z) = 2 z^(p-r) prod (p-i)`.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionRow {
    pub node: (f64, f64),
    pub mirror: bool,
    pub order: u32,
    pub target: (f64, f64),
    pub value: (f64, f64),
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproductionReport {
    pub rows: Vec<ConditionRow>,
    pub tol: f64,
}

impl ReproductionReport {
    fn worst(&self, mirror: Option<bool>) -> f64 {
        self.rows
            .iter()
            .filter(|r| mirror.map_or(true, |m| r.mirror == m))
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    /// Largest scaled residual `|value - target| / max(1, |target|)`.
    pub fn max_residual(&self) -> f64 {
        self.worst(None)
    }

    pub fn primary_residual(&self) -> f64 {
        self.worst(Some(false))
    }

    pub fn mirror_residual(&self) -> f64 {
        self.worst(Some(true))
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

fn pair(z: Cx<f64>) -> (f64, f64) {
    (z.re, z.im)
}

/// Checks the reproduction conditions at an arbitrary list of nodes.
pub fn verify_conditions_at<R: Real>(a: &LaurentPoly<R>, nodes: &[Node<R>], p: f64, tol: f64) -> ReproductionReport {
    let mut rows = Vec::new();
    for node in nodes {
        let derivs = match a.derivatives(node.z, node.tau.saturating_sub(1)) {
            Ok(d) => d,
            Err(_) => continue,
        };
        for (r, value) in derivs.iter().enumerate().take(node.tau as usize) {
            let target = rhs(node.z, p, r as u32);
            let residual = abs64(*value - target) / abs64(target).max(1.0);
            rows.push(ConditionRow {
                node: pair(to_c64(node.z)),
                mirror: matches!(node.source, NodeSource::Mirror { .. }),
                order: r as u32,
                target: pair(to_c64(target)),
                value: pair(to_c64(*value)),
                residual,
            });
        }
    }
    ReproductionReport { rows, tol }
}

/// Reproduction conditions for every node of `sub` at level `k`, mirrors included.
pub fn verify_reproduction<R: Real>(a: &LaurentPoly<R>, sub: &GammaSet, k: u32, tol: f64) -> ReproductionReport {
    verify_conditions_at(a, &sub.nodes::<R>(k), sub.p(), tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpolatoryReport {
    /// Worst deviation of an even-indexed tap from `[j = 0]`.
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

/// `a(z) + a(-z) = 2`, i.e. even taps vanish except the centre one, which is 1.
pub fn verify_interpolatory(mask: &RealMask, tol: f64) -> InterpolatoryReport {
    let lo = mask.lo.min(0);
    let hi = mask.hi().max(0);
    let residual = (lo..=hi)
        .filter(|j| j.rem_euclid(2) == 0)
        .map(|j| (mask.get(j) - if j == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    InterpolatoryReport { residual, tol, passed: residual <= tol }
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticRow {
    pub k: u32,
    /// Sup-norm distance between the realized level-k mask and the stationary limit.
    pub sup_dist: f64,
    /// `|a^(k)(1) - 2|` in double-double.
    pub sum_defect: f64,
    /// `|d^s a^(k)(-1)|` for `s < N`.
    pub minus_one: Vec<f64>,
}

pub fn asymptotic_report(fam: &SchemeFamily, levels: impl IntoIterator<Item = u32>) -> Result<Vec<AsymptoticRow>> {
    let n = fam.gamma().cardinality();
    levels
        .into_iter()
        .map(|k| {
            let a = fam.symbol_dd(k)?;
            let mask = fam.symbol_at(k)?;
            let one = Cx::<Dd>::one();
            let sum_defect = abs64(a.eval(one) - Cx::new(Dd::from(2.0), Dd::from(0.0)));
            let minus_one = a.derivatives(-one, n - 1)?.into_iter().map(abs64).collect();
            Ok(AsymptoticRow { k, sup_dist: mask.sup_distance(fam.stationary_limit()), sum_defect, minus_one })
        })
        .collect()
}

/// `b(z) = z a(z^2) - 2`.
pub fn even_odd_transform<R: Real>(a: &LaurentPoly<R>) -> LaurentPoly<R> {
    &a.compose_square().shift(1) - &LaurentPoly::constant(Cx::new(R::from_f64(2.0), R::zero()))
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformReport {
    pub symmetry_residual: f64,
    /// Worst `|d^r b(w)|`, `r < tau`, over the square roots `w` of the nodes and their inverses.
    pub root_residual: f64,
}

/// For an odd-cardinality pseudo-spline symbol, checks that the transformed
/// symbol is odd-symmetric and vanishes to order `tau` at the square roots of
/// the reproduction nodes.
pub fn transform_report<R: Real>(a: &LaurentPoly<R>, sub: &GammaSet, k: u32) -> Result<TransformReport> {
    let b = even_odd_transform(a);
    let symmetry_residual = b.convert::<f64>().symmetry_residual(SymmetryClass::Odd(0));
    let mut root_residual = 0.0f64;
    for node in sub.nodes::<R>(k) {
        for d in b.derivatives(node.sqrt_z, node.tau - 1)? {
            root_residual = root_residual.max(abs64(d));
        }
    }
    Ok(TransformReport { symmetry_residual, root_residual })
}

/// Generation check of a pseudo-spline symbol against its full set.
pub fn verify_symbol_generation<R: Real>(a: &LaurentPoly<R>, g: &GammaSet, k: u32, tol: f64) -> GenerationReport {
    verify_generation(a, g, k, tol)
}
