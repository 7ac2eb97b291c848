//! Symmetric frequency sets and their level-k nodes.
//!
//! A [`GammaSet`] stores each nonzero frequency once; its negative is implied
//! with the same multiplicity. The zero frequency is carried separately as a
//! plain multiplicity, so `N = 2 * sum(tau) + zero_mult`.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};

/// A frequency `theta` from `R+ ∪ i[0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Theta {
    /// Hyperbolic frequency `lambda > 0`.
    Real(f64),
    /// Trigonometric frequency `i omega`, `0 < omega < pi`.
    Imag(f64),
    Zero,
}

impl Theta {
    /// Builds a tag from a raw value, mapping an exact zero to [`Theta::Zero`].
    pub fn real(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Structure(format!("real frequency must be >= 0, got {lambda}")));
        }
        Ok(if lambda == 0.0 { Theta::Zero } else { Theta::Real(lambda) })
    }

    pub fn imag(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 || omega >= std::f64::consts::PI {
            return Err(Error::Structure(format!(
                "imaginary frequency must lie in i[0, pi), got {omega}i"
            )));
        }
        Ok(if omega == 0.0 { Theta::Zero } else { Theta::Imag(omega) })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Theta::Zero)
    }

    pub fn as_complex<R: Real>(&self) -> Cx<R> {
        match *self {
            Theta::Real(l) => cx(l, 0.0),
            Theta::Imag(w) => cx(0.0, w),
            Theta::Zero => Cx::zero(),
        }
    }

    /// `e^(scale * theta / 2^level)`.
    pub fn exp_scaled<R: Real>(&self, scale: f64, level: u32) -> Cx<R> {
        if self.is_zero() {
            return Cx::one();
        }
        let f = scale / 2f64.powi(level as i32);
        R::cexp(self.as_complex::<R>() * R::from_f64(f))
    }

    /// `v = cosh(theta / 2^(k+1))`, which is `cos(omega / 2^(k+1))` for `theta = i omega`.
    pub fn v<R: Real>(&self, k: u32) -> R {
        let e = self.exp_scaled::<R>(1.0, k + 1);
        let f = self.exp_scaled::<R>(-1.0, k + 1);
        ((e + f) * R::from_f64(0.5)).re
    }

    pub fn v_f64(&self, k: u32) -> f64 {
        let x = 2f64.powi(-(k as i32 + 1));
        match *self {
            Theta::Real(l) => (l * x).cosh(),
            Theta::Imag(w) => (w * x).cos(),
            Theta::Zero => 1.0,
        }
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theta::Real(l) => write!(f, "{l}"),
            Theta::Imag(w) => write!(f, "{w}i"),
            Theta::Zero => write!(f, "0"),
        }
    }
}

/// A frequency together with its multiplicity `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frequency {
    pub theta: Theta,
    pub tau: u32,
}

impl Frequency {
    pub fn new(theta: Theta, tau: u32) -> Self {
        Frequency { theta, tau }
    }
}

/// Where a node comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeSource {
    /// `z = e^(-theta/2^(k+1))` for pair `index`.
    Pair { index: usize },
    /// The mirror `1/z` of the pair node.
    Mirror { index: usize },
    Zero,
}

/// A level-k node `z = e^(-gamma/2^(k+1))` with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node<R: Real = f64> {
    pub z: Cx<R>,
    /// Principal square root of `z`, i.e. `e^(-gamma/2^(k+2))`.
    pub sqrt_z: Cx<R>,
    pub tau: u32,
    pub source: NodeSource,
}

/// A symmetric multiset of frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    pairs: Vec<Frequency>,
    zero_mult: u32,
}

impl GammaSet {
    /// Validates and builds a symmetric set from nonzero frequencies and the
    /// multiplicity of zero. A zero-valued entry in `freqs` counts as the pair
    /// `{0, -0}` and adds `2 * tau` to the zero multiplicity.
    pub fn validate(freqs: &[Frequency], zero_mult: u32) -> Result<Self> {
        let mut pairs: Vec<Frequency> = Vec::new();
        let mut zero_mult = zero_mult;
        let mut saw_zero_entry = false;
        for f in freqs {
            if f.tau == 0 {
                return Err(Error::Structure("multiplicity tau must be positive".into()));
            }
            match f.theta {
                Theta::Real(l) if !(l.is_finite() && l > 0.0) => {
                    return Err(Error::Structure(format!("real frequency must be > 0, got {l}")))
                }
                Theta::Imag(w) if !(w.is_finite() && w > 0.0 && w < std::f64::consts::PI) => {
                    return Err(Error::Structure(format!(
                        "imaginary frequency must lie in i(0, pi), got {w}i"
                    )))
                }
                Theta::Zero => {
                    if saw_zero_entry {
                        return Err(Error::Structure("duplicate frequency 0".into()));
                    }
                    saw_zero_entry = true;
                    zero_mult += 2 * f.tau;
                    continue;
                }
                _ => {}
            }
            if pairs.iter().any(|p| p.theta == f.theta) {
                return Err(Error::Structure(format!("duplicate frequency {}", f.theta)));
            }
            pairs.push(*f);
        }
        let g = GammaSet { pairs, zero_mult };
        if g.cardinality() == 0 {
            return Err(Error::Structure("frequency set is empty".into()));
        }
        Ok(g)
    }

    /// `Γ = {(θ, ρ), (−θ, ρ)}`, or `{(0, 2ρ)}` when `θ = 0`.
    pub fn family(theta: Theta, rho: u32) -> Result<Self> {
        Self::validate(&[Frequency::new(theta, rho)], 0)
    }

    /// `Γ = {(0, n)}`: the stationary polynomial case.
    pub fn polynomial(n: u32) -> Result<Self> {
        Self::validate(&[], n)
    }

    pub fn pairs(&self) -> &[Frequency] {
        &self.pairs
    }

    pub fn zero_mult(&self) -> u32 {
        self.zero_mult
    }

    /// Total cardinality `N` counted with multiplicity and sign.
    pub fn cardinality(&self) -> u32 {
        2 * self.pairs.iter().map(|p| p.tau).sum::<u32>() + self.zero_mult
    }

    pub fn is_even(&self) -> bool {
        self.cardinality() % 2 == 0
    }

    /// Parametrization shift: 0 for even `N`, -1/2 for odd `N`.
    pub fn p(&self) -> f64 {
        if self.is_even() {
            0.0
        } else {
            -0.5
        }
    }

    /// Every signed frequency `gamma` with multiplicity.
    pub fn signed(&self) -> Vec<(Cx<f64>, u32)> {
        let mut out = Vec::new();
        for f in &self.pairs {
            let t = f.theta.as_complex::<f64>();
            out.push((t, f.tau));
            out.push((-t, f.tau));
        }
        if self.zero_mult > 0 {
            out.push((Cx::zero(), self.zero_mult));
        }
        out
    }

    /// Level-k nodes: `e^(-theta/2^(k+1))` and its mirror per pair, then `1` for zero.
    pub fn nodes<R: Real>(&self, k: u32) -> Vec<Node<R>> {
        let mut out = Vec::with_capacity(2 * self.pairs.len() + 1);
        for (index, f) in self.pairs.iter().enumerate() {
            out.push(Node {
                z: f.theta.exp_scaled(-1.0, k + 1),
                sqrt_z: f.theta.exp_scaled(-1.0, k + 2),
                tau: f.tau,
                source: NodeSource::Pair { index },
            });
            out.push(Node {
                z: f.theta.exp_scaled(1.0, k + 1),
                sqrt_z: f.theta.exp_scaled(1.0, k + 2),
                tau: f.tau,
                source: NodeSource::Mirror { index },
            });
        }
        if self.zero_mult > 0 {
            out.push(Node { z: Cx::one(), sqrt_z: Cx::one(), tau: self.zero_mult, source: NodeSource::Zero });
        }
        out
    }

    /// Nodes without mirrors: one per pair plus the zero node.
    pub fn primary_nodes<R: Real>(&self, k: u32) -> Vec<Node<R>> {
        self.nodes(k)
            .into_iter()
            .filter(|n| !matches!(n.source, NodeSource::Mirror { .. }))
            .collect()
    }

    /// Keeps `tau` copies of the listed pairs (by index) and `zero_mult` zeros.
    pub fn subset(&self, keep: &[(usize, u32)], zero_mult: u32) -> Result<GammaSet> {
        let mut freqs = Vec::new();
        for &(index, tau) in keep {
            let f = self.pairs.get(index).ok_or_else(|| {
                Error::Structure(format!("pair index {index} out of range"))
            })?;
            if tau > f.tau {
                return Err(Error::Structure(format!(
                    "multiplicity {tau} exceeds {} for frequency {}",
                    f.tau, f.theta
                )));
            }
            if tau > 0 {
                freqs.push(Frequency::new(f.theta, tau));
            }
        }
        if zero_mult > self.zero_mult {
            return Err(Error::Structure(format!(
                "zero multiplicity {zero_mult} exceeds {}",
                self.zero_mult
            )));
        }
        let sub = GammaSet::validate(&freqs, zero_mult)?;
        self.check_subset(&sub)?;
        Ok(sub)
    }

    /// Checks that `sub` is a sub-multiset of `self` with matching parity.
    pub fn check_subset(&self, sub: &GammaSet) -> Result<()> {
        for f in &sub.pairs {
            match self.pairs.iter().find(|p| p.theta == f.theta) {
                Some(p) if p.tau >= f.tau => {}
                Some(p) => {
                    return Err(Error::Structure(format!(
                        "subset multiplicity {} exceeds {} for frequency {}",
                        f.tau, p.tau, f.theta
                    )))
                }
                None => {
                    return Err(Error::Structure(format!(
                        "frequency {} is not in the set",
                        f.theta
                    )))
                }
            }
        }
        if sub.zero_mult > self.zero_mult {
            return Err(Error::Structure(format!(
                "subset zero multiplicity {} exceeds {}",
                sub.zero_mult, self.zero_mult
            )));
        }
        if sub.cardinality() % 2 != self.cardinality() % 2 {
            return Err(Error::Parity { m: sub.cardinality(), n: self.cardinality() });
        }
        Ok(())
    }

    /// `Γ` with one copy of the pair `±θ_index` removed (possibly empty).
    pub(crate) fn without_pair(&self, index: usize) -> GammaSet {
        let mut g = self.clone();
        g.pairs[index].tau -= 1;
        if g.pairs[index].tau == 0 {
            g.pairs.remove(index);
        }
        g
    }

    /// `Γ` with `count` zeros removed (possibly empty).
    pub(crate) fn without_zeros(&self, count: u32) -> GammaSet {
        GammaSet { pairs: self.pairs.clone(), zero_mult: self.zero_mult - count }
    }

    pub fn to_json_value(&self) -> GammaJson {
        GammaJson {
            pairs: self
                .pairs
                .iter()
                .map(|f| match f.theta {
                    Theta::Real(l) => PairJson { kind: FreqKind::Real, value: l, tau: f.tau },
                    Theta::Imag(w) => PairJson { kind: FreqKind::Imag, value: w, tau: f.tau },
                    Theta::Zero => unreachable!("pairs never hold the zero frequency"),
                })
                .collect(),
            zero_mult: self.zero_mult,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("gamma serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GammaJson = serde_json::from_str(text)?;
        raw.into_gamma()
    }
}

impl fmt::Display for GammaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for p in &self.pairs {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "(±{}, {})", p.theta, p.tau)?;
        }
        if self.zero_mult > 0 {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "(0, {})", self.zero_mult)?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreqKind {
    Real,
    Imag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub kind: FreqKind,
    pub value: f64,
    pub tau: u32,
}

/// `{"pairs":[{"kind":"real"|"imag","value":float,"tau":int}...],"zero_mult":int}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaJson {
    pub pairs: Vec<PairJson>,
    #[serde(default)]
    pub zero_mult: u32,
}

impl GammaJson {
    pub fn into_gamma(self) -> Result<GammaSet> {
        let freqs = self
            .pairs
            .iter()
            .map(|p| {
                let theta = match p.kind {
                    FreqKind::Real => Theta::real(p.value)?,
                    FreqKind::Imag => Theta::imag(p.value)?,
                };
                Ok(Frequency::new(theta, p.tau))
            })
            .collect::<Result<Vec<_>>>()?;
        GammaSet::validate(&freqs, self.zero_mult)
    }
}
