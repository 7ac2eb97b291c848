//! Exponential B-spline symbols and their normalization.
//!
//! The un-normalized level-k symbol is
//! `z^(-ceil(N/2)) * prod_{gamma in Γ} (e^(gamma/2^(k+1)) z + 1)`;
//! the normalized one multiplies it by `K` so that one chosen pair
//! `{e^(θx), e^(-θx)}` (or `{1, x}` for the zero frequency) is reproduced.

use num_traits::One;

use crate::error::{Error, Result};
use crate::frequency::{GammaSet, Node, Theta};
use crate::laurent::LaurentPoly;
use crate::scalar::{abs64, real, to_c64, Cx, Real};

/// Which reproduced pair fixes the normalization factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// First nonzero pair if there is one, otherwise the zero frequency.
    #[default]
    Auto,
    Pair(usize),
    Zero,
}

#[derive(Clone, Debug)]
pub struct ExpBSplineSymbol<R: Real = f64> {
    pub poly: LaurentPoly<R>,
    pub gamma: GammaSet,
    pub level: u32,
    pub k_factor: Cx<R>,
    /// Frequency whose pair the symbol reproduces.
    pub normalized_at: Theta,
}

/// The linear factor `e^(gamma/2^(k+1)) z + 1` for a signed frequency.
pub fn linear_factor<R: Real>(theta: Theta, sign: f64, k: u32) -> LaurentPoly<R> {
    LaurentPoly::new(0, vec![Cx::one(), theta.exp_scaled(sign, k + 1)])
}

/// `z^-1 (e^x z + 1)(e^-x z + 1) = z + (e^x + e^-x) + z^-1` with `x = θ/2^(k+1)`.
///
/// Built from the sum of the two exponentials so that the outer coefficients
/// are exactly one and the middle one is exactly real for imaginary `θ`.
pub fn pair_factor<R: Real>(theta: Theta, k: u32) -> LaurentPoly<R> {
    let s = theta.exp_scaled::<R>(1.0, k + 1) + theta.exp_scaled::<R>(-1.0, k + 1);
    let s = if matches!(theta, Theta::Imag(_)) { Cx::new(s.re, R::zero()) } else { s };
    LaurentPoly::new(-1, vec![Cx::one(), s, Cx::one()])
}

fn zero_factor<R: Real>() -> LaurentPoly<R> {
    LaurentPoly::from_real(0, &[1.0, 1.0])
}

/// Un-normalized symbol `B̃_{N,Γ}^(k)`; the empty set gives the constant 1.
pub fn unnormalized_symbol<R: Real>(g: &GammaSet, k: u32) -> LaurentPoly<R> {
    let n = g.cardinality() as i64;
    let mut acc = LaurentPoly::one();
    let mut shift = 0i64;
    for f in g.pairs() {
        let q = pair_factor::<R>(f.theta, k);
        for _ in 0..f.tau {
            acc = &acc * &q;
            shift -= 1;
        }
    }
    let lin = zero_factor::<R>();
    for _ in 0..g.zero_mult() {
        acc = &acc * &lin;
    }
    // pair factors already carry one z^-1 each
    acc.shift(-(n + 1) / 2 - shift)
}

/// Sup-norm of `B̃_{N,Γ} - z^-1 (e^x z + 1)(e^-x z + 1) B̃_{N-2,Γ_{ℓ,e}}`,
/// with the quadratic built from the two linear factors.
pub fn recursion_check<R: Real>(g: &GammaSet, k: u32, pair_index: usize) -> Result<f64> {
    let f = g
        .pairs()
        .get(pair_index)
        .ok_or_else(|| Error::Structure(format!("pair index {pair_index} out of range")))?;
    let full = unnormalized_symbol::<R>(g, k);
    let reduced = unnormalized_symbol::<R>(&g.without_pair(pair_index), k);
    let quad = (&linear_factor::<R>(f.theta, 1.0, k) * &linear_factor::<R>(f.theta, -1.0, k)).shift(-1);
    Ok(full.sup_distance(&(&quad * &reduced)))
}

/// Normalization factor `K` per the closed forms for even and odd `N`.
pub fn normalization_factor<R: Real>(g: &GammaSet, at: Normalization, k: u32) -> Result<Cx<R>> {
    let at = resolve(g, at)?;
    let inv = match at {
        Normalization::Pair(i) => {
            let theta = g.pairs()[i].theta;
            let ex = theta.exp_scaled::<R>(1.0, k + 1);
            let cosh2 = ex + theta.exp_scaled::<R>(-1.0, k + 1);
            if g.is_even() {
                cosh2 * unnormalized_symbol::<R>(&g.without_pair(i), k).eval(ex)
            } else {
                let half = theta.exp_scaled::<R>(1.0, k + 2) + theta.exp_scaled::<R>(-1.0, k + 2);
                let reduced = g.without_pair(i).without_zeros(1);
                half * cosh2 * unnormalized_symbol::<R>(&reduced, k).eval(ex)
            }
        }
        Normalization::Zero => {
            let one = Cx::<R>::one();
            let z = g.zero_mult();
            if g.is_even() && z >= 2 {
                real::<R>(2.0) * unnormalized_symbol::<R>(&g.without_zeros(2), k).eval(one)
            } else if !g.is_even() && z >= 3 {
                real::<R>(4.0) * unnormalized_symbol::<R>(&g.without_zeros(3), k).eval(one)
            } else {
                // a single zero (N odd): only constants can be reproduced, K = 2 / B̃(1)
                unnormalized_symbol::<R>(g, k).eval(one) * R::from_f64(0.5)
            }
        }
        Normalization::Auto => unreachable!(),
    };
    if abs64(inv) == 0.0 || !abs64(inv).is_finite() {
        return Err(Error::Normalization(format!("K^-1 = {} is not invertible", to_c64(inv))));
    }
    Ok(inv.inv())
}

fn resolve(g: &GammaSet, at: Normalization) -> Result<Normalization> {
    match at {
        Normalization::Auto if !g.pairs().is_empty() => Ok(Normalization::Pair(0)),
        Normalization::Auto => Ok(Normalization::Zero),
        Normalization::Pair(i) if i < g.pairs().len() => Ok(at),
        Normalization::Pair(i) => Err(Error::Structure(format!("pair index {i} out of range"))),
        Normalization::Zero if g.zero_mult() > 0 => Ok(at),
        Normalization::Zero => Err(Error::Structure("zero frequency is not in the set".into())),
    }
}

/// `K * B̃_{N,Γ}^(k)`.
pub fn normalized_symbol<R: Real>(g: &GammaSet, at: Normalization, k: u32) -> Result<ExpBSplineSymbol<R>> {
    let at = resolve(g, at)?;
    let k_factor = normalization_factor::<R>(g, at, k)?;
    let poly = unnormalized_symbol::<R>(g, k).scale(k_factor);
    let normalized_at = match at {
        Normalization::Pair(i) => g.pairs()[i].theta,
        _ => Theta::Zero,
    };
    Ok(ExpBSplineSymbol { poly, gamma: g.clone(), level: k, k_factor, normalized_at })
}

/// Residuals `|d^r a(-z)/dz^r|`, `r < tau`, at one generation node.
#[derive(Clone, Debug)]
pub struct NodeResiduals {
    pub node: Cx<f64>,
    pub tau: u32,
    pub residuals: Vec<f64>,
}

impl NodeResiduals {
    pub fn max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct GenerationReport {
    pub nodes: Vec<NodeResiduals>,
    pub tol: f64,
}

impl GenerationReport {
    pub fn max_residual(&self) -> f64 {
        self.nodes.iter().map(NodeResiduals::max).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

/// Checks that `d^r a(-z_j)/dz^r = 0` for `r < tau_j` at every level-k node of `g`.
pub fn verify_generation<R: Real>(a: &LaurentPoly<R>, g: &GammaSet, k: u32, tol: f64) -> GenerationReport {
    let nodes = g.nodes::<R>(k);
    verify_generation_at(a, &nodes, tol)
}

/// Generation residuals at an arbitrary node list (the nodes need not be symmetric).
pub fn verify_generation_at<R: Real>(a: &LaurentPoly<R>, nodes: &[Node<R>], tol: f64) -> GenerationReport {
    let nodes = nodes
        .iter()
        .map(|n| {
            let residuals = (0..n.tau)
                .map(|r| abs64(a.eval_derivative(-n.z, r).expect("nodes are nonzero")))
                .collect();
            NodeResiduals { node: to_c64(n.z), tau: n.tau, residuals }
        })
        .collect();
    GenerationReport { nodes, tol }
}

/// The stationary order-N B-spline symbol `z^(-ceil(N/2)) (1+z)^N / 2^(N-1)`.
pub fn stationary_bspline<R: Real>(n: u32) -> LaurentPoly<R> {
    let lin = zero_factor::<R>();
    lin.pow(n)
        .shift(-((n as i64 + 1) / 2))
        .scale(real(1.0 / 2f64.powi(n as i32 - 1)))
}
