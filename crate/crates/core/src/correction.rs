//! The polynomial correction `c` that turns an exponential B-spline symbol
//! into a pseudo-spline symbol.
//!
//! For each node `z` of the reproduced set the target is the function
//! `h(z) = 2 z^p / B(z)`; its `z`-derivatives are moved to the variable
//! `t = z + 1/z`, Hermite-interpolated there, and mapped back.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bspline::{normalized_symbol, Normalization};
use crate::error::{Error, Result};
use crate::frequency::{GammaSet, NodeSource};
use crate::laurent::LaurentPoly;
use crate::scalar::{abs64, binomial, real, to_c64, Cx, Real};

/// Below this modulus `B(z)` is treated as vanishing at a node.
pub const SINGULAR_TOL: f64 = 1e-14;

/// `v_s = d^s(2 z^p)/dz^s = 2 z^(p-s) prod_{i<s} (p - i)`.
pub fn rhs<R: Real>(z: Cx<R>, p: f64, s: u32) -> Cx<R> {
    let mut falling = 1.0;
    for i in 0..s {
        falling *= p - i as f64;
    }
    if falling == 0.0 {
        return Cx::zero();
    }
    let zp = if p == 0.0 { Cx::one() } else { principal_sqrt(z).inv() };
    zp * z.powi(-(s as i32)) * R::from_f64(2.0 * falling)
}

/// Principal square root of a complex value.
pub fn principal_sqrt<R: Real>(z: Cx<R>) -> Cx<R> {
    let r = z.re.to_f64();
    let i = z.im.to_f64();
    let guess = Cx::new(r, i).sqrt();
    let mut w = Cx::new(R::from_f64(guess.re), R::from_f64(guess.im));
    if abs64(w) == 0.0 {
        return w;
    }
    // two Newton steps lift the f64 seed to the working precision
    for _ in 0..2 {
        w = (w + z / w) * R::from_f64(0.5);
    }
    w
}

/// Derivatives `G^(0..=r_max)` of `G = 1/B` from the derivatives of `B`,
/// solving `sum_i C(s,i) G^(i) B^(s-i) = [s = 0]` forward.
pub fn reciprocal_from_derivatives<R: Real>(b: &[Cx<R>]) -> Result<Vec<Cx<R>>> {
    let b0 = b[0];
    let modulus = abs64(b0);
    if modulus < SINGULAR_TOL {
        return Err(Error::Singular { modulus });
    }
    let inv = b0.inv();
    let mut g = Vec::with_capacity(b.len());
    g.push(inv);
    for s in 1..b.len() {
        let mut acc = Cx::<R>::zero();
        for i in 0..s {
            acc = acc + g[i] * b[s - i] * binomial::<R>(s, i);
        }
        g.push(-acc * inv);
    }
    Ok(g)
}

pub fn reciprocal_derivatives<R: Real>(b: &LaurentPoly<R>, z: Cx<R>, r_max: u32) -> Result<Vec<Cx<R>>> {
    reciprocal_from_derivatives(&b.derivatives(z, r_max)?)
}

/// `d^s h(z)` for `s < tau`, where `h = 2 z^p / B`.
pub fn correction_derivatives<R: Real>(b: &LaurentPoly<R>, z: Cx<R>, p: f64, tau: u32) -> Result<Vec<Cx<R>>> {
    let g = reciprocal_derivatives(b, z, tau - 1)?;
    let v: Vec<_> = (0..tau).map(|s| rhs(z, p, s)).collect();
    Ok((0..tau as usize)
        .map(|s| {
            (0..=s).fold(Cx::zero(), |acc, i| acc + v[i] * g[s - i] * binomial::<R>(s, i))
        })
        .collect())
}

/// Derivatives of the inner map `t(z) = z + 1/z`, orders `1..=n`.
fn inner_derivatives<R: Real>(z: Cx<R>, n: usize) -> Vec<Cx<R>> {
    let zinv = z.inv();
    let mut out = Vec::with_capacity(n + 1);
    out.push(z + zinv);
    let mut power = zinv * zinv;
    let mut fact = 1.0;
    for r in 1..=n {
        fact *= r as f64;
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let term = power * R::from_f64(sign * fact);
        out.push(if r == 1 { Cx::<R>::one() + term } else { term });
        power = power * zinv;
    }
    out
}

/// Partial Bell polynomials `B_{n,j}(x_1, x_2, ...)` for `0 <= j <= n <= n_max`;
/// `x[r]` holds the r-th inner derivative (index 0 unused).
fn bell_table<R: Real>(x: &[Cx<R>], n_max: usize) -> Vec<Vec<Cx<R>>> {
    let mut t = vec![vec![Cx::<R>::zero(); n_max + 1]; n_max + 1];
    t[0][0] = Cx::one();
    for n in 1..=n_max {
        for j in 1..=n {
            let mut acc = Cx::zero();
            for i in 1..=(n - j + 1) {
                acc = acc + x[i] * t[n - i][j - 1] * binomial::<R>(n - 1, i - 1);
            }
            t[n][j] = acc;
        }
    }
    t
}

/// Converts `z`-derivatives of `c = psi(z + 1/z)` into `t`-derivatives of `psi`.
///
/// At `z = 1` the first inner derivative vanishes and only even orders carry
/// information, so `ceil(len/2)` values come back.
pub fn to_t_derivatives<R: Real>(z: Cx<R>, c: &[Cx<R>]) -> Result<Vec<Cx<R>>> {
    if c.is_empty() {
        return Ok(Vec::new());
    }
    let zf = to_c64(z);
    if (zf + 1.0).norm() == 0.0 {
        return Err(Error::Domain("z = -1 is not a valid node".into()));
    }
    let n = c.len() - 1;
    let x = inner_derivatives(z, n);
    let bell = bell_table(&x, n);
    let mut psi = vec![c[0]];
    if z == Cx::one() {
        for m in 1..=(n / 2) {
            let row = 2 * m;
            let mut acc = c[row];
            for (j, p) in psi.iter().enumerate().skip(1) {
                acc = acc - *p * bell[row][j];
            }
            psi.push(acc / bell[row][m]);
        }
    } else {
        for s in 1..=n {
            let mut acc = c[s];
            for (j, p) in psi.iter().enumerate().skip(1) {
                acc = acc - *p * bell[s][j];
            }
            psi.push(acc / bell[s][s]);
        }
    }
    Ok(psi)
}

/// One interpolation node in the `t` variable.
#[derive(Clone, Debug)]
pub struct HermiteNode<R: Real = f64> {
    pub t: Cx<R>,
    /// `psi^(j)(t)` for `j < derivs.len()`.
    pub derivs: Vec<Cx<R>>,
}

/// Newton form of the confluent Hermite interpolant: coefficients and the
/// expanded abscissa list (each node repeated by its multiplicity).
#[derive(Clone, Debug)]
pub struct NewtonForm<R: Real = f64> {
    pub coeffs: Vec<Cx<R>>,
    pub abscissae: Vec<Cx<R>>,
}

impl<R: Real> NewtonForm<R> {
    pub fn eval(&self, t: Cx<R>) -> Cx<R> {
        let n = self.coeffs.len();
        let mut acc = self.coeffs[n - 1];
        for j in (0..n - 1).rev() {
            acc = acc * (t - self.abscissae[j]) + self.coeffs[j];
        }
        acc
    }

    /// Horner substitution of `t = z + 1/z` in Laurent arithmetic.
    pub fn substitute(&self) -> LaurentPoly<R> {
        let n = self.coeffs.len();
        let mut acc = LaurentPoly::constant(self.coeffs[n - 1]);
        for j in (0..n - 1).rev() {
            let lin = LaurentPoly::new(-1, vec![Cx::one(), -self.abscissae[j], Cx::one()]);
            acc = &(&acc * &lin) + &LaurentPoly::constant(self.coeffs[j]);
        }
        acc
    }
}

pub fn hermite_newton<R: Real>(nodes: &[HermiteNode<R>]) -> Result<NewtonForm<R>> {
    for (a, na) in nodes.iter().enumerate() {
        for nb in &nodes[a + 1..] {
            if abs64(na.t - nb.t) == 0.0 {
                return Err(Error::CoincidentNodes(format!("t = {}", to_c64(na.t))));
            }
        }
    }
    let mut group = Vec::new();
    let mut abscissae = Vec::new();
    for (g, node) in nodes.iter().enumerate() {
        for _ in 0..node.derivs.len() {
            group.push(g);
            abscissae.push(node.t);
        }
    }
    let n = abscissae.len();
    if n == 0 {
        return Err(Error::Structure("no interpolation conditions".into()));
    }
    let mut table: Vec<Cx<R>> = group.iter().map(|&g| nodes[g].derivs[0]).collect();
    let mut coeffs = vec![table[0]];
    let mut fact = R::one();
    for j in 1..n {
        fact = fact * R::from_f64(j as f64);
        for i in 0..n - j {
            table[i] = if group[i] == group[i + j] {
                nodes[group[i]].derivs[j] / fact
            } else {
                (table[i + 1] - table[i]) / (abscissae[i + j] - abscissae[i])
            };
        }
        coeffs.push(table[0]);
    }
    Ok(NewtonForm { coeffs, abscissae })
}

/// `p_j(z + 1/z)` from `p_0 = 2`, `p_1 = t`, `p_{j+1} = t p_j - p_{j-1}`.
pub fn chebyshev_like<R: Real>(j: u32) -> LaurentPoly<R> {
    let t = LaurentPoly::<R>::from_real(-1, &[1.0, 0.0, 1.0]);
    let mut prev = LaurentPoly::constant(real(2.0));
    if j == 0 {
        return prev;
    }
    let mut cur = t.clone();
    for _ in 1..j {
        let next = &(&t * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrectionPoly<R: Real = f64> {
    #[serde(skip)]
    pub poly: LaurentPoly<R>,
    pub m: u32,
    pub level: u32,
}

impl<R: Real> CorrectionPoly<R> {
    /// Largest exponent allowed by the support bound `ceil(M/2) - 1`.
    pub fn half_width(&self) -> i64 {
        (self.m as i64 + 1) / 2 - 1
    }
}

/// Hermite data in `t` for every primary node of `sub` at level `k`.
pub fn hermite_nodes<R: Real>(b: &LaurentPoly<R>, sub: &GammaSet, p: f64, k: u32) -> Result<Vec<HermiteNode<R>>> {
    sub.primary_nodes::<R>(k)
        .iter()
        .map(|node| {
            let c = correction_derivatives(b, node.z, p, node.tau)?;
            let derivs = to_t_derivatives(node.z, &c)?;
            let t = if matches!(node.source, NodeSource::Zero) { real(2.0) } else { node.z + node.z.inv() };
            Ok(HermiteNode { t, derivs })
        })
        .collect()
}

/// The unique symmetric correction `c^(k)_{M,Γ̃}` for the normalized B-spline of `g`.
pub fn hermite_correction<R: Real>(g: &GammaSet, sub: &GammaSet, k: u32) -> Result<CorrectionPoly<R>> {
    g.check_subset(sub)?;
    let b = normalized_symbol::<R>(g, Normalization::Auto, k)?.poly;
    correction_for_symbol(&b, g.p(), sub, k)
}

pub(crate) fn correction_for_symbol<R: Real>(
    b: &LaurentPoly<R>,
    p: f64,
    sub: &GammaSet,
    k: u32,
) -> Result<CorrectionPoly<R>> {
    let nodes = hermite_nodes(b, sub, p, k)?;
    let newton = hermite_newton(&nodes)?;
    let m = sub.cardinality();
    debug_assert_eq!(newton.coeffs.len() as u32, (m + 1) / 2);
    Ok(CorrectionPoly { poly: newton.substitute(), m, level: k })
}

/// Maximum over the nodes of `sub` (mirrors included) of
/// `|d^s c(z) - d^s h(z)|` with `h = 2 z^p / B`.
pub fn closed_loop_residual<R: Real>(c: &LaurentPoly<R>, b: &LaurentPoly<R>, p: f64, sub: &GammaSet, k: u32) -> Result<f64> {
    let mut worst = 0.0f64;
    for node in sub.nodes::<R>(k) {
        let want = correction_derivatives(b, node.z, p, node.tau)?;
        let got = c.derivatives(node.z, node.tau - 1)?;
        for (w, g) in want.iter().zip(&got) {
            worst = worst.max(abs64(*w - *g));
        }
    }
    Ok(worst)
}

/// `delta(z) = -(1 - z)^2 / (4z)`.
pub fn delta<R: Real>() -> LaurentPoly<R> {
    LaurentPoly::from_real(-1, &[-0.25, 0.5, -0.25])
}

/// Coefficients `beta_s` of the stationary correction `sum_s beta_s delta^s`.
pub fn stationary_weights(m: u32, n: u32) -> Result<Vec<f64>> {
    if m == 0 || m > n {
        return Err(Error::Structure(format!("need 1 <= M <= N, got M={m}, N={n}")));
    }
    if m % 2 != n % 2 {
        return Err(Error::Parity { m, n });
    }
    let rho = (n / 2) as f64;
    let base = if n % 2 == 0 { rho - 1.0 } else { rho - 0.5 };
    let mut beta = vec![1.0];
    for s in 1..=((m - 1) / 2) {
        let prev = beta[s as usize - 1];
        beta.push(prev * (base + s as f64) / s as f64);
    }
    Ok(beta)
}

/// Stationary limit `c_M` of the corrections for a set of cardinality `N`.
pub fn stationary_correction<R: Real>(m: u32, n: u32) -> Result<LaurentPoly<R>> {
    let d = delta::<R>();
    let mut acc = LaurentPoly::zero();
    let mut power = LaurentPoly::one();
    for b in stationary_weights(m, n)? {
        acc = &acc + &power.scale(real(b));
        power = &power * &d;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::stationary_bspline;
    use crate::frequency::{Frequency, Theta};
    use crate::laurent::SymmetryClass;
    use crate::scalar::{cx, Dd};

    fn c64(re: f64) -> Cx<f64> {
        cx(re, 0.0)
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(rhs::<f64>(c64(0.7), 0.0, 0), c64(2.0));
        assert_eq!(rhs::<f64>(c64(0.7), 0.0, 1), c64(0.0));
        assert_eq!(rhs::<f64>(c64(1.0), -0.5, 1), c64(-1.0));
        // d^2 (2 z^-1/2) = 2 * 3/4 * z^-5/2
        let z = c64(0.81);
        assert!((rhs::<f64>(z, -0.5, 2) - c64(1.5 * 0.81f64.powf(-2.5))).norm() < 1e-14);
    }

    #[test]
    fn reciprocal_of_b2() {
        let b2 = LaurentPoly::<f64>::from_real(-1, &[0.5, 1.0, 0.5]);
        let g = reciprocal_derivatives(&b2, c64(1.0), 2).unwrap();
        assert!((g[0] - c64(0.5)).norm() < 1e-15);
        assert!(g[1].norm() < 1e-15);
        assert!((g[2] - c64(-0.25)).norm() < 1e-15);

        let g = reciprocal_from_derivatives(&[c64(1.0), c64(0.0), c64(0.0)]).unwrap();
        assert_eq!(g, vec![c64(1.0), c64(0.0), c64(0.0)]);
    }

    #[test]
    fn reciprocal_detects_singular_nodes() {
        let b2 = LaurentPoly::<f64>::from_real(-1, &[0.5, 1.0, 0.5]);
        assert!(matches!(reciprocal_derivatives(&b2, c64(-1.0), 1), Err(Error::Singular { .. })));
    }

    #[test]
    fn first_order_change_of_variable() {
        let z = cx::<f64>(0.6, 0.3);
        let c = [cx(1.2, 0.1), cx(-0.4, 0.9)];
        let psi = to_t_derivatives(z, &c).unwrap();
        assert_eq!(psi[0], c[0]);
        let expect = c[1] / (Cx::<f64>::one() - (z * z).inv());
        assert!((psi[1] - expect).norm() < 1e-14);
    }

    #[test]
    fn change_of_variable_matches_known_composition() {
        // psi(t) = t^3, c(z) = (z + 1/z)^3; compare psi', psi'', psi''' at t(z)
        let z = cx::<Dd>(0.8, 0.0);
        let c = LaurentPoly::<Dd>::from_real(-1, &[1.0, 0.0, 1.0]).pow(3);
        let cd = c.derivatives(z, 3).unwrap();
        let psi = to_t_derivatives(z, &cd).unwrap();
        let t = z + z.inv();
        let expect = [t * t * t, t * t * Dd::from(3.0), t * Dd::from(6.0), real::<Dd>(6.0)];
        for (a, b) in psi.iter().zip(&expect) {
            assert!(abs64(*a - *b) < 1e-26);
        }
        // at z = 1 only even rows are used: psi(2), psi'(2)
        let one = Cx::<Dd>::one();
        let cd = c.derivatives(one, 3).unwrap();
        let psi = to_t_derivatives(one, &cd).unwrap();
        assert_eq!(psi.len(), 2);
        assert!(abs64(psi[0] - real(8.0)) < 1e-28);
        assert!(abs64(psi[1] - real(12.0)) < 1e-28);
        assert!(to_t_derivatives(-one, &cd).is_err());
    }

    #[test]
    fn hermite_newton_reproduces_a_cubic() {
        // psi(t) = t^3 - t with data psi, psi' at t = 1 and psi, psi' at t = 3
        let f = |t: f64| t * t * t - t;
        let df = |t: f64| 3.0 * t * t - 1.0;
        let nodes = vec![
            HermiteNode { t: c64(1.0), derivs: vec![c64(f(1.0)), c64(df(1.0))] },
            HermiteNode { t: c64(3.0), derivs: vec![c64(f(3.0)), c64(df(3.0))] },
        ];
        let nf = hermite_newton(&nodes).unwrap();
        for t in [-1.0, 0.5, 2.0, 4.0] {
            assert!((nf.eval(c64(t)) - c64(f(t))).norm() < 1e-12);
        }
        let dup = vec![nodes[0].clone(), nodes[0].clone()];
        assert!(matches!(hermite_newton(&dup), Err(Error::CoincidentNodes(_))));
    }

    #[test]
    fn chebyshev_like_identities() {
        let p2 = chebyshev_like::<f64>(2);
        assert_eq!(p2, LaurentPoly::from_real(-2, &[1.0, 0.0, 0.0, 0.0, 1.0]));
        for j in 1..8 {
            let mut coeffs = vec![0.0; 2 * j as usize + 1];
            coeffs[0] = 1.0;
            coeffs[2 * j as usize] = 1.0;
            assert_eq!(chebyshev_like::<f64>(j), LaurentPoly::from_real(-(j as i64), &coeffs));
        }
        // t^2 substituted by Horner equals p_2 + 2
        let nf = NewtonForm { coeffs: vec![c64(0.0), c64(0.0), c64(1.0)], abscissae: vec![c64(0.0), c64(0.0), c64(0.0)] };
        assert_eq!(nf.substitute(), &p2 + &LaurentPoly::constant(c64(2.0)));
    }

    #[test]
    fn rho2_closed_form() {
        for theta in [Theta::Real(1.0), Theta::Imag(1.0), Theta::Real(2.0)] {
            let g = GammaSet::family(theta, 2).unwrap();
            for k in 0..8 {
                let v = theta.v_f64(k);
                let c = hermite_correction::<f64>(&g, &g, k).unwrap().poly;
                let expect = LaurentPoly::from_real(-1, &[-1.0 / (2.0 * v), 2.0, -1.0 / (2.0 * v)]);
                assert!(c.sup_distance(&expect) < 1e-13, "{theta} k={k}");
            }
        }
    }

    #[test]
    fn rho3_closed_form() {
        for theta in [Theta::Real(1.0), Theta::Imag(2.0)] {
            let g = GammaSet::family(theta, 3).unwrap();
            for k in 0..8 {
                let v = theta.v_f64(k);
                let c = hermite_correction::<Dd>(&g, &g, k).unwrap().poly.convert::<f64>();
                let v2 = v * v;
                let expect = LaurentPoly::from_real(
                    -2,
                    &[3.0 / (8.0 * v2), -9.0 / (4.0 * v), (3.0 + 16.0 * v2) / (4.0 * v2), -9.0 / (4.0 * v), 3.0 / (8.0 * v2)],
                );
                assert!(c.sup_distance(&expect) < 1e-13, "{theta} k={k}");
            }
        }
    }

    #[test]
    fn two_point_subset_gives_constant() {
        let g = GammaSet::validate(&[Frequency::new(Theta::Real(1.0), 2), Frequency::new(Theta::Imag(0.5), 1)], 0).unwrap();
        let sub = g.subset(&[(1, 1)], 0).unwrap();
        for k in 0..4 {
            let c = hermite_correction::<f64>(&g, &sub, k).unwrap();
            let b = normalized_symbol::<f64>(&g, Normalization::Auto, k).unwrap().poly;
            let z1 = sub.primary_nodes::<f64>(k)[0].z;
            assert_eq!(c.poly.support(), Some((0, 0)));
            assert!((c.poly.coeff(0) - c64(2.0) / b.eval(z1)).norm() < 1e-14);
        }
    }

    #[test]
    fn closed_loop_and_shape() {
        let g = GammaSet::validate(
            &[Frequency::new(Theta::Real(0.8), 2), Frequency::new(Theta::Imag(1.7), 1)],
            3,
        )
        .unwrap();
        let subs = [
            g.clone(),
            g.subset(&[(0, 2)], 1).unwrap(),
            g.subset(&[(0, 1), (1, 1)], 3).unwrap(),
        ];
        for sub in &subs {
            for k in 0..5 {
                let c = hermite_correction::<Dd>(&g, sub, k).unwrap();
                let b = normalized_symbol::<Dd>(&g, Normalization::Auto, k).unwrap().poly;
                let res = closed_loop_residual(&c.poly, &b, g.p(), sub, k).unwrap();
                assert!(res < 1e-20, "{sub} k={k} residual {res}");
                let (lo, hi) = c.poly.support().unwrap();
                assert!(lo >= -c.half_width() && hi <= c.half_width());
                let cf = c.poly.convert::<f64>();
                assert_eq!(cf.classify_symmetry(1e-12), SymmetryClass::Odd(0));
            }
        }
    }

    #[test]
    fn stationary_examples() {
        let c4 = stationary_correction::<f64>(4, 4).unwrap();
        assert_eq!(c4, LaurentPoly::from_real(-1, &[-0.5, 2.0, -0.5]));
        assert_eq!(stationary_correction::<f64>(2, 6).unwrap(), LaurentPoly::one());
        assert_eq!(stationary_weights(6, 6).unwrap(), vec![1.0, 3.0, 6.0]);
        assert_eq!(stationary_weights(5, 5).unwrap(), vec![1.0, 2.5, 4.375]);
        assert!(matches!(stationary_weights(3, 6), Err(Error::Parity { m: 3, n: 6 })));
    }

    #[test]
    fn stationary_pseudo_spline_is_interpolatory_for_even_n() {
        for n in [2u32, 4, 6, 8] {
            let a = &stationary_bspline::<f64>(n) * &stationary_correction::<f64>(n, n).unwrap();
            for j in a.lo()..=a.hi() {
                if j % 2 == 0 {
                    let want = if j == 0 { 1.0 } else { 0.0 };
                    assert!((a.coeff(j).re - want).abs() < 1e-14, "N={n} tap {j}");
                }
            }
        }
    }
}
