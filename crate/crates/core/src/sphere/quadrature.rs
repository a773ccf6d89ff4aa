//! One-dimensional Gauss rules used to build the spherical grids and the
//! Abel-type integrals of the mean-value backend.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affinely maps the rule from [-1, 1] onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> GaussRule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GaussRule {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| half * w).collect(),
        }
    }
}

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
///
/// Newton iteration on the three-term recurrence, seeded with the
/// Tricomi asymptotic guess.
pub fn gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule for the weight `sqrt(1 - x^2)` on [-1, 1] (Chebyshev of the
/// second kind), nodes ascending. With `x = cos(chi)` this integrates
/// `sin^2(chi)`-weighted functions of the polar angle exactly.
pub fn gauss_chebyshev_u(n: usize) -> GaussRule {
    let h = PI / (n as f64 + 1.0);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for j in (1..=n).rev() {
        let a = j as f64 * h;
        nodes.push(a.cos());
        weights.push(h * a.sin().powi(2));
    }
    GaussRule { nodes, weights }
}

/// Gauss rule on [0, 1] for the weight `(1 - x)^alpha * x^beta`
/// (Golub-Welsch on the Jacobi matrix).
pub fn gauss_jacobi_unit(n: usize, alpha: f64, beta: f64) -> GaussRule {
    assert!(alpha > -1.0 && beta > -1.0, "Jacobi exponents must exceed -1");
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let jf = j as f64;
        let diag = if j == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * jf + ab) * (2.0 * jf + ab + 2.0))
        };
        jm[(j, j)] = diag;
        if j + 1 < n {
            let k = jf + 1.0;
            let num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
            let den = (2.0 * k + ab).powi(2) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
            let off = (num / den).sqrt();
            jm[(j, j + 1)] = off;
            jm[(j + 1, j)] = off;
        }
    }
    let eig = SymmetricEigen::new(jm);
    let ln_mu0 = (ab + 1.0) * 2f64.ln() + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = ln_mu0.exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let y = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (y, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // [-1,1] weight (1-y)^a (1+y)^b  ->  [0,1] weight (1-x)^a x^b
    let scale = 2f64.powf(-(ab + 1.0));
    GaussRule {
        nodes: pairs.iter().map(|p| 0.5 * (1.0 + p.0)).collect(),
        weights: pairs.iter().map(|p| p.1 * scale).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::beta;

    #[test]
    fn legendre_integrates_polynomials() {
        let rule = gauss_legendre(10);
        for p in 0..20 {
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            let got = rule.integrate(|x| x.powi(p));
            assert!((got - exact).abs() < 1e-14, "p={p}: {got} vs {exact}");
        }
    }

    #[test]
    fn legendre_large_order_weights_sum() {
        let rule = gauss_legendre(257);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn chebyshev_u_moments() {
        let rule = gauss_chebyshev_u(8);
        // int sqrt(1-x^2) x^2 dx = pi/8
        assert!((rule.integrate(|x| x * x) - PI / 8.0).abs() < 1e-14);
        assert!((rule.integrate(|_| 1.0) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_unit_moments_match_beta_function() {
        for &(a, b) in &[(0.0, 0.5), (0.0, -0.5), (1.0, 1.5), (0.5, 0.0)] {
            let rule = gauss_jacobi_unit(8, a, b);
            for j in 0..12 {
                let exact = beta(b + j as f64 + 1.0, a + 1.0);
                let got = rule.integrate(|x| x.powi(j));
                assert!((got - exact).abs() < 1e-13 * exact.max(1.0), "a={a} b={b} j={j}");
            }
        }
    }
}
