//! Quadrature on the reference triangle and the unit interval.

use crate::geometry::{from_barycentric, Point};

/// Triangle rule in barycentric coordinates; weights sum to one.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub order: usize,
}

/// Rule on `[0, 1]`; weights sum to one.
#[derive(Clone, Debug)]
pub struct LineQuadrature {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // three-term recurrence for P_n, derivative from P_n and P_{n-1}
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

impl LineQuadrature {
    pub fn gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        LineQuadrature {
            points: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            weights: w.iter().map(|v| 0.5 * v).collect(),
            order: 2 * n - 1,
        }
    }

    /// Smallest Gauss rule exact for degree `order`.
    pub fn with_order(order: usize) -> Self {
        Self::gauss(order / 2 + 1)
    }
}

fn perms3(a: f64, b: f64, c: f64) -> [[f64; 3]; 6] {
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

impl Quadrature {
    pub fn centroid() -> Self {
        Quadrature { points: vec![[1.0 / 3.0; 3]], weights: vec![1.0], order: 1 }
    }

    /// Three interior points, exact for quadratics.
    pub fn degree2() -> Self {
        let a = 2.0 / 3.0;
        let b = 1.0 / 6.0;
        Quadrature {
            points: vec![[a, b, b], [b, a, b], [b, b, a]],
            weights: vec![1.0 / 3.0; 3],
            order: 2,
        }
    }

    /// Dunavant's 12-point rule of degree 6.
    pub fn dunavant6() -> Self {
        let mut points = Vec::with_capacity(12);
        let mut weights = Vec::with_capacity(12);
        for (w, a, b) in [
            (0.116786275726379, 0.501426509658179, 0.249286745170910),
            (0.050844906370207, 0.873821971016996, 0.063089014491502),
        ] {
            for p in [[a, b, b], [b, a, b], [b, b, a]] {
                points.push(p);
                weights.push(w);
            }
        }
        for p in perms3(0.053145049844817, 0.310352451033784, 0.636502499121399) {
            points.push(p);
            weights.push(0.082851075618374);
        }
        // tabulated to 15 digits; renormalise so the weights sum to one exactly
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
        Quadrature { points, weights, order: 6 }
    }

    /// Collapsed (Duffy) tensor Gauss rule with `n × n` points, exact to degree `2n − 2`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            let s = 0.5 * (x[i] + 1.0);
            for j in 0..n {
                let t = 0.5 * (x[j] + 1.0);
                let xi = s;
                let eta = t * (1.0 - s);
                points.push([1.0 - xi - eta, xi, eta]);
                // 0.25 from both interval maps, times 2 to normalise the reference area
                weights.push(0.5 * w[i] * w[j] * (1.0 - s));
            }
        }
        Quadrature { points, weights, order: 2 * n - 2 }
    }

    /// Cheapest bundled rule exact for degree `order`.
    pub fn with_order(order: usize) -> Self {
        match order {
            0 | 1 => Self::centroid(),
            2 => Self::degree2(),
            3..=6 => Self::dunavant6(),
            _ => Self::collapsed_gauss(order.div_ceil(2) + 1),
        }
    }

    /// Integrates `f` over the triangle with corners `p`.
    pub fn integrate(&self, p: &[Point; 3], area: f64, mut f: impl FnMut(Point, [f64; 3]) -> f64) -> f64 {
        let mut s = 0.0;
        for (l, w) in self.points.iter().zip(&self.weights) {
            s += w * f(from_barycentric(p, *l), *l);
        }
        s * area
    }
}
