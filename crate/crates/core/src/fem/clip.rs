//! Exact splitting of a triangle along level lines of P1 functions.
//!
//! Polygons are kept in barycentric coordinates of the parent triangle, so
//! the value of any P1 function at a polygon vertex is a dot product and the
//! area fraction of a sub-triangle is the determinant of its corners.

pub type Bary = [f64; 3];

#[inline]
fn value(vals: &[f64; 3], l: &Bary) -> f64 {
    vals[0] * l[0] + vals[1] * l[1] + vals[2] * l[2]
}

/// Keeps the part of a convex polygon where `sign·(f − level) ≤ 0`.
fn clip(poly: &[Bary], vals: &[f64; 3], level: f64, sign: f64) -> Vec<Bary> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let p = poly[k];
        let q = poly[(k + 1) % n];
        let gp = sign * (value(vals, &p) - level);
        let gq = sign * (value(vals, &q) - level);
        if gp <= 0.0 {
            out.push(p);
        }
        if (gp < 0.0 && gq > 0.0) || (gp > 0.0 && gq < 0.0) {
            let t = gp / (gp - gq);
            out.push([
                p[0] + t * (q[0] - p[0]),
                p[1] + t * (q[1] - p[1]),
                p[2] + t * (q[2] - p[2]),
            ]);
        }
    }
    out
}

/// A piece of the parent triangle; `fraction` is its share of the parent area.
#[derive(Clone, Copy, Debug)]
pub struct SubTriangle {
    pub corners: [Bary; 3],
    pub fraction: f64,
}

impl SubTriangle {
    pub fn whole() -> Self {
        SubTriangle { corners: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], fraction: 1.0 }
    }

    /// Maps barycentric coordinates of the piece to those of the parent.
    #[inline]
    pub fn map(&self, l: &Bary) -> Bary {
        let c = &self.corners;
        [
            l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0],
            l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1],
            l[0] * c[0][2] + l[1] * c[1][2] + l[2] * c[2][2],
        ]
    }
}

fn det3(a: &Bary, b: &Bary, c: &Bary) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// A P1 field with the interval it is clamped to (bounds may be infinite).
#[derive(Clone, Copy, Debug)]
pub struct ClampField {
    pub vals: [f64; 3],
    pub lower: f64,
    pub upper: f64,
}

impl ClampField {
    fn needs_split(&self) -> bool {
        let lo = self.vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo < self.lower && hi > self.lower) || (lo < self.upper && hi > self.upper)
    }
}

/// Splits the reference triangle into pieces on which every field is either
/// strictly between its bounds or beyond one of them. Pieces with negligible
/// area are dropped.
pub fn partition(fields: &[ClampField]) -> Vec<SubTriangle> {
    if !fields.iter().any(ClampField::needs_split) {
        return vec![SubTriangle::whole()];
    }
    let whole = SubTriangle::whole().corners.to_vec();
    let mut pieces = vec![whole];
    for f in fields.iter().filter(|f| f.needs_split()) {
        for level in [f.lower, f.upper] {
            if !level.is_finite() {
                continue;
            }
            let mut next = Vec::with_capacity(2 * pieces.len());
            for p in &pieces {
                for sign in [1.0, -1.0] {
                    let c = clip(p, &f.vals, level, sign);
                    if c.len() >= 3 {
                        next.push(c);
                    }
                }
            }
            pieces = next;
        }
    }
    let mut out = Vec::new();
    for p in pieces {
        for k in 1..p.len() - 1 {
            let fraction = det3(&p[0], &p[k], &p[k + 1]).abs();
            if fraction > 1e-15 {
                out.push(SubTriangle { corners: [p[0], p[k], p[k + 1]], fraction });
            }
        }
    }
    out
}
