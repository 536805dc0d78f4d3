//! Small planar geometry helpers shared by the mesh and assembly code.

pub type Point = [f64; 2];

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

/// Signed area of the triangle `(a, b, c)`; positive for counter-clockwise order.
#[inline]
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

/// Maps barycentric coordinates to a physical point.
#[inline]
pub fn from_barycentric(p: &[Point; 3], l: [f64; 3]) -> Point {
    [
        l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
        l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
    ]
}

/// Longest edge length of a triangle.
pub fn diameter(p: &[Point; 3]) -> f64 {
    dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]))
}

/// Smallest interior angle (radians).
pub fn min_angle(p: &[Point; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let a = sub(p[(k + 1) % 3], p[k]);
            let b = sub(p[(k + 2) % 3], p[k]);
            cross(a, b).abs().atan2(dot(a, b))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Polar coordinates `(r, θ)` with θ in `(-π, π]`.
#[inline]
pub fn polar(p: Point) -> (f64, f64) {
    (p[0].hypot(p[1]), p[1].atan2(p[0]))
}
