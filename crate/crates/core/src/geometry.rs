//! Planar primitives shared by every other module.
//!
//! Coordinates are screen pixels with y growing downward. Angles are radians,
//! counterclockwise in the usual math sense of the rotation matrix
//! `[cos -sin; sin cos]`. Because y points down on screen, a positive angle
//! appears clockwise to the viewer; every module uses the same matrix, so a
//! point dragged around a pivot stays under the pointer either way.
//!
//! Containment is closed: a point on the boundary is inside. All comparisons
//! use the absolute tolerance [`EPSILON`].

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

/// Absolute tolerance for geometric comparisons, in pixels.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinate is not finite: ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon has duplicate consecutive vertices at index {0}")]
    DuplicateVertex(usize),
    #[error("polygon is not strictly convex with counterclockwise winding")]
    NotConvex,
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

/// A location in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// A displacement in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    /// Panics on NaN or infinite input; use [`Point::try_new`] for untrusted data.
    pub fn new(x: f64, y: f64) -> Self {
        Self::try_new(x, y).expect("finite point")
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(GeometryError::NonFinite(x, y))
        }
    }

    pub fn to_vector(self) -> Vector {
        Vector { x: self.x, y: self.y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).length()
    }
}

impl Vector {
    pub const ZERO: Vector = Vector { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vector { x, y }
    }

    pub fn to_point(self) -> Point {
        Point { x: self.x, y: self.y }
    }

    pub fn dot(self, other: Vector) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vector) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn rotate(self, angle: f64) -> Vector {
        let (sin, cos) = angle.sin_cos();
        Vector {
            x: cos * self.x - sin * self.y,
            y: sin * self.x + cos * self.y,
        }
    }

    /// `(R(angle) - I) * self`, written so that angle 0 yields exactly zero.
    pub fn rotate_minus_identity(self, angle: f64) -> Vector {
        let r = self.rotate(angle);
        Vector {
            x: r.x - self.x,
            y: r.y - self.y,
        }
    }

    /// Angle of the vector measured from +x, in `(-π, π]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add<Vector> for Point {
    type Output = Point;
    fn add(self, v: Vector) -> Point {
        Point { x: self.x + v.x, y: self.y + v.y }
    }
}

impl AddAssign<Vector> for Point {
    fn add_assign(&mut self, v: Vector) {
        self.x += v.x;
        self.y += v.y;
    }
}

impl Sub<Vector> for Point {
    type Output = Point;
    fn sub(self, v: Vector) -> Point {
        Point { x: self.x - v.x, y: self.y - v.y }
    }
}

impl Sub for Point {
    type Output = Vector;
    fn sub(self, other: Point) -> Vector {
        Vector { x: self.x - other.x, y: self.y - other.y }
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, v: Vector) -> Vector {
        Vector { x: self.x + v.x, y: self.y + v.y }
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, v: Vector) -> Vector {
        Vector { x: self.x - v.x, y: self.y - v.y }
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector { x: -self.x, y: -self.y }
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(self, k: f64) -> Vector {
        Vector { x: self.x * k, y: self.y * k }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Normalizes an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid of a tiny negative value rounds up to exactly TAU
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Smallest absolute difference between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

/// Rigid motion: rotate about the origin, then translate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Transform {
    pub translation: Point,
    angle: f64,
}

impl Transform {
    pub const IDENTITY: Transform = Transform { translation: Point::ORIGIN, angle: 0.0 };

    pub fn new(translation: Point, angle: f64) -> Self {
        Transform { translation, angle: normalize_angle(angle) }
    }

    pub fn translation(translation: Point) -> Self {
        Transform { translation, angle: 0.0 }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn set_angle(&mut self, angle: f64) {
        self.angle = normalize_angle(angle);
    }

    pub fn to_world(&self, p: Point) -> Point {
        self.translation + p.to_vector().rotate(self.angle)
    }

    pub fn to_local(&self, p: Point) -> Point {
        (p - self.translation).rotate(-self.angle).to_point()
    }
}

/// Free-function form of [`Transform::to_local`].
pub fn to_local(t: &Transform, p: Point) -> Point {
    t.to_local(p)
}

/// Free-function form of [`Transform::to_world`].
pub fn to_world(t: &Transform, p: Point) -> Point {
    t.to_world(p)
}

/// Euclidean distance from `p` to the closed segment `ab`.
///
/// The endpoints are put in a canonical order first so the result is exactly
/// symmetric in `a` and `b`.
pub fn distance_point_segment(a: Point, b: Point, p: Point) -> f64 {
    let (a, b) = if (a.x, a.y) <= (b.x, b.y) { (a, b) } else { (b, a) };
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Strictly convex polygon, counterclockwise in math orientation
/// (positive signed area under `cross`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygonShape {
    vertices: Vec<Point>,
}

impl ConvexPolygonShape {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        validate_convex(&vertices)?;
        Ok(ConvexPolygonShape { vertices })
    }

    /// Axis-aligned rectangle with corners `(0,0)` and `(width,height)`.
    pub fn rectangle(width: f64, height: f64) -> Result<Self, GeometryError> {
        Self::new(vec![
            Point::new(0.0, 0.0),
            Point::new(width, 0.0),
            Point::new(width, height),
            Point::new(0.0, height),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn contains(&self, p: Point) -> bool {
        self.edges().all(|(a, b)| {
            let edge = b - a;
            edge.cross(p - a) / edge.length() >= -EPSILON
        })
    }

    /// Mean of the vertices.
    pub fn vertex_centroid(&self) -> Point {
        vertex_centroid(&self.vertices)
    }
}

pub fn vertex_centroid(vertices: &[Point]) -> Point {
    let n = vertices.len() as f64;
    let (sx, sy) = vertices.iter().fold((0.0, 0.0), |(sx, sy), v| (sx + v.x, sy + v.y));
    Point::new(sx / n, sy / n)
}

/// Checks the convex polygon invariants without building a shape.
pub fn validate_convex(vertices: &[Point]) -> Result<(), GeometryError> {
    let n = vertices.len();
    if n < 3 {
        return Err(GeometryError::TooFewVertices(n));
    }
    for v in vertices {
        Point::try_new(v.x, v.y)?;
    }
    for i in 0..n {
        if vertices[i].distance(vertices[(i + 1) % n]) <= EPSILON {
            return Err(GeometryError::DuplicateVertex(i));
        }
    }
    // every turn strictly left, and the turns add up to one full revolution
    // (rejects self-intersecting stars whose turns are all left)
    let mut turning = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let e1 = b - a;
        let e2 = c - b;
        let cross = e1.cross(e2);
        if cross / (e1.length() * e2.length()) <= EPSILON {
            return Err(GeometryError::NotConvex);
        }
        turning += cross.atan2(e1.dot(e2));
    }
    if (turning - TAU).abs() > 1e-6 {
        return Err(GeometryError::NotConvex);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleShape {
    pub center: Point,
    radius: f64,
}

impl CircleShape {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::BadRadius(radius));
        }
        Ok(CircleShape { center, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, p: Point) -> bool {
        p.distance(self.center) <= self.radius + EPSILON
    }
}

/// Segment with rounded ends (a capsule). Coincident endpoints make a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripShape {
    pub a: Point,
    pub b: Point,
    radius: f64,
}

impl StripShape {
    pub fn new(a: Point, b: Point, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::BadRadius(radius));
        }
        Ok(StripShape { a, b, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, p: Point) -> bool {
        distance_point_segment(self.a, self.b, p) <= self.radius + EPSILON
    }
}

pub fn contains_polygon(shape: &ConvexPolygonShape, p: Point) -> bool {
    shape.contains(p)
}

pub fn contains_circle(shape: &CircleShape, p: Point) -> bool {
    shape.contains(p)
}

pub fn contains_strip(shape: &StripShape, p: Point) -> bool {
    shape.contains(p)
}
