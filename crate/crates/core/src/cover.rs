//! Invisible covers.
//!
//! A cover is an ordered list of nodes laid over an object in its local
//! coordinates. Each node is a convex polygon, a circle or a rounded strip,
//! and either moves the whole object or drives one resize handle. Nodes may
//! overlap freely; the first node in list order that contains the pointer
//! wins. Builders therefore list handles before the interior node.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{
    distance_point_segment, vertex_centroid, CircleShape, ConvexPolygonShape, GeometryError,
    Point, StripShape,
};

/// Thickness of the grab band along an object's border, in pixels.
pub const DEFAULT_BORDER: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error("cover has no nodes")]
    Empty,
    #[error("cover has no move node")]
    NotMovable,
    #[error("dimensions must be positive and finite")]
    BadDimensions,
    #[error("border {border} out of range for this shape (max {max})")]
    BadBorder { border: f64, max: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Names what a resize node reshapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HandleId {
    Left,
    Right,
    Top,
    Bottom,
    CornerNW,
    CornerNE,
    CornerSE,
    CornerSW,
    Radial,
    Vertex(usize),
    Edge(usize),
}

impl fmt::Display for HandleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HandleId::Left => f.write_str("left"),
            HandleId::Right => f.write_str("right"),
            HandleId::Top => f.write_str("top"),
            HandleId::Bottom => f.write_str("bottom"),
            HandleId::CornerNW => f.write_str("corner-NW"),
            HandleId::CornerNE => f.write_str("corner-NE"),
            HandleId::CornerSE => f.write_str("corner-SE"),
            HandleId::CornerSW => f.write_str("corner-SW"),
            HandleId::Radial => f.write_str("radial"),
            HandleId::Vertex(i) => write!(f, "vertex({i})"),
            HandleId::Edge(i) => write!(f, "edge({i})"),
        }
    }
}

impl FromStr for HandleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let indexed = |prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)?.strip_suffix(')')?.parse().ok()
        };
        Ok(match s {
            "left" => HandleId::Left,
            "right" => HandleId::Right,
            "top" => HandleId::Top,
            "bottom" => HandleId::Bottom,
            "corner-NW" => HandleId::CornerNW,
            "corner-NE" => HandleId::CornerNE,
            "corner-SE" => HandleId::CornerSE,
            "corner-SW" => HandleId::CornerSW,
            "radial" => HandleId::Radial,
            _ => {
                if let Some(i) = indexed("vertex(") {
                    HandleId::Vertex(i)
                } else if let Some(i) = indexed("edge(") {
                    HandleId::Edge(i)
                } else {
                    return Err(format!("unknown handle `{s}`"));
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeAction {
    MoveWhole,
    Resize(HandleId),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeShape {
    Polygon(ConvexPolygonShape),
    Circle(CircleShape),
    Strip(StripShape),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub shape: NodeShape,
    pub action: NodeAction,
}

impl Node {
    pub fn new(shape: NodeShape, action: NodeAction) -> Self {
        Node { shape, action }
    }

    pub fn contains(&self, p_local: Point) -> bool {
        match &self.shape {
            NodeShape::Polygon(s) => s.contains(p_local),
            NodeShape::Circle(s) => s.contains(p_local),
            NodeShape::Strip(s) => s.contains(p_local),
        }
    }
}

pub fn node_contains(node: &Node, p_local: Point) -> bool {
    node.contains(p_local)
}

/// Ordered node list; the order is the hit priority.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    nodes: Vec<Node>,
}

impl Cover {
    pub fn new(nodes: Vec<Node>) -> Result<Self, CoverError> {
        if nodes.is_empty() {
            return Err(CoverError::Empty);
        }
        if !nodes.iter().any(|n| n.action == NodeAction::MoveWhole) {
            return Err(CoverError::NotMovable);
        }
        Ok(Cover { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> Option<&Node> {
        self.nodes.get(index)
    }

    /// Index of the first node containing the point.
    pub fn hit(&self, p_local: Point) -> Option<usize> {
        self.nodes.iter().position(|n| n.contains(p_local))
    }
}

pub fn cover_hit(cover: &Cover, p_local: Point) -> Option<usize> {
    cover.hit(p_local)
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// Cover for the rectangle `(0,0)..(width,height)`: corner discs, then edge
/// strips, then the interior.
pub fn rect_cover(width: f64, height: f64, border: f64) -> Result<Cover, CoverError> {
    if !positive(width) || !positive(height) {
        return Err(CoverError::BadDimensions);
    }
    let max = width.min(height) / 2.0;
    if !positive(border) || border > max {
        return Err(CoverError::BadBorder { border, max });
    }
    let nw = Point::new(0.0, 0.0);
    let ne = Point::new(width, 0.0);
    let se = Point::new(width, height);
    let sw = Point::new(0.0, height);

    let mut nodes = Vec::with_capacity(9);
    for (corner, handle) in [
        (nw, HandleId::CornerNW),
        (ne, HandleId::CornerNE),
        (se, HandleId::CornerSE),
        (sw, HandleId::CornerSW),
    ] {
        nodes.push(Node::new(
            NodeShape::Circle(CircleShape::new(corner, border)?),
            NodeAction::Resize(handle),
        ));
    }
    for (a, b, handle) in [
        (nw, sw, HandleId::Left),
        (ne, se, HandleId::Right),
        (nw, ne, HandleId::Top),
        (sw, se, HandleId::Bottom),
    ] {
        nodes.push(Node::new(
            NodeShape::Strip(StripShape::new(a, b, border)?),
            NodeAction::Resize(handle),
        ));
    }
    nodes.push(Node::new(
        NodeShape::Polygon(ConvexPolygonShape::rectangle(width, height)?),
        NodeAction::MoveWhole,
    ));
    Cover::new(nodes)
}

/// Cover for a disc centered on the local origin. The ring between
/// `radius - border` and `radius` resizes; the inner disc moves.
pub fn circle_cover(radius: f64, border: f64) -> Result<Cover, CoverError> {
    if !positive(radius) {
        return Err(CoverError::BadDimensions);
    }
    if !positive(border) || border >= radius {
        return Err(CoverError::BadBorder { border, max: radius });
    }
    Cover::new(vec![
        Node::new(
            NodeShape::Circle(CircleShape::new(Point::ORIGIN, radius - border)?),
            NodeAction::MoveWhole,
        ),
        Node::new(
            NodeShape::Circle(CircleShape::new(Point::ORIGIN, radius)?),
            NodeAction::Resize(HandleId::Radial),
        ),
    ])
}

/// Cover for a convex polygon: vertex discs, edge strips, then the interior.
/// Edge `i` runs from vertex `i` to vertex `i + 1`.
pub fn polygon_cover(vertices: &[Point], border: f64) -> Result<Cover, CoverError> {
    let polygon = ConvexPolygonShape::new(vertices.to_vec())?;
    if !positive(border) {
        return Err(CoverError::BadBorder { border, max: f64::INFINITY });
    }
    let n = vertices.len();
    let mut nodes = Vec::with_capacity(2 * n + 1);
    for (i, v) in vertices.iter().enumerate() {
        nodes.push(Node::new(
            NodeShape::Circle(CircleShape::new(*v, border)?),
            NodeAction::Resize(HandleId::Vertex(i)),
        ));
    }
    for (i, (a, b)) in polygon.edges().enumerate() {
        nodes.push(Node::new(
            NodeShape::Strip(StripShape::new(a, b, border)?),
            NodeAction::Resize(HandleId::Edge(i)),
        ));
    }
    nodes.push(Node::new(NodeShape::Polygon(polygon), NodeAction::MoveWhole));
    Cover::new(nodes)
}

/// Grab band used for a rectangle of the given size. Shrinks below the
/// default on small rectangles so the interior stays reachable.
pub fn rect_band(width: f64, height: f64) -> f64 {
    DEFAULT_BORDER.min(width.min(height) / 4.0)
}

pub fn circle_band(radius: f64) -> f64 {
    DEFAULT_BORDER.min(radius / 2.0)
}

/// Half the distance from the vertex centroid to the nearest edge, capped at
/// the default band.
pub fn polygon_band(vertices: &[Point]) -> f64 {
    let c = vertex_centroid(vertices);
    let n = vertices.len();
    let inradius = (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let e = b - a;
            (e.cross(c - a) / e.length()).abs()
        })
        .fold(f64::INFINITY, f64::min);
    // distance to the edge *line*; segments can only be farther
    debug_assert!(
        (0..n).all(|i| distance_point_segment(vertices[i], vertices[(i + 1) % n], c) >= inradius - 1e-9)
    );
    DEFAULT_BORDER.min(inradius / 2.0)
}
