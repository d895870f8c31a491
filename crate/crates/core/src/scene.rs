//! The world model: z-ordered objects, the parallel world, groups and the
//! render list handed to clients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::canonical::round6;
use crate::cover::{
    circle_band, circle_cover, polygon_band, polygon_cover, rect_band, rect_cover, Cover,
    CoverError,
};
use crate::geometry::{validate_convex, vertex_centroid, Point, Transform, Vector};
use crate::persistence::{self, LayoutSnapshot};

pub const MIN_RECT_SIDE: f64 = 10.0;
pub const MIN_CIRCLE_RADIUS: f64 = 5.0;
pub const MIN_POLYGON_CIRCUMRADIUS: f64 = 5.0;
pub const MIN_FONT_SIZE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("unknown object `{0}`")]
    UnknownId(String),
    #[error("object `{0}` is not visible")]
    NotVisible(String),
    #[error("object `{0}` is not in the parallel world")]
    NotHidden(String),
    #[error("duplicate object id `{0}`")]
    DuplicateId(String),
    #[error("invalid style {key}: {reason}")]
    InvalidStyle { key: String, reason: String },
    #[error("invalid size for `{id}`: {reason}")]
    InvalidSize { id: String, reason: String },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectKind {
    Rect,
    Circle,
    Polygon,
    LabeledField,
}

impl ObjectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Rect => "rect",
            ObjectKind::Circle => "circle",
            ObjectKind::Polygon => "polygon",
            ObjectKind::LabeledField => "labeled-field",
        }
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rect" => Ok(ObjectKind::Rect),
            "circle" => Ok(ObjectKind::Circle),
            "polygon" => Ok(ObjectKind::Polygon),
            "labeled-field" => Ok(ObjectKind::LabeledField),
            _ => Err(format!("unknown object kind `{s}`")),
        }
    }
}

/// Kind-specific dimensions, in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum SizeParams {
    /// Rectangle spanning `(0,0)..(width,height)`.
    Rect { width: f64, height: f64 },
    /// Disc centered on the local origin.
    Circle { radius: f64 },
    Polygon { vertices: Vec<Point> },
}

impl SizeParams {
    fn matches(&self, kind: ObjectKind) -> bool {
        matches!(
            (kind, self),
            (ObjectKind::Rect | ObjectKind::LabeledField, SizeParams::Rect { .. })
                | (ObjectKind::Circle, SizeParams::Circle { .. })
                | (ObjectKind::Polygon, SizeParams::Polygon { .. })
        )
    }

    /// Rotation pivot in local coordinates: the shape's center.
    pub fn pivot(&self) -> Vector {
        match self {
            SizeParams::Rect { width, height } => Vector::new(width / 2.0, height / 2.0),
            SizeParams::Circle { .. } => Vector::ZERO,
            SizeParams::Polygon { vertices } => vertex_centroid(vertices).to_vector(),
        }
    }

    /// Checks per-kind minimums and shape validity.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            SizeParams::Rect { width, height } => {
                if !(width.is_finite() && height.is_finite()) {
                    return Err("non-finite size".into());
                }
                if *width < MIN_RECT_SIDE || *height < MIN_RECT_SIDE {
                    return Err(format!("rectangle smaller than {MIN_RECT_SIDE}x{MIN_RECT_SIDE}"));
                }
            }
            SizeParams::Circle { radius } => {
                if !radius.is_finite() || *radius < MIN_CIRCLE_RADIUS {
                    return Err(format!("radius below {MIN_CIRCLE_RADIUS}"));
                }
            }
            SizeParams::Polygon { vertices } => {
                validate_convex(vertices).map_err(|e| e.to_string())?;
                // must stay valid after the six-decimal rounding of a saved layout
                let rounded: Vec<Point> =
                    vertices.iter().map(|v| Point::new(round6(v.x), round6(v.y))).collect();
                validate_convex(&rounded).map_err(|e| format!("{e} after rounding"))?;
                if polygon_circumradius(vertices) < MIN_POLYGON_CIRCUMRADIUS {
                    return Err(format!("circumradius below {MIN_POLYGON_CIRCUMRADIUS}"));
                }
            }
        }
        Ok(())
    }

    fn build_cover(&self) -> Result<Cover, CoverError> {
        match self {
            SizeParams::Rect { width, height } => {
                rect_cover(*width, *height, rect_band(*width, *height))
            }
            SizeParams::Circle { radius } => circle_cover(*radius, circle_band(*radius)),
            SizeParams::Polygon { vertices } => polygon_cover(vertices, polygon_band(vertices)),
        }
    }
}

/// Largest distance from the vertex centroid to a vertex.
pub fn polygon_circumradius(vertices: &[Point]) -> f64 {
    let c = vertex_centroid(vertices);
    vertices.iter().map(|v| v.distance(c)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rgb(pub [u8; 3]);

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [r, g, b] = self.0;
        write!(f, "#{r:02x}{g:02x}{b:02x}")
    }
}

impl FromStr for Rgb {
    type Err = String;

    /// Accepts `#rrggbb` or `r,g,b`.
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid color `{s}`");
        if let Some(hex) = s.strip_prefix('#') {
            if hex.len() != 6 || !hex.is_ascii() {
                return Err(bad());
            }
            let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
            return Ok(Rgb([channel(0)?, channel(2)?, channel(4)?]));
        }
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut rgb = [0u8; 3];
        for (slot, part) in rgb.iter_mut().zip(parts) {
            *slot = part.trim().parse().map_err(|_| bad())?;
        }
        Ok(Rgb(rgb))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StyleKey {
    FillColor,
    TextColor,
    FontSize,
    Text,
}

impl StyleKey {
    pub fn as_str(self) -> &'static str {
        match self {
            StyleKey::FillColor => "fill_color",
            StyleKey::TextColor => "text_color",
            StyleKey::FontSize => "font_size",
            StyleKey::Text => "text",
        }
    }
}

impl FromStr for StyleKey {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fill_color" => Ok(StyleKey::FillColor),
            "text_color" => Ok(StyleKey::TextColor),
            "font_size" => Ok(StyleKey::FontSize),
            "text" => Ok(StyleKey::Text),
            _ => Err(format!("unknown style key `{s}`")),
        }
    }
}

/// User-controllable visibility parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleParams {
    pub fill_color: Rgb,
    pub text_color: Rgb,
    /// Points.
    pub font_size: f64,
    pub text: String,
}

impl Default for StyleParams {
    fn default() -> Self {
        StyleParams {
            fill_color: Rgb([255, 255, 255]),
            text_color: Rgb([0, 0, 0]),
            font_size: 12.0,
            text: String::new(),
        }
    }
}

impl StyleParams {
    pub fn validate(&self) -> Result<(), SceneError> {
        if !self.font_size.is_finite() || self.font_size < MIN_FONT_SIZE {
            return Err(SceneError::InvalidStyle {
                key: "font_size".into(),
                reason: format!("{} is below the minimum {MIN_FONT_SIZE}", self.font_size),
            });
        }
        Ok(())
    }

    /// Parses `value` for `key` and applies it; leaves `self` untouched on error.
    pub fn set(&mut self, key: StyleKey, value: &str) -> Result<(), SceneError> {
        let invalid = |reason: String| SceneError::InvalidStyle { key: key.as_str().into(), reason };
        match key {
            StyleKey::FillColor => self.fill_color = value.parse().map_err(invalid)?,
            StyleKey::TextColor => self.text_color = value.parse().map_err(invalid)?,
            StyleKey::FontSize => {
                let size: f64 = value
                    .parse()
                    .map_err(|_| invalid(format!("`{value}` is not a number")))?;
                if !size.is_finite() || size < MIN_FONT_SIZE {
                    return Err(invalid(format!("{value} is below the minimum {MIN_FONT_SIZE}")));
                }
                self.font_size = size;
            }
            StyleKey::Text => self.text = value.to_string(),
        }
        Ok(())
    }
}

/// A screen element the user can move, resize, rotate, restyle and hide.
///
/// `transform.translation` is the world position of the local origin before
/// rotation; `transform.angle` turns the object about its pivot (the shape
/// center). Rotating therefore never touches the translation.
#[derive(Debug, Clone, PartialEq)]
pub struct MovableObject {
    id: String,
    kind: ObjectKind,
    transform: Transform,
    size: SizeParams,
    pub style: StyleParams,
    cover: Cover,
}

impl MovableObject {
    pub fn new(
        id: impl Into<String>,
        kind: ObjectKind,
        transform: Transform,
        size: SizeParams,
        style: StyleParams,
    ) -> Result<Self, SceneError> {
        let id = id.into();
        if !size.matches(kind) {
            return Err(SceneError::InvalidSize { id, reason: format!("size does not fit kind {kind}") });
        }
        size.validate().map_err(|reason| SceneError::InvalidSize { id: id.clone(), reason })?;
        style.validate()?;
        let cover = size.build_cover()?;
        Ok(MovableObject { id, kind, transform, size, style, cover })
    }

    pub fn rect(id: &str, top_left: Point, width: f64, height: f64, style: StyleParams) -> Result<Self, SceneError> {
        Self::new(id, ObjectKind::Rect, Transform::translation(top_left), SizeParams::Rect { width, height }, style)
    }

    pub fn labeled_field(id: &str, top_left: Point, width: f64, height: f64, style: StyleParams) -> Result<Self, SceneError> {
        Self::new(
            id,
            ObjectKind::LabeledField,
            Transform::translation(top_left),
            SizeParams::Rect { width, height },
            style,
        )
    }

    pub fn circle(id: &str, center: Point, radius: f64, style: StyleParams) -> Result<Self, SceneError> {
        Self::new(id, ObjectKind::Circle, Transform::translation(center), SizeParams::Circle { radius }, style)
    }

    pub fn polygon(id: &str, origin: Point, vertices: Vec<Point>, style: StyleParams) -> Result<Self, SceneError> {
        Self::new(id, ObjectKind::Polygon, Transform::translation(origin), SizeParams::Polygon { vertices }, style)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> ObjectKind {
        self.kind
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn translation(&self) -> Point {
        self.transform.translation
    }

    pub fn angle(&self) -> f64 {
        self.transform.angle()
    }

    pub fn size(&self) -> &SizeParams {
        &self.size
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn set_translation(&mut self, translation: Point) {
        self.transform.translation = translation;
    }

    pub fn set_angle(&mut self, angle: f64) {
        self.transform.set_angle(angle);
    }

    /// Replaces the size parameters and rebuilds the cover.
    pub fn set_size(&mut self, size: SizeParams) -> Result<(), SceneError> {
        if !size.matches(self.kind) {
            return Err(SceneError::InvalidSize {
                id: self.id.clone(),
                reason: format!("size does not fit kind {}", self.kind),
            });
        }
        size.validate()
            .map_err(|reason| SceneError::InvalidSize { id: self.id.clone(), reason })?;
        self.cover = size.build_cover()?;
        self.size = size;
        Ok(())
    }

    pub fn pivot(&self) -> Vector {
        self.size.pivot()
    }

    /// Rigid transform mapping local coordinates to world coordinates.
    pub fn world_transform(&self) -> Transform {
        let angle = self.transform.angle();
        let shift = -self.pivot().rotate_minus_identity(angle);
        Transform::new(self.transform.translation + shift, angle)
    }

    /// World position of the pivot; unaffected by rotation.
    pub fn center(&self) -> Point {
        self.transform.translation + self.pivot()
    }

    pub fn to_local(&self, p_world: Point) -> Point {
        self.world_transform().to_local(p_world)
    }

    pub fn to_world(&self, p_local: Point) -> Point {
        self.world_transform().to_world(p_local)
    }

    /// World-space outline of the object itself (not of its cover).
    pub fn outline(&self) -> Outline {
        let t = self.world_transform();
        match &self.size {
            SizeParams::Rect { width, height } => Outline::Polygon(
                [(0.0, 0.0), (*width, 0.0), (*width, *height), (0.0, *height)]
                    .into_iter()
                    .map(|(x, y)| t.to_world(Point::new(x, y)))
                    .collect(),
            ),
            SizeParams::Circle { radius } => Outline::Circle {
                center: t.to_world(Point::ORIGIN),
                radius: *radius,
            },
            SizeParams::Polygon { vertices } => {
                Outline::Polygon(vertices.iter().map(|v| t.to_world(*v)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outline {
    Polygon(Vec<Point>),
    Circle { center: Point, radius: f64 },
}

/// What a client paints for one visible object.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderItem {
    pub id: String,
    pub z: usize,
    pub kind: ObjectKind,
    pub outline: Outline,
    pub style: StyleParams,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupMode {
    /// Every member moves by the same delta, whichever member is grabbed.
    Synchronous,
    /// Dependents sit at `master + offset`.
    Related { master: String, offsets: BTreeMap<String, Vector> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    pub members: BTreeSet<String>,
    pub mode: GroupMode,
}

impl GroupSpec {
    pub fn synchronous<I, S>(members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        GroupSpec {
            members: members.into_iter().map(Into::into).collect(),
            mode: GroupMode::Synchronous,
        }
    }

    pub fn related(master: impl Into<String>, offsets: BTreeMap<String, Vector>) -> Self {
        let master = master.into();
        let mut members: BTreeSet<String> = offsets.keys().cloned().collect();
        members.insert(master.clone());
        GroupSpec { members, mode: GroupMode::Related { master, offsets } }
    }

    pub fn master(&self) -> Option<&str> {
        match &self.mode {
            GroupMode::Related { master, .. } => Some(master),
            GroupMode::Synchronous => None,
        }
    }

    pub(crate) fn validate(&self, exists: impl Fn(&str) -> bool) -> Result<(), SceneError> {
        if let Some(missing) = self.members.iter().find(|m| !exists(m)) {
            return Err(SceneError::InvalidGroup(format!("member `{missing}` does not exist")));
        }
        match &self.mode {
            GroupMode::Synchronous if self.members.len() < 2 => Err(SceneError::InvalidGroup(
                "a synchronous group needs at least two members".into(),
            )),
            GroupMode::Synchronous => Ok(()),
            GroupMode::Related { master, offsets } => {
                let expected: BTreeSet<&String> =
                    offsets.keys().chain(std::iter::once(master)).collect();
                if offsets.contains_key(master) || expected != self.members.iter().collect() {
                    return Err(SceneError::InvalidGroup(format!(
                        "related group of `{master}` has inconsistent members"
                    )));
                }
                if offsets.values().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
                    return Err(SceneError::InvalidGroup("non-finite offset".into()));
                }
                Ok(())
            }
        }
    }
}

/// Builds a scene and captures its default layout.
#[derive(Debug, Default)]
pub struct SceneBuilder {
    objects: Vec<MovableObject>,
    hidden: Vec<MovableObject>,
    groups: Vec<GroupSpec>,
    related: Vec<(String, Vec<String>)>,
}

impl SceneBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a visible object above everything added before.
    pub fn object(mut self, object: MovableObject) -> Self {
        self.objects.push(object);
        self
    }

    /// Adds an object that starts in the parallel world.
    pub fn hidden(mut self, object: MovableObject) -> Self {
        self.hidden.push(object);
        self
    }

    pub fn synchronous<I, S>(mut self, members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.groups.push(GroupSpec::synchronous(members));
        self
    }

    /// Attaches dependents to a master at their current relative offsets.
    pub fn related<I, S>(mut self, master: &str, dependents: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.related
            .push((master.to_string(), dependents.into_iter().map(Into::into).collect()));
        self
    }

    pub fn build(self) -> Result<Scene, SceneError> {
        let mut scene = Scene {
            visible: self.objects,
            parallel_world: BTreeMap::new(),
            groups: self.groups,
            default_layout: LayoutSnapshot::empty(),
        };
        let mut seen = BTreeSet::new();
        for o in &scene.visible {
            if !seen.insert(o.id.clone()) {
                return Err(SceneError::DuplicateId(o.id.clone()));
            }
        }
        for o in self.hidden {
            if !seen.insert(o.id.clone()) {
                return Err(SceneError::DuplicateId(o.id.clone()));
            }
            scene.parallel_world.insert(o.id.clone(), o);
        }
        for (master, dependents) in self.related {
            let anchor = scene.object(&master)?.translation();
            let mut offsets = BTreeMap::new();
            for dep in dependents {
                let offset = scene.object(&dep)?.translation() - anchor;
                offsets.insert(dep, offset);
            }
            scene.groups.push(GroupSpec::related(master, offsets));
        }
        for g in &scene.groups {
            g.validate(|id| seen.contains(id))?;
        }
        scene.default_layout = persistence::snapshot(&scene);
        Ok(scene)
    }
}

/// Visible objects in z-order (last is topmost) plus the parallel world.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub(crate) visible: Vec<MovableObject>,
    pub(crate) parallel_world: BTreeMap<String, MovableObject>,
    pub(crate) groups: Vec<GroupSpec>,
    pub(crate) default_layout: LayoutSnapshot,
}

impl Scene {
    pub fn builder() -> SceneBuilder {
        SceneBuilder::new()
    }

    pub fn empty() -> Scene {
        SceneBuilder::new().build().expect("empty scene is valid")
    }

    /// Visible objects, bottom first.
    pub fn visible(&self) -> &[MovableObject] {
        &self.visible
    }

    pub fn parallel_world(&self) -> &BTreeMap<String, MovableObject> {
        &self.parallel_world
    }

    pub fn groups(&self) -> &[GroupSpec] {
        &self.groups
    }

    pub fn default_layout(&self) -> &LayoutSnapshot {
        &self.default_layout
    }

    pub fn visible_ids(&self) -> Vec<&str> {
        self.visible.iter().map(|o| o.id()).collect()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.is_visible(id) || self.parallel_world.contains_key(id)
    }

    pub fn is_visible(&self, id: &str) -> bool {
        self.visible_index(id).is_some()
    }

    pub(crate) fn visible_index(&self, id: &str) -> Option<usize> {
        self.visible.iter().position(|o| o.id == id)
    }

    /// Looks an object up on either side of the screen.
    pub fn object(&self, id: &str) -> Result<&MovableObject, SceneError> {
        self.visible
            .iter()
            .find(|o| o.id == id)
            .or_else(|| self.parallel_world.get(id))
            .ok_or_else(|| SceneError::UnknownId(id.to_string()))
    }

    pub fn object_mut(&mut self, id: &str) -> Result<&mut MovableObject, SceneError> {
        if let Some(i) = self.visible_index(id) {
            return Ok(&mut self.visible[i]);
        }
        self.parallel_world
            .get_mut(id)
            .ok_or_else(|| SceneError::UnknownId(id.to_string()))
    }

    pub(crate) fn visible_mut(&mut self, id: &str) -> Option<&mut MovableObject> {
        self.visible.iter_mut().find(|o| o.id == id)
    }

    /// Topmost object whose cover contains the point, with the node index.
    pub fn hit_test(&self, p_world: Point) -> Option<(&str, usize)> {
        self.visible
            .iter()
            .rev()
            .find_map(|o| o.cover.hit(o.to_local(p_world)).map(|i| (o.id(), i)))
    }

    pub fn bring_to_top(&mut self, id: &str) -> Result<(), SceneError> {
        let i = self.visible_index(id).ok_or_else(|| self.not_visible(id))?;
        let object = self.visible.remove(i);
        self.visible.push(object);
        Ok(())
    }

    fn not_visible(&self, id: &str) -> SceneError {
        if self.parallel_world.contains_key(id) {
            SceneError::NotVisible(id.to_string())
        } else {
            SceneError::UnknownId(id.to_string())
        }
    }

    /// Visible dependents of related groups mastered by `id`, in id order.
    fn related_dependents(&self, id: &str) -> Vec<String> {
        let mut deps = BTreeSet::new();
        for g in &self.groups {
            if let GroupMode::Related { master, offsets } = &g.mode {
                if master == id {
                    deps.extend(offsets.keys().cloned());
                }
            }
        }
        deps.remove(id);
        deps.into_iter().collect()
    }

    /// Moves the object, with full state, into the parallel world. Visible
    /// dependents of a related group it masters go with it.
    pub fn hide_object(&mut self, id: &str) -> Result<(), SceneError> {
        let i = self.visible_index(id).ok_or_else(|| self.not_visible(id))?;
        let object = self.visible.remove(i);
        self.parallel_world.insert(object.id.clone(), object);
        for dep in self.related_dependents(id) {
            if let Some(j) = self.visible_index(&dep) {
                let object = self.visible.remove(j);
                self.parallel_world.insert(dep, object);
            }
        }
        Ok(())
    }

    /// Returns a hidden object to the top of the z-order, exactly as it was
    /// hidden. Hidden dependents of a related group it masters return too,
    /// stacked above it.
    pub fn restore_object(&mut self, id: &str) -> Result<(), SceneError> {
        let object = self.parallel_world.remove(id).ok_or_else(|| {
            if self.is_visible(id) {
                SceneError::NotHidden(id.to_string())
            } else {
                SceneError::UnknownId(id.to_string())
            }
        })?;
        self.visible.push(object);
        for dep in self.related_dependents(id) {
            if let Some(object) = self.parallel_world.remove(&dep) {
                self.visible.push(object);
            }
        }
        Ok(())
    }

    /// Changes exactly one style parameter. Works on hidden objects too.
    pub fn set_style(&mut self, id: &str, key: StyleKey, value: &str) -> Result<(), SceneError> {
        self.object_mut(id)?.style.set(key, value)
    }

    pub fn render_list(&self) -> Vec<RenderItem> {
        self.visible
            .iter()
            .enumerate()
            .map(|(z, o)| RenderItem {
                id: o.id.clone(),
                z,
                kind: o.kind,
                outline: o.outline(),
                style: o.style.clone(),
            })
            .collect()
    }
}
