//! The grab state machine.
//!
//! A left press on a move node starts forward movement, a left press on a
//! resize node starts resizing through that node's handle, and a right press
//! anywhere on an object starts rotation about the object's center. Every
//! move event is applied to the scene immediately and literally: no snapping,
//! no smoothing, no alignment.

use std::collections::{BTreeMap, BTreeSet};

use crate::cover::{HandleId, NodeAction};
use crate::geometry::{Point, Transform, Vector, EPSILON};
use crate::scene::{GroupMode, MovableObject, Scene, SizeParams, MIN_CIRCLE_RADIUS, MIN_RECT_SIDE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Button {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointerEvent {
    Press { position: Point, button: Button },
    Move { position: Point },
    Release { position: Option<Point> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrabMode {
    Move,
    Resize(HandleId),
    Rotate,
}

/// Everything captured at press time that later move events are measured
/// against.
#[derive(Debug, Clone, PartialEq)]
pub struct GrabState {
    pub object_id: String,
    pub node_index: usize,
    pub mode: GrabMode,
    pub press_world: Point,
    /// Object translation minus press point.
    pub press_offset: Vector,
    pub start_angle: f64,
    pub start_transform: Transform,
    pub start_size: SizeParams,
    /// World position of the object's pivot at press time.
    pub start_center: Point,
    /// Synchronous-group companions and their translation minus press point.
    pub companions: Vec<(String, Vector)>,
}

/// Starts a grab if the press lands on a visible object.
pub fn on_press(scene: &mut Scene, p: Point, button: Button, auto_raise: bool) -> Option<GrabState> {
    let (id, node_index) = scene.hit_test(p).map(|(id, i)| (id.to_string(), i))?;
    if auto_raise {
        scene.bring_to_top(&id).expect("hit object is visible");
    }
    let object = scene.object(&id).expect("hit object exists");
    let mode = match button {
        Button::Right => GrabMode::Rotate,
        Button::Left => match object.cover().nodes()[node_index].action {
            NodeAction::MoveWhole => GrabMode::Move,
            NodeAction::Resize(handle) => GrabMode::Resize(handle),
        },
    };
    let companions = if mode == GrabMode::Move {
        synchronous_companions(scene, &id)
            .into_iter()
            .map(|m| {
                let offset = scene.object(&m).expect("member exists").translation() - p;
                (m, offset)
            })
            .collect()
    } else {
        Vec::new()
    };
    Some(GrabState {
        node_index,
        mode,
        press_world: p,
        press_offset: object.translation() - p,
        start_angle: object.angle(),
        start_transform: *object.transform(),
        start_size: object.size().clone(),
        start_center: object.center(),
        companions,
        object_id: id,
    })
}

/// Visible members of every synchronous group reachable from `id`, excluding
/// `id` itself.
fn synchronous_companions(scene: &Scene, id: &str) -> Vec<String> {
    let mut reached = BTreeSet::from([id.to_string()]);
    let mut frontier = vec![id.to_string()];
    while let Some(current) = frontier.pop() {
        for g in scene.groups() {
            if g.mode == GroupMode::Synchronous && g.members.contains(&current) {
                for m in &g.members {
                    if reached.insert(m.clone()) {
                        frontier.push(m.clone());
                    }
                }
            }
        }
    }
    reached.remove(id);
    reached.into_iter().filter(|m| scene.is_visible(m)).collect()
}

/// Forward movement: translation becomes `p + press_offset`, and each
/// synchronous companion keeps its own offset from the pointer.
pub fn apply_move(scene: &mut Scene, grab: &GrabState, p: Point) {
    let Some(object) = scene.visible_mut(&grab.object_id) else {
        return;
    };
    object.set_translation(p + grab.press_offset);
    let mut moved = vec![grab.object_id.clone()];
    for (id, offset) in &grab.companions {
        if let Some(companion) = scene.visible_mut(id) {
            companion.set_translation(p + *offset);
            moved.push(id.clone());
        }
    }
    propagate_translation(scene, &moved);
}

/// After objects changed translation: masters drag their dependents along,
/// and dependents that moved on their own are re-anchored.
fn propagate_translation(scene: &mut Scene, moved: &[String]) {
    let moved_set: BTreeSet<&str> = moved.iter().map(String::as_str).collect();
    let mut masters = Vec::new();
    let mut reanchor = Vec::new();
    for (gi, g) in scene.groups.iter().enumerate() {
        if let GroupMode::Related { master, offsets } = &g.mode {
            if moved_set.contains(master.as_str()) {
                masters.push(master.clone());
            } else {
                for dep in offsets.keys().filter(|d| moved_set.contains(d.as_str())) {
                    reanchor.push((gi, dep.clone()));
                }
            }
        }
    }
    for (gi, dep) in reanchor {
        let GroupMode::Related { master, .. } = &scene.groups[gi].mode else {
            unreachable!()
        };
        let offset = scene.object(&dep).expect("member").translation()
            - scene.object(master).expect("member").translation();
        if let GroupMode::Related { offsets, .. } = &mut scene.groups[gi].mode {
            offsets.insert(dep, offset);
        }
    }
    for master in masters {
        apply_related(scene, &master);
    }
}

/// Places every visible dependent of `master_id` at master translation plus
/// its stored offset, following chains of related groups.
pub fn apply_related(scene: &mut Scene, master_id: &str) {
    let mut done = BTreeSet::new();
    let mut pending = vec![master_id.to_string()];
    while let Some(master) = pending.pop() {
        if !done.insert(master.clone()) {
            continue;
        }
        let Ok(anchor) = scene.object(&master).map(MovableObject::translation) else {
            continue;
        };
        let placements: Vec<(String, Point)> = scene
            .groups
            .iter()
            .filter_map(|g| match &g.mode {
                GroupMode::Related { master: m, offsets } if *m == master => Some(offsets),
                _ => None,
            })
            .flat_map(|offsets| offsets.iter().map(|(dep, off)| (dep.clone(), anchor + *off)))
            .collect();
        for (dep, position) in placements {
            if let Some(object) = scene.visible_mut(&dep) {
                object.set_translation(position);
                pending.push(dep);
            }
        }
    }
}

/// Translation that keeps the start frame's geometry in place when the local
/// origin shifts by `origin` (in start-local coordinates) and the pivot moves
/// from `old_pivot` to `new_pivot`.
fn reanchored_translation(start: &Transform, origin: Vector, old_pivot: Vector, new_pivot: Vector) -> Point {
    let angle = start.angle();
    start.translation + origin + (origin + new_pivot - old_pivot).rotate_minus_identity(angle)
}

/// Rigid transform of the object as it was at press time.
fn start_world(grab: &GrabState) -> Transform {
    let angle = grab.start_transform.angle();
    let shift = -grab.start_size.pivot().rotate_minus_identity(angle);
    Transform::new(grab.start_transform.translation + shift, angle)
}

/// New rectangle extent along one axis: `(origin, length)`, with the far or
/// near side anchored and the length clamped to the minimum.
fn drag_side(length: f64, pointer: f64, moves_near_side: bool) -> (f64, f64) {
    if moves_near_side {
        let new_len = (length - pointer).max(MIN_RECT_SIDE);
        (length - new_len, new_len)
    } else {
        (0.0, pointer.max(MIN_RECT_SIDE))
    }
}

/// Reshapes the object through the grabbed handle, anchored on the opposite
/// side. Pointer positions that would break a minimum or convexity clamp
/// instead of failing.
pub fn apply_resize(scene: &mut Scene, grab: &GrabState, p: Point) {
    let GrabMode::Resize(handle) = grab.mode else {
        return;
    };
    let q = start_world(grab).to_local(p);
    let old_pivot = grab.start_size.pivot();

    let (origin, size) = match (&grab.start_size, handle) {
        (SizeParams::Rect { width, height }, _) => {
            use HandleId::*;
            let (horizontal, vertical) = match handle {
                Left => (Some(true), None),
                Right => (Some(false), None),
                Top => (None, Some(true)),
                Bottom => (None, Some(false)),
                CornerNW => (Some(true), Some(true)),
                CornerNE => (Some(false), Some(true)),
                CornerSE => (Some(false), Some(false)),
                CornerSW => (Some(true), Some(false)),
                _ => return,
            };
            let (ox, w) = horizontal.map_or((0.0, *width), |near| drag_side(*width, q.x, near));
            let (oy, h) = vertical.map_or((0.0, *height), |near| drag_side(*height, q.y, near));
            (Vector::new(ox, oy), SizeParams::Rect { width: w, height: h })
        }
        (SizeParams::Circle { .. }, HandleId::Radial) => {
            let radius = p.distance(grab.start_center).max(MIN_CIRCLE_RADIUS);
            (Vector::ZERO, SizeParams::Circle { radius })
        }
        (SizeParams::Polygon { vertices }, HandleId::Vertex(i)) if i < vertices.len() => {
            let mut moved = vertices.clone();
            moved[i] = q;
            (Vector::ZERO, SizeParams::Polygon { vertices: moved })
        }
        (SizeParams::Polygon { vertices }, HandleId::Edge(i)) if i < vertices.len() => {
            let j = (i + 1) % vertices.len();
            let edge = vertices[j] - vertices[i];
            let outward = Vector::new(edge.y, -edge.x) * (1.0 / edge.length());
            let shift = outward * (q - vertices[i]).dot(outward);
            let mut moved = vertices.clone();
            moved[i] = vertices[i] + shift;
            moved[j] = vertices[j] + shift;
            (Vector::ZERO, SizeParams::Polygon { vertices: moved })
        }
        _ => return,
    };
    // an invalid polygon keeps the last valid configuration
    if size.validate().is_err() {
        return;
    }

    let translation = reanchored_translation(&grab.start_transform, origin, old_pivot, size.pivot());
    let Some(object) = scene.visible_mut(&grab.object_id) else {
        return;
    };
    let before = object.translation();
    object.set_size(size).expect("validated size");
    object.set_translation(translation);
    if translation != before {
        propagate_translation(scene, std::slice::from_ref(&grab.object_id));
    }
}

/// Turns the object about its center by the angle the pointer swept since the
/// press. A pointer exactly on the center leaves the angle alone.
pub fn apply_rotate(scene: &mut Scene, grab: &GrabState, p: Point) {
    if grab.mode != GrabMode::Rotate {
        return;
    }
    let now = p - grab.start_center;
    if now.length() <= EPSILON {
        return;
    }
    let then = grab.press_world - grab.start_center;
    let angle = grab.start_angle + (now.angle() - then.angle());
    if let Some(object) = scene.visible_mut(&grab.object_id) {
        object.set_angle(angle);
    }
}

/// Holds the current grab between press and release.
#[derive(Debug, Clone)]
pub struct Manipulator {
    grab: Option<GrabState>,
    /// Raise the pressed object to the top before dragging.
    pub auto_raise: bool,
}

impl Default for Manipulator {
    fn default() -> Self {
        Manipulator { grab: None, auto_raise: true }
    }
}

impl Manipulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn grab(&self) -> Option<&GrabState> {
        self.grab.as_ref()
    }

    pub fn cancel(&mut self) {
        self.grab = None;
    }

    pub fn handle(&mut self, scene: &mut Scene, event: &PointerEvent) {
        match *event {
            PointerEvent::Press { position, button } => {
                self.on_press(scene, position, button);
            }
            PointerEvent::Move { position } => self.on_move(scene, position),
            PointerEvent::Release { .. } => self.on_release(),
        }
    }

    /// A press while already grabbing replaces the old grab.
    pub fn on_press(&mut self, scene: &mut Scene, p: Point, button: Button) -> Option<&GrabState> {
        self.grab = on_press(scene, p, button, self.auto_raise);
        self.grab.as_ref()
    }

    pub fn on_move(&mut self, scene: &mut Scene, p: Point) {
        let Some(grab) = &self.grab else {
            return;
        };
        if !scene.is_visible(&grab.object_id) {
            self.grab = None;
            return;
        }
        match grab.mode {
            GrabMode::Move => apply_move(scene, grab, p),
            GrabMode::Resize(_) => apply_resize(scene, grab, p),
            GrabMode::Rotate => apply_rotate(scene, grab, p),
        }
    }

    pub fn on_release(&mut self) {
        self.grab = None;
    }
}

/// Convenience for tests and scripts: the related-group offsets currently
/// stored for a master.
pub fn related_offsets(scene: &Scene, master_id: &str) -> BTreeMap<String, Vector> {
    scene
        .groups()
        .iter()
        .filter_map(|g| match &g.mode {
            GroupMode::Related { master, offsets } if master == master_id => Some(offsets.clone()),
            _ => None,
        })
        .flatten()
        .collect()
}
