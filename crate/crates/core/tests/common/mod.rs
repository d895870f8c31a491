#![allow(dead_code)]

use std::f64::consts::TAU;

use movable::geometry::Transform;
use movable::interaction::Button;
use movable::scene::{MovableObject, ObjectKind, Rgb, Scene, SizeParams, StyleKey, StyleParams};
use movable::session::{Command, SessionMessage};
use movable::{Point, PointerEvent, Vector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_style(rng: &mut ChaCha8Rng) -> StyleParams {
    StyleParams {
        fill_color: Rgb(rng.gen()),
        text_color: Rgb(rng.gen()),
        font_size: rng.gen_range(4.0..40.0),
        text: ["", "a", "hello world", "ünï\"code\n"].choose(rng).unwrap().to_string(),
    }
}

/// Points on a circle at sorted random angles: always strictly convex.
pub fn random_convex(rng: &mut ChaCha8Rng, radius: f64) -> Vec<Point> {
    let n = rng.gen_range(3..9);
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let min_gap = angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(angles[0] + TAU - angles[n - 1]))
            .fold(f64::INFINITY, f64::min);
        // keep the polygon well away from degenerate
        if min_gap < 0.3 {
            continue;
        }
        let v: Vec<Point> = angles.iter().map(|t| Point::new(radius * t.cos(), radius * t.sin())).collect();
        if (SizeParams::Polygon { vertices: v.clone() }).validate().is_ok() {
            return v;
        }
    }
}

pub fn random_object(rng: &mut ChaCha8Rng, id: &str, kind: ObjectKind) -> MovableObject {
    let position = Point::new(rng.gen_range(0.0..700.0), rng.gen_range(0.0..500.0));
    let angle = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..TAU) };
    let size = match kind {
        ObjectKind::Rect | ObjectKind::LabeledField => SizeParams::Rect {
            width: rng.gen_range(10.0..250.0),
            height: rng.gen_range(10.0..150.0),
        },
        ObjectKind::Circle => SizeParams::Circle { radius: rng.gen_range(5.0..100.0) },
        ObjectKind::Polygon => {
            let r = rng.gen_range(20.0..100.0);
            SizeParams::Polygon { vertices: random_convex(rng, r) }
        }
    };
    MovableObject::new(id, kind, Transform::new(position, angle), size, random_style(rng)).unwrap()
}

pub const KINDS: [ObjectKind; 4] =
    [ObjectKind::Rect, ObjectKind::Circle, ObjectKind::Polygon, ObjectKind::LabeledField];

/// 2 to 7 objects of random kinds, some hidden, with random groups.
pub fn random_scene(rng: &mut ChaCha8Rng) -> Scene {
    let n = rng.gen_range(2..8);
    let ids: Vec<String> = (0..n).map(|i| format!("obj{i}")).collect();
    let mut builder = Scene::builder();
    for id in &ids {
        let kind = *KINDS.choose(rng).unwrap();
        let object = random_object(rng, id, kind);
        builder = if rng.gen_bool(0.15) { builder.hidden(object) } else { builder.object(object) };
    }
    if n >= 4 && rng.gen_bool(0.5) {
        builder = builder.synchronous([ids[0].clone(), ids[1].clone()]);
    }
    if n >= 4 && rng.gen_bool(0.5) {
        builder = builder.related(&ids[2], [ids[3].clone()]);
    }
    builder.build().unwrap()
}

/// A point near some visible object (or anywhere, occasionally).
pub fn interesting_point(rng: &mut ChaCha8Rng, scene: &Scene) -> Point {
    let visible = scene.visible();
    if visible.is_empty() || rng.gen_bool(0.1) {
        return Point::new(rng.gen_range(-50.0..850.0), rng.gen_range(-50.0..650.0));
    }
    let o = visible.choose(rng).unwrap();
    let reach = match o.size() {
        SizeParams::Rect { width, height } => width.max(*height) * 0.6,
        SizeParams::Circle { radius } => *radius * 1.1,
        SizeParams::Polygon { vertices } => {
            vertices.iter().map(|v| v.to_vector().length()).fold(0.0, f64::max) * 0.7
        }
    };
    o.center() + Vector::new(rng.gen_range(-reach..reach), rng.gen_range(-reach..reach))
}

pub fn random_message(rng: &mut ChaCha8Rng, scene: &Scene) -> SessionMessage {
    let all_ids: Vec<String> = scene
        .visible()
        .iter()
        .map(|o| o.id().to_string())
        .chain(scene.parallel_world().keys().cloned())
        .collect();
    let pick_id = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.05) {
            "missing".to_string()
        } else {
            all_ids.choose(rng).cloned().unwrap_or_default()
        }
    };
    match rng.gen_range(0..100) {
        0..=14 => SessionMessage::Pointer(PointerEvent::Press {
            position: interesting_point(rng, scene),
            button: if rng.gen_bool(0.8) { Button::Left } else { Button::Right },
        }),
        15..=54 => SessionMessage::Pointer(PointerEvent::Move { position: interesting_point(rng, scene) }),
        55..=66 => SessionMessage::Pointer(PointerEvent::Release { position: None }),
        67..=74 => SessionMessage::Command(Command::Hide(pick_id(rng))),
        75..=82 => SessionMessage::Command(Command::Restore(pick_id(rng))),
        83..=94 => {
            let key = *[StyleKey::FillColor, StyleKey::TextColor, StyleKey::FontSize, StyleKey::Text]
                .choose(rng)
                .unwrap();
            let value = match key {
                StyleKey::FillColor | StyleKey::TextColor => Rgb(rng.gen()).to_string(),
                StyleKey::FontSize => format!("{}", rng.gen_range(2.0..30.0)),
                StyleKey::Text => format!("t{}", rng.gen::<u16>()),
            };
            SessionMessage::Command(Command::SetStyle { id: pick_id(rng), key, value })
        }
        95..=97 => SessionMessage::Command(Command::Snapshot),
        _ => SessionMessage::Command(Command::RestoreDefault),
    }
}

/// Uniform point strictly inside the object shrunk by its grab band, in
/// local coordinates.
pub fn sample_inner_local(rng: &mut ChaCha8Rng, object: &MovableObject) -> Point {
    let band = band_of(object);
    match object.size() {
        SizeParams::Rect { width, height } => Point::new(
            rng.gen_range(band..width - band),
            rng.gen_range(band..height - band),
        ),
        SizeParams::Circle { radius } => loop {
            let inner = radius - band;
            let p = Point::new(rng.gen_range(-inner..inner), rng.gen_range(-inner..inner));
            if p.to_vector().length() < inner {
                return p;
            }
        },
        SizeParams::Polygon { vertices } => {
            let (lo, hi) = bounds(vertices);
            loop {
                let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
                let n = vertices.len();
                let inside = (0..n).all(|i| {
                    let a = vertices[i];
                    let e = vertices[(i + 1) % n] - a;
                    e.cross(p - a) / e.length() > band
                });
                if inside {
                    return p;
                }
            }
        }
    }
}

/// Uniform point on the exact boundary, in local coordinates.
pub fn sample_border_local(rng: &mut ChaCha8Rng, object: &MovableObject) -> Point {
    match object.size() {
        SizeParams::Rect { width, height } => {
            polygon_boundary_point(rng, &[
                Point::new(0.0, 0.0),
                Point::new(*width, 0.0),
                Point::new(*width, *height),
                Point::new(0.0, *height),
            ])
        }
        SizeParams::Circle { radius } => {
            let t = rng.gen_range(0.0..TAU);
            Point::new(radius * t.cos(), radius * t.sin())
        }
        SizeParams::Polygon { vertices } => polygon_boundary_point(rng, vertices),
    }
}

fn polygon_boundary_point(rng: &mut ChaCha8Rng, vertices: &[Point]) -> Point {
    let n = vertices.len();
    let lengths: Vec<f64> = (0..n).map(|i| vertices[i].distance(vertices[(i + 1) % n])).collect();
    let mut s = rng.gen_range(0.0..lengths.iter().sum::<f64>());
    for i in 0..n {
        if s <= lengths[i] {
            let t = s / lengths[i];
            return vertices[i] + (vertices[(i + 1) % n] - vertices[i]) * t;
        }
        s -= lengths[i];
    }
    vertices[0]
}

fn bounds(vertices: &[Point]) -> (Point, Point) {
    let lo = vertices.iter().fold(Point::new(f64::MAX, f64::MAX), |m, v| Point::new(m.x.min(v.x), m.y.min(v.y)));
    let hi = vertices.iter().fold(Point::new(f64::MIN, f64::MIN), |m, v| Point::new(m.x.max(v.x), m.y.max(v.y)));
    (lo, hi)
}

/// Radius of the handle nodes in the object's current cover.
pub fn band_of(object: &MovableObject) -> f64 {
    use movable::cover::NodeShape;
    object
        .cover()
        .nodes()
        .iter()
        .find_map(|n| match &n.shape {
            NodeShape::Strip(s) => Some(s.radius()),
            _ => None,
        })
        .unwrap_or_else(|| match (object.size(), &object.cover().nodes()[0].shape) {
            (SizeParams::Circle { radius }, NodeShape::Circle(inner)) => radius - inner.radius(),
            _ => unreachable!(),
        })
}
