//! Saving and restoring every user-changeable parameter of a scene.
//!
//! A [`LayoutSnapshot`] serializes to canonical JSON (`.layout.json`): object
//! keys sorted, no whitespace, reals with six decimals. Equal scenes produce
//! byte-identical text, and parsing then re-serializing is byte-stable.
//!
//! ```text
//! {"format_version":1,"groups":[...],"objects":{"<id>":{"angle":..,"kind":..,
//!  "size":{..},"style":{..},"translation":{"x":..,"y":..},
//!  "visibility":"visible"|"parallel","z":<int>|null}}}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::fs;
use std::io;
use std::path::Path;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::canonical::{round6, Json};
use crate::geometry::{Point, Transform, Vector};
use crate::scene::{
    GroupMode, GroupSpec, MovableObject, ObjectKind, Rgb, Scene, SceneError, SizeParams,
    StyleParams,
};

pub const FORMAT_VERSION: i64 = 1;

#[derive(Debug, Error)]
pub enum PersistenceError {
    #[error("layout is not valid JSON: {0}")]
    Syntax(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(i64),
    #[error("unknown object `{0}`")]
    UnknownId(String),
    #[error("layout is missing object `{0}`")]
    MissingId(String),
    #[error("object `{id}` has kind {found}, expected {expected}")]
    KindMismatch { id: String, expected: ObjectKind, found: ObjectKind },
    #[error("malformed layout: {0}")]
    Malformed(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visibility {
    /// On screen at this z-index (0 is the bottom).
    Visible { z: usize },
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub kind: ObjectKind,
    pub visibility: Visibility,
    pub transform: Transform,
    pub size: SizeParams,
    pub style: StyleParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutSnapshot {
    pub format_version: i64,
    pub objects: BTreeMap<String, ObjectRecord>,
    pub groups: Vec<GroupSpec>,
}

impl LayoutSnapshot {
    pub fn empty() -> Self {
        LayoutSnapshot { format_version: FORMAT_VERSION, objects: BTreeMap::new(), groups: Vec::new() }
    }

    pub fn to_json(&self) -> Json {
        let objects = self.objects.iter().map(|(id, r)| (id.clone(), record_json(r)));
        Json::obj([
            ("format_version", Json::Int(self.format_version)),
            ("groups", Json::Arr(self.groups.iter().map(group_json).collect())),
            ("objects", Json::Obj(objects.collect())),
        ])
    }

    /// Canonical text form.
    pub fn to_canonical(&self) -> String {
        self.to_json().to_canonical()
    }

    /// Parses canonical (or any equivalent) JSON. The format version is
    /// checked before anything else; unknown fields are rejected.
    pub fn parse(text: &str) -> Result<Self, PersistenceError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| PersistenceError::Syntax(e.to_string()))?;
        let root = value
            .as_object()
            .ok_or_else(|| malformed("top level is not an object"))?;
        let version = root
            .get("format_version")
            .ok_or_else(|| malformed("missing format_version"))?
            .as_i64()
            .ok_or_else(|| malformed("format_version is not an integer"))?;
        if version != FORMAT_VERSION {
            return Err(PersistenceError::UnsupportedVersion(version));
        }
        expect_keys(root, &["format_version", "groups", "objects"], "layout")?;

        let mut objects = BTreeMap::new();
        for (id, record) in field(root, "objects")?
            .as_object()
            .ok_or_else(|| malformed("objects is not a map"))?
        {
            objects.insert(id.clone(), parse_record(id, record)?);
        }
        let groups = field(root, "groups")?
            .as_array()
            .ok_or_else(|| malformed("groups is not a list"))?
            .iter()
            .map(parse_group)
            .collect::<Result<_, _>>()?;
        Ok(LayoutSnapshot { format_version: version, objects, groups })
    }

    pub fn visible_ids(&self) -> Vec<&str> {
        let mut visible: Vec<(usize, &str)> = self
            .objects
            .iter()
            .filter_map(|(id, r)| match r.visibility {
                Visibility::Visible { z } => Some((z, id.as_str())),
                Visibility::Parallel => None,
            })
            .collect();
        visible.sort();
        visible.into_iter().map(|(_, id)| id).collect()
    }
}

/// Angle as stored: rounded to six decimals and kept inside `[0, 2π)`.
fn canonical_angle(angle: f64) -> f64 {
    let a = round6(angle);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

fn point_json(p: Point) -> Json {
    Json::obj([("x", Json::Real(p.x)), ("y", Json::Real(p.y))])
}

fn vector_json(v: Vector) -> Json {
    point_json(v.to_point())
}

pub(crate) fn size_json(size: &SizeParams) -> Json {
    match size {
        SizeParams::Rect { width, height } => {
            Json::obj([("height", Json::Real(*height)), ("width", Json::Real(*width))])
        }
        SizeParams::Circle { radius } => Json::obj([("radius", Json::Real(*radius))]),
        SizeParams::Polygon { vertices } => Json::obj([(
            "vertices",
            Json::Arr(vertices.iter().map(|v| point_json(*v)).collect()),
        )]),
    }
}

pub(crate) fn style_json(style: &StyleParams) -> Json {
    Json::obj([
        ("fill_color", Json::str(style.fill_color.to_string())),
        ("font_size", Json::Real(style.font_size)),
        ("text", Json::str(style.text.clone())),
        ("text_color", Json::str(style.text_color.to_string())),
    ])
}

fn record_json(r: &ObjectRecord) -> Json {
    let (visibility, z) = match r.visibility {
        Visibility::Visible { z } => ("visible", Json::Int(z as i64)),
        Visibility::Parallel => ("parallel", Json::Null),
    };
    Json::obj([
        ("angle", Json::Real(canonical_angle(r.transform.angle()))),
        ("kind", Json::str(r.kind.as_str())),
        ("size", size_json(&r.size)),
        ("style", style_json(&r.style)),
        ("translation", point_json(r.transform.translation)),
        ("visibility", Json::str(visibility)),
        ("z", z),
    ])
}

fn group_json(g: &GroupSpec) -> Json {
    let members = Json::Arr(g.members.iter().map(|m| Json::str(m.clone())).collect());
    match &g.mode {
        GroupMode::Synchronous => {
            Json::obj([("members", members), ("mode", Json::str("synchronous"))])
        }
        GroupMode::Related { master, offsets } => Json::obj([
            ("master", Json::str(master.clone())),
            ("members", members),
            ("mode", Json::str("related")),
            (
                "offsets",
                Json::Obj(offsets.iter().map(|(id, v)| (id.clone(), vector_json(*v))).collect()),
            ),
        ]),
    }
}

fn malformed(msg: impl Into<String>) -> PersistenceError {
    PersistenceError::Malformed(msg.into())
}

fn expect_keys(map: &Map<String, Value>, keys: &[&str], what: &str) -> Result<(), PersistenceError> {
    if let Some(extra) = map.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(malformed(format!("unknown field `{extra}` in {what}")));
    }
    if let Some(missing) = keys.iter().find(|k| !map.contains_key(**k)) {
        return Err(malformed(format!("missing field `{missing}` in {what}")));
    }
    Ok(())
}

fn field<'a>(map: &'a Map<String, Value>, key: &str) -> Result<&'a Value, PersistenceError> {
    map.get(key).ok_or_else(|| malformed(format!("missing field `{key}`")))
}

fn real(v: &Value, what: &str) -> Result<f64, PersistenceError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| malformed(format!("{what} is not a finite number")))
}

fn string<'a>(v: &'a Value, what: &str) -> Result<&'a str, PersistenceError> {
    v.as_str().ok_or_else(|| malformed(format!("{what} is not a string")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, PersistenceError> {
    v.as_object().ok_or_else(|| malformed(format!("{what} is not an object")))
}

fn parse_point(v: &Value, what: &str) -> Result<Point, PersistenceError> {
    let map = object(v, what)?;
    expect_keys(map, &["x", "y"], what)?;
    Ok(Point::new(real(&map["x"], what)?, real(&map["y"], what)?))
}

fn parse_record(id: &str, v: &Value) -> Result<ObjectRecord, PersistenceError> {
    let ctx = format!("object `{id}`");
    let map = object(v, &ctx)?;
    expect_keys(
        map,
        &["angle", "kind", "size", "style", "translation", "visibility", "z"],
        &ctx,
    )?;
    let kind: ObjectKind = string(&map["kind"], "kind")?.parse().map_err(malformed)?;
    let angle = real(&map["angle"], "angle")?;
    if !(0.0..TAU).contains(&angle) {
        return Err(malformed(format!("{ctx}: angle {angle} outside [0, 2π)")));
    }
    let translation = parse_point(&map["translation"], "translation")?;
    let visibility = match string(&map["visibility"], "visibility")? {
        "visible" => {
            let z = map["z"]
                .as_u64()
                .ok_or_else(|| malformed(format!("{ctx}: visible object needs an integer z")))?;
            Visibility::Visible { z: z as usize }
        }
        "parallel" => {
            if !map["z"].is_null() {
                return Err(malformed(format!("{ctx}: parallel object must have z null")));
            }
            Visibility::Parallel
        }
        other => return Err(malformed(format!("{ctx}: unknown visibility `{other}`"))),
    };

    let size_map = object(&map["size"], "size")?;
    let size = match kind {
        ObjectKind::Rect | ObjectKind::LabeledField => {
            expect_keys(size_map, &["height", "width"], "size")?;
            SizeParams::Rect {
                width: real(&size_map["width"], "width")?,
                height: real(&size_map["height"], "height")?,
            }
        }
        ObjectKind::Circle => {
            expect_keys(size_map, &["radius"], "size")?;
            SizeParams::Circle { radius: real(&size_map["radius"], "radius")? }
        }
        ObjectKind::Polygon => {
            expect_keys(size_map, &["vertices"], "size")?;
            let vertices = size_map["vertices"]
                .as_array()
                .ok_or_else(|| malformed("vertices is not a list"))?
                .iter()
                .map(|v| parse_point(v, "vertex"))
                .collect::<Result<_, _>>()?;
            SizeParams::Polygon { vertices }
        }
    };

    let style_map = object(&map["style"], "style")?;
    expect_keys(style_map, &["fill_color", "font_size", "text", "text_color"], "style")?;
    let color = |key: &str| -> Result<Rgb, PersistenceError> {
        string(&style_map[key], key)?.parse().map_err(malformed)
    };
    let style = StyleParams {
        fill_color: color("fill_color")?,
        text_color: color("text_color")?,
        font_size: real(&style_map["font_size"], "font_size")?,
        text: string(&style_map["text"], "text")?.to_string(),
    };

    Ok(ObjectRecord { kind, visibility, transform: Transform::new(translation, angle), size, style })
}

fn parse_group(v: &Value) -> Result<GroupSpec, PersistenceError> {
    let map = object(v, "group")?;
    let members = field(map, "members")?
        .as_array()
        .ok_or_else(|| malformed("members is not a list"))?
        .iter()
        .map(|m| string(m, "member").map(str::to_string))
        .collect::<Result<BTreeSet<_>, _>>()?;
    match string(field(map, "mode")?, "mode")? {
        "synchronous" => {
            expect_keys(map, &["members", "mode"], "group")?;
            Ok(GroupSpec { members, mode: GroupMode::Synchronous })
        }
        "related" => {
            expect_keys(map, &["master", "members", "mode", "offsets"], "group")?;
            let master = string(&map["master"], "master")?.to_string();
            let offsets = object(&map["offsets"], "offsets")?
                .iter()
                .map(|(id, v)| Ok((id.clone(), parse_point(v, "offset")?.to_vector())))
                .collect::<Result<BTreeMap<_, _>, PersistenceError>>()?;
            Ok(GroupSpec { members, mode: GroupMode::Related { master, offsets } })
        }
        other => Err(malformed(format!("unknown group mode `{other}`"))),
    }
}

fn record_of(object: &MovableObject, visibility: Visibility) -> ObjectRecord {
    ObjectRecord {
        kind: object.kind(),
        visibility,
        transform: *object.transform(),
        size: object.size().clone(),
        style: object.style.clone(),
    }
}

/// Captures the full user-visible state of the scene. Pure read.
pub fn snapshot(scene: &Scene) -> LayoutSnapshot {
    let mut objects = BTreeMap::new();
    for (z, o) in scene.visible.iter().enumerate() {
        objects.insert(o.id().to_string(), record_of(o, Visibility::Visible { z }));
    }
    for (id, o) in &scene.parallel_world {
        objects.insert(id.clone(), record_of(o, Visibility::Parallel));
    }
    LayoutSnapshot { format_version: FORMAT_VERSION, objects, groups: scene.groups.clone() }
}

/// Makes the scene equal to the snapshot. The object set and kinds must match
/// the scene's; on any error the scene is left untouched.
pub fn restore(scene: &mut Scene, snap: &LayoutSnapshot) -> Result<(), PersistenceError> {
    if snap.format_version != FORMAT_VERSION {
        return Err(PersistenceError::UnsupportedVersion(snap.format_version));
    }
    let registered: BTreeMap<&str, ObjectKind> = scene
        .visible
        .iter()
        .chain(scene.parallel_world.values())
        .map(|o| (o.id(), o.kind()))
        .collect();
    for (id, record) in &snap.objects {
        let expected = *registered
            .get(id.as_str())
            .ok_or_else(|| PersistenceError::UnknownId(id.clone()))?;
        if expected != record.kind {
            return Err(PersistenceError::KindMismatch {
                id: id.clone(),
                expected,
                found: record.kind,
            });
        }
    }
    if let Some(missing) = registered.keys().find(|id| !snap.objects.contains_key(**id)) {
        return Err(PersistenceError::MissingId(missing.to_string()));
    }

    let mut layered: Vec<Option<MovableObject>> = Vec::new();
    let mut parallel_world = BTreeMap::new();
    let visible_count = snap
        .objects
        .values()
        .filter(|r| matches!(r.visibility, Visibility::Visible { .. }))
        .count();
    layered.resize(visible_count, None);
    for (id, record) in &snap.objects {
        let object = MovableObject::new(
            id.clone(),
            record.kind,
            record.transform,
            record.size.clone(),
            record.style.clone(),
        )?;
        match record.visibility {
            Visibility::Visible { z } => {
                let slot = layered
                    .get_mut(z)
                    .ok_or_else(|| malformed(format!("z-index {z} of `{id}` out of range")))?;
                if slot.is_some() {
                    return Err(malformed(format!("z-index {z} used twice")));
                }
                *slot = Some(object);
            }
            Visibility::Parallel => {
                parallel_world.insert(id.clone(), object);
            }
        }
    }
    // every slot is filled: visible_count objects landed in distinct slots
    let visible: Vec<MovableObject> = layered.into_iter().map(|o| o.expect("slot filled")).collect();

    for g in &snap.groups {
        g.validate(|id| registered.contains_key(id))?;
    }

    scene.visible = visible;
    scene.parallel_world = parallel_world;
    scene.groups = snap.groups.clone();
    Ok(())
}

/// Reinstalls the default view captured when the scene was built.
pub fn restore_default(scene: &mut Scene) {
    let default = scene.default_layout.clone();
    restore(scene, &default).expect("default layout always matches its own scene");
}

pub fn restore_text(scene: &mut Scene, text: &str) -> Result<(), PersistenceError> {
    let snap = LayoutSnapshot::parse(text)?;
    restore(scene, &snap)
}

pub fn save(scene: &Scene, path: &Path) -> Result<String, PersistenceError> {
    let text = snapshot(scene).to_canonical();
    fs::write(path, &text)?;
    Ok(text)
}

pub fn load(scene: &mut Scene, path: &Path) -> Result<(), PersistenceError> {
    let text = fs::read_to_string(path)?;
    restore_text(scene, &text)
}
