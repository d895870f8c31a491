//! The engine's outward face: a newline-delimited text protocol, script
//! replay, and the demo scenes.
//!
//! Inbound, one message per line:
//!
//! ```text
//! press <x> <y> <left|right>
//! move <x> <y>
//! release [<x> <y>]
//! restore_default | snapshot | render
//! hide <id> | restore <id>
//! set_style <id> <fill_color|text_color|font_size|text> <value>
//! save <path> | load <path>
//! ```
//!
//! A `set_style` value, `save` or `load` path runs to the end of the line;
//! wrap it in a JSON string literal to include leading spaces or escapes.
//! Outbound, exactly one canonical JSON line per inbound message, tagged by
//! `"type"`: `render`, `snapshot` or `error`.

use std::fmt;
use std::io::{self, BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::canonical::Json;
use crate::geometry::Point;
use crate::interaction::{Button, Manipulator, PointerEvent};
use crate::persistence::{self, LayoutSnapshot, PersistenceError};
use crate::scene::{
    MovableObject, Outline, RenderItem, Rgb, Scene, SceneError, StyleKey, StyleParams,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    RestoreDefault,
    Hide(String),
    Restore(String),
    SetStyle { id: String, key: StyleKey, value: String },
    Save(PathBuf),
    Load(PathBuf),
    Snapshot,
    /// Re-sends the current render list without changing anything.
    Render,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionMessage {
    Pointer(PointerEvent),
    Command(Command),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ProtocolError(pub String);

fn parse_coord(token: Option<&str>, what: &str) -> Result<f64, ProtocolError> {
    let token = token.ok_or_else(|| ProtocolError(format!("missing {what}")))?;
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ProtocolError(format!("{what} `{token}` is not a finite number")))
}

/// Rest-of-line argument, optionally a JSON string literal.
fn parse_tail(tail: &str, what: &str) -> Result<String, ProtocolError> {
    let tail = tail.trim();
    if tail.is_empty() {
        return Err(ProtocolError(format!("missing {what}")));
    }
    if tail.starts_with('"') {
        serde_json::from_str::<String>(tail)
            .map_err(|e| ProtocolError(format!("bad quoted {what}: {e}")))
    } else {
        Ok(tail.to_string())
    }
}

/// Splits off the first whitespace-delimited token.
fn split_token(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    }
}

impl FromStr for SessionMessage {
    type Err = ProtocolError;

    fn from_str(line: &str) -> Result<Self, ProtocolError> {
        let (verb, rest) = split_token(line);
        let mut tokens = rest.split_whitespace();
        let msg = match verb {
            "press" => {
                let x = parse_coord(tokens.next(), "x")?;
                let y = parse_coord(tokens.next(), "y")?;
                let button = match tokens.next() {
                    Some("left") => Button::Left,
                    Some("right") => Button::Right,
                    Some(other) => return Err(ProtocolError(format!("unknown button `{other}`"))),
                    None => return Err(ProtocolError("missing button".into())),
                };
                SessionMessage::Pointer(PointerEvent::Press { position: Point::new(x, y), button })
            }
            "move" => {
                let x = parse_coord(tokens.next(), "x")?;
                let y = parse_coord(tokens.next(), "y")?;
                SessionMessage::Pointer(PointerEvent::Move { position: Point::new(x, y) })
            }
            "release" => {
                let position = match tokens.next() {
                    None => None,
                    first => {
                        let x = parse_coord(first, "x")?;
                        let y = parse_coord(tokens.next(), "y")?;
                        Some(Point::new(x, y))
                    }
                };
                SessionMessage::Pointer(PointerEvent::Release { position })
            }
            "restore_default" => SessionMessage::Command(Command::RestoreDefault),
            "snapshot" => SessionMessage::Command(Command::Snapshot),
            "render" => SessionMessage::Command(Command::Render),
            "hide" | "restore" => {
                let id = tokens
                    .next()
                    .ok_or_else(|| ProtocolError(format!("{verb} needs an object id")))?
                    .to_string();
                SessionMessage::Command(if verb == "hide" {
                    Command::Hide(id)
                } else {
                    Command::Restore(id)
                })
            }
            "set_style" => {
                let (id, rest) = split_token(rest);
                let (key, value) = split_token(rest);
                if id.is_empty() || key.is_empty() {
                    return Err(ProtocolError("set_style needs <id> <key> <value>".into()));
                }
                let key: StyleKey = key.parse().map_err(ProtocolError)?;
                let value = parse_tail(value, "value")?;
                if key != StyleKey::Text && value.split_whitespace().count() != 1 {
                    return Err(ProtocolError(format!("{} takes a single value", key.as_str())));
                }
                return Ok(SessionMessage::Command(Command::SetStyle { id: id.to_string(), key, value }));
            }
            "save" | "load" => {
                let path = PathBuf::from(parse_tail(rest, "path")?);
                return Ok(SessionMessage::Command(if verb == "save" {
                    Command::Save(path)
                } else {
                    Command::Load(path)
                }));
            }
            "" => return Err(ProtocolError("empty message".into())),
            other => return Err(ProtocolError(format!("unknown message `{other}`"))),
        };
        if let Some(extra) = tokens.next() {
            return Err(ProtocolError(format!("unexpected field `{extra}`")));
        }
        Ok(msg)
    }
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

impl fmt::Display for SessionMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let button = |b: &Button| match b {
            Button::Left => "left",
            Button::Right => "right",
        };
        match self {
            SessionMessage::Pointer(PointerEvent::Press { position, button: b }) => {
                write!(f, "press {} {} {}", position.x, position.y, button(b))
            }
            SessionMessage::Pointer(PointerEvent::Move { position }) => {
                write!(f, "move {} {}", position.x, position.y)
            }
            SessionMessage::Pointer(PointerEvent::Release { position: Some(p) }) => {
                write!(f, "release {} {}", p.x, p.y)
            }
            SessionMessage::Pointer(PointerEvent::Release { position: None }) => f.write_str("release"),
            SessionMessage::Command(c) => match c {
                Command::RestoreDefault => f.write_str("restore_default"),
                Command::Snapshot => f.write_str("snapshot"),
                Command::Render => f.write_str("render"),
                Command::Hide(id) => write!(f, "hide {id}"),
                Command::Restore(id) => write!(f, "restore {id}"),
                Command::SetStyle { id, key, value } => {
                    write!(f, "set_style {id} {} {}", key.as_str(), quoted(value))
                }
                Command::Save(p) => write!(f, "save {}", quoted(&p.to_string_lossy())),
                Command::Load(p) => write!(f, "load {}", quoted(&p.to_string_lossy())),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    ParseError,
    UnknownId,
    NotVisible,
    NotHidden,
    InvalidStyle,
    InvalidLayout,
    UnsupportedVersion,
    Io,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::ParseError => "parse_error",
            ErrorCode::UnknownId => "unknown_id",
            ErrorCode::NotVisible => "not_visible",
            ErrorCode::NotHidden => "not_hidden",
            ErrorCode::InvalidStyle => "invalid_style",
            ErrorCode::InvalidLayout => "invalid_layout",
            ErrorCode::UnsupportedVersion => "unsupported_version",
            ErrorCode::Io => "io_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionReply {
    Render(Vec<RenderItem>),
    Snapshot(LayoutSnapshot),
    Error { code: ErrorCode, message: String },
}

impl SessionReply {
    fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        SessionReply::Error { code, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, SessionReply::Error { .. })
    }

    pub fn to_json(&self) -> Json {
        match self {
            SessionReply::Render(items) => Json::obj([
                ("items", Json::Arr(items.iter().map(render_item_json).collect())),
                ("type", Json::str("render")),
            ]),
            SessionReply::Snapshot(snap) => {
                Json::obj([("snapshot", snap.to_json()), ("type", Json::str("snapshot"))])
            }
            SessionReply::Error { code, message } => Json::obj([
                ("code", Json::str(code.as_str())),
                ("message", Json::str(message.clone())),
                ("type", Json::str("error")),
            ]),
        }
    }

    /// One canonical line, without the trailing newline.
    pub fn to_line(&self) -> String {
        self.to_json().to_canonical()
    }
}

fn point_json(p: Point) -> Json {
    Json::obj([("x", Json::Real(p.x)), ("y", Json::Real(p.y))])
}

pub fn render_item_json(item: &RenderItem) -> Json {
    let outline = match &item.outline {
        Outline::Polygon(points) => Json::obj([
            ("points", Json::Arr(points.iter().map(|p| point_json(*p)).collect())),
            ("type", Json::str("polygon")),
        ]),
        Outline::Circle { center, radius } => Json::obj([
            ("center", point_json(*center)),
            ("radius", Json::Real(*radius)),
            ("type", Json::str("circle")),
        ]),
    };
    Json::obj([
        ("id", Json::str(item.id.clone())),
        ("kind", Json::str(item.kind.as_str())),
        ("outline", outline),
        ("style", persistence::style_json(&item.style)),
        ("z", Json::Int(item.z as i64)),
    ])
}

fn scene_error_reply(e: SceneError) -> SessionReply {
    let code = match e {
        SceneError::UnknownId(_) => ErrorCode::UnknownId,
        SceneError::NotVisible(_) => ErrorCode::NotVisible,
        SceneError::NotHidden(_) => ErrorCode::NotHidden,
        SceneError::InvalidStyle { .. } => ErrorCode::InvalidStyle,
        _ => ErrorCode::InvalidLayout,
    };
    SessionReply::error(code, e.to_string())
}

fn persistence_error_reply(e: PersistenceError) -> SessionReply {
    let code = match &e {
        PersistenceError::Io(_) => ErrorCode::Io,
        PersistenceError::UnsupportedVersion(_) => ErrorCode::UnsupportedVersion,
        PersistenceError::UnknownId(_) => ErrorCode::UnknownId,
        _ => ErrorCode::InvalidLayout,
    };
    SessionReply::error(code, e.to_string())
}

/// A scene plus the pointer grab, driven one message at a time.
#[derive(Debug, Clone)]
pub struct Engine {
    scene: Scene,
    manipulator: Manipulator,
}

impl Engine {
    pub fn new(scene: Scene) -> Self {
        Engine { scene, manipulator: Manipulator::new() }
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn manipulator_mut(&mut self) -> &mut Manipulator {
        &mut self.manipulator
    }

    pub fn snapshot(&self) -> LayoutSnapshot {
        persistence::snapshot(&self.scene)
    }

    fn render(&self) -> SessionReply {
        SessionReply::Render(self.scene.render_list())
    }

    /// Applies exactly one operation and reports the resulting state.
    pub fn handle_message(&mut self, msg: &SessionMessage) -> SessionReply {
        match msg {
            SessionMessage::Pointer(event) => {
                self.manipulator.handle(&mut self.scene, event);
                self.render()
            }
            SessionMessage::Command(command) => self.handle_command(command),
        }
    }

    fn handle_command(&mut self, command: &Command) -> SessionReply {
        let result = match command {
            Command::RestoreDefault => {
                self.manipulator.cancel();
                persistence::restore_default(&mut self.scene);
                Ok(())
            }
            Command::Hide(id) => self.scene.hide_object(id),
            Command::Restore(id) => self.scene.restore_object(id),
            Command::SetStyle { id, key, value } => self.scene.set_style(id, *key, value),
            Command::Snapshot => return SessionReply::Snapshot(self.snapshot()),
            Command::Save(path) => {
                return match persistence::save(&self.scene, path) {
                    Ok(_) => SessionReply::Snapshot(self.snapshot()),
                    Err(e) => persistence_error_reply(e),
                }
            }
            Command::Load(path) => {
                return match persistence::load(&mut self.scene, path) {
                    Ok(()) => {
                        self.manipulator.cancel();
                        self.render()
                    }
                    Err(e) => persistence_error_reply(e),
                }
            }
            Command::Render => Ok(()),
        };
        match result {
            Ok(()) => self.render(),
            Err(e) => scene_error_reply(e),
        }
    }

    /// Parses and handles one protocol line; malformed lines leave the state
    /// alone and yield an error reply.
    pub fn handle_line(&mut self, line: &str) -> SessionReply {
        match line.parse::<SessionMessage>() {
            Ok(msg) => self.handle_message(&msg),
            Err(e) => SessionReply::error(ErrorCode::ParseError, e.0),
        }
    }

    /// Serves the protocol over a reader/writer pair until end of input.
    /// Blank lines and `#` comments are skipped without a reply.
    pub fn serve<R: BufRead, W: Write>(&mut self, input: R, mut output: W) -> io::Result<()> {
        for line in input.lines() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            writeln!(output, "{}", self.handle_line(trimmed).to_line())?;
            output.flush()?;
        }
        Ok(())
    }

    /// Accepts one local client at a time; the engine state outlives each
    /// connection, so a reconnecting client picks up where it left off.
    pub fn serve_tcp(&mut self, listener: TcpListener) -> io::Result<()> {
        for stream in listener.incoming() {
            let stream = stream?;
            let reader = BufReader::new(stream.try_clone()?);
            if let Err(e) = self.serve(reader, stream) {
                eprintln!("client disconnected: {e}");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

/// Session messages read from a text file, one per line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReplayScript {
    pub messages: Vec<SessionMessage>,
}

impl ReplayScript {
    /// Blank lines and lines starting with `#` are ignored. Errors carry the
    /// 1-based line number.
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut messages = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let msg = line
                .parse()
                .map_err(|e: ProtocolError| ScriptError { line: i + 1, message: e.0 })?;
            messages.push(msg);
        }
        Ok(ReplayScript { messages })
    }

    pub fn to_text(&self) -> String {
        self.messages.iter().map(|m| format!("{m}\n")).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ReplayOutcome {
    pub final_snapshot: LayoutSnapshot,
    pub replies: Vec<SessionReply>,
}

impl ReplayOutcome {
    /// Snapshots returned by `snapshot`/`save` commands, in script order.
    pub fn snapshots(&self) -> Vec<&LayoutSnapshot> {
        self.replies
            .iter()
            .filter_map(|r| match r {
                SessionReply::Snapshot(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    pub fn errors(&self) -> Vec<&SessionReply> {
        self.replies.iter().filter(|r| r.is_error()).collect()
    }
}

/// Folds the script over a fresh engine. Error replies are kept, not fatal.
pub fn replay(scene: Scene, script: &ReplayScript) -> ReplayOutcome {
    let mut engine = Engine::new(scene);
    let replies = script.messages.iter().map(|m| engine.handle_message(m)).collect();
    ReplayOutcome { final_snapshot: engine.snapshot(), replies }
}

pub const SCENE_NAMES: [&str; 2] = ["personal-data", "shapes"];

/// Built-in scenes by name.
pub fn build_scene(name: &str) -> Option<Scene> {
    match name {
        "personal-data" => Some(build_personal_data_scene()),
        "shapes" => Some(build_shapes_scene()),
        _ => None,
    }
}

/// Data fields of the personal-data form, in reading order.
pub const PERSONAL_DATA_FIELDS: [&str; 5] = ["name", "birth_date", "address", "contact", "profession"];

/// Caption object attached to a personal-data field.
/// Hidden panel of the personal-data scene that clients show as a context menu.
pub const CONTEXT_MENU_ID: &str = "context_menu";

pub fn caption_id(field: &str) -> String {
    format!("{field}_label")
}

/// The personal-data form: a title, five data fields and a caption above
/// each field, laid out for an 800×600 window. Each caption is tied to its
/// field by a related group. Field contents are stub data.
pub fn build_personal_data_scene() -> Scene {
    let field_style = |text: &str| StyleParams {
        fill_color: Rgb([255, 255, 255]),
        text_color: Rgb([20, 20, 20]),
        font_size: 14.0,
        text: text.to_string(),
    };
    let caption_style = |text: &str| StyleParams {
        fill_color: Rgb([236, 240, 245]),
        text_color: Rgb([60, 60, 90]),
        font_size: 11.0,
        text: text.to_string(),
    };
    // (id, caption, contents, x, y, width, height) of the field box
    let fields = [
        ("name", "Name", "Ada Example", 40.0, 112.0, 340.0, 36.0),
        ("birth_date", "Date of birth", "1970-01-01", 420.0, 112.0, 200.0, 36.0),
        ("address", "Address", "12 Sample Road, Springfield", 40.0, 192.0, 580.0, 60.0),
        ("contact", "Contact", "+1 555 0100  ada@example.org", 40.0, 294.0, 340.0, 36.0),
        ("profession", "Profession", "Research engineer, numerical methods", 40.0, 372.0, 580.0, 120.0),
    ];

    let title = StyleParams {
        fill_color: Rgb([52, 73, 94]),
        text_color: Rgb([255, 255, 255]),
        font_size: 20.0,
        text: "PersonalData".into(),
    };
    let mut builder = Scene::builder().object(
        MovableObject::labeled_field("title", Point::new(40.0, 20.0), 720.0, 50.0, title)
            .expect("valid title"),
    );
    for (id, caption, contents, x, y, w, h) in fields {
        let field = MovableObject::labeled_field(id, Point::new(x, y), w, h, field_style(contents))
            .expect("valid field");
        let label = MovableObject::labeled_field(
            &caption_id(id),
            Point::new(x, y - 22.0),
            160.0,
            20.0,
            caption_style(caption),
        )
        .expect("valid caption");
        builder = builder.object(field).object(label).related(id, [caption_id(id)]);
    }
    // starts hidden; clients restore it to offer hide/restore/default actions
    let menu = StyleParams {
        fill_color: Rgb([250, 250, 250]),
        text_color: Rgb([20, 20, 20]),
        font_size: 12.0,
        text: "Hide\nRestore...\nDefault view\nStyle...".into(),
    };
    builder = builder.hidden(
        MovableObject::labeled_field(CONTEXT_MENU_ID, Point::new(640.0, 192.0), 140.0, 100.0, menu)
            .expect("valid menu"),
    );
    builder.build().expect("personal-data scene is valid")
}

/// One object of every kind, used for exercising covers and handles.
pub fn build_shapes_scene() -> Scene {
    let style = |fill: [u8; 3], text: &str| StyleParams {
        fill_color: Rgb(fill),
        text: text.into(),
        ..StyleParams::default()
    };
    let hexagon: Vec<Point> = (0..6)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            Point::new(70.0 * t.cos(), 70.0 * t.sin())
        })
        .collect();
    Scene::builder()
        .object(MovableObject::rect("rect", Point::new(40.0, 40.0), 160.0, 100.0, style([231, 76, 60], "")).unwrap())
        .object(MovableObject::circle("circle", Point::new(360.0, 120.0), 70.0, style([46, 204, 113], "")).unwrap())
        .object(MovableObject::polygon("hexagon", Point::new(600.0, 140.0), hexagon, style([52, 152, 219], "")).unwrap())
        .object(
            MovableObject::labeled_field("field", Point::new(40.0, 300.0), 300.0, 40.0, style([255, 255, 255], "text"))
                .unwrap(),
        )
        .build()
        .expect("shapes scene is valid")
}
