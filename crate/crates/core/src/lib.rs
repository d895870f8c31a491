//! Direct-manipulation engine.
//!
//! Every screen object carries an invisible cover made of convex polygons,
//! circles and rounded strips. Pressing inside an object moves it, pressing
//! on its border resizes it, and a right-button drag rotates it. The whole
//! layout can be saved, restored, and reset to the developer's default view.

pub mod canonical;
pub mod cover;
pub mod geometry;
pub mod interaction;
pub mod persistence;
pub mod scene;
pub mod session;

pub use cover::{Cover, HandleId, Node, NodeAction, NodeShape};
pub use geometry::{Point, Transform, Vector};
pub use interaction::{Button, GrabMode, GrabState, Manipulator, PointerEvent};
pub use persistence::{LayoutSnapshot, PersistenceError};
pub use scene::{MovableObject, ObjectKind, Scene, SceneError, SizeParams, StyleParams};
pub use session::{Engine, ReplayScript, SessionMessage, SessionReply};
