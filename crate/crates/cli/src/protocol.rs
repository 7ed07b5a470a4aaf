//! JSON messages exchanged over the session websocket, one per text frame.

use audiotact::engine::Announcement;
use audiotact::gestures::{Gesture, GestureKind, Phase, TouchEvent};
use audiotact::mapmodel::{ElementKind, Geometry, MapDocument};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Hello,
    Touch {
        /// Client clock in ms.
        t: u64,
        id: u32,
        phase: Phase,
        x: f64,
        y: f64,
    },
    Flush,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireElement {
    pub id: String,
    pub kind: ElementKind,
    pub name: String,
    pub geometry: Geometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Map { bounds: [f64; 4], elements: Vec<WireElement> },
    Gesture { kind: GestureKind, x: f64, y: f64, t: u64 },
    Announcement { text: String, element_id: Option<String>, t: u64 },
    Error { message: String },
}

impl ClientMessage {
    pub fn touch(e: &TouchEvent) -> Self {
        ClientMessage::Touch { t: e.t, id: e.contact_id, phase: e.phase, x: e.x, y: e.y }
    }
}

impl ServerMessage {
    pub fn map(doc: &MapDocument) -> Self {
        ServerMessage::Map {
            bounds: doc.bounds().as_array(),
            elements: doc
                .elements()
                .iter()
                .map(|e| WireElement {
                    id: e.id.clone(),
                    kind: e.kind,
                    name: e.name.clone(),
                    geometry: e.geometry.clone(),
                })
                .collect(),
        }
    }

    pub fn error(message: impl Into<String>) -> Self {
        ServerMessage::Error { message: message.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialise")
    }
}

impl From<&Gesture> for ServerMessage {
    fn from(g: &Gesture) -> Self {
        ServerMessage::Gesture { kind: g.kind, x: g.pos.x, y: g.pos.y, t: g.t }
    }
}

impl From<&Announcement> for ServerMessage {
    fn from(a: &Announcement) -> Self {
        ServerMessage::Announcement { text: a.text.clone(), element_id: a.element_id.clone(), t: a.t }
    }
}
