//! Newline-delimited JSON frames exchanged with viewers and controllers.
//!
//! Every line is one object `{"kind", "sequence", "payload"}`. Each side
//! numbers its own frames with strictly increasing sequences.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::engine::{Ack, Command, SimEvent};

/// Longest accepted line, excluding the newline.
pub const MAX_LINE: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Event,
    Command,
    Ack,
    Error,
}

impl MessageKind {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "event" => Some(MessageKind::Event),
            "command" => Some(MessageKind::Command),
            "ack" => Some(MessageKind::Ack),
            "error" => Some(MessageKind::Error),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireMessage {
    pub kind: MessageKind,
    pub sequence: u64,
    pub payload: Value,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("line of {len} bytes exceeds the {MAX_LINE}-byte limit")]
    TooLong { len: usize },
    #[error("unknown message kind {0:?}")]
    UnknownKind(String),
    #[error("malformed frame: {0}")]
    Malformed(String),
}

impl FrameError {
    pub fn code(&self) -> &'static str {
        match self {
            FrameError::TooLong { .. } => "too_long",
            FrameError::UnknownKind(_) => "unknown_kind",
            FrameError::Malformed(_) => "malformed",
        }
    }
}

pub fn decode_line(line: &str) -> Result<WireMessage, FrameError> {
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.len() > MAX_LINE {
        return Err(FrameError::TooLong { len: line.len() });
    }
    let value: Value =
        serde_json::from_str(line).map_err(|e| FrameError::Malformed(e.to_string()))?;
    let kind = value
        .get("kind")
        .ok_or_else(|| FrameError::Malformed("missing kind".into()))?;
    let name = kind
        .as_str()
        .ok_or_else(|| FrameError::Malformed("kind is not a string".into()))?;
    if MessageKind::from_name(name).is_none() {
        return Err(FrameError::UnknownKind(name.to_string()));
    }
    serde_json::from_value(value).map_err(|e| FrameError::Malformed(e.to_string()))
}

/// One frame, newline included.
pub fn encode_line(msg: &WireMessage) -> String {
    let mut s = serde_json::to_string(msg).expect("wire messages serialize");
    s.push('\n');
    s
}

/// What a client may ask for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClientCommand {
    /// Claim the single controller seat.
    JoinController,
    Engine(Command),
}

impl ClientCommand {
    pub fn to_value(&self) -> Value {
        match self {
            ClientCommand::JoinController => serde_json::json!({ "command": "join_controller" }),
            ClientCommand::Engine(c) => serde_json::to_value(c).expect("commands serialize"),
        }
    }

    pub fn from_value(v: &Value) -> Result<Self, String> {
        if v.get("command").and_then(Value::as_str) == Some("join_controller") {
            return Ok(ClientCommand::JoinController);
        }
        serde_json::from_value(v.clone())
            .map(ClientCommand::Engine)
            .map_err(|e| e.to_string())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClientCommand::JoinController => "join_controller",
            ClientCommand::Engine(c) => c.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AckPayload {
    /// Sequence of the command being acknowledged.
    pub reply_to: u64,
    #[serde(flatten)]
    pub ack: Ack,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub reply_to: Option<u64>,
    pub code: String,
    pub message: String,
}

impl WireMessage {
    pub fn new(kind: MessageKind, sequence: u64, payload: Value) -> Self {
        WireMessage {
            kind,
            sequence,
            payload,
        }
    }

    pub fn event(sequence: u64, event: &SimEvent) -> Self {
        Self::new(
            MessageKind::Event,
            sequence,
            serde_json::to_value(event).expect("events serialize"),
        )
    }

    pub fn command(sequence: u64, command: ClientCommand) -> Self {
        Self::new(MessageKind::Command, sequence, command.to_value())
    }

    pub fn ack(sequence: u64, payload: &AckPayload) -> Self {
        Self::new(
            MessageKind::Ack,
            sequence,
            serde_json::to_value(payload).expect("acks serialize"),
        )
    }

    pub fn error(sequence: u64, payload: &ErrorPayload) -> Self {
        Self::new(
            MessageKind::Error,
            sequence,
            serde_json::to_value(payload).expect("errors serialize"),
        )
    }

    pub fn as_event(&self) -> Option<SimEvent> {
        (self.kind == MessageKind::Event)
            .then(|| serde_json::from_value(self.payload.clone()).ok())
            .flatten()
    }

    pub fn as_ack(&self) -> Option<AckPayload> {
        (self.kind == MessageKind::Ack)
            .then(|| serde_json::from_value(self.payload.clone()).ok())
            .flatten()
    }

    pub fn as_error(&self) -> Option<ErrorPayload> {
        (self.kind == MessageKind::Error)
            .then(|| serde_json::from_value(self.payload.clone()).ok())
            .flatten()
    }
}
