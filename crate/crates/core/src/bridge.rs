//! Live wire protocol between a running performance and its controllers.
//!
//! Every frame is one JSON text message. Clients send commands; the server
//! sends snapshots at a fixed rate, the sound and light events as they
//! happen, one acknowledgement per command, and errors for frames it could
//! not understand. Unknown fields are ignored in both directions.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::command::{ControlCommand, TimedCommand};
use crate::events::{LightEvent, SoundEvent};
use crate::performance::{LogRecord, Performance, Record, Snapshot};
use crate::time::SimTime;

pub const PROTOCOL_VERSION: u32 = 1;
/// Snapshot rate of the live server.
pub const SNAPSHOT_HZ: u32 = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerMessage {
    /// Per-connection counter, strictly increasing.
    pub seq: u64,
    /// Simulation time, seconds.
    pub t: SimTime,
    #[serde(flatten)]
    pub body: ServerBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerBody {
    Snapshot {
        protocol: u32,
        state: Snapshot,
    },
    Sound {
        event: SoundEvent,
    },
    Light {
        event: LightEvent,
    },
    Ack {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        command: ControlCommand,
        accepted: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
    Error {
        code: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientMessage {
    /// Optional correlation id echoed in the acknowledgement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub command: ControlCommand,
    /// Client clock when the command was issued, seconds. Informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ProtocolError {
    pub code: &'static str,
    pub message: String,
}

impl ProtocolError {
    pub fn malformed(message: impl Into<String>) -> Self {
        ProtocolError {
            code: "malformed",
            message: message.into(),
        }
    }

    pub fn to_body(&self) -> ServerBody {
        ServerBody::Error {
            code: self.code.to_string(),
            message: self.message.clone(),
        }
    }
}

pub fn encode_server(m: &ServerMessage) -> String {
    serde_json::to_string(m).expect("server messages always serialize")
}

pub fn decode_server(text: &str) -> Result<ServerMessage, ProtocolError> {
    serde_json::from_str(text).map_err(|e| ProtocolError::malformed(e.to_string()))
}

pub fn encode_client(m: &ClientMessage) -> String {
    serde_json::to_string(m).expect("client messages always serialize")
}

pub fn decode_client(text: &str) -> Result<ClientMessage, ProtocolError> {
    serde_json::from_str(text).map_err(|e| ProtocolError::malformed(e.to_string()))
}

/// A message before the connection stamps its sequence number.
#[derive(Debug, Clone, PartialEq)]
pub struct Outbound {
    pub t: SimTime,
    pub body: ServerBody,
}

/// Stamps outgoing messages for one connection.
#[derive(Debug, Default)]
pub struct Sequencer {
    next: u64,
}

impl Sequencer {
    pub fn stamp(&mut self, out: Outbound) -> ServerMessage {
        let seq = self.next;
        self.next += 1;
        ServerMessage {
            seq,
            t: out.t,
            body: out.body,
        }
    }
}

/// Everything one live step produced.
#[derive(Debug, Default)]
pub struct TickOutput<C> {
    /// Sound and light messages for every client.
    pub broadcast: Vec<Outbound>,
    /// Acknowledgements for the client that sent each command.
    pub acks: Vec<(C, Outbound)>,
    pub records: Vec<LogRecord>,
}

/// Wraps a performance for live use: commands arrive tagged with the
/// client that sent them and are acknowledged once applied.
#[derive(Debug)]
pub struct LiveEngine<C> {
    perf: Performance,
    waiting: VecDeque<(C, Option<String>)>,
}

impl<C: Clone> LiveEngine<C> {
    pub fn new(perf: Performance) -> Self {
        LiveEngine {
            perf,
            waiting: VecDeque::new(),
        }
    }

    pub fn performance(&self) -> &Performance {
        &self.perf
    }

    /// Queues a command for the next step.
    pub fn submit(&mut self, client: C, msg: ClientMessage) {
        self.perf.submit(TimedCommand {
            at: self.perf.now(),
            command: msg.command,
        });
        self.waiting.push_back((client, msg.id));
    }

    pub fn snapshot(&self) -> Outbound {
        Outbound {
            t: self.perf.now(),
            body: ServerBody::Snapshot {
                protocol: PROTOCOL_VERSION,
                state: self.perf.snapshot(),
            },
        }
    }

    pub fn is_finished(&self) -> bool {
        self.perf.is_finished()
    }

    pub fn tick(&mut self) -> TickOutput<C> {
        let records = self.perf.step();
        let mut out = TickOutput {
            broadcast: Vec::new(),
            acks: Vec::new(),
            records: Vec::new(),
        };
        for r in &records {
            match &r.record {
                Record::Sound(s) => out.broadcast.push(Outbound {
                    t: r.t,
                    body: ServerBody::Sound { event: s.clone() },
                }),
                Record::Light(l) => out.broadcast.push(Outbound {
                    t: r.t,
                    body: ServerBody::Light { event: l.clone() },
                }),
                Record::Command(c) => {
                    // Commands are applied in submission order, one record each.
                    if let Some((client, id)) = self.waiting.pop_front() {
                        out.acks.push((
                            client,
                            Outbound {
                                t: r.t,
                                body: ServerBody::Ack {
                                    id,
                                    command: c.command,
                                    accepted: c.accepted,
                                    reason: c.reason.clone(),
                                },
                            },
                        ));
                    }
                }
                Record::Sim(_) => {}
            }
        }
        out.records = records;
        out
    }
}
