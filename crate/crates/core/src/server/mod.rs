//! TCP control server: streams engine events to every connection and lets
//! one controller drive the engine.

mod client;
pub mod wire;

pub use client::WireClient;
pub use wire::{
    decode_line, encode_line, AckPayload, ClientCommand, ErrorPayload, FrameError, MessageKind,
    WireMessage, MAX_LINE,
};

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use log::{debug, info, warn};

use crate::engine::{
    Ack, EngineError, LiveEngine, Outbound, Received, Subscription, DEFAULT_BUFFER,
};
use crate::metrics::GameReport;

struct Shared {
    engine: LiveEngine,
    controller: Mutex<Option<usize>>,
    stopping: AtomicBool,
    streams: Mutex<Vec<TcpStream>>,
    buffer: usize,
}

/// A running server. Dropping it without [`shutdown`](Self::shutdown)
/// leaves the listener thread running until the process exits.
pub struct ControlServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    acceptor: Option<JoinHandle<Vec<JoinHandle<()>>>>,
}

impl ControlServer {
    pub fn start(engine: LiveEngine, addr: impl ToSocketAddrs) -> io::Result<Self> {
        Self::with_buffer(engine, addr, DEFAULT_BUFFER)
    }

    /// `buffer` bounds each connection's outgoing event queue.
    pub fn with_buffer(
        engine: LiveEngine,
        addr: impl ToSocketAddrs,
        buffer: usize,
    ) -> io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared {
            engine,
            controller: Mutex::new(None),
            stopping: AtomicBool::new(false),
            streams: Mutex::new(Vec::new()),
            buffer,
        });
        let accept_shared = Arc::clone(&shared);
        let acceptor = std::thread::Builder::new()
            .name("accept".into())
            .spawn(move || accept_loop(listener, accept_shared))?;
        info!("control server listening on {addr}");
        Ok(ControlServer {
            addr,
            shared,
            acceptor: Some(acceptor),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn engine(&self) -> &LiveEngine {
        &self.shared.engine
    }

    pub fn connection_count(&self) -> usize {
        self.shared.engine.hub().subscriber_count()
    }

    /// Stops accepting, flushes and closes every connection, aborts the
    /// game if unfinished and returns the report of completed moves.
    pub fn shutdown(mut self) -> Result<GameReport, EngineError> {
        self.shared.stopping.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        let workers = self
            .acceptor
            .take()
            .map(|h| h.join().unwrap_or_default())
            .unwrap_or_default();
        let report = self.shared.engine.control(crate::engine::Command::Abort);
        if let Err(e) = &report {
            debug!("abort at shutdown: {e}");
        }
        self.shared.engine.hub().close_all();
        for s in self.shared.streams.lock().expect("streams lock").iter() {
            let _ = s.shutdown(Shutdown::Read);
        }
        for w in workers {
            let _ = w.join();
        }
        self.shared.streams.lock().expect("streams lock").clear();
        match Arc::try_unwrap(self.shared) {
            Ok(shared) => shared.engine.shutdown(),
            Err(_) => Err(EngineError::Stopped),
        }
    }
}

fn accept_loop(listener: TcpListener, shared: Arc<Shared>) -> Vec<JoinHandle<()>> {
    let next_id = AtomicUsize::new(1);
    let mut workers = Vec::new();
    for stream in listener.incoming() {
        if shared.stopping.load(Ordering::SeqCst) {
            break;
        }
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                warn!("accept failed: {e}");
                continue;
            }
        };
        let id = next_id.fetch_add(1, Ordering::Relaxed);
        if let Ok(clone) = stream.try_clone() {
            shared.streams.lock().expect("streams lock").push(clone);
        }
        let conn_shared = Arc::clone(&shared);
        match std::thread::Builder::new()
            .name(format!("conn-{id}"))
            .spawn(move || serve_connection(id, stream, conn_shared))
        {
            Ok(h) => workers.push(h),
            Err(e) => warn!("cannot spawn connection thread: {e}"),
        }
    }
    workers
}

fn error(reply_to: Option<u64>, code: &str, message: impl Into<String>) -> Outbound {
    Outbound::Error {
        reply_to,
        code: code.into(),
        message: message.into(),
    }
}

fn engine_error_code(e: &EngineError) -> &'static str {
    match e {
        EngineError::InvalidCommand(_) => "invalid_command",
        EngineError::Stopped => "stopped",
        _ => "engine",
    }
}

fn serve_connection(id: usize, stream: TcpStream, shared: Arc<Shared>) {
    let peer = stream
        .peer_addr()
        .map(|a| a.to_string())
        .unwrap_or_default();
    debug!("connection {id} from {peer}");
    let sub = shared.engine.hub().subscribe(shared.buffer);
    let writer = match stream.try_clone() {
        Ok(w) => w,
        Err(e) => {
            warn!("connection {id}: {e}");
            return;
        }
    };
    let writer_sub = Arc::clone(&sub);
    let writer_thread = std::thread::spawn(move || write_loop(writer, writer_sub));
    read_loop(id, &stream, &sub, &shared);
    {
        let mut ctl = shared.controller.lock().expect("controller lock");
        if *ctl == Some(id) {
            *ctl = None;
        }
    }
    sub.close();
    let _ = writer_thread.join();
    let _ = stream.shutdown(Shutdown::Both);
    debug!("connection {id} closed");
}

fn write_loop(mut stream: TcpStream, sub: Arc<Subscription>) {
    let mut sequence = 0u64;
    loop {
        let item = match sub.recv(Duration::from_millis(200)) {
            Received::Item(item) => item,
            Received::Timeout => continue,
            Received::Closed => break,
        };
        sequence += 1;
        let msg = match &item {
            Outbound::Event(e) => WireMessage::event(sequence, e),
            Outbound::Ack { reply_to, ack } => WireMessage::ack(
                sequence,
                &AckPayload {
                    reply_to: *reply_to,
                    ack: ack.clone(),
                },
            ),
            Outbound::Error {
                reply_to,
                code,
                message,
            } => WireMessage::error(
                sequence,
                &ErrorPayload {
                    reply_to: *reply_to,
                    code: code.clone(),
                    message: message.clone(),
                },
            ),
        };
        if stream.write_all(encode_line(&msg).as_bytes()).is_err() {
            sub.close();
            break;
        }
    }
    let _ = stream.flush();
    let _ = stream.shutdown(Shutdown::Write);
}

enum Line {
    Text(String),
    TooLong(usize),
    Eof,
}

fn read_frame(reader: &mut impl BufRead) -> io::Result<Line> {
    let mut buf = Vec::new();
    let n = reader
        .by_ref()
        .take(MAX_LINE as u64 + 2)
        .read_until(b'\n', &mut buf)?;
    if n == 0 {
        return Ok(Line::Eof);
    }
    if buf.last() != Some(&b'\n') && buf.len() > MAX_LINE {
        let mut len = buf.len();
        loop {
            buf.clear();
            let n = reader.by_ref().take(1 << 16).read_until(b'\n', &mut buf)?;
            len += n;
            if n == 0 || buf.last() == Some(&b'\n') {
                break;
            }
        }
        return Ok(Line::TooLong(len));
    }
    Ok(Line::Text(String::from_utf8_lossy(&buf).into_owned()))
}

fn read_loop(id: usize, stream: &TcpStream, sub: &Arc<Subscription>, shared: &Shared) {
    let mut reader = BufReader::new(stream);
    let mut last_seq = 0u64;
    loop {
        let line = match read_frame(&mut reader) {
            Ok(Line::Text(t)) => t,
            Ok(Line::TooLong(len)) => {
                sub.push(error(
                    None,
                    "too_long",
                    FrameError::TooLong { len }.to_string(),
                ));
                continue;
            }
            Ok(Line::Eof) | Err(_) => return,
        };
        if line.trim().is_empty() {
            continue;
        }
        let msg = match decode_line(&line) {
            Ok(m) => m,
            Err(e) => {
                sub.push(error(None, e.code(), e.to_string()));
                continue;
            }
        };
        let seq = msg.sequence;
        if seq <= last_seq {
            sub.push(error(
                Some(seq),
                "sequence",
                format!("sequence {seq} does not follow {last_seq}"),
            ));
            continue;
        }
        last_seq = seq;
        if msg.kind != MessageKind::Command {
            sub.push(error(
                Some(seq),
                "unexpected_kind",
                format!("clients send commands, not {:?}", msg.kind),
            ));
            continue;
        }
        let command = match ClientCommand::from_value(&msg.payload) {
            Ok(c) => c,
            Err(e) => {
                sub.push(error(Some(seq), "invalid_command", e));
                continue;
            }
        };
        match command {
            ClientCommand::JoinController => {
                let mut ctl = shared.controller.lock().expect("controller lock");
                match *ctl {
                    Some(holder) if holder != id => {
                        sub.push(error(
                            Some(seq),
                            "second_controller",
                            "a controller is already connected",
                        ));
                        return;
                    }
                    _ => {
                        *ctl = Some(id);
                        let latest = shared.engine.hub().latest();
                        sub.push(Outbound::Ack {
                            reply_to: seq,
                            ack: Ack {
                                command: command.name().into(),
                                phase: latest
                                    .as_ref()
                                    .map_or(crate::scheduler::TurnPhase::AwaitStart, |e| e.phase),
                                sim_time: latest.map_or(0.0, |e| e.sim_time),
                            },
                        });
                    }
                }
            }
            ClientCommand::Engine(cmd) => {
                if *shared.controller.lock().expect("controller lock") != Some(id) {
                    sub.push(error(
                        Some(seq),
                        "not_controller",
                        "join as controller before sending commands",
                    ));
                    continue;
                }
                let reply_sub = Arc::clone(sub);
                let _ = shared.engine.send(
                    cmd,
                    Box::new(move |r| match r {
                        Ok(ack) => reply_sub.push(Outbound::Ack { reply_to: seq, ack }),
                        Err(e) => {
                            reply_sub.push(error(Some(seq), engine_error_code(&e), e.to_string()))
                        }
                    }),
                );
            }
        }
    }
}
