use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use super::wire::{decode_line, encode_line, ClientCommand, WireMessage};
use crate::engine::Command;

/// Minimal blocking client for the control server.
pub struct WireClient {
    stream: TcpStream,
    reader: BufReader<TcpStream>,
    sequence: u64,
    /// Every line received, verbatim.
    pub transcript: Vec<String>,
}

impl WireClient {
    pub fn connect(addr: impl ToSocketAddrs) -> io::Result<Self> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        Ok(WireClient {
            stream,
            reader,
            sequence: 0,
            transcript: Vec::new(),
        })
    }

    /// Sends a command and returns the sequence it was given.
    pub fn send(&mut self, command: ClientCommand) -> io::Result<u64> {
        self.sequence += 1;
        self.send_raw(&encode_line(&WireMessage::command(self.sequence, command)))?;
        Ok(self.sequence)
    }

    pub fn command(&mut self, command: Command) -> io::Result<u64> {
        self.send(ClientCommand::Engine(command))
    }

    pub fn send_raw(&mut self, line: &str) -> io::Result<()> {
        self.stream.write_all(line.as_bytes())?;
        self.stream.flush()
    }

    /// Next frame; `Ok(None)` once the server has closed the connection.
    pub fn recv(&mut self, timeout: Duration) -> io::Result<Option<WireMessage>> {
        self.stream
            .set_read_timeout(Some(timeout.max(Duration::from_millis(1))))?;
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        self.transcript.push(line.trim_end().to_string());
        decode_line(&line)
            .map(Some)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    /// Reads frames until `pred` matches one, returning everything read.
    pub fn recv_until(
        &mut self,
        timeout: Duration,
        mut pred: impl FnMut(&WireMessage) -> bool,
    ) -> io::Result<Vec<WireMessage>> {
        let deadline = Instant::now() + timeout;
        let mut out = Vec::new();
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                return Err(io::Error::new(io::ErrorKind::TimedOut, "no matching frame"));
            }
            match self.recv(left)? {
                Some(m) => {
                    let done = pred(&m);
                    out.push(m);
                    if done {
                        return Ok(out);
                    }
                }
                None => {
                    return Err(io::Error::new(
                        io::ErrorKind::UnexpectedEof,
                        "connection closed",
                    ))
                }
            }
        }
    }
}
