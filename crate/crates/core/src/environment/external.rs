//! Client for a detector running in another process.
//!
//! The wire format is JSON lines (UTF-8, LF-terminated). Each request names
//! an image file; each response carries boxes, scores and a context vector:
//!
//! ```text
//! -> {"id": 3, "image": "/tmp/.../req_3.ppm"}
//! <- {"id": 3, "detections": [{"bbox": [x0, y0, x1, y1], "score": 0.9}], "context": [...]}
//! ```
//!
//! The context must hold 512 or 1024 values; 1024 is max-pooled down to 512.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use tempfile::TempDir;

use crate::environment::{DetectRequest, Detector, DetectorOutput};
use crate::error::{Error, Result};
use crate::features::{reduce_context, RAW_CONTEXT_DIMS};
use crate::imaging::write_ppm;
use crate::metrics::{Box2D, Detection};

pub const DEFAULT_TIMEOUT_SECS: f64 = 30.0;

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct WireRequest {
    pub id: u64,
    pub image: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct WireDetection {
    pub bbox: [f64; 4],
    pub score: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct WireResponse {
    pub id: u64,
    pub detections: Vec<WireDetection>,
    pub context: Vec<f64>,
}

enum Connection {
    Stdio {
        child: Child,
        stdin: ChildStdin,
        lines: Receiver<std::io::Result<String>>,
    },
    Tcp {
        reader: BufReader<TcpStream>,
        writer: TcpStream,
    },
}

impl Connection {
    fn send(&mut self, line: &str) -> Result<()> {
        let res = match self {
            Self::Stdio { stdin, .. } => stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()),
            Self::Tcp { writer, .. } => writer.write_all(line.as_bytes()).and_then(|_| writer.flush()),
        };
        res.map_err(|e| Error::Transport(format!("sending request: {e}")))
    }

    fn receive(&mut self, timeout: Duration) -> Result<String> {
        match self {
            Self::Stdio { lines, .. } => match lines.recv_timeout(timeout) {
                Ok(Ok(line)) => Ok(line),
                Ok(Err(e)) => Err(Error::Transport(format!("reading response: {e}"))),
                Err(RecvTimeoutError::Timeout) => {
                    Err(Error::Transport(format!("no response within {timeout:?}")))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    Err(Error::Transport("detector process closed its output".into()))
                }
            },
            Self::Tcp { reader, .. } => {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => Err(Error::Transport("detector closed the connection".into())),
                    Ok(_) => Ok(line),
                    Err(e) if matches!(e.kind(), std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut) => {
                        Err(Error::Transport(format!("no response within {timeout:?}")))
                    }
                    Err(e) => Err(Error::Transport(format!("reading response: {e}"))),
                }
            }
        }
    }
}

impl Drop for Connection {
    fn drop(&mut self) {
        if let Self::Stdio { child, .. } = self {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// One connection to an external detector. Requests on a connection are
/// serialised; use one detector per worker for parallel evaluation.
pub struct ExternalDetector {
    conn: Mutex<Connection>,
    next_id: AtomicU64,
    timeout: Duration,
    scratch: TempDir,
}

impl ExternalDetector {
    /// `endpoint` is `tcp://host:port` or a whitespace-separated command line.
    pub fn connect(endpoint: &str, timeout: Duration) -> Result<Self> {
        let conn = match endpoint.strip_prefix("tcp://") {
            Some(addr) => {
                let writer = TcpStream::connect(addr)
                    .map_err(|e| Error::Transport(format!("connecting to {addr}: {e}")))?;
                writer.set_read_timeout(Some(timeout))?;
                let reader = BufReader::new(writer.try_clone()?);
                Connection::Tcp { reader, writer }
            }
            None => spawn(endpoint)?,
        };
        Ok(Self {
            conn: Mutex::new(conn),
            next_id: AtomicU64::new(0),
            timeout,
            scratch: tempfile::Builder::new().prefix("rlaod-detect").tempdir()?,
        })
    }

    fn round_trip(&self, image_path: PathBuf, id: u64) -> Result<WireResponse> {
        let request = WireRequest {
            id,
            image: image_path.to_string_lossy().into_owned(),
        };
        let mut line = serde_json::to_string(&request)?;
        line.push('\n');
        let mut conn = self.conn.lock().map_err(|_| Error::Transport("connection poisoned".into()))?;
        conn.send(&line)?;
        let reply = conn.receive(self.timeout)?;
        parse_response(&reply, id)
    }
}

fn spawn(command: &str) -> Result<Connection> {
    let mut parts = command.split_whitespace();
    let program = parts
        .next()
        .ok_or_else(|| Error::Config("empty detector command".into()))?;
    let mut child = Command::new(program)
        .args(parts)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| Error::Transport(format!("spawning '{program}': {e}")))?;
    let stdin = child.stdin.take().expect("piped stdin");
    let stdout = child.stdout.take().expect("piped stdout");
    let (tx, lines) = mpsc::channel();
    std::thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    Ok(Connection::Stdio { child, stdin, lines })
}

/// Parses and validates one response line.
pub(crate) fn parse_response(line: &str, expected_id: u64) -> Result<WireResponse> {
    let value: serde_json::Value = serde_json::from_str(line.trim_end())
        .map_err(|e| Error::Protocol(format!("malformed JSON: {e}")))?;
    for key in ["id", "detections", "context"] {
        if value.get(key).is_none() {
            return Err(Error::Protocol(format!("response missing \"{key}\"")));
        }
    }
    let response: WireResponse =
        serde_json::from_value(value).map_err(|e| Error::Protocol(format!("bad response: {e}")))?;
    if response.id != expected_id {
        return Err(Error::Protocol(format!(
            "response id {} does not match request {expected_id}",
            response.id
        )));
    }
    if !RAW_CONTEXT_DIMS.contains(&response.context.len()) {
        return Err(Error::Protocol(format!(
            "context length {} is neither 512 nor 1024",
            response.context.len()
        )));
    }
    Ok(response)
}

pub(crate) fn into_output(response: WireResponse) -> Result<DetectorOutput> {
    let detections = response
        .detections
        .into_iter()
        .map(|d| {
            let [x0, y0, x1, y1] = d.bbox;
            let bbox = Box2D::new(x0, y0, x1, y1).map_err(|e| Error::Protocol(e.to_string()))?;
            if !(0.0..=1.0).contains(&d.score) {
                return Err(Error::Protocol(format!("score {} outside [0, 1]", d.score)));
            }
            Ok(Detection::new(bbox, d.score))
        })
        .collect::<Result<Vec<_>>>()?;
    if response.context.iter().any(|v| !v.is_finite()) {
        return Err(Error::Protocol("context contains non-finite values".into()));
    }
    Ok(DetectorOutput {
        detections,
        context: reduce_context(&response.context)?,
    })
}

impl Detector for ExternalDetector {
    fn name(&self) -> &str {
        "external"
    }

    fn detect(&self, request: &DetectRequest<'_>) -> Result<DetectorOutput> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let path = self.scratch.path().join(format!("req_{id}.ppm"));
        write_ppm(&path, request.image)?;
        let response = self.round_trip(path.clone(), id);
        let _ = std::fs::remove_file(&path);
        into_output(response?)
    }
}
