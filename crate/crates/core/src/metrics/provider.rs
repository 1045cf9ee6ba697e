//! Client side of the `jsonl-v1` external metric protocol.
//!
//! A provider is a child process speaking line-delimited JSON on
//! stdin/stdout. It announces itself with one handshake line:
//!
//! ```text
//! {"protocol":"jsonl-v1","name":"lpips","is_distance":true,"range":[0,1]}
//! ```
//!
//! then answers each `{"id":..,"ref":..,"test":..}` request with either
//! `{"id":..,"value":..}` or `{"id":..,"error":..}`. Closing stdin asks the
//! provider to exit. Its stderr is inherited and never parsed.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, ExitStatus, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{MetricDescriptor, MetricSource, Orientation, RawScore};
use crate::error::{Error, Result};

pub const PROTOCOL_VERSION: &str = "jsonl-v1";

const HANDSHAKE_TIMEOUT: Duration = Duration::from_secs(30);
const DEFAULT_SCORE_TIMEOUT: Duration = Duration::from_secs(120);
const SHUTDOWN_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Handshake {
    protocol: String,
    name: String,
    is_distance: bool,
    range: (f64, f64),
}

#[derive(Serialize)]
struct Request<'a> {
    id: &'a str,
    #[serde(rename = "ref")]
    reference: &'a str,
    test: &'a str,
}

#[derive(Debug, Deserialize)]
struct Response {
    id: String,
    #[serde(default)]
    value: Option<f64>,
    #[serde(default)]
    error: Option<String>,
}

/// One running provider process. Requests are strictly serial.
///
/// Dropping a session kills the process; call [`ProviderSession::close`]
/// for an orderly shutdown.
pub struct ProviderSession {
    descriptor: MetricDescriptor,
    child: Child,
    stdin: Option<BufWriter<ChildStdin>>,
    lines: Receiver<std::io::Result<String>>,
    next_id: u64,
    timeout: Duration,
    broken: bool,
}

impl std::fmt::Debug for ProviderSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProviderSession")
            .field("descriptor", &self.descriptor)
            .field("pid", &self.child.id())
            .field("next_id", &self.next_id)
            .finish_non_exhaustive()
    }
}

/// Spawns `command` and waits for its handshake.
pub fn provider_open(command: &[String]) -> Result<ProviderSession> {
    ProviderSession::open(command, HANDSHAKE_TIMEOUT)
}

impl ProviderSession {
    pub fn open(command: &[String], handshake_timeout: Duration) -> Result<Self> {
        let (program, args) = command.split_first().ok_or_else(|| Error::Spawn {
            command: String::new(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty command"),
        })?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| Error::Spawn {
                command: command.join(" "),
                source,
            })?;
        let stdout = child.stdout.take().expect("stdout was piped");
        let stdin = child.stdin.take().expect("stdin was piped");

        // A reader thread turns blocking line reads into a channel we can wait on with a deadline.
        let (tx, rx) = mpsc::channel();
        thread::Builder::new()
            .name("provider-stdout".into())
            .spawn(move || {
                for line in BufReader::new(stdout).lines() {
                    let stop = line.is_err();
                    if tx.send(line).is_err() || stop {
                        break;
                    }
                }
            })
            .map_err(|source| Error::Spawn {
                command: command.join(" "),
                source,
            })?;

        let mut session = Self {
            descriptor: MetricDescriptor {
                name: String::new().into(),
                orientation: Orientation::Distance,
                raw_range: (0.0, Some(1.0)),
                source: MetricSource::External(command.to_vec()),
            },
            child,
            stdin: Some(BufWriter::new(stdin)),
            lines: rx,
            next_id: 0,
            timeout: DEFAULT_SCORE_TIMEOUT,
            broken: false,
        };

        let line = match session.lines.recv_timeout(handshake_timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(Error::Handshake(format!("reading handshake: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                return Err(Error::Handshake(format!("no handshake within {handshake_timeout:?}")))
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(Error::Handshake("provider closed stdout before handshake".into()))
            }
        };
        let hs: Handshake = serde_json::from_str(line.trim())
            .map_err(|e| Error::Handshake(format!("malformed handshake `{}`: {e}", line.trim())))?;
        if hs.protocol != PROTOCOL_VERSION {
            return Err(Error::Handshake(format!(
                "unsupported protocol `{}`, expected `{PROTOCOL_VERSION}`",
                hs.protocol
            )));
        }
        if hs.name.is_empty() {
            return Err(Error::Handshake("empty metric name".into()));
        }
        if !(hs.range.0.is_finite() && hs.range.1.is_finite() && hs.range.0 < hs.range.1) {
            return Err(Error::Handshake(format!("invalid range {:?}", hs.range)));
        }
        session.descriptor.name = hs.name.into();
        session.descriptor.orientation = if hs.is_distance {
            Orientation::Distance
        } else {
            Orientation::Similarity
        };
        session.descriptor.raw_range = (hs.range.0, Some(hs.range.1));
        Ok(session)
    }

    pub fn descriptor(&self) -> &MetricDescriptor {
        &self.descriptor
    }

    /// Per-pair response deadline (120 s unless changed).
    pub fn set_timeout(&mut self, timeout: Duration) {
        self.timeout = timeout;
    }

    /// False once a protocol failure or timeout has desynchronized the stream.
    pub fn is_usable(&self) -> bool {
        !self.broken
    }

    /// Scores one `(reference, test)` pair of image files.
    pub fn score(&mut self, reference: &Path, test: &Path) -> Result<RawScore<'_>> {
        if self.broken {
            return Err(Error::Protocol("session is no longer usable".into()));
        }
        let id = self.next_id.to_string();
        self.next_id += 1;
        match self.exchange(&id, reference, test) {
            Ok(value) => Ok(RawScore {
                value,
                metric: &self.descriptor,
            }),
            Err(e) => {
                if !matches!(e, Error::Provider(_)) {
                    self.broken = true;
                }
                Err(e)
            }
        }
    }

    fn exchange(&mut self, id: &str, reference: &Path, test: &Path) -> Result<f64> {
        let path_str = |p: &Path| {
            p.to_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::Domain(format!("path {} is not UTF-8", p.display())))
        };
        let (reference, test) = (path_str(reference)?, path_str(test)?);
        let mut line = serde_json::to_string(&Request {
            id,
            reference: &reference,
            test: &test,
        })
        .expect("request serializes");
        line.push('\n');
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| Error::Protocol("provider stdin already closed".into()))?;
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::Protocol(format!("writing request: {e}")))?;

        let reply = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(reply)) => reply,
            Ok(Err(e)) => return Err(Error::Protocol(format!("reading response: {e}"))),
            Err(RecvTimeoutError::Timeout) => return Err(Error::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => return Err(Error::Protocol("provider exited mid-request".into())),
        };
        let resp: Response = serde_json::from_str(reply.trim())
            .map_err(|e| Error::Protocol(format!("malformed response `{}`: {e}", reply.trim())))?;
        if resp.id != id {
            return Err(Error::Protocol(format!(
                "response id `{}` does not match request `{id}`",
                resp.id
            )));
        }
        match (resp.value, resp.error) {
            (_, Some(err)) => Err(Error::Provider(err)),
            (Some(value), None) => Ok(value),
            (None, None) => Err(Error::Protocol("response has neither value nor error".into())),
        }
    }

    /// Closes stdin and waits up to 10 s for the provider to exit with status 0.
    pub fn close(mut self) -> Result<ExitStatus> {
        drop(self.stdin.take());
        let deadline = Instant::now() + SHUTDOWN_TIMEOUT;
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) if status.success() => return Ok(status),
                Ok(Some(status)) => return Err(Error::Protocol(format!("provider exited with {status}"))),
                Ok(None) if Instant::now() >= deadline => {
                    let _ = self.child.kill();
                    let _ = self.child.wait();
                    return Err(Error::Protocol(format!(
                        "provider still running {SHUTDOWN_TIMEOUT:?} after stdin closed"
                    )));
                }
                Ok(None) => thread::sleep(Duration::from_millis(10)),
                Err(e) => return Err(Error::Protocol(format!("waiting for provider: {e}"))),
            }
        }
    }
}

impl Drop for ProviderSession {
    fn drop(&mut self) {
        if let Ok(None) = self.child.try_wait() {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}
