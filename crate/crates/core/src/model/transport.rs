use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use super::protocol::{Hello, RepairRequest, RepairResponse};
use super::{ProgramInput, RepairModel, RepairOutput};
use crate::error::ModelError;

/// How requests reach a model.
pub trait Transport: Send + Sync {
    /// Performs the protocol handshake and returns the model's name.
    fn handshake(&self) -> Result<String, ModelError>;
    fn request(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError>;
    /// Upper bound on concurrent requests.
    fn max_inflight(&self) -> usize;
    /// Stable description of the endpoint, part of the cache identity.
    fn describe(&self) -> String;
}

/// Direct function calls; no serialization.
pub struct InProcess {
    model: Arc<dyn RepairModel>,
}

impl InProcess {
    pub fn new(model: Arc<dyn RepairModel>) -> Self {
        Self { model }
    }
}

impl Transport for InProcess {
    fn handshake(&self) -> Result<String, ModelError> {
        Ok(self.model.name().to_string())
    }

    fn request(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        self.model.repair(input, beam)
    }

    fn max_inflight(&self) -> usize {
        std::thread::available_parallelism().map_or(4, |n| n.get())
    }

    fn describe(&self) -> String {
        format!("inproc:{}", self.model.name())
    }
}

struct Proc {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Proc {
    fn send(&mut self, line: &str) -> Result<(), ModelError> {
        let written = self
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.write_all(b"\n"))
            .and_then(|_| self.stdin.flush());
        written.map_err(|e| self.died(&format!("write failed: {e}")))
    }

    fn recv(&mut self, deadline: Instant, timeout: Duration) -> Result<String, ModelError> {
        let left = deadline.saturating_duration_since(Instant::now());
        match self.lines.recv_timeout(left) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(self.died(&format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(ModelError::Timeout(timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(self.died("model closed stdout")),
        }
    }

    fn died(&mut self, what: &str) -> ModelError {
        let status = match self.child.try_wait() {
            Ok(Some(status)) => format!(" ({status})"),
            _ => String::new(),
        };
        ModelError::Transport(format!("{what}{status}"))
    }
}

impl Drop for Proc {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Newline-delimited JSON over a child process's stdin/stdout. Requests are
/// serialized (one in flight).
pub struct SubprocessTransport {
    command: String,
    timeout: Duration,
    proc: Mutex<Proc>,
    next_id: AtomicU64,
}

impl SubprocessTransport {
    /// Spawns `command` through `sh -c`.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self, ModelError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| ModelError::Transport(format!("spawning {command:?}: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        Ok(Self {
            command: command.to_string(),
            timeout,
            proc: Mutex::new(Proc {
                child,
                stdin,
                lines: rx,
            }),
            next_id: AtomicU64::new(1),
        })
    }
}

impl Transport for SubprocessTransport {
    fn handshake(&self) -> Result<String, ModelError> {
        let mut p = self.proc.lock().expect("subprocess lock poisoned");
        let hello = serde_json::to_string(&Hello::request()).expect("hello serializes");
        p.send(&hello)?;
        let deadline = Instant::now() + self.timeout;
        let line = p.recv(deadline, self.timeout).map_err(|e| match e {
            ModelError::Timeout(_) | ModelError::Transport(_) => ModelError::Handshake(e.to_string()),
            other => other,
        })?;
        Hello::accept(&line)
    }

    fn request(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        let seq = self.next_id.fetch_add(1, Ordering::Relaxed);
        let id = seq.to_string();
        let body = serde_json::to_string(&RepairRequest::new(id.clone(), input, beam))
            .expect("request serializes");
        let mut p = self.proc.lock().expect("subprocess lock poisoned");
        p.send(&body)?;
        let deadline = Instant::now() + self.timeout;
        loop {
            let line = p.recv(deadline, self.timeout)?;
            let resp: RepairResponse = serde_json::from_str(&line)
                .map_err(|e| ModelError::Protocol(format!("{e} in {line:?}")))?;
            // Late answers to earlier requests that timed out are dropped.
            let stale = resp
                .id
                .as_deref()
                .and_then(|s| s.parse::<u64>().ok())
                .is_some_and(|other| other < seq);
            if !stale {
                return resp.into_output(&id, beam);
            }
        }
    }

    fn max_inflight(&self) -> usize {
        1
    }

    fn describe(&self) -> String {
        format!("cmd:{}", self.command)
    }
}

/// `GET /v1/hello` and `POST /v1/repair` against a base URL.
pub struct HttpTransport {
    base: String,
    agent: ureq::Agent,
    max_inflight: usize,
    timeout: Duration,
    next_id: AtomicU64,
}

impl HttpTransport {
    pub fn new(base_url: &str, max_inflight: usize, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            base: base_url.trim_end_matches('/').to_string(),
            agent,
            max_inflight: max_inflight.max(1),
            timeout,
            next_id: AtomicU64::new(1),
        }
    }

    fn map_err(&self, e: ureq::Error) -> ModelError {
        match e {
            ureq::Error::Timeout(_) => ModelError::Timeout(self.timeout),
            other => ModelError::Transport(format!("{}: {other}", self.base)),
        }
    }

    fn read(&self, mut resp: ureq::http::Response<ureq::Body>) -> Result<String, ModelError> {
        let status = resp.status();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| self.map_err(e))?;
        if status != 200 {
            return Err(ModelError::Transport(format!("HTTP {status}: {body}")));
        }
        Ok(body)
    }
}

impl Transport for HttpTransport {
    fn handshake(&self) -> Result<String, ModelError> {
        let resp = self
            .agent
            .get(&format!("{}/v1/hello", self.base))
            .call()
            .map_err(|e| ModelError::Handshake(self.map_err(e).to_string()))?;
        let body = self
            .read(resp)
            .map_err(|e| ModelError::Handshake(e.to_string()))?;
        Hello::accept(&body)
    }

    fn request(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed).to_string();
        let body = serde_json::to_string(&RepairRequest::new(id.clone(), input, beam))
            .expect("request serializes");
        let resp = self
            .agent
            .post(&format!("{}/v1/repair", self.base))
            .header("content-type", "application/json")
            .send(body.as_str())
            .map_err(|e| self.map_err(e))?;
        let text = self.read(resp)?;
        let resp: RepairResponse = serde_json::from_str(&text)
            .map_err(|e| ModelError::Protocol(format!("{e} in {text:?}")))?;
        resp.into_output(&id, beam)
    }

    fn max_inflight(&self) -> usize {
        self.max_inflight
    }

    fn describe(&self) -> String {
        format!("http:{}", self.base)
    }
}
