//! Client for an out-of-process classifier.
//!
//! Wire protocol, one JSON object per line over the child's stdin/stdout:
//!
//! ```text
//! -> {"id": 7, "n_p": 1024, "points": [[x, y, z, i], ...], "prior": [p0, ..., pk]}
//! <- {"id": 7, "scores": [s0, ..., sk]}
//! ```
//!
//! Requests are answered strictly in order. Any failure (timeout, bad line,
//! dead process) yields the prior unchanged and marks the result degraded.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{ClassifierError, SampledCloud};
use crate::classes::ClassScores;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierRequest {
    pub id: i64,
    pub n_p: usize,
    pub points: Vec<[f64; 4]>,
    pub prior: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierResponse {
    pub id: i64,
    #[serde(default)]
    pub scores: Option<Vec<f64>>,
    #[serde(default)]
    pub error: Option<String>,
}

/// Result of one external classification.
#[derive(Debug)]
pub struct ExternalOutcome {
    pub scores: ClassScores,
    /// True when the prior was returned because the call failed.
    pub degraded: bool,
    pub error: Option<ClassifierError>,
}

pub struct ExternalClassifier {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    next_id: i64,
    timeout: Duration,
    dead: Option<String>,
    degraded_calls: usize,
}

impl std::fmt::Debug for ExternalClassifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalClassifier")
            .field("pid", &self.child.id())
            .field("next_id", &self.next_id)
            .field("timeout", &self.timeout)
            .field("dead", &self.dead)
            .finish()
    }
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_millis(200);

impl ExternalClassifier {
    /// Starts `command` through `sh -c`.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self, ClassifierError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(ClassifierError::Spawn)?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            lines: rx,
            next_id: 0,
            timeout,
            dead: None,
            degraded_calls: 0,
        })
    }

    /// Number of calls that fell back to the prior so far.
    pub fn degraded_calls(&self) -> usize {
        self.degraded_calls
    }

    /// Classifies one sampled cloud. Never fails; see [`ExternalOutcome`].
    pub fn classify(&mut self, cloud: &SampledCloud, prior: &ClassScores) -> ExternalOutcome {
        match self.try_classify(cloud, prior) {
            Ok(scores) => ExternalOutcome {
                scores,
                degraded: false,
                error: None,
            },
            Err(e) => {
                self.degraded_calls += 1;
                log::warn!("external classifier degraded: {e}");
                ExternalOutcome {
                    scores: prior.clone(),
                    degraded: true,
                    error: Some(e),
                }
            }
        }
    }

    fn try_classify(&mut self, cloud: &SampledCloud, prior: &ClassScores) -> Result<ClassScores, ClassifierError> {
        if let Some(reason) = &self.dead {
            return Err(ClassifierError::Unavailable(reason.clone()));
        }
        let id = self.next_id;
        self.next_id += 1;
        let req = ClassifierRequest {
            id,
            n_p: cloud.points.len(),
            points: cloud.points.iter().map(|p| [p.x, p.y, p.z, p.intensity]).collect(),
            prior: prior.as_slice().to_vec(),
        };
        let mut line = serde_json::to_string(&req).expect("request serializes");
        line.push('\n');
        let write = self
            .stdin
            .as_mut()
            .ok_or_else(|| ClassifierError::Unavailable("stdin closed".into()))
            .and_then(|w| {
                w.write_all(line.as_bytes())
                    .and_then(|_| w.flush())
                    .map_err(|e| ClassifierError::Unavailable(e.to_string()))
            });
        if let Err(e) = write {
            self.dead = Some(e.to_string());
            return Err(e);
        }

        let deadline = Instant::now() + self.timeout;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            let raw = match self.lines.recv_timeout(left) {
                Ok(raw) => raw,
                Err(RecvTimeoutError::Timeout) => {
                    return Err(ClassifierError::Timeout(self.timeout.as_millis() as u64))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    self.dead = Some("process closed its output".into());
                    return Err(ClassifierError::Unavailable("process closed its output".into()));
                }
            };
            let resp: ClassifierResponse = serde_json::from_str(&raw)
                .map_err(|e| ClassifierError::MalformedResponse(e.to_string()))?;
            if let Some(err) = resp.error {
                return Err(ClassifierError::MalformedResponse(err));
            }
            // late answer to a request that already timed out
            if resp.id >= 0 && resp.id < id {
                continue;
            }
            if resp.id != id {
                return Err(ClassifierError::MalformedResponse(format!(
                    "expected id {id}, got {}",
                    resp.id
                )));
            }
            let mut scores = resp
                .scores
                .ok_or_else(|| ClassifierError::MalformedResponse("missing scores".into()))?;
            if scores.len() + 1 == prior.len() {
                scores.push(0.0);
            }
            if scores.len() != prior.len() {
                return Err(ClassifierError::MalformedResponse(format!(
                    "expected {} scores, got {}",
                    prior.len(),
                    scores.len()
                )));
            }
            return ClassScores::from_weights(scores)
                .map_err(|e| ClassifierError::MalformedResponse(e.to_string()));
        }
    }
}

impl Drop for ExternalClassifier {
    fn drop(&mut self) {
        drop(self.stdin.take());
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point4;

    fn cloud() -> SampledCloud {
        SampledCloud {
            points: vec![Point4::new(1.0, 2.0, 3.0, 0.5); 4],
            source_indices: (0..4).collect(),
            source_count: 4,
        }
    }

    const ECHO_PRIOR: &str = r#"python3 -u -c '
import sys, json
for line in sys.stdin:
    r = json.loads(line)
    print(json.dumps({"id": r["id"], "scores": r["prior"]}), flush=True)
'"#;

    #[test]
    fn echo_returns_prior_not_degraded() {
        let mut c = ExternalClassifier::spawn(ECHO_PRIOR, Duration::from_secs(5)).unwrap();
        let prior = ClassScores::from_weights(vec![0.6, 0.3, 0.1]).unwrap();
        for _ in 0..3 {
            let out = c.classify(&cloud(), &prior);
            assert!(!out.degraded, "{:?}", out.error);
            for (a, b) in out.scores.as_slice().iter().zip(prior.as_slice()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert_eq!(c.degraded_calls(), 0);
    }

    #[test]
    fn unknown_padded_when_server_sends_k_scores() {
        let cmd = r#"python3 -u -c '
import sys, json
for line in sys.stdin:
    r = json.loads(line)
    print(json.dumps({"id": r["id"], "scores": [0.0, 2.0]}), flush=True)
'"#;
        let mut c = ExternalClassifier::spawn(cmd, Duration::from_secs(5)).unwrap();
        let out = c.classify(&cloud(), &ClassScores::uniform(2));
        assert!(!out.degraded);
        assert_eq!(out.scores.as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn silent_endpoint_times_out_to_prior() {
        let mut c = ExternalClassifier::spawn("cat > /dev/null", Duration::from_millis(50)).unwrap();
        let prior = ClassScores::one_hot(2, 1);
        let out = c.classify(&cloud(), &prior);
        assert!(out.degraded);
        assert!(matches!(out.error, Some(ClassifierError::Timeout(50))));
        assert_eq!(out.scores, prior);
    }

    #[test]
    fn dead_endpoint_degrades() {
        let mut c = ExternalClassifier::spawn("exit 0", Duration::from_millis(500)).unwrap();
        let prior = ClassScores::uniform(2);
        for _ in 0..2 {
            let out = c.classify(&cloud(), &prior);
            assert!(out.degraded);
            assert_eq!(out.scores, prior);
        }
        assert_eq!(c.degraded_calls(), 2);
    }

    #[test]
    fn garbage_is_malformed() {
        let cmd = "while read l; do echo 'not json'; done";
        let mut c = ExternalClassifier::spawn(cmd, Duration::from_secs(5)).unwrap();
        let out = c.classify(&cloud(), &ClassScores::uniform(2));
        assert!(matches!(out.error, Some(ClassifierError::MalformedResponse(_))));
    }

    #[test]
    fn request_round_trips() {
        let req = ClassifierRequest { id: 3, n_p: 1, points: vec![[1.0, 2.0, 3.0, 0.5]], prior: vec![0.5, 0.5, 0.0] };
        let s = serde_json::to_string(&req).unwrap();
        assert_eq!(s, r#"{"id":3,"n_p":1,"points":[[1.0,2.0,3.0,0.5]],"prior":[0.5,0.5,0.0]}"#);
    }
}
