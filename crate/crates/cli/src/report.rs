use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Gate {
    pub name: String,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub approximate: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs_digest: String,
    pub seed: u64,
    pub gates: Vec<Gate>,
    pub data: BTreeMap<String, Value>,
    /// Milliseconds per phase; empty unless `--timings` is given, so reports stay byte-identical.
    pub timings: BTreeMap<String, f64>,
    #[serde(skip)]
    clock: Option<Instant>,
}

impl Report {
    pub fn new(command: &str, digest: String, seed: u64, timed: bool) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs_digest: digest,
            seed,
            gates: Vec::new(),
            data: BTreeMap::new(),
            timings: BTreeMap::new(),
            clock: timed.then(Instant::now),
        }
    }

    pub fn gate(&mut self, name: &str, verdict: bool) {
        self.push(name, verdict, None, false);
    }

    pub fn gate_with(&mut self, name: &str, verdict: bool, witness: Option<Value>) {
        self.push(name, verdict, witness, false);
    }

    pub fn push(&mut self, name: &str, verdict: bool, witness: Option<Value>, approximate: bool) {
        self.gates.push(Gate { name: name.to_string(), verdict, witness, approximate });
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.to_string(), serde_json::to_value(value).expect("report data serializes"));
    }

    /// Records the time since the previous lap under `phase`.
    pub fn lap(&mut self, phase: &str) {
        if let Some(t) = self.clock {
            self.timings.insert(phase.to_string(), t.elapsed().as_secs_f64() * 1000.0);
            self.clock = Some(Instant::now());
        }
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.verdict)
    }
}

/// sha256 over the command, its parameters and the bytes of every input file.
pub fn digest(command: &str, params: &Value, inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    h.update(params.to_string().as_bytes());
    for bytes in inputs {
        h.update([0]);
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    format!("{:x}", h.finalize())
}
