//! Run reports: a versioned JSON object plus a short text rendering.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::json::{CertificateJson, SCHEMA};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    /// SHA-256 over the arguments and every file they reference.
    pub inputs: String,
    pub certificate: Option<CertificateJson>,
    pub processed_prefix: Option<usize>,
    pub warnings: Vec<String>,
    pub exit_code: i32,
    /// Command-specific results.
    pub details: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: String, inputs: String) -> Self {
        RunReport {
            schema: SCHEMA,
            command,
            inputs,
            certificate: None,
            processed_prefix: None,
            warnings: Vec::new(),
            exit_code: 0,
            details: serde_json::Value::Null,
            error: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "diagkit {}", self.command);
        if let Some(e) = &self.error {
            let _ = writeln!(s, "  error: {e}");
        }
        if let Some(p) = self.processed_prefix {
            let _ = writeln!(s, "  processed prefix: {p}");
        }
        if let Some(c) = &self.certificate {
            let _ = writeln!(s, "  idempotency residual: {:.3e}", c.idempotency_residual);
            let _ = writeln!(s, "  unitarity residual:   {:.3e}", c.unitarity_residual);
            let _ = writeln!(s, "  diagonal residual:    {:.3e}", c.diagonal_residual);
            match c.norm_bound_claimed {
                Some(b) => {
                    let _ = writeln!(s, "  norm: {:.6} (bound {:.6})", c.norm_observed, b);
                }
                None => {
                    let _ = writeln!(s, "  norm: {:.6}", c.norm_observed);
                }
            }
            if let Some(k) = c.similarity_condition {
                let _ = writeln!(s, "  similarity condition: {k:.3e}");
            }
        }
        if let serde_json::Value::Object(map) = &self.details {
            for (k, v) in map {
                if !v.is_object() && !v.is_array() {
                    let _ = writeln!(s, "  {k}: {v}");
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(s, "  warning: {w}");
        }
        let status = match self.exit_code {
            0 => "ok",
            3 => "infeasible",
            4 => "certificate failed",
            _ => "usage error",
        };
        let _ = writeln!(s, "  status: {status} (exit {})", self.exit_code);
        s
    }
}

/// Accumulates everything a run reads.
#[derive(Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn feed(&mut self, bytes: &[u8]) {
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}
