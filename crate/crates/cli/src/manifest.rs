//! Run manifests: every emitted artifact embeds the command, arguments,
//! seed, versions, and timing that produced it. JSON artifacts carry the
//! manifest as a field; CSV, SVG and DOT artifacts carry it as a comment.

use std::time::Instant;

use serde_json::{json, Value};

#[derive(Clone, Debug)]
pub struct RunManifest {
    command: String,
    arguments: Vec<String>,
    seed: Option<u64>,
    started: Instant,
}

impl RunManifest {
    /// Capture the invocation from the process arguments.
    pub fn from_env() -> RunManifest {
        let mut args: Vec<String> = std::env::args().collect();
        let command = if args.len() > 1 {
            args[1].clone()
        } else {
            String::new()
        };
        let arguments = if args.len() > 2 {
            args.split_off(2)
        } else {
            Vec::new()
        };
        RunManifest {
            command,
            arguments,
            seed: None,
            started: Instant::now(),
        }
    }

    pub fn with_seed(&self, seed: u64) -> RunManifest {
        let mut m = self.clone();
        m.seed = Some(seed);
        m
    }

    /// Manifest as a JSON value. `timing_ms` is the only field two identical
    /// invocations may disagree on.
    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "arguments": self.arguments,
            "seed": self.seed,
            "versions": {
                "cli": env!("CARGO_PKG_VERSION"),
                "core": iqcf_core::VERSION,
            },
            "timing_ms": self.started.elapsed().as_millis() as u64,
        })
    }

    fn comment_payload(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("manifest serializes")
    }

    /// Prefix a CSV document with a `#` manifest comment.
    pub fn embed_csv(&self, body: &str) -> String {
        format!("# manifest: {}\n{}", self.comment_payload(), body)
    }

    /// Prefix a DOT document with a `//` manifest comment.
    pub fn embed_dot(&self, body: &str) -> String {
        format!("// manifest: {}\n{}", self.comment_payload(), body)
    }

    /// Insert an XML manifest comment after the first line (the XML
    /// declaration) of an SVG document.
    pub fn embed_svg(&self, body: &str) -> String {
        let payload = self.comment_payload().replace("--", "- -");
        match body.find('\n') {
            Some(i) => format!(
                "{}\n<!-- manifest: {} -->{}",
                &body[..i],
                payload,
                &body[i..]
            ),
            None => format!("{}\n<!-- manifest: {} -->\n", body, payload),
        }
    }
}
