//! Versioned, hashed JSON artifacts.
//!
//! Every artifact is an envelope
//!
//! ```json
//! { "schema": "...", "tool_version": "...", "content_hash": "sha256:<hex>", "body": { ... } }
//! ```
//!
//! where the hash covers the compact serialization of `body` with keys in
//! sorted order. Artifacts that reference another one record its
//! `content_hash`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use shieldnn_core::synthesis::{BoundaryTrace, FilterNetwork, ReluNetwork, SynthesisConfig};
use shieldnn_core::{LieContext, VerificationCertificate};

use crate::error::{CliError, Result};

pub const CERTIFICATE_SCHEMA: &str = "shieldnn/certificate/v1";
pub const FILTER_SCHEMA: &str = "shieldnn/filter/v1";
pub const CAMPAIGN_SCHEMA: &str = "shieldnn/campaign-summary/v1";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    schema: String,
    tool_version: String,
    content_hash: String,
    body: serde_json::Value,
}

/// `sha256:<hex>` of the canonical form of `body`.
pub fn content_hash(body: &serde_json::Value) -> String {
    // `Value` keeps object keys sorted, so this is canonical
    let bytes = serde_json::to_vec(body).expect("JSON value serializes");
    format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
}

/// Serializes `body` into an envelope; returns the text and the body hash.
pub fn encode<T: Serialize>(schema: &str, body: &T) -> (String, String) {
    let body = serde_json::to_value(body).expect("artifact body serializes");
    let hash = content_hash(&body);
    let env = Envelope {
        schema: schema.to_owned(),
        tool_version: TOOL_VERSION.to_owned(),
        content_hash: hash.clone(),
        body,
    };
    let mut text = serde_json::to_string_pretty(&env).expect("envelope serializes");
    text.push('\n');
    (text, hash)
}

pub fn write<T: Serialize>(path: &Path, schema: &str, body: &T) -> Result<String> {
    let (text, hash) = encode(schema, body);
    write_text(path, &text)?;
    Ok(hash)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// A decoded artifact.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub body: T,
    /// Hash recomputed from the body as read.
    pub hash: String,
    /// Hash stored in the file.
    pub recorded_hash: String,
    pub tool_version: String,
}

impl<T> Loaded<T> {
    pub fn hash_matches(&self) -> bool {
        self.hash == self.recorded_hash
    }
}

pub fn decode<T: DeserializeOwned>(text: &str, schema: &'static str, path: &Path) -> Result<Loaded<T>> {
    let json_err = |source| CliError::Json {
        path: path.to_owned(),
        source,
    };
    let env: Envelope = serde_json::from_str(text).map_err(json_err)?;
    if env.schema != schema {
        return Err(CliError::Schema {
            path: path.to_owned(),
            expected: schema,
            found: env.schema,
        });
    }
    let hash = content_hash(&env.body);
    let body = T::deserialize(env.body).map_err(json_err)?;
    Ok(Loaded {
        body,
        hash,
        recorded_hash: env.content_hash,
        tool_version: env.tool_version,
    })
}

pub fn read<T: DeserializeOwned>(path: &Path, schema: &'static str) -> Result<Loaded<T>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    decode(&text, schema, path)
}

/// Body of a filter artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterFile {
    pub context: LieContext,
    /// `content_hash` of the certificate the filter was synthesized from.
    pub certificate_hash: String,
    pub synthesis: SynthesisConfig,
    pub xi0: f64,
    pub trace: BoundaryTrace,
    pub filter: FilterNetwork,
    pub relu: ReluNetwork,
}

pub fn read_certificate(path: &Path) -> Result<Loaded<VerificationCertificate>> {
    read(path, CERTIFICATE_SCHEMA)
}

pub fn read_filter(path: &Path) -> Result<Loaded<FilterFile>> {
    read(path, FILTER_SCHEMA)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Body {
        b: f64,
        a: Vec<u32>,
    }

    #[test]
    fn envelope_round_trip() {
        let body = Body { b: 0.1 + 0.2, a: vec![1, 2] };
        let (text, hash) = encode("test/v1", &body);
        let back: Loaded<Body> = decode(&text, "test/v1", Path::new("mem")).unwrap();
        assert_eq!(back.body, body);
        assert_eq!(back.hash, hash);
        assert!(back.hash_matches());
        assert_eq!(back.tool_version, TOOL_VERSION);
    }

    #[test]
    fn tampering_changes_hash() {
        let (text, _) = encode("test/v1", &Body { b: 1.0, a: vec![] });
        let tampered = text.replace("\"b\": 1.0", "\"b\": 1.5");
        assert_ne!(tampered, text);
        let back: Loaded<Body> = decode(&tampered, "test/v1", Path::new("mem")).unwrap();
        assert!(!back.hash_matches());
    }

    #[test]
    fn wrong_schema_rejected() {
        let (text, _) = encode("test/v1", &Body { b: 1.0, a: vec![] });
        let err = decode::<Body>(&text, "test/v2", Path::new("mem")).unwrap_err();
        assert!(matches!(err, CliError::Schema { .. }));
    }

    #[test]
    fn hash_is_key_order_independent() {
        let a: serde_json::Value = serde_json::from_str(r#"{"x": 1, "y": [2.5]}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"y": [2.5], "x": 1}"#).unwrap();
        assert_eq!(content_hash(&a), content_hash(&b));
    }
}
