//! Structured terminal contexts and their canonical token serialization.
//!
//! A context is an ordered list of `(marker, payload)` parts. Serialization
//! is `BOS` followed by `marker payload SEP` per part. Payloads may not
//! contain `SEP`, `BOS` or role markers, which makes the encoding injective
//! and round-trippable; `CITE` and `EOS` are legal payload content.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::{is_banned_in_payload, is_part_marker, Token, Vocab, BOS, SEP};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextParts(pub Vec<(Token, Vec<Token>)>);

impl ContextParts {
    pub fn new(parts: Vec<(Token, Vec<Token>)>) -> Self {
        ContextParts(parts)
    }

    pub fn parts(&self) -> &[(Token, Vec<Token>)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn serialize_context(vocab: &Vocab, parts: &ContextParts) -> Result<Vec<Token>> {
    let mut out = vec![BOS];
    for (marker, payload) in parts.parts() {
        if !is_part_marker(*marker) {
            return Err(Error::MalformedContext(format!(
                "token {marker} cannot open a part"
            )));
        }
        vocab.check_token(*marker)?;
        out.push(*marker);
        for &t in payload {
            vocab.check_token(t)?;
            if is_banned_in_payload(t) {
                return Err(Error::MarkerInPayload { token: t });
            }
            out.push(t);
        }
        out.push(SEP);
    }
    Ok(out)
}

pub fn deserialize_context(vocab: &Vocab, tokens: &[Token]) -> Result<ContextParts> {
    if tokens.first() != Some(&BOS) {
        return Err(Error::MalformedContext("must start with BOS".into()));
    }
    vocab.check_seq(tokens)?;
    let mut parts = Vec::new();
    let mut rest = &tokens[1..];
    while !rest.is_empty() {
        // The marker comes first and may itself be SEP; the payload runs to
        // the next SEP, which payloads cannot contain.
        let marker = rest[0];
        if !is_part_marker(marker) {
            return Err(Error::MalformedContext(format!(
                "token {marker} cannot open a part"
            )));
        }
        let end = rest[1..]
            .iter()
            .position(|&t| t == SEP)
            .ok_or_else(|| Error::MalformedContext("unterminated part".into()))?;
        let payload = &rest[1..1 + end];
        if let Some(&bad) = payload.iter().find(|&&t| is_banned_in_payload(t)) {
            return Err(Error::MarkerInPayload { token: bad });
        }
        parts.push((marker, payload.to_vec()));
        rest = &rest[end + 2..];
    }
    Ok(ContextParts(parts))
}
