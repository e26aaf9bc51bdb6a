//! Shared token vocabulary: a handful of reserved structural tokens followed
//! by a payload range that task generators carve up as they see fit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Token = u32;

pub const BOS: Token = 0;
pub const EOS: Token = 1;
pub const SEP: Token = 2;
pub const DRAFT: Token = 3;
pub const VERIFY: Token = 4;
pub const PLAN: Token = 5;
pub const SOLVE: Token = 6;
pub const CITE: Token = 7;

/// Number of reserved token ids at the bottom of every vocabulary.
pub const NUM_SPECIAL: u32 = 8;

pub const MIN_VOCAB: u32 = 16;
pub const MAX_VOCAB: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocab {
    size: u32,
}

impl Vocab {
    pub fn new(size: u32) -> Result<Self> {
        if !(MIN_VOCAB..=MAX_VOCAB).contains(&size) {
            return Err(Error::InvalidVocabSize(size));
        }
        Ok(Vocab { size })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn contains(&self, token: Token) -> bool {
        token < self.size
    }

    pub fn is_special(token: Token) -> bool {
        token < NUM_SPECIAL
    }

    pub fn is_payload(&self, token: Token) -> bool {
        token >= NUM_SPECIAL && token < self.size
    }

    /// First payload token id.
    pub fn payload_base(&self) -> Token {
        NUM_SPECIAL
    }

    pub fn payload_count(&self) -> u32 {
        self.size - NUM_SPECIAL
    }

    /// n-th payload token.
    pub fn payload(&self, n: u32) -> Result<Token> {
        let tok = NUM_SPECIAL + n;
        if tok >= self.size {
            return Err(Error::InvalidToken {
                token: tok,
                vocab_size: self.size,
            });
        }
        Ok(tok)
    }

    pub fn check_token(&self, token: Token) -> Result<()> {
        if token >= self.size {
            return Err(Error::InvalidToken {
                token,
                vocab_size: self.size,
            });
        }
        Ok(())
    }

    pub fn check_seq(&self, seq: &[Token]) -> Result<()> {
        for &t in seq {
            self.check_token(t)?;
        }
        Ok(())
    }
}

/// Markers that may open a context part.
pub fn is_part_marker(token: Token) -> bool {
    matches!(token, SEP | DRAFT | VERIFY | PLAN | SOLVE | CITE)
}

/// Tokens that may not appear inside a context-part payload. `CITE` and `EOS`
/// are deliberately legal payload content; the rest would make the serialized
/// form ambiguous.
pub fn is_banned_in_payload(token: Token) -> bool {
    matches!(token, BOS | SEP | DRAFT | VERIFY | PLAN | SOLVE)
}

/// Drop everything after the first EOS and strip tokens that cannot live in a
/// payload. Applied to sampled model responses before they are embedded in a
/// prompt or terminal context.
pub fn sanitize_response(response: &[Token]) -> Vec<Token> {
    response
        .iter()
        .take_while(|&&t| t != EOS)
        .filter(|&&t| !is_banned_in_payload(t))
        .copied()
        .collect()
}
