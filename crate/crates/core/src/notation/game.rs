use serde::{Deserialize, Serialize};

use super::board::BoardState;
use super::movegen::{apply_move, DecodedMove};
use super::san::{decode_move_verbose, SanToken};
use super::NotationError;

const RESULT_MARKERS: [&str; 4] = ["1-0", "0-1", "1/2-1/2", "*"];

/// SAN tokens of one game in play order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameScript {
    pub tokens: Vec<String>,
    pub result: Option<String>,
}

impl GameScript {
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        GameScript {
            tokens: tokens.into_iter().map(Into::into).collect(),
            result: None,
        }
    }
}

/// Strips `{...}` comments, `;` line comments and `[Tag "..."]` header
/// lines, leaving byte offsets of the remaining words intact.
fn blank_annotations(text: &str) -> Result<String, NotationError> {
    let mut out = String::with_capacity(text.len());
    let mut in_brace = false;
    let mut in_line_comment = false;
    let mut at_line_start = true;
    let mut in_header = false;
    for (offset, c) in text.char_indices() {
        let keep = if in_brace {
            in_brace = c != '}';
            false
        } else if in_line_comment || in_header {
            if c == '\n' {
                in_line_comment = false;
                in_header = false;
            }
            c == '\n'
        } else {
            match c {
                '{' => {
                    in_brace = true;
                    false
                }
                ';' => {
                    in_line_comment = true;
                    false
                }
                '[' if at_line_start => {
                    in_header = true;
                    false
                }
                '}' => {
                    return Err(NotationError::MalformedToken {
                        index: 0,
                        offset,
                        text: "}".into(),
                    })
                }
                _ => true,
            }
        };
        if !c.is_whitespace() {
            at_line_start = false;
        } else if c == '\n' {
            at_line_start = true;
        }
        // Keep offsets stable: replace dropped chars by same-width spaces.
        if keep {
            out.push(c);
        } else {
            out.extend(std::iter::repeat_n(' ', c.len_utf8()));
        }
    }
    if in_brace {
        return Err(NotationError::MalformedToken {
            index: 0,
            offset: text.len(),
            text: "unterminated comment".into(),
        });
    }
    Ok(out)
}

/// Splits a word such as `12.` / `12...` / `12.Nf3` into its move number and
/// the remainder.
fn split_move_number(word: &str) -> Option<(u32, &str)> {
    let digits = word.find(|c: char| !c.is_ascii_digit())?;
    if digits == 0 {
        return None;
    }
    let rest = &word[digits..];
    let after_dots = rest.trim_start_matches('.');
    if after_dots.len() == rest.len() {
        return None;
    }
    Some((word[..digits].parse().ok()?, after_dots))
}

/// Tokenizes movetext: move numbers are checked against the ply they
/// precede, annotations are dropped, and each move token must be valid SAN.
pub fn parse_game_text(text: &str) -> Result<GameScript, NotationError> {
    let cleaned = blank_annotations(text)?;
    let mut tokens: Vec<String> = Vec::new();
    let mut result = None;

    let words = cleaned.split_whitespace().map(|w| {
        let offset = w.as_ptr() as usize - cleaned.as_ptr() as usize;
        (offset, w)
    });
    for (offset, word) in words {
        let malformed = |text: &str| NotationError::MalformedToken {
            index: tokens.len() + 1,
            offset,
            text: text.to_string(),
        };
        if result.is_some() {
            return Err(malformed(word));
        }
        if RESULT_MARKERS.contains(&word) {
            result = Some(word.to_string());
            continue;
        }
        if word.starts_with('$') && word[1..].chars().all(|c| c.is_ascii_digit()) {
            continue;
        }
        let move_word = match split_move_number(word) {
            Some((number, rest)) => {
                let expected = tokens.len() as u32 / 2 + 1;
                if number != expected {
                    return Err(malformed(word));
                }
                if rest.is_empty() {
                    continue;
                }
                rest
            }
            None => word,
        };
        if SanToken::parse(move_word).is_none() {
            return Err(malformed(move_word));
        }
        tokens.push(move_word.to_string());
    }
    if tokens.is_empty() {
        return Err(NotationError::EmptyGame);
    }
    Ok(GameScript { tokens, result })
}

/// A game decoded move by move.
#[derive(Clone, Debug)]
pub struct DecodedGame {
    pub moves: Vec<DecodedMove>,
    /// Position before each move; `positions[i]` is where `moves[i]` was played.
    pub positions: Vec<BoardState>,
    pub final_position: BoardState,
    /// Check-suffix disagreements. Non-fatal.
    pub warnings: Vec<String>,
}

/// Decodes every token of `script` from the standard initial position.
pub fn decode_game(script: &GameScript) -> Result<DecodedGame, NotationError> {
    decode_game_from(BoardState::initial(), script)
}

pub fn decode_game_from(
    start: BoardState,
    script: &GameScript,
) -> Result<DecodedGame, NotationError> {
    let mut board = start;
    let mut moves = Vec::with_capacity(script.tokens.len());
    let mut positions = Vec::with_capacity(script.tokens.len());
    let mut warnings = Vec::new();
    for (i, token) in script.tokens.iter().enumerate() {
        let decoded = decode_move_verbose(&board, token).map_err(|e| NotationError::AtToken {
            index: i + 1,
            source: Box::new(e),
        })?;
        if let Some(w) = decoded.check_mismatch {
            log::warn!("token {}: {w}", i + 1);
            warnings.push(w);
        }
        let next = apply_move(&board, &decoded.mv)?;
        positions.push(std::mem::replace(&mut board, next));
        moves.push(decoded.mv);
    }
    Ok(DecodedGame {
        moves,
        positions,
        final_position: board,
        warnings,
    })
}
