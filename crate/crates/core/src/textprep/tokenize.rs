use unicode_general_category::{get_general_category, GeneralCategory};

use super::{PreprocessingFlags, TokenKind};
use crate::error::{Error, Result};

/// Any character in a Unicode `P*` general category.
pub fn is_punctuation(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
    )
}

/// Hyphens and apostrophes survive inside words.
fn is_word_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2010}' | '\u{2019}')
}

/// Whitespace runs collapsed to one space, ends trimmed, casing applied.
fn normalise(text: &str, flags: &PreprocessingFlags) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if flags.keep_capitalization {
        collapsed
    } else {
        collapsed.to_lowercase()
    }
}

fn empty(text: &str) -> Error {
    Error::EmptySegment(format!("{text:?} has no tokens after preprocessing"))
}

/// One token per character. Spaces are tokens; punctuation is removed after
/// whitespace collapsing, so removal never merges neighbouring spaces.
pub fn char_tokenize(text: &str, flags: &PreprocessingFlags) -> Result<Vec<String>> {
    let tokens: Vec<String> = normalise(text, flags)
        .chars()
        .filter(|&c| flags.keep_punctuation || !is_punctuation(c))
        .map(String::from)
        .collect();
    if tokens.is_empty() {
        return Err(empty(text));
    }
    Ok(tokens)
}

/// Whitespace split with punctuation detached into single-character tokens
/// (or dropped). A hyphen or apostrophe between two non-punctuation
/// characters stays inside its word.
pub fn word_tokenize(text: &str, flags: &PreprocessingFlags) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    for chunk in normalise(text, flags).split(' ') {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            if !is_punctuation(c) {
                word.push(c);
                continue;
            }
            let inner = is_word_joiner(c)
                && i > 0
                && !is_punctuation(chars[i - 1])
                && chars.get(i + 1).is_some_and(|&n| !is_punctuation(n));
            if inner {
                word.push(c);
                continue;
            }
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            if flags.keep_punctuation {
                tokens.push(c.to_string());
            }
        }
        if !word.is_empty() {
            tokens.push(word);
        }
    }
    if tokens.is_empty() {
        return Err(empty(text));
    }
    Ok(tokens)
}

pub fn tokenize(text: &str, kind: TokenKind, flags: &PreprocessingFlags) -> Result<Vec<String>> {
    match kind {
        TokenKind::Character => char_tokenize(text, flags),
        TokenKind::Word => word_tokenize(text, flags),
    }
}
