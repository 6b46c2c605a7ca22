//! Deterministic token estimation.
//!
//! The default estimator counts *units*: every maximal run of alphanumeric
//! characters (and `_`) is one word unit, every other non-whitespace character
//! is one punctuation unit. Text with at least one unit gets one extra
//! terminal token, so `"posX, posY, width, height"` is 4 words + 3 commas + 1.

/// Something that can put a number on how many tokens a text costs.
pub trait TokenEstimator: Send + Sync {
    fn name(&self) -> &str;
    fn estimate(&self, text: &str) -> usize;
}

/// Word + punctuation unit counter with one terminal token.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordPunctEstimator;

impl TokenEstimator for WordPunctEstimator {
    fn name(&self) -> &str {
        "word-punct"
    }

    fn estimate(&self, text: &str) -> usize {
        let mut units = 0;
        let mut in_word = false;
        for ch in text.chars() {
            if ch.is_alphanumeric() || ch == '_' {
                if !in_word {
                    units += 1;
                    in_word = true;
                }
            } else {
                in_word = false;
                if !ch.is_whitespace() {
                    units += 1;
                }
            }
        }
        if units > 0 {
            units + 1
        } else {
            0
        }
    }
}

/// The common "four characters per token" rule of thumb used by several
/// vendor tokenizers for English text. Rounds up.
#[derive(Debug, Clone, Copy, Default)]
pub struct CharsPerTokenEstimator;

impl TokenEstimator for CharsPerTokenEstimator {
    fn name(&self) -> &str {
        "chars4"
    }

    fn estimate(&self, text: &str) -> usize {
        text.chars().count().div_ceil(4)
    }
}

/// Resolves an estimator by its registered name.
pub fn estimator_by_name(name: &str) -> Option<Box<dyn TokenEstimator>> {
    match name {
        "word-punct" => Some(Box::new(WordPunctEstimator)),
        "chars4" => Some(Box::new(CharsPerTokenEstimator)),
        _ => None,
    }
}

pub fn estimate_tokens(text: &str, estimator: &dyn TokenEstimator) -> usize {
    estimator.estimate(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_is_zero() {
        assert_eq!(estimate_tokens("", &WordPunctEstimator), 0);
        assert_eq!(estimate_tokens("  \n\t", &WordPunctEstimator), 0);
    }

    #[test]
    fn general_attribute_list() {
        assert_eq!(estimate_tokens("posX, posY, width, height", &WordPunctEstimator), 8);
    }

    #[test]
    fn punctuation_counts_per_char() {
        // {"a":1} -> { " a " : 1 } = 7 units + 1
        assert_eq!(WordPunctEstimator.estimate(r#"{"a":1}"#), 8);
        assert_eq!(WordPunctEstimator.estimate("snake_case word"), 3);
    }

    #[test]
    fn chars4_rounds_up() {
        assert_eq!(CharsPerTokenEstimator.estimate(""), 0);
        assert_eq!(CharsPerTokenEstimator.estimate("abcde"), 2);
    }

    #[test]
    fn registry_knows_defaults() {
        assert!(estimator_by_name("word-punct").is_some());
        assert!(estimator_by_name("chars4").is_some());
        assert!(estimator_by_name("tiktoken").is_none());
    }

    proptest! {
        #[test]
        fn concatenation_loses_at_most_one(a in ".{0,40}", b in ".{0,40}") {
            let e = WordPunctEstimator;
            let joined = format!("{a} {b}");
            prop_assert!(e.estimate(&joined) + 1 >= e.estimate(&a) + e.estimate(&b));
        }

        #[test]
        fn deterministic(a in ".{0,80}") {
            prop_assert_eq!(WordPunctEstimator.estimate(&a), WordPunctEstimator.estimate(&a));
        }
    }
}
