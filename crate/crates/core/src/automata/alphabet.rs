use std::fmt;

/// Index of a symbol inside its [`Alphabet`].
pub type Symbol = usize;

/// Word over an alphabet, stored as symbol indices.
pub type Word = Vec<Symbol>;

/// Ordered set of single-character symbols.
///
/// `-` and `#` are reserved by the text formats (empty word, comment).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    /// Builds an alphabet, rejecting duplicates and reserved characters.
    /// Returns the offending character on failure.
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self, char> {
        let mut out: Vec<char> = Vec::new();
        for c in symbols {
            if c == '-' || c == '#' || c.is_whitespace() || out.contains(&c) {
                return Err(c);
            }
            out.push(c);
        }
        Ok(Alphabet { symbols: out })
    }

    /// `{0, 1}`.
    pub fn binary() -> Self {
        Alphabet {
            symbols: vec!['0', '1'],
        }
    }

    /// Digits `0..base` (then `a`, `b`, ... past 10). Panics if `base > 36`.
    pub fn digits(base: u32) -> Self {
        Alphabet {
            symbols: (0..base)
                .map(|d| char::from_digit(d, 36).expect("base <= 36"))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn index_of(&self, c: char) -> Option<Symbol> {
        self.symbols.iter().position(|&s| s == c)
    }

    pub fn char_of(&self, s: Symbol) -> char {
        self.symbols[s]
    }

    /// Parses a word written as a plain string of symbols. Returns the first
    /// character that is not in the alphabet.
    pub fn parse_word(&self, text: &str) -> Result<Word, char> {
        text.chars().map(|c| self.index_of(c).ok_or(c)).collect()
    }

    pub fn render(&self, word: &[Symbol]) -> String {
        word.iter().map(|&s| self.symbols[s]).collect()
    }

    /// All words of length `n` in length-lexicographic order.
    pub fn words_of_length(&self, n: usize) -> Vec<Word> {
        let k = self.len();
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..k).map(move |s| {
                        let mut w = w.clone();
                        w.push(s);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(char::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_and_duplicates() {
        assert_eq!(Alphabet::new("0-".chars()), Err('-'));
        assert_eq!(Alphabet::new("aba".chars()), Err('a'));
        assert!(Alphabet::new("ab".chars()).is_ok());
    }

    #[test]
    fn words_enumeration() {
        let a = Alphabet::binary();
        assert_eq!(a.words_of_length(0), vec![Vec::<usize>::new()]);
        let w2: Vec<String> = a.words_of_length(2).iter().map(|w| a.render(w)).collect();
        assert_eq!(w2, ["00", "01", "10", "11"]);
    }

    #[test]
    fn digits_alphabet() {
        assert_eq!(Alphabet::digits(12).render(&[10, 11, 0]), "ab0");
    }
}
