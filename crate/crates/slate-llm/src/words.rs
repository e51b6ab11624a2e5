/// Number of maximal whitespace-separated tokens; the cost of a text
/// statement.
pub fn word_count(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_words() {
        assert_eq!(word_count(""), 0);
        assert_eq!(word_count("Disappointed hope."), 2);
        assert_eq!(word_count("Refugees are welcome!"), 3);
        assert_eq!(word_count("  a\t b\nc "), 3);
    }
}
