/// Lowercases `text` and splits it on every character that is neither a
/// Unicode letter nor an ASCII digit. Empty pieces are dropped.
///
/// This is the single tokenizer behind embedding, heuristic keyword overlap
/// and offline entity linking.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !(c.is_alphabetic() || c.is_ascii_digit()))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}
