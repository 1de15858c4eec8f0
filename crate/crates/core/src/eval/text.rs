use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RougeVariant {
    R1,
    R2,
    RL,
}

impl RougeVariant {
    pub const ALL: [RougeVariant; 3] = [Self::R1, Self::R2, Self::RL];

    pub fn label(self) -> &'static str {
        match self {
            Self::R1 => "ROUGE-1",
            Self::R2 => "ROUGE-2",
            Self::RL => "ROUGE-L",
        }
    }
}

impl fmt::Display for RougeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RougeVariant {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim().to_ascii_uppercase().trim_start_matches("ROUGE-") {
            "1" | "R1" => Ok(Self::R1),
            "2" | "R2" => Ok(Self::R2),
            "L" | "RL" => Ok(Self::RL),
            _ => Err(()),
        }
    }
}

/// Lowercased runs of letters and digits; a `.` joins the run only between
/// two digits, so `'0.0011'.` yields the single token `0.0011`.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let interior_point = c == '.'
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(char::is_ascii_digit);
        if c.is_alphanumeric() || interior_point {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn lcs_length(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                curr[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// F1 over n-gram multiset overlap (R1, R2) or the longest common
/// subsequence (RL). Written as `2·overlap / (|c| + |r|)`, which equals
/// 2PR/(P+R) and is exactly symmetric. Zero when either side is empty.
pub fn rouge_f1(candidate: &str, reference: &str, variant: RougeVariant) -> f64 {
    let c = tokenize(candidate);
    let r = tokenize(reference);
    let (overlap, c_len, r_len) = match variant {
        RougeVariant::R1 | RougeVariant::R2 => {
            let n = if variant == RougeVariant::R1 { 1 } else { 2 };
            let (cc, rc) = (ngram_counts(&c, n), ngram_counts(&r, n));
            let overlap: usize = cc
                .iter()
                .map(|(gram, &k)| k.min(rc.get(gram).copied().unwrap_or(0)))
                .sum();
            (
                overlap,
                c.len().saturating_sub(n - 1),
                r.len().saturating_sub(n - 1),
            )
        }
        RougeVariant::RL => (lcs_length(&c, &r), c.len(), r.len()),
    };
    if c_len == 0 || r_len == 0 {
        return 0.0;
    }
    2.0 * overlap as f64 / (c_len + r_len) as f64
}

/// Cosine of the angle between two vectors, clamped to [-1, 1].
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_keep_decimal_numbers_whole() {
        assert_eq!(
            tokenize("The 'IT' sector, effect of '-0.0011'. Done."),
            vec!["the", "it", "sector", "effect", "of", "0.0011", "done"]
        );
        assert_eq!(tokenize("v1.2.3 end."), vec!["v1.2.3", "end"]);
        assert!(tokenize(" .,;' ").is_empty());
    }

    #[test]
    fn hand_counted_example() {
        let (c, r) = ("the cat sat", "the cat ran");
        assert_eq!(rouge_f1(c, r, RougeVariant::R1), 2.0 / 3.0);
        assert_eq!(rouge_f1(c, r, RougeVariant::R2), 0.5);
        assert_eq!(rouge_f1(c, r, RougeVariant::RL), 2.0 / 3.0);
    }

    #[test]
    fn identical_disjoint_and_empty() {
        for v in RougeVariant::ALL {
            assert_eq!(rouge_f1("a b c", "a b c", v), 1.0);
            assert_eq!(rouge_f1("a b c", "d e f", v), 0.0);
            assert_eq!(rouge_f1("", "a b", v), 0.0);
        }
        assert_eq!(rouge_f1("a", "a", RougeVariant::R2), 0.0);
    }

    #[test]
    fn lcs_respects_order() {
        assert_eq!(rouge_f1("a b c d", "d c b a", RougeVariant::RL), 0.25);
        assert_eq!(rouge_f1("a b c d", "d c b a", RougeVariant::R1), 1.0);
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine_similarity(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine_similarity(&[1.0, 2.0], &[-1.0, -2.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 1.0]),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            cosine_similarity(&[1.0], &[1.0, 1.0]),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn variant_names_parse() {
        assert_eq!("ROUGE-L".parse(), Ok(RougeVariant::RL));
        assert_eq!("r2".parse(), Ok(RougeVariant::R2));
        assert_eq!("1".parse(), Ok(RougeVariant::R1));
    }
}
