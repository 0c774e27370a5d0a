use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::CorpusError;

/// Lowercased tokens, split on anything that is not alphanumeric.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Canonical spelling of a term: its tokens joined by single spaces.
pub fn canonical_term(raw: &str) -> String {
    tokenize(raw).join(" ")
}

/// A term occurrence found by [`Vocabulary::match_tokens`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermMatch {
    pub term: usize,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: HashMap<String, usize>,
    term: Option<usize>,
}

/// Fixed, ordered term dictionary with alias folding. Column `i` of every
/// document-term matrix is `terms()[i]`.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    terms: Vec<String>,
    alias_map: BTreeMap<String, String>,
    index: HashMap<String, usize>,
    trie: Vec<TrieNode>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.alias_map == other.alias_map
    }
}

impl Vocabulary {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn alias_map(&self) -> &BTreeMap<String, String> {
        &self.alias_map
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Column index of a term or alias, in any spelling that canonicalises
    /// to it.
    pub fn index_of(&self, raw: &str) -> Option<usize> {
        let key = canonical_term(raw);
        self.index.get(&key).copied().or_else(|| {
            self.alias_map
                .get(&key)
                .and_then(|canon| self.index.get(canon).copied())
        })
    }

    /// Greedy longest-match, left to right, non-overlapping.
    pub fn match_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<TermMatch> {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < tokens.len() {
            let mut node = 0;
            let mut best: Option<(usize, usize)> = None;
            for (offset, tok) in tokens[pos..].iter().enumerate() {
                match self.trie[node].children.get(tok.as_ref()) {
                    Some(&next) => {
                        node = next;
                        if let Some(term) = self.trie[node].term {
                            best = Some((term, offset + 1));
                        }
                    }
                    None => break,
                }
            }
            match best {
                Some((term, len)) => {
                    out.push(TermMatch {
                        term,
                        start: pos,
                        len,
                    });
                    pos += len;
                }
                None => pos += 1,
            }
        }
        out
    }

    pub fn match_text(&self, text: &str) -> Vec<TermMatch> {
        self.match_tokens(&tokenize(text))
    }

    fn insert_phrase(&mut self, phrase: &str, term: usize) {
        let mut node = 0;
        for tok in phrase.split(' ') {
            node = match self.trie[node].children.get(tok) {
                Some(&n) => n,
                None => {
                    self.trie.push(TrieNode::default());
                    let n = self.trie.len() - 1;
                    self.trie[node].children.insert(tok.to_string(), n);
                    n
                }
            };
        }
        self.trie[node].term = Some(term);
    }
}

/// Builds the dictionary: keywords are canonicalised, deduplicated and
/// sorted; alias surfaces fold onto their canonical term. No stemming and
/// no stopword removal.
pub fn build_vocabulary<K, S1, S2>(
    keywords: K,
    alias_rules: &[(S1, S2)],
) -> Result<Vocabulary, CorpusError>
where
    K: IntoIterator,
    K::Item: AsRef<str>,
    S1: AsRef<str>,
    S2: AsRef<str>,
{
    let terms: BTreeSet<String> = keywords
        .into_iter()
        .map(|k| canonical_term(k.as_ref()))
        .filter(|k| !k.is_empty())
        .collect();
    if terms.is_empty() {
        return Err(CorpusError::EmptyVocabulary);
    }
    let terms: Vec<String> = terms.into_iter().collect();
    let index: HashMap<String, usize> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();

    let mut alias_map = BTreeMap::new();
    for (surface, canonical) in alias_rules {
        let (raw_surface, raw_canonical) = (surface.as_ref(), canonical.as_ref());
        let surface = canonical_term(raw_surface);
        let canonical = canonical_term(raw_canonical);
        if surface.is_empty() {
            return Err(CorpusError::AliasRule(format!(
                "alias surface {raw_surface:?} has no tokens"
            )));
        }
        if !index.contains_key(&canonical) {
            return Err(CorpusError::AliasTarget {
                surface: raw_surface.to_string(),
                canonical: raw_canonical.to_string(),
            });
        }
        if index.contains_key(&surface) {
            return Err(CorpusError::AliasRule(format!(
                "alias surface {raw_surface:?} is itself a dictionary term"
            )));
        }
        match alias_map.get(&surface) {
            Some(existing) if *existing != canonical => {
                return Err(CorpusError::AliasRule(format!(
                    "alias surface {raw_surface:?} maps to both {existing:?} and {canonical:?}"
                )));
            }
            _ => {
                alias_map.insert(surface, canonical);
            }
        }
    }

    let mut vocab = Vocabulary {
        terms,
        alias_map,
        index,
        trie: vec![TrieNode::default()],
    };
    for i in 0..vocab.terms.len() {
        let phrase = vocab.terms[i].clone();
        vocab.insert_phrase(&phrase, i);
    }
    let aliases: Vec<(String, usize)> = vocab
        .alias_map
        .iter()
        .map(|(s, c)| (s.clone(), vocab.index[c]))
        .collect();
    for (surface, term) in aliases {
        vocab.insert_phrase(&surface, term);
    }
    Ok(vocab)
}

/// One term per line; blank lines and `#` comments are ignored.
pub fn parse_dictionary(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// `surface,canonical` rows. An optional `surface,canonical` header row is
/// skipped.
pub fn parse_alias_csv(bytes: &[u8]) -> Result<Vec<(String, String)>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rules = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CorpusError::AliasRule(format!("row {}: {e}", i + 1)))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != 2 {
            return Err(CorpusError::AliasRule(format!(
                "row {}: expected 2 fields, found {}",
                i + 1,
                rec.len()
            )));
        }
        if i == 0
            && rec[0].eq_ignore_ascii_case("surface")
            && rec[1].eq_ignore_ascii_case("canonical")
        {
            continue;
        }
        rules.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(rules)
}
