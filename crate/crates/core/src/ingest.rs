//! Tweet normalization, cleaning, hashtag extraction and corpus assembly.
//!
//! The cleaning order is fixed: strip non-ASCII, lowercase, mentions become
//! `user`, URLs are deleted, tokenize, drop stopwords. A tweet survives
//! [`filter_corpus`] only if it is English, carries a hashtag, has at least
//! [`MIN_BODY_TOKENS`] body tokens before stopword removal, and is not a duplicate
//! of an earlier tweet.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MIN_BODY_TOKENS: usize = 5;
pub const MENTION_TOKEN: &str = "user";

/// A tweet as delivered by the streaming API, reduced to the fields we use.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTweetRecord {
    pub id: String,
    pub text: Option<String>,
    pub truncated: bool,
    pub extended_text: Option<String>,
    pub retweet: Option<Box<RawTweetRecord>>,
    pub lang: String,
}

/// Recovers the full text of a record: the original tweet for retweets, the
/// extended text for truncated tweets, the plain text otherwise.
pub fn normalize_raw(record: &RawTweetRecord) -> Result<&str> {
    if let Some(inner) = &record.retweet {
        return normalize_raw(inner);
    }
    if record.truncated {
        if let Some(full) = &record.extended_text {
            return Ok(full);
        }
    }
    record
        .text
        .as_deref()
        .or(record.extended_text.as_deref())
        .ok_or_else(|| Error::MalformedRecord {
            id: record.id.clone(),
            reason: "neither text nor extended text present",
        })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(BTreeSet<String>);

impl Stopwords {
    /// One token per line; blank lines and `#` comments are skipped.
    pub fn parse(contents: &str) -> Self {
        Self(
            contents
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| l.to_ascii_lowercase())
                .collect(),
        )
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Replaces `@handle` with `user`. The `@` must start the text or follow a
/// non-alphanumeric character, so e-mail-like `a@b` is left alone.
pub fn replace_mentions(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let at_boundary = i == 0 || !is_handle_char(chars[i - 1]);
        if c == '@' && at_boundary {
            let mut j = i;
            while j < chars.len() && chars[j] == '@' {
                j += 1;
            }
            if j < chars.len() && is_handle_char(chars[j]) {
                out.push_str(MENTION_TOKEN);
                while j < chars.len() && is_handle_char(chars[j]) {
                    j += 1;
                }
            } else {
                out.extend(&chars[i..j]);
            }
            i = j;
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

/// Deletes `http://…`, `https://…` and bare `t.co/…` links up to the next
/// whitespace. Matching is case-insensitive.
pub fn strip_urls(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    let mut prev: Option<char> = None;
    while let Some(c) = rest.chars().next() {
        let lower_starts = |p: &str| {
            rest.len() >= p.len()
                && rest.is_char_boundary(p.len())
                && rest[..p.len()].eq_ignore_ascii_case(p)
        };
        let is_url = lower_starts("http://")
            || lower_starts("https://")
            || (lower_starts("t.co/") && !prev.is_some_and(|p| p.is_alphanumeric()));
        if is_url {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            rest = &rest[end..];
            prev = None;
            continue;
        }
        out.push(c);
        prev = Some(c);
        rest = &rest[c.len_utf8()..];
    }
    out
}

const EYES: &[char] = &[':', ';', '='];
const NOSES: &[char] = &['-', '\'', '^'];
const MOUTHS: &[char] = &[')', '(', ']', '[', 'd', 'p', '/', '\\', '|', '*', '3', 'o', '0', 'x', '}', '{', '@', '$'];
const REVERSED_MOUTHS: &[char] = &[')', '(', ']', '['];

/// ASCII emoticons such as `:)`, `;-p`, `:((`, `(:` and `<3`.
pub fn is_emoticon(token: &str) -> bool {
    if token == "<3" || token == "</3" {
        return true;
    }
    let chars: Vec<char> = token.chars().collect();
    if chars.len() < 2 || chars.len() > 5 {
        return false;
    }
    if EYES.contains(&chars[0]) {
        let mut mouth = &chars[1..];
        if mouth.first().is_some_and(|c| NOSES.contains(c)) {
            mouth = &mouth[1..];
        }
        return !mouth.is_empty()
            && mouth.iter().all(|c| *c == mouth[0])
            && MOUTHS.contains(&mouth[0]);
    }
    let last = chars[chars.len() - 1];
    if EYES.contains(&last) {
        let mut front = &chars[..chars.len() - 1];
        if let Some(c) = front.last() {
            if NOSES.contains(c) {
                front = &front[..front.len() - 1];
            }
        }
        return !front.is_empty()
            && front.iter().all(|c| *c == front[0])
            && REVERSED_MOUTHS.contains(&front[0]);
    }
    false
}

/// Whitespace tokenizer that keeps emoticons whole, keeps a leading `#`/`@`,
/// strips other surrounding ASCII punctuation and drops punctuation-only tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|word| {
            if is_emoticon(word) {
                return Some(word.to_owned());
            }
            let trimmed = word
                .trim_start_matches(|c: char| c.is_ascii_punctuation() && c != '#' && c != '@')
                .trim_end_matches(|c: char| c.is_ascii_punctuation());
            if trimmed.chars().all(|c| c.is_ascii_punctuation()) {
                None
            } else {
                Some(trimmed.to_owned())
            }
        })
        .collect()
}

/// Cleaning steps up to tokenization, without stopword removal.
pub fn tokenize_tweet(text: &str) -> Vec<String> {
    let ascii: String = text.chars().filter(char::is_ascii).collect();
    let lower = ascii.to_ascii_lowercase();
    tokenize(&strip_urls(&replace_mentions(&lower)))
}

/// The full cleaning pipeline for classification text.
pub fn clean_text(text: &str, stopwords: &Stopwords) -> Vec<String> {
    remove_stopwords(tokenize_tweet(text), stopwords)
}

pub fn remove_stopwords(tokens: Vec<String>, stopwords: &Stopwords) -> Vec<String> {
    tokens.into_iter().filter(|t| !stopwords.contains(t)).collect()
}

/// Light preprocessing for the embedding corpus: mentions and URLs only, plus
/// lowercasing and punctuation trimming so hashtag tokens line up with labels.
pub fn minimal_clean(text: &str) -> Vec<String> {
    tokenize(&strip_urls(&replace_mentions(&text.to_lowercase())))
}

/// Splits `#tag` tokens (length ≥ 2) out of the body. Tags lose their `#`.
pub fn extract_hashtags(tokens: Vec<String>) -> (Vec<String>, BTreeSet<String>) {
    let mut tags = BTreeSet::new();
    let mut body = Vec::with_capacity(tokens.len());
    for token in tokens {
        if token.starts_with('#') && token.len() >= 2 {
            tags.insert(token[1..].to_owned());
        } else {
            body.push(token);
        }
    }
    (body, tags)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanTweet {
    pub id: String,
    pub tokens: Vec<String>,
    pub labels: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub tweets: Vec<CleanTweet>,
    /// Number of distinct tweets carrying each hashtag.
    pub label_counts: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn from_tweets(tweets: Vec<CleanTweet>) -> Self {
        let mut label_counts = BTreeMap::new();
        for t in &tweets {
            for l in &t.labels {
                *label_counts.entry(l.clone()).or_insert(0) += 1;
            }
        }
        Self {
            tweets,
            label_counts,
        }
    }
}

/// Why records were dropped by [`filter_corpus`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounters {
    pub malformed: usize,
    pub non_english: usize,
    pub no_hashtag: usize,
    pub too_short: usize,
    pub duplicate: usize,
}

impl DropCounters {
    pub fn total(&self) -> usize {
        self.malformed + self.non_english + self.no_hashtag + self.too_short + self.duplicate
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub inputs: usize,
    pub kept: usize,
    pub dropped: DropCounters,
}

pub fn filter_corpus<'a, I>(records: I, stopwords: &Stopwords) -> (Corpus, FilterReport)
where
    I: IntoIterator<Item = &'a RawTweetRecord>,
{
    let mut report = FilterReport::default();
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut tweets = Vec::new();
    for record in records {
        report.inputs += 1;
        let drops = &mut report.dropped;
        if record.lang != "en" {
            drops.non_english += 1;
            continue;
        }
        let Ok(text) = normalize_raw(record) else {
            drops.malformed += 1;
            continue;
        };
        let (body, labels) = extract_hashtags(tokenize_tweet(text));
        if labels.is_empty() {
            drops.no_hashtag += 1;
            continue;
        }
        if body.len() < MIN_BODY_TOKENS {
            drops.too_short += 1;
            continue;
        }
        let tokens = remove_stopwords(body, stopwords);
        if seen.contains(&tokens) {
            drops.duplicate += 1;
            continue;
        }
        seen.insert(tokens.clone());
        tweets.push(CleanTweet {
            id: record.id.clone(),
            tokens,
            labels,
        });
    }
    report.kept = tweets.len();
    (Corpus::from_tweets(tweets), report)
}

/// Most frequent labels first (ties lexicographic), keeping at most `n` with at
/// least `min_tweets` tweets each.
pub fn select_top_labels(label_counts: &BTreeMap<String, usize>, n: usize, min_tweets: usize) -> Vec<String> {
    let mut ranked: Vec<(&String, usize)> = label_counts
        .iter()
        .filter(|(_, &c)| c >= min_tweets)
        .map(|(l, &c)| (l, c))
        .collect();
    // BTreeMap iteration is already lexicographic; a stable sort keeps that for ties.
    ranked.sort_by(|a, b| b.1.cmp(&a.1));
    let selected: Vec<String> = ranked.into_iter().take(n).map(|(l, _)| l.clone()).collect();
    if selected.len() < n {
        log::warn!(
            "only {} labels have at least {min_tweets} tweets (wanted {n})",
            selected.len()
        );
    }
    selected
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub tokens: Vec<String>,
    /// Index into the owning dataset's `label_set`.
    pub label: usize,
}

/// Single-label examples over an ordered label set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub label_set: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn label_of(&self, example: usize) -> &str {
        &self.label_set[self.examples[example].label]
    }

    pub fn labels(&self) -> Vec<usize> {
        self.examples.iter().map(|e| e.label).collect()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.label_set.iter().position(|l| l == label)
    }

    /// The examples at `indices`, over the same label set.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            label_set: self.label_set.clone(),
        }
    }

    /// Keeps the examples whose label is in `labels`, re-indexed onto that list.
    pub fn restrict(&self, labels: &[String]) -> Dataset {
        let remap: Vec<Option<usize>> = self
            .label_set
            .iter()
            .map(|l| labels.iter().position(|k| k == l))
            .collect();
        Dataset {
            examples: self
                .examples
                .iter()
                .filter_map(|e| {
                    remap[e.label].map(|label| Example {
                        tokens: e.tokens.clone(),
                        label,
                    })
                })
                .collect(),
            label_set: labels.to_vec(),
        }
    }
}

/// One example per (tweet, retained label) pair, in corpus order then label order.
pub fn materialize_dataset(corpus: &Corpus, labels: &[String]) -> Result<Dataset> {
    if labels.is_empty() {
        return Err(Error::InvalidArgument("label list is empty".into()));
    }
    let mut examples = Vec::new();
    for tweet in &corpus.tweets {
        for (label, name) in labels.iter().enumerate() {
            if tweet.labels.contains(name) {
                examples.push(Example {
                    tokens: tweet.tokens.clone(),
                    label,
                });
            }
        }
    }
    if examples.is_empty() {
        return Err(Error::NoExamples);
    }
    Ok(Dataset {
        examples,
        label_set: labels.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| (*x).to_owned()).collect()
    }

    fn rec(id: &str, text: &str, lang: &str) -> RawTweetRecord {
        RawTweetRecord {
            id: id.into(),
            text: Some(text.into()),
            lang: lang.into(),
            ..Default::default()
        }
    }

    #[test]
    fn normalize_prefers_extended_and_retweet() {
        let truncated = RawTweetRecord {
            id: "1".into(),
            text: Some("a…".into()),
            truncated: true,
            extended_text: Some("a full sentence here".into()),
            ..Default::default()
        };
        assert_eq!(normalize_raw(&truncated).unwrap(), "a full sentence here");

        let rt = RawTweetRecord {
            text: Some("RT @u: x".into()),
            retweet: Some(Box::new(rec("2", "original body", "en"))),
            ..rec("3", "", "en")
        };
        assert_eq!(normalize_raw(&rt).unwrap(), "original body");
        assert_eq!(normalize_raw(&rec("4", "plain", "en")).unwrap(), "plain");

        let empty = RawTweetRecord {
            id: "5".into(),
            ..Default::default()
        };
        assert!(matches!(normalize_raw(&empty), Err(Error::MalformedRecord { .. })));
    }

    #[test]
    fn cleaning_examples() {
        let text = "Check https://t.co/x @TechFan LOVES #AI today";
        assert_eq!(
            clean_text(text, &Stopwords::default()),
            s(&["check", "user", "loves", "#ai", "today"])
        );
        let with_check: Stopwords = ["check"].into_iter().collect();
        assert_eq!(clean_text(text, &with_check), s(&["user", "loves", "#ai", "today"]));
        assert_eq!(clean_text("@xyz hello", &Stopwords::default()), s(&["user", "hello"]));
        assert_eq!(clean_text("ABC", &Stopwords::default()), s(&["abc"]));
    }

    #[test]
    fn mentions_urls_and_punctuation() {
        assert_eq!(replace_mentions("RT @u_1: hi (@Bob) a@b.com"), "RT user: hi (user) a@b.com");
        assert_eq!(replace_mentions("@@x @ @!"), "user @ @!");
        assert_eq!(strip_urls("see http://a.b/c, now"), "see  now");
        assert_eq!(strip_urls("x HTTPS://A.B y t.co/zz at.co/q"), "x  y  at.co/q");
        assert_eq!(
            tokenize("(hello), #ai! :) ... don't <3 :-(( (:"),
            s(&["hello", "#ai", ":)", "don't", "<3", ":-((", "(:"])
        );
        assert_eq!(tokenize_tweet("Café — naïve"), s(&["caf", "nave"]));
    }

    #[test]
    fn hashtag_extraction() {
        assert_eq!(
            extract_hashtags(s(&["love", "#ai", "and", "#ml"])),
            (s(&["love", "and"]), ["ai", "ml"].iter().map(|x| String::from(*x)).collect())
        );
        assert_eq!(extract_hashtags(s(&["no", "tags", "here"])), (s(&["no", "tags", "here"]), BTreeSet::new()));
        assert_eq!(extract_hashtags(s(&["#", "x"])), (s(&["#", "x"]), BTreeSet::new()));
    }

    #[test]
    fn stopword_file_parsing() {
        let sw = Stopwords::parse("# comment\nthe\n\n  A \nof\n");
        assert_eq!(sw.len(), 3);
        assert!(sw.contains("a") && sw.contains("the") && !sw.contains("# comment"));
    }

    #[test]
    fn corpus_filtering() {
        let records = vec![
            rec("1", "we love the new #ai model so much", "en"),
            rec("2", "nous aimons le nouveau #ai modele", "fr"),
            rec("3", "no hashtag in this one at all", "en"),
            rec("4", "what's on your mind #ai", "en"),
            rec("5", "we love the new #ai model so much", "en"),
            rec("6", "We LOVE the new model so much #ML", "en"),
            rec("7", "another five word tweet here #ml #ai", "en"),
        ];
        let (corpus, report) = filter_corpus(&records, &Stopwords::default());
        assert_eq!(report.inputs, 7);
        assert_eq!(report.dropped.non_english, 1);
        assert_eq!(report.dropped.no_hashtag, 1);
        assert_eq!(report.dropped.too_short, 1);
        // "6" has the same body as "1" once hashtags are gone
        assert_eq!(report.dropped.duplicate, 2);
        assert_eq!(report.inputs, report.kept + report.dropped.total());
        let ids: Vec<&str> = corpus.tweets.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, vec!["1", "7"]);
        assert_eq!(corpus.label_counts.get("ai"), Some(&2));
        assert_eq!(corpus.label_counts.get("ml"), Some(&1));
    }

    #[test]
    fn top_labels() {
        let counts: BTreeMap<String, usize> =
            [("a", 300), ("b", 250), ("c", 150)].iter().map(|(k, v)| ((*k).into(), *v)).collect();
        assert_eq!(select_top_labels(&counts, 2, 200), s(&["a", "b"]));
        assert_eq!(select_top_labels(&counts, 5, 200), s(&["a", "b"]));
        let tied: BTreeMap<String, usize> = [("b", 300), ("a", 300)].iter().map(|(k, v)| ((*k).into(), *v)).collect();
        assert_eq!(select_top_labels(&tied, 2, 0), s(&["a", "b"]));
    }

    #[test]
    fn dataset_expansion() {
        let tweet = |id: &str, labels: &[&str]| CleanTweet {
            id: id.into(),
            tokens: s(&[id]),
            labels: labels.iter().map(|l| String::from(*l)).collect(),
        };
        let corpus = Corpus::from_tweets(vec![tweet("t1", &["ai", "ml"]), tweet("t2", &["rare"]), tweet("t3", &["ml"])]);
        let ds = materialize_dataset(&corpus, &s(&["ml", "ai"])).unwrap();
        let flat: Vec<(&str, &str)> = ds
            .examples
            .iter()
            .map(|e| (e.tokens[0].as_str(), ds.label_set[e.label].as_str()))
            .collect();
        assert_eq!(flat, vec![("t1", "ml"), ("t1", "ai"), ("t3", "ml")]);
        assert_eq!(materialize_dataset(&corpus, &s(&["zzz"])), Err(Error::NoExamples));
        assert!(materialize_dataset(&corpus, &[]).is_err());
    }

    proptest! {
        #[test]
        fn cleaning_is_idempotent_and_ascii(text in "[ -~\u{e9}\u{2014}]{0,80}") {
            let sw: Stopwords = ["the", "a"].into_iter().collect();
            let once = clean_text(&text, &sw);
            let twice = clean_text(&once.join(" "), &sw);
            prop_assert_eq!(&once, &twice);
            for t in &once {
                prop_assert!(!t.is_empty());
                prop_assert!(t.is_ascii());
                prop_assert!(!t.chars().any(|c| c.is_ascii_uppercase()));
                prop_assert!(!sw.contains(t));
            }
        }

        #[test]
        fn top_labels_match_brute_force(counts in proptest::collection::btree_map("[a-e]{1,3}", 0usize..20, 0..15), n in 1usize..10, min in 0usize..10) {
            let got = select_top_labels(&counts, n, min);
            let mut all: Vec<(String, usize)> = counts.iter().map(|(k, v)| (k.clone(), *v)).filter(|(_, v)| *v >= min).collect();
            all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let want: Vec<String> = all.into_iter().take(n).map(|(k, _)| k).collect();
            prop_assert_eq!(got, want);
        }
    }
}
