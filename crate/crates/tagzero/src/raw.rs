//! Streaming-API JSON lines into [`RawTweetRecord`]s.

use std::io::BufRead;
use std::path::Path;

use serde::Deserialize;
use tagzero_core::ingest::RawTweetRecord;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
struct ExtendedTweet {
    full_text: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawJson {
    id_str: Option<String>,
    id: Option<u64>,
    text: Option<String>,
    #[serde(default)]
    truncated: bool,
    extended_tweet: Option<ExtendedTweet>,
    retweeted_status: Option<Box<RawJson>>,
    lang: Option<String>,
}

impl RawJson {
    fn into_record(self, parent_id: Option<&str>) -> Option<RawTweetRecord> {
        let id = self
            .id_str
            .or_else(|| self.id.map(|n| n.to_string()))
            .or_else(|| parent_id.map(str::to_owned))?;
        let retweet = match self.retweeted_status {
            Some(inner) => Some(Box::new(inner.into_record(Some(&id))?)),
            None => None,
        };
        Some(RawTweetRecord {
            text: self.text,
            truncated: self.truncated,
            extended_text: self.extended_tweet.and_then(|e| e.full_text),
            retweet,
            lang: self.lang.unwrap_or_default(),
            id,
        })
    }
}

/// Parses one JSON object per line; blank lines are skipped. A nested
/// retweet without an id of its own takes its parent's.
pub fn parse_raw_line(line: &str) -> std::result::Result<RawTweetRecord, String> {
    let raw: RawJson = serde_json::from_str(line).map_err(|e| format!("invalid tweet JSON: {e}"))?;
    raw.into_record(None).ok_or_else(|| "record has neither id_str nor id".to_owned())
}

pub fn read_raw_jsonl<R: BufRead>(reader: R, path: &Path) -> Result<Vec<RawTweetRecord>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_raw_line(&line).map_err(|m| CliError::parse(path, i + 1, m))?);
    }
    if records.is_empty() {
        return Err(CliError::Data(format!("{}: no tweet records", path.display())));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tagzero_core::ingest::normalize_raw;

    #[test]
    fn field_mapping() {
        let r = parse_raw_line(
            r#"{"id_str":"7","text":"short…","truncated":true,"extended_tweet":{"full_text":"the long one"},"lang":"en"}"#,
        )
        .unwrap();
        assert_eq!(r.id, "7");
        assert!(r.truncated);
        assert_eq!(normalize_raw(&r).unwrap(), "the long one");
    }

    #[test]
    fn retweets_recover_the_original_and_inherit_ids() {
        let r = parse_raw_line(
            r#"{"id":12,"text":"RT @u: x","lang":"en","retweeted_status":{"text":"original body","truncated":false}}"#,
        )
        .unwrap();
        assert_eq!(r.id, "12");
        assert_eq!(r.retweet.as_ref().unwrap().id, "12");
        assert_eq!(normalize_raw(&r).unwrap(), "original body");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let input = "{\"id_str\":\"1\",\"text\":\"a\",\"lang\":\"en\"}\n\n{not json\n";
        let err = read_raw_jsonl(input.as_bytes(), Path::new("raw.jsonl")).unwrap_err();
        assert!(err.to_string().starts_with("raw.jsonl:3:"), "{err}");
        let err = read_raw_jsonl("{\"text\":\"x\"}".as_bytes(), Path::new("r")).unwrap_err();
        assert!(err.to_string().starts_with("r:1:"), "{err}");
        assert!(read_raw_jsonl("\n\n".as_bytes(), Path::new("r")).is_err());
    }
}
