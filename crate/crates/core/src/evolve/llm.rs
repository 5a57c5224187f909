//! LLM access for the evolution loop: a chat-completion client with a live
//! HTTP transport and a scripted fixture transport for deterministic runs,
//! plus response parsing (last fenced code block → score program).

use crate::dsl::{ParseError, ScoreProgram};
use serde::Deserialize;
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use std::time::Duration;

/// Transport selection: a real HTTP endpoint or a canned response file
/// (responses separated by `---RESPONSE---` lines, served in order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LlmVariant {
    Live,
    Scripted(PathBuf),
}

#[derive(Debug, Clone)]
pub struct LlmClientConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u64,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout_s: f64,
    /// Extra attempts after the first on 429/5xx/transport errors.
    pub retries: u32,
    /// Base of the exponential backoff between attempts, in seconds.
    pub backoff_base_s: f64,
    pub variant: LlmVariant,
}

impl Default for LlmClientConfig {
    fn default() -> Self {
        Self {
            endpoint: String::new(),
            model: String::new(),
            temperature: 0.7,
            top_p: 0.95,
            max_tokens: 8192,
            api_key_env: "LLM_API_KEY".into(),
            timeout_s: 120.0,
            retries: 3,
            backoff_base_s: 1.0,
            variant: LlmVariant::Live,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("scripted fixture exhausted after {0} responses")]
    FixtureExhausted(usize),
    #[error("scripted fixture unreadable: {0}")]
    FixtureIo(String),
    #[error("api key env var {0} is unset")]
    MissingApiKey(String),
    #[error("llm request failed after {attempts} attempts: {last_error}")]
    RequestFailed { attempts: u32, last_error: String },
    #[error("malformed completion response: {0}")]
    MalformedResponse(String),
}

/// Minimal slice of a chat-completion response body.
#[derive(Deserialize)]
struct CompletionBody {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    message: CompletionMessage,
}

#[derive(Deserialize)]
struct CompletionMessage {
    content: String,
}

/// One transport attempt's outcome. Separated from the client so retry
/// behavior is testable without a network.
pub(crate) struct TransportReply {
    pub status: u16,
    pub body: String,
}

pub(crate) trait ChatTransport {
    fn send(&mut self, body: &serde_json::Value) -> Result<TransportReply, String>;
}

struct HttpTransport {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
}

impl ChatTransport for HttpTransport {
    fn send(&mut self, body: &serde_json::Value) -> Result<TransportReply, String> {
        let resp = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp.text().map_err(|e| e.to_string())?;
        Ok(TransportReply { status, body })
    }
}

/// Chat-completion client. Scripted clients replay fixture responses in
/// order; live clients make one HTTP round trip per query with exponential
/// backoff on 429/5xx and transport errors.
pub struct LlmClient {
    config: LlmClientConfig,
    responses: Vec<String>,
    cursor: usize,
    transport: Option<Box<dyn ChatTransport>>,
}

impl LlmClient {
    pub fn new(config: LlmClientConfig) -> Result<Self, LlmError> {
        let responses = match &config.variant {
            LlmVariant::Scripted(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| LlmError::FixtureIo(format!("{}: {e}", path.display())))?;
                split_fixture(&text)
            }
            LlmVariant::Live => Vec::new(),
        };
        Ok(Self { config, responses, cursor: 0, transport: None })
    }

    #[cfg(test)]
    pub(crate) fn with_transport(
        config: LlmClientConfig,
        transport: Box<dyn ChatTransport>,
    ) -> Self {
        Self { config, responses: Vec::new(), cursor: 0, transport: Some(transport) }
    }

    /// Number of queries already served; advances on every call, success or
    /// not, so a resumed run can fast-forward with [`Self::set_cursor`].
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn set_cursor(&mut self, cursor: usize) {
        self.cursor = cursor;
    }

    /// One completion round trip for the given system/user pair.
    pub fn query(&mut self, system: &str, user: &str) -> Result<String, LlmError> {
        self.cursor += 1;
        match self.config.variant.clone() {
            LlmVariant::Scripted(_) => {
                let idx = self.cursor - 1;
                self.responses
                    .get(idx)
                    .cloned()
                    .ok_or(LlmError::FixtureExhausted(self.responses.len()))
            }
            LlmVariant::Live => self.query_live(system, user),
        }
    }

    fn query_live(&mut self, system: &str, user: &str) -> Result<String, LlmError> {
        let body = json!({
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
            "max_tokens": self.config.max_tokens,
        });
        if self.transport.is_none() {
            let api_key = std::env::var(&self.config.api_key_env)
                .map_err(|_| LlmError::MissingApiKey(self.config.api_key_env.clone()))?;
            let client = reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs_f64(self.config.timeout_s))
                .build()
                .map_err(|e| LlmError::RequestFailed {
                    attempts: 0,
                    last_error: e.to_string(),
                })?;
            self.transport = Some(Box::new(HttpTransport {
                client,
                endpoint: self.config.endpoint.clone(),
                api_key,
            }));
        }
        let transport = self.transport.as_mut().expect("installed above");
        let attempts = self.config.retries + 1;
        let mut last_error = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                let backoff = self.config.backoff_base_s * 2f64.powi(attempt as i32 - 1);
                std::thread::sleep(Duration::from_secs_f64(backoff));
            }
            match transport.send(&body) {
                Ok(reply) if reply.status == 200 => {
                    let parsed: CompletionBody = serde_json::from_str(&reply.body)
                        .map_err(|e| LlmError::MalformedResponse(e.to_string()))?;
                    return parsed
                        .choices
                        .first()
                        .map(|c| c.message.content.clone())
                        .ok_or_else(|| LlmError::MalformedResponse("no choices".into()));
                }
                Ok(reply) if reply.status == 429 || reply.status >= 500 => {
                    last_error = format!("http status {}", reply.status);
                }
                Ok(reply) => {
                    // Other client errors are not retryable.
                    return Err(LlmError::RequestFailed {
                        attempts: attempt + 1,
                        last_error: format!("http status {}", reply.status),
                    });
                }
                Err(e) => last_error = e,
            }
        }
        Err(LlmError::RequestFailed { attempts, last_error })
    }
}

/// Splits a scripted fixture into responses on `---RESPONSE---` separator
/// lines. Leading/trailing blank space around each response is trimmed.
fn split_fixture(text: &str) -> Vec<String> {
    text.split("\n---RESPONSE---\n")
        .flat_map(|chunk| {
            // Tolerate a separator as the very first or last line too.
            let chunk = chunk.strip_prefix("---RESPONSE---\n").unwrap_or(chunk);
            let chunk = chunk.strip_suffix("\n---RESPONSE---").unwrap_or(chunk);
            let trimmed = chunk.trim();
            (!trimmed.is_empty()).then(|| trimmed.to_string())
        })
        .collect()
}

/// Why a response was rejected instead of becoming a candidate program.
#[derive(Debug, thiserror::Error)]
pub enum RejectReason {
    #[error("no fenced code block in response")]
    NoCodeBlock,
    #[error("program parse failed: {0}")]
    Parse(#[from] ParseError),
}

/// Extracts the last complete fenced code block and parses it as a score
/// program. Returns the program plus parser warnings (e.g. θ⁰ clamping).
pub fn parse_llm_response(text: &str) -> Result<(ScoreProgram, Vec<String>), RejectReason> {
    let block = last_code_block(text).ok_or(RejectReason::NoCodeBlock)?;
    Ok(ScoreProgram::parse(&block)?)
}

/// The contents of the last complete ``` fence in the text. Opening fences
/// may carry a language tag; an unpaired trailing fence is ignored.
fn last_code_block(text: &str) -> Option<String> {
    let mut blocks: Vec<String> = Vec::new();
    let mut current: Option<String> = None;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            match current.take() {
                Some(block) => blocks.push(block),
                None => current = Some(String::new()),
            }
        } else if let Some(block) = current.as_mut() {
            block.push_str(line);
            block.push('\n');
        }
    }
    blocks.pop()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;
    use std::rc::Rc;
    use tempfile::tempdir;

    const PROGRAM: &str = "spl/1\nused_features: [9]\nparams: [0.5]\nbounds: [[0, 1]]\nscore:\nreturn param(0) * feature(9)\n";

    #[test]
    fn scripted_responses_come_back_in_order() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("responses.txt");
        fs::write(&path, "first\n---RESPONSE---\nsecond\n---RESPONSE---\nthird\n").unwrap();
        let config = LlmClientConfig {
            variant: LlmVariant::Scripted(path),
            ..LlmClientConfig::default()
        };
        let mut client = LlmClient::new(config).unwrap();
        assert_eq!(client.query("s", "u").unwrap(), "first");
        assert_eq!(client.query("s", "u").unwrap(), "second");
        assert_eq!(client.query("s", "u").unwrap(), "third");
        assert!(matches!(
            client.query("s", "u").unwrap_err(),
            LlmError::FixtureExhausted(3)
        ));
        assert_eq!(client.cursor(), 4);
    }

    #[test]
    fn cursor_fast_forward_skips_served_responses() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("responses.txt");
        fs::write(&path, "a\n---RESPONSE---\nb\n").unwrap();
        let config = LlmClientConfig {
            variant: LlmVariant::Scripted(path),
            ..LlmClientConfig::default()
        };
        let mut client = LlmClient::new(config).unwrap();
        client.set_cursor(1);
        assert_eq!(client.query("s", "u").unwrap(), "b");
    }

    struct FlakyTransport {
        replies: Rc<RefCell<Vec<(u16, String)>>>,
        calls: Rc<RefCell<u32>>,
    }

    impl ChatTransport for FlakyTransport {
        fn send(&mut self, _body: &serde_json::Value) -> Result<TransportReply, String> {
            *self.calls.borrow_mut() += 1;
            let (status, body) = self.replies.borrow_mut().remove(0);
            Ok(TransportReply { status, body })
        }
    }

    fn ok_body(content: &str) -> String {
        serde_json::to_string(&json!({
            "choices": [{"message": {"role": "assistant", "content": content}}]
        }))
        .unwrap()
    }

    #[test]
    fn retries_recover_from_consecutive_500s() {
        let replies = Rc::new(RefCell::new(vec![
            (500, String::new()),
            (500, String::new()),
            (200, ok_body("done")),
        ]));
        let calls = Rc::new(RefCell::new(0));
        let config = LlmClientConfig {
            retries: 3,
            backoff_base_s: 0.0,
            ..LlmClientConfig::default()
        };
        let mut client = LlmClient::with_transport(
            config,
            Box::new(FlakyTransport { replies, calls: calls.clone() }),
        );
        assert_eq!(client.query("s", "u").unwrap(), "done");
        assert_eq!(*calls.borrow(), 3);
    }

    #[test]
    fn exhausted_retries_surface_the_last_error() {
        let replies = Rc::new(RefCell::new(vec![
            (429, String::new()),
            (503, String::new()),
        ]));
        let config = LlmClientConfig {
            retries: 1,
            backoff_base_s: 0.0,
            ..LlmClientConfig::default()
        };
        let mut client = LlmClient::with_transport(
            config,
            Box::new(FlakyTransport { replies, calls: Rc::new(RefCell::new(0)) }),
        );
        let err = client.query("s", "u").unwrap_err();
        assert!(err.to_string().contains("after 2 attempts"), "{err}");
        assert!(err.to_string().contains("503"), "{err}");
    }

    #[test]
    fn client_errors_other_than_429_do_not_retry() {
        let replies = Rc::new(RefCell::new(vec![(400, String::new())]));
        let calls = Rc::new(RefCell::new(0));
        let config = LlmClientConfig {
            retries: 5,
            backoff_base_s: 0.0,
            ..LlmClientConfig::default()
        };
        let mut client = LlmClient::with_transport(
            config,
            Box::new(FlakyTransport { replies, calls: calls.clone() }),
        );
        assert!(client.query("s", "u").is_err());
        assert_eq!(*calls.borrow(), 1);
    }

    #[test]
    fn parses_the_last_fenced_block() {
        let text = format!(
            "Here is a first sketch:\n```spl\nnot a program\n```\nAnd the final version:\n```spl\n{PROGRAM}```\nHope this helps!"
        );
        let (program, warnings) = parse_llm_response(&text).unwrap();
        assert_eq!(program.used_features, vec![9]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn prose_without_code_is_rejected() {
        let err = parse_llm_response("I think feature 9 is great.").unwrap_err();
        assert!(matches!(err, RejectReason::NoCodeBlock));
    }

    #[test]
    fn unterminated_fence_is_not_a_block() {
        let text = "```spl\nspl/1\nnever closed";
        assert!(matches!(
            parse_llm_response(text).unwrap_err(),
            RejectReason::NoCodeBlock
        ));
    }

    #[test]
    fn parse_failures_carry_diagnostics() {
        let text = "```\nspl/1\nused_features: [9]\nparams: [0.5, 0.5]\nbounds: [[0, 1]]\nscore:\nreturn param(0)\n```";
        let err = parse_llm_response(text).unwrap_err();
        assert!(err.to_string().contains("bounds"), "diagnostic was: {err}");
    }

    #[test]
    fn fixture_without_separators_is_one_response() {
        let parts = split_fixture("just one response\nwith two lines");
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0], "just one response\nwith two lines");
    }
}
