//! OpenAI-compatible chat-completions backend.

use super::{Agent, AgentError, CallReply, CallRequest};
use std::time::Duration;

/// Connection settings for a chat-completions endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpConfig {
    /// Base URL up to the API root, e.g. `https://api.openai.com/v1`.
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
    pub max_tokens: u32,
    pub timeout_secs: u64,
    /// Retries on 429 and 5xx responses.
    pub max_retries: u32,
}

impl HttpConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        HttpConfig {
            base_url: base_url.into(),
            model: model.into(),
            api_key_env: "DRIFTBENCH_API_KEY".into(),
            max_tokens: 768,
            timeout_secs: 120,
            max_retries: 3,
        }
    }
}

pub struct HttpAgent {
    name: String,
    config: HttpConfig,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpAgent {
    pub fn new(name: impl Into<String>, config: HttpConfig) -> Result<Self, AgentError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()?;
        Ok(HttpAgent {
            name: name.into(),
            api_key: std::env::var(&config.api_key_env).ok(),
            config,
            client,
        })
    }

    fn request_body(&self, request: &CallRequest) -> serde_json::Value {
        serde_json::json!({
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
            "temperature": 0.0,
            "max_tokens": self.config.max_tokens,
        })
    }
}

/// Pull the reply text and truncation flag out of a completion response.
fn parse_completion(value: &serde_json::Value) -> Result<CallReply, AgentError> {
    let choice = value
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| AgentError::Malformed("no choices in response".into()))?;
    let text = choice
        .pointer("/message/content")
        .and_then(|v| v.as_str())
        .ok_or_else(|| AgentError::Malformed("choice has no message content".into()))?;
    let truncated = choice.get("finish_reason").and_then(|v| v.as_str()) == Some("length");
    Ok(CallReply { text: text.to_string(), truncated })
}

/// How long to wait before retry `attempt`, honoring a Retry-After header
/// when the server sent one.
fn backoff(attempt: u32, retry_after: Option<u64>) -> Duration {
    match retry_after {
        Some(secs) => Duration::from_secs(secs.min(60)),
        None => Duration::from_secs(1 << attempt.min(5)),
    }
}

impl Agent for HttpAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn call(&self, request: &CallRequest) -> Result<CallReply, AgentError> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = self.request_body(request);
        let mut attempt = 0;
        loop {
            let mut builder = self.client.post(&url).json(&body);
            if let Some(key) = &self.api_key {
                builder = builder.bearer_auth(key);
            }
            let response = builder.send();
            match response {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let value: serde_json::Value = resp.json()?;
                        return parse_completion(&value);
                    }
                    let retry_after = resp
                        .headers()
                        .get("retry-after")
                        .and_then(|v| v.to_str().ok())
                        .and_then(|v| v.parse().ok());
                    let body_text = resp.text().unwrap_or_default();
                    let retryable = status.as_u16() == 429 || status.is_server_error();
                    if !retryable || attempt >= self.config.max_retries {
                        return Err(AgentError::Status {
                            status: status.as_u16(),
                            body: body_text.chars().take(500).collect(),
                        });
                    }
                    std::thread::sleep(backoff(attempt, retry_after));
                }
                Err(err) => {
                    if attempt >= self.config.max_retries {
                        return Err(err.into());
                    }
                    std::thread::sleep(backoff(attempt, None));
                }
            }
            attempt += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_text_and_truncation_flag() {
        let value = serde_json::json!({
            "choices": [{"message": {"content": "{\"Ana\": 1}"}, "finish_reason": "stop"}]
        });
        let reply = parse_completion(&value).unwrap();
        assert_eq!(reply.text, "{\"Ana\": 1}");
        assert!(!reply.truncated);

        let clipped = serde_json::json!({
            "choices": [{"message": {"content": "{\"Ana\""}, "finish_reason": "length"}]
        });
        assert!(parse_completion(&clipped).unwrap().truncated);
    }

    #[test]
    fn malformed_completions_are_errors() {
        for value in [
            serde_json::json!({}),
            serde_json::json!({"choices": []}),
            serde_json::json!({"choices": [{"message": {}}]}),
        ] {
            assert!(parse_completion(&value).is_err());
        }
    }

    #[test]
    fn backoff_grows_and_honors_retry_after() {
        assert_eq!(backoff(0, None), Duration::from_secs(1));
        assert_eq!(backoff(2, None), Duration::from_secs(4));
        assert_eq!(backoff(0, Some(7)), Duration::from_secs(7));
        assert_eq!(backoff(0, Some(600)), Duration::from_secs(60));
    }
}
