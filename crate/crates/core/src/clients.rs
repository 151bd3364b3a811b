//! Pluggable text-generation clients.
//!
//! The engine never talks to a model directly; it sends a structured
//! request document and expects a structured reply. The scripted client
//! replays canned replies for tests and offline runs; the command
//! client pipes requests through an external process named by the
//! `NSPLAN_GEN_CMD` environment variable.

use std::io::{Read, Write};
use std::sync::Mutex;

use thiserror::Error;

/// Environment variable naming the external generation command.
pub const GEN_CMD_ENV: &str = "NSPLAN_GEN_CMD";

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("no generative client configured (set {GEN_CMD_ENV} or supply a scripted client)")]
    NotConfigured,
    #[error("scripted client has no reply left for this request")]
    ScriptExhausted,
    #[error("generative client failed: {0}")]
    Backend(String),
    #[error("reply does not match the expected grammar: {0}")]
    BadReply(String),
}

/// Options forwarded with every generation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenOptions {
    /// Sampling temperature; deterministic backends ignore it.
    pub temperature: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { temperature: 0.1 }
    }
}

pub trait GenerativeClient: Send + Sync {
    fn complete(&self, request: &str, opts: &GenOptions) -> Result<String, ClientError>;
    fn name(&self) -> &str {
        "generative-client"
    }
}

/// Replays a fixed reply sequence. Requests are logged for assertions.
pub struct ScriptedClient {
    replies: Mutex<std::collections::VecDeque<String>>,
    requests: Mutex<Vec<String>>,
}

impl ScriptedClient {
    pub fn new(replies: Vec<String>) -> Self {
        ScriptedClient {
            replies: Mutex::new(replies.into()),
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<String> {
        self.requests.lock().expect("requests lock").clone()
    }
}

impl GenerativeClient for ScriptedClient {
    fn complete(&self, request: &str, _opts: &GenOptions) -> Result<String, ClientError> {
        self.requests.lock().expect("requests lock").push(request.to_string());
        self.replies
            .lock()
            .expect("replies lock")
            .pop_front()
            .ok_or(ClientError::ScriptExhausted)
    }

    fn name(&self) -> &str {
        "scripted"
    }
}

/// Pipes the request into an external command's stdin and reads the
/// reply from its stdout. The command template comes from
/// [`GEN_CMD_ENV`].
pub struct CommandClient {
    program: String,
    args: Vec<String>,
}

impl CommandClient {
    pub fn from_env() -> Result<Self, ClientError> {
        match std::env::var(GEN_CMD_ENV) {
            Ok(cmd) if !cmd.trim().is_empty() => Self::from_command(&cmd),
            _ => Err(ClientError::NotConfigured),
        }
    }

    pub fn from_command(command: &str) -> Result<Self, ClientError> {
        let mut tokens = command.split_whitespace().map(str::to_string);
        let program = tokens.next().ok_or(ClientError::NotConfigured)?;
        Ok(CommandClient { program, args: tokens.collect() })
    }
}

impl GenerativeClient for CommandClient {
    fn complete(&self, request: &str, opts: &GenOptions) -> Result<String, ClientError> {
        let mut child = std::process::Command::new(&self.program)
            .args(&self.args)
            .env("NSPLAN_GEN_TEMPERATURE", format!("{}", opts.temperature))
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::piped())
            .spawn()
            .map_err(|e| ClientError::Backend(e.to_string()))?;
        child
            .stdin
            .as_mut()
            .expect("piped stdin")
            .write_all(request.as_bytes())
            .map_err(|e| ClientError::Backend(e.to_string()))?;
        drop(child.stdin.take());
        let mut reply = String::new();
        child
            .stdout
            .take()
            .expect("piped stdout")
            .read_to_string(&mut reply)
            .map_err(|e| ClientError::Backend(e.to_string()))?;
        let status = child.wait().map_err(|e| ClientError::Backend(e.to_string()))?;
        if !status.success() {
            return Err(ClientError::Backend(format!("exit status {status}")));
        }
        Ok(reply)
    }

    fn name(&self) -> &str {
        "command"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_client_replays_in_order() {
        let client = ScriptedClient::new(vec!["one".into(), "two".into()]);
        assert_eq!(client.complete("a", &GenOptions::default()).unwrap(), "one");
        assert_eq!(client.complete("b", &GenOptions::default()).unwrap(), "two");
        assert!(matches!(
            client.complete("c", &GenOptions::default()),
            Err(ClientError::ScriptExhausted)
        ));
        assert_eq!(client.requests(), vec!["a", "b", "c"]);
    }

    #[test]
    fn command_client_round_trips_through_cat() {
        let client = CommandClient::from_command("cat").unwrap();
        let reply = client.complete("hello world", &GenOptions::default()).unwrap();
        assert_eq!(reply, "hello world");
    }
}
