use std::thread;
use std::time::Duration;

use reqwest::blocking::{Client, RequestBuilder};
use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) const INITIAL_BACKOFF: Duration = Duration::from_millis(200);

/// Blocking client that retries transport failures with doubling backoff.
/// HTTP error statuses are returned immediately as [`Error::Protocol`].
#[derive(Debug, Clone)]
pub(crate) struct HttpClient {
    client: Client,
    retries: u32,
}

impl HttpClient {
    pub(crate) fn new(timeout: Duration, retries: u32) -> Result<Self> {
        let client = Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| Error::Transport(format!("cannot build HTTP client: {e}")))?;
        Ok(HttpClient { client, retries })
    }

    pub(crate) fn post_form(&self, url: &str, form: &[(&str, &str)], accept: &str) -> Result<String> {
        self.send(|| {
            self.client
                .post(url)
                .header(reqwest::header::ACCEPT, accept)
                .form(form)
        })
    }

    pub(crate) fn post_json<T: Serialize + ?Sized>(&self, url: &str, body: &T) -> Result<String> {
        self.send(|| {
            self.client
                .post(url)
                .header(reqwest::header::ACCEPT, "application/json")
                .json(body)
        })
    }

    fn send(&self, build: impl Fn() -> RequestBuilder) -> Result<String> {
        let mut backoff = INITIAL_BACKOFF;
        let mut attempt = 0;
        loop {
            match build().send() {
                Ok(resp) => {
                    let status = resp.status();
                    let body = resp
                        .text()
                        .map_err(|e| Error::Transport(format!("reading response body: {e}")))?;
                    if !status.is_success() {
                        return Err(Error::Protocol {
                            status: status.as_u16(),
                            body,
                        });
                    }
                    return Ok(body);
                }
                Err(e) if attempt < self.retries => {
                    tracing::debug!(attempt, ?backoff, error = %e, "retrying request");
                    thread::sleep(backoff);
                    backoff *= 2;
                    attempt += 1;
                }
                Err(e) => {
                    return Err(Error::Transport(format!(
                        "{} after {} attempt(s): {e}",
                        e.url().map(|u| u.as_str()).unwrap_or("request"),
                        attempt + 1
                    )))
                }
            }
        }
    }
}
