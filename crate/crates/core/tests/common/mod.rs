#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use cohortlens::api;
use cohortlens::cli::run_command;
use cohortlens::ingest::ingest_canonical;
use cohortlens::store::{Dataset, IngestOptions};
use http_body_util::BodyExt;
use tempfile::TempDir;
use tower::ServiceExt;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// A dataset directory holding one canonical fixture, deleted on drop.
pub struct Fixture {
    pub tmp: TempDir,
    pub dir: PathBuf,
}

impl Fixture {
    pub fn canonical(name: &str) -> Self {
        let tmp = TempDir::new().unwrap();
        let dir = tmp.path().join("dataset");
        ingest_canonical(&dir, fixture(name), &IngestOptions::default()).unwrap();
        Self { tmp, dir }
    }

    pub fn dataset(&self) -> Dataset {
        Dataset::open(&self.dir).unwrap()
    }

    /// Runs the CLI against this dataset.
    pub fn cli(&self, args: &[&str]) -> CliOutput {
        let mut argv = vec!["cohortlens", "--dataset", self.dir.to_str().unwrap()];
        argv.extend_from_slice(args);
        cli(&argv)
    }

    pub fn api(&self, uri: &str) -> (StatusCode, serde_json::Value, String) {
        api_get(Arc::new(self.dataset()), uri)
    }
}

pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn cli(argv: &[&str]) -> CliOutput {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_command(argv.iter().copied(), &mut out, &mut err);
    CliOutput {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// One GET against the router; returns status, parsed body and raw body.
pub fn api_get(ds: Arc<Dataset>, uri: &str) -> (StatusCode, serde_json::Value, String) {
    let rt = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .unwrap();
    rt.block_on(async move {
        let app = api::router(ds, Some("http://localhost:5173")).unwrap();
        let response = app
            .oneshot(Request::builder().uri(uri).body(Body::empty()).unwrap())
            .await
            .unwrap();
        let status = response.status();
        let bytes = response.into_body().collect().await.unwrap().to_bytes();
        let text = String::from_utf8(bytes.to_vec()).unwrap();
        let value = serde_json::from_str(&text).unwrap_or(serde_json::Value::Null);
        (status, value, text)
    })
}

/// Query-string encoding for parameter values such as `Hispanic,Women`.
pub fn enc(s: &str) -> String {
    s.replace('%', "%25")
        .replace(' ', "%20")
        .replace(',', "%2C")
        .replace('&', "%26")
}
