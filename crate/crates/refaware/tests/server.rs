use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use refaware::server::router;
use refaware::{
    analyze, to_canonical, AnalysisReport, AnalyzeRequest, CommitSource, DocumentStore, FsStore,
    GitRepo,
};
use refaware_core::DetectorConfig;
use refaware_testkit::{fixtures, FixtureRepo};
use serde_json::{json, Value};
use tower::ServiceExt;

fn report() -> AnalysisReport {
    let (fx, base, head) = FixtureRepo::from_instance(&fixtures::move_with_edit());
    let repo = GitRepo::open(fx.path()).unwrap();
    analyze(
        &repo,
        &AnalyzeRequest {
            repo_id: "demo".into(),
            change_set_id: "42".into(),
            base,
            commits: CommitSource::Range { head },
            config: DetectorConfig::default(),
        },
    )
    .unwrap()
}

struct Api {
    app: Router,
    _dir: tempfile::TempDir,
}

impl Api {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store: Arc<dyn DocumentStore> = Arc::new(FsStore::open(dir.path()).unwrap());
        let ui = dir.path().join("ui");
        std::fs::create_dir_all(&ui).unwrap();
        std::fs::write(ui.join("index.html"), "<p>ui</p>").unwrap();
        Self {
            app: router(store, Some(ui)),
            _dir: dir,
        }
    }

    async fn call(&self, method: Method, uri: &str, body: Option<String>) -> (StatusCode, String) {
        let req = Request::builder()
            .method(method)
            .uri(uri)
            .header("content-type", "application/json")
            .body(body.map_or_else(Body::empty, Body::from))
            .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }
}

fn error_code(body: &str) -> String {
    let v: Value = serde_json::from_str(body).unwrap();
    v["error"]["code"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn put_get_round_trip() {
    let api = Api::new();
    let r = report();
    let doc = to_canonical(&r);
    let (s, _) = api
        .call(Method::PUT, "/api/v1/reports/demo/42", Some(doc.clone()))
        .await;
    assert_eq!(s, StatusCode::CREATED);
    let (s, _) = api
        .call(Method::PUT, "/api/v1/reports/demo/42", Some(doc.clone()))
        .await;
    assert_eq!(s, StatusCode::OK);
    let (s, body) = api.call(Method::GET, "/api/v1/reports/demo/42", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body, doc);
}

#[tokio::test]
async fn unknown_report_is_404() {
    let api = Api::new();
    let (s, body) = api.call(Method::GET, "/api/v1/reports/ghost/1", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(error_code(&body), "NOT_FOUND");
}

#[tokio::test]
async fn malformed_report_names_the_field() {
    let api = Api::new();
    let mut v = serde_json::to_value(report()).unwrap();
    v["pairs"][0]["refactorings"][0]["refactoring"]["kind"] = json!("TELEPORT");
    let (s, body) = api
        .call(Method::PUT, "/api/v1/reports/demo/42", Some(v.to_string()))
        .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let e: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(e["error"]["code"], "VALIDATION_ERROR");
    assert_eq!(
        e["error"]["path"],
        "pairs[0].refactorings[0].refactoring.kind"
    );

    let (s, body) = api
        .call(
            Method::PUT,
            "/api/v1/reports/other/42",
            Some(to_canonical(&report())),
        )
        .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "VALIDATION_ERROR");
}

#[tokio::test]
async fn refactorings_of_a_pair() {
    let api = Api::new();
    let r = report();
    api.call(
        Method::PUT,
        "/api/v1/reports/demo/42",
        Some(to_canonical(&r)),
    )
    .await;
    let p = &r.pairs[0].pair;
    let uri = format!(
        "/api/v1/reports/demo/42/refactorings?pair={}..{}",
        p.before.id, p.after.id
    );
    let (s, body) = api.call(Method::GET, &uri, None).await;
    assert_eq!(s, StatusCode::OK);
    let v: Value = serde_json::from_str(&body).unwrap();
    let list = v["refactorings"].as_array().unwrap();
    assert_eq!(list.len(), 1);
    assert_eq!(list[0]["refactoring"]["kind"], "MOVE_FUNCTION");
    assert_eq!(list[0]["refactoring"]["description"], "method m1() moved");

    let (s, body) = api
        .call(Method::GET, "/api/v1/reports/demo/42/refactorings", None)
        .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(
        serde_json::from_str::<Value>(&body).unwrap()["pair"]["label"]["type"],
        "MAIN"
    );

    let (s, _) = api
        .call(
            Method::GET,
            "/api/v1/reports/demo/42/refactorings?pair=aaaa..bbbb",
            None,
        )
        .await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = api
        .call(
            Method::GET,
            "/api/v1/reports/demo/42/refactorings?pair=nodots",
            None,
        )
        .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn events_flow() {
    let api = Api::new();
    api.call(
        Method::PUT,
        "/api/v1/reports/demo/42",
        Some(to_canonical(&report())),
    )
    .await;
    let ev = |kind: &str, at: &str| {
        json!({
            "repo_id": "demo", "change_set_id": "42", "refactoring_id": "main-0",
            "event": kind, "at": at
        })
        .to_string()
    };
    for (k, at) in [
        ("R_CLICK_RIGHT", "2024-01-01T00:00:00Z"),
        ("WINDOW_OPEN", "2024-01-01T00:00:01Z"),
        ("WINDOW_CLOSE", "2024-01-01T00:00:09Z"),
    ] {
        let (s, _) = api
            .call(Method::POST, "/api/v1/events", Some(ev(k, at)))
            .await;
        assert_eq!(s, StatusCode::CREATED);
    }
    let (s, body) = api
        .call(
            Method::POST,
            "/api/v1/events",
            Some(ev("WINDOW_CLOSE", "2023-12-31T00:00:00Z")),
        )
        .await;
    assert_eq!(
        (s, error_code(&body)),
        (StatusCode::BAD_REQUEST, "VALIDATION_ERROR".into())
    );
    let (s, body) = api
        .call(
            Method::POST,
            "/api/v1/events",
            Some(ev("DOUBLE_CLICK", "2024-01-01T00:00:00Z")),
        )
        .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(
        serde_json::from_str::<Value>(&body).unwrap()["error"]["path"],
        "event"
    );

    let (s, body) = api.call(Method::GET, "/api/v1/events/demo/42", None).await;
    assert_eq!(s, StatusCode::OK);
    let list: Vec<Value> = serde_json::from_str(&body).unwrap();
    assert_eq!(list.len(), 3);
    assert_eq!(list[2]["event"], "WINDOW_CLOSE");

    let (s, _) = api.call(Method::GET, "/api/v1/events/ghost/1", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn static_files_are_served_beside_the_api() {
    let api = Api::new();
    let (s, body) = api.call(Method::GET, "/index.html", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body, "<p>ui</p>");
}
