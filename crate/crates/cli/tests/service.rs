use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use trickcheck::dsl::pretty_print;
use trickcheck::oracle::fixtures;
use trickcheck::trick::run_path;
use trickcheck::{shousuigongcishi, ChoiceBinding, ExecConfig};
use trickcheck_cli::service::router;

fn app() -> Router {
    router(shousuigongcishi(), ExecConfig::default())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let json = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
    (status, json)
}

async fn create(app: &Router) -> String {
    let (status, body) = call(app, "POST", "/api/session", None).await;
    assert_eq!(status, StatusCode::CREATED);
    body["session_id"].as_str().unwrap().to_string()
}

async fn choose(app: &Router, id: &str, value: Value) -> (StatusCode, Value) {
    call(app, "POST", &format!("/api/session/{id}/choose"), Some(json!({ "value": value }))).await
}

#[tokio::test]
async fn create_shows_first_prompt() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/session", None).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["deck"], "a b c d a b c d");
    assert_eq!(body["pending"]["name"], "n1");
    assert_eq!(body["pending"]["prompt"], "how many words in your name?");
    assert_eq!(body["pending"]["domain"], json!([2, 3]));
    assert_eq!(body["done"], false);
    assert!(body["hidden"].is_null());
}

#[tokio::test]
async fn walkthrough_matches_run_path() {
    let app = app();
    let id = create(&app).await;
    let mut last = Value::Null;
    for value in [json!(2), json!(1), json!("southerner"), json!(1), json!("male")] {
        let (status, body) = choose(&app, &id, value).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        last = body;
    }
    assert_eq!(last["done"], true);
    let (status, state) = call(&app, "GET", &format!("/api/session/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state["final"], "yes");
    assert_eq!(state, last);

    let binding: ChoiceBinding =
        [("n1", 2), ("slot2", 1), ("n2", 1), ("slot4", 1), ("n3", 1)].into_iter().map(|(n, v)| (n.to_string(), v)).collect();
    let record: Value = serde_json::from_str(&run_path(&shousuigongcishi(), &binding, ExecConfig::default()).unwrap().to_json()).unwrap();
    for key in ["binding", "hidden", "checkpoints", "actions", "final"] {
        assert_eq!(state[key], record[key], "{key}");
    }
    let ps: Vec<bool> = state["checkpoints"].as_array().unwrap().iter().map(|c| c["p"].as_bool().unwrap()).collect();
    assert_eq!(ps, vec![true, true, false, false, true, true]);
}

#[tokio::test]
async fn checkpoints_appear_as_they_are_reached() {
    let app = app();
    let id = create(&app).await;
    for v in [2, 1, 1] {
        choose(&app, &id, json!(v)).await;
    }
    let (_, body) = choose(&app, &id, json!(1)).await;
    assert_eq!(body["checkpoints"].as_array().unwrap().len(), 1);
    assert_eq!(body["pending"]["name"], "n3");
    assert!(body["hidden"].is_null());
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (status, body) = call(&app, "GET", "/api/session/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body["error"].is_string());
    assert_eq!(choose(&app, "nope", json!(2)).await.0, StatusCode::NOT_FOUND);

    let id = create(&app).await;
    assert_eq!(choose(&app, &id, json!(99)).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(choose(&app, &id, json!("tall")).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(choose(&app, &id, json!(-1)).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    // rejected values leave the session untouched
    let (_, state) = call(&app, "GET", &format!("/api/session/{id}"), None).await;
    assert_eq!(state["pending"]["name"], "n1");

    for v in [3, 4, 3, 3, 2] {
        assert_eq!(choose(&app, &id, json!(v)).await.0, StatusCode::OK);
    }
    let (status, _) = choose(&app, &id, json!(1)).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = app();
    let a = create(&app).await;
    let b = create(&app).await;
    assert_ne!(a, b);
    choose(&app, &a, json!(3)).await;
    let (_, sb) = call(&app, "GET", &format!("/api/session/{b}"), None).await;
    assert_eq!(sb["pending"]["name"], "n1");
    let (_, sa) = call(&app, "GET", &format!("/api/session/{a}"), None).await;
    assert_eq!(sa["pending"]["name"], "slot2");
}

#[tokio::test]
async fn check_endpoint() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/check", Some(json!({ "formula": "EF p" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["verdict"], true);
    assert_eq!(body["evidence"]["label"], 4);

    let (_, body) = call(&app, "POST", "/api/check", Some(json!({ "formula": "AG p" }))).await;
    assert_eq!(body["verdict"], false);
    assert_eq!(body["evidence"]["label"], 6);
    assert!(body["explanation"].as_str().unwrap().contains("<-- counterexample"));

    let (_, body) = call(&app, "POST", "/api/check", Some(json!({ "formula": "AF p", "slot_mode": "exclude_adjacent" }))).await;
    assert_eq!(body["m"], 48);

    let mutant = pretty_print(&fixtures::without_gender_discard());
    let (_, body) = call(&app, "POST", "/api/check", Some(json!({ "formula": "AF (p & empty)", "trick": mutant }))).await;
    assert_eq!(body["verdict"], false);
    assert_eq!(body["evidence"]["kind"], "counterexample");

    let (status, body) = call(&app, "POST", "/api/check", Some(json!({ "formula": "AF (" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["error"].as_str().unwrap().contains("column 5"));
    let (status, _) = call(&app, "POST", "/api/check", Some(json!({ "formula": "p", "trick": "rotat 2" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn trick_endpoint_serves_the_script() {
    let (status, body) = call(&app(), "GET", "/api/trick", None).await;
    assert_eq!(status, StatusCode::OK);
    let script = body["script"].as_str().unwrap();
    assert_eq!(trickcheck::dsl::parse(script).unwrap(), shousuigongcishi());
}

#[tokio::test]
async fn concurrent_sessions_replay_identically() {
    let app = app();
    let mut handles = Vec::new();
    for _ in 0..8 {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let id = create(&app).await;
            for v in [3, 2, 2, 4, 2] {
                assert_eq!(choose(&app, &id, json!(v)).await.0, StatusCode::OK);
            }
            let (_, mut state) = call(&app, "GET", &format!("/api/session/{id}"), None).await;
            state.as_object_mut().unwrap().remove("session_id");
            state
        }));
    }
    let mut states = Vec::new();
    for h in handles {
        states.push(h.await.unwrap());
    }
    assert!(states.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(states[0]["final"], "yes");
}
