use atlgts::Player;
use atlgts_service::{router, AppState, Config, Store};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn fig3() -> Value {
    serde_json::from_str(include_str!("../../core/data/fig3.json")).unwrap()
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(b) => {
            req = req.header("content-type", "application/json");
            Body::from(b.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn create(app: &Router, body: Value) -> Value {
    create_at(app, "/sessions", body).await
}

async fn create_at(app: &Router, uri: &str, body: Value) -> Value {
    let (status, v) = call(app, "POST", uri, Some(body)).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    v
}

fn fig3_session(formula: &str, mode: &str, state: &str) -> Value {
    json!({ "model": fig3(), "state": state, "formula": formula, "mode": mode, "roles": { "E": "human", "A": "canonical" } })
}

/// A move offered by the menu, chosen without any knowledge of the rules.
fn pick(menu: &Value) -> Value {
    match menu["kind"].as_str().unwrap() {
        "choice" => menu["options"][0].clone(),
        "actions" => {
            let names: Vec<Value> = menu["domains"]
                .as_array()
                .unwrap()
                .iter()
                .map(|d| d["actions"].get(0).cloned().unwrap_or(json!("0")))
                .collect();
            json!({ "type": "actions", "value": names })
        }
        "announce" => json!({ "type": "announce", "value": "2" }),
        "lower" => json!({ "type": "lower", "value": "0" }),
        other => panic!("unexpected menu {other}"),
    }
}

#[tokio::test]
async fn create_reports_phase_and_menu() {
    let app = router(AppState::default());
    let v = create(&app, fig3_session("<<>> F p", "bounded", "q0")).await;
    assert_eq!(v["version"], 0);
    assert!(v["id"].as_str().is_some_and(|s| !s.is_empty()));
    let view = &v["view"];
    assert_eq!(view["phase"], "announce");
    assert_eq!(view["pending"], "E");
    assert_eq!(view["menu"]["kind"], "announce");
    assert_eq!(view["machinePending"], false);
    assert_eq!(view["position"]["state"], "q0");
    assert_eq!(view["mode"], json!({ "bounded": "6" }));
}

#[tokio::test]
async fn setup_errors_are_400() {
    let app = router(AppState::default());
    let (status, v) = call(&app, "POST", "/sessions", Some(fig3_session("<<>> F (p", "bounded", "q0"))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["offset"], 9, "{v}");

    let body = json!({ "lazyModel": "fig2", "formula": "<<>> F p", "mode": "finitely-bounded", "roles": { "E": "canonical", "A": "human" } });
    let (status, v) = call(&app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "lazy model requires scripted machine");

    for bad in [
        json!({ "formula": "p" }),
        json!({ "model": fig3(), "formula": "p", "mode": "sideways" }),
        json!({ "model": fig3(), "formula": "p", "state": "q9" }),
        json!({ "model": fig3(), "formula": "<<2>> X p" }),
        json!({ "model": fig3(), "formula": "p", "roles": { "E": "wizard" } }),
        json!({ "model": fig3(), "formula": "p", "mode": "unbounded", "gammaBound": "3" }),
    ] {
        let (status, v) = call(&app, "POST", "/sessions", Some(bad.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad} gave {v}");
        assert!(v["error"].is_string());
    }
    let (status, _) = call(&app, "POST", "/sessions", Some(json!("not an object"))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn disjunction_choice_updates_the_view() {
    let app = router(AppState::default());
    let v = create(&app, fig3_session("p | <<>> X p", "bounded", "q2")).await;
    let id = v["id"].as_str().unwrap();
    assert_eq!(v["view"]["phase"], "choose");
    let body = json!({ "actor": "E", "move": { "type": "right" }, "version": 0 });
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(body)).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["version"], 1);
    // the single-action step is automatic, leaving the atom p at q3
    assert_eq!(v["view"]["position"]["formula"], "p");
    assert_eq!(v["view"]["position"]["state"], "q3");
    assert_eq!(v["view"]["winner"], "E");
}

#[tokio::test]
async fn illegal_moves_are_409_with_menu() {
    let app = router(AppState::default());
    let v = create(&app, fig3_session("p | <<>> X p", "bounded", "q2")).await;
    let id = v["id"].as_str().unwrap();
    let uri = format!("/sessions/{id}/moves");

    let (status, v) = call(&app, "POST", &uri, Some(json!({ "actor": "E", "move": { "type": "endNow" } }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["menu"]["kind"], "choice");
    assert_eq!(v["menu"]["options"], json!([{ "type": "left" }, { "type": "right" }]));

    let (status, v) = call(&app, "POST", &uri, Some(json!({ "actor": "A", "move": { "type": "left" } }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert!(v["error"].as_str().unwrap().contains("machine"));

    let (status, v) = call(&app, "POST", &uri, Some(json!({ "actor": "E", "move": { "type": "left" }, "version": 7 }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["version"], 0);

    let (status, _) = call(&app, "POST", &uri, Some(json!({ "actor": "E" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, v) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["version"], 0, "rejected moves leave the session alone");
}

#[tokio::test]
async fn finitely_bounded_rejects_omega() {
    let app = router(AppState::default());
    let body = json!({ "lazyModel": "fig2", "formula": "<<>> F p", "mode": "finitely-bounded", "roles": { "E": "human", "A": "fig2-abelard" } });
    let v = create(&app, body).await;
    let id = v["id"].as_str().unwrap();
    assert_eq!(v["view"]["menu"]["finiteOnly"], true);
    let mv = json!({ "actor": "E", "move": { "type": "announce", "value": "w" } });
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(mv)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"], "finite limits only");
    assert_eq!(v["menu"]["kind"], "announce");
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = router(AppState::default());
    for (method, path) in [("GET", ""), ("GET", "/transcript"), ("GET", "/labels"), ("POST", "/machine")] {
        let (status, _) = call(&app, method, &format!("/sessions/nope{path}"), None).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{method} {path}");
    }
    let mv = json!({ "actor": "E", "move": { "type": "left" } });
    let (status, _) = call(&app, "POST", "/sessions/nope/moves", Some(mv)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn menu_driven_play_terminates_with_a_winner() {
    let state = AppState::default();
    let app = router(state.clone());
    for formula in ["<<>> F p", "<<1>> G ~p", "<<>> (~p U p) | <<1>> X p"] {
        let v = create_at(&app, "/sessions?autoReply=true", fig3_session(formula, "bounded", "q0")).await;
        let id = v["id"].as_str().unwrap().to_string();
        let mut view = v["view"].clone();
        let mut moves = 0;
        while view["winner"].is_null() {
            assert_eq!(view["pending"], "E", "{view}");
            let body = json!({ "actor": "E", "move": pick(&view["menu"]) });
            let (status, v) = call(&app, "POST", &format!("/sessions/{id}/moves?autoReply=true"), Some(body)).await;
            assert_eq!(status, StatusCode::OK, "{v}");
            view = v["view"].clone();
            moves += 1;
            assert!(moves < 100);
        }
        let (status, t) = call(&app, "GET", &format!("/sessions/{id}/transcript"), None).await;
        assert_eq!(status, StatusCode::OK);
        assert!(t["winner"] == "E" || t["winner"] == "A");
        assert_eq!(t["winner"], view["winner"]);

        // the accepted operations rebuild the same session
        let shared = state.store.get(&id).unwrap();
        let rec = shared.lock().unwrap();
        assert_eq!(rec.replay().unwrap().view(), rec.session.view());
    }
}

#[tokio::test]
async fn machine_endpoint_plays_machines_only() {
    let app = router(AppState::default());
    let body = json!({ "model": fig3(), "state": "q1", "formula": "<<>> F p", "mode": "bounded:3", "roles": { "E": "canonical", "A": "canonical" } });
    let v = create(&app, body).await;
    let id = v["id"].as_str().unwrap();
    assert_eq!(v["view"]["machinePending"], true);
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/machine"), Some(json!({ "version": 0 }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["view"]["winner"], "E");
    assert_eq!(v["version"], 1);
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/machine"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);

    // a human-pending session has nothing for machines to do
    let v = create(&app, fig3_session("<<>> F p", "bounded", "q0")).await;
    let id = v["id"].as_str().unwrap();
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/machine"), None).await;
    assert_eq!(status, StatusCode::CONFLICT, "{v}");
}

#[tokio::test]
async fn labels_overlay() {
    let app = router(AppState::default());
    let v = create(&app, fig3_session("<<>> F p", "bounded:3", "q1")).await;
    let id = v["id"].as_str().unwrap();
    let (status, l) = call(&app, "GET", &format!("/sessions/{id}/labels"), None).await;
    assert_eq!(status, StatusCode::OK, "{l}");
    assert_eq!(l["controller"], "E");
    assert_eq!(l["labels"]["E"]["q1"], "2");
    assert_eq!(l["labels"]["E"]["q0"], "lose");
    assert_eq!(l["labels"]["A"]["q0"], "win");
    assert_eq!(l["formula"], "<<>> (true U p)");

    // outside embedded games there is nothing to show
    let v = create(&app, fig3_session("p | q", "bounded:3", "q1")).await;
    let id = v["id"].as_str().unwrap();
    let (status, l) = call(&app, "GET", &format!("/sessions/{id}/labels"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(l.is_null());

    let body = json!({ "lazyModel": "fig2", "formula": "<<>> F p", "mode": "finitely-bounded", "roles": { "E": "human", "A": "human" } });
    let v = create(&app, body).await;
    let id = v["id"].as_str().unwrap();
    let (status, l) = call(&app, "GET", &format!("/sessions/{id}/labels"), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{l}");
}

#[tokio::test]
async fn reads_are_idempotent() {
    let app = router(AppState::default());
    let v = create(&app, fig3_session("<<>> F p", "bounded:3", "q1")).await;
    let id = v["id"].as_str().unwrap();
    let mut seen = Vec::new();
    for _ in 0..3 {
        for path in ["", "/transcript", "/labels"] {
            seen.push(call(&app, "GET", &format!("/sessions/{id}{path}"), None).await.1);
        }
    }
    assert_eq!(seen[0..3], seen[3..6]);
    assert_eq!(seen[0..3], seen[6..9]);
}

#[tokio::test]
async fn snapshots_restore_sessions() {
    let dir = tempfile::tempdir().unwrap();
    let state = AppState::new(Store::with_snapshots(dir.path()).unwrap(), Config::default());
    let app = router(state);
    let v = create(&app, fig3_session("<<>> F p", "bounded:4", "q0")).await;
    let id = v["id"].as_str().unwrap().to_string();
    let mv = json!({ "actor": "E", "move": { "type": "announce", "value": "3" } });
    let (status, after) = call(&app, "POST", &format!("/sessions/{id}/moves?autoReply=true"), Some(mv)).await;
    assert_eq!(status, StatusCode::OK);

    let restored = router(AppState::new(Store::with_snapshots(dir.path()).unwrap(), Config::default()));
    let (status, v) = call(&restored, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, after);
}

#[tokio::test]
async fn cors_headers_for_the_ui() {
    let config = Config {
        cors_origin: Some("http://localhost:5173".into()),
        ..Config::default()
    };
    let app = router(AppState::new(Store::new(), config));
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/sessions")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .body(Body::empty())
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "http://localhost:5173");
}

#[tokio::test]
async fn distinct_sessions_run_concurrently() {
    let state = AppState::default();
    let app = router(state.clone());
    let mut handles = Vec::new();
    for k in 0..8 {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let role = if k % 2 == 0 { "canonical" } else { "random:7" };
            let body = json!({ "model": fig3(), "state": "q0", "formula": "<<>> F p", "roles": { "E": role, "A": "canonical" } });
            let v = create(&app, body).await;
            let id = v["id"].as_str().unwrap().to_string();
            let (status, v) = call(&app, "POST", &format!("/sessions/{id}/machine"), None).await;
            assert_eq!(status, StatusCode::OK);
            v["view"]["winner"].clone()
        }));
    }
    for h in handles {
        let w = h.await.unwrap();
        assert!(w == json!(Player::E) || w == json!(Player::A));
    }
    assert_eq!(state.store.len(), 8);
}
