//! Drives the HTTP service in-process: create a session on the built-in
//! six-state chain, play Eloise's moves from the served menus, then print the
//! transcript. Pass `--serve <port>` to listen for real clients instead.

use atlgts::cgm::{fig3_model, save_model};
use atlgts_service::{router, serve, AppState};
use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Value) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(if body.is_null() { Body::empty() } else { Body::from(body.to_string()) })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    serde_json::from_slice(&bytes).unwrap()
}

#[tokio::main]
async fn main() {
    let args: Vec<String> = std::env::args().collect();
    if let Some(port) = args.iter().position(|a| a == "--serve").and_then(|i| args.get(i + 1)) {
        let addr = format!("127.0.0.1:{port}").parse().expect("port");
        serve(addr, AppState::default()).await.expect("serve");
        return;
    }

    let app = router(AppState::default());
    let model: Value = serde_json::from_slice(&save_model(&fig3_model())).unwrap();
    let body = json!({
        "model": model,
        "state": "q0",
        "formula": "<<>> F p",
        "mode": "bounded:4",
        "roles": { "E": "human", "A": "canonical" },
    });
    let created = call(&app, "POST", "/sessions?autoReply=true", body).await;
    let id = created["id"].as_str().unwrap().to_string();
    println!("session {id}");

    let labels = call(&app, "GET", &format!("/sessions/{id}/labels"), Value::Null).await;
    println!("Eloise's labels: {}", labels["labels"]["E"]);

    let mut view = created["view"].clone();
    while view["winner"].is_null() {
        let menu = &view["menu"];
        let mv = match menu["kind"].as_str().unwrap() {
            "announce" => json!({ "type": "announce", "value": labels["labels"]["E"]["q0"] }),
            "choice" => {
                let options = menu["options"].as_array().unwrap();
                let end = json!({ "type": "endNow" });
                // end as soon as it is offered on the goal, else keep going
                if options.contains(&end) && view["embedded"]["state"] == "q3" {
                    end
                } else {
                    json!({ "type": "continue" })
                }
            }
            _ => json!({ "type": "actions", "value": ["0"] }),
        };
        println!("E plays {mv}");
        let body = json!({ "actor": "E", "move": mv });
        view = call(&app, "POST", &format!("/sessions/{id}/moves?autoReply=true"), body).await["view"].clone();
    }
    let t = call(&app, "GET", &format!("/sessions/{id}/transcript"), Value::Null).await;
    println!("{}", serde_json::to_string_pretty(&t).unwrap());
}
