use std::io::Write;
use std::process::{Command, Output, Stdio};

const FIG3: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/fig3.json");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atlgts")).args(args).output().unwrap()
}

fn run_with_input(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_atlgts"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn check_fig3(state: &str, gamma: &str) -> Output {
    run(&["check", "-m", FIG3, "-f", "<<>> F p", "--state", state, "--semantics", "gts-bounded", "--gamma-bound", gamma])
}

#[test]
fn check_bounded_fig3() {
    let o = check_fig3("q1", "3");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "q1\ttrue\n");

    let o = check_fig3("q0", "3");
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "q0\tfalse\n");

    let o = check_fig3("q0", "4");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_prints_every_state() {
    let o = run(&["check", "-m", FIG3, "-f", "<<>> G ~p"]);
    assert_eq!(o.status.code(), Some(1), "q0 reaches p");
    assert_eq!(stdout(&o), "q0\tfalse\nq1\tfalse\nq2\tfalse\nq3\tfalse\nq4\ttrue\nq5\ttrue\n");
}

#[test]
fn errors_exit_2() {
    for args in [
        vec!["check", "-m", "/nonexistent.json", "-f", "p"],
        vec!["check", "-m", FIG3, "-f", "<<>> F (p"],
        vec!["check", "-m", FIG3, "-f", "p", "--state", "q9"],
        vec!["check", "-m", FIG3, "-f", "p", "--semantics", "psychic"],
        vec!["check", "-m", FIG3, "-f", "p", "--gamma-bound", "3"],
        vec!["check", "--lazy", "fig2", "-f", "p"],
        vec!["labels", "-m", FIG3, "-f", "p"],
        vec!["bogus"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = run(&["check", "-m", FIG3, "-f", "<<>> F (p"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte 9"));
}

#[test]
fn labels_dump() {
    let o = run(&["labels", "-m", FIG3, "-f", "<<>> F p", "--gamma-bound", "3", "--player", "E"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().nth(1), Some("q1\t2"));
    assert_eq!(out.lines().next(), Some("q0\tlose"));
    assert_eq!(out.lines().count(), 6);

    let o = run(&["labels", "-m", FIG3, "-f", "<<>> F p", "--gamma-bound", "4", "--player", "A"]);
    assert_eq!(stdout(&o).lines().next(), Some("q0\t3"));
    assert_eq!(stdout(&o).lines().nth(4), Some("q4\twin"));
}

#[test]
fn compare_agrees_on_fig3() {
    let o = run(&["compare", "-m", FIG3, "-f", "<<>> F <<>> G ~p"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("state\tgts-bounded\tgts-finitely-bounded\tgts-unbounded\tstandard"));
    assert!(out.contains("all semantics agree"));
}

#[test]
fn difftest_is_seeded_and_passes() {
    let a = run(&["difftest", "--seed", "42", "--count", "200"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).starts_with("seed 42: 200 models"));
    let b = run(&["difftest", "--seed", "42", "--count", "200"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn play_fig2_asks_for_a_natural_number() {
    let args = ["play", "--lazy", "fig2", "-f", "<<>> F p", "--mode", "finitely-bounded", "--role", "eloise"];
    let o = run_with_input(&args, "w\n5\nend\n");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("E> announce a time limit (natural number)"), "{out}");
    assert!(out.contains("finite limits only"), "{out}");
    assert!(out.contains("E: announce 5"), "{out}");
    // ending at once on the root, which is not a goal, loses
    assert!(out.contains("winner: A"), "{out}");
}

#[test]
fn play_fig3_against_the_canonical_abelard() {
    let args = ["play", "-m", FIG3, "-f", "<<>> F p", "--state", "q1", "--mode", "bounded:3"];
    let o = run_with_input(&args, &"2\ncontinue\n".repeat(10));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("winner: E"), "{}", stdout(&o));
}

#[test]
fn play_needs_enough_input() {
    let args = ["play", "-m", FIG3, "-f", "<<>> F p", "--state", "q1"];
    let o = run_with_input(&args, "");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn play_machines_only() {
    let args = ["play", "--lazy", "fig2", "-f", "<<>> X <<>> F p", "--mode", "finitely-bounded", "--role", "none"];
    let o = run_with_input(&args, "");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("winner: E"), "{}", stdout(&o));
}

#[test]
fn serve_answers_http() {
    use std::io::Read;
    use std::net::{TcpListener, TcpStream};
    use std::time::{Duration, Instant};

    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_atlgts"))
        .args(["serve", "--port", &port.to_string()])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let start = Instant::now();
    let mut stream = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => break s,
            Err(_) if start.elapsed() < Duration::from_secs(10) => std::thread::sleep(Duration::from_millis(50)),
            Err(e) => {
                child.kill().unwrap();
                panic!("service did not come up: {e}");
            }
        }
    };
    stream
        .write_all(b"GET /sessions/missing HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
        .unwrap();
    let mut reply = String::new();
    stream.read_to_string(&mut reply).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(reply.starts_with("HTTP/1.1 404"), "{reply}");
    assert!(reply.contains("no session 'missing'"));
}
