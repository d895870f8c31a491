use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

use movable::session::build_personal_data_scene;
use movable::Engine;

fn engine() -> Command {
    Command::new(env!("CARGO_BIN_EXE_engine"))
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn replay_prints_and_writes_the_final_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("final.json");
    let result = engine()
        .arg("replay")
        .arg(golden("personal_data_demo.script"))
        .arg("--snapshot-out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(String::from_utf8(result.stdout).unwrap(), format!("{written}\n"));
    // the script ends with restore_default
    assert_eq!(written, build_personal_data_scene().default_layout().to_canonical());
}

#[test]
fn bad_script_exits_one_with_the_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("bad.script");
    std::fs::write(&script, "# comment\npress 1 2 left\nwiggle 3\n").unwrap();
    let result = engine().arg("replay").arg(&script).output().unwrap();
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("line 3"));
}

#[test]
fn missing_files_and_unknown_scenes_exit_two() {
    let result = engine().args(["replay", "/definitely/not/here.script"]).output().unwrap();
    assert_eq!(result.status.code(), Some(2));
    let result = engine().args(["dump-default", "nonsense"]).output().unwrap();
    assert_eq!(result.status.code(), Some(2));
    let result = engine().args(["run", "--scene", "nonsense"]).output().unwrap();
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn dump_default_matches_the_library() {
    for (name, scene) in [
        ("personal-data", build_personal_data_scene()),
        ("shapes", movable::session::build_shapes_scene()),
    ] {
        let result = engine().args(["dump-default", name]).output().unwrap();
        assert!(result.status.success());
        assert_eq!(
            String::from_utf8(result.stdout).unwrap(),
            format!("{}\n", scene.default_layout().to_canonical())
        );
    }
}

#[test]
fn run_answers_one_line_per_message() {
    let input = "render\n\n# ignored\npress 300 220 left\nmove 500 220\nrelease\nhide nobody\nsnapshot\n";
    let mut child = engine().arg("run").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());

    let mut reference = Engine::new(build_personal_data_scene());
    let expected: Vec<String> = ["render", "press 300 220 left", "move 500 220", "release", "hide nobody", "snapshot"]
        .iter()
        .map(|l| reference.handle_line(l).to_line())
        .collect();
    let got: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(got, expected);
    assert!(got[4].contains("\"type\":\"error\"") && got[4].contains("unknown_id"));
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn connect(port: u16) -> TcpStream {
    let deadline = Instant::now() + Duration::from_secs(10);
    loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => return s,
            Err(e) if Instant::now() > deadline => panic!("demo server never came up: {e}"),
            Err(_) => sleep(Duration::from_millis(50)),
        }
    }
}

fn exchange(stream: &TcpStream, lines: &[&str]) -> Vec<String> {
    let mut writer = stream.try_clone().unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    lines
        .iter()
        .map(|l| {
            writeln!(writer, "{l}").unwrap();
            let mut reply = String::new();
            reader.read_line(&mut reply).unwrap();
            reply.trim_end().to_string()
        })
        .collect()
}

#[test]
fn demo_server_keeps_state_across_connections() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let _server = Server(
        engine()
            .args(["demo", "personal-data", "--port", &port.to_string()])
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    );

    let drag = ["press 300 220 left", "move 500 220", "release"];
    let first = connect(port);
    exchange(&first, &drag);
    drop(first);

    let mut reference = Engine::new(build_personal_data_scene());
    for l in drag {
        reference.handle_line(l);
    }
    let second = connect(port);
    let replies = exchange(&second, &["render", "restore_default", "snapshot"]);
    assert_eq!(replies[0], reference.handle_line("render").to_line());
    assert!(replies[0].contains("\"id\":\"address\""));

    let fresh = Engine::new(build_personal_data_scene());
    assert_eq!(replies[1], movable::SessionReply::Render(fresh.scene().render_list()).to_line());
    assert_eq!(
        replies[2],
        movable::SessionReply::Snapshot(fresh.snapshot()).to_line()
    );
}
