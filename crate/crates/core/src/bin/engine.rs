use std::fs;
use std::io::{self, BufReader, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use movable::session::{self, build_scene, Engine, ReplayScript, SCENE_NAMES};
use movable::Scene;

const EXIT_PARSE: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Parser)]
#[command(name = "engine", about = "Direct-manipulation engine", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Speak the line protocol on stdin/stdout.
    Run {
        #[arg(long, default_value = "personal-data")]
        scene: String,
    },
    /// Replay a script from the default scene and print the final layout.
    Replay {
        script: PathBuf,
        #[arg(long, default_value = "personal-data")]
        scene: String,
        /// Also write the final layout to this file.
        #[arg(long)]
        snapshot_out: Option<PathBuf>,
    },
    /// Serve the protocol on a local TCP socket for the demo client.
    Demo {
        scene: String,
        #[arg(long, default_value_t = 7341)]
        port: u16,
    },
    /// Print a scene's default layout.
    DumpDefault { scene: String },
}

fn scene_or_exit(name: &str) -> Result<Scene, ExitCode> {
    build_scene(name).ok_or_else(|| {
        eprintln!("unknown scene `{name}` (known: {})", SCENE_NAMES.join(", "));
        ExitCode::from(EXIT_IO)
    })
}

fn io_failure(what: &str, e: impl std::fmt::Display) -> ExitCode {
    eprintln!("{what}: {e}");
    ExitCode::from(EXIT_IO)
}

/// Prints one line; a reader that went away early is not an error.
fn emit(text: &str) -> Result<(), ExitCode> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(io_failure("stdout", e)),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Cmd::Run { scene } => {
            let mut engine = Engine::new(scene_or_exit(&scene)?);
            let stdin = io::stdin();
            engine
                .serve(BufReader::new(stdin.lock()), io::stdout().lock())
                .map_err(|e| io_failure("stdio", e))
        }
        Cmd::Replay { script, scene, snapshot_out } => {
            let scene = scene_or_exit(&scene)?;
            let text = fs::read_to_string(&script)
                .map_err(|e| io_failure(&script.display().to_string(), e))?;
            let script = ReplayScript::parse(&text).map_err(|e| {
                eprintln!("{}: {e}", script.display());
                ExitCode::from(EXIT_PARSE)
            })?;
            let outcome = session::replay(scene, &script);
            for reply in outcome.errors() {
                eprintln!("{}", reply.to_line());
            }
            let text = outcome.final_snapshot.to_canonical();
            if let Some(path) = snapshot_out {
                fs::write(&path, &text).map_err(|e| io_failure(&path.display().to_string(), e))?;
            }
            emit(&text)
        }
        Cmd::Demo { scene, port } => {
            let mut engine = Engine::new(scene_or_exit(&scene)?);
            let listener = TcpListener::bind(("127.0.0.1", port))
                .map_err(|e| io_failure(&format!("bind 127.0.0.1:{port}"), e))?;
            eprintln!("serving `{scene}` on 127.0.0.1:{port}");
            engine.serve_tcp(listener).map_err(|e| io_failure("socket", e))
        }
        Cmd::DumpDefault { scene } => {
            emit(&scene_or_exit(&scene)?.default_layout().to_canonical())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
