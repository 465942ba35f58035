//! Command-line interface. Placeholder while the verbs are being built.

/// Entry point: parses `argv` and returns the process exit code.
pub fn run(_argv: &[String]) -> i32 {
    eprintln!("command-line interface not wired up yet");
    2
}
