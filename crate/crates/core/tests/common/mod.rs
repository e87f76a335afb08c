#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn sixty_config() -> PathBuf {
    fixtures().join("sixty/sixty.conf")
}

pub fn langscape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_langscape"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn run_cli(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        sub,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    langscape(&args)
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}
