//! Drive the CLI in-process and print the canonical JSON report.

use std::io::Write;

fn main() {
    let dir = tempdir();
    let path = dir.join("map.toml");
    std::fs::write(
        &path,
        "[model]\nkind = \"p1\"\np = 2\nnumerator = \"-x\"\n\n[options]\nprecision = 5\npoint = \"1\"\n",
    )
    .expect("write map file");

    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["padic-periods", "--json", "decompose", path.to_str().unwrap()];
    let code = padic_periods::cli::run(args, &mut out, &mut err);
    std::io::stdout().write_all(&out).unwrap();
    std::io::stderr().write_all(&err).unwrap();
    println!("exit code {code}");
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("padic-periods-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir
}
