//! Runs every `console` block of the workspace README and compares stdout.

use std::path::PathBuf;
use std::process::Command;

struct Example {
    line: usize,
    args: Vec<String>,
    expected: String,
}

/// Whitespace splitting with single-quoted segments.
fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut started = false;
    for c in s.chars() {
        match c {
            '\'' => {
                quoted = !quoted;
                started = true;
            }
            c if c.is_whitespace() && !quoted => {
                if started {
                    out.push(std::mem::take(&mut cur));
                    started = false;
                }
            }
            c => {
                cur.push(c);
                started = true;
            }
        }
    }
    if started {
        out.push(cur);
    }
    out
}

fn examples(readme: &str) -> Vec<Example> {
    let mut out: Vec<Example> = Vec::new();
    let mut in_block = false;
    for (i, line) in readme.lines().enumerate() {
        if line.starts_with("```") {
            in_block = line.trim() == "```console";
            continue;
        }
        if !in_block {
            continue;
        }
        if let Some(cmd) = line.strip_prefix("$ ") {
            let mut args = split_args(cmd);
            assert_eq!(
                args.remove(0),
                "dickson",
                "README line {}: only dickson commands",
                i + 1
            );
            out.push(Example {
                line: i + 1,
                args,
                expected: String::new(),
            });
        } else {
            let ex = out.last_mut().expect("output before any command");
            ex.expected.push_str(line);
            ex.expected.push('\n');
        }
    }
    out
}

#[test]
fn readme_cli_examples() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../README.md");
    let readme = std::fs::read_to_string(path).unwrap();
    let examples = examples(&readme);
    assert!(examples.len() >= 5, "found {} examples", examples.len());
    for ex in examples {
        let out = Command::new(env!("CARGO_BIN_EXE_dickson"))
            .args(&ex.args)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "README line {}: exit {:?}: {}",
            ex.line,
            out.status,
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(
            String::from_utf8(out.stdout).unwrap(),
            ex.expected,
            "README line {}",
            ex.line
        );
    }
}

#[test]
fn argument_splitting() {
    assert_eq!(split_args("a  'b c' d''"), vec!["a", "b c", "d"]);
    assert_eq!(split_args("--word '[0,1]'"), vec!["--word", "[0,1]"]);
}
