#![allow(dead_code)]

use std::path::{Path, PathBuf};

use clap::Parser;
use flowmatch_cli::{run, Cli, CliError};
use serde_json::Value;

/// Runs the command line in-process and returns its console text.
pub fn flowmatch(args: &[&str]) -> Result<String, CliError> {
    let cli = Cli::try_parse_from(std::iter::once("flowmatch").chain(args.iter().copied()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut console = Vec::new();
    run(cli, &mut console)?;
    Ok(String::from_utf8(console).unwrap())
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn profile_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../profiles/sixty.profile")
}

/// Five match sets with per-layer counts (1,2,3,1), (0,3,2,1), (1,1,1,1),
/// (1,3,2,1) and (1,2,3,1), as table lines with ids 1..=5.
pub const LAYER_EXAMPLE_MATCHES: [&str; 5] = [
    r#"{"in_port":1,"eth_src":17,"eth_type":2048,"ip_src":167772161,"ip_dst":167772162,"ip_proto":6,"tp_src":80}"#,
    r#"{"eth_src":17,"eth_dst":18,"eth_type":2048,"ip_src":167772161,"ip_proto":17,"tp_dst":53}"#,
    r#"{"in_port":2,"eth_type":2048,"ip_proto":6,"tp_dst":443}"#,
    r#"{"in_port":3,"eth_src":19,"eth_dst":20,"vlan_id":10,"ip_src":167772163,"ip_dst":167772164,"tp_src":22}"#,
    r#"{"in_port":4,"eth_dst":21,"vlan_id":10,"ip_src":167772165,"ip_dst":167772166,"ip_tos":4,"tp_dst":8080}"#,
];

pub fn layer_example_lines() -> String {
    LAYER_EXAMPLE_MATCHES
        .iter()
        .enumerate()
        .map(|(i, m)| {
            format!(
                "{{\"id\":{},\"priority\":{},\"match\":{m},\"action\":\"output:{}\"}}\n",
                i + 1,
                10 * (i + 1),
                i + 1
            )
        })
        .collect()
}

pub fn read_lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
