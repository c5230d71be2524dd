use std::env;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Generates the Emoji property range table from the vendored UCD file.
fn main() {
    let src = Path::new("data/emoji-data.txt");
    println!("cargo:rerun-if-changed={}", src.display());
    let text = fs::read_to_string(src).expect("read data/emoji-data.txt");

    let mut version = String::new();
    let mut ranges: Vec<(u32, u32)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# Unicode Emoji property data, version ") {
            version = rest.trim().to_string();
        }
        let line = match line.split('#').next() {
            Some(l) if !l.trim().is_empty() => l,
            _ => continue,
        };
        let mut fields = line.split(';').map(str::trim);
        let (Some(cps), Some(prop)) = (fields.next(), fields.next()) else {
            continue;
        };
        if prop != "Emoji" {
            continue;
        }
        let (lo, hi) = match cps.split_once("..") {
            Some((a, b)) => (parse_hex(a), parse_hex(b)),
            None => (parse_hex(cps), parse_hex(cps)),
        };
        ranges.push((lo, hi));
    }
    assert!(!version.is_empty(), "emoji-data.txt is missing its version header");
    ranges.sort_unstable();

    // merge adjacent ranges so the lookup table stays small
    let mut merged: Vec<(u32, u32)> = Vec::new();
    for (lo, hi) in ranges {
        match merged.last_mut() {
            Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }

    let mut out = String::new();
    writeln!(out, "/// Unicode Emoji version the tables were generated from.").unwrap();
    writeln!(out, "pub const EMOJI_DATA_VERSION: &str = {version:?};").unwrap();
    writeln!(out, "pub(crate) static EMOJI_RANGES: &[(u32, u32)] = &[").unwrap();
    for (lo, hi) in &merged {
        writeln!(out, "    (0x{lo:04X}, 0x{hi:04X}),").unwrap();
    }
    writeln!(out, "];").unwrap();

    let dest = Path::new(&env::var("OUT_DIR").unwrap()).join("emoji_tables.rs");
    fs::write(dest, out).unwrap();
}

fn parse_hex(s: &str) -> u32 {
    u32::from_str_radix(s.trim(), 16).unwrap_or_else(|_| panic!("bad codepoint {s:?}"))
}
