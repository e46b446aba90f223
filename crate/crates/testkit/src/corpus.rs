use std::fs;
use std::path::{Path, PathBuf};

use osm_core::pipeline::{load_sources, Source};

pub const TARGET: &str = "HealthService.requestHistory";

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn sources_dir() -> PathBuf {
    root().join("ehr")
}

pub fn props_path() -> PathBuf {
    root().join("ehr.props")
}

pub fn traces_dir() -> PathBuf {
    root().join("ehr/traces")
}

pub fn sources() -> Vec<Source> {
    load_sources(&[sources_dir()]).expect("corpus loads")
}

fn drop_from_precedence(text: &str, aspect: &str) -> String {
    text.lines()
        .map(|line| match line.trim().strip_prefix("precedence") {
            Some(rest) => {
                let names: Vec<&str> = rest
                    .trim()
                    .trim_end_matches(';')
                    .split(',')
                    .map(str::trim)
                    .filter(|n| *n != aspect)
                    .collect();
                if names.is_empty() {
                    String::new()
                } else {
                    format!("precedence {};", names.join(", "))
                }
            }
            None => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Corpus with the file declaring `aspect` removed and the aspect struck from
/// the precedence directive.
pub fn sources_without(file: &str, aspect: &str) -> Vec<Source> {
    sources()
        .into_iter()
        .filter(|s| s.path.file_name().is_some_and(|n| n != file))
        .map(|s| Source {
            text: drop_from_precedence(&s.text, aspect),
            path: s.path,
        })
        .collect()
}

/// Writes [`sources_without`] into `dest` and returns `dest`.
pub fn write_without(dest: &Path, file: &str, aspect: &str) -> PathBuf {
    for s in sources_without(file, aspect) {
        let name = s.path.file_name().expect("file name");
        fs::write(dest.join(name), &s.text).expect("write fixture");
    }
    dest.to_path_buf()
}
