//! Artifact writing. Every file starts with a reproducibility header naming
//! the subcommand, the master seed and a hash of the effective config;
//! nothing time-dependent is ever written, so re-running a seed reproduces
//! each artifact byte-for-byte.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub fn fnv1a64(data: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in data {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Hash of a config's canonical JSON form.
pub fn config_hash<T: serde::Serialize>(config: &T) -> u64 {
    let json = serde_json::to_string(config).expect("configs serialize");
    fnv1a64(json.as_bytes())
}

#[derive(Debug, Clone)]
pub struct RunHeader {
    pub subcommand: &'static str,
    pub seed: u64,
    pub config_hash: u64,
}

impl RunHeader {
    pub fn comment_line(&self) -> String {
        format!(
            "# qgsm {} seed={} config_hash={:016x}",
            self.subcommand, self.seed, self.config_hash
        )
    }

    pub fn json_line(&self) -> String {
        format!(
            "{{\"meta\":{{\"subcommand\":\"{}\",\"seed\":{},\"config_hash\":\"{:016x}\"}}}}",
            self.subcommand, self.seed, self.config_hash
        )
    }
}

pub struct ArtifactDir {
    dir: PathBuf,
    header: RunHeader,
    pub written: Vec<PathBuf>,
}

impl ArtifactDir {
    pub fn create(dir: &Path, header: RunHeader) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(ArtifactDir {
            dir: dir.to_path_buf(),
            header,
            written: Vec::new(),
        })
    }

    /// Writes a CSV artifact: header comment, optional extra comments, one
    /// header row, then the records.
    pub fn write_csv(
        &mut self,
        name: &str,
        comments: &[&str],
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> io::Result<PathBuf> {
        let mut out = String::new();
        writeln!(out, "{}", self.header.comment_line()).unwrap();
        for c in comments {
            writeln!(out, "# {c}").unwrap();
        }
        writeln!(out, "{}", columns.join(",")).unwrap();
        for row in rows {
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        self.write_file(name, &out)
    }

    /// Writes a JSON Lines artifact with a leading meta record.
    pub fn write_jsonl(&mut self, name: &str, lines: &[String]) -> io::Result<PathBuf> {
        let mut out = String::new();
        writeln!(out, "{}", self.header.json_line()).unwrap();
        for line in lines {
            writeln!(out, "{line}").unwrap();
        }
        self.write_file(name, &out)
    }

    /// Writes a machine-loadable artifact verbatim (no comment header; used
    /// for documents that carry their seed in-band, like snapshots).
    pub fn write_raw(&mut self, name: &str, body: &str) -> io::Result<PathBuf> {
        let mut out = body.to_string();
        if !out.ends_with('\n') {
            out.push('\n');
        }
        self.write_file(name, &out)
    }

    /// Writes a plain-text artifact under the standard header.
    pub fn write_text(&mut self, name: &str, body: &str) -> io::Result<PathBuf> {
        let mut out = String::new();
        writeln!(out, "{}", self.header.comment_line()).unwrap();
        out.push_str(body);
        if !body.ends_with('\n') {
            out.push('\n');
        }
        self.write_file(name, &out)
    }

    fn write_file(&mut self, name: &str, content: &str) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, content)?;
        self.written.push(path.clone());
        Ok(path)
    }
}
