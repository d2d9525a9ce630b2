#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

pub fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/hamster")
}

/// Copies the fixture repository into a fresh temporary directory.
pub fn scratch_repo() -> (tempfile::TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let dst = tmp.path().join("repo");
    copy_dir(&fixture(), &dst);
    (tmp, dst)
}

fn copy_dir(src: &Path, dst: &Path) {
    fs::create_dir_all(dst).unwrap();
    for entry in fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        let to = dst.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &to);
        } else {
            fs::copy(entry.path(), &to).unwrap();
        }
    }
}

pub const BG_QUERY: &str = "SELECT * WHERE (?link, <rdf:predicate>, <mir:BackgroundInfo>) USING \
rdf FOR <http://www.w3.org/1999/02/22-rdf-syntax-ns#>, mir FOR <http://www.rz.fhtw-berlin.de/MIR#>";
