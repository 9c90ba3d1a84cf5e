//! Bundled example datasets with integrity checking.
//!
//! Two datasets ship inside the library so every command works out of the
//! box: `rpcb` (15 original/replication pairs with null-result originals
//! from a preclinical cancer biology replication project, standardized mean
//! differences) and `rpp-eprp` (4 pairs from two psychology replication
//! projects, Fisher z scale). Their SHA-256 checksums are pinned at compile
//! time.
//!
//! Setting the environment variable [`DATA_DIR_ENV`] makes the loader read
//! `<dir>/<file_name>` from disk instead; the pinned checksum is then
//! enforced unless verification is explicitly disabled, so silently edited
//! copies are rejected rather than analyzed.

use sha2::{Digest, Sha256};

use crate::criteria::StudyPair;
use crate::data;
use crate::error::Error;
use crate::Result;

/// Environment variable naming a directory to load fixture files from.
pub const DATA_DIR_ENV: &str = "REPLITOOL_DATA_DIR";

/// A bundled dataset: registry name, on-disk file name, pinned checksum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub file_name: &'static str,
    pub sha256: &'static str,
    csv: &'static str,
}

/// All bundled datasets.
pub const FIXTURES: [FixtureInfo; 2] = [
    FixtureInfo {
        name: "rpcb",
        file_name: "rpcb.csv",
        sha256: "bc8bd2ef6138fcf42dcac39c9bf619ae70d6211011c50c3e457283d3363850b7",
        csv: include_str!("../../../fixtures/rpcb.csv"),
    },
    FixtureInfo {
        name: "rpp-eprp",
        file_name: "rpp_eprp.csv",
        sha256: "b8f0ab058ad72ab15cc1422b4f4879999018d9ede2a3c0183da244db95e03dce",
        csv: include_str!("../../../fixtures/rpp_eprp.csv"),
    },
];

/// Look a bundled dataset up by registry name.
pub fn resolve(name: &str) -> Result<&'static FixtureInfo> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture {
            name: name.to_string(),
        })
}

/// Lower-case hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// A resolved dataset: its CSV text, actual checksum, and where it came from.
#[derive(Debug, Clone)]
pub struct FixtureData {
    pub info: &'static FixtureInfo,
    pub csv: String,
    pub sha256: String,
    /// Whether the text was read from [`DATA_DIR_ENV`] rather than the
    /// embedded copy.
    pub from_data_dir: bool,
}

/// Fetch a bundled dataset's CSV text, honouring [`DATA_DIR_ENV`].
///
/// With `verify` set (the normal mode) a checksum mismatch against the
/// pinned value is an error; without it the actual checksum is still
/// reported but not enforced.
pub fn read_fixture(name: &str, verify: bool) -> Result<FixtureData> {
    let info = resolve(name)?;
    let (csv, from_data_dir) = match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => {
            let path = std::path::Path::new(&dir).join(info.file_name);
            (std::fs::read_to_string(path)?, true)
        }
        None => (info.csv.to_string(), false),
    };
    let sha256 = sha256_hex(csv.as_bytes());
    if verify && sha256 != info.sha256 {
        return Err(Error::ChecksumMismatch {
            name: info.name.to_string(),
            expected: info.sha256.to_string(),
            actual: sha256,
        });
    }
    Ok(FixtureData {
        info,
        csv,
        sha256,
        from_data_dir,
    })
}

/// Load and group a bundled dataset.
pub fn load_fixture(name: &str, verify: bool) -> Result<Vec<StudyPair>> {
    data::parse_pairs(&read_fixture(name, verify)?.csv)
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;
    use crate::data::EffectScale;

    // env-var manipulation must not race with loads in other tests
    static ENV_LOCK: Mutex<()> = Mutex::new(());

    #[test]
    fn embedded_texts_match_pinned_checksums() {
        let _guard = ENV_LOCK.lock().unwrap();
        for info in &FIXTURES {
            assert_eq!(
                sha256_hex(info.csv.as_bytes()),
                info.sha256,
                "{}",
                info.name
            );
        }
    }

    #[test]
    fn bundled_datasets_load_and_group() {
        let _guard = ENV_LOCK.lock().unwrap();
        let rpcb = load_fixture("rpcb", true).unwrap();
        assert_eq!(rpcb.len(), 15);
        let replication_rows: usize = rpcb.iter().map(|p| p.replications.len()).sum();
        assert_eq!(replication_rows, 20);
        assert!(rpcb.iter().all(|p| p.scale() == EffectScale::Smd));
        assert!(rpcb.iter().all(|p| p.is_null_result));

        let rpp = load_fixture("rpp-eprp", true).unwrap();
        assert_eq!(rpp.len(), 4);
        assert!(rpp.iter().all(|p| p.scale() == EffectScale::FisherZ));
        assert!(rpp.iter().all(|p| p.replications.len() == 1));
    }

    #[test]
    fn unknown_names_are_rejected_with_suggestions() {
        let _guard = ENV_LOCK.lock().unwrap();
        match load_fixture("rpcb2", true) {
            Err(Error::UnknownFixture { name }) => assert_eq!(name, "rpcb2"),
            other => panic!("expected UnknownFixture, got {other:?}"),
        }
    }

    #[test]
    fn data_dir_override_with_verification() {
        let _guard = ENV_LOCK.lock().unwrap();
        let dir = tempfile::tempdir().unwrap();

        // pristine copy: loads and reports its origin
        std::fs::write(dir.path().join("rpcb.csv"), resolve("rpcb").unwrap().csv).unwrap();
        std::env::set_var(DATA_DIR_ENV, dir.path());
        let data = read_fixture("rpcb", true).unwrap();
        assert!(data.from_data_dir);
        assert_eq!(data.sha256, resolve("rpcb").unwrap().sha256);

        // tampered copy: rejected when verifying, allowed when not
        let tampered = resolve("rpcb").unwrap().csv.replace("0.1763", "0.9999");
        std::fs::write(dir.path().join("rpcb.csv"), &tampered).unwrap();
        assert!(matches!(
            read_fixture("rpcb", true),
            Err(Error::ChecksumMismatch { .. })
        ));
        let unverified = read_fixture("rpcb", false).unwrap();
        assert_ne!(unverified.sha256, resolve("rpcb").unwrap().sha256);
        assert_eq!(load_fixture("rpcb", false).unwrap().len(), 15);

        // missing file surfaces as an IO error
        std::fs::remove_file(dir.path().join("rpcb.csv")).unwrap();
        assert!(matches!(read_fixture("rpcb", true), Err(Error::Io(_))));

        std::env::remove_var(DATA_DIR_ENV);
        let embedded = read_fixture("rpcb", true).unwrap();
        assert!(!embedded.from_data_dir);
    }
}
