//! Shipped data files: presentations, integer and Q(z) matrices, named word
//! lists, and the orbifold stratification table. Everything is line-oriented
//! UTF-8 with `#` comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::eisenstein::CycMat3;
use crate::matgroups::Mat5;
use crate::words::{parse_presentation, parse_word_in, ParseError, Presentation, Word};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing data file `{0}`")]
    Missing(PathBuf),
    #[error("failed reading `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("in `{path}`: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("in `{path}`: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
}

/// Root of the data directory.
#[derive(Clone, Debug)]
pub struct DataDir {
    pub root: PathBuf,
}

pub const ENV_DATA_DIR: &str = "BALLQUOT_DATA_DIR";

impl DataDir {
    /// Resolution order: explicit path, then the environment variable, then
    /// `./data`, then the crate's own data directory (useful in a checkout).
    pub fn resolve(explicit: Option<&Path>) -> DataDir {
        if let Some(p) = explicit {
            return DataDir {
                root: p.to_path_buf(),
            };
        }
        if let Ok(p) = std::env::var(ENV_DATA_DIR) {
            return DataDir {
                root: PathBuf::from(p),
            };
        }
        let local = PathBuf::from("data");
        if local.is_dir() {
            return DataDir { root: local };
        }
        DataDir {
            root: PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")),
        }
    }

    /// The crate's own data directory (what tests use).
    pub fn shipped() -> DataDir {
        DataDir {
            root: PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")),
        }
    }

    fn read(&self, name: &str) -> Result<(PathBuf, String), DataError> {
        let path = self.root.join(name);
        if !path.is_file() {
            return Err(DataError::Missing(path));
        }
        let text = std::fs::read_to_string(&path).map_err(|source| DataError::Io {
            path: path.clone(),
            source,
        })?;
        Ok((path, text))
    }

    pub fn presentation(&self, name: &str) -> Result<Presentation, DataError> {
        let (path, text) = self.read(name)?;
        parse_presentation(&text).map_err(|source| DataError::Parse { path, source })
    }

    /// `name: <id>` header blocks, each followed by 5 rows of 5 integers.
    pub fn int_matrices(&self, name: &str) -> Result<BTreeMap<String, Mat5>, DataError> {
        let (path, text) = self.read(name)?;
        let bad = |msg: &str| DataError::Format {
            path: path.clone(),
            msg: msg.to_string(),
        };
        let mut out = BTreeMap::new();
        let mut cur: Option<(String, Vec<[i128; 5]>)> = None;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(id) = line.strip_prefix("name:") {
                if let Some((id0, rows)) = cur.take() {
                    if rows.len() != 5 {
                        return Err(bad(&format!("matrix `{id0}` has {} rows", rows.len())));
                    }
                    out.insert(id0, Mat5::from_rows(rows.try_into().unwrap()));
                }
                cur = Some((id.trim().to_string(), Vec::new()));
            } else {
                let Some((_, rows)) = cur.as_mut() else {
                    return Err(bad("matrix row before any `name:` header"));
                };
                let vals: Result<Vec<i128>, _> =
                    line.split_whitespace().map(|t| t.parse::<i128>()).collect();
                let vals = vals.map_err(|_| bad(&format!("bad integer row `{line}`")))?;
                if vals.len() != 5 {
                    return Err(bad(&format!("row `{line}` has {} entries", vals.len())));
                }
                rows.push(vals.try_into().unwrap());
            }
        }
        if let Some((id0, rows)) = cur.take() {
            if rows.len() != 5 {
                return Err(bad(&format!("matrix `{id0}` has {} rows", rows.len())));
            }
            out.insert(id0, Mat5::from_rows(rows.try_into().unwrap()));
        }
        Ok(out)
    }

    /// A single named 3x3 matrix over Q(z), entries as whitespace-separated
    /// scalar tokens.
    pub fn cyc_matrix(&self, name: &str) -> Result<CycMat3, DataError> {
        let (path, text) = self.read(name)?;
        let bad = |msg: String| DataError::Format {
            path: path.clone(),
            msg,
        };
        let mut rows = Vec::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() || line.starts_with("name:") {
                continue;
            }
            let entries: Result<Vec<crate::eisenstein::CycScalar>, _> =
                line.split_whitespace().map(|t| t.parse()).collect();
            let entries = entries.map_err(|e| bad(format!("{e}")))?;
            if entries.len() != 3 {
                return Err(bad(format!("row `{line}` has {} entries", entries.len())));
            }
            rows.push(entries);
        }
        if rows.len() != 3 {
            return Err(bad(format!("expected 3 rows, found {}", rows.len())));
        }
        let mut it = rows.into_iter();
        let r0: [crate::eisenstein::CycScalar; 3] = it.next().unwrap().try_into().unwrap();
        let r1: [crate::eisenstein::CycScalar; 3] = it.next().unwrap().try_into().unwrap();
        let r2: [crate::eisenstein::CycScalar; 3] = it.next().unwrap().try_into().unwrap();
        Ok(CycMat3::from_rows([r0, r1, r2]))
    }

    /// Named word list: a `gens:` header then `id: <word>` lines. Returns
    /// the generator names and the words in file order.
    pub fn words(&self, name: &str) -> Result<(Vec<String>, Vec<(String, Word)>), DataError> {
        let (path, text) = self.read(name)?;
        parse_word_list(&text).map_err(|source| DataError::Parse { path, source })
    }

    pub fn strata(&self) -> Result<StrataFile, DataError> {
        let (path, text) = self.read("fig1_strata.toml")?;
        toml::from_str(&text).map_err(|e| DataError::Format {
            path,
            msg: e.to_string(),
        })
    }

    pub fn write_words(
        &self,
        name: &str,
        gens: &[String],
        words: &[(String, Word)],
        header: &str,
    ) -> std::io::Result<PathBuf> {
        let path = self.root.join(name);
        let mut out = String::new();
        for line in header.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("gens:");
        for g in gens {
            out.push(' ');
            out.push_str(g);
        }
        out.push('\n');
        for (id, w) in words {
            out.push_str(id);
            out.push_str(": ");
            out.push_str(&crate::words::print_word(w, gens));
            out.push('\n');
        }
        std::fs::write(&path, out)?;
        Ok(path)
    }
}

/// Parse a named word list (shared by shipped and generated files).
pub fn parse_word_list(text: &str) -> Result<(Vec<String>, Vec<(String, Word)>), ParseError> {
    let mut gens: Option<Vec<String>> = None;
    let mut words = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line_no = li + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("gens:") {
            gens = Some(rest.split_whitespace().map(|s| s.to_string()).collect());
        } else if let Some((id, rest)) = line.split_once(':') {
            let gens = gens.as_ref().ok_or(ParseError::MissingGens)?;
            let w = parse_word_in(rest, gens, line_no)?;
            words.push((id.trim().to_string(), w));
        } else {
            return Err(ParseError::Syntax {
                line: line_no,
                col: 1,
                msg: format!("expected `gens:` or `id: word`, got `{line}`"),
            });
        }
    }
    Ok((gens.ok_or(ParseError::MissingGens)?, words))
}

/// The orbifold stratification table of the quotient surface.
#[derive(Clone, Debug, Deserialize)]
pub struct StrataFile {
    pub surface: SurfaceStratum,
    #[serde(rename = "curve")]
    pub curves: Vec<CurveStratum>,
    #[serde(rename = "point")]
    pub points: Vec<PointStratum>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SurfaceStratum {
    pub chi: i64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CurveStratum {
    pub id: String,
    pub chi: i64,
    pub weight: u64,
    pub points: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PointStratum {
    pub id: String,
    /// 0 encodes an infinite local group (a cusp): the point is removed.
    pub group_order: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_parse() {
        let d = DataDir::shipped();
        let g1 = d.presentation("gamma1.pres").unwrap();
        assert_eq!(g1.ngens(), 4);
        assert_eq!(g1.relators.len(), 9);
        let xy = d.presentation("dm_xy.pres").unwrap();
        assert_eq!(xy.ngens(), 2);
        assert_eq!(xy.relators.len(), 4);
        let buv = d.presentation("dm_buv.pres").unwrap();
        assert_eq!(buv.relators.len(), 7);
        let heis = d.presentation("heisenberg.pres").unwrap();
        assert_eq!(heis.ngens(), 3);
        let tau_h = d.int_matrices("tau_h.mat").unwrap();
        assert_eq!(tau_h.len(), 4);
        assert!(tau_h["h2"].is_unipotent_upper());
        let tau_w = d.int_matrices("tau_w1.mat").unwrap();
        assert_eq!(tau_w["w1"].m[0][4], 1);
        let x = d.cyc_matrix("dm_x.mat").unwrap();
        assert!(!x.det().is_zero());
        let (gens, hw) = d.words("dm_hwords.words").unwrap();
        assert_eq!(gens, vec!["x".to_string(), "y".to_string()]);
        assert_eq!(hw.len(), 4);
        assert_eq!(hw[0].1.len(), 8);
        let strata = d.strata().unwrap();
        assert_eq!(strata.curves.len(), 2);
        assert_eq!(strata.points.len(), 5);
    }

    #[test]
    fn shipped_relators_are_nontrivial() {
        // guards against relators that freely reduce away
        let d = DataDir::shipped();
        for name in [
            "gamma1.pres",
            "dm_xy.pres",
            "dm_buv.pres",
            "3-4-6.pres",
            "heisenberg.pres",
        ] {
            for (i, r) in d.presentation(name).unwrap().relators.iter().enumerate() {
                assert!(
                    !r.cyclic_reduce().is_empty(),
                    "{name} relator {i} is trivial"
                );
            }
        }
    }

    #[test]
    fn gamma1_relators_have_zero_exponent_sums() {
        let d = DataDir::shipped();
        let g1 = d.presentation("gamma1.pres").unwrap();
        for r in &g1.relators {
            assert_eq!(r.exponent_vector(4), vec![0, 0, 0, 0]);
        }
    }

    #[test]
    fn missing_file_is_a_distinct_error() {
        let d = DataDir::shipped();
        assert!(matches!(
            d.presentation("nope.pres"),
            Err(DataError::Missing(_))
        ));
    }
}
