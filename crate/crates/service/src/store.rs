//! One JSON file per project under the data directory.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use guide_core::ir::validate_document;
use guide_core::{Catalog, GuiDocument, StageTrace, ValidationReport};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub project_id: String,
    pub document: GuiDocument,
    /// Every stage trace produced for this project, oldest first.
    #[serde(default)]
    pub traces: Vec<StageTrace>,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage failure for {path}: {source}")]
    Storage {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("project {0} not found")]
    NotFound(String),
    #[error("project file {path} is corrupt: {reason}")]
    CorruptProject {
        path: PathBuf,
        reason: String,
        report: Option<ValidationReport>,
    },
    #[error("refusing to persist an invalid document ({} violation(s))", .0.violations.len())]
    InvalidDocument(ValidationReport),
}

/// Byte-level file access, swappable for fault injection.
pub trait Disk: Send + Sync {
    fn read(&self, path: &Path) -> io::Result<Vec<u8>>;
    /// Replaces `path` so that readers see either the old or the new bytes.
    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> io::Result<()>;
    fn list(&self, dir: &Path) -> io::Result<Vec<PathBuf>>;
}

pub struct FsDisk;

impl Disk for FsDisk {
    fn read(&self, path: &Path) -> io::Result<Vec<u8>> {
        fs::read(path)
    }

    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> io::Result<()> {
        let tmp = path.with_extension(format!("json.tmp-{}", std::process::id()));
        let result = (|| {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(bytes)?;
            file.sync_all()?;
            fs::rename(&tmp, path)
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result
    }

    fn list(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                out.push(path);
            }
        }
        out.sort();
        Ok(out)
    }
}

pub struct ProjectStore {
    dir: PathBuf,
    disk: Box<dyn Disk>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

impl ProjectStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        Self::with_disk(dir, Box::new(FsDisk))
    }

    pub fn with_disk(dir: impl Into<PathBuf>, disk: Box<dyn Disk>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| StoreError::Storage { path: dir.clone(), source })?;
        Ok(ProjectStore { dir, disk })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, project_id: &str) -> PathBuf {
        self.dir.join(format!("{project_id}.json"))
    }

    /// Validates, then writes atomically. A failed write leaves the previous
    /// file in place.
    pub fn persist(&self, project: &Project, catalog: &Catalog) -> Result<(), StoreError> {
        if !valid_id(&project.project_id) {
            return Err(StoreError::NotFound(project.project_id.clone()));
        }
        let report = validate_document(&project.document, catalog);
        if !report.valid {
            return Err(StoreError::InvalidDocument(report));
        }
        let path = self.path_for(&project.project_id);
        let mut bytes = serde_json::to_vec_pretty(project).expect("project serializes");
        bytes.push(b'\n');
        self.disk
            .write_atomic(&path, &bytes)
            .map_err(|source| StoreError::Storage { path, source })
    }

    pub fn load(&self, project_id: &str, catalog: &Catalog) -> Result<Project, StoreError> {
        if !valid_id(project_id) {
            return Err(StoreError::NotFound(project_id.to_string()));
        }
        let path = self.path_for(project_id);
        let bytes = match self.disk.read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::NotFound(project_id.to_string())),
            Err(source) => return Err(StoreError::Storage { path, source }),
        };
        let project: Project = serde_json::from_slice(&bytes).map_err(|e| StoreError::CorruptProject {
            path: path.clone(),
            reason: e.to_string(),
            report: None,
        })?;
        if project.project_id != project_id {
            return Err(StoreError::CorruptProject {
                path,
                reason: format!("file holds project {}", project.project_id),
                report: None,
            });
        }
        let report = validate_document(&project.document, catalog);
        if !report.valid {
            return Err(StoreError::CorruptProject { path, reason: "document fails validation".into(), report: Some(report) });
        }
        Ok(project)
    }

    pub fn list_ids(&self) -> Result<Vec<String>, StoreError> {
        let paths = self.disk.list(&self.dir).map_err(|source| StoreError::Storage { path: self.dir.clone(), source })?;
        Ok(paths
            .iter()
            .filter_map(|p| p.file_stem().and_then(|s| s.to_str()))
            .filter(|s| valid_id(s))
            .map(str::to_string)
            .collect())
    }
}
