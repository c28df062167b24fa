use std::fs;
use std::path::{Path, PathBuf};

/// File extension of implementation manifests.
pub const MANIFEST_EXT: &str = "oifm";

/// Description of one implementation, read from
/// `<root>/<interface>/<impl>/<impl>.oifm`.
///
/// ```text
/// # comments and blank lines are ignored
/// plugin                 <- bridge kind
/// version 1 0
/// oif_dopri5c            <- bridge-specific details, one per line
/// oif_ivp
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplManifest {
    pub interface_name: String,
    pub impl_name: String,
    pub bridge_kind: String,
    pub version_major: i32,
    pub version_minor: i32,
    pub details: Vec<String>,
    pub path: PathBuf,
}

impl ImplManifest {
    pub fn parse(interface_name: &str, impl_name: &str, text: &str, path: PathBuf) -> Result<Self, String> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let bridge_kind = lines.next().ok_or("missing bridge kind line")?;
        if bridge_kind.split_whitespace().count() != 1 {
            return Err(format!("bridge kind must be a single word, got {bridge_kind:?}"));
        }
        let version = lines.next().ok_or("missing version line")?;
        let (version_major, version_minor) = parse_version(version)?;
        Ok(ImplManifest {
            interface_name: interface_name.to_string(),
            impl_name: impl_name.to_string(),
            bridge_kind: bridge_kind.to_string(),
            version_major,
            version_minor,
            details: lines.map(str::to_string).collect(),
            path,
        })
    }

    /// Reads a manifest, taking the interface and implementation names from
    /// its location.
    pub fn load(path: &Path) -> Result<Self, String> {
        let impl_dir = path.parent().ok_or("manifest has no parent directory")?;
        let impl_name = file_name(impl_dir)?;
        let iface_dir = impl_dir.parent().ok_or("manifest is not inside an interface directory")?;
        let interface_name = file_name(iface_dir)?;
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read: {e}"))?;
        Self::parse(&interface_name, &impl_name, &text, path.to_path_buf())
    }

    /// Directory holding the manifest; relative details resolve against it.
    pub fn dir(&self) -> &Path {
        self.path.parent().unwrap_or_else(|| Path::new("."))
    }
}

fn file_name(p: &Path) -> Result<String, String> {
    p.file_name()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| format!("{} has no UTF-8 file name", p.display()))
}

fn parse_version(line: &str) -> Result<(i32, i32), String> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    match parts[..] {
        ["version", major, minor] => {
            let major = major.parse().map_err(|_| format!("bad major version {major:?}"))?;
            let minor = minor.parse().map_err(|_| format!("bad minor version {minor:?}"))?;
            Ok((major, minor))
        }
        _ => Err(format!("expected `version <major> <minor>`, got {line:?}")),
    }
}

pub fn manifest_path(root: &Path, interface_name: &str, impl_name: &str) -> PathBuf {
    root.join(interface_name)
        .join(impl_name)
        .join(format!("{impl_name}.{MANIFEST_EXT}"))
}

/// Result of scanning search roots: parsed manifests plus one diagnostic per
/// entry that could not be used.
#[derive(Clone, Debug, Default)]
pub struct Discovery {
    pub manifests: Vec<ImplManifest>,
    pub diagnostics: Vec<String>,
}

/// Scans `<root>/<interface_name>/*/` under every root. Manifests come back
/// in lexicographic path order.
pub fn discover(roots: &[PathBuf], interface_name: &str) -> Discovery {
    let mut out = Discovery::default();
    for root in roots {
        let iface_dir = root.join(interface_name);
        let Ok(entries) = fs::read_dir(&iface_dir) else {
            continue;
        };
        let mut dirs: Vec<PathBuf> = entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        dirs.sort();
        for dir in dirs {
            let Ok(name) = file_name(&dir) else {
                out.diagnostics.push(format!("{}: directory name is not UTF-8", dir.display()));
                continue;
            };
            let path = dir.join(format!("{name}.{MANIFEST_EXT}"));
            if !path.is_file() {
                out.diagnostics
                    .push(format!("{}: no manifest {name}.{MANIFEST_EXT}", dir.display()));
                continue;
            }
            match ImplManifest::load(&path) {
                Ok(m) => out.manifests.push(m),
                Err(e) => out.diagnostics.push(format!("{}: {e}", path.display())),
            }
        }
    }
    out.manifests.sort_by(|a, b| a.path.cmp(&b.path));
    for d in &out.diagnostics {
        eprintln!("oif: {d}");
    }
    out
}
