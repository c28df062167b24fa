//! Process-wide registry of loaded implementations.
//!
//! `init_impl` finds a manifest on disk, instantiates the bridge named by its
//! first line (once per bridge kind), lets the bridge load the implementation
//! and hands back a fresh [`ImplHandle`]. `call_impl` routes packed arguments
//! to the bridge; `unload_impl` releases the implementation but keeps the
//! bridge alive.

mod manifest;

use std::any::Any;
use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

pub use manifest::{discover, manifest_path, Discovery, ImplManifest, MANIFEST_EXT};

use crate::bridge::PluginBridge;
use crate::marshal::{OifArgs, PackedArgs};
use crate::status::{OifError, Result, Status};

/// Environment variable holding `:`-separated search roots.
pub const IMPL_PATH_VAR: &str = "OIF_IMPL_PATH";

/// Identifier of a loaded implementation. Valid handles are `>= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct ImplHandle(pub i32);

impl fmt::Display for ImplHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "implh {}", self.0)
    }
}

/// Per-implementation state owned by a bridge.
pub type ImplState = Box<dyn Any + Send + Sync>;

/// Loads and invokes implementations of one technology.
pub trait Bridge: Send + Sync {
    fn kind(&self) -> &str;

    fn load(&self, manifest: &ImplManifest) -> Result<ImplState>;

    /// Invokes `method`. A nonzero status from the implementation must be
    /// returned unchanged.
    fn call(&self, state: &ImplState, method: &str, in_args: &OifArgs, out_args: &OifArgs) -> Result<()>;

    /// Releases the implementation. The state is dropped afterwards either way.
    fn unload(&self, state: &ImplState) -> Result<()>;
}

pub type BridgeFactory = Arc<dyn Fn() -> Result<Arc<dyn Bridge>> + Send + Sync>;

/// Table entry for a live handle.
pub struct ImplRecord {
    pub handle: ImplHandle,
    pub manifest: ImplManifest,
    /// Version the caller asked for; stored, not matched.
    pub requested_version: (i32, i32),
    bridge: Arc<dyn Bridge>,
    state: ImplState,
}

impl fmt::Debug for ImplRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplRecord")
            .field("handle", &self.handle)
            .field("manifest", &self.manifest)
            .field("bridge", &self.bridge.kind())
            .finish()
    }
}

#[derive(Default)]
struct Table {
    next_handle: i32,
    records: HashMap<ImplHandle, Arc<ImplRecord>>,
    bridges: HashMap<String, Arc<dyn Bridge>>,
    instantiations: HashMap<String, usize>,
}

pub struct Dispatch {
    roots: Vec<PathBuf>,
    factories: RwLock<HashMap<String, BridgeFactory>>,
    table: Mutex<Table>,
}

impl fmt::Debug for Dispatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dispatch").field("roots", &self.roots).finish()
    }
}

/// Repository directory holding the bundled manifests.
pub fn default_impl_root() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../impl"))
}

/// Search roots from `OIF_IMPL_PATH`, or the bundled directory when unset.
pub fn search_roots_from_env() -> Vec<PathBuf> {
    match std::env::var(IMPL_PATH_VAR) {
        Ok(v) if !v.trim().is_empty() => v
            .split(':')
            .filter(|s| !s.is_empty())
            .map(PathBuf::from)
            .collect(),
        _ => vec![default_impl_root()],
    }
}

fn lock_err<T>(_: T) -> OifError {
    OifError::plugin_failure("dispatch table lock poisoned")
}

impl Dispatch {
    /// A registry searching `roots`, with the native `plugin` bridge available.
    pub fn new(roots: Vec<PathBuf>) -> Self {
        let mut factories: HashMap<String, BridgeFactory> = HashMap::new();
        factories.insert(
            PluginBridge::KIND.to_string(),
            Arc::new(|| Ok(Arc::new(PluginBridge::new()) as Arc<dyn Bridge>)),
        );
        Dispatch {
            roots,
            factories: RwLock::new(factories),
            table: Mutex::new(Table::default()),
        }
    }

    pub fn from_env() -> Self {
        Self::new(search_roots_from_env())
    }

    /// The process-wide registry, configured from the environment on first use.
    pub fn global() -> &'static Dispatch {
        static GLOBAL: OnceLock<Dispatch> = OnceLock::new();
        GLOBAL.get_or_init(Dispatch::from_env)
    }

    pub fn roots(&self) -> &[PathBuf] {
        &self.roots
    }

    /// Makes another bridge kind available to manifests.
    pub fn register_bridge(&self, kind: &str, factory: BridgeFactory) {
        self.factories
            .write()
            .expect("factory lock poisoned")
            .insert(kind.to_string(), factory);
    }

    pub fn discover(&self, interface_name: &str) -> Discovery {
        discover(&self.roots, interface_name)
    }

    /// First manifest for the pair, in root order.
    pub fn find_manifest(&self, interface_name: &str, impl_name: &str) -> Result<ImplManifest> {
        if impl_name.is_empty() || impl_name.contains(['/', '\\']) || impl_name.starts_with('.') {
            return Err(OifError::not_found(format!("invalid implementation name {impl_name:?}")));
        }
        for root in &self.roots {
            let path = manifest_path(root, interface_name, impl_name);
            if path.is_file() {
                return ImplManifest::load(&path).map_err(|e| {
                    eprintln!("oif: {}: {e}", path.display());
                    OifError::not_found(format!("manifest {} is malformed: {e}", path.display()))
                });
            }
        }
        Err(OifError::not_found(format!(
            "no implementation '{impl_name}' of interface '{interface_name}' under {:?}",
            self.roots
        )))
    }

    fn bridge_for(&self, table: &mut Table, kind: &str) -> Result<Arc<dyn Bridge>> {
        if let Some(b) = table.bridges.get(kind) {
            return Ok(b.clone());
        }
        let factory = self
            .factories
            .read()
            .map_err(lock_err)?
            .get(kind)
            .cloned()
            .ok_or_else(|| OifError::plugin_failure(format!("no bridge for kind '{kind}'")))?;
        let bridge = factory()?;
        table.bridges.insert(kind.to_string(), bridge.clone());
        *table.instantiations.entry(kind.to_string()).or_default() += 1;
        Ok(bridge)
    }

    pub fn init_impl(
        &self,
        interface_name: &str,
        impl_name: &str,
        version_major: i32,
        version_minor: i32,
    ) -> Result<ImplHandle> {
        let manifest = self.find_manifest(interface_name, impl_name)?;
        let mut table = self.table.lock().map_err(lock_err)?;
        let bridge = self.bridge_for(&mut table, &manifest.bridge_kind)?;
        let state = bridge.load(&manifest)?;
        let handle = ImplHandle(table.next_handle);
        table.next_handle = table
            .next_handle
            .checked_add(1)
            .ok_or_else(|| OifError::allocation_failure("implementation handles exhausted"))?;
        table.records.insert(
            handle,
            Arc::new(ImplRecord {
                handle,
                manifest,
                requested_version: (version_major, version_minor),
                bridge,
                state,
            }),
        );
        Ok(handle)
    }

    fn record(&self, handle: ImplHandle) -> Result<Arc<ImplRecord>> {
        let table = self.table.lock().map_err(lock_err)?;
        table
            .records
            .get(&handle)
            .cloned()
            .ok_or_else(|| OifError::not_found(format!("{handle} is not loaded")))
    }

    /// Routes a call to the implementation behind `handle`.
    ///
    /// Calls on distinct handles may run concurrently; calls on one handle
    /// must be serialized by the caller.
    pub fn call_impl(
        &self,
        handle: ImplHandle,
        method: &str,
        in_args: &PackedArgs<'_>,
        out_args: &PackedArgs<'_>,
    ) -> Result<()> {
        self.call_impl_raw(handle, method, &in_args.as_raw(), &out_args.as_raw())
    }

    pub fn call_impl_raw(&self, handle: ImplHandle, method: &str, in_args: &OifArgs, out_args: &OifArgs) -> Result<()> {
        let record = self.record(handle)?;
        record.bridge.call(&record.state, method, in_args, out_args)
    }

    pub fn unload_impl(&self, handle: ImplHandle) -> Result<()> {
        let record = {
            let mut table = self.table.lock().map_err(lock_err)?;
            table
                .records
                .remove(&handle)
                .ok_or_else(|| OifError::not_found(format!("{handle} is not loaded")))?
        };
        record.bridge.unload(&record.state)
    }

    pub fn is_loaded(&self, handle: ImplHandle) -> bool {
        self.record(handle).is_ok()
    }

    pub fn live_handles(&self) -> Vec<ImplHandle> {
        let table = self.table.lock().expect("dispatch table lock poisoned");
        let mut v: Vec<ImplHandle> = table.records.keys().copied().collect();
        v.sort();
        v
    }

    pub fn manifest_of(&self, handle: ImplHandle) -> Result<ImplManifest> {
        Ok(self.record(handle)?.manifest.clone())
    }

    /// How many times the bridge of `kind` has been instantiated.
    pub fn bridge_instantiations(&self, kind: &str) -> usize {
        let table = self.table.lock().expect("dispatch table lock poisoned");
        table.instantiations.get(kind).copied().unwrap_or(0)
    }
}

/// Boundary form of a [`Result`]: the status code.
pub fn to_code(result: Result<()>) -> i32 {
    match result {
        Ok(()) => Status::SUCCESS.code(),
        Err(e) => e.code(),
    }
}
