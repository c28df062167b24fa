//! Bridge for natively compiled implementations shipped as shared libraries.
//!
//! Manifest details are `[library, symbol prefix]`. The library must export
//! `<prefix>_create` returning a session address and `<prefix>_destroy`; every
//! interface method `m` is the symbol `<prefix>_m`, called with the session
//! address followed by the unpacked arguments. An optional
//! `<prefix>_last_error(session) -> const char *` supplies messages for
//! nonzero statuses.

use std::ffi::{c_char, c_void, CStr};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicPtr, Ordering};

use libloading::Library;

use crate::dispatch::{Bridge, ImplManifest, ImplState};
use crate::interface;
use crate::marshal::{unpack_raw, ArgRef, ArrayF64, Callback, OifArgs, OifConfigDict};
use crate::status::{OifError, Result, Status};

type Session = *mut c_void;
type CreateFn = unsafe extern "C" fn() -> Session;
type DestroyFn = unsafe extern "C" fn(Session) -> i32;
type LastErrorFn = unsafe extern "C" fn(Session) -> *const c_char;

pub struct PluginBridge;

/// A loaded plugin library and the session it created.
pub struct PluginState {
    library: Library,
    path: PathBuf,
    prefix: String,
    interface_name: String,
    session: AtomicPtr<c_void>,
}

impl std::fmt::Debug for PluginState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PluginState")
            .field("path", &self.path)
            .field("prefix", &self.prefix)
            .field("session", &self.session.load(Ordering::Acquire))
            .finish()
    }
}

/// `<prefix>_<method>`, byte for byte.
pub fn symbol_name(prefix: &str, method: &str) -> String {
    format!("{prefix}_{method}")
}

/// Resolves the library named in a manifest.
///
/// Names containing a path separator are taken relative to the manifest
/// directory. Bare names are looked up, as given and in platform form
/// (`lib<name>.so`), in the manifest directory, next to the running
/// executable, its `deps/` subdirectory and its parent directory; failing
/// that the system loader search applies.
pub fn resolve_library(spec: &str, manifest_dir: &Path) -> PathBuf {
    if spec.contains('/') || spec.contains(std::path::MAIN_SEPARATOR) {
        return manifest_dir.join(spec);
    }
    let platform = format!("{}{spec}{}", std::env::consts::DLL_PREFIX, std::env::consts::DLL_SUFFIX);
    let mut dirs = vec![manifest_dir.to_path_buf()];
    if let Some(exe_dir) = std::env::current_exe().ok().and_then(|p| p.parent().map(Path::to_path_buf)) {
        dirs.push(exe_dir.join("deps"));
        if let Some(parent) = exe_dir.parent() {
            dirs.push(parent.to_path_buf());
        }
        dirs.push(exe_dir);
    }
    for dir in &dirs {
        for name in [spec, platform.as_str()] {
            let candidate = dir.join(name);
            if candidate.is_file() {
                return candidate;
            }
        }
    }
    PathBuf::from(platform)
}

impl PluginBridge {
    pub const KIND: &'static str = "plugin";

    pub fn new() -> Self {
        PluginBridge
    }

    /// Opens the library and creates a session.
    pub fn load_details(&self, details: &[String], manifest_dir: &Path, interface_name: &str) -> Result<PluginState> {
        let [library, prefix, ..] = details else {
            return Err(OifError::plugin_failure(format!(
                "plugin manifest needs [library, symbol prefix], got {details:?}"
            )));
        };
        let path = resolve_library(library, manifest_dir);
        // SAFETY: loading runs the library's initializers; plugins are trusted code.
        let lib = unsafe { Library::new(&path) }
            .map_err(|e| OifError::plugin_failure(format!("cannot open {}: {e}", path.display())))?;
        let create_name = symbol_name(prefix, "create");
        let create: CreateFn = unsafe { symbol(&lib, &create_name, &path)? };
        let _destroy: DestroyFn = unsafe { symbol(&lib, &symbol_name(prefix, "destroy"), &path)? };
        let session = unsafe { create() };
        if session.is_null() {
            return Err(OifError::plugin_failure(format!("{create_name} returned a null session")));
        }
        Ok(PluginState {
            library: lib,
            path,
            prefix: prefix.clone(),
            interface_name: interface_name.to_string(),
            session: AtomicPtr::new(session),
        })
    }

    pub fn call_state(&self, state: &PluginState, method: &str, in_args: &OifArgs, out_args: &OifArgs) -> Result<()> {
        let session = state.session.load(Ordering::Acquire);
        if session.is_null() {
            return Err(OifError::plugin_failure("plugin session already destroyed"));
        }
        let name = symbol_name(&state.prefix, method);
        let sym: *const c_void = unsafe { symbol(&state.library, &name, &state.path)? };
        let sig = interface::method_signature(&state.interface_name, method).ok_or_else(|| {
            OifError::plugin_failure(format!(
                "{name}: '{method}' is not a method of interface '{}'",
                state.interface_name
            ))
        })?;
        let n_in = in_args.num_args.max(0) as usize;
        if n_in > sig.args.len() {
            return Err(OifError::type_mismatch(format!(
                "arity mismatch: {method} takes {} arguments, got {n_in} inputs",
                sig.args.len()
            )));
        }
        let (in_tags, out_tags) = sig.args.split_at(n_in);
        // SAFETY: the caller guarantees both lists are valid for this call.
        let mut args = unsafe { unpack_raw(in_args, in_tags)? };
        args.extend(unsafe { unpack_raw(out_args, out_tags)? });

        let code = unsafe { invoke(sym, session, &args) }
            .ok_or_else(|| OifError::plugin_failure(format!("{name}: unsupported argument shape")))?;
        if code == 0 {
            return Ok(());
        }
        let message = unsafe { last_error(state, session) }
            .unwrap_or_else(|| format!("{name} returned status {code}"));
        Err(OifError::new(Status(code), message))
    }

    pub fn unload_state(&self, state: &PluginState) -> Result<()> {
        let session = state.session.swap(std::ptr::null_mut(), Ordering::AcqRel);
        if session.is_null() {
            return Err(OifError::plugin_failure("plugin session already destroyed"));
        }
        let name = symbol_name(&state.prefix, "destroy");
        let destroy: DestroyFn = unsafe { symbol(&state.library, &name, &state.path)? };
        match unsafe { destroy(session) } {
            0 => Ok(()),
            code => Err(OifError::plugin_failure(format!("{name} returned {code}"))),
        }
    }
}

impl Default for PluginBridge {
    fn default() -> Self {
        Self::new()
    }
}

impl PluginState {
    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn library_path(&self) -> &Path {
        &self.path
    }

    /// Whether `<prefix>_<method>` is exported.
    pub fn has_method(&self, method: &str) -> bool {
        let name = symbol_name(&self.prefix, method);
        unsafe { self.library.get::<*const c_void>(name.as_bytes()).is_ok() }
    }
}

unsafe fn symbol<T: Copy>(lib: &Library, name: &str, path: &Path) -> Result<T> {
    lib.get::<T>(name.as_bytes())
        .map(|s| *s)
        .map_err(|e| OifError::plugin_failure(format!("symbol {name} not found in {}: {e}", path.display())))
}

unsafe fn last_error(state: &PluginState, session: Session) -> Option<String> {
    let name = symbol_name(&state.prefix, "last_error");
    let f = state.library.get::<LastErrorFn>(name.as_bytes()).ok()?;
    let msg = f(session);
    if msg.is_null() {
        return None;
    }
    let s = CStr::from_ptr(msg).to_string_lossy().into_owned();
    (!s.is_empty()).then_some(s)
}

/// Calls `sym(session, args...)` for the argument shapes used by the
/// supported interfaces. Returns `None` for any other shape.
unsafe fn invoke(sym: *const c_void, s: Session, args: &[ArgRef<'_>]) -> Option<i32> {
    use std::mem::transmute;
    let arr = |a: &ArrayF64| a as *const ArrayF64 as *mut ArrayF64;
    Some(match *args {
        [] => transmute::<*const c_void, unsafe extern "C" fn(Session) -> i32>(sym)(s),
        [ArgRef::Int(i)] => transmute::<*const c_void, unsafe extern "C" fn(Session, i32) -> i32>(sym)(s, i),
        [ArgRef::Float64(x)] => transmute::<*const c_void, unsafe extern "C" fn(Session, f64) -> i32>(sym)(s, x),
        [ArgRef::ArrayF64(a)] => {
            transmute::<*const c_void, unsafe extern "C" fn(Session, *mut ArrayF64) -> i32>(sym)(s, arr(a))
        }
        [ArgRef::Str(c)] => transmute::<*const c_void, unsafe extern "C" fn(Session, *const c_char) -> i32>(sym)(s, c.as_ptr()),
        [ArgRef::Callback(cb)] => {
            transmute::<*const c_void, unsafe extern "C" fn(Session, *const Callback) -> i32>(sym)(s, cb)
        }
        [ArgRef::UserData(u)] => transmute::<*const c_void, unsafe extern "C" fn(Session, *mut c_void) -> i32>(sym)(s, u.0),
        [ArgRef::ArrayF64(a), ArgRef::Float64(x)] => {
            transmute::<*const c_void, unsafe extern "C" fn(Session, *mut ArrayF64, f64) -> i32>(sym)(s, arr(a), x)
        }
        [ArgRef::Float64(x), ArgRef::ArrayF64(a)] => {
            transmute::<*const c_void, unsafe extern "C" fn(Session, f64, *mut ArrayF64) -> i32>(sym)(s, x, arr(a))
        }
        [ArgRef::Float64(x), ArgRef::Float64(y)] => {
            transmute::<*const c_void, unsafe extern "C" fn(Session, f64, f64) -> i32>(sym)(s, x, y)
        }
        [ArgRef::Str(c), ArgRef::ConfigDict(d)] => transmute::<
            *const c_void,
            unsafe extern "C" fn(Session, *const c_char, *const OifConfigDict) -> i32,
        >(sym)(s, c.as_ptr(), d),
        _ => return None,
    })
}

fn downcast(state: &ImplState) -> Result<&PluginState> {
    state
        .downcast_ref::<PluginState>()
        .ok_or_else(|| OifError::plugin_failure("state does not belong to the plugin bridge"))
}

impl Bridge for PluginBridge {
    fn kind(&self) -> &str {
        Self::KIND
    }

    fn load(&self, manifest: &ImplManifest) -> Result<ImplState> {
        let state = self.load_details(&manifest.details, manifest.dir(), &manifest.interface_name)?;
        Ok(Box::new(state))
    }

    fn call(&self, state: &ImplState, method: &str, in_args: &OifArgs, out_args: &OifArgs) -> Result<()> {
        self.call_state(downcast(state)?, method, in_args, out_args)
    }

    fn unload(&self, state: &ImplState) -> Result<()> {
        self.unload_state(downcast(state)?)
    }
}
