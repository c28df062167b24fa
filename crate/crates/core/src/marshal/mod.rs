//! Intermediate representation shared by every component: type tags, the
//! array/callback/config-dict records, and packed argument lists.
//!
//! Values are referenced, not copied: packing an array stores the address of
//! its boundary record, whose `data` field is the caller's storage.

mod args;
mod array;
mod callback;
mod config;

pub use args::{unpack_raw, Arg, ArgRef, OifArgs, PackedArgs, TypeTag};
pub use array::{
    element_count, free_array_f64, make_array_f64, view_array_f64, view_array_f64_raw, ArrayF64,
    ArrayF64Buf,
};
pub use callback::{Callback, CallbackSource, RhsFn, UserData};
pub use config::{ConfigDict, ConfigValue, OifConfigDict};
