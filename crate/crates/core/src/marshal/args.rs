use std::ffi::{c_void, CStr, CString};
use std::marker::PhantomData;

use super::{ArrayF64, Callback, ConfigDict, OifConfigDict, UserData};
use crate::status::{OifError, Result};

/// Type identifier attached to every value crossing a boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum TypeTag {
    Int = 1,
    Float64 = 2,
    ArrayF64 = 3,
    Str = 4,
    Callback = 5,
    UserData = 6,
    ConfigDict = 7,
}

impl TypeTag {
    pub const ALL: [TypeTag; 7] = [
        TypeTag::Int,
        TypeTag::Float64,
        TypeTag::ArrayF64,
        TypeTag::Str,
        TypeTag::Callback,
        TypeTag::UserData,
        TypeTag::ConfigDict,
    ];

    pub fn code(self) -> u32 {
        self as u32
    }

    pub fn from_code(code: u32) -> Option<TypeTag> {
        TypeTag::ALL.get((code as usize).wrapping_sub(1)).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            TypeTag::Int => "INT",
            TypeTag::Float64 => "FLOAT64",
            TypeTag::ArrayF64 => "ARRAY_F64",
            TypeTag::Str => "STR",
            TypeTag::Callback => "CALLBACK",
            TypeTag::UserData => "USER_DATA",
            TypeTag::ConfigDict => "CONFIG_DICT",
        }
    }
}

/// A value to be packed. Arrays, callbacks and dictionaries are borrowed,
/// never copied.
#[derive(Clone, Copy, Debug)]
pub enum Arg<'a> {
    Int(i32),
    Float64(f64),
    ArrayF64(&'a ArrayF64),
    Str(&'a str),
    Callback(&'a Callback),
    UserData(UserData),
    ConfigDict(&'a ConfigDict),
}

impl Arg<'_> {
    pub fn tag(&self) -> TypeTag {
        match self {
            Arg::Int(_) => TypeTag::Int,
            Arg::Float64(_) => TypeTag::Float64,
            Arg::ArrayF64(_) => TypeTag::ArrayF64,
            Arg::Str(_) => TypeTag::Str,
            Arg::Callback(_) => TypeTag::Callback,
            Arg::UserData(_) => TypeTag::UserData,
            Arg::ConfigDict(_) => TypeTag::ConfigDict,
        }
    }
}

/// A value read back from a packed list.
#[derive(Clone, Copy, Debug)]
pub enum ArgRef<'a> {
    Int(i32),
    Float64(f64),
    ArrayF64(&'a ArrayF64),
    Str(&'a CStr),
    Callback(&'a Callback),
    UserData(UserData),
    ConfigDict(&'a OifConfigDict),
}

impl ArgRef<'_> {
    pub fn tag(&self) -> TypeTag {
        match self {
            ArgRef::Int(_) => TypeTag::Int,
            ArgRef::Float64(_) => TypeTag::Float64,
            ArgRef::ArrayF64(_) => TypeTag::ArrayF64,
            ArgRef::Str(_) => TypeTag::Str,
            ArgRef::Callback(_) => TypeTag::Callback,
            ArgRef::UserData(_) => TypeTag::UserData,
            ArgRef::ConfigDict(_) => TypeTag::ConfigDict,
        }
    }

    /// Raw payload address as stored in the boundary list.
    pub fn payload_address(&self) -> *const c_void {
        match *self {
            ArgRef::ArrayF64(a) => a as *const ArrayF64 as *const c_void,
            ArgRef::Str(s) => s.as_ptr() as *const c_void,
            ArgRef::Callback(c) => c as *const Callback as *const c_void,
            ArgRef::UserData(u) => u.0,
            ArgRef::ConfigDict(d) => d as *const OifConfigDict as *const c_void,
            ArgRef::Int(_) | ArgRef::Float64(_) => std::ptr::null(),
        }
    }
}

/// Boundary record for a packed argument list.
///
/// `arg_values[i]` addresses the payload of argument `i`:
///
/// | tag          | payload                                      |
/// |--------------|----------------------------------------------|
/// | INT          | `int32_t *`                                  |
/// | FLOAT64      | `double *`                                   |
/// | ARRAY_F64    | `OIFArrayF64 *`                              |
/// | STR          | `const char *`, NUL-terminated UTF-8         |
/// | CALLBACK     | `OIFCallback *`                              |
/// | USER_DATA    | the user-data address itself                 |
/// | CONFIG_DICT  | `OIFConfigDict *`                            |
#[repr(C)]
#[derive(Debug)]
pub struct OifArgs {
    pub num_args: isize,
    pub arg_types: *const u32,
    pub arg_values: *const *mut c_void,
}

impl OifArgs {
    pub const EMPTY: OifArgs = OifArgs {
        num_args: 0,
        arg_types: std::ptr::null(),
        arg_values: std::ptr::null(),
    };
}

enum Slot {
    None,
    Int(#[allow(dead_code)] Box<i32>),
    Float(#[allow(dead_code)] Box<f64>),
    Str(#[allow(dead_code)] CString),
    Dict(#[allow(dead_code)] Box<OifConfigDict>, #[allow(dead_code)] Vec<u8>),
}

/// An ordered, type-tagged argument list in boundary form.
///
/// Scalars and strings are held by the list; arrays, callbacks and user data
/// are referenced in place.
pub struct PackedArgs<'a> {
    tags: Vec<u32>,
    values: Vec<*mut c_void>,
    _slots: Vec<Slot>,
    _marker: PhantomData<&'a ()>,
}

// Payloads are either owned by the list or borrowed for 'a.
unsafe impl Send for PackedArgs<'_> {}

impl<'a> PackedArgs<'a> {
    pub fn empty() -> Self {
        PackedArgs {
            tags: Vec::new(),
            values: Vec::new(),
            _slots: Vec::new(),
            _marker: PhantomData,
        }
    }

    /// Packs values, taking each tag from the value's kind.
    pub fn pack(values: &[Arg<'a>]) -> Result<Self> {
        let mut packed = PackedArgs::empty();
        packed.tags.reserve(values.len());
        packed.values.reserve(values.len());
        for v in values {
            packed.push(*v)?;
        }
        Ok(packed)
    }

    /// Packs values against declared tags; a value whose kind differs from
    /// its declared tag is a type mismatch.
    pub fn pack_tagged(values: &[(TypeTag, Arg<'a>)]) -> Result<Self> {
        if let Some(pos) = values.iter().position(|(tag, v)| *tag != v.tag()) {
            let (tag, v) = &values[pos];
            return Err(OifError::type_mismatch(format!(
                "tag mismatch at position {pos}: declared {}, value is {}",
                tag.name(),
                v.tag().name()
            )));
        }
        let plain: Vec<Arg<'a>> = values.iter().map(|(_, v)| *v).collect();
        Self::pack(&plain)
    }

    fn push(&mut self, value: Arg<'a>) -> Result<()> {
        let (ptr, slot): (*mut c_void, Slot) = match value {
            Arg::Int(i) => {
                let b = Box::new(i);
                (&*b as *const i32 as *mut c_void, Slot::Int(b))
            }
            Arg::Float64(x) => {
                let b = Box::new(x);
                (&*b as *const f64 as *mut c_void, Slot::Float(b))
            }
            Arg::ArrayF64(a) => (a as *const ArrayF64 as *mut c_void, Slot::None),
            Arg::Str(s) => {
                let c = CString::new(s).map_err(|_| {
                    OifError::invalid_argument(format!("string argument {s:?} contains NUL"))
                })?;
                (c.as_ptr() as *mut c_void, Slot::Str(c))
            }
            Arg::Callback(cb) => (cb as *const Callback as *mut c_void, Slot::None),
            Arg::UserData(u) => (u.0, Slot::None),
            Arg::ConfigDict(d) => {
                let bytes = d.encode();
                let header = Box::new(OifConfigDict {
                    size: bytes.len(),
                    buffer: bytes.as_ptr(),
                });
                (&*header as *const OifConfigDict as *mut c_void, Slot::Dict(header, bytes))
            }
        };
        self.tags.push(value.tag().code());
        self.values.push(ptr);
        self._slots.push(slot);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> Vec<TypeTag> {
        self.tags
            .iter()
            .map(|&c| TypeTag::from_code(c).expect("packed tags are valid"))
            .collect()
    }

    pub fn payload_addresses(&self) -> &[*mut c_void] {
        &self.values
    }

    /// Boundary view of this list; valid while `self` is alive.
    pub fn as_raw(&self) -> OifArgs {
        OifArgs {
            num_args: self.tags.len() as isize,
            arg_types: self.tags.as_ptr(),
            arg_values: self.values.as_ptr(),
        }
    }

    /// Unpacks against the expected tags.
    pub fn unpack(&self, expected: &[TypeTag]) -> Result<Vec<ArgRef<'_>>> {
        let raw = self.as_raw();
        // SAFETY: `raw` points into this list, whose payloads are valid for
        // as long as `self` is borrowed.
        unsafe { unpack_raw(&raw, expected) }
    }
}

impl std::fmt::Debug for PackedArgs<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PackedArgs")
            .field("tags", &self.tags)
            .field("values", &self.values)
            .finish()
    }
}

/// Reads a boundary list, checking arity and every tag against `expected`.
///
/// # Safety
/// `raw` must describe `num_args` valid tags and payload addresses whose
/// targets stay valid for `'a`.
pub unsafe fn unpack_raw<'a>(raw: &OifArgs, expected: &[TypeTag]) -> Result<Vec<ArgRef<'a>>> {
    let n = raw.num_args;
    if n < 0 || n as usize != expected.len() {
        return Err(OifError::type_mismatch(format!(
            "arity mismatch: expected {} arguments, got {n}",
            expected.len()
        )));
    }
    let n = n as usize;
    if n == 0 {
        return Ok(Vec::new());
    }
    if raw.arg_types.is_null() || raw.arg_values.is_null() {
        return Err(OifError::invalid_argument("argument list pointers are null"));
    }
    let tags = std::slice::from_raw_parts(raw.arg_types, n);
    let values = std::slice::from_raw_parts(raw.arg_values, n);
    let mut out = Vec::with_capacity(n);
    for (pos, ((&code, &ptr), &want)) in tags.iter().zip(values).zip(expected).enumerate() {
        let got = TypeTag::from_code(code);
        if got != Some(want) {
            let got = got.map_or_else(|| format!("unknown tag {code}"), |t| t.name().to_string());
            return Err(OifError::type_mismatch(format!(
                "tag mismatch at position {pos}: expected {}, got {got}",
                want.name()
            )));
        }
        if ptr.is_null() && want != TypeTag::UserData {
            return Err(OifError::invalid_argument(format!(
                "argument {pos} ({}) has a null payload",
                want.name()
            )));
        }
        let value = match want {
            TypeTag::Int => ArgRef::Int(*(ptr as *const i32)),
            TypeTag::Float64 => ArgRef::Float64(*(ptr as *const f64)),
            TypeTag::ArrayF64 => ArgRef::ArrayF64(&*(ptr as *const ArrayF64)),
            TypeTag::Str => ArgRef::Str(CStr::from_ptr(ptr as *const std::ffi::c_char)),
            TypeTag::Callback => ArgRef::Callback(&*(ptr as *const Callback)),
            TypeTag::UserData => ArgRef::UserData(UserData(ptr)),
            TypeTag::ConfigDict => ArgRef::ConfigDict(&*(ptr as *const OifConfigDict)),
        };
        out.push(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marshal::{make_array_f64, ConfigValue};
    use crate::status::Status;

    #[test]
    fn tag_codes_follow_listing_order() {
        let codes: Vec<u32> = TypeTag::ALL.iter().map(|t| t.code()).collect();
        assert_eq!(codes, vec![1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(TypeTag::from_code(0), None);
        assert_eq!(TypeTag::from_code(8), None);
        for t in TypeTag::ALL {
            assert_eq!(TypeTag::from_code(t.code()), Some(t));
        }
    }

    #[test]
    fn pack_float_and_array() {
        let a = make_array_f64(1, &[3]).unwrap();
        let packed = PackedArgs::pack(&[Arg::Float64(1.5), Arg::ArrayF64(a.as_raw())]).unwrap();
        assert_eq!(packed.len(), 2);
        assert_eq!(packed.tags(), vec![TypeTag::Float64, TypeTag::ArrayF64]);
        let raw = packed.as_raw();
        assert_eq!(unsafe { std::slice::from_raw_parts(raw.arg_types, 2) }, &[2, 3]);

        let back = packed.unpack(&[TypeTag::Float64, TypeTag::ArrayF64]).unwrap();
        match back[..] {
            [ArgRef::Float64(x), ArgRef::ArrayF64(arr)] => {
                assert_eq!(x, 1.5);
                assert_eq!(arr.data, a.data_ptr());
                assert!(std::ptr::eq(arr, a.as_raw()));
            }
            _ => panic!("unexpected unpack result {back:?}"),
        }
    }

    #[test]
    fn pack_empty() {
        let packed = PackedArgs::pack(&[]).unwrap();
        assert_eq!(packed.len(), 0);
        assert!(packed.unpack(&[]).unwrap().is_empty());
    }

    #[test]
    fn int_and_str_round_trip() {
        let packed = PackedArgs::pack(&[Arg::Int(7), Arg::Str("dopri5")]).unwrap();
        let back = packed.unpack(&[TypeTag::Int, TypeTag::Str]).unwrap();
        match back[..] {
            [ArgRef::Int(7), ArgRef::Str(s)] => assert_eq!(s.to_str().unwrap(), "dopri5"),
            _ => panic!("unexpected unpack result {back:?}"),
        }
    }

    #[test]
    fn unpack_reports_first_mismatch() {
        let packed = PackedArgs::pack(&[Arg::Float64(1.0)]).unwrap();
        let e = packed.unpack(&[TypeTag::Int]).unwrap_err();
        assert_eq!(e.status(), Status::TYPE_MISMATCH);
        assert!(e.message().contains("position 0"), "{}", e.message());

        let packed = PackedArgs::pack(&[Arg::Int(1), Arg::Int(2)]).unwrap();
        let e = packed.unpack(&[TypeTag::Int, TypeTag::Float64]).unwrap_err();
        assert!(e.message().contains("position 1"), "{}", e.message());
    }

    #[test]
    fn unpack_reports_arity() {
        let packed = PackedArgs::pack(&[Arg::Int(1)]).unwrap();
        let e = packed.unpack(&[]).unwrap_err();
        assert_eq!(e.status(), Status::TYPE_MISMATCH);
        assert!(e.message().contains("arity"));
    }

    #[test]
    fn pack_tagged_checks_declared_kind() {
        let e = PackedArgs::pack_tagged(&[(TypeTag::Int, Arg::Int(1)), (TypeTag::Str, Arg::Float64(2.0))])
            .unwrap_err();
        assert_eq!(e.status(), Status::TYPE_MISMATCH);
        assert!(e.message().contains("position 1"));
        assert!(PackedArgs::pack_tagged(&[(TypeTag::Int, Arg::Int(1))]).is_ok());
    }

    #[test]
    fn config_dict_round_trip_keeps_int_tag() {
        let d = ConfigDict::from_entries([("max_steps", ConfigValue::Int(10000))]).unwrap();
        let packed = PackedArgs::pack(&[Arg::ConfigDict(&d)]).unwrap();
        let back = packed.unpack(&[TypeTag::ConfigDict]).unwrap();
        let ArgRef::ConfigDict(raw) = back[0] else { panic!() };
        let decoded = unsafe { raw.decode() }.unwrap();
        assert_eq!(decoded.get("max_steps"), Some(ConfigValue::Int(10000)));
        assert!(decoded.bits_eq(&d));
    }

    #[test]
    fn string_with_nul_rejected() {
        let e = PackedArgs::pack(&[Arg::Str("a\0b")]).unwrap_err();
        assert_eq!(e.status(), Status::INVALID_ARGUMENT);
    }

    #[test]
    fn raw_record_layout() {
        use std::mem::{offset_of, size_of};
        assert_eq!(offset_of!(OifArgs, num_args), 0);
        assert_eq!(offset_of!(OifArgs, arg_types), size_of::<usize>());
        assert_eq!(offset_of!(OifArgs, arg_values), 2 * size_of::<usize>());
    }
}
