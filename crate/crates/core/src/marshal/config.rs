use indexmap::IndexMap;

use super::TypeTag;
use crate::status::{OifError, Result};

/// A configuration value: a 32-bit integer or a 64-bit float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConfigValue {
    Int(i32),
    Float64(f64),
}

impl ConfigValue {
    pub fn tag(&self) -> TypeTag {
        match self {
            ConfigValue::Int(_) => TypeTag::Int,
            ConfigValue::Float64(_) => TypeTag::Float64,
        }
    }

    /// Numeric value as `f64`; integers convert losslessly.
    pub fn as_f64(&self) -> f64 {
        match *self {
            ConfigValue::Int(i) => f64::from(i),
            ConfigValue::Float64(x) => x,
        }
    }

    pub fn as_int(&self) -> Option<i32> {
        match *self {
            ConfigValue::Int(i) => Some(i),
            ConfigValue::Float64(_) => None,
        }
    }

    fn bits_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ConfigValue::Int(a), ConfigValue::Int(b)) => a == b,
            (ConfigValue::Float64(a), ConfigValue::Float64(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl From<i32> for ConfigValue {
    fn from(v: i32) -> Self {
        ConfigValue::Int(v)
    }
}

impl From<f64> for ConfigValue {
    fn from(v: f64) -> Self {
        ConfigValue::Float64(v)
    }
}

/// Ordered string-keyed options with unique keys.
///
/// Wire form, little-endian, a plain concatenation of records:
///
/// ```text
/// u32 key_len | key bytes (UTF-8) | u32 tag (1 = INT, 2 = FLOAT64) | 8-byte value
/// ```
///
/// INT values are stored sign-extended to 64 bits; FLOAT64 values as their
/// IEEE-754 bit pattern.
#[derive(Clone, Debug, Default)]
pub struct ConfigDict {
    entries: IndexMap<String, ConfigValue>,
}

const RECORD_FIXED: usize = 4 + 4 + 8;

impl ConfigDict {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a dictionary, rejecting duplicate keys.
    pub fn from_entries<K, I>(entries: I) -> Result<Self>
    where
        K: Into<String>,
        I: IntoIterator<Item = (K, ConfigValue)>,
    {
        let mut dict = ConfigDict::new();
        for (k, v) in entries {
            dict.insert(k, v)?;
        }
        Ok(dict)
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<ConfigValue>) -> Result<()> {
        let key = key.into();
        if self.entries.contains_key(&key) {
            return Err(OifError::invalid_argument(format!("duplicate config key '{key}'")));
        }
        if key.len() > u32::MAX as usize {
            return Err(OifError::invalid_argument("config key too long"));
        }
        self.entries.insert(key, value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<ConfigValue> {
        self.entries.get(key).copied()
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ConfigValue)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn encode(&self) -> Vec<u8> {
        let size = self.entries.keys().map(|k| RECORD_FIXED + k.len()).sum();
        let mut out = Vec::with_capacity(size);
        for (key, value) in &self.entries {
            out.extend_from_slice(&(key.len() as u32).to_le_bytes());
            out.extend_from_slice(key.as_bytes());
            out.extend_from_slice(&value.tag().code().to_le_bytes());
            let bits = match *value {
                ConfigValue::Int(i) => i64::from(i).to_le_bytes(),
                ConfigValue::Float64(x) => x.to_le_bytes(),
            };
            out.extend_from_slice(&bits);
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut dict = ConfigDict::new();
        let mut rest = bytes;
        while !rest.is_empty() {
            let key_len = take_u32(&mut rest)? as usize;
            if rest.len() < key_len {
                return Err(truncated());
            }
            let (key, tail) = rest.split_at(key_len);
            rest = tail;
            let key = std::str::from_utf8(key)
                .map_err(|_| OifError::invalid_argument("config key is not UTF-8"))?;
            let tag = take_u32(&mut rest)?;
            if rest.len() < 8 {
                return Err(truncated());
            }
            let (raw, tail) = rest.split_at(8);
            rest = tail;
            let raw: [u8; 8] = raw.try_into().expect("split_at(8)");
            let value = match TypeTag::from_code(tag) {
                Some(TypeTag::Int) => {
                    let wide = i64::from_le_bytes(raw);
                    let narrow = i32::try_from(wide).map_err(|_| {
                        OifError::invalid_argument(format!("config value for '{key}' exceeds 32 bits"))
                    })?;
                    ConfigValue::Int(narrow)
                }
                Some(TypeTag::Float64) => ConfigValue::Float64(f64::from_le_bytes(raw)),
                _ => {
                    return Err(OifError::type_mismatch(format!(
                        "config value for '{key}' has tag {tag}; only INT and FLOAT64 are allowed"
                    )))
                }
            };
            dict.insert(key, value)?;
        }
        Ok(dict)
    }

    /// Bitwise equality: same key order, keys, tags, and value bits.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|((ka, va), (kb, vb))| ka == kb && va.bits_eq(vb))
    }
}

fn truncated() -> OifError {
    OifError::invalid_argument("config dict wire form is truncated")
}

fn take_u32(rest: &mut &[u8]) -> Result<u32> {
    if rest.len() < 4 {
        return Err(truncated());
    }
    let (head, tail) = rest.split_at(4);
    *rest = tail;
    Ok(u32::from_le_bytes(head.try_into().expect("split_at(4)")))
}

/// Boundary record for an encoded [`ConfigDict`].
#[repr(C)]
#[derive(Debug)]
pub struct OifConfigDict {
    pub size: usize,
    pub buffer: *const u8,
}

impl OifConfigDict {
    /// # Safety
    /// `buffer` must point to `size` readable bytes (or be null with size 0).
    pub unsafe fn decode(&self) -> Result<ConfigDict> {
        if self.size == 0 {
            return Ok(ConfigDict::new());
        }
        if self.buffer.is_null() {
            return Err(OifError::invalid_argument("config dict buffer is null"));
        }
        ConfigDict::decode(std::slice::from_raw_parts(self.buffer, self.size))
    }
}
