use std::marker::PhantomData;

use crate::status::{OifError, Result};

/// Boundary record for an n-dimensional array of `f64`, row-major.
///
/// Layout is fixed: `nd`, then the address of `nd` extents, then the address
/// of the contiguous element storage. The record never owns what it points to.
#[repr(C)]
#[derive(Debug)]
pub struct ArrayF64 {
    pub nd: isize,
    pub dimensions: *mut isize,
    pub data: *mut f64,
}

impl ArrayF64 {
    /// Checks the record and returns its element count.
    ///
    /// # Safety
    /// `dimensions` must point to `nd` readable extents when non-null.
    pub unsafe fn validate(&self) -> Result<usize> {
        if self.nd < 1 {
            return Err(OifError::invalid_argument(format!(
                "array must have at least one dimension, got nd={}",
                self.nd
            )));
        }
        if self.dimensions.is_null() {
            return Err(OifError::invalid_argument("array dimensions pointer is null"));
        }
        let dims = std::slice::from_raw_parts(self.dimensions, self.nd as usize);
        let count = element_count(dims)?;
        if count > 0 && self.data.is_null() {
            return Err(OifError::invalid_argument("array data pointer is null"));
        }
        Ok(count)
    }

    /// # Safety
    /// The record must be valid (see [`ArrayF64::validate`]).
    pub unsafe fn dims(&self) -> &[isize] {
        std::slice::from_raw_parts(self.dimensions, self.nd as usize)
    }

    /// # Safety
    /// The record must be valid and its storage must outlive `'a` without
    /// being mutated elsewhere.
    pub unsafe fn as_slice<'a>(&self) -> &'a [f64] {
        let n = element_count(self.dims()).unwrap_or(0);
        if n == 0 {
            return &[];
        }
        std::slice::from_raw_parts(self.data, n)
    }

    /// # Safety
    /// As [`ArrayF64::as_slice`], plus exclusive access to the storage for `'a`.
    #[allow(clippy::mut_from_ref)]
    pub unsafe fn as_mut_slice<'a>(&self) -> &'a mut [f64] {
        let n = element_count(self.dims()).unwrap_or(0);
        if n == 0 {
            return &mut [];
        }
        std::slice::from_raw_parts_mut(self.data, n)
    }
}

/// Product of the extents, rejecting negative extents and overflow.
pub fn element_count(dims: &[isize]) -> Result<usize> {
    dims.iter().enumerate().try_fold(1usize, |acc, (i, &d)| {
        if d < 0 {
            return Err(OifError::invalid_argument(format!(
                "extent {i} is negative ({d})"
            )));
        }
        acc.checked_mul(d as usize)
            .ok_or_else(|| OifError::allocation_failure("element count overflows usize"))
    })
}

enum Storage {
    Owned(#[allow(dead_code)] Vec<f64>),
    Borrowed,
}

/// An [`ArrayF64`] record at a stable address, together with its extents.
///
/// Created either by [`make_array_f64`], which allocates zeroed storage owned
/// by this value, or by [`view_array_f64`], which aliases caller storage for
/// the lifetime `'a`.
pub struct ArrayF64Buf<'a> {
    header: Box<ArrayF64>,
    _dims: Box<[isize]>,
    _storage: Storage,
    _marker: PhantomData<&'a mut [f64]>,
}

// The buffer exclusively owns or exclusively borrows its storage.
unsafe impl Send for ArrayF64Buf<'_> {}

impl<'a> ArrayF64Buf<'a> {
    fn assemble(dims: &[isize], data: *mut f64, storage: Storage) -> Self {
        let mut dims: Box<[isize]> = dims.into();
        let header = Box::new(ArrayF64 {
            nd: dims.len() as isize,
            dimensions: dims.as_mut_ptr(),
            data,
        });
        ArrayF64Buf {
            header,
            _dims: dims,
            _storage: storage,
            _marker: PhantomData,
        }
    }

    pub fn nd(&self) -> usize {
        self.header.nd as usize
    }

    pub fn dims(&self) -> &[isize] {
        &self._dims
    }

    pub fn len(&self) -> usize {
        self._dims.iter().map(|&d| d as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn data_ptr(&self) -> *mut f64 {
        self.header.data
    }

    pub fn as_slice(&self) -> &[f64] {
        // SAFETY: the header was built from validated extents over storage of
        // at least `len()` elements that lives for `'a`.
        unsafe { self.header.as_slice() }
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        unsafe { self.header.as_mut_slice() }
    }

    /// The boundary record. Its address is stable for the life of the buffer.
    pub fn as_raw(&self) -> &ArrayF64 {
        &self.header
    }

    pub fn as_raw_ptr(&self) -> *mut ArrayF64 {
        &*self.header as *const ArrayF64 as *mut ArrayF64
    }
}

impl std::fmt::Debug for ArrayF64Buf<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArrayF64Buf")
            .field("dims", &self.dims())
            .field("data", &self.as_slice())
            .finish()
    }
}

fn check_shape(nd: isize, dims: &[isize]) -> Result<usize> {
    if nd < 1 {
        return Err(OifError::invalid_argument(format!(
            "array must have at least one dimension, got nd={nd}"
        )));
    }
    if dims.len() != nd as usize {
        return Err(OifError::invalid_argument(format!(
            "nd={nd} but {} extents were given",
            dims.len()
        )));
    }
    element_count(dims)
}

/// Allocates a zero-initialized row-major array of the given shape.
///
/// The storage is owned by the returned buffer; pass it to
/// [`free_array_f64`] (or drop it) to release it.
pub fn make_array_f64(nd: isize, dims: &[isize]) -> Result<ArrayF64Buf<'static>> {
    let n = check_shape(nd, dims)?;
    let mut data: Vec<f64> = Vec::new();
    data.try_reserve_exact(n)
        .map_err(|e| OifError::allocation_failure(format!("cannot allocate {n} elements: {e}")))?;
    data.resize(n, 0.0);
    let ptr = data.as_mut_ptr();
    Ok(ArrayF64Buf::assemble(dims, ptr, Storage::Owned(data)))
}

pub fn free_array_f64(array: ArrayF64Buf<'_>) {
    drop(array);
}

/// Wraps caller storage without copying. Writes through the view are
/// visible in `data`.
pub fn view_array_f64<'a>(data: &'a mut [f64], dims: &[isize]) -> Result<ArrayF64Buf<'a>> {
    let n = check_shape(dims.len() as isize, dims)?;
    if n > data.len() {
        return Err(OifError::invalid_argument(format!(
            "shape needs {n} elements but storage holds {}",
            data.len()
        )));
    }
    Ok(ArrayF64Buf::assemble(dims, data.as_mut_ptr(), Storage::Borrowed))
}

/// Wraps raw storage without copying.
///
/// # Safety
/// `data` must point to at least `prod(dims)` contiguous `f64` values that
/// stay valid, and are not accessed through other references, for `'a`.
pub unsafe fn view_array_f64_raw<'a>(
    data: *mut f64,
    nd: isize,
    dims: &[isize],
) -> Result<ArrayF64Buf<'a>> {
    let n = check_shape(nd, dims)?;
    if n > 0 && data.is_null() {
        return Err(OifError::invalid_argument("array data pointer is null"));
    }
    Ok(ArrayF64Buf::assemble(dims, data, Storage::Borrowed))
}
