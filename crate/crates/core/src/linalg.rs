//! Dense Hermitian eigensolver backed by the system LAPACK (zheev).
//!
//! The Zeeman blocks reach dimension ~1700 at the shipped truncation
//! levels, which is past what a hand-rolled QL iteration handles in
//! reasonable time, so we bind `zheev_` directly. OpenBLAS is pinned to
//! a single thread the first time an eigensolve runs; reports must be
//! byte-reproducible and threaded GEMV kernels are not guaranteed to
//! sum in a fixed order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::os::raw::c_char;
use std::sync::Once;

use crate::{CoreError, Result};

#[link(name = "openblas")]
extern "C" {
    fn zheev_(
        jobz: *const c_char,
        uplo: *const c_char,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        w: *mut f64,
        work: *mut Complex64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
    fn openblas_set_num_threads(n: i32);
}

static PIN_THREADS: Once = Once::new();

fn pin_single_thread() {
    PIN_THREADS.call_once(|| unsafe { openblas_set_num_threads(1) });
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn eigh(a: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    eig_hermitian(a, true)
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    Ok(eig_hermitian(a, false)?.0)
}

fn eig_hermitian(
    a: &DMatrix<Complex64>,
    want_vectors: bool,
) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if a.nrows() != a.ncols() {
        return Err(CoreError::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    pin_single_thread();
    let n = a.nrows() as i32;
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    // nalgebra stores column-major, which is what LAPACK expects.
    let mut data: Vec<Complex64> = a.as_slice().to_vec();
    let mut w = vec![0.0f64; n as usize];
    let mut rwork = vec![0.0f64; (3 * n - 2).max(1) as usize];
    let jobz = if want_vectors { b'V' } else { b'N' } as c_char;
    let uplo = b'L' as c_char;
    let mut info: i32 = 0;

    // workspace query
    let mut work_query = [Complex64::new(0.0, 0.0)];
    let lwork_query: i32 = -1;
    unsafe {
        zheev_(
            &jobz,
            &uplo,
            &n,
            data.as_mut_ptr(),
            &n,
            w.as_mut_ptr(),
            work_query.as_mut_ptr(),
            &lwork_query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::EigenFailure(format!(
            "zheev workspace query returned info = {info}"
        )));
    }
    let lwork = work_query[0].re as i32;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        zheev_(
            &jobz,
            &uplo,
            &n,
            data.as_mut_ptr(),
            &n,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::EigenFailure(format!(
            "zheev returned info = {info}"
        )));
    }
    let vectors = if want_vectors {
        DMatrix::from_vec(n as usize, n as usize, data)
    } else {
        DMatrix::zeros(0, 0)
    };
    Ok((w, vectors))
}
