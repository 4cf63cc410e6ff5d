//! Thin safe layer over the LAPACK routines the solvers need.
//!
//! Buffers are row-major. LAPACK reads them column-major, i.e. it sees the
//! transpose, which has the same eigenvalues and singular values; for
//! Hermitian input the transpose is the conjugate, and vectors are conjugated
//! back before they are returned.

extern crate openblas_src;

use std::os::raw::c_int;

use lapack_sys::__BindgenComplex;
use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct LapackFailure<T> {
    pub routine: &'static str,
    pub info: i32,
    /// Eigenvalues that did converge, when the routine reports them.
    pub partial: Vec<Complex<T>>,
}

pub type LapackResult<T, R> = Result<R, LapackFailure<T>>;

fn fail<T, R>(routine: &'static str, info: c_int) -> LapackResult<T, R> {
    Err(LapackFailure {
        routine,
        info,
        partial: Vec::new(),
    })
}

/// Scalar types with a LAPACK binding (`f32` and `f64`).
pub trait LinalgReal: Real {
    /// Eigenvalues of a square matrix. With `hessenberg`, the input must
    /// already be upper Hessenberg as LAPACK sees it and the reduction is skipped.
    fn eigenvalues_general(
        n: usize,
        a: &mut [Complex<Self>],
        hessenberg: bool,
    ) -> LapackResult<Self, Vec<Complex<Self>>>;
    /// All eigenvalues of a Hermitian matrix, ascending.
    fn eigenvalues_hermitian(n: usize, a: &mut [Complex<Self>]) -> LapackResult<Self, Vec<Self>>;
    /// Eigenpairs `il..=iu` (1-based, ascending) of a Hermitian matrix.
    fn eigenpairs_hermitian_range(
        n: usize,
        a: &mut [Complex<Self>],
        il: usize,
        iu: usize,
        vectors: bool,
    ) -> LapackResult<Self, (Vec<Self>, Vec<Vec<Complex<Self>>>)>;
    /// Eigenvalues of the real symmetric tridiagonal `(d, e)`, ascending.
    fn eigenvalues_tridiagonal(d: Vec<Self>, e: Vec<Self>) -> LapackResult<Self, Vec<Self>>;
    /// Singular values, descending.
    fn singular_values(rows: usize, cols: usize, a: &mut [Complex<Self>]) -> LapackResult<Self, Vec<Self>>;
    /// Singular values of the tridiagonal matrix with the given sub-, main
    /// and superdiagonal, descending; `O(n^2)` through a real bidiagonal.
    fn singular_values_tridiagonal(
        sub: &[Complex<Self>],
        diag: &[Complex<Self>],
        sup: &[Complex<Self>],
    ) -> LapackResult<Self, Vec<Self>>;
    /// In-place Cholesky factor of a Hermitian positive definite matrix.
    fn cholesky(n: usize, a: &mut [Complex<Self>]) -> LapackResult<Self, ()>;
    /// Overwrites `a` with `L^{-1} a L^{-*}` given the Cholesky factor in `b`.
    fn reduce_generalized(n: usize, a: &mut [Complex<Self>], b: &[Complex<Self>]) -> LapackResult<Self, ()>;
}

macro_rules! impl_linalg {
    ($t:ty, $gehrd:ident, $hseqr:ident, $heevd:ident, $heevr:ident, $sterf:ident, $gesdd:ident, $gbbrd:ident, $bdsqr:ident, $potrf:ident, $hegst:ident) => {
        impl LinalgReal for $t {
            fn eigenvalues_general(
                n: usize,
                a: &mut [Complex<$t>],
                hessenberg: bool,
            ) -> LapackResult<$t, Vec<Complex<$t>>> {
                assert_eq!(a.len(), n * n);
                if n == 0 {
                    return Ok(Vec::new());
                }
                let ni = n as c_int;
                let mut info: c_int = 0;
                let ap = a.as_mut_ptr() as *mut __BindgenComplex<$t>;
                if !hessenberg {
                    let mut tau = vec![Complex::<$t>::zero(); n.max(2) - 1];
                    let mut q = [Complex::<$t>::zero()];
                    let lq: c_int = -1;
                    unsafe {
                        lapack_sys::$gehrd(
                            &ni,
                            &1,
                            &ni,
                            ap,
                            &ni,
                            tau.as_mut_ptr() as *mut _,
                            q.as_mut_ptr() as *mut _,
                            &lq,
                            &mut info,
                        );
                    }
                    let lw = (q[0].re as usize).max(n);
                    let mut work = vec![Complex::<$t>::zero(); lw];
                    unsafe {
                        lapack_sys::$gehrd(
                            &ni,
                            &1,
                            &ni,
                            ap,
                            &ni,
                            tau.as_mut_ptr() as *mut _,
                            work.as_mut_ptr() as *mut _,
                            &(lw as c_int),
                            &mut info,
                        );
                    }
                    if info != 0 {
                        return fail(stringify!($gehrd), info);
                    }
                    // zero the reflectors below the subdiagonal (column-major view)
                    for j in 0..n {
                        for i in j + 2..n {
                            a[j * n + i] = Complex::zero();
                        }
                    }
                }
                let mut w = vec![Complex::<$t>::zero(); n];
                let mut z = [Complex::<$t>::zero()];
                let mut q = [Complex::<$t>::zero()];
                let lq: c_int = -1;
                unsafe {
                    lapack_sys::$hseqr(
                        c"E".as_ptr(),
                        c"N".as_ptr(),
                        &ni,
                        &1,
                        &ni,
                        ap,
                        &ni,
                        w.as_mut_ptr() as *mut _,
                        z.as_mut_ptr() as *mut _,
                        &1,
                        q.as_mut_ptr() as *mut _,
                        &lq,
                        &mut info,
                    );
                }
                let lw = (q[0].re as usize).max(n);
                let mut work = vec![Complex::<$t>::zero(); lw];
                unsafe {
                    lapack_sys::$hseqr(
                        c"E".as_ptr(),
                        c"N".as_ptr(),
                        &ni,
                        &1,
                        &ni,
                        ap,
                        &ni,
                        w.as_mut_ptr() as *mut _,
                        z.as_mut_ptr() as *mut _,
                        &1,
                        work.as_mut_ptr() as *mut _,
                        &(lw as c_int),
                        &mut info,
                    );
                }
                if info > 0 {
                    let k = info as usize;
                    return Err(LapackFailure {
                        routine: stringify!($hseqr),
                        info,
                        partial: w[k..].to_vec(),
                    });
                } else if info < 0 {
                    return fail(stringify!($hseqr), info);
                }
                Ok(w)
            }

            fn eigenvalues_hermitian(n: usize, a: &mut [Complex<$t>]) -> LapackResult<$t, Vec<$t>> {
                assert_eq!(a.len(), n * n);
                if n == 0 {
                    return Ok(Vec::new());
                }
                let ni = n as c_int;
                let mut info: c_int = 0;
                let mut w = vec![0 as $t; n];
                let mut q = [Complex::<$t>::zero()];
                let mut rq = [0 as $t];
                let mut iq = [0 as c_int];
                unsafe {
                    lapack_sys::$heevd(
                        c"N".as_ptr(),
                        c"L".as_ptr(),
                        &ni,
                        a.as_mut_ptr() as *mut _,
                        &ni,
                        w.as_mut_ptr(),
                        q.as_mut_ptr() as *mut _,
                        &-1,
                        rq.as_mut_ptr(),
                        &-1,
                        iq.as_mut_ptr(),
                        &-1,
                        &mut info,
                    );
                }
                let lw = (q[0].re as usize).max(n + 1);
                let lrw = (rq[0] as usize).max(n);
                let liw = (iq[0] as usize).max(1);
                let mut work = vec![Complex::<$t>::zero(); lw];
                let mut rwork = vec![0 as $t; lrw];
                let mut iwork = vec![0 as c_int; liw];
                unsafe {
                    lapack_sys::$heevd(
                        c"N".as_ptr(),
                        c"L".as_ptr(),
                        &ni,
                        a.as_mut_ptr() as *mut _,
                        &ni,
                        w.as_mut_ptr(),
                        work.as_mut_ptr() as *mut _,
                        &(lw as c_int),
                        rwork.as_mut_ptr(),
                        &(lrw as c_int),
                        iwork.as_mut_ptr(),
                        &(liw as c_int),
                        &mut info,
                    );
                }
                if info != 0 {
                    return fail(stringify!($heevd), info);
                }
                Ok(w)
            }

            fn eigenpairs_hermitian_range(
                n: usize,
                a: &mut [Complex<$t>],
                il: usize,
                iu: usize,
                vectors: bool,
            ) -> LapackResult<$t, (Vec<$t>, Vec<Vec<Complex<$t>>>)> {
                assert_eq!(a.len(), n * n);
                assert!(1 <= il && il <= iu && iu <= n);
                let ni = n as c_int;
                let mut info: c_int = 0;
                let mut found: c_int = 0;
                let cnt = iu - il + 1;
                let mut w = vec![0 as $t; n];
                let mut z = vec![Complex::<$t>::zero(); if vectors { n * cnt } else { 1 }];
                let ldz = if vectors { ni } else { 1 };
                let mut isuppz = vec![0 as c_int; 2 * cnt.max(1)];
                let jobz = if vectors { c"V".as_ptr() } else { c"N".as_ptr() };
                let (ilc, iuc) = (il as c_int, iu as c_int);
                let zero = 0 as $t;
                let mut q = [Complex::<$t>::zero()];
                let mut rq = [0 as $t];
                let mut iq = [0 as c_int];
                unsafe {
                    lapack_sys::$heevr(
                        jobz,
                        c"I".as_ptr(),
                        c"L".as_ptr(),
                        &ni,
                        a.as_mut_ptr() as *mut _,
                        &ni,
                        &zero,
                        &zero,
                        &ilc,
                        &iuc,
                        &zero,
                        &mut found,
                        w.as_mut_ptr(),
                        z.as_mut_ptr() as *mut _,
                        &ldz,
                        isuppz.as_mut_ptr(),
                        q.as_mut_ptr() as *mut _,
                        &-1,
                        rq.as_mut_ptr(),
                        &-1,
                        iq.as_mut_ptr(),
                        &-1,
                        &mut info,
                    );
                }
                let lw = (q[0].re as usize).max(2 * n);
                let lrw = (rq[0] as usize).max(24 * n);
                let liw = (iq[0] as usize).max(10 * n);
                let mut work = vec![Complex::<$t>::zero(); lw];
                let mut rwork = vec![0 as $t; lrw];
                let mut iwork = vec![0 as c_int; liw];
                unsafe {
                    lapack_sys::$heevr(
                        jobz,
                        c"I".as_ptr(),
                        c"L".as_ptr(),
                        &ni,
                        a.as_mut_ptr() as *mut _,
                        &ni,
                        &zero,
                        &zero,
                        &ilc,
                        &iuc,
                        &zero,
                        &mut found,
                        w.as_mut_ptr(),
                        z.as_mut_ptr() as *mut _,
                        &ldz,
                        isuppz.as_mut_ptr(),
                        work.as_mut_ptr() as *mut _,
                        &(lw as c_int),
                        rwork.as_mut_ptr(),
                        &(lrw as c_int),
                        iwork.as_mut_ptr(),
                        &(liw as c_int),
                        &mut info,
                    );
                }
                if info != 0 {
                    return fail(stringify!($heevr), info);
                }
                let found = found as usize;
                w.truncate(found);
                let vecs = if vectors {
                    (0..found)
                        .map(|j| z[j * n..(j + 1) * n].iter().map(|c| c.conj()).collect())
                        .collect()
                } else {
                    Vec::new()
                };
                Ok((w, vecs))
            }

            fn eigenvalues_tridiagonal(mut d: Vec<$t>, mut e: Vec<$t>) -> LapackResult<$t, Vec<$t>> {
                let n = d.len();
                if n == 0 {
                    return Ok(d);
                }
                e.resize(n, 0 as $t);
                let mut info: c_int = 0;
                unsafe {
                    lapack_sys::$sterf(&(n as c_int), d.as_mut_ptr(), e.as_mut_ptr(), &mut info);
                }
                if info != 0 {
                    return fail(stringify!($sterf), info);
                }
                Ok(d)
            }

            fn singular_values(rows: usize, cols: usize, a: &mut [Complex<$t>]) -> LapackResult<$t, Vec<$t>> {
                assert_eq!(a.len(), rows * cols);
                let k = rows.min(cols);
                if k == 0 {
                    return Ok(Vec::new());
                }
                // the column-major view is cols x rows
                let (m, n) = (cols as c_int, rows as c_int);
                let mut info: c_int = 0;
                let mut s = vec![0 as $t; k];
                let mut u = [Complex::<$t>::zero()];
                let mut vt = [Complex::<$t>::zero()];
                let mut rwork = vec![0 as $t; 7 * k];
                let mut iwork = vec![0 as c_int; 8 * k];
                let mut q = [Complex::<$t>::zero()];
                unsafe {
                    lapack_sys::$gesdd(
                        c"N".as_ptr(),
                        &m,
                        &n,
                        a.as_mut_ptr() as *mut _,
                        &m,
                        s.as_mut_ptr(),
                        u.as_mut_ptr() as *mut _,
                        &1,
                        vt.as_mut_ptr() as *mut _,
                        &1,
                        q.as_mut_ptr() as *mut _,
                        &-1,
                        rwork.as_mut_ptr(),
                        iwork.as_mut_ptr(),
                        &mut info,
                    );
                }
                let lw = (q[0].re as usize).max(3 * k + rows.max(cols));
                let mut work = vec![Complex::<$t>::zero(); lw];
                unsafe {
                    lapack_sys::$gesdd(
                        c"N".as_ptr(),
                        &m,
                        &n,
                        a.as_mut_ptr() as *mut _,
                        &m,
                        s.as_mut_ptr(),
                        u.as_mut_ptr() as *mut _,
                        &1,
                        vt.as_mut_ptr() as *mut _,
                        &1,
                        work.as_mut_ptr() as *mut _,
                        &(lw as c_int),
                        rwork.as_mut_ptr(),
                        iwork.as_mut_ptr(),
                        &mut info,
                    );
                }
                if info != 0 {
                    return fail(stringify!($gesdd), info);
                }
                Ok(s)
            }

            fn singular_values_tridiagonal(
                sub: &[Complex<$t>],
                diag: &[Complex<$t>],
                sup: &[Complex<$t>],
            ) -> LapackResult<$t, Vec<$t>> {
                let n = diag.len();
                assert!(sub.len() + 1 >= n && sup.len() + 1 >= n);
                if n == 0 {
                    return Ok(Vec::new());
                }
                // column-major band storage, kl = ku = 1
                let mut ab = vec![Complex::<$t>::zero(); 3 * n];
                for j in 0..n {
                    if j > 0 {
                        ab[3 * j] = sup[j - 1];
                    }
                    ab[3 * j + 1] = diag[j];
                    if j + 1 < n {
                        ab[3 * j + 2] = sub[j];
                    }
                }
                let ni = n as c_int;
                let mut info: c_int = 0;
                let mut d = vec![0 as $t; n];
                let mut e = vec![0 as $t; n];
                let mut dummy = [Complex::<$t>::zero()];
                let mut work = vec![Complex::<$t>::zero(); n];
                let mut rwork = vec![0 as $t; n];
                unsafe {
                    lapack_sys::$gbbrd(
                        c"N".as_ptr(),
                        &ni,
                        &ni,
                        &0,
                        &1,
                        &1,
                        ab.as_mut_ptr() as *mut _,
                        &3,
                        d.as_mut_ptr(),
                        e.as_mut_ptr(),
                        dummy.as_mut_ptr() as *mut _,
                        &1,
                        dummy.as_mut_ptr() as *mut _,
                        &1,
                        dummy.as_mut_ptr() as *mut _,
                        &1,
                        work.as_mut_ptr() as *mut _,
                        rwork.as_mut_ptr(),
                        &mut info,
                    );
                }
                if info != 0 {
                    return fail(stringify!($gbbrd), info);
                }
                let mut rdummy = [0 as $t];
                let mut rw = vec![0 as $t; 4 * n];
                unsafe {
                    lapack_sys::$bdsqr(
                        c"U".as_ptr(),
                        &ni,
                        &0,
                        &0,
                        &0,
                        d.as_mut_ptr(),
                        e.as_mut_ptr(),
                        rdummy.as_mut_ptr(),
                        &1,
                        rdummy.as_mut_ptr(),
                        &1,
                        rdummy.as_mut_ptr(),
                        &1,
                        rw.as_mut_ptr(),
                        &mut info,
                    );
                }
                if info != 0 {
                    return fail(stringify!($bdsqr), info);
                }
                Ok(d)
            }

            fn cholesky(n: usize, a: &mut [Complex<$t>]) -> LapackResult<$t, ()> {
                assert_eq!(a.len(), n * n);
                let mut info: c_int = 0;
                unsafe {
                    lapack_sys::$potrf(
                        c"L".as_ptr(),
                        &(n as c_int),
                        a.as_mut_ptr() as *mut _,
                        &(n as c_int),
                        &mut info,
                    );
                }
                if info != 0 {
                    return fail(stringify!($potrf), info);
                }
                Ok(())
            }

            fn reduce_generalized(n: usize, a: &mut [Complex<$t>], b: &[Complex<$t>]) -> LapackResult<$t, ()> {
                assert_eq!(a.len(), n * n);
                assert_eq!(b.len(), n * n);
                let mut info: c_int = 0;
                let mut bb = b.to_vec();
                unsafe {
                    lapack_sys::$hegst(
                        &1,
                        c"L".as_ptr(),
                        &(n as c_int),
                        a.as_mut_ptr() as *mut _,
                        &(n as c_int),
                        bb.as_mut_ptr() as *mut _,
                        &(n as c_int),
                        &mut info,
                    );
                }
                if info != 0 {
                    return fail(stringify!($hegst), info);
                }
                Ok(())
            }
        }
    };
}

impl_linalg!(f64, zgehrd_, zhseqr_, zheevd_, zheevr_, dsterf_, zgesdd_, zgbbrd_, dbdsqr_, zpotrf_, zhegst_);
impl_linalg!(f32, cgehrd_, chseqr_, cheevd_, cheevr_, ssterf_, cgesdd_, cgbbrd_, sbdsqr_, cpotrf_, chegst_);
