use num_complex::Complex64;

use super::{hessenberg, unit_phase, ComplexMatrix};
use crate::error::{Error, Result};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Blocks at most this large are finished by plain single-shift sweeps.
const SMALL_BLOCK: usize = 75;
/// Skip the next sweep batch when early deflation removed at least this
/// percentage of the window.
const NIBBLE_PERCENT: usize = 14;
/// Rotations per deferred column-update group in a sweep.
const ROT_GROUP: usize = 32;
/// Column (row) block width for deferred chain updates.
const CHAIN_BLOCK: usize = 32;

/// Controls for the shifted QR iteration.
#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Relative deflation threshold on subdiagonal entries.
    pub tol: f64,
    /// Total sweep budget; `None` means `30 * n`.
    pub max_sweeps: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_sweeps: None }
    }
}

/// All eigenvalues of a square complex matrix, in deflation order.
pub fn eigenvalues(a: &ComplexMatrix, opts: EigenOptions) -> Result<Vec<C>> {
    if !a.is_square() {
        return Err(Error::Shape(format!("eigenvalues needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let h = hessenberg(a)?;
    eigenvalues_hessenberg(h, opts)
}

/// Eigenvalues of a matrix already in upper Hessenberg form. The matrix is
/// consumed as workspace.
pub fn eigenvalues_hessenberg(h: ComplexMatrix, opts: EigenOptions) -> Result<Vec<C>> {
    if !h.is_square() {
        return Err(Error::Shape("eigenvalues_hessenberg needs a square matrix".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("deflation tolerance must be positive".into()));
    }
    let n = h.rows();
    let mut budget = opts.max_sweeps.unwrap_or(30 * n.max(1));
    let mut a = h.data;
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let mut m = Mat { a: &mut a, stride: n };
    m.eigen_driver(n, opts.tol, &mut budget, &mut eig)?;
    Ok(eig)
}

#[inline]
fn abs1(z: C) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Unitary rotation `[c s; -conj(s) c]` with real `c`.
#[derive(Clone, Copy)]
struct Rot {
    c: f64,
    s: C,
}

impl Rot {
    /// Rotation mapping `(a, b)` to `(r, 0)`.
    #[inline]
    fn zeroing(a: C, b: C) -> (Self, C) {
        let bn = b.norm();
        if bn == 0.0 {
            return (Rot { c: 1.0, s: ZERO }, a);
        }
        let an = a.norm();
        if an == 0.0 {
            return (Rot { c: 0.0, s: b.conj() / bn }, C::new(bn, 0.0));
        }
        let norm = an.hypot(bn);
        let ph = unit_phase(a);
        (Rot { c: an / norm, s: ph * b.conj() / norm }, ph * norm)
    }
}



/// Square row-major view with explicit stride.
struct Mat<'a> {
    a: &'a mut [C],
    stride: usize,
}

/// Range of rows/columns touched by a similarity transform.
#[derive(Clone, Copy)]
struct Span {
    /// First row updated by column operations.
    row0: usize,
    /// Last column updated by row operations.
    col1: usize,
}

impl Mat<'_> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> C {
        self.a[i * self.stride + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, z: C) {
        self.a[i * self.stride + j] = z;
    }

    #[inline]
    fn rot_rows(&mut self, r: Rot, k: usize, j0: usize, j1: usize) {
        let n = self.stride;
        let (top, bottom) = self.a.split_at_mut((k + 1) * n);
        let x = &mut top[k * n + j0..k * n + j1 + 1];
        let y = &mut bottom[j0..j1 + 1];
        rotate_pair(r.c, r.s, x, y);
    }

    #[inline]
    fn rot_cols(&mut self, r: Rot, k: usize, i0: usize, i1: usize) {
        let n = self.stride;
        assert!(i1 < self.a.len() / n && k + 1 < n);
        #[cfg(target_arch = "x86_64")]
        {
            let kern = simd::Kernel::new(r.c, r.s.conj());
            let base = self.a.as_mut_ptr();
            for i in i0..=i1 {
                // SAFETY: bounds asserted above; the two entries are distinct.
                unsafe { kern.apply(base.add(i * n + k), base.add(i * n + k + 1)) };
            }
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            let sc = r.s.conj();
            for i in i0..=i1 {
                let base = i * n + k;
                let xv = self.a[base];
                let yv = self.a[base + 1];
                self.a[base] = xv * r.c + sc * yv;
                self.a[base + 1] = yv * r.c - r.s * xv;
            }
        }
    }

    /// Start of the unreduced block ending at `hi`, zeroing the negligible
    /// subdiagonal that separates it.
    fn block_start(&mut self, lo_bound: usize, hi: usize, tol: f64) -> usize {
        let mut lo = hi;
        while lo > lo_bound {
            let sub = self.at(lo, lo - 1);
            let mut s = abs1(self.at(lo - 1, lo - 1)) + abs1(self.at(lo, lo));
            if s == 0.0 {
                s = if lo < hi { abs1(self.at(lo + 1, lo)) } else { 0.0 }
                    + if lo >= lo_bound + 2 { abs1(self.at(lo - 1, lo - 2)) } else { 0.0 };
            }
            if abs1(sub) <= tol * s || abs1(sub) < f64::MIN_POSITIVE {
                self.set(lo, lo - 1, ZERO);
                return lo;
            }
            lo -= 1;
        }
        lo
    }

    fn wilkinson_shift(&self, hi: usize) -> C {
        let a = self.at(hi - 1, hi - 1);
        let b = self.at(hi - 1, hi);
        let c = self.at(hi, hi - 1);
        let d = self.at(hi, hi);
        let half_tr = (a + d) * 0.5;
        let det = a * d - b * c;
        let disc = (half_tr * half_tr - det).sqrt();
        let l1 = half_tr + disc;
        let l2 = half_tr - disc;
        if (l1 - d).norm() <= (l2 - d).norm() {
            l1
        } else {
            l2
        }
    }

    /// One implicit single-shift sweep on `lo..=hi`. With `span`, the
    /// transform is applied beyond the block (for Schur vectors); `z`
    /// accumulates it. Column rotations for rows above each group of
    /// `ROT_GROUP` rotations are deferred and applied row by row.
    fn sweep(&mut self, lo: usize, hi: usize, shift: C, span: Option<Span>, mut z: Option<&mut Mat>) {
        let (row0, col1) = match span {
            Some(s) => (s.row0, s.col1),
            None => (lo, hi),
        };
        let mut rots: Vec<Rot> = Vec::with_capacity(ROT_GROUP);
        let mut k0 = lo;
        while k0 < hi {
            let kend = (k0 + ROT_GROUP).min(hi);
            rots.clear();
            for k in k0..kend {
                let r = if k == lo {
                    let (r, _) = Rot::zeroing(self.at(lo, lo) - shift, self.at(lo + 1, lo));
                    self.rot_rows(r, lo, lo, col1);
                    r
                } else {
                    let (r, top) = Rot::zeroing(self.at(k, k - 1), self.at(k + 1, k - 1));
                    self.set(k, k - 1, top);
                    self.set(k + 1, k - 1, ZERO);
                    self.rot_rows(r, k, k, col1);
                    r
                };
                self.rot_cols(r, k, k0.max(row0), (k + 2).min(hi));
                rots.push(r);
            }
            if k0 > row0 {
                apply_rotation_group(self.a, self.stride, row0, k0, k0, &rots);
            }
            if let Some(z) = z.as_deref_mut() {
                let rows = z.stride;
                apply_rotation_group(z.a, z.stride, 0, rows, k0, &rots);
            }
            k0 = kend;
        }
    }

    /// Plain single-shift iteration until every eigenvalue of `lo..=hi` has
    /// deflated. With `full`, the whole matrix is kept consistent (Schur form)
    /// and `z` accumulates the transform.
    fn qr_block(
        &mut self,
        lo: usize,
        hi_start: usize,
        full: bool,
        mut z: Option<&mut Mat>,
        tol: f64,
        budget: &mut usize,
        eig: &mut [C],
    ) -> Result<()> {
        let n = self.stride;
        let mut hi = hi_start;
        let mut since = 0usize;
        loop {
            let l = self.block_start(lo, hi, tol);
            if l == hi {
                eig[hi] = self.at(hi, hi);
                since = 0;
                if hi == lo {
                    return Ok(());
                }
                hi -= 1;
                continue;
            }
            if *budget == 0 {
                return Err(Error::NoConvergence { block: hi + 1 - lo });
            }
            *budget -= 1;
            since += 1;
            let shift = if since % 11 == 0 {
                self.at(hi, hi) + C::new(0.75 * abs1(self.at(hi, hi - 1)), 0.0)
            } else {
                self.wilkinson_shift(hi)
            };
            let span = full.then_some(Span { row0: 0, col1: n - 1 });
            self.sweep(l, hi, shift, span, z.as_deref_mut());
        }
    }

    fn eigen_driver(&mut self, n: usize, tol: f64, budget: &mut usize, eig: &mut [C]) -> Result<()> {
        let mut hi = n - 1;
        let mut stalls = 0usize;
        loop {
            let lo = self.block_start(0, hi, tol);
            let m = hi + 1 - lo;
            if m <= SMALL_BLOCK {
                self.qr_block(lo, hi, false, None, tol, budget, eig)?;
                if lo == 0 {
                    return Ok(());
                }
                hi = lo - 1;
                continue;
            }
            let (ns, nw) = shift_counts(m);
            let (deflated, shifts) = self.early_deflation(lo, hi, nw, tol, budget, eig)?;
            if deflated > 0 {
                stalls = 0;
                hi -= deflated;
                if deflated * 100 > nw * NIBBLE_PERCENT {
                    continue;
                }
            } else {
                stalls += 1;
            }
            let take = ns.min(shifts.len());
            let mut chosen: Vec<C> = shifts[shifts.len() - take..].to_vec();
            if chosen.is_empty() || stalls % 6 == 5 {
                let h = self.at(hi, hi);
                let sub = abs1(self.at(hi, hi - 1));
                chosen = vec![h + C::new(0.75 * sub, 0.0), h - C::new(0.4375 * sub, 0.0)];
            }
            let l = self.block_start(lo, hi, tol);
            if hi + 1 - l < 4 * chosen.len() + 8 {
                for shift in chosen.into_iter().rev() {
                    let l = self.block_start(lo, hi, tol);
                    if hi - l < 1 {
                        break;
                    }
                    if *budget == 0 {
                        return Err(Error::NoConvergence { block: hi + 1 - lo });
                    }
                    *budget -= 1;
                    self.sweep(l, hi, shift, None, None);
                }
            } else {
                if *budget < chosen.len() {
                    return Err(Error::NoConvergence { block: hi + 1 - lo });
                }
                *budget -= chosen.len();
                chosen.reverse();
                self.chain_sweep(l, hi, &chosen);
            }
        }
    }

    /// Chases one bulge per shift through `lo..=hi` as a pipelined chain.
    /// Bulges are two rows apart; updates outside a sliding window are
    /// deferred and applied blockwise.
    fn chain_sweep(&mut self, lo: usize, hi: usize, shifts: &[C]) {
        let q = shifts.len();
        let steps = hi - lo;
        let total = steps + 2 * (q - 1);
        let chunk = (2 * q).max(16);
        let mut recs: Vec<(usize, Rot)> = Vec::with_capacity(q * chunk);
        let mut t0 = 0;
        while t0 < total {
            let t1 = (t0 + chunk).min(total);
            let kmin = (lo + t0).saturating_sub(2 * (q - 1)).max(lo);
            let kmax = (lo + t1 - 1).min(hi - 1);
            let w0 = kmin.saturating_sub(1).max(lo);
            let w1 = (kmax + 2).min(hi);
            recs.clear();
            for t in t0..t1 {
                for (i, &shift) in shifts.iter().enumerate() {
                    if t < 2 * i || t - 2 * i >= steps {
                        continue;
                    }
                    let k = lo + t - 2 * i;
                    let r = if k == lo {
                        let (r, _) = Rot::zeroing(self.at(lo, lo) - shift, self.at(lo + 1, lo));
                        self.rot_rows(r, lo, lo, w1);
                        r
                    } else {
                        let (r, top) = Rot::zeroing(self.at(k, k - 1), self.at(k + 1, k - 1));
                        self.set(k, k - 1, top);
                        self.set(k + 1, k - 1, ZERO);
                        self.rot_rows(r, k, k, w1);
                        r
                    };
                    self.rot_cols(r, k, w0, (k + 2).min(hi));
                    recs.push((k, r));
                }
            }
            let mut c0 = w1 + 1;
            while c0 <= hi {
                let c1 = (c0 + CHAIN_BLOCK - 1).min(hi);
                for &(k, r) in &recs {
                    self.rot_rows(r, k, c0, c1);
                }
                c0 = c1 + 1;
            }
            let mut r0 = lo;
            while r0 < w0 {
                let r1 = (r0 + CHAIN_BLOCK / 2).min(w0) - 1;
                for &(k, r) in &recs {
                    self.rot_cols(r, k, r0, r1);
                }
                r0 = r1 + 1;
            }
            t0 = t1;
        }
    }

    /// Aggressive early deflation on the trailing `nw` rows of `lo..=hi`.
    /// Returns the number of deflated eigenvalues (written to `eig`) and the
    /// undeflated window eigenvalues for use as shifts.
    fn early_deflation(
        &mut self,
        lo: usize,
        hi: usize,
        nw: usize,
        tol: f64,
        budget: &mut usize,
        eig: &mut [C],
    ) -> Result<(usize, Vec<C>)> {
        let kw = hi + 1 - nw;
        debug_assert!(kw > lo);
        let spike = self.at(kw, kw - 1);
        let mut t = vec![ZERO; nw * nw];
        for i in 0..nw {
            for j in i.saturating_sub(1)..nw {
                t[i * nw + j] = self.at(kw + i, kw + j);
            }
        }
        let mut v = vec![ZERO; nw * nw];
        for i in 0..nw {
            v[i * nw + i] = ONE;
        }
        let mut diag = vec![ZERO; nw];
        {
            let mut tm = Mat { a: &mut t, stride: nw };
            let mut vm = Mat { a: &mut v, stride: nw };
            let mut local = 30 * nw;
            if tm.qr_block(0, nw - 1, true, Some(&mut vm), tol, &mut local, &mut diag).is_err() {
                return Ok((0, Vec::new()));
            }
            *budget = budget.saturating_sub((30 * nw - local) / 8);
        }

        // Sort undeflatable eigenvalues to the top, deflatable ones stay below.
        let mut kend = nw;
        let mut ktop = 0;
        while ktop < kend {
            let i = kend - 1;
            let s = spike * v[i].conj();
            let tii = t[i * nw + i].norm();
            if s.norm() <= tol * tii || s.norm() < f64::MIN_POSITIVE {
                kend -= 1;
            } else {
                for j in (ktop..i).rev() {
                    swap_diagonal(&mut t, &mut v, nw, j);
                }
                ktop += 1;
            }
        }
        let shifts: Vec<C> = (0..kend).map(|i| t[i * nw + i]).collect();
        let deflated = nw - kend;
        if deflated == 0 {
            return Ok((0, shifts));
        }
        for i in kend..nw {
            eig[kw + i] = t[i * nw + i];
        }

        if kend > 0 {
            // Reflect the spike onto e1, then return the block to Hessenberg form.
            let mut sp: Vec<C> = (0..kend).map(|i| spike * v[i].conj()).collect();
            let beta = reflect_to_e1(&mut sp);
            if let Some(u) = beta.1 {
                apply_reflector_both(&mut t, &mut v, nw, kend, 0, &u);
            }
            hessenberg_accumulate(&mut t, &mut v, nw, kend);
            for i in 0..kend {
                for j in 0..nw {
                    let val = if j >= kend || j + 1 < i { ZERO } else { t[i * nw + j] };
                    if j < kend {
                        self.set(kw + i, kw + j, val);
                    }
                }
                self.set(kw + i, kw - 1, if i == 0 { beta.0 } else { ZERO });
            }
            // Rows above the window see the transform from the right.
            let mut row_buf = vec![ZERO; nw];
            let mut out = vec![ZERO; kend];
            for r in lo..kw {
                for (j, b) in row_buf.iter_mut().enumerate() {
                    *b = self.at(r, kw + j);
                }
                for o in out.iter_mut() {
                    *o = ZERO;
                }
                for (p, &b) in row_buf.iter().enumerate() {
                    if b == ZERO {
                        continue;
                    }
                    let vrow = &v[p * nw..p * nw + kend];
                    for (o, vv) in out.iter_mut().zip(vrow) {
                        *o += b * vv;
                    }
                }
                for (j, &o) in out.iter().enumerate() {
                    self.set(r, kw + j, o);
                }
            }
        }
        if kw + kend <= hi {
            self.set(kw + kend, kw + kend - 1, ZERO);
        }
        Ok((deflated, shifts))
    }
}

/// Applies the conjugate transposes of consecutive rotations (the `i`-th
/// acting on columns `k0+i, k0+i+1`) to rows `r0..r1`.
fn apply_rotation_group(a: &mut [C], stride: usize, r0: usize, r1: usize, k0: usize, rots: &[Rot]) {
    for r in r0..r1 {
        let seg = &mut a[r * stride + k0..r * stride + k0 + rots.len() + 1];
        let mut x = seg[0];
        for (i, rot) in rots.iter().enumerate() {
            let y = seg[i + 1];
            let sc = rot.s.conj();
            seg[i] = x * rot.c + sc * y;
            x = y * rot.c - rot.s * x;
        }
        seg[rots.len()] = x;
    }
}

/// Applies `[x; y] <- [c x + s y; -conj(s) x + c y]` elementwise.
#[inline]
fn rotate_pair(c: f64, s: C, x: &mut [C], y: &mut [C]) {
    #[cfg(target_arch = "x86_64")]
    {
        let len = x.len().min(y.len());
        let k = simd::Kernel::new(c, s);
        for i in 0..len {
            // SAFETY: i < len of both slices; Complex64 is two packed f64s.
            unsafe { k.apply(x.as_mut_ptr().add(i), y.as_mut_ptr().add(i)) };
        }
    }
    #[cfg(not(target_arch = "x86_64"))]
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (xv, yv) = (*xi, *yi);
        *xi = xv * c + s * yv;
        *yi = yv * c - s.conj() * xv;
    }
}

#[cfg(target_arch = "x86_64")]
mod simd {
    use super::C;
    use std::arch::x86_64::*;

    /// One plane rotation held in SSE2 registers.
    #[derive(Clone, Copy)]
    pub(super) struct Kernel {
        c: __m128d,
        sr: __m128d,
        si: __m128d,
    }

    impl Kernel {
        #[inline(always)]
        pub(super) fn new(c: f64, s: C) -> Self {
            // SAFETY: SSE2 is part of the x86_64 baseline.
            unsafe {
                Kernel {
                    c: _mm_set1_pd(c),
                    sr: _mm_set1_pd(s.re),
                    si: _mm_set_pd(s.im, -s.im),
                }
            }
        }

        /// # Safety
        /// `x` and `y` must be valid, distinct, writable complex entries.
        #[inline(always)]
        pub(super) unsafe fn apply(&self, x: *mut C, y: *mut C) {
            let xp = x as *mut f64;
            let yp = y as *mut f64;
            let xv = _mm_loadu_pd(xp);
            let yv = _mm_loadu_pd(yp);
            let xs = _mm_shuffle_pd(xv, xv, 0b01);
            let ys = _mm_shuffle_pd(yv, yv, 0b01);
            let nx = _mm_add_pd(_mm_add_pd(_mm_mul_pd(self.c, xv), _mm_mul_pd(self.sr, yv)), _mm_mul_pd(self.si, ys));
            let ny = _mm_add_pd(_mm_sub_pd(_mm_mul_pd(self.c, yv), _mm_mul_pd(self.sr, xv)), _mm_mul_pd(self.si, xs));
            _mm_storeu_pd(xp, nx);
            _mm_storeu_pd(yp, ny);
        }
    }
}

fn shift_counts(m: usize) -> (usize, usize) {
    let ns = if m < 150 {
        10
    } else if m < 590 {
        let l = (m as f64).log2().round() as usize;
        (m / l).max(10)
    } else if m < 1500 {
        32
    } else if m < 3000 {
        64
    } else {
        128
    };
    let ns = ns - ns % 2;
    let nw = if m <= 500 { ns } else { ns * 3 / 2 };
    (ns, nw.min(m - 1))
}

/// Swaps diagonal entries `j` and `j+1` of the upper triangular `t` by a
/// unitary similarity, accumulating into `v`.
fn swap_diagonal(t: &mut [C], v: &mut [C], n: usize, j: usize) {
    let t11 = t[j * n + j];
    let t22 = t[(j + 1) * n + j + 1];
    let t12 = t[j * n + j + 1];
    let x1 = t12;
    let x2 = t22 - t11;
    let norm = (x1.norm_sqr() + x2.norm_sqr()).sqrt();
    if norm == 0.0 {
        return;
    }
    let (a, b, c, d) = (x1 / norm, -x2.conj() / norm, x2 / norm, x1.conj() / norm);
    // Columns j, j+1 (rows 0..=j+1) by Q.
    for i in 0..=j + 1 {
        let p = t[i * n + j];
        let q = t[i * n + j + 1];
        t[i * n + j] = a * p + c * q;
        t[i * n + j + 1] = b * p + d * q;
    }
    // Rows j, j+1 (columns j..) by Q^*.
    for k in j..n {
        let p = t[j * n + k];
        let q = t[(j + 1) * n + k];
        t[j * n + k] = a.conj() * p + c.conj() * q;
        t[(j + 1) * n + k] = b.conj() * p + d.conj() * q;
    }
    t[(j + 1) * n + j] = ZERO;
    for i in 0..n {
        let p = v[i * n + j];
        let q = v[i * n + j + 1];
        v[i * n + j] = a * p + c * q;
        v[i * n + j + 1] = b * p + d * q;
    }
}

/// Householder vector `u` (with `u^* u = 2`) such that `(I - u u^*) x`
/// is a multiple of e1. Returns that multiple, and `None` when `x` is
/// already aligned.
fn reflect_to_e1(x: &mut [C]) -> (C, Option<Vec<C>>) {
    let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
    if tail == 0.0 {
        return (x[0], None);
    }
    let norm = (x[0].norm_sqr() + tail).sqrt();
    let phase = if x[0].norm() > 0.0 { unit_phase(x[0]) } else { ONE };
    let alpha = -phase * norm;
    let mut u: Vec<C> = x.to_vec();
    u[0] -= alpha;
    let unorm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for ui in &mut u {
        *ui *= std::f64::consts::SQRT_2 / unorm;
    }
    (alpha, Some(u))
}

/// `T <- P T P`, `V <- V P` with `P = I - u u^*` acting on indices
/// `off..off+u.len()`, restricted to the leading `m x m` block of `t`.
fn apply_reflector_both(t: &mut [C], v: &mut [C], n: usize, m: usize, off: usize, u: &[C]) {
    let len = u.len();
    // Left: rows off..off+len, columns 0..m.
    for col in 0..m {
        let mut s = ZERO;
        for (p, up) in u.iter().enumerate() {
            s += up.conj() * t[(off + p) * n + col];
        }
        for (p, up) in u.iter().enumerate() {
            t[(off + p) * n + col] -= up * s;
        }
    }
    // Right: rows 0..m, columns off..off+len.
    for row in 0..m {
        let base = row * n + off;
        let mut s = ZERO;
        for (p, up) in u.iter().enumerate() {
            s += t[base + p] * up;
        }
        for (p, up) in u.iter().enumerate() {
            t[base + p] -= s * up.conj();
        }
    }
    for row in 0..n {
        let base = row * n + off;
        let mut s = ZERO;
        for (p, up) in u.iter().enumerate().take(len) {
            s += v[base + p] * up;
        }
        for (p, up) in u.iter().enumerate() {
            v[base + p] -= s * up.conj();
        }
    }
}

/// Householder reduction of the leading `m x m` block of `t` to Hessenberg
/// form, accumulating into the first `m` columns of `v`.
fn hessenberg_accumulate(t: &mut [C], v: &mut [C], n: usize, m: usize) {
    for k in 0..m.saturating_sub(2) {
        let mut x: Vec<C> = (k + 1..m).map(|i| t[i * n + k]).collect();
        let (_, refl) = reflect_to_e1(&mut x);
        if let Some(u) = refl {
            apply_reflector_both(t, v, n, m, k + 1, &u);
            for i in k + 2..m {
                t[i * n + k] = ZERO;
            }
        }
    }
}
