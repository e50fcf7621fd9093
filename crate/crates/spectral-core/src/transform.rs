//! Transforms between the mode lattice and the collocation grid.
//!
//! The inverse transform is unnormalized (physical values are plain Fourier
//! sums); the forward transform carries the 1/M² factor so that
//! forward∘inverse is the identity on retained modes. Pairs of real arrays
//! are packed into a single complex FFT (`a + ib`) and unpacked through the
//! Hermitian split, halving the transform count of every nonlinear product.

use crate::field::{ScalarSpectralField, SpectralField};
use crate::grid::SpectralGrid;
use crate::{real, Scalar, SpectralError, C};
use rustfft::Fft;
use std::sync::Arc;

#[inline]
fn wrap(m: usize, k: i32) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (m as i32 + k) as usize
    }
}

fn transpose_square<Z: Copy>(m: usize, buf: &mut [Z]) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

/// In-place 2D FFT on a row-major M×M buffer: transform rows, transpose,
/// transform rows again, transpose back.
fn fft2<T: Scalar>(fft: &Arc<dyn Fft<T>>, m: usize, buf: &mut [C<T>]) {
    debug_assert_eq!(buf.len(), m * m);
    let mut scratch = vec![C::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
    transpose_square(m, buf);
    fft.process_with_scratch(buf, &mut scratch);
    transpose_square(m, buf);
}

/// Physical samples of two real fields given their Hermitian spectra, via one
/// packed inverse FFT.
pub(crate) fn inverse_pair<T: Scalar>(
    grid: &SpectralGrid<T>,
    a: &[C<T>],
    b: &[C<T>],
) -> (Vec<T>, Vec<T>) {
    let m = grid.collocation();
    let side = grid.side();
    let k = grid.k_max();
    let mut buf = vec![C::new(T::zero(), T::zero()); m * m];
    for idx in 0..side * side {
        let k1 = (idx / side) as i32 - k;
        let k2 = (idx % side) as i32 - k;
        let (za, zb) = (a[idx], b[idx]);
        buf[wrap(m, k1) * m + wrap(m, k2)] = C::new(za.re - zb.im, za.im + zb.re);
    }
    fft2(&grid.fft_inv, m, &mut buf);
    let mut pa = Vec::with_capacity(m * m);
    let mut pb = Vec::with_capacity(m * m);
    for z in &buf {
        pa.push(z.re);
        pb.push(z.im);
    }
    (pa, pb)
}

/// Physical samples of one real field given its Hermitian spectrum.
pub(crate) fn inverse_single<T: Scalar>(grid: &SpectralGrid<T>, a: &[C<T>]) -> Vec<T> {
    let m = grid.collocation();
    let side = grid.side();
    let k = grid.k_max();
    let mut buf = vec![C::new(T::zero(), T::zero()); m * m];
    for idx in 0..side * side {
        let k1 = (idx / side) as i32 - k;
        let k2 = (idx % side) as i32 - k;
        buf[wrap(m, k1) * m + wrap(m, k2)] = a[idx];
    }
    fft2(&grid.fft_inv, m, &mut buf);
    buf.iter().map(|z| z.re).collect()
}

/// Retained-lattice spectra of two real physical arrays via one packed
/// forward FFT; modes beyond K are discarded (truncation, not dealiasing).
pub(crate) fn forward_pair_into<T: Scalar>(
    grid: &SpectralGrid<T>,
    pa: &[T],
    pb: &[T],
    out_a: &mut [C<T>],
    out_b: &mut [C<T>],
) {
    let m = grid.collocation();
    let side = grid.side();
    let k = grid.k_max();
    let mut buf: Vec<C<T>> = pa.iter().zip(pb).map(|(&x, &y)| C::new(x, y)).collect();
    fft2(&grid.fft_fwd, m, &mut buf);
    let inv_m2 = T::one() / real::<T>((m * m) as f64);
    let half = real::<T>(0.5);
    for idx in 0..side * side {
        let k1 = (idx / side) as i32 - k;
        let k2 = (idx % side) as i32 - k;
        let zp = buf[wrap(m, k1) * m + wrap(m, k2)];
        let zm = buf[wrap(m, -k1) * m + wrap(m, -k2)].conj();
        let a = (zp + zm) * (half * inv_m2);
        let d = (zp - zm) * (half * inv_m2);
        out_a[idx] = a;
        out_b[idx] = C::new(d.im, -d.re); // −i·d
    }
}

/// Retained-lattice spectrum of one real physical array.
pub(crate) fn forward_single_into<T: Scalar>(grid: &SpectralGrid<T>, pa: &[T], out: &mut [C<T>]) {
    let m = grid.collocation();
    let side = grid.side();
    let k = grid.k_max();
    let mut buf: Vec<C<T>> = pa.iter().map(|&x| C::new(x, T::zero())).collect();
    fft2(&grid.fft_fwd, m, &mut buf);
    let inv_m2 = T::one() / real::<T>((m * m) as f64);
    for idx in 0..side * side {
        let k1 = (idx / side) as i32 - k;
        let k2 = (idx % side) as i32 - k;
        out[idx] = buf[wrap(m, k1) * m + wrap(m, k2)] * inv_m2;
    }
}

pub(crate) fn field_to_physical<T: Scalar>(
    grid: &SpectralGrid<T>,
    f: &SpectralField<T>,
) -> (Vec<T>, Vec<T>) {
    grid.check_compatible(f.k_max());
    inverse_pair(grid, f.comp1(), f.comp2())
}

pub(crate) fn scalar_to_physical<T: Scalar>(
    grid: &SpectralGrid<T>,
    s: &ScalarSpectralField<T>,
) -> Vec<T> {
    grid.check_compatible(s.k_max());
    inverse_single(grid, s.values())
}

/// Forward transform of a velocity sample pair; the mean mode is pinned to
/// zero to maintain the zero-mean invariant.
pub(crate) fn physical_to_field<T: Scalar>(
    grid: &SpectralGrid<T>,
    pa: &[T],
    pb: &[T],
) -> SpectralField<T> {
    let mut out = grid.zero_field();
    let zero_idx = grid.index(0, 0);
    {
        let (u1, u2) = out.components_mut();
        forward_pair_into(grid, pa, pb, u1, u2);
        u1[zero_idx] = C::new(T::zero(), T::zero());
        u2[zero_idx] = C::new(T::zero(), T::zero());
    }
    out
}

/// Zero every mode with |k₁| or |k₂| above the 2/3-rule bound.
pub fn dealias_in_place<T: Scalar>(grid: &SpectralGrid<T>, f: &mut SpectralField<T>) {
    grid.check_compatible(f.k_max());
    let d = grid.dealias_bound();
    let side = grid.side();
    let k = grid.k_max();
    let (u1, u2) = f.components_mut();
    for idx in 0..side * side {
        let k1 = (idx / side) as i32 - k;
        let k2 = (idx % side) as i32 - k;
        if k1.abs() > d || k2.abs() > d {
            u1[idx] = C::new(T::zero(), T::zero());
            u2[idx] = C::new(T::zero(), T::zero());
        }
    }
}

/// Dealiased copy of a field.
pub fn dealias<T: Scalar>(grid: &SpectralGrid<T>, f: &SpectralField<T>) -> SpectralField<T> {
    let mut out = f.clone();
    dealias_in_place(grid, &mut out);
    out
}

/// True when every mode beyond the 2/3-rule bound is exactly zero.
pub fn is_dealiased<T: Scalar>(grid: &SpectralGrid<T>, f: &SpectralField<T>) -> bool {
    grid.check_compatible(f.k_max());
    let d = grid.dealias_bound();
    let side = grid.side();
    let k = grid.k_max();
    for idx in 0..side * side {
        let k1 = (idx / side) as i32 - k;
        let k2 = (idx % side) as i32 - k;
        if (k1.abs() > d || k2.abs() > d)
            && (f.comp1()[idx] != C::new(T::zero(), T::zero())
                || f.comp2()[idx] != C::new(T::zero(), T::zero()))
        {
            return false;
        }
    }
    true
}

/// Round-trip spectral → collocation samples → spectral, applying the
/// dealiasing mask on return. Dealiased fields are recovered to roundoff.
pub fn transform_roundtrip<T: Scalar>(
    grid: &SpectralGrid<T>,
    f: &SpectralField<T>,
) -> Result<SpectralField<T>, SpectralError> {
    let min = 2 * grid.k_max() as usize + 1;
    if grid.collocation() < min {
        return Err(SpectralError::CollocationTooSmall { got: grid.collocation(), min });
    }
    let (pa, pb) = field_to_physical(grid, f);
    let mut out = physical_to_field(grid, &pa, &pb);
    dealias_in_place(grid, &mut out);
    Ok(out)
}
