//! Binary field snapshots.
//!
//! Layout (little-endian): magic `G2SF`, format version `u8`, lattice bound K
//! as `u32`, then for every lattice wavevector with k₁ ≥ 0 (the Hermitian
//! half, row-major, k = 0 skipped) four `f64`s: Re û₁, Im û₁, Re û₂, Im û₂.
//! The k₁ < 0 half is reconstructed by conjugation on read, so round-trips
//! are bitwise for Hermitian fields.

use crate::field::SpectralField;
use crate::{real, Scalar, SpectralError, C};
use std::io::{Read, Write};

const MAGIC: [u8; 4] = *b"G2SF";
const VERSION: u8 = 1;

/// Serialize a field. The stored half-lattice order is k₁ = 0..K outer,
/// k₂ = −K..K inner, skipping (0, 0).
pub fn write_g2sf<T: Scalar, W: Write>(
    f: &SpectralField<T>,
    out: &mut W,
) -> Result<(), SpectralError> {
    out.write_all(&MAGIC)?;
    out.write_all(&[VERSION])?;
    out.write_all(&(f.k_max() as u32).to_le_bytes())?;
    let k = f.k_max();
    let mut buf = [0u8; 32];
    for k1 in 0..=k {
        for k2 in -k..=k {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let (v1, v2) = f.get(k1, k2);
            for (slot, x) in [v1.re, v1.im, v2.re, v2.im].into_iter().enumerate() {
                let x64 = x.to_f64().ok_or_else(|| {
                    SpectralError::Snapshot(format!("non-representable value at k=({k1},{k2})"))
                })?;
                buf[8 * slot..8 * (slot + 1)].copy_from_slice(&x64.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
    }
    Ok(())
}

/// Deserialize a field, mirroring the stored half onto k₁ < 0 by conjugation
/// and checking that the stored k₁ = 0 line is itself Hermitian-consistent.
pub fn read_g2sf<T: Scalar, R: Read>(input: &mut R) -> Result<SpectralField<T>, SpectralError> {
    let mut head = [0u8; 9];
    input.read_exact(&mut head)?;
    if head[0..4] != MAGIC {
        return Err(SpectralError::Snapshot(format!(
            "bad magic bytes {:?}, expected \"G2SF\"",
            &head[0..4]
        )));
    }
    if head[4] != VERSION {
        return Err(SpectralError::Snapshot(format!(
            "unsupported format version {}, expected {VERSION}",
            head[4]
        )));
    }
    let k = u32::from_le_bytes(head[5..9].try_into().expect("slice of length 4")) as i64;
    if !(2..=4096).contains(&k) {
        return Err(SpectralError::Snapshot(format!("lattice bound K = {k} out of range")));
    }
    let k = k as i32;

    let mut f = SpectralField::<T>::zeros(k);
    let mut buf = [0u8; 32];
    for k1 in 0..=k {
        for k2 in -k..=k {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            input.read_exact(&mut buf).map_err(|e| {
                SpectralError::Snapshot(format!("truncated at k=({k1},{k2}): {e}"))
            })?;
            let mut x = [0f64; 4];
            for (slot, v) in x.iter_mut().enumerate() {
                *v = f64::from_le_bytes(
                    buf[8 * slot..8 * (slot + 1)].try_into().expect("slice of length 8"),
                );
                if !v.is_finite() {
                    return Err(SpectralError::Snapshot(format!(
                        "non-finite coefficient at k=({k1},{k2})"
                    )));
                }
            }
            let v1 = C::new(real::<T>(x[0]), real::<T>(x[1]));
            let v2 = C::new(real::<T>(x[2]), real::<T>(x[3]));
            f.set(k1, k2, v1, v2);
            if k1 > 0 {
                f.set(-k1, -k2, v1.conj(), v2.conj());
            }
        }
    }

    // The stored k₁ = 0 line carries both halves; they must agree.
    let tol = real::<T>(1e-12);
    for k2 in 1..=k {
        let (a1, a2) = f.get(0, k2);
        let (b1, b2) = f.get(0, -k2);
        let dev = ((a1 - b1.conj()).norm_sqr() + (a2 - b2.conj()).norm_sqr()).sqrt();
        let scale = T::one().max((a1.norm_sqr() + a2.norm_sqr()).sqrt());
        if dev > tol * scale {
            return Err(SpectralError::Snapshot(format!(
                "k₁ = 0 line breaks Hermitian symmetry at k₂ = {k2} (deviation {dev:e})"
            )));
        }
    }
    Ok(f)
}
