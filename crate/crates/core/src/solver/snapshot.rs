//! Binary velocity snapshots.
//!
//! Layout, all little-endian: the magic `RGW1`, `n` as `u32`, the time as `f64`,
//! then the x, y and z components, each `n³` `f64` samples in x-fastest order.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{ScalarField, VectorField};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"RGW1";

/// Largest grid accepted when reading, a guard against absurd allocations from corrupt headers.
const MAX_SNAPSHOT_N: u32 = 4096;

pub fn write_snapshot<T: Real, W: Write>(mut out: W, time: T, velocity: &VectorField<T>) -> Result<()> {
    let n = u32::try_from(velocity.n()).map_err(|_| Error::Format("grid too large for a snapshot".into()))?;
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&time.as_f64().to_le_bytes())?;
    let mut buf = Vec::with_capacity(velocity.len() * 8);
    for c in &velocity.comps {
        buf.clear();
        for x in c.values() {
            buf.extend_from_slice(&x.as_f64().to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one snapshot, returning `(time, velocity)`.
pub fn read_snapshot<T: Real, R: Read>(mut input: R) -> Result<(T, VectorField<T>)> {
    let mut head = [0u8; 16];
    input
        .read_exact(&mut head)
        .map_err(|e| Error::Format(format!("truncated snapshot header: {e}")))?;
    if &head[..4] != SNAPSHOT_MAGIC {
        return Err(Error::Format(format!("bad snapshot magic {:?}", &head[..4])));
    }
    let n = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes"));
    if n == 0 || n > MAX_SNAPSHOT_N {
        return Err(Error::Format(format!("implausible snapshot grid size {n}")));
    }
    let time = f64::from_le_bytes(head[8..16].try_into().expect("8 bytes"));
    if !time.is_finite() {
        return Err(Error::Format("non-finite snapshot time".into()));
    }
    let n = n as usize;
    let count = n * n * n;
    let mut bytes = vec![0u8; count * 8];
    let mut comp = |_: usize| -> Result<ScalarField<T>> {
        input
            .read_exact(&mut bytes)
            .map_err(|e| Error::Format(format!("truncated snapshot body: {e}")))?;
        let data = bytes
            .chunks_exact(8)
            .map(|b| T::lit(f64::from_le_bytes(b.try_into().expect("8 bytes"))))
            .collect();
        ScalarField::from_vec(n, data)
    };
    let comps = [comp(0)?, comp(1)?, comp(2)?];
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after snapshot body".into()));
    }
    Ok((T::lit(time), VectorField::from_components(comps)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(n: usize) -> VectorField<f64> {
        VectorField::from_fn(n, |x: f64, y: f64, z: f64| [x.sin() * y.cos(), z + 0.5, (x * y).cos() * 1e-300])
    }

    #[test]
    fn round_trip_is_bitwise() {
        let v = field(4);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, 0.125, &v).unwrap();
        assert_eq!(buf.len(), 16 + 3 * 64 * 8);
        assert_eq!(&buf[..4], b"RGW1");
        assert_eq!(&buf[4..8], &4u32.to_le_bytes());
        let (t, back) = read_snapshot::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(t, 0.125);
        assert_eq!(back, v);
        // x-fastest: second stored value of the x component is the sample at i = 1
        let second = f64::from_le_bytes(buf[24..32].try_into().unwrap());
        assert_eq!(second, v.comps[0].at(1, 0, 0));
    }

    #[test]
    fn corrupt_input_is_a_format_error() {
        let mut buf = Vec::new();
        write_snapshot(&mut buf, 1.0, &field(4)).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_snapshot::<f64, _>(bad.as_slice()), Err(Error::Format(_))));
        assert!(matches!(read_snapshot::<f64, _>(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(read_snapshot::<f64, _>(long.as_slice()), Err(Error::Format(_))));
        let mut huge = buf;
        huge[4..8].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(read_snapshot::<f64, _>(huge.as_slice()), Err(Error::Format(_))));
    }
}
