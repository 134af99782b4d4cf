//! Binary dump and restore of path ensembles, for reproducibility debugging.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic "NLSNENS\0" | version u32 | t_horizon f64 | n_steps u64 | tau f64
//! | n_particles u64 | n_paths u64 | seed u64 | stream u64
//! | lineage_len u64 | (seed u64, stream u64) * lineage_len | positions f64 *
//! ```

use std::io::{Read, Write};

use nelson_core::paths::{PathEnsemble, TimeGrid};
use nelson_core::rng::RngSpec;

use crate::error::{LabError, Result};

const MAGIC: &[u8; 8] = b"NLSNENS\0";
const VERSION: u32 = 1;

pub fn write_ensemble(w: &mut impl Write, ens: &PathEnsemble) -> std::io::Result<()> {
    let g = ens.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&g.t_horizon.to_le_bytes())?;
    w.write_all(&(g.n_steps as u64).to_le_bytes())?;
    w.write_all(&g.tau.to_le_bytes())?;
    w.write_all(&(ens.n_particles() as u64).to_le_bytes())?;
    w.write_all(&(ens.n_paths() as u64).to_le_bytes())?;
    let r = ens.rng_spec();
    w.write_all(&r.seed.to_le_bytes())?;
    w.write_all(&r.stream_id.to_le_bytes())?;
    w.write_all(&(ens.lineage().len() as u64).to_le_bytes())?;
    for l in ens.lineage() {
        w.write_all(&l.seed.to_le_bytes())?;
        w.write_all(&l.stream_id.to_le_bytes())?;
    }
    for v in ens.positions() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn take<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| LabError::Format(e.to_string()))?;
    Ok(b)
}

fn u64_of(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(take::<8>(r)?))
}

fn f64_of(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_le_bytes(take::<8>(r)?))
}

pub fn read_ensemble(r: &mut impl Read) -> Result<PathEnsemble> {
    if &take::<8>(r)? != MAGIC {
        return Err(LabError::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(take::<4>(r)?);
    if version != VERSION {
        return Err(LabError::Format(format!("unsupported version {version}")));
    }
    let t_horizon = f64_of(r)?;
    let n_steps = u64_of(r)? as usize;
    let tau = f64_of(r)?;
    let n_particles = u64_of(r)? as usize;
    let n_paths = u64_of(r)? as usize;
    let rng = RngSpec::new(u64_of(r)?, u64_of(r)?);
    let n_lineage = u64_of(r)? as usize;
    let mut lineage = Vec::with_capacity(n_lineage.min(64));
    for _ in 0..n_lineage {
        lineage.push(RngSpec::new(u64_of(r)?, u64_of(r)?));
    }
    let grid = TimeGrid::new(t_horizon, n_steps, tau)?;
    let count = n_paths
        .checked_mul((n_steps + 1) * n_particles * 3)
        .ok_or_else(|| LabError::Format("size overflow".into()))?;
    let mut positions = Vec::with_capacity(count);
    for _ in 0..count {
        positions.push(f64_of(r)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(|e| LabError::Format(e.to_string()))? != 0 {
        return Err(LabError::Format("trailing bytes".into()));
    }
    Ok(PathEnsemble::from_positions(grid, n_particles, positions, rng, lineage)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nelson_core::exec::Sequential;
    use nelson_core::paths::{refine, sample_ensemble};

    #[test]
    fn round_trip_is_exact() {
        let grid = TimeGrid::new(0.5, 4, 0.5).unwrap();
        let ens = sample_ensemble(&grid, &[vec![0.0, 1.0, 2.0]], 3, RngSpec::new(5, 1), &Sequential).unwrap();
        let ens = refine(&ens, RngSpec::new(6, 0), &Sequential).unwrap();
        let mut buf = Vec::new();
        write_ensemble(&mut buf, &ens).unwrap();
        let back = read_ensemble(&mut buf.as_slice()).unwrap();
        assert_eq!(back, ens);
        buf.push(0);
        assert!(read_ensemble(&mut buf.as_slice()).is_err());
    }
}
