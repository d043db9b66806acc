//! Binary kernel cache.
//!
//! Layout (little-endian): magic `RGFK`, version `u16`, `d u8`, `L u8`,
//! `N u8`, `j u8`, `m² f64`, `degree u32`, `count u64`, then `count`
//! records of `d × i32` offset coordinates followed by an `f64` value.
//! Offsets are fully expanded (one record per lattice offset) and
//! sorted lexicographically, so a rebuild is byte-identical.

use super::stencil::KernelStencil;
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub const MAGIC: &[u8; 4] = b"RGFK";
pub const VERSION: u16 = 1;

/// Expand a canonical orbit into all of its lattice offsets.
fn expand_orbit(c: &[i32]) -> Vec<Vec<i32>> {
    // distinct permutations
    let mut perms: Vec<Vec<i32>> = Vec::new();
    let mut sorted = c.to_vec();
    sorted.sort_unstable();
    // Heap-style unique permutation enumeration via next_permutation
    loop {
        perms.push(sorted.clone());
        // next lexicographic permutation
        let n = sorted.len();
        let mut i = n.wrapping_sub(1);
        while i > 0 && sorted[i - 1] >= sorted[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while sorted[j] <= sorted[i - 1] {
            j -= 1;
        }
        sorted.swap(i - 1, j);
        sorted[i..].reverse();
    }
    // sign choices on nonzero coordinates
    let mut out = Vec::new();
    for p in perms {
        let nz: Vec<usize> = (0..p.len()).filter(|&i| p[i] != 0).collect();
        for mask in 0..(1u32 << nz.len()) {
            let mut q = p.clone();
            for (bit, &idx) in nz.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    q[idx] = -q[idx];
                }
            }
            out.push(q);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn write_kernel(
    path: &Path,
    d: u8,
    base: u8,
    n_scales: u8,
    j: u8,
    mass2: f64,
    degree: u32,
    kernel: &KernelStencil,
) -> Result<()> {
    let mut records: Vec<(Vec<i32>, f64)> = Vec::new();
    for (c, _, v) in kernel.orbits() {
        for z in expand_orbit(c) {
            records.push((z, v));
        }
    }
    records.sort_by(|a, b| a.0.cmp(&b.0));
    let mut buf: Vec<u8> = Vec::with_capacity(24 + records.len() * (4 * d as usize + 8));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(d);
    buf.push(base);
    buf.push(n_scales);
    buf.push(j);
    buf.extend_from_slice(&mass2.to_le_bytes());
    buf.extend_from_slice(&degree.to_le_bytes());
    buf.extend_from_slice(&(records.len() as u64).to_le_bytes());
    for (z, v) in &records {
        for &c in z {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    std::fs::File::create(&tmp)?.write_all(&buf)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub struct CachedKernel {
    pub d: u8,
    pub base: u8,
    pub n_scales: u8,
    pub j: u8,
    pub mass2: f64,
    pub degree: u32,
    pub kernel: KernelStencil,
}

pub fn read_kernel(path: &Path) -> Result<CachedKernel> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    let fail = |m: &str| Error::CacheFormat(format!("{}: {m}", path.display()));
    if buf.len() < 28 || &buf[0..4] != MAGIC {
        return Err(fail("bad magic"));
    }
    let version = u16::from_le_bytes([buf[4], buf[5]]);
    if version != VERSION {
        return Err(fail(&format!("unsupported version {version}")));
    }
    let d = buf[6];
    let base = buf[7];
    let n_scales = buf[8];
    let j = buf[9];
    let mass2 = f64::from_le_bytes(buf[10..18].try_into().unwrap());
    let degree = u32::from_le_bytes(buf[18..22].try_into().unwrap());
    let count = u64::from_le_bytes(buf[22..30].try_into().unwrap()) as usize;
    let rec = 4 * d as usize + 8;
    if buf.len() != 30 + count * rec {
        return Err(fail("truncated records"));
    }
    let mut map = HashMap::new();
    for r in 0..count {
        let off = 30 + r * rec;
        let z: Vec<i64> = (0..d as usize)
            .map(|i| {
                i32::from_le_bytes(buf[off + 4 * i..off + 4 * i + 4].try_into().unwrap()) as i64
            })
            .collect();
        let v = f64::from_le_bytes(buf[off + 4 * d as usize..off + rec].try_into().unwrap());
        map.insert(super::stencil::canonicalise(&z), v);
    }
    let kernel = KernelStencil::from_canonical(d as usize, degree as i64 + 1, map);
    Ok(CachedKernel {
        d,
        base,
        n_scales,
        j,
        mass2,
        degree,
        kernel,
    })
}

/// Deterministic cache filename for a kernel slice.
pub fn kernel_cache_path(
    dir: &Path,
    d: usize,
    base: usize,
    n_scales: usize,
    j: usize,
    mass2: f64,
    anchor: f64,
) -> PathBuf {
    dir.join(format!(
        "rgfk_d{d}_L{base}_N{n_scales}_j{j}_m{}_a{}.bin",
        format_args!("{:.9e}", mass2),
        format_args!("{:.3e}", anchor),
    ))
}
