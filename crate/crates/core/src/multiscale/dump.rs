//! Debug export of coefficient sets, one raw-float file per subband.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::image::write_raw;

use super::contourlet::ContourletCoeffs;
use super::dwt::WaveletPyramid;

/// Writes `wavelet_approx.rawf` and `wavelet_j{j}_{lh,hl,hh}.rawf`
/// (`j = 0` coarsest). Returns the written paths.
pub fn dump_wavelet(pyr: &WaveletPyramid, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut out = vec![dir.join("wavelet_approx.rawf")];
    write_raw(&pyr.approx, &out[0])?;
    for j in 0..pyr.levels {
        let d = pyr.scale(j);
        for (name, band) in [("lh", &d.lh), ("hl", &d.hl), ("hh", &d.hh)] {
            let path = dir.join(format!("wavelet_j{j}_{name}.rawf"));
            write_raw(band, &path)?;
            out.push(path);
        }
    }
    Ok(out)
}

/// Writes `contourlet_coarse.rawf` and `contourlet_j{j}_k{k}.rawf`
/// (`j = 0` coarsest, `k` the orientation index).
pub fn dump_contourlet(c: &ContourletCoeffs, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut out = vec![dir.join("contourlet_coarse.rawf")];
    write_raw(&c.coarse, &out[0])?;
    for j in 0..c.levels {
        for (k, band) in c.scale(j).iter().enumerate() {
            let path = dir.join(format!("contourlet_j{j}_k{k}.rawf"));
            write_raw(band, &path)?;
            out.push(path);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{read_raw, Image};
    use crate::multiscale::{contourlet_forward, dwt2_forward, FilterSpec};

    #[test]
    fn dumps_one_file_per_subband() {
        let dir = tempfile::tempdir().unwrap();
        let f = Image::from_fn(32, 32, |i, j| (i ^ j) as f64);
        let spec = FilterSpec::default();
        let pyr = dwt2_forward(&f, 2, &spec).unwrap();
        let files = dump_wavelet(&pyr, dir.path()).unwrap();
        assert_eq!(files.len(), 1 + 2 * 3);
        assert_eq!(read_raw(dir.path().join("wavelet_j1_hh.rawf")).unwrap(), pyr.details[0].hh);
        let c = contourlet_forward(&f, 2, &[4, 2], &spec).unwrap();
        let files = dump_contourlet(&c, dir.path()).unwrap();
        assert_eq!(files.len(), 1 + 4 + 2);
        assert_eq!(read_raw(dir.path().join("contourlet_j0_k3.rawf")).unwrap(), c.scale(0)[3]);
    }
}
