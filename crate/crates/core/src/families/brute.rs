//! Shared pieces of the grid and enumeration searches.

use alloc::vec::Vec;

use num_traits::{Signed, ToPrimitive};

use super::optset::raw_norm;
use super::{FamilyError, Norm, OptimizerSet, Result};
use crate::rational::{int, rat, to_f64, Rational};

/// Path parameters `±j/per_side` for `j = 1..=per_side`, negatives first.
pub fn path_samples(per_side: usize) -> Vec<Rational> {
    let n = per_side as i64;
    (1..=n).rev().map(|j| rat(-j, n)).chain((1..=n).map(|j| rat(j, n))).collect()
}

/// Number of grid steps per unit length.
pub(crate) fn unit_steps(resolution: &Rational) -> Result<u32> {
    if !resolution.is_positive() {
        return Err(FamilyError::NonPositiveResolution);
    }
    Ok((int(1) / resolution).floor().to_u32().unwrap_or(u32::MAX).max(1))
}

/// All ways to write `steps` as an ordered sum of `dim` nonnegative parts.
pub(crate) fn simplex_grid(dim: usize, steps: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if dim == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(dim - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, steps, &mut Vec::with_capacity(dim), &mut out);
    out
}

pub(crate) fn grid_point(parts: &[u32], steps: u32) -> Vec<Rational> {
    parts.iter().map(|&k| rat(k as i64, steps as i64)).collect()
}

/// Indices whose value is within `tol` of the maximum.
pub(crate) fn near_max(values: &[f64], tol: f64) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..values.len()).filter(|&i| values[i] >= best - tol).collect()
}

/// Hausdorff distance, in `norm`, between an optimizer set and a finite
/// point cloud. Segments are sampled at 257 points; flats only enter the
/// cloud-to-set direction.
pub fn hausdorff_distance(set: &OptimizerSet, cloud: &[Vec<Rational>], norm: Norm) -> Result<f64> {
    if cloud.is_empty() {
        return Ok(f64::INFINITY);
    }
    let finish = |raw: &Rational| {
        let v = to_f64(raw);
        if matches!(norm, Norm::L2 | Norm::FunctionL2) {
            libm::sqrt(v)
        } else {
            v
        }
    };
    let mut worst: f64 = 0.0;
    for p in cloud {
        let d = set.distance_to_rational(p, norm)?.approx(40)?;
        worst = worst.max(to_f64(&d));
    }
    for s in set.sample_points(48, 257)? {
        let nearest = cloud
            .iter()
            .map(|p| {
                let diff: Vec<Rational> = s.iter().zip(p).map(|(a, b)| a - b).collect();
                raw_norm(&diff, norm)
            })
            .min()
            .expect("nonempty cloud");
        worst = worst.max(finish(&nearest));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::computable::CReal;

    #[test]
    fn samples_are_symmetric_and_skip_zero() {
        let s = path_samples(16);
        assert_eq!(s.len(), 32);
        assert_eq!(s[0], int(-1));
        assert_eq!(s[31], int(1));
        assert!(s.iter().all(|t| !num_traits::Zero::is_zero(t)));
    }

    #[test]
    fn simplex_grid_counts() {
        assert_eq!(simplex_grid(2, 4).len(), 5);
        assert_eq!(simplex_grid(3, 4).len(), 15);
        assert!(simplex_grid(3, 4).iter().all(|p| p.iter().sum::<u32>() == 4));
    }

    #[test]
    fn hausdorff_of_segment_and_its_grid() {
        let seg = OptimizerSet::segment(vec![CReal::zero(), CReal::zero()], vec![CReal::one(), CReal::zero()]);
        let cloud: Vec<Vec<Rational>> = (0..=8).map(|i| vec![rat(i, 8), int(0)]).collect();
        let h = hausdorff_distance(&seg, &cloud, Norm::L2).unwrap();
        assert!(h <= 1.0 / 16.0 + 1e-12);
        let h = hausdorff_distance(&seg, &cloud[..1], Norm::L2).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
    }
}
