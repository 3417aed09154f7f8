use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{FamilyError, Norm, Result};
use crate::computable::{CReal, StepMeter};
use crate::rational::{int, rat, sqrt_floor, Rational};

#[derive(Debug, Clone)]
pub enum Piece {
    Point(Vec<CReal>),
    Segment(Vec<CReal>, Vec<CReal>),
    /// Affine subspace: the listed coordinates are fixed, all others free.
    Flat { fixed: Vec<(usize, CReal)> },
}

/// A [`Piece`] with every coordinate materialized as a rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalPiece {
    Point(Vec<Rational>),
    Segment(Vec<Rational>, Vec<Rational>),
    Flat { fixed: Vec<(usize, Rational)> },
}

/// Finite union of points, segments and coordinate flats.
#[derive(Debug, Clone)]
pub struct OptimizerSet {
    dim: usize,
    pieces: Vec<Piece>,
}

impl OptimizerSet {
    pub fn new(dim: usize, pieces: Vec<Piece>) -> Self {
        debug_assert!(!pieces.is_empty());
        Self { dim, pieces }
    }

    pub fn points(dim: usize, points: Vec<Vec<CReal>>) -> Self {
        Self::new(dim, points.into_iter().map(Piece::Point).collect())
    }

    pub fn rational_points(points: Vec<Vec<Rational>>) -> Self {
        let dim = points.first().map_or(0, Vec::len);
        Self::points(dim, points.into_iter().map(|p| super::exact_point(&p)).collect())
    }

    pub fn segment(a: Vec<CReal>, b: Vec<CReal>) -> Self {
        Self::new(a.len(), vec![Piece::Segment(a, b)])
    }

    pub fn union(mut self, other: OptimizerSet) -> Self {
        self.pieces.extend(other.pieces);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_finite(&self) -> bool {
        self.pieces.iter().all(|p| matches!(p, Piece::Point(_)))
    }

    pub fn has_flat(&self) -> bool {
        self.pieces.iter().any(|p| matches!(p, Piece::Flat { .. }))
    }

    /// One concrete element of the set.
    pub fn representative(&self) -> Vec<CReal> {
        match &self.pieces[0] {
            Piece::Point(p) | Piece::Segment(p, _) => p.clone(),
            Piece::Flat { fixed } => {
                let mut v = vec![CReal::zero(); self.dim];
                for (i, c) in fixed {
                    v[*i] = c.clone();
                }
                v
            }
        }
    }

    pub fn materialize(&self, level: u32) -> Result<Vec<RationalPiece>> {
        let mut meter = StepMeter::with_global_budget();
        materialize(&self.pieces, level, &mut meter)
    }

    /// Points of the set at `level`; segments contribute `per_segment`
    /// equally spaced points, flats nothing.
    pub fn sample_points(&self, level: u32, per_segment: usize) -> Result<Vec<Vec<Rational>>> {
        let mut out = Vec::new();
        for piece in self.materialize(level)? {
            match piece {
                RationalPiece::Point(p) => out.push(p),
                RationalPiece::Segment(a, b) => {
                    let steps = per_segment.max(2) - 1;
                    for i in 0..=steps {
                        let s = rat(i as i64, steps as i64);
                        out.push(a.iter().zip(&b).map(|(x, y)| x + (y - x) * &s).collect());
                    }
                }
                RationalPiece::Flat { .. } => {}
            }
        }
        Ok(out)
    }

    pub fn distance_to(&self, x: &[CReal], norm: Norm) -> Result<CReal> {
        super::check_dim(self.dim, x.len())?;
        self.check_norm(norm)?;
        Ok(min_distance(vec![x.to_vec()], self.pieces.clone(), norm, self.dim))
    }

    pub fn distance_to_rational(&self, x: &[Rational], norm: Norm) -> Result<CReal> {
        self.distance_to(&super::exact_point(x), norm)
    }

    /// Infimum distance between the sets; one of them must be finite.
    pub fn set_distance(&self, other: &OptimizerSet, norm: Norm) -> Result<CReal> {
        super::check_dim(self.dim, other.dim)?;
        let (finite, rest) = if self.is_finite() {
            (self, other)
        } else if other.is_finite() {
            (other, self)
        } else {
            return Err(FamilyError::ContinuumPair);
        };
        rest.check_norm(norm)?;
        let points = finite
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Point(v) => v.clone(),
                _ => unreachable!("finite sets hold points only"),
            })
            .collect();
        Ok(min_distance(points, rest.pieces.clone(), norm, self.dim))
    }

    fn check_norm(&self, norm: Norm) -> Result<()> {
        if norm == Norm::FunctionL2 && (self.has_flat() || self.dim < 2) {
            return Err(FamilyError::UnsupportedNorm(norm));
        }
        Ok(())
    }
}

fn materialize(pieces: &[Piece], level: u32, meter: &mut StepMeter) -> Result<Vec<RationalPiece>> {
    let vec_at = |v: &[CReal], meter: &mut StepMeter| -> Result<Vec<Rational>> {
        Ok(v.iter().map(|c| c.approx_with(level, meter)).collect::<core::result::Result<_, _>>()?)
    };
    pieces
        .iter()
        .map(|p| {
            Ok(match p {
                Piece::Point(v) => RationalPiece::Point(vec_at(v, meter)?),
                Piece::Segment(a, b) => RationalPiece::Segment(vec_at(a, meter)?, vec_at(b, meter)?),
                Piece::Flat { fixed } => RationalPiece::Flat {
                    fixed: fixed
                        .iter()
                        .map(|(i, c)| Ok((*i, c.approx_with(level, meter)?)))
                        .collect::<Result<_>>()?,
                },
            })
        })
        .collect()
}

fn is_quadratic(norm: Norm) -> bool {
    matches!(norm, Norm::L2 | Norm::FunctionL2)
}

fn all_exact(points: &[Vec<CReal>], pieces: &[Piece]) -> bool {
    let vec_exact = |v: &[CReal]| v.iter().all(CReal::is_exact);
    points.iter().all(|p| vec_exact(p))
        && pieces.iter().all(|p| match p {
            Piece::Point(v) => vec_exact(v),
            Piece::Segment(a, b) => vec_exact(a) && vec_exact(b),
            Piece::Flat { fixed } => fixed.iter().all(|(_, c)| c.is_exact()),
        })
}

fn min_raw(points: &[Vec<Rational>], pieces: &[RationalPiece], norm: Norm) -> Rational {
    points
        .iter()
        .flat_map(|x| pieces.iter().map(move |p| raw_distance(x, p, norm)))
        .min()
        .expect("optimizer sets are nonempty")
}

fn min_distance(points: Vec<Vec<CReal>>, pieces: Vec<Piece>, norm: Norm, dim: usize) -> CReal {
    if all_exact(&points, &pieces) {
        let mut meter = StepMeter::new(u64::MAX);
        let xs: Vec<Vec<Rational>> =
            points.iter().map(|p| p.iter().map(|c| c.as_rational().unwrap().clone()).collect()).collect();
        let set = materialize(&pieces, 0, &mut meter).expect("exact coordinates");
        let raw = CReal::from_rational(min_raw(&xs, &set, norm));
        return if is_quadratic(norm) { raw.sqrt_nonneg() } else { raw };
    }
    let dim_bits = usize::BITS - dim.max(1).saturating_sub(1).leading_zeros();
    CReal::from_fn(move |n, meter| {
        let level = n + dim_bits + 5;
        let xs = points
            .iter()
            .map(|p| p.iter().map(|c| c.approx_with(level, meter)).collect::<core::result::Result<Vec<_>, _>>())
            .collect::<core::result::Result<Vec<_>, _>>()?;
        let set = materialize(&pieces, level, meter).map_err(|e| match e {
            FamilyError::Compute(c) => c,
            _ => unreachable!("materializing only approximates"),
        })?;
        meter.tick((xs.len() * set.len()) as u64)?;
        let raw = min_raw(&xs, &set, norm);
        Ok(if is_quadratic(norm) { sqrt_floor(&raw, n + 2) } else { raw })
    })
}

/// Norm of `v`, squared for the quadratic norms.
pub(crate) fn raw_norm(v: &[Rational], norm: Norm) -> Rational {
    match norm {
        Norm::L1 => v.iter().map(|x| x.abs()).sum(),
        Norm::Linf => v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero),
        Norm::L2 | Norm::FunctionL2 => inner(v, v, norm),
    }
}

fn inner(u: &[Rational], v: &[Rational], norm: Norm) -> Rational {
    match norm {
        Norm::FunctionL2 => {
            // exact integral of the product of two piecewise-linear interpolants
            let h = rat(1, (u.len() - 1) as i64);
            let mut acc = Rational::zero();
            for i in 0..u.len() - 1 {
                let (a0, a1, b0, b1) = (&u[i], &u[i + 1], &v[i], &v[i + 1]);
                acc += int(2) * a0 * b0 + a0 * b1 + a1 * b0 + int(2) * a1 * b1;
            }
            acc * h / int(6)
        }
        _ => u.iter().zip(v).map(|(a, b)| a * b).sum(),
    }
}

fn raw_distance(x: &[Rational], piece: &RationalPiece, norm: Norm) -> Rational {
    match piece {
        RationalPiece::Point(p) => {
            let diff: Vec<Rational> = x.iter().zip(p).map(|(a, b)| a - b).collect();
            raw_norm(&diff, norm)
        }
        RationalPiece::Flat { fixed } => {
            let diff: Vec<Rational> = fixed.iter().map(|(i, c)| &x[*i] - c).collect();
            raw_norm(&diff, norm)
        }
        RationalPiece::Segment(a, b) => {
            let r: Vec<Rational> = x.iter().zip(a).map(|(p, q)| p - q).collect();
            let d: Vec<Rational> = b.iter().zip(a).map(|(p, q)| p - q).collect();
            let at = |s: &Rational| -> Rational {
                let v: Vec<Rational> = r.iter().zip(&d).map(|(ri, di)| ri - di * s).collect();
                raw_norm(&v, norm)
            };
            if is_quadratic(norm) {
                let dd = inner(&d, &d, norm);
                let s = if dd.is_zero() { Rational::zero() } else { clamp01(inner(&r, &d, norm) / dd) };
                return at(&s);
            }
            // convex piecewise-linear in s: the minimum sits at a breakpoint
            let mut candidates = vec![Rational::zero(), Rational::one()];
            for i in 0..r.len() {
                for j in i..r.len() {
                    let sum = &d[i] + &d[j];
                    if !sum.is_zero() {
                        candidates.push((&r[i] + &r[j]) / sum);
                    }
                    if norm == Norm::Linf && i != j {
                        let diff = &d[i] - &d[j];
                        if !diff.is_zero() {
                            candidates.push((&r[i] - &r[j]) / diff);
                        }
                    }
                }
            }
            candidates.into_iter().map(clamp01).map(|s| at(&s)).min().expect("nonempty")
        }
    }
}

fn clamp01(s: Rational) -> Rational {
    if s.is_negative() {
        Rational::zero()
    } else if s > Rational::one() {
        Rational::one()
    } else {
        s
    }
}
