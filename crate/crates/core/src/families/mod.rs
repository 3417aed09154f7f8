//! Six parameterized optimization families sharing one contract.
//!
//! Every family exposes a continuous path `t -> params` on `[-1, 1]` whose
//! optimizer set jumps at `t = 0`: for `t < 0` the instance lies in the
//! first region (membership verdict [`ComparisonVerdict::Below`]), for
//! `t > 0` in the second (`Above`).

mod brute;
mod channel;
mod lp;
mod nn;
mod optset;
mod portfolio;
mod sivp;
mod wasserstein;

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::computable::{compare_up_to, CReal, ComparisonVerdict, ComputeError, Precision};
use crate::rational::{pow2, Rational};

pub use brute::{hausdorff_distance, path_samples};
pub use channel::{binary_entropy, mutual_information, ChannelFamily, StochasticMatrix};
pub use lp::LpFamily;
pub use nn::{gamma_weights, nn_realize, Dataset, NnFamily, NnWeights, DATASET_SIZE};
pub use optset::{OptimizerSet, Piece, RationalPiece};
pub use portfolio::PortfolioFamily;
pub use sivp::{lattice_enumerate, EnumeratedBasis, OrderedBasis, SivpFamily};
pub use wasserstein::{catalog, wasserstein_pairing, CatalogFunction, Density, WassersteinFamily, CATALOG_SIZE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Compute(#[from] ComputeError),
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("instance belongs to family {found}, not {expected}")]
    WrongFamily { expected: FamilyName, found: FamilyName },
    #[error("instance is off the supported parameter slice: {0}")]
    Unsupported(String),
    #[error("side of the instance is still undecided at level {level}")]
    Undecided { level: u32 },
    #[error("distance between two sets that both contain continua")]
    ContinuumPair,
    #[error("norm {0} is not supported for this set")]
    UnsupportedNorm(Norm),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("resolution must be positive")]
    NonPositiveResolution,
    #[error("density does not integrate to one")]
    NotNormalized,
}

pub type Result<T, E = FamilyError> = core::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyName {
    Lp,
    Portfolio,
    Channel,
    Nn,
    Wasserstein,
    Sivp,
}

impl FamilyName {
    pub const ALL: [FamilyName; 6] = [
        FamilyName::Lp,
        FamilyName::Portfolio,
        FamilyName::Channel,
        FamilyName::Nn,
        FamilyName::Wasserstein,
        FamilyName::Sivp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyName::Lp => "lp",
            FamilyName::Portfolio => "portfolio",
            FamilyName::Channel => "channel",
            FamilyName::Nn => "nn",
            FamilyName::Wasserstein => "wasserstein",
            FamilyName::Sivp => "sivp",
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyName {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self> {
        FamilyName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

/// Norm used to measure distances between solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Linf,
    /// L2 norm on `[-1/2, 1/2]` of the piecewise-linear interpolant through
    /// equally spaced samples (first and last sample at the interval ends).
    FunctionL2,
}

impl Norm {
    pub fn as_str(self) -> &'static str {
        match self {
            Norm::L1 => "L1",
            Norm::L2 => "L2",
            Norm::Linf => "LINF",
            Norm::FunctionL2 => "L2-function",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Which of the two regions an instance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Reached by the path for `t < 0`.
    Below,
    /// Reached by the path for `t > 0`.
    Above,
}

impl Side {
    pub fn of(t: &Rational) -> Option<Side> {
        use num_traits::Signed;
        if t.is_negative() {
            Some(Side::Below)
        } else if t.is_positive() {
            Some(Side::Above)
        } else {
            None
        }
    }

    pub fn verdict(self) -> ComparisonVerdict {
        match self {
            Side::Below => ComparisonVerdict::Below,
            Side::Above => ComparisonVerdict::Above,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Below => Side::Above,
            Side::Above => Side::Below,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Side(Side),
    Boundary,
}

impl Location {
    pub fn of(t: &Rational) -> Location {
        Side::of(t).map_or(Location::Boundary, Location::Side)
    }
}

/// A point of a family's parameter space.
#[derive(Debug, Clone)]
pub struct Instance {
    pub family: FamilyName,
    pub params: Vec<CReal>,
    /// Path parameter, when the instance was produced by the path.
    pub t: Option<Rational>,
}

impl Instance {
    pub fn new(family: FamilyName, params: Vec<CReal>) -> Self {
        Self { family, params, t: None }
    }

    pub fn from_rationals(family: FamilyName, params: Vec<Rational>) -> Self {
        Self::new(family, params.into_iter().map(CReal::from_rational).collect())
    }

    /// Approximates every parameter at one level.
    pub fn approx_params(&self, level: u32) -> Result<Vec<Rational>> {
        Ok(self.params.iter().map(|p| p.approx(level)).collect::<core::result::Result<_, _>>()?)
    }
}

/// Gap constant as printed in the original derivation, when it differs in
/// kind or value from the one computed here.
#[derive(Debug, Clone)]
pub struct StatedKappa {
    pub text: &'static str,
    pub value: Option<CReal>,
}

/// Level up to which [`Family::locate`] tries to separate an instance from
/// the boundary.
pub const LOCATE_MAX_LEVEL: u32 = 256;

pub trait Family: Send + Sync {
    fn name(&self) -> FamilyName;
    fn solution_dim(&self) -> usize;
    fn param_dim(&self) -> usize;
    fn norm(&self) -> Norm;
    fn sense(&self) -> Sense;
    /// Bound on `|d params / dt|` in the max norm.
    fn path_lipschitz(&self) -> Rational;
    /// Parameters of the path instance at `t`, a digit-continuous map.
    fn path_params(&self, t: &CReal) -> Vec<CReal>;
    /// The two quantities whose order decides the region.
    fn boundary_pair(&self, params: &[CReal]) -> Result<(CReal, CReal)>;
    /// Optimizer set for an instance already known to sit at `location`.
    fn optimizers_at(&self, location: Location, params: &[CReal]) -> Result<OptimizerSet>;
    fn objective(&self, x: &[Rational], params: &[CReal]) -> Result<CReal>;
    /// Rejects instances that are off the family's parameter slice.
    fn check_slice(&self, params: &[CReal]) -> Result<()>;
    /// Grid or enumeration search returning approximate optimizers.
    fn brute_force(&self, y: &Instance, resolution: &Rational) -> Result<Vec<Vec<Rational>>>;
    fn kappa(&self) -> CReal;
    fn stated_kappa(&self) -> StatedKappa;

    /// Dimension of the space optimizer sets live in.
    fn reduced_dim(&self) -> usize {
        self.solution_dim()
    }

    /// Maps a raw solution into the space of the optimizer sets.
    fn reduce_solution(&self, x: &[Rational]) -> Vec<Rational> {
        x.to_vec()
    }

    fn path(&self, t: &Rational) -> Instance {
        Instance {
            family: self.name(),
            params: self.path_params(&CReal::from_rational(t.clone())),
            t: Some(t.clone()),
        }
    }

    fn path_creal(&self, t: &CReal) -> Instance {
        Instance { family: self.name(), params: self.path_params(t), t: t.as_rational().cloned() }
    }

    fn check_instance(&self, y: &Instance) -> Result<()> {
        if y.family != self.name() {
            return Err(FamilyError::WrongFamily { expected: self.name(), found: y.family });
        }
        check_dim(self.param_dim(), y.params.len())?;
        self.check_slice(&y.params)
    }

    fn membership(&self, y: &Instance, level: Precision) -> Result<ComparisonVerdict> {
        check_dim(self.param_dim(), y.params.len())?;
        let (lhs, rhs) = self.boundary_pair(&y.params)?;
        Ok(compare_up_to(&lhs, &rhs, level)?)
    }

    /// Region of an instance: from its path parameter when known, otherwise
    /// by membership queries at growing levels and an exact tie check.
    fn locate(&self, y: &Instance) -> Result<Location> {
        if let Some(t) = &y.t {
            return Ok(Location::of(t));
        }
        let (lhs, rhs) = self.boundary_pair(&y.params)?;
        if let (Some(a), Some(b)) = (lhs.as_rational(), rhs.as_rational()) {
            return Ok(match a.cmp(b) {
                core::cmp::Ordering::Less => Location::Side(Side::Below),
                core::cmp::Ordering::Greater => Location::Side(Side::Above),
                core::cmp::Ordering::Equal => Location::Boundary,
            });
        }
        let mut level = 8;
        while level <= LOCATE_MAX_LEVEL {
            match compare_up_to(&lhs, &rhs, level)? {
                ComparisonVerdict::Below => return Ok(Location::Side(Side::Below)),
                ComparisonVerdict::Above => return Ok(Location::Side(Side::Above)),
                ComparisonVerdict::Unknown => level *= 2,
            }
        }
        Err(FamilyError::Undecided { level: LOCATE_MAX_LEVEL })
    }

    fn optimizers(&self, y: &Instance) -> Result<OptimizerSet> {
        self.check_instance(y)?;
        let location = self.locate(y)?;
        self.optimizers_at(location, &y.params)
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(FamilyError::DimensionMismatch { expected, got })
    }
}

/// Compares each parameter with a fixed template entry where one is given.
pub(crate) fn check_template(params: &[CReal], template: &[Option<Rational>]) -> Result<()> {
    use num_traits::Signed;
    check_dim(template.len(), params.len())?;
    for (i, (p, want)) in params.iter().zip(template).enumerate() {
        let Some(want) = want else { continue };
        let ok = match p.as_rational() {
            Some(q) => q == want,
            None => (p.approx(40)? - want).abs() <= pow2(-38),
        };
        if !ok {
            return Err(FamilyError::Unsupported(alloc::format!("parameter {i} must equal {want}")));
        }
    }
    Ok(())
}

pub(crate) fn exact_point(v: &[Rational]) -> Vec<CReal> {
    v.iter().cloned().map(CReal::from_rational).collect()
}

/// Default-configured family by name.
pub fn family(name: FamilyName) -> Box<dyn Family> {
    match name {
        FamilyName::Lp => Box::new(LpFamily),
        FamilyName::Portfolio => Box::new(PortfolioFamily::default()),
        FamilyName::Channel => Box::new(ChannelFamily::default()),
        FamilyName::Nn => Box::new(NnFamily::default()),
        FamilyName::Wasserstein => Box::new(WassersteinFamily),
        FamilyName::Sivp => Box::new(SivpFamily),
    }
}

pub fn all_families() -> Vec<Box<dyn Family>> {
    FamilyName::ALL.into_iter().map(family).collect()
}
