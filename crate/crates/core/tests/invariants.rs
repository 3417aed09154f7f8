use num_traits::Signed;
use optgap_core::adversary::{bisect_path, fool_solver, threshold_decide, BisectionState, FoolingConfig};
use optgap_core::computable::{CReal, ComparisonVerdict, DigitOracle, Precision};
use optgap_core::families::{
    catalog, family, gamma_weights, mutual_information, binary_entropy, wasserstein_pairing, ChannelFamily, Dataset,
    Density, Family, FamilyName, LpFamily, NnWeights, PortfolioFamily, Side, StochasticMatrix, WassersteinFamily,
};
use optgap_core::rational::{int, pow2, rat, to_f64, Rational};
use optgap_core::solvers::{
    blahut_arimoto_trace, cover_portfolio_trace, nn_gd_trace, round_simplex, ArgmaxSolver, GradientDescentSolver,
    IterationTrace, LpVertexSolver,
};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..5_000).prop_map(|(n, d)| rat(n, d))
}

fn path_parameter() -> impl Strategy<Value = Rational> {
    (1i64..1000, any::<bool>()).prop_map(|(n, neg)| if neg { rat(-n, 1000) } else { rat(n, 1000) })
}

fn family_name() -> impl Strategy<Value = FamilyName> {
    prop::sample::select(FamilyName::ALL.to_vec())
}

fn w_star() -> StochasticMatrix {
    StochasticMatrix::new(2, 3, [1, 0, 0, 0, 1, 1].map(int).to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_replay_is_bit_identical(
        values in prop::collection::vec(small_rational(), 1..5),
        queries in prop::collection::vec((0usize..5, 0u32..80), 1..12),
    ) {
        let sources: Vec<CReal> = values.iter().map(|v| CReal::from_rational(v.abs()).sqrt_nonneg()).collect();
        let mut live = DigitOracle::new(sources.clone());
        let answers: Vec<Rational> = queries.iter().map(|&(c, n)| live.query(c % values.len(), n).unwrap()).collect();
        let mut again = DigitOracle::new(sources);
        let mut replay = DigitOracle::replay(values.len(), live.log());
        for (&(c, n), want) in queries.iter().zip(&answers) {
            prop_assert_eq!(&again.query(c % values.len(), n).unwrap(), want);
            prop_assert_eq!(&replay.query(c % values.len(), n).unwrap(), want);
        }
        prop_assert!(live.answered_identically(&again));
    }

    #[test]
    fn bisection_width_law(name in family_name(), depth in 1u32..=30) {
        let f = family(name);
        let s = bisect_path(f.as_ref(), depth).unwrap();
        prop_assert_eq!(s.width(), BisectionState::expected_width(depth));
        prop_assert!(s.a < s.b && s.b < s.c);
        prop_assert!(s.a < int(0) && int(0) < s.c);
    }

    #[test]
    fn threshold_contract(z in small_rational(), dn in 1i64..64, level in 3u32..40) {
        let delta = rat(dn, 64);
        prop_assume!(pow2(1 - level as i64) < delta);
        let x = CReal::from_rational(z.clone()).sqrt_nonneg();
        let exact = x.approx(200).unwrap();
        let slack = pow2(-(level as i64)) + pow2(-199);
        match threshold_decide(&x, &delta, level).unwrap() {
            ComparisonVerdict::Above => prop_assert!(exact >= &delta - &slack),
            ComparisonVerdict::Below => prop_assert!(exact < &delta + &slack),
            ComparisonVerdict::Unknown => prop_assert!(false, "threshold decisions are total"),
        }
    }

    #[test]
    fn membership_matches_side(name in family_name(), t in path_parameter()) {
        let f = family(name);
        let want = Side::of(&t).unwrap().verdict();
        let got = f.membership(&f.path(&t), Precision(64)).unwrap();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn lp_fooling_is_sound(precision in 1u32..24, tol_n in 1i64..40) {
        let cfg = FoolingConfig { precision, tol: rat(tol_n, 100), ..FoolingConfig::default() };
        let r = fool_solver(&LpFamily, &LpVertexSolver, &cfg).unwrap();
        prop_assert!(r.sum_bound && r.replay_identical && r.prefix_identical);
        prop_assert!(&r.error_sum + pow2(-40) >= &r.kappa - int(2) * &cfg.tol);
        prop_assert!(&r.above.t - &r.below.t <= pow2(2 - r.consumed_precision as i64));
    }

    #[test]
    fn wasserstein_fooling_is_sound(precision in 1u32..24) {
        let cfg = FoolingConfig { precision, ..FoolingConfig::default() };
        let r = fool_solver(&WassersteinFamily, &ArgmaxSolver, &cfg).unwrap();
        prop_assert!(r.verdict && r.sum_bound && r.outputs_identical);
    }

    #[test]
    fn rounded_simplex_stays_on_simplex(parts in prop::collection::vec(1i64..1000, 2..6), bits in 2u32..40) {
        let total: i64 = parts.iter().sum();
        let p: Vec<Rational> = parts.iter().map(|&k| rat(k, total)).collect();
        let r = round_simplex(&p, bits);
        prop_assert_eq!(r.iter().sum::<Rational>(), int(1));
        prop_assert!(r.iter().all(|x| !x.is_negative()));
        let step = pow2(-(bits as i64)) * int(p.len() as i64);
        prop_assert!(r.iter().zip(&p).all(|(a, b)| (a - b).abs() <= step));
    }

    #[test]
    fn capacity_reduces_to_binary_entropy(a in 0i64..=1000, b in 0i64..=1000, c in 0i64..=1000) {
        prop_assume!(a + b + c > 0);
        let n = a + b + c;
        let p = [rat(a, n), rat(b, n), rat(c, n)];
        let i = mutual_information(&p, &w_star()).unwrap().approx(34).unwrap();
        let h = binary_entropy(&p[0]).unwrap().approx(34).unwrap();
        prop_assert!((i - h).abs() <= pow2(-30));
    }

    #[test]
    fn off_orbit_perturbations_have_positive_loss(
        deltas in prop::collection::vec(-1000i64..=1000, 9),
        big in 0usize..9,
        sign in any::<bool>(),
    ) {
        let eps = rat(1, 100);
        let data = Dataset::constructed(&eps, Side::Below);
        let mut flat = gamma_weights(&eps, Side::Below).flat();
        for (w, d) in flat.iter_mut().zip(&deltas) {
            *w += rat(*d, 10_000);
        }
        flat[big] += if sign { rat(1, 10) } else { rat(-1, 10) };
        let w = NnWeights::from_flat(&flat).unwrap();
        prop_assert!(data.loss(&w).is_positive());
    }
}

#[test]
fn wasserstein_bound_with_equality_on_identity_class() {
    for eps in [rat(1, 8), rat(1, 4), rat(1, 2)] {
        let p1 = Density::new(int(1), eps.clone(), int(0)).unwrap();
        let bound = &eps / int(12);
        for (i, f) in catalog().iter().enumerate() {
            let v = wasserstein_pairing(&p1, &Density::uniform(), &f.values);
            assert!(v <= bound, "{} exceeds the bound", f.name);
            assert_eq!(v == bound, i < 4, "equality pattern at {}", f.name);
        }
    }
}

#[test]
fn iterative_solvers_are_monotone_and_deterministic() {
    let w = w_star();
    let u = [rat(1, 3), rat(1, 3), rat(1, 3)];
    let a = blahut_arimoto_trace(&w, 30, &u, 64).unwrap();
    assert!(a.is_nondecreasing());
    assert_eq!(a, blahut_arimoto_trace(&w, 30, &u, 64).unwrap());

    let f = PortfolioFamily::default();
    let (rows, probs) = f.unpack(&f.path(&rat(1, 3)).approx_params(64).unwrap());
    let half = [rat(1, 2), rat(1, 2)];
    let c = cover_portfolio_trace(&rows, &probs, 30, &half, 64).unwrap();
    assert!(c.is_nondecreasing());
    assert_eq!(c, cover_portfolio_trace(&rows, &probs, 30, &half, 64).unwrap());
}

/// Runs on the exact path instances at `t = +-2^-21`: the value traces agree
/// to `10^-3` at the budget while some final iterate is still `kappa/2` away
/// from its own optimizer set, up to the fooling tolerance `1/100`.
fn assert_values_settle_before_iterates(
    family: &dyn Family,
    trace: impl Fn(&[Rational]) -> IterationTrace,
) {
    let t = pow2(-21);
    let half_gap = to_f64(&family.kappa().approx(40).unwrap()) / 2.0;
    let mut finals = Vec::new();
    let mut worst: f64 = 0.0;
    for side_t in [-t.clone(), t.clone()] {
        let y = family.path(&side_t);
        let tr = trace(&y.approx_params(64).unwrap());
        let last = tr.last().unwrap().clone();
        let opt = family.optimizers(&y).unwrap();
        let reduced = family.reduce_solution(&last.solution);
        let err = to_f64(&opt.distance_to_rational(&reduced, family.norm()).unwrap().approx(40).unwrap());
        worst = worst.max(err);
        finals.push(last);
    }
    let gap = (to_f64(&finals[0].value) - to_f64(&finals[1].value)).abs();
    assert!(gap <= 1e-3, "{}: values differ by {gap}", family.name());
    assert!(worst >= half_gap - 0.01, "{}: worst final error {worst} below {half_gap}", family.name());
}

#[test]
fn values_settle_while_iterates_do_not() {
    let channel = ChannelFamily::default();
    assert_values_settle_before_iterates(
        &channel,
        |params| {
            let w = channel.matrix(&params.iter().cloned().map(CReal::from_rational).collect::<Vec<_>>()).unwrap();
            blahut_arimoto_trace(&w, 200, &[rat(1, 3), rat(1, 3), rat(1, 3)], 128).unwrap()
        },
    );

    let portfolio = PortfolioFamily::default();
    assert_values_settle_before_iterates(
        &portfolio,
        |params| {
            let (rows, probs) = portfolio.unpack(params);
            cover_portfolio_trace(&rows, &probs, 200, &[rat(1, 2), rat(1, 2)], 128).unwrap()
        },
    );

    let nn = family(FamilyName::Nn);
    let gd = GradientDescentSolver::default();
    assert_values_settle_before_iterates(
        nn.as_ref(),
        |params| nn_gd_trace(&Dataset::from_params(params).unwrap(), &gd.init, 200, &gd.learning_rate, 128).unwrap(),
    );
}

/// The lp family with a membership decider that answers `Below` everywhere,
/// so that both regions collapse into one.
struct Collapsed(LpFamily);

impl Family for Collapsed {
    fn name(&self) -> FamilyName {
        self.0.name()
    }
    fn solution_dim(&self) -> usize {
        self.0.solution_dim()
    }
    fn param_dim(&self) -> usize {
        self.0.param_dim()
    }
    fn norm(&self) -> optgap_core::families::Norm {
        self.0.norm()
    }
    fn sense(&self) -> optgap_core::families::Sense {
        self.0.sense()
    }
    fn path_lipschitz(&self) -> Rational {
        self.0.path_lipschitz()
    }
    fn path_params(&self, t: &CReal) -> Vec<CReal> {
        self.0.path_params(t)
    }
    fn boundary_pair(&self, _: &[CReal]) -> optgap_core::families::Result<(CReal, CReal)> {
        Ok((CReal::zero(), CReal::one()))
    }
    fn optimizers_at(
        &self,
        location: optgap_core::families::Location,
        params: &[CReal],
    ) -> optgap_core::families::Result<optgap_core::families::OptimizerSet> {
        self.0.optimizers_at(location, params)
    }
    fn objective(&self, x: &[Rational], params: &[CReal]) -> optgap_core::families::Result<CReal> {
        self.0.objective(x, params)
    }
    fn check_slice(&self, params: &[CReal]) -> optgap_core::families::Result<()> {
        self.0.check_slice(params)
    }
    fn brute_force(
        &self,
        y: &optgap_core::families::Instance,
        resolution: &Rational,
    ) -> optgap_core::families::Result<Vec<Vec<Rational>>> {
        self.0.brute_force(y, resolution)
    }
    fn kappa(&self) -> CReal {
        self.0.kappa()
    }
    fn stated_kappa(&self) -> optgap_core::families::StatedKappa {
        self.0.stated_kappa()
    }
}

#[test]
fn collapsed_regions_fail_disjointness() {
    use optgap_core::adversary::{verify_conditions, Condition, ConditionStatus};
    let report = verify_conditions(&Collapsed(LpFamily), 10).unwrap();
    assert!(matches!(report.status(Condition::I), ConditionStatus::Failed(_)));
    assert!(report.failed().contains(&Condition::VII));
    assert!(!report.all_ok());
    assert!(verify_conditions(&LpFamily, 50).unwrap().all_ok());
}

/// Answers differently on every call, which replay must expose.
struct Drifting(std::sync::atomic::AtomicI64);

impl optgap_core::solvers::Solver for Drifting {
    fn name(&self) -> &'static str {
        "drifting"
    }
    fn family(&self) -> FamilyName {
        FamilyName::Lp
    }
    fn solve(
        &self,
        oracle: &mut DigitOracle,
        ctx: &optgap_core::solvers::SolveContext,
    ) -> optgap_core::solvers::Result<Vec<Rational>> {
        oracle.query_all(ctx.precision)?;
        let n = self.0.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        Ok(vec![int(1), rat(n, n + 1)])
    }
}

#[test]
fn replay_exposes_stateful_solvers() {
    use optgap_core::adversary::AdversaryError;
    let err = fool_solver(&LpFamily, &Drifting(0.into()), &FoolingConfig::default()).unwrap_err();
    assert_eq!(err, AdversaryError::ReplayMismatch { side: Side::Below });
}
