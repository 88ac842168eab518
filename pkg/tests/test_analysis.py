from decimal import Decimal

import pytest

from optdyn import (
    AlgorithmSpec,
    ConstantStep,
    ExtremaTracker,
    GapWitnessTracker,
    LogBarrier,
    NegativeEntropy,
    PeakTracker,
    Record,
    SimplexPoint,
    SquaredEuclidean,
    TsallisEntropy,
    best_and_average,
    constants,
    detect_stages,
    find_gap_peaks,
    fit_inverse_sqrt_rate,
    flat_region_scaling,
    gap_peaks_of,
    hard_instance,
    lift_equivalence,
    run_oftrl,
    verify_assumptions,
)

D = Decimal


def fake_record(t, x1, y1, gap="0", eta="0.1"):
    return Record(
        t=t,
        x=SimplexPoint((D(x1), 1 - D(x1))),
        y=SimplexPoint((D(y1), 1 - D(y1))),
        loss_x=None,
        loss_y=None,
        gap=D(gap),
        eta=D(eta),
    )


@pytest.fixture(scope="module")
def euclid_constants():
    from optdyn import make_context

    with make_context(64).activate():
        return constants(SquaredEuclidean())


def test_detect_stages_synthetic_first_passage(active64, euclid_constants):
    records = [
        fake_record(1, "0.25", "0.4"),
        fake_record(2, "0.8", "0.4"),
        fake_record(3, "0.995", "0.4"),
    ]
    rep = detect_stages(records, D("0.01"), euclid_constants, eta=D("0.1"))
    assert rep.t_s == 2
    assert rep.t1 == 3
    assert rep.t2 is None
    assert rep.flat_len is None
    assert rep.t3_window is None


def test_detect_stages_ignores_initial_high_y(active64, euclid_constants):
    # y starts above 1/(2(1+delta)); crossings before t1 must not count
    records = [
        fake_record(1, "0.25", "0.5"),
        fake_record(2, "0.995", "0.1"),
        fake_record(3, "0.995", "0.6"),
    ]
    rep = detect_stages(records, D("0.01"), euclid_constants, eta=D("0.1"))
    assert rep.t_s == 2 and rep.t1 == 2
    assert rep.t2 == 3
    assert rep.flat_len == 1
    assert rep.t3_window is not None and rep.t3_window[0] > rep.t2


def test_detect_stages_no_crossing_reports_absent(active64, euclid_constants):
    records = [fake_record(t, "0.6", "0.3") for t in range(1, 10)]
    rep = detect_stages(records, D("0.01"), euclid_constants, eta=D("0.1"))
    assert rep.t_s is None and rep.t1 is None and rep.t2 is None


def test_detect_stages_predictions(active64, euclid_constants):
    # euclid: L=1/2, c1=1/20; eta=1/2, delta=5e-6
    records = [fake_record(1, "0.5", "0.5")]
    rep = detect_stages(records, D("0.000005"), euclid_constants, eta=D("0.5"))
    assert rep.predicted_ts_lb == 2
    assert abs(rep.predicted_threshold - D("40000") / 3) < D("1e-40")
    assert rep.predicted_th == 20000


def test_detect_stages_requires_hard_instance(active64, ctx64):
    from optdyn import MatrixGame, run_oomd

    game = MatrixGame(entries=((D(0), D(1)), (D(1), D(0))), entry_bound=D(1))
    spec = AlgorithmSpec("oomd", SquaredEuclidean(), ConstantStep(D("0.1")))
    traj = run_oomd(game, spec, 5, ctx64)
    with pytest.raises(ValueError):
        detect_stages(traj, D("0.01"), constants(SquaredEuclidean()))


def test_stage_report_text_block(active64, euclid_constants):
    records = [fake_record(1, "0.25", "0.4")]
    rep = detect_stages(records, D("0.01"), euclid_constants, eta=D("0.1"))
    text = rep.to_text()
    assert "T_s=absent" in text
    assert "predicted_Th=" in text
    for line in text.splitlines():
        assert "=" in line


def test_find_gap_peaks_basic_and_plateau():
    series = [
        (1, D("0.1")),
        (2, D("0.3")),
        (3, D("0.2")),  # peak at t=2
        (4, D("0.4")),
        (5, D("0.4")),  # plateau top starts at t=4
        (6, D("0.1")),
        (7, D("0.04")),
        (8, D("0.06")),
        (9, D("0.01")),  # below-separation peak at t=8, smaller than t=4
    ]
    # close peaks merge to the larger one
    peaks = find_gap_peaks(series, floor=D("0.05"), min_separation=10)
    assert peaks == [(4, D("0.4"))]
    # with separation 1 all three qualify
    peaks = find_gap_peaks(series, floor=D("0.05"), min_separation=1)
    assert peaks == [(2, D("0.3")), (4, D("0.4")), (8, D("0.06"))]
    # floor filters
    assert find_gap_peaks(series, floor=D("0.5"), min_separation=1) == []


def test_find_gap_peaks_separation_keeps_larger():
    series = [(1, D(0)), (3, D("0.2")), (5, D("0.1")), (8, D("0.3")), (10, D("0.1"))]
    peaks = find_gap_peaks(series, floor=D("0.05"), min_separation=10)
    assert peaks == [(8, D("0.3"))]


def test_peak_tracker_matches_post_hoc(ctx64):
    game = hard_instance(D("0.05"))
    spec = AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1")))
    tracker = PeakTracker()
    traj = run_oftrl(game, spec, 1500, ctx64, observers=(tracker,))
    with ctx64.activate():
        streaming = tracker.peaks(floor=D("0.05"), min_separation=10)
        post_hoc = gap_peaks_of(traj, floor=D("0.05"), min_separation=10)
    assert streaming == post_hoc
    assert len(streaming) >= 1


def test_extrema_and_witness_trackers(ctx64):
    game = hard_instance(D("0.05"))
    spec = AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1")))
    extrema = ExtremaTracker()
    witness = GapWitnessTracker(t_min=D(100), target=D("0.05"))
    traj = run_oftrl(game, spec, 1500, ctx64, observers=(extrema, witness))
    gaps = {r.t: r.gap for r in traj.records}
    assert extrema.max_gap == max(gaps.values())
    assert gaps[extrema.max_gap_t] == extrema.max_gap
    assert extrema.max_x1 == max(r.x[0] for r in traj.records)
    assert witness.witnessed
    assert witness.first_hit_t >= 100
    assert witness.max_gap_t >= 100


def test_best_and_average(ctx64):
    game = hard_instance(D("0.01"))
    spec = AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1")))
    traj = run_oftrl(game, spec, 200, ctx64)
    with ctx64.activate():
        best1, t1, avg1 = best_and_average(traj, 1)
        assert best1 == traj.records[0].gap and t1 == 1
        assert avg1 == traj.records[0].gap
        prev_best = None
        for T in (10, 50, 100, 200):
            best, _, _ = best_and_average(traj, T)
            if prev_best is not None:
                assert best <= prev_best
            prev_best = best
        # constant-gap synthetic: best = average-of-iterates' gap
        records = [fake_record(t, "0.5", "0.5", gap="0.25") for t in range(1, 6)]
        b, t, avg = best_and_average(records, 5, game=game)
        assert b == D("0.25") and avg == D("0.25")


def test_fit_inverse_sqrt_rate(active64):
    records = [fake_record(t, "0.5", "0.5", gap=str(1 / float(t) ** 0.5)) for t in (1, 4, 9, 16, 25)]
    # gaps built as decimal strings of 1/sqrt(t); C should be ~1
    C = fit_inverse_sqrt_rate(records, 1, 25)
    assert abs(C - 1) < D("1e-10")
    zero = [fake_record(t, "0.5", "0.5", gap="0") for t in (1, 2, 3)]
    assert fit_inverse_sqrt_rate(zero, 1, 3) == 0
    # scale consistency
    scaled = [fake_record(r.t, "0.5", "0.5", gap=str(D(3) * r.gap)) for r in records]
    assert abs(fit_inverse_sqrt_rate(scaled, 1, 25) - 3 * C) < D("1e-9")
    with pytest.raises(ValueError):
        fit_inverse_sqrt_rate(records, 30, 40)
    with pytest.raises(ValueError):
        fit_inverse_sqrt_rate(records, 10, 10)


@pytest.mark.parametrize(
    "kind",
    [NegativeEntropy(), SquaredEuclidean(), LogBarrier(), TsallisEntropy(D("0.5"))],
    ids=["entropy", "euclid", "logbar", "tsallis"],
)
def test_verify_assumptions_passes_at_half_delta_prime(kind):
    from optdyn import make_context

    ctx = make_context(64)
    with ctx.activate():
        dp = constants(kind).delta_prime
    report = verify_assumptions(kind, dp / 2, ctx)
    assert not report.out_of_range
    assert report.passed, report.to_text()
    assert report.item1_ok and report.item2_ok
    assert report.unbiased_ok and report.rational_ok and report.lipschitz_ok


def test_verify_assumptions_out_of_range():
    from optdyn import make_context

    ctx = make_context(64)
    with ctx.activate():
        dp = constants(LogBarrier()).delta_prime
    report = verify_assumptions(LogBarrier(), dp * 2, ctx)
    assert report.out_of_range
    assert report.item1_ok is None and report.item2_ok is None
    assert not report.passed
    assert "out_of_range=true" in report.to_text()


def test_entropy_discrepancy_flag_in_report():
    from optdyn import make_context

    ctx = make_context(64)
    with ctx.activate():
        dp = constants(NegativeEntropy()).delta_prime
    report = verify_assumptions(NegativeEntropy(), dp / 2, ctx)
    assert report.delta_prime_discrepancy
    text = report.to_text()
    assert "delta_prime_discrepancy=true" in text
    assert "delta_prime_loose=" in text
    euclid = verify_assumptions(SquaredEuclidean(), dp / 2, ctx)
    assert "delta_prime_discrepancy=false" in euclid.to_text()


def test_lift_equivalence_identity(ctx64):
    rep = lift_equivalence(D("0.05"), 1, NegativeEntropy(), D("0.1"), 30, ctx64)
    assert rep.max_within_half_spread == 0
    assert rep.max_half_sum_error == 0
    assert rep.passed


def test_lift_equivalence_small(ctx64):
    rep = lift_equivalence(D("0.05"), 2, NegativeEntropy(), D("0.1"), 40, ctx64)
    assert rep.passed, rep.to_text()
    assert rep.alpha == 0
    assert rep.tolerance == D("1e-44")


def test_flat_region_scaling_flags_incomplete(ctx64):
    spec = AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1")))
    entries = flat_region_scaling([D("0.05")], spec, 30, ctx64)
    (entry,) = entries
    assert not entry.complete
    assert entry.flat_len is None


def test_flat_region_scaling_complete_small(ctx64):
    spec = AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1")))
    entries = flat_region_scaling([D("0.05")], spec, 800, ctx64, thin=10)
    (entry,) = entries
    assert entry.complete
    assert entry.flat_len is not None and entry.flat_len > 100
    assert entry.report.t_s is not None
    # stage-one lower bound: T_s >= 1/(2 eta L) = 10
    assert entry.report.t_s >= 10
