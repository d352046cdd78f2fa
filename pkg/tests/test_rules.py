import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carriersim.datamodel import A4Params, MeasurementReport, ShutdownThresholds
from carriersim.rules import (
    a4_qualifies,
    build_handover_model,
    check_shutdown_entry,
    check_wakeup,
    transfer_candidates,
)

from conftest import make_network

TH = ShutdownThresholds(entry_ue=10.0, entry_dl_prb=100.0, entry_ul_prb=50.0,
                        leave_ue=40.0, leave_dl_prb=100.0, leave_ul_prb=60.0)


class TestShutdownEntry:
    def test_all_conditions_hold(self):
        assert check_shutdown_entry(5, 20, 10, 5, 5, TH) is True

    def test_strict_inequality_at_ue_boundary(self):
        assert check_shutdown_entry(10, 20, 10, 5, 5, TH) is False

    def test_and_semantics_dl_over(self):
        assert check_shutdown_entry(5, 60, 60, 5, 5, TH) is False

    @given(ues=st.floats(0, 100), dl=st.floats(0, 300), dlp=st.floats(0, 300),
           ul=st.floats(0, 150), ulp=st.floats(0, 150),
           shrink=st.floats(0, 1))
    @settings(max_examples=150, deadline=None)
    def test_monotone_in_load(self, ues, dl, dlp, ul, ulp, shrink):
        # decreasing any input never flips an eligible cell to ineligible
        before = check_shutdown_entry(ues, dl, dlp, ul, ulp, TH)
        after = check_shutdown_entry(ues * shrink, dl * shrink, dlp * shrink,
                                     ul * shrink, ulp * shrink, TH)
        if before:
            assert after

    def test_positive_margin_when_eligible(self):
        ues, dl, dlp, ul, ulp = 5, 20, 10, 5, 5
        assert check_shutdown_entry(ues, dl, dlp, ul, ulp, TH)
        assert TH.entry_dl_prb - (dl + dlp) > 0


class TestWakeup:
    def test_or_semantics(self):
        assert check_wakeup(0, 120, 0, TH) is True

    def test_all_equal_thresholds_is_false(self):
        assert check_wakeup(40, 100, 60, TH) is False

    def test_all_below_is_false(self):
        assert check_wakeup(1, 1, 1, TH) is False

    @given(ues=st.floats(0, 200), dl=st.floats(0, 300), ul=st.floats(0, 200),
           grow=st.floats(1, 5))
    @settings(max_examples=150, deadline=None)
    def test_monotone_in_load(self, ues, dl, ul, grow):
        if check_wakeup(ues, dl, ul, TH):
            assert check_wakeup(ues * grow, dl * grow, ul * grow, TH)

    def test_positive_margin_when_dl_triggers(self):
        dl = 120.0
        assert check_wakeup(0, dl, 0, TH)
        assert dl - TH.leave_dl_prb > 0


class TestA4:
    def test_offsets_and_hysteresis(self):
        a4 = A4Params(threshold_dbm=-96.0, hysteresis_db=3.0,
                      freq_offset_db={"j": 2.0}, cell_offset_db={"j": 1.0})
        # -95 + 2 + 1 - 3 = -95 > -96
        assert a4_qualifies(-95.0, a4, "j") is True

    def test_strict_boundary(self):
        a4 = A4Params(threshold_dbm=-96.0, hysteresis_db=3.0,
                      freq_offset_db={"j": 2.0}, cell_offset_db={"j": 1.0})
        # -96 + 2 + 1 - 3 = -96, not strictly greater
        assert a4_qualifies(-96.0, a4, "j") is False

    def test_zero_offsets(self):
        a4 = A4Params(threshold_dbm=-100.0)
        assert a4_qualifies(-80.0, a4, "j") is True

    def test_missing_offset_reads_as_zero(self):
        a4 = A4Params(threshold_dbm=-100.0, hysteresis_db=0.0,
                      freq_offset_db={"other": 50.0})
        assert a4_qualifies(-99.9, a4, "j") is True
        assert a4_qualifies(-100.1, a4, "j") is False

    @given(rsrp=st.floats(-140, -40), tau=st.floats(-130, -60),
           k=st.floats(-20, 20))
    @settings(max_examples=200, deadline=None)
    def test_translation_covariance(self, rsrp, tau, k):
        a, b = A4Params(threshold_dbm=tau), A4Params(threshold_dbm=tau + k)
        assert a4_qualifies(rsrp, a, "j") == a4_qualifies(rsrp + k, b, "j")


def report(serving, rsrp, hour=13):
    stamp = f"2024-03-04T{hour - 1:02d}:15:00"
    return MeasurementReport(timestamp=stamp, ue_id="u", serving_cell=serving,
                             neighbor_rsrp_dbm=rsrp)


class TestHandoverModel:
    def test_vote_counting_matches_hand_enumeration(self):
        # three reports: b1 best-qualifying in two, b2 in one -> {b1: 2/3, b2: 1/3}
        cfg = make_network(n_capacity=1, n_coverage=2, a4_threshold=-110.0)
        mrs = [
            report("c1", {"c1": -80.0, "b1": -90.0, "b2": -100.0}),
            report("c1", {"c1": -80.0, "b1": -92.0}),
            report("c1", {"c1": -80.0, "b1": -105.0, "b2": -95.0}),
        ]
        model = build_handover_model(cfg, mrs, hour=13)
        assert model.targets("c1", 13) == {"b1": pytest.approx(2 / 3),
                                           "b2": pytest.approx(1 / 3)}

    def test_no_qualifying_neighbor_gives_zero_map(self):
        cfg = make_network(n_capacity=1, n_coverage=2, a4_threshold=-80.0)
        mrs = [report("c1", {"c1": -70.0, "b1": -95.0, "b2": -99.0})]
        model = build_handover_model(cfg, mrs, hour=13)
        assert model.targets("c1", 13) == {"b1": 0.0, "b2": 0.0}

    def test_single_qualifying_neighbor_gets_probability_one(self):
        cfg = make_network(n_capacity=1, n_coverage=2, a4_threshold=-110.0)
        mrs = [report("c1", {"c1": -70.0, "b1": -95.0}) for _ in range(4)]
        model = build_handover_model(cfg, mrs, hour=13)
        assert model.targets("c1", 13)["b1"] == 1.0

    def test_cell_without_reports_gets_zero_map(self):
        cfg = make_network(n_capacity=2, n_coverage=1)
        mrs = [report("c1", {"c1": -70.0, "b1": -95.0})]
        model = build_handover_model(cfg, mrs, hour=13)
        assert model.targets("c2", 13) == {"b1": 0.0}

    def test_tie_breaks_to_lowest_cell_id(self):
        cfg = make_network(n_capacity=1, n_coverage=3, a4_threshold=-110.0)
        mrs = [report("c1", {"c1": -70.0, "b3": -95.0, "b2": -95.0})]
        model = build_handover_model(cfg, mrs, hour=13)
        assert model.targets("c1", 13)["b2"] == 1.0

    def test_serving_cell_never_a_candidate(self):
        cfg = make_network(n_capacity=1, n_coverage=1)
        assert "c1" not in transfer_candidates(cfg, "c1")

    @given(st.lists(st.tuples(st.sampled_from(["c1", "c2"]),
                              st.floats(-130, -60), st.floats(-130, -60)),
                    max_size=30))
    @settings(max_examples=80, deadline=None)
    def test_normalization_invariant(self, raw):
        cfg = make_network(n_capacity=2, n_coverage=2, a4_threshold=-100.0)
        mrs = [report(s, {s: -70.0, "b1": r1, "b2": r2}) for s, r1, r2 in raw]
        model = build_handover_model(cfg, mrs, hour=13)
        for cell in ("c1", "c2"):
            probs = model.targets(cell, 13)
            total = sum(probs.values())
            assert total == 0.0 or abs(total - 1.0) < 1e-9
            assert all(p >= 0 for p in probs.values())
