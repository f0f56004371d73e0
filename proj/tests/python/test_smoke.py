import math

import pytest

import icbox


def test_pr_box_chsh():
    assert icbox.chsh_value(icbox.pr_box()) == 4.0
    passes, violation = icbox.no_signaling(icbox.pr_box())
    assert passes and violation <= 1e-12


def test_isotropic_round_trip():
    box = icbox.isotropic_box(3.2)
    assert icbox.chsh_value(box) == pytest.approx(3.2, abs=1e-12)
    again = icbox.parse_box(icbox.serialize_box(box))
    assert again.entries == pytest.approx(box.entries, abs=1e-15)


def test_tsirelson_optimization():
    settings, S = icbox.optimize_settings("psi-plus", 0.0)
    assert S == pytest.approx(2.0 + math.sqrt(2.0), abs=1e-9)
    box = icbox.quantum_box("psi-plus", 0.0, settings)
    assert icbox.chsh_value(box) == pytest.approx(S, abs=1e-12)
    assert icbox.theory_S(0.0) == pytest.approx(2.0 + math.sqrt(2.0), abs=1e-9)


def test_depolarize_preserves_chsh():
    box = icbox.quantum_box(
        "psi-plus", 0.3, icbox.MeasurementSettings(0.1, 0.7, 1.9, 2.5)
    )
    depol = icbox.depolarize(box)
    assert icbox.chsh_value(depol) == pytest.approx(icbox.chsh_value(box), abs=1e-13)
    assert icbox.anisotropy(depol) == pytest.approx(0.0, abs=1e-12)


def test_protocol_pr_box_is_perfect():
    summary = icbox.run_protocol(icbox.pr_box(), n=2, trials_per_index=200, seed=7)
    assert summary.P_k == [1.0, 1.0, 1.0, 1.0]
    assert summary.efficiency == pytest.approx(4.0)
    assert summary.i_bound == pytest.approx(4.0)


def test_exact_stats_match_merit():
    box = icbox.isotropic_box(2 + math.sqrt(2))
    pk = icbox.exact_protocol_stats(box, 3)
    report = icbox.merit(pk)
    assert report["efficiency"] == pytest.approx(1.0, abs=1e-12)
