import json
import math

import pytest

from raystat import oracles
from raystat.empirics import (
    SurveyFileError,
    SurveyParams,
    SurveyStats,
    compare,
    export_csv,
    load_stats,
    merge,
    multinomial_within,
    observe_field,
    read_records,
    resume,
    run_range,
    stats_from_records,
    survey,
)
from raystat.predictions import SplittingSignature, prediction_report
from raystat.quadfield import is_fundamental


def test_thirty_records_below_100(tmp_path):
    s = survey(100, "+", 1, 3, tmp_path)
    recs = list(read_records(tmp_path / "records.jsonl"))
    assert len(recs) == 30 == s.records == s.count
    assert [r["D"] for r in recs] == [D for D in range(1, 100) if is_fundamental(D)]


def test_only_D5_below_6(tmp_path):
    s = survey(6, "+", 1, 3, tmp_path)
    assert s.records == 1 and s.mean_cl_ell() == 1


def test_imaginary_survey_flags_small_fields(tmp_path):
    s = survey(200, "-", 7, 3, tmp_path)
    recs = {r["D"]: r for r in read_records(tmp_path / "records.jsonl")}
    assert recs[-3]["flagged"] and recs[-4]["flagged"]
    assert s.excluded == 2 and s.count == s.records - 2
    assert recs[-23]["cl_ell"] == 3


def test_records_match_oracles(tmp_path):
    survey(1500, "+", 7, 3, tmp_path)
    for r in read_records(tmp_path / "records.jsonl"):
        assert "error" not in r
        G = oracles.OracleClassGroup(r["D"]).structure()
        assert r["cl_ell"] == G.torsion_size(3)
        assert r["ray_ell"] % r["cl_ell"] == 0 and math.log(r["ray_ell"], 3).is_integer()
        assert r["signature"] == "7:" + r["local"]["7"]


def test_observe_field():
    r = observe_field(8, 7, 3)
    assert r["ray_ell"] == 3 and r["cl_ell"] == 1 and r["eps_norm"] == -1
    assert r["signature"] == "7:S" and r["unit_class"] is not None


def test_params_validation():
    with pytest.raises(ValueError):
        SurveyParams(100, "+", 7, 9)
    with pytest.raises(ValueError):
        SurveyParams(100, "x", 7, 3)
    with pytest.raises(ValueError):
        SurveyParams(0, "+", 7, 3)


def test_merge_with_empty(tmp_path):
    s = survey(500, "+", 7, 3, tmp_path)
    e = SurveyStats.empty(s.params)
    assert merge(s, e) == s and merge(e, s) == s


def test_partition_merge(tmp_path):
    p = SurveyParams(2000, "+", 7, 3)
    whole = run_range(p, 1, 2000, tmp_path / "w.jsonl", tmp_path / "w.json")
    for cut in (2, 777, 1999):
        a = run_range(p, 1, cut, tmp_path / f"a{cut}.jsonl", tmp_path / f"a{cut}.json")
        b = run_range(p, cut, 2000, tmp_path / f"b{cut}.jsonl", tmp_path / f"b{cut}.json")
        assert merge(a, b) == whole
        assert merge(b, a) == whole
    x = run_range(p, 1, 500, tmp_path / "x.jsonl", tmp_path / "x.json")
    y = run_range(p, 500, 1200, tmp_path / "y.jsonl", tmp_path / "y.json")
    z = run_range(p, 1200, 2000, tmp_path / "z.jsonl", tmp_path / "z.json")
    assert merge(merge(x, y), z) == merge(x, merge(y, z)) == whole


def test_merge_rejects_incompatible():
    with pytest.raises(SurveyFileError):
        merge(SurveyStats.empty(SurveyParams(10, "+", 7, 3)), SurveyStats.empty(SurveyParams(10, "+", 5, 3)))


def test_resume_after_interruption(tmp_path):
    p = SurveyParams(3000, "+", 7, 3)
    whole = run_range(p, 1, 3000, tmp_path / "w.jsonl", tmp_path / "w.json", checkpoint=50)
    run_range(p, 1, 3000, tmp_path / "r.jsonl", tmp_path / "r.json", checkpoint=50, max_fields=333)
    # a crash after the checkpoint leaves extra bytes that must be discarded
    with open(tmp_path / "r.jsonl", "a") as fh:
        fh.write('{"D": 99999, "partial')
    got = resume(tmp_path / "r.json", checkpoint=50)
    assert got == whole
    assert (tmp_path / "r.jsonl").read_bytes() == (tmp_path / "w.jsonl").read_bytes()


@pytest.mark.parametrize("m", [7, 8])
def test_deterministic_output(tmp_path, m):
    # for m = 8 one signature covers several non-isomorphic rings O/m
    survey(1500, "+", m, 3, tmp_path / "a")
    survey(1500, "+", m, 3, tmp_path / "b", chunks=5)
    for name in ("records.jsonl", "stats.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_orbit_labels_name_reference_rings(tmp_path):
    s = survey(1500, "+", 8, 3, tmp_path)
    refs = {int(k.split(":")[0]) for sizes in s.orbit_sizes.values() for k in sizes}
    assert len(refs) > len(s.orbit_sizes)
    for code, sizes in s.orbit_sizes.items():
        for k in sizes:
            D = int(k.split(":")[0])
            assert is_fundamental(D) and SplittingSignature.of_field(D, 8).code == code


def test_corrupt_files_rejected(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"D": 5}\n{"D": \n')
    with pytest.raises(SurveyFileError, match="line 2"):
        list(read_records(bad))
    st = tmp_path / "bad.json"
    st.write_text('{"params": ')
    with pytest.raises(SurveyFileError, match="line 1"):
        load_stats(st)
    st.write_text("{}")
    with pytest.raises(SurveyFileError):
        load_stats(st)


def test_state_for_other_range_rejected(tmp_path):
    p = SurveyParams(500, "+", 7, 3)
    run_range(p, 1, 500, tmp_path / "r.jsonl", tmp_path / "r.json")
    with pytest.raises(SurveyFileError):
        run_range(p, 1, 400, tmp_path / "r.jsonl", tmp_path / "r.json")


def test_stats_round_trip(tmp_path):
    s = survey(1000, "+", 7, 3, tmp_path)
    assert load_stats(tmp_path / "stats.json") == s
    again = stats_from_records(tmp_path / "records.jsonl", s.params, orbit_sizes=s.orbit_sizes)
    assert again.to_dict()["signatures"] == s.to_dict()["signatures"]
    half = stats_from_records(tmp_path / "records.jsonl", s.params, X_max=500)
    assert half.records == sum(1 for D in range(1, 500) if is_fundamental(D))


def test_compare_and_csv(tmp_path):
    s = survey(2000, "+", 7, 3, tmp_path)
    rep = compare(s, prediction_report(3, 7, moment_exp=4))
    row = rep.find("mean_ray_ell")[0]
    assert row.predicted == 39 / 8 and row.n == s.count
    assert abs(row.abs_dev - (row.observed - 39 / 8)) < 1e-12
    freq = rep.find("splitting_frequency", "7:S")[0]
    assert freq.predicted == 7 / 16
    assert rep.find("unit_orbit", "7:S|8:0")[0].predicted == pytest.approx(1 / 3)
    export_csv(rep, tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0].startswith("quantity,signature,observed") and len(lines) == len(rep.rows) + 1
    json.dumps(rep.to_dict())
    with pytest.raises(ValueError):
        compare(s, prediction_report(3, 5, moment_exp=4))


def test_multinomial_within():
    out = multinomial_within({"a": 50, "b": 50}, {"a": 0.5, "b": 0.5})
    assert all(ok for _, _, ok in out.values())
    out = multinomial_within({"a": 90, "b": 10}, {"a": 0.5, "b": 0.5})
    assert not any(ok for _, _, ok in out.values())
