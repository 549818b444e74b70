"""Format tests: condition file, wish grid, roster exports, weights,
session snapshots."""

import datetime as dt
import json

import pytest

from rostra.calendars import build_calendar
from rostra.io_config import (
    GRID_CSV,
    STRUCTURED_JSONLIKE,
    IoError,
    SessionStore,
    dump_condition_file,
    dump_session,
    dump_weight_table,
    export_roster,
    load_condition_file,
    load_session,
    load_structured_roster,
    load_weight_table,
    load_wish_table,
)
from rostra.pipeline import apply_edits, new_session, run_night_stage
from rostra.roster import Provenance, Roster
from rostra.shifts import Shift
from rostra.staff import WeightTable

from conftest import make_roster, nov


def golden_condition_doc():
    return {
        "schema": "ward-config/1",
        "month": {"year": 2024, "month": 11,
                  "holidays": ["2024-11-04"], "event_weekdays": ["tue"]},
        "night_pattern": "twelve_hour",
        "off_quota": 9,
        "avg_fssm_nights": "3/2",
        "avg_event_nights": 1,
        "toggles": {"team": True, "rookie": True, "male": False,
                    "care_worker": False},
        "nurses": [
            {"id": "a", "group": 1, "team": "A", "day_leader": True},
            {"id": "b", "group": 2, "team": "A", "rookie": True},
            {"id": "c", "group": 3, "team": "B",
             "off_preference": "weekend_pair"},
            {"id": "d", "night_class": "day_only", "group": 4, "team": "B"},
        ],
        "staffing": {
            "night": {
                "total": {"lb": {"default": 2, "sat": 1, "sun": 1, "hol": 1},
                          "ub": 3},
                "rookie": {"lb": 0, "ub": 1},
            },
            "day": {"total": {"lb": 2, "ub": 4}},
        },
        "pairs": [{"n1": "a", "n2": "b", "s1": "NIN", "s2": "NIN",
                   "min_count": 1}],
        "forbidden_pairs": [],
        "forbidden_assignments": [
            {"nurse": "c", "shift": "NIN", "dow": "fri"}],
        "weights": {"shift": 100, "nurse": 10, "epigraph": 1,
                    "overrides": {"Sn-S-1": 500}},
        "notes": "trial ward",
    }


def test_load_condition_file_golden():
    cfg, warnings = load_condition_file(
        json.dumps(golden_condition_doc()).encode())
    assert len(cfg.nurses) == 4
    assert cfg.calendar.month == 11
    assert cfg.nurse("c").off_preference.value == "weekend_pair"
    assert cfg.night_staffing.total.lb.get("sat") == 1
    assert cfg.night_staffing.total.lb.get("wed") == 2
    assert cfg.weights.weight(
        __import__("rostra.catalog.ids", fromlist=["sn"]).sn("S", 1)) == 500
    assert cfg.avg_fssm_nights == __import__("fractions").Fraction(3, 2)
    # warnings mention the families unfilled bounds feed, not random noise
    assert any("Sn-S-3" in w for w in warnings)  # group1 bounds absent


def test_missing_staffing_field_names_dependency():
    doc = golden_condition_doc()
    del doc["staffing"]["night"]["total"]
    _cfg, warnings = load_condition_file(json.dumps(doc).encode())
    assert any("Sn-S-1" in w for w in warnings)


def test_lb_above_ub_is_an_error_with_values():
    doc = golden_condition_doc()
    doc["staffing"]["night"]["total"] = {"lb": 5, "ub": 3}
    with pytest.raises(Exception) as err:
        load_condition_file(json.dumps(doc).encode())
    assert "5" in str(err.value) and "3" in str(err.value)


def test_dangling_nurse_reference():
    doc = golden_condition_doc()
    doc["pairs"][0]["n2"] = "ghost"
    with pytest.raises(IoError):
        load_condition_file(json.dumps(doc).encode())


def test_bad_schema_rejected():
    with pytest.raises(IoError):
        load_condition_file(b'{"schema": "nope/9"}')
    with pytest.raises(IoError):
        load_condition_file(b"not json at all")


def test_condition_file_round_trip():
    cfg, _ = load_condition_file(json.dumps(golden_condition_doc()).encode())
    dumped = dump_condition_file(cfg)
    cfg2, _ = load_condition_file(dumped)
    assert dump_condition_file(cfg2) == dumped


def _wish_csv(calendar, rows):
    header = "nurse," + ",".join(d.isoformat() for d in calendar.days)
    return ("\n".join([header] + rows) + "\n").encode()


def test_load_wish_table_symbols_and_warnings(micro_cfg):
    cal = micro_cfg.calendar
    row_a = "n1," + ",".join(["OFF"] * 5 + ["研修", "", "×"] + [""] * 27 + ["OFF"] * 5)
    data = _wish_csv(cal, [row_a])
    roster, warnings = load_wish_table(
        data, cal, symbol_map={"研修": "OTHER"})
    assert roster.get("n1", nov(1)) is Shift.OTHER
    assert roster.get("n1", nov(2)) is Shift.UNSET      # empty, silent
    assert roster.get("n1", nov(3)) is Shift.UNSET      # unknown, warned
    assert any("'×'" in w and "n1" in w and "2024-11-03" in w
               for w in warnings)
    assert roster.prov("n1", dt.date(2024, 10, 27)) is Provenance.FIXED_PREV_MONTH
    assert roster.prov("n1", nov(1)) is Provenance.WISH


def test_wish_table_rejects_duplicate_rows_and_bad_header(micro_cfg):
    cal = micro_cfg.calendar
    row = "n1," + ",".join([""] * 40)
    with pytest.raises(IoError):
        load_wish_table(_wish_csv(cal, [row, row]), cal)
    bad_header = b"nurse,2020-01-01\nn1,OFF\n"
    with pytest.raises(IoError):
        load_wish_table(bad_header, cal)


def test_export_roster_round_trip(micro_cfg):
    r = make_roster(micro_cfg, rows={"n2": "o" * 9 + "NM" + "o" * 29})
    data = export_roster(r, GRID_CSV)
    back, warnings = load_wish_table(data, micro_cfg.calendar)
    assert warnings == [] or all("previous-month" not in w for w in warnings)
    assert back.cells == r.cells

    structured = export_roster(r, STRUCTURED_JSONLIKE)
    back2 = load_structured_roster(structured, micro_cfg.calendar)
    assert back2.cells == r.cells
    assert back2.provenance == r.provenance  # structured form keeps provenance


def test_export_shapes(micro_cfg):
    r = make_roster(micro_cfg)
    lines = export_roster(r, GRID_CSV).decode().strip().split("\n")
    assert len(lines) == 1 + len(micro_cfg.nurses)
    assert len(lines[0].split(",")) == 1 + 40  # name column + horizon days


def test_weight_table_round_trip():
    wt = WeightTable(overrides={"Sn-S-1": 500, "Sd-N-30": 25},
                     shift_weight=200)
    data = dump_weight_table(wt)
    back = load_weight_table(data)
    assert back.shift_weight == 200
    assert back.overrides == {"Sn-S-1": 500, "Sd-N-30": 25}
    with pytest.raises(IoError):
        load_weight_table(b"Sn-S-1: 12\n")
    with pytest.raises(IoError):
        load_weight_table(b"Sn-S-1 = twelve\n")


def _blank_wishes(cfg):
    row = "o" * 5 + "." * 30 + "o" * 5
    return make_roster(cfg, rows={n.id: row for n in cfg.nurses})


def test_session_snapshot_round_trip(micro_cfg):
    wishes = _blank_wishes(micro_cfg)
    session = new_session(micro_cfg, wishes, "snap-test")
    run_night_stage(session, time_limit=2, seed=5)
    apply_edits(session, [("n2", nov(5), Shift.SPECIAL_OFF)])
    blob = dump_session(session)
    back = load_session(blob)
    assert back.phase == session.phase
    assert back.session_id == "snap-test"
    assert back.edited.cells == session.edited.cells
    assert [r.nurse for r in back.audit] == ["n2"]


def test_session_store(tmp_path, micro_cfg):
    wishes = _blank_wishes(micro_cfg)
    store = SessionStore(tmp_path)
    session = new_session(micro_cfg, wishes, "w1")
    p1 = store.save(session)
    run_night_stage(session, time_limit=2, seed=5)
    p2 = store.save(session)
    assert p1 != p2
    latest = store.load_latest("w1")
    assert latest.phase == session.phase
    assert store.list_sessions() == ["w1"]
    assert store.load_latest("missing") is None
