import copy
import json

import pytest
from hypothesis import given, strategies as st

from asynciter.activation import ScheduleKind
from asynciter.config import ParseError, UnknownKey, ValidationError, parse_config
from asynciter.dynamics import Reference
from asynciter.matrix_gen import SignConvention

MINIMAL = {
    "n": 4,
    "target_rho": 0.9,
    "zero_diagonal": True,
    "schedule": {"kind": "FULL_SYNC"},
    "T": 4,
    "criterion": {"tolerance": 1e-9, "max_iterations": 1000, "reference": "FIXED_POINT"},
    "trials": 1,
    "master_seed": 7,
    "output_dir": "out",
}


def with_changes(**changes):
    cfg = copy.deepcopy(MINIMAL)
    cfg.update(changes)
    return json.dumps(cfg)


def test_minimal_config_defaults():
    cfg = parse_config(json.dumps(MINIMAL))
    assert cfg.n == 4 and cfg.schedule.kind is ScheduleKind.FULL_SYNC
    assert cfg.record_stride == 1
    assert cfg.perturbation_epsilon == 0.0
    assert cfg.sign_convention is SignConvention.PLUS
    assert cfg.criterion.reference is Reference.FIXED_POINT


def test_target_rho_one_rejected():
    with pytest.raises(ValidationError, match=r"^target_rho: must be < 1$"):
        parse_config(with_changes(target_rho=1.0))


def test_unknown_key():
    with pytest.raises(UnknownKey, match="rho_target"):
        parse_config(with_changes(rho_target=0.5))


def test_unknown_nested_key():
    with pytest.raises(UnknownKey, match=r"schedule\.seed"):
        parse_config(with_changes(schedule={"kind": "FULL_SYNC", "seed": 3}))


def test_malformed_json():
    with pytest.raises(ParseError):
        parse_config("{not json")


def test_p_update_error_path():
    sched = {"kind": "BERNOULLI", "p_update": [0.5, 0.5, 1.5, 0.5]}
    with pytest.raises(ValidationError) as info:
        parse_config(with_changes(schedule=sched))
    assert str(info.value) == "schedule.p_update[2]: must be in (0,1]"


def test_p_update_scalar_broadcast():
    cfg = parse_config(with_changes(schedule={"kind": "BOUNDED_DELAY_REPAIR", "p_update": 0.3}))
    assert cfg.schedule.p_update == (0.3,) * 4


@pytest.mark.parametrize(
    "changes, path",
    [
        (dict(n=0), "n"),
        (dict(n=2.5), "n"),
        (dict(n=True), "n"),
        (dict(target_rho=-0.1), "target_rho"),
        (dict(target_rho="0.5"), "target_rho"),
        (dict(zero_diagonal=1), "zero_diagonal"),
        (dict(sign_convention="PLUSMINUS"), "sign_convention"),
        (dict(T=0), "T"),
        (dict(trials=0), "trials"),
        (dict(master_seed=-1), "master_seed"),
        (dict(master_seed=2**64), "master_seed"),
        (dict(perturbation_epsilon=-1e-3), "perturbation_epsilon"),
        (dict(record_stride=0), "record_stride"),
        (dict(output_dir=""), "output_dir"),
        (dict(schedule={"kind": "RANDOM"}), "schedule.kind"),
        (dict(schedule={"kind": "BERNOULLI"}), "schedule.p_update"),
        (dict(schedule={"kind": "BERNOULLI", "p_update": [0.5]}), "schedule.p_update"),
        (dict(schedule={"kind": "FULL_SYNC", "p_update": 0.5}), "schedule.p_update"),
        (dict(criterion={"tolerance": 0, "max_iterations": 5, "reference": "SUCCESSIVE"}), "criterion.tolerance"),
        (dict(criterion={"tolerance": 1e-9, "max_iterations": 5}), "criterion.reference"),
        (dict(criterion={"tolerance": 1e-9, "max_iterations": 0, "reference": "SUCCESSIVE"}),
         "criterion.max_iterations"),
    ],
)
def test_validation_paths(changes, path):
    with pytest.raises(ValidationError) as info:
        parse_config(with_changes(**changes))
    assert info.value.path == path


@pytest.mark.parametrize("key", ["n", "target_rho", "schedule", "criterion", "trials", "master_seed", "output_dir"])
def test_required_keys(key):
    cfg = copy.deepcopy(MINIMAL)
    del cfg[key]
    with pytest.raises(ValidationError) as info:
        parse_config(json.dumps(cfg))
    assert info.value.path == key


def test_root_must_be_object():
    with pytest.raises(ValidationError):
        parse_config("[1, 2]")


configs = st.fixed_dictionaries(
    {
        "n": st.integers(1, 20),
        "target_rho": st.floats(0, 0.999),
        "zero_diagonal": st.booleans(),
        "sign_convention": st.sampled_from(["PLUS", "MINUS"]),
        "T": st.integers(1, 30),
        "trials": st.integers(1, 100),
        "master_seed": st.integers(0, 2**64 - 1),
        "perturbation_epsilon": st.floats(0, 1),
        "record_stride": st.integers(1, 50),
        "output_dir": st.text(min_size=1),
        "kind": st.sampled_from([k.value for k in ScheduleKind]),
        "p": st.floats(1e-6, 1.0),
        "tolerance": st.floats(1e-15, 1.0),
        "max_iterations": st.integers(1, 10**6),
        "reference": st.sampled_from(["FIXED_POINT", "SUCCESSIVE"]),
    }
)


@given(configs)
def test_round_trip(d):
    kind = d.pop("kind")
    schedule = {"kind": kind}
    p = d.pop("p")
    if kind in ("BERNOULLI", "BOUNDED_DELAY_REPAIR"):
        schedule["p_update"] = p
    d["schedule"] = schedule
    d["criterion"] = {k: d.pop(k) for k in ("tolerance", "max_iterations", "reference")}
    cfg = parse_config(json.dumps(d))
    assert parse_config(cfg.to_json()) == cfg
