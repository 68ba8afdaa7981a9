"""The ten acceptance criteria at full scale and stated tolerances."""

import pytest

from jensenlab import acceptance


@pytest.fixture(scope="module")
def instances():
    return acceptance.jensen_instances()


def _run(fn, criterion_log, **kw):
    res = fn(**kw)
    line = res.line()
    print(line)
    criterion_log.append(line)
    assert res.passed, res.detail
    return res


def test_criterion_01_jensen_identity(instances, criterion_log):
    res = _run(acceptance.criterion_1, criterion_log, instances=instances)
    assert res.detail["instances"] == 60 and res.seconds <= 60


def test_criterion_02_zero_correspondence(instances, criterion_log):
    _run(acceptance.criterion_2, criterion_log, instances=instances)


def test_criterion_03_bound_chain(criterion_log):
    res = _run(acceptance.criterion_3, criterion_log)
    assert res.detail["instances"] == 20


def test_criterion_04_jp_anchors(criterion_log):
    _run(acceptance.criterion_4, criterion_log)


def test_criterion_05_m_regimes(criterion_log):
    res = _run(acceptance.criterion_5, criterion_log)
    assert res.detail["sb_samples"] == 100


def test_criterion_06_duhamel(criterion_log):
    _run(acceptance.criterion_6, criterion_log)


def test_criterion_07_domination(criterion_log):
    res = _run(acceptance.criterion_7, criterion_log)
    assert res.detail["potentials"] == 50


def test_criterion_08_base_integral(criterion_log):
    _run(acceptance.criterion_8, criterion_log)


def test_criterion_09_wkb(criterion_log):
    res = _run(acceptance.criterion_9, criterion_log)
    assert res.seconds <= 120


def test_criterion_10_conditions(criterion_log):
    _run(acceptance.criterion_10, criterion_log)


def test_instances_respect_size_limits(instances):
    kinds = [k for k, *_ in instances]
    assert kinds.count("random") == 50 and kinds.count("well") == 10
    assert all(a.n <= (200 if k == "random" else 512) for k, _, a, _ in instances)
