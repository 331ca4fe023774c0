"""Catalog loading, validation, and price filtering."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from vmsolver.catalog import (
    GB,
    TFLOPS,
    Catalog,
    InstanceSpec,
    filter_by_price,
    load_catalog,
    save_catalog,
    serialize_catalog,
)
from vmsolver.errors import (
    DuplicateName,
    MissingField,
    NonPositiveValue,
    UnknownInstance,
    UnreadableSource,
)


def test_bundled_four_instance_fixture(aws_catalog):
    assert len(aws_catalog) == 4
    g6e = aws_catalog.get("g6e.xlarge")
    assert g6e.price_per_hour == 2.699
    assert g6e.gpu_memory == 48 * GB
    assert g6e.flops == 91.61 * TFLOPS
    assert g6e.bw_gpu_to_cpu == 12 * GB
    g4dn = aws_catalog.get("g4dn.xlarge")
    assert g4dn.price_per_hour == 0.71
    assert g4dn.gpu_memory == 16 * GB
    assert g4dn.flops == 8.24 * TFLOPS
    assert g4dn.bw_cpu_to_gpu == 6 * GB


def test_bundled_full_price_sheet_kept_verbatim():
    # The two bundled sources disagree on the T4's numbers; each fixture
    # reproduces its own sheet rather than reconciling.
    table1 = load_catalog("aws-table1")
    assert len(table1) == 14
    g4dn = table1.get("g4dn.xlarge")
    assert g4dn.flops == 8.141 * TFLOPS
    assert g4dn.price_per_hour == 0.526
    multi = table1.get("g4dn.12xlarge")
    assert multi.gpu_count == 4
    assert table1.get("p4de.24xlarge").network_gbps == 400


def test_unknown_instance_lookup(aws_catalog):
    with pytest.raises(UnknownInstance):
        aws_catalog.get("does-not-exist")


def _entry(**overrides):
    base = {
        "name": "x1",
        "gpu_type": "T4",
        "price_per_hour_usd": 1.0,
        "gpu_memory_gb": 16,
        "fp16_tflops": 8.0,
        "bw_gpu_to_cpu_gbps": 6,
        "bw_cpu_to_gpu_gbps": 6,
    }
    base.update(overrides)
    return base


def _write(tmp_path, doc):
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(doc))
    return path


def test_load_errors(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    with pytest.raises(UnreadableSource):
        load_catalog(empty)
    with pytest.raises(UnreadableSource):
        load_catalog(tmp_path / "missing.json")
    with pytest.raises(UnreadableSource):
        load_catalog(_write(tmp_path, {"not_instances": []}))
    with pytest.raises(UnreadableSource):
        load_catalog(_write(tmp_path, {"instances": []}))

    entry = _entry()
    del entry["fp16_tflops"]
    with pytest.raises(MissingField) as err:
        load_catalog(_write(tmp_path, {"instances": [entry]}))
    assert "fp16_tflops" in str(err.value)

    with pytest.raises(NonPositiveValue) as err:
        load_catalog(_write(tmp_path, {"instances": [_entry(gpu_memory_gb=0)]}))
    assert "gpu_memory_gb" in str(err.value)

    with pytest.raises(NonPositiveValue):
        load_catalog(_write(tmp_path, {"instances": [_entry(price_per_hour_usd=-2)]}))

    with pytest.raises(DuplicateName):
        load_catalog(_write(tmp_path, {"instances": [_entry(), _entry()]}))


def test_filter_by_price_examples(aws_catalog):
    assert filter_by_price(aws_catalog, 3.00).names() == aws_catalog.names()
    assert filter_by_price(aws_catalog, 1.00).names() == ("g4dn.xlarge",)
    assert filter_by_price(aws_catalog, 0.01).names() == ()
    with pytest.raises(NonPositiveValue):
        filter_by_price(aws_catalog, 0.0)


def test_filter_preserves_order(aws_catalog):
    kept = filter_by_price(aws_catalog, 1.5)
    assert kept.names() == ("g6.xlarge", "g5.xlarge", "g4dn.xlarge")


def test_round_trip_identity(tmp_path, aws_catalog):
    for fixture in ("aws-table3", "aws-table1"):
        catalog = load_catalog(fixture)
        path = tmp_path / f"{fixture}-copy.json"
        save_catalog(catalog, path)
        reloaded = load_catalog(path)
        assert reloaded.instances == catalog.instances


def test_serialize_uses_documented_keys(aws_catalog):
    doc = serialize_catalog(aws_catalog)
    entry = doc["instances"][0]
    assert set(entry) >= {
        "name",
        "gpu_type",
        "price_per_hour_usd",
        "gpu_memory_gb",
        "fp16_tflops",
        "bw_gpu_to_cpu_gbps",
        "bw_cpu_to_gpu_gbps",
        "gpu_count",
    }


@st.composite
def catalogs(draw):
    n = draw(st.integers(min_value=1, max_value=8))
    instances = tuple(
        InstanceSpec(
            name=f"inst-{i}",
            gpu_type="T4",
            price_per_hour=draw(
                st.floats(min_value=0.01, max_value=50.0, allow_nan=False)
            ),
            gpu_memory=draw(st.integers(min_value=1, max_value=100)) * GB,
            flops=1e12,
            bw_gpu_to_cpu=1e9,
            bw_cpu_to_gpu=1e9,
        )
        for i in range(n)
    )
    return Catalog(instances=instances, source="<generated>")


@given(catalogs(), st.floats(min_value=0.01, max_value=60.0, allow_nan=False))
def test_filter_idempotent_and_monotone(catalog, p_max):
    once = filter_by_price(catalog, p_max)
    assert filter_by_price(once, p_max).names() == once.names()
    assert filter_by_price(catalog, float("inf")).names() == catalog.names()
    looser = filter_by_price(catalog, p_max * 2)
    assert len(looser) >= len(once)
    assert set(once.names()) <= set(looser.names())
