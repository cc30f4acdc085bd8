"""
Tests for the Drift Lab MCP server and its tools
"""

import json

import pytest
from fastmcp import Client

from lab_server import mcp
from tools import common


@pytest.fixture
def client():
    return Client(mcp)


def test_cache_key_generation():
    """Cache keys are independent of parameter order"""
    first = common.get_cache_key("solve", {"preset": "scenario-u", "nodes": 512})
    second = common.get_cache_key("solve", {"nodes": 512, "preset": "scenario-u"})
    assert first == second
    assert first.startswith("solve:")
    assert "scenario-u" in first


def test_cache_set_and_get():
    common.set_cache("key", {"success": True, "value": 1})
    assert common.get_cached("key") == {"success": True, "value": 1}


def test_cache_expiration():
    common._cache["key"] = {"data": {"success": True}, "timestamp": 0}
    assert common.get_cached("key") is None
    assert "key" not in common._cache


def test_cache_disabled_by_zero_ttl(monkeypatch):
    monkeypatch.setenv("LAB_CACHE_TTL", "0")
    common.set_cache("key", {"success": True})
    assert common.get_cached("key") is None


def test_resolve_config_needs_exactly_one_source():
    with pytest.raises(common.ConfigurationError):
        common.resolve_config(None, None)
    with pytest.raises(common.ConfigurationError):
        common.resolve_config("scenario-u", {"dimension": 3})


def test_downsample_keeps_endpoints():
    rows = list(range(1000))
    sampled = common.downsample(rows, limit=11)
    assert len(sampled) == 11
    assert sampled[0] == 0 and sampled[-1] == 999
    assert common.downsample(rows[:5], limit=11) == rows[:5]


@pytest.mark.asyncio
async def test_run_lab_call_translates_errors():
    def broken():
        raise common.LabError("grid too short")

    result = await common.run_lab_call("broken", {}, broken)
    assert result == {"success": False, "error": "grid too short", "error_type": "LabError"}


@pytest.mark.asyncio
async def test_run_lab_call_caches_success():
    calls = []

    def compute():
        calls.append(1)
        return {"value": 42}

    first = await common.run_lab_call("answer", {"x": 1}, compute)
    second = await common.run_lab_call("answer", {"x": 1}, compute)
    assert first == {"success": True, "value": 42}
    assert second["from_cache"] is True
    assert len(calls) == 1


@pytest.mark.asyncio
async def test_tools_are_registered(client):
    async with client:
        tools = {tool.name for tool in await client.list_tools()}
    assert tools == {
        "list_presets",
        "check_scenario",
        "solve_scenario",
        "run_dichotomy",
        "run_gamma_family",
        "reproduce_dichotomy",
        "classify_growth",
        "admissible_parameters",
    }


@pytest.mark.asyncio
async def test_lab_resource(client):
    async with client:
        contents = await client.read_resource("config://lab")
    document = json.loads(contents[0].text)
    assert document["server_name"] == "Drift Lab"
    assert "scenario-u" in document["presets"]
    assert document["default_nodes"] == 4096


@pytest.mark.asyncio
async def test_list_presets_tool(client):
    async with client:
        result = await client.call_tool("list_presets", {"include_documents": True})
    data = result.data
    assert data["success"] is True
    assert "model-dichotomy" in data["presets"]
    assert data["documents"]["scenario-u"]["dimension"] == 3


@pytest.mark.asyncio
async def test_solve_scenario_tool(client):
    async with client:
        result = await client.call_tool("solve_scenario", {"preset": "analytic-sinh", "nodes": 1024})
    data = result.data
    assert data["success"] is True
    assert data["passed"] is True
    assert len(data["table"]) <= common.MAX_TABLE_ROWS
    assert data["table"][-1]["u"] == pytest.approx(1.0)


@pytest.mark.asyncio
async def test_check_scenario_tool_with_inline_document(client):
    scenario = {
        "dimension": 3,
        "warping": {"kind": "euclidean"},
        "drift": {"family": "power_affine", "amplitude": 2.0, "exponent": 1.0},
        "potential": {"kind": "constant", "c0": 30.0},
        "weight": {"family": "polynomial", "tau": 6.0},
        "experiment": {"r_star": 1.0, "R_ladder": [5.0, 10.0, 20.0, 40.0]},
    }
    async with client:
        result = await client.call_tool("check_scenario", {"scenario": scenario})
    data = result.data
    assert data["success"] is True
    check = data["report"]["check"]
    assert check["hypotheses"]["linear"]["passed"] is True
    assert check["admissibility"]["feasible"] is True


@pytest.mark.asyncio
async def test_invalid_scenario_is_reported(client):
    async with client:
        result = await client.call_tool("check_scenario", {"scenario": {"dimension": 1}})
    data = result.data
    assert data["success"] is False
    assert data["error_type"] == "ConfigurationError"
    assert "Invalid configuration" in data["error"]


@pytest.mark.asyncio
async def test_dichotomy_tool(client):
    async with client:
        result = await client.call_tool("run_dichotomy", {"preset": "scenario-u"})
    data = result.data
    assert data["success"] is True
    assert data["report"]["dichotomy"]["classification"] == "decay"
    assert len(data["probes"]) == 4


@pytest.mark.asyncio
async def test_classify_growth_tool(client):
    async with client:
        result = await client.call_tool(
            "classify_growth", {"dimension": 3, "warping": {"kind": "power_law", "lambda": 2.0}}
        )
    data = result.data
    assert data["success"] is True
    assert data["growth"]["class"] == "polynomial"
    assert data["growth"]["exact_exponent"] == 5.0


@pytest.mark.asyncio
async def test_admissible_parameters_tool(client):
    arguments = {"regime": "polynomial", "alpha": 1.0, "constant": 2.0, "dimension": 3, "p": 2.0, "c0": 15.0, "parameter": 5.0}
    async with client:
        result = await client.call_tool("admissible_parameters", arguments)
    data = result.data
    assert data["success"] is True
    assert data["admissible"]["threshold_c0"] == pytest.approx(14.75)
    assert data["growth_allowance"] == pytest.approx(1.0)


@pytest.mark.asyncio
async def test_admissible_parameters_rejects_small_p(client):
    arguments = {"regime": "exponential", "alpha": 1.0, "constant": 1.0, "dimension": 3, "p": 1.0, "c0": 2.0, "parameter": 1.5}
    async with client:
        result = await client.call_tool("admissible_parameters", arguments)
    assert result.data["success"] is False
    assert result.data["error_type"] == "InvalidExponentError"
