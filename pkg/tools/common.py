"""
Common helpers for the Drift Lab MCP tools.

Every tool returns {"success": True, ...} or {"success": False, "error": ...};
library exceptions never escape to the MCP client.
"""

import asyncio
import json
from datetime import datetime
from typing import Any, Callable, Dict, Optional

from driftlab.cli import execute
from driftlab.config import AnyConfig, load_preset, parse_config
from driftlab.errors import ConfigurationError, LabError
from driftlab.settings import get_cache_ttl

MAX_TABLE_ROWS = 65

# Cache
_cache: Dict[str, Dict[str, Any]] = {}


def get_cache_key(kind: str, params: Dict[str, Any]) -> str:
    """Generate cache key."""
    return f"{kind}:{json.dumps(params, sort_keys=True)}"


def get_cached(key: str) -> Optional[Dict[str, Any]]:
    """Get cached result if not expired (TTL read fresh each time)."""
    if key in _cache:
        cached = _cache[key]
        if datetime.now().timestamp() - cached["timestamp"] < get_cache_ttl():
            return cached["data"]
        del _cache[key]
    return None


def set_cache(key: str, data: Dict[str, Any]) -> None:
    _cache[key] = {"data": data, "timestamp": datetime.now().timestamp()}


def clear_cache() -> None:
    _cache.clear()


def resolve_config(preset: Optional[str], scenario: Optional[Dict[str, Any]]) -> AnyConfig:
    """Exactly one of a preset name or an inline scenario document."""
    if (preset is None) == (scenario is None):
        raise ConfigurationError("pass exactly one of 'preset' or 'scenario'")
    if preset is not None:
        return load_preset(preset)
    return parse_config(json.dumps(scenario), "scenario")


async def run_lab_call(kind: str, params: Dict[str, Any], compute: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
    """
    Run a computation off the event loop with caching and error translation.

    Args:
        kind: Cache namespace, usually the tool name
        params: JSON-serialisable parameters identifying the computation
        compute: Zero-argument callable returning the result payload

    Returns:
        Dictionary with success status and the payload or error information
    """
    cache_key = get_cache_key(kind, params)
    cached = get_cached(cache_key)
    if cached is not None:
        return {**cached, "from_cache": True}

    try:
        payload = await asyncio.to_thread(compute)
    except ConfigurationError as e:
        return {"success": False, "error": f"Invalid configuration: {e}", "error_type": "ConfigurationError"}
    except LabError as e:
        return {"success": False, "error": str(e), "error_type": type(e).__name__}
    except Exception as e:
        return {"success": False, "error": f"Unexpected error: {str(e)}", "error_type": type(e).__name__}

    result = {"success": True, **payload}
    set_cache(cache_key, result)
    return result


def downsample(rows: list, limit: int = MAX_TABLE_ROWS) -> list:
    if len(rows) <= limit:
        return rows
    step = (len(rows) - 1) / (limit - 1)
    return [rows[round(k * step)] for k in range(limit)]


async def run_command_tool(
    command: str,
    preset: Optional[str],
    scenario: Optional[Dict[str, Any]],
    nodes: Optional[int] = None,
    strict: bool = False,
) -> Dict[str, Any]:
    """Shared body of the tools that mirror a CLI command."""
    params = {"preset": preset, "scenario": scenario, "nodes": nodes, "strict": strict}

    def compute() -> Dict[str, Any]:
        report = execute(resolve_config(preset, scenario), command, nodes, strict)
        payload: Dict[str, Any] = {
            "passed": report.passed,
            "failures": report.failures,
            "report": report.document(),
        }
        if report.probes:
            payload["probes"] = [{"R": r, "u_at_rstar": u} for r, u in report.probes]
        if report.solution is not None:
            r, u = report.solution
            payload["table"] = downsample([{"r": float(a), "u": float(b)} for a, b in zip(r, u)])
        return payload

    return await run_lab_call(command, params, compute)
