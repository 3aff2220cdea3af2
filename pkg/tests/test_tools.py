"""
Tests for the MCP tool surface, called through an in-memory client.
"""

import json
from unittest.mock import patch

import pytest
from fastmcp import Client
from fastmcp.exceptions import ToolError

from src.dqcrcx.circuit import dumps, loads
from src.dqcrcx.library import ghz
from src.dqcrcx.tools import mcp


async def _call(name: str, **arguments):
    async with Client(mcp) as client:
        result = await client.call_tool(name, arguments)
    return json.loads(result.content[0].text)


class TestToolRegistration:
    """Test that the server exposes the expected tools and prompt."""

    @pytest.mark.asyncio
    async def test_tool_names(self):
        """Test the registered tool list."""
        async with Client(mcp) as client:
            tools = {tool.name for tool in await client.list_tools()}
            prompts = {prompt.name for prompt in await client.list_prompts()}
        assert tools == {
            "generate_circuit",
            "partition_qubits",
            "build_distributed_circuit",
            "estimate_circuit_fidelity",
            "list_table1_configurations",
        }
        assert "scheduling_study" in prompts


class TestCircuitTools:
    """Test circuit generation and distribution tools."""

    @pytest.mark.asyncio
    async def test_generate_ghz(self):
        """Test the GHZ generator output."""
        result = await _call("generate_circuit", family="ghz", num_qubits=8)
        assert result["cx_count"] == 7
        assert result["depth"] == 8
        assert loads(result["circuit"]) == ghz(8)

    @pytest.mark.asyncio
    async def test_generate_transpiles_grover(self):
        """Test that Grover circuits come back in the basis by default."""
        result = await _call("generate_circuit", family="grover", num_qubits=3, iterations=1)
        assert set(result["histogram"]) <= {"X", "H", "RZ", "CX"}
        raw = await _call("generate_circuit", family="grover", num_qubits=3, iterations=1, transpiled=False)
        assert raw["histogram"]["MCZ"] == 2

    @pytest.mark.asyncio
    async def test_partition(self):
        """Test GP and naive cut weights on GHZ-8."""
        result = await _call("partition_qubits", circuit=dumps(ghz(8)), network="4x2+2")
        assert result["cut_weight"] == 3
        assert result["naive_cut_weight"] == 3
        assert result["assignment"].startswith("qubit,qpu,slot\n")

    @pytest.mark.asyncio
    async def test_build_with_explicit_assignment(self):
        """Test that an explicit assignment overrides the schedule."""
        assignment = "qubit,qpu,slot\n0,0,0\n1,1,0\n2,0,1\n3,1,1\n"
        result = await _call(
            "build_distributed_circuit", circuit=dumps(ghz(4)), network="2x2+1", assignment=assignment
        )
        assert result["summary"]["remote_cx"] == 3
        assert result["summary"]["total_qubits"] == 6
        assert result["assignment"] == assignment
        assert "tag=bell" in result["circuit"]

    @pytest.mark.asyncio
    async def test_capacity_error(self):
        """Test that oversized circuits surface as tool errors."""
        with pytest.raises(ToolError):
            await _call("build_distributed_circuit", circuit=dumps(ghz(8)), network="2x2+1")


class TestFidelityTool:
    """Test the fidelity estimation tool."""

    @pytest.mark.asyncio
    async def test_noiseless_distributed(self):
        """Test a noiseless distributed run."""
        result = await _call(
            "estimate_circuit_fidelity",
            circuit=dumps(ghz(4)),
            network="2x2+1",
            trajectories=20,
            p1=0.0,
            p2=0.0,
            p_ro=0.0,
        )
        assert result["mean"] == pytest.approx(1.0, abs=1e-9)
        assert result["remote_cx"] == 1
        assert result["total_qubits"] == 6
        assert result["convention"] == "squared-overlap"

    @pytest.mark.asyncio
    async def test_oracle(self):
        """Test the exact single-CX value through the oracle flag."""
        circuit = "qubits=2 clbits=0\nCX q0 q1\n"
        result = await _call("estimate_circuit_fidelity", circuit=circuit, p2=0.005, oracle=True)
        assert result["mean"] == pytest.approx(0.996, abs=1e-9)
        assert result["n_trajectories"] == 0

    @pytest.mark.asyncio
    async def test_default_trajectories_from_config(self):
        """Test that the trajectory count falls back to the configured default."""
        with patch("src.dqcrcx.tools.get_trajectories", return_value=25):
            result = await _call("estimate_circuit_fidelity", circuit=dumps(ghz(3)))
        assert result["n_trajectories"] == 25


class TestGridTool:
    """Test the reference grid listing."""

    @pytest.mark.asyncio
    async def test_rows(self):
        """Test ids, networks and totals."""
        rows = await _call("list_table1_configurations")
        assert len(rows) == 19
        assert rows[0]["network"] == "2x2+2"
        assert rows[3]["total_qubits"] == 24
        assert rows[6]["comm_qubits"] == 3
        assert rows[1]["circuit"]["family"] == "ghz"
