"""
Tests for environment configuration and the server entry point.
"""

import logging
from unittest.mock import patch

import pytest

from src.dqcrcx import config, server


class TestEnvironment:
    """Test DQCRCX_* environment variables."""

    def test_defaults(self, clean_env):
        """Test defaults when nothing is set."""
        assert config.get_threads() == 1
        assert config.get_width_cap() == 24
        assert config.get_trajectories() == 20000
        assert config.get_log_level() == logging.INFO

    @patch.dict("os.environ", {"DQCRCX_THREADS": "4", "DQCRCX_WIDTH_CAP": "16", "DQCRCX_TRAJECTORIES": "500"})
    def test_overrides(self):
        """Test that set variables win."""
        assert config.get_threads() == 4
        assert config.get_width_cap() == 16
        assert config.get_trajectories() == 500

    @patch.dict("os.environ", {"DQCRCX_THREADS": "many"})
    def test_non_integer(self):
        """Test that malformed integers raise ValueError."""
        with pytest.raises(ValueError):
            config.get_threads()

    @patch.dict("os.environ", {"DQCRCX_TRAJECTORIES": "0"})
    def test_non_positive(self):
        """Test that counts must be positive."""
        with pytest.raises(ValueError):
            config.get_trajectories()

    @patch.dict("os.environ", {"DQCRCX_LOG_LEVEL": "debug"})
    def test_log_level(self):
        """Test case-insensitive level names."""
        assert config.get_log_level() == logging.DEBUG

    @patch.dict("os.environ", {"DQCRCX_LOG_LEVEL": "chatty"})
    def test_unknown_log_level(self):
        """Test that unknown names fall back to INFO."""
        assert config.get_log_level() == logging.INFO

    def test_executor(self, clean_env):
        """Test the worker pool kind."""
        assert config.get_executor() == "thread"
        with patch.dict("os.environ", {"DQCRCX_EXECUTOR": "Process"}):
            assert config.get_executor() == "process"
        with patch.dict("os.environ", {"DQCRCX_EXECUTOR": "gpu"}):
            with pytest.raises(ValueError):
                config.get_executor()


class TestServerMain:
    """Test the MCP server entry point."""

    @patch("src.dqcrcx.server.mcp")
    def test_runs_server(self, mock_mcp, clean_env):
        """Test that a valid environment starts the server."""
        server.main()
        mock_mcp.run.assert_called_once()

    @patch.dict("os.environ", {"DQCRCX_THREADS": "-2"})
    @patch("src.dqcrcx.server.mcp")
    def test_bad_environment_exits(self, mock_mcp):
        """Test that a bad thread count stops startup."""
        with pytest.raises(SystemExit) as excinfo:
            server.main()
        assert excinfo.value.code == 1
        mock_mcp.run.assert_not_called()

    @patch.dict("os.environ", {"DQCRCX_EXECUTOR": "cluster"})
    @patch("src.dqcrcx.server.mcp")
    def test_bad_executor_exits(self, mock_mcp):
        """Test that an unknown worker pool kind stops startup."""
        with pytest.raises(SystemExit) as excinfo:
            server.main()
        assert excinfo.value.code == 1
        mock_mcp.run.assert_not_called()
