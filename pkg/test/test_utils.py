# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0
from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from streamforge.configurator.enums import ConfigurationVars
from streamforge.configurator.handler import ConfigurationHandler
from streamforge.utils.generic_utils import ceil_fraction, exact, natural_key
from streamforge.utils.time_utils import ms_to_us, seconds_to_us, us_to_seconds


class TestTime:
    @pytest.mark.parametrize(
        "seconds,expected",
        [
            (0, 0),
            (1, 1_000_000),
            (0.1, 100_000),
            (2.5, 2_500_000),
            ("0.0000001", 1),
            (Fraction(1, 3), 333_334),
        ],
    )
    def test_seconds_to_us_rounds_up(self, seconds, expected):
        assert seconds_to_us(seconds) == expected

    @pytest.mark.parametrize("millis,expected", [(0, 0), (1, 1000), (0.5, 500), (6000, 6_000_000), (0.0001, 1)])
    def test_ms_to_us(self, millis, expected):
        assert ms_to_us(millis) == expected

    @given(st.integers(min_value=0, max_value=10**12))
    def test_whole_microseconds_survive(self, micros):
        assert seconds_to_us(Fraction(micros, 1_000_000)) == micros
        assert us_to_seconds(micros) == pytest.approx(micros / 1_000_000)

    @given(st.fractions(min_value=0, max_value=10**6))
    def test_ceil_fraction(self, value):
        result = ceil_fraction(value)
        assert result >= value
        assert result - 1 < value

    def test_exact_uses_decimal_repr_of_floats(self):
        assert exact(0.1) == Fraction(1, 10)
        assert exact("2.5") == Fraction(5, 2)


class TestNaturalKey:
    def test_orders_numbers_numerically(self):
        ids = ["h10", "h2", "h1", "s1", "h9"]
        assert sorted(ids, key=natural_key) == ["h1", "h2", "h9", "h10", "s1"]

    @given(st.lists(st.integers(min_value=0, max_value=10_000), unique=True))
    def test_host_ids_follow_their_number(self, numbers):
        ids = [f"h{n}" for n in numbers]
        assert sorted(ids, key=natural_key) == [f"h{n}" for n in sorted(numbers)]


class TestConfiguration:
    def test_env_takes_precedence_over_file(self, tmp_path, monkeypatch):
        ini = tmp_path / "streamforge.ini"
        ini.write_text(
            "[DEFAULT]\ncurrent_environment = lab\n\n[lab]\nSTREAMFORGE_OUT = from-file\nSTREAMFORGE_WORKERS = 3\n"
        )
        monkeypatch.delenv("STREAMFORGE_PROFILE", raising=False)
        monkeypatch.delenv("STREAMFORGE_WORKERS", raising=False)
        monkeypatch.setenv("STREAMFORGE_OUT", "from-env")
        handler = ConfigurationHandler(ini)
        config = handler.get_configuration()
        assert handler.get_current_profile() == "lab"
        assert config[ConfigurationVars.OUT_DIR.value] == "from-env"
        assert config[ConfigurationVars.WORKERS.value] == "3"

    def test_missing_file_gives_unset_values(self, tmp_path, monkeypatch):
        for var in ConfigurationVars:
            monkeypatch.delenv(var.value, raising=False)
        monkeypatch.delenv("STREAMFORGE_PROFILE", raising=False)
        handler = ConfigurationHandler(tmp_path / "absent.ini")
        assert all(v is None for v in handler.get_configuration().values())
