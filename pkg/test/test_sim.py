# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamforge.sim.engine import Engine
from streamforge.sim.rng import RandomSource, stream_key
from streamforge.utils.exceptions import HandlerPanic, SchedulingInPastError


class TestEngine:
    def test_dispatch_order_is_time_then_seq(self):
        engine = Engine()
        seen = []
        engine.at(5, "a", "x", lambda: seen.append("late"))
        engine.at(1, "b", "x", lambda: seen.append("first"))
        engine.at(5, "c", "x", lambda: seen.append("late-second"))
        engine.at(1, "d", "x", lambda: seen.append("first-second"))
        engine.run_until(10)
        assert seen == ["first", "first-second", "late", "late-second"]

    @settings(max_examples=50)
    @given(st.lists(st.integers(min_value=0, max_value=1000), min_size=1, max_size=50))
    def test_random_schedules_dispatch_sorted(self, times):
        engine = Engine()
        seen = []
        for index, time in enumerate(times):
            engine.at(time, "t", "x", lambda t=time, i=index: seen.append((t, i)))
        engine.run_until(1000)
        assert seen == sorted(seen)
        assert engine.processed == len(times)

    def test_handlers_can_schedule_same_time(self):
        engine = Engine()
        seen = []

        def first():
            seen.append(engine.now)
            engine.after(0, "t", "x", lambda: seen.append(engine.now))

        engine.at(3, "t", "x", first)
        engine.run_until(3)
        assert seen == [3, 3]

    def test_run_until_is_inclusive_and_advances_clock(self):
        engine = Engine()
        seen = []
        engine.at(10, "t", "x", lambda: seen.append(10))
        engine.at(11, "t", "x", lambda: seen.append(11))
        assert engine.run_until(10) == 10
        assert seen == [10]
        engine.run_until(20)
        assert seen == [10, 11]
        assert engine.now == 20

    def test_cancelled_event_is_skipped(self):
        engine = Engine()
        seen = []
        event = engine.at(1, "t", "x", lambda: seen.append(1))
        event.cancel()
        engine.run_until(5)
        assert seen == []
        assert engine.processed == 0

    def test_scheduling_in_the_past(self):
        engine = Engine()
        engine.at(5, "t", "x", lambda: None)
        engine.run_until(5)
        with pytest.raises(SchedulingInPastError):
            engine.at(4, "t", "x", lambda: None)

    def test_handler_failure_names_the_event(self):
        engine = Engine()

        def boom():
            raise RuntimeError("boom")

        engine.at(7, "h1/broker", "tick", boom)
        with pytest.raises(HandlerPanic) as err:
            engine.run_until(10)
        assert (err.value.time, err.value.target, err.value.kind) == (7, "h1/broker", "tick")

    def test_trace_lines(self):
        engine = Engine(trace=True)
        engine.at(2, "h1/producer", "emit", lambda: None)
        engine.run_until(2)
        assert engine.trace() == ["2 0 h1/producer emit"]
        assert Engine().trace() == []


class TestRandom:
    def test_streams_are_reproducible(self):
        a = RandomSource(7, "link:h1-s1")
        b = RandomSource(7, "link:h1-s1")
        assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]

    def test_streams_are_independent_of_other_draws(self):
        engine = Engine(seed=3)
        first = [engine.rng("x").random() for _ in range(3)]
        other = Engine(seed=3)
        for _ in range(100):
            other.rng("y").random()
        assert [other.rng("x").random() for _ in range(3)] == first

    def test_keys_differ_by_seed_and_stream(self):
        assert stream_key(1, "a") != stream_key(2, "a")
        assert stream_key(1, "a") != stream_key(1, "b")

    def test_weighted_choice_follows_weights(self):
        rng = RandomSource(1, "topics")
        draws = [rng.weighted_choice(["A", "B"], [3, 1]) for _ in range(4000)]
        share = draws.count("A") / len(draws)
        assert 0.72 < share < 0.78

    def test_bernoulli_counts_draws(self):
        rng = RandomSource(1, "loss")
        for _ in range(10):
            rng.bernoulli(0.5)
        assert rng.draws == 10
