import numpy as np
import pytest

from hawkesloss.rng import KeyedGenerator, PoissonSheet, RngStream


def test_same_key_same_draws():
    a = RngStream(12345, 7).generator(3).random(10)
    b = RngStream(12345, 7).generator(3).random(10)
    assert np.array_equal(a, b)


def test_distinct_streams_differ():
    a = RngStream(12345, 7).generator(3).random(10)
    b = RngStream(12345, 8).generator(3).random(10)
    c = RngStream(12346, 7).generator(3).random(10)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_tags_give_independent_sources():
    stream = RngStream(9, 0)
    assert not np.array_equal(stream.generator(0).random(5),
                              stream.generator(1).random(5))


def test_child_lineage_distinct():
    stream = RngStream(9, 0)
    assert not np.array_equal(stream.child(1, 2).generator(0).random(5),
                              stream.child(1, 3).generator(0).random(5))
    # child of a child differs from a flat child with the same last index
    assert not np.array_equal(stream.child(1).child(2).generator().random(5),
                              stream.child(2).generator().random(5))


def test_keyed_generator_matches_fresh_generator():
    stream = RngStream(42, 3)
    scratch = KeyedGenerator()
    a = scratch.reset(stream, 5).random(8)
    b = stream.generator(5).random(8)
    assert np.array_equal(a, b)
    # reset really rewinds
    c = scratch.reset(stream, 5).random(8)
    assert np.array_equal(a, c)


def test_negative_seed_handled():
    a = RngStream(-1, 0).generator().random(3)
    b = RngStream(-1, 0).generator().random(3)
    assert np.array_equal(a, b)


class TestPoissonSheet:
    def test_points_inside_domain(self):
        sheet = PoissonSheet(RngStream(1, 0), 2.0)
        sheet.ensure(10.0)
        assert np.all(sheet.times > 0.0) and np.all(sheet.times <= 2.0)
        assert np.all(sheet.thetas >= 0.0) and np.all(sheet.thetas < sheet.cover)
        assert np.all(np.diff(sheet.times) >= 0.0)

    def test_extension_is_consistent(self):
        # growing lazily or all at once realizes the same measure
        lazy = PoissonSheet(RngStream(2, 5), 1.0)
        lazy.ensure(3.0)
        first = (lazy.times.copy(), lazy.thetas.copy())
        lazy.ensure(20.0)
        eager = PoissonSheet(RngStream(2, 5), 1.0)
        eager.ensure(20.0)
        assert np.array_equal(lazy.times, eager.times)
        assert np.array_equal(lazy.thetas, eager.thetas)
        # previously visible points survived the extension
        low = lazy.thetas < PoissonSheet.BAND
        assert np.array_equal(lazy.times[low], first[0][first[1] < PoissonSheet.BAND])

    def test_unit_rate(self):
        # area horizon*cover=16, so the count is Poisson(16)
        counts = []
        for i in range(2000):
            sheet = PoissonSheet(RngStream(3, i), 2.0)
            sheet.ensure(8.0)
            counts.append(sheet.times.size)
        mean = np.mean(counts)
        assert mean == pytest.approx(16.0, abs=3 * np.sqrt(16.0 / 2000))
