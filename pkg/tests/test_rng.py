import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from virtperm.rng import Stream, as_stream, keyed_uniforms, philox4x64, stack_keys, to_unit

u64 = st.integers(0, 2 ** 64 - 1)


@settings(max_examples=50, deadline=None)
@given(key=st.tuples(u64, u64), counter=st.tuples(st.integers(0, 2 ** 64 - 2), u64, u64, u64))
def test_philox_matches_numpy(key, counter):
    # numpy's Philox increments its counter before producing a block
    bg = np.random.Philox(counter=np.array(counter, dtype=np.uint64), key=np.array(key, dtype=np.uint64))
    expected = bg.random_raw(4)
    bumped = (counter[0] + 1,) + counter[1:]
    got = philox4x64(np.array(bumped, dtype=np.uint64), np.array(key, dtype=np.uint64))
    assert got.tolist() == expected.tolist()


def test_philox_broadcasts():
    keys = np.array([[1, 2], [3, 4]], dtype=np.uint64)
    ctr = np.zeros((3, 4), dtype=np.uint64)
    ctr[:, 0] = [0, 1, 2]
    out = philox4x64(ctr[None, :, :], keys[:, None, :])
    assert out.shape == (2, 3, 4)
    for i in range(2):
        for j in range(3):
            assert out[i, j].tolist() == philox4x64(ctr[j], keys[i]).tolist()


def test_to_unit_open_interval():
    words = np.array([0, 2 ** 64 - 1, 2 ** 63], dtype=np.uint64)
    u = to_unit(words)
    assert np.all(u > 0.0) and np.all(u < 1.0)
    assert u[2] == pytest.approx(0.5)


def test_stream_children_match_child():
    s = Stream.from_seed(12345).child(7)
    keys = s.children(range(50))
    assert [tuple(int(v) for v in k) for k in keys] == [s.child(i).key for i in range(50)]
    assert stack_keys([s.child(i) for i in range(3)]).tolist() == keys[:3].tolist()


def test_child_paths_are_distinct_and_deterministic():
    s = Stream.from_seed(1)
    keys = {s.child(a, b).key for a in range(10) for b in range(10)}
    assert len(keys) == 100
    assert s.child(3, 4) == Stream.from_seed(1).child(3).child(4)
    assert s.child(1, 2) != s.child(2, 1)


def test_uniforms_depend_only_on_counter():
    s = Stream.from_seed(99)
    full = s.uniforms(np.arange(100, dtype=np.uint64), words=2)
    part = s.uniforms(np.array([5, 50, 7], dtype=np.uint64), words=2)
    assert part.tolist() == full[[5, 50, 7]].tolist()
    assert s.uniforms(np.arange(5, dtype=np.uint64), slot=1).tolist() != full[:5, 0].tolist()
    batch = keyed_uniforms(s.key_array()[None, None, :], np.arange(100, dtype=np.uint64)[None, :], words=2)
    assert batch[0].tolist() == full.tolist()


def test_uniform_moments():
    u = Stream.from_seed(3).uniforms(np.arange(200_000, dtype=np.uint64))
    assert abs(u.mean() - 0.5) < 0.003
    assert abs(u.var() - 1 / 12) < 0.001


def test_as_stream():
    assert as_stream(5) == Stream.from_seed(5)
    s = Stream((1, 2))
    assert as_stream(s) is s
    with pytest.raises(TypeError):
        as_stream("5")
    with pytest.raises(TypeError):
        as_stream(True)
    with pytest.raises(ValueError):
        Stream.from_seed(-1)
