import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cfmasim.modulation import (ModulationSpec, constellation_csv, int_to_stack, map_bpsk, map_pam,
                                map_qam, stack_to_int)


@pytest.mark.parametrize("u, P, x", [(0, 1.0, -1.0), (1, 4.0, 2.0), (1, 0.25, 0.5)])
def test_bpsk(u, P, x):
    assert map_bpsk(u, P) == pytest.approx(x)


def test_bpsk_rejects_power():
    with pytest.raises(ValueError):
        map_bpsk(1, 0.0)


@given(st.integers(0, 1), st.floats(1e-3, 1e3))
def test_pam_reduces_to_bpsk(u, P):
    assert map_pam([u], P, 1) == pytest.approx(map_bpsk(u, P))


@pytest.mark.parametrize("bits, x", [((0, 0), -3.0), ((1, 0), -1.0), ((0, 1), 1.0), ((1, 1), 3.0)])
def test_pam_L2(bits, x):
    assert map_pam(np.array(bits), 5.0, 2) == pytest.approx(x)


def test_pam_wrong_bits():
    with pytest.raises(ValueError):
        map_pam([0, 1, 1], 5.0, 2)


@pytest.mark.parametrize("L", [1, 2, 3])
@pytest.mark.parametrize("family", ["pam", "qam"])
def test_power_normalization(L, family):
    spec = ModulationSpec(family, 3.7, L)
    pts = spec.constellation()
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(3.7, abs=1e-12)
    assert len(np.unique(np.round(pts, 12))) == len(pts)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_pam_monotone(L):
    x = map_pam(int_to_stack(np.arange(2 ** L), L), 2.0, L)
    assert np.all(np.diff(x) > 0)


def test_qam_examples():
    assert map_qam([0], [0], 2.0, 1, 0.0) == pytest.approx(-1 - 1j)
    pts = [map_qam([a], [b], 2.0, 1) for a, b in itertools.product((0, 1), repeat=2)]
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(2.0)
    assert map_qam([0], [0], 2.0, 1, np.pi / 2) == pytest.approx(1 - 1j)


def test_qam_interleaving():
    spec = ModulationSpec("qam", 2.0, 1)
    x = spec.modulate(np.array([[1, 0, 0, 1]]))
    assert x == pytest.approx([-1 + 1j, 1 - 1j])


def test_spec_invariants():
    with pytest.raises(ValueError):
        ModulationSpec("bpsk", 1.0, 2)
    with pytest.raises(ValueError):
        ModulationSpec("pam", 1.0, 2, 0.3)
    with pytest.raises(ValueError):
        ModulationSpec("qam", -1.0, 1)


@given(st.lists(st.integers(0, 15), min_size=1, max_size=20))
def test_stack_roundtrip(us):
    assert np.array_equal(stack_to_int(int_to_stack(us, 4)), us)


def test_constellation_csv():
    text = constellation_csv(ModulationSpec("pam", 5.0, 2))
    assert text.splitlines()[0] == "index,real,imag"
    assert text.splitlines()[1] == "0,-3,0"
