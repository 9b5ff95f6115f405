import numpy as np
import pytest

from ucadmn.errors import ParseError, StubResonance
from ucadmn.netcore import is_lossless
from ucadmn.netlist import Netlist, kron_reduce
from ucadmn.rfelements import TransmissionLine, abcd_to_s, open_stub_admittance, shunt_abcd, tl_abcd

F0 = 2e9


def _chain():
    net = Netlist(["a", "b"], [], F0)
    net.add("TL", 50, 0.8, "a", "m", role="in")
    net.add("STUB", 30, 0.4, "m", role="stub")
    net.add("TL", 75, 1.3, "m", "b", role="out")
    return net


def test_cascade_matches_abcd_chain():
    net = _chain()
    for f in (0.8 * F0, F0, 1.3 * F0):
        abcd = (
            tl_abcd(TransmissionLine(50, 0.8, F0), f)
            @ shunt_abcd(open_stub_admittance(TransmissionLine(30, 0.4, F0), f))
            @ tl_abcd(TransmissionLine(75, 1.3, F0), f)
        )
        s = net.s_network(f).matrix
        assert np.max(np.abs(s - abcd_to_s(abcd))) < 1e-12


def test_vectorized_matches_single():
    net = _chain()
    fs = np.linspace(0.5, 1.5, 7) * F0
    stack = net.y_matrices(fs)
    for f, y in zip(fs, stack):
        assert np.max(np.abs(y - net.y_network(f).matrix)) < 1e-14


def test_lossless_over_sweep():
    net = _chain()
    for f in np.linspace(0.5, 1.5, 31) * F0:
        assert is_lossless(net.s_network(f), 1e-10)


def test_lossy_elements_are_lossy():
    net = Netlist(["a", "b"], [], F0)
    net.add("TL", 50, 2.0, "a", "b")
    lossy = net.with_params(net.params())
    lossy.elements[0] = lossy.elements[0].__class__("TL", 50, 2.0, "a", "b", 0.5)
    assert not is_lossless(lossy.s_network(F0), 1e-6)


def test_text_round_trip(tmp_path):
    net = _chain()
    path = tmp_path / "chain.net"
    net.write(path)
    back = Netlist.read(path)
    assert back.ports == net.ports and back.f0 == net.f0
    assert [(e.kind, e.z, e.theta, e.node_a, e.node_b, e.role) for e in back.elements] == [
        (e.kind, e.z, e.theta, e.node_a, e.node_b, e.role) for e in net.elements
    ]
    assert path.read_text() == net.to_text()


def test_groups_by_role():
    net = _chain()
    net.add("STUB", 30, 0.4, "b", role="stub")
    assert net.groups() == [[0], [1, 3], [2]]


@pytest.mark.parametrize(
    "text,line",
    [
        ("F0 1e9\nPORTS a\nTL 50 1.0 a\n", 3),
        ("F0 1e9\nPORTS a\nXX 50 1 a 0\n", 3),
        ("F0 1e9\nPORTS a\nTL fifty 1 a 0\n", 3),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        Netlist.from_text(text)
    assert exc.value.line == line


def test_missing_header():
    with pytest.raises(ParseError):
        Netlist.from_text("TL 50 1 a 0\n")


def test_stub_resonance_raises():
    net = Netlist(["a"], [], F0)
    net.add("STUB", 50, np.pi / 2, "a")
    with pytest.raises(StubResonance):
        net.y_network(F0)


def test_kron_reduce_against_inverse(rng):
    m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    y = m + m.T + 5 * np.eye(5)
    red = kron_reduce(y, 2)
    # the reduced admittance inverts to the corresponding block of the impedance matrix
    assert np.max(np.abs(np.linalg.inv(red) - np.linalg.inv(y)[:2, :2])) < 1e-12
