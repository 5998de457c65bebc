"""Smoke test for the prequant_py extension. Exits nonzero on the first failure."""

import json
import pathlib
import sys

import prequant_py as pq

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "crates" / "cli" / "fixtures"


def main():
    r2 = pq.Chart("py_r2", ["x", "y"])
    x, y = r2.scalar("x"), r2.scalar("y")
    assert str(x * y - y * x) == "0"
    assert (x / y) * y == x

    omega = r2.form(2, {"dx^dy": "1"})
    pi = r2.multivector(2, {"x^y": "1"})
    a = pq.DiracStructure.graph_two_form(omega)
    b = pq.DiracStructure.graph_bivector(pi)
    assert a.integrable() and b.integrable()
    assert a.bracket(x, y) == r2.scalar("1")
    assert a.span_equal(b)

    ex = pq.DiracStructure.fixture("example2_6")
    c = ex.chart
    assert ex.char_rank({"x1": "1", "x2": "0"}) == 0
    assert ex.char_rank({"x1": "0", "x2": "0"}) == 2
    assert ex.is_basic(c.scalar("x1^2"))
    assert ex.admissible(c.scalar("x1^2")) == ("not_certified", "x1")

    r3 = pq.Chart("py_r3", ["x", "y", "z"])
    bad = pq.DiracStructure.graph_two_form(r3.form(2, {"dy^dz": "x"}))
    assert not bad.integrable()
    assert bad.integrability_witness() is not None

    sigma = r3.form(1, {"dx": "1", "dy": "z"})
    assert str(sigma.reeb()) == "d/dx", str(sigma.reeb())
    try:
        r3.form(1, {"dx": "1"}).reeb()
        raise AssertionError("dx is not contact")
    except ValueError:
        pass
    contact = pq.DiracJacobiStructure.form_pair(sigma.d(), sigma)
    assert contact.integrable()
    assert contact.diracization().integrable()

    torus = pq.PreqData.fixture("torus")
    assert torus.lbar().integrable()
    assert len(torus.tangent_distribution()) == 1
    assert torus.leaf({"x1": "0", "x2": "0", "x3": "1"}) == "precontact"

    su2 = pq.PreqData.fixture("su2", c=1)
    t = su2.base.chart.scalar("(t - 1)/t")
    assert su2.hamiltonian(t).is_zero()
    assert su2.residual_is_zero()
    assert su2.leaf({"phi": "0", "z": "0", "t": "2"}) == "lcp"

    sr = pq.PreqData.fixture("symplectic_r2")
    w, _ = sr.graded_bracket(1, sr.base.chart.scalar("x"), -2, sr.base.chart.scalar("y"))
    assert w == -1

    for f in sorted(FIXTURES.glob("*.json")):
        code, out = pq.check_manifest(f.read_text())
        rep = json.loads(out)
        assert code == 0, (f.name, out)
        print(f"{f.stem}: {rep['summary']['passed']}/{rep['summary']['total']}")

    code, msg = pq.check_manifest('{"checks": [{"id": "a", "op": "basic", "structure": "L", "f": "x"}]}')
    assert code == 2 and "unknown structure" in msg, msg

    print("smoke ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
