import json
import os
import random
import re
from pathlib import Path

import pytest
import sympy as sp
from sympy.calculus.euler import euler_equations

import jetsym

DATA = Path(os.environ.get("JETSYM_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))

t = sp.Symbol("t")
qf = sp.Function("q")(t)
JETS = [sp.Symbol(f"q{k}") for k in range(5)]


def spec(name):
    return (DATA / name).read_text()


def to_sympy(text):
    """Rendered mechanics expression -> sympy, with q^(k) as the symbol qk."""
    text = re.sub(r"q('*)", lambda m: f"q{len(m.group(1))}", text).replace("^", "**")
    text = re.sub(r"\blambda\b", "lambda_", text)
    return sp.sympify(text, locals={s.name: s for s in JETS} | {"lambda_": sp.Symbol("lambda_")})


def from_function(expr):
    subs = {sp.Derivative(qf, (t, k)): JETS[k] for k in range(4, 0, -1)}
    return sp.expand(expr.subs(subs).subs(qf, JETS[0]))


def random_lagrangian(rng):
    # Constant coefficient on q'^2 keeps the system normal.
    a = sp.Rational(rng.randint(1, 4), rng.randint(1, 3))
    b, c, d = (rng.randint(-3, 3) for _ in range(3))
    return a * JETS[1] ** 2 + b * JETS[1] * JETS[0] ** 2 + c * JETS[0] ** 3 + d * JETS[0]


def test_version():
    assert jetsym.__version__ == "0.1.0"
    assert jetsym.SCHEMA_VERSION == 1


@pytest.mark.parametrize("seed", range(10))
def test_euler_lagrange_matches_sympy(seed):
    L = random_lagrangian(random.Random(seed))
    text = "field q\nlagrangian: " + str(L).replace("**", "^").replace("q1", "q'").replace("q0", "q") + "\n"
    rep = jetsym.euler_lagrange(text)
    assert rep.ok, rep.text
    Lf = L.subs({JETS[1]: sp.diff(qf, t), JETS[0]: qf})
    (eq,) = euler_equations(Lf, qf, t)
    assert sp.expand(to_sympy(rep["equations"][0]) - from_function(eq.lhs)) == 0


def test_free_particle_symmetry():
    rep = jetsym.check(spec("free_particle.jsym"), "Xi")
    assert rep.ok
    assert rep["verdict"] == "yes"
    assert sp.expand(to_sympy(rep["A"][0]) + 2 * JETS[2]) == 0
    assert sp.expand(to_sympy(rep["C"]) + JETS[0] * JETS[2]) == 0


def test_counterexample():
    rep = jetsym.check(spec("free_particle.jsym"), "T")
    assert rep["verdict"] == "no"
    assert sp.expand(to_sympy(rep["A_onshell_residue"][0]) + 2 * JETS[1] ** 2) == 0
    assert rep["tangent"] is False


def test_noether_and_validate():
    text = spec("free_particle.jsym")
    lam = sp.Symbol("lambda_")
    rep = jetsym.noether(text, "Xi", "S1")
    assert sp.expand(to_sympy(rep["current"]) - lam * JETS[1] ** 2 / 2) == 0
    assert rep["conserved"] is True
    assert jetsym.noether(text, "Xi", "S2")["current"] == "0"
    assert jetsym.validate(text, "Xi", "S1")["valid"] is True


def test_drag_preserves_solutions(tmp_path):
    out = tmp_path / "drag.csv"
    rep = jetsym.drag(spec("free_particle.jsym"), "Xi", "q=0, q'=1, lambda=1", t_end=0.1, csv=str(out))
    assert rep.ok and rep["preserved"] is True
    rows = out.read_text().splitlines()
    assert rows[0] == "t,q,q'"
    assert len(rows) == 102
    _, q, v = map(float, rows[1].split(","))
    assert q == pytest.approx(sp.E.evalf(), rel=1e-9)
    assert v == pytest.approx(sp.E.evalf(), rel=1e-9)


def test_errors():
    text = spec("free_particle.jsym")
    rep = jetsym.check(text, "Nope")
    assert rep.exit_code == 1 and rep["error"]["kind"]
    rep = jetsym.drag(text, "T", "q=0, q'=1, lambda=1")
    assert rep.exit_code == 2 and rep["error"]["kind"] == "not-tangent"
    with pytest.raises(jetsym.SpecSyntaxError):
        jetsym.normalize_spec("field q\nlagrangian: q''\n")
    assert issubclass(jetsym.SpecSyntaxError, jetsym.JetsymError)


def test_normalize_roundtrip():
    text = spec("harmonic_oscillator.jsym")
    once = jetsym.normalize_spec(text)
    assert jetsym.normalize_spec(once) == once
    assert jetsym.normalize_expression("q'*(q + q')", text) == "q*q' + q'^2"
    json.dumps(jetsym.check(text, "Time").document)
