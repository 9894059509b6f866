"""Smoke test for the catprob_py extension module.

Build first:  cargo build --release -p catprob-py --features extension-module
Then run:     python3 python/smoke_test.py
"""

import importlib.util
import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import catprob_py

        return catprob_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for name in ("libcatprob_py.so", "libcatprob_py.dylib", "catprob_py.dll"):
            lib = ROOT / "target" / profile / name
            if lib.exists():
                suffix = ".pyd" if name.endswith(".dll") else ".so"
                dst = Path(tempfile.mkdtemp()) / f"catprob_py{suffix}"
                shutil.copy(lib, dst)
                spec = importlib.util.spec_from_file_location("catprob_py", dst)
                module = importlib.util.module_from_spec(spec)
                spec.loader.exec_module(module)
                return module
    sys.exit("catprob_py not built; see the docstring")


def main():
    cp = load()

    space, p, q = cp.paper_example()
    assert cp.kantorovich(p, q, space) == "3/10"
    assert cp.prokhorov(p, q, space) == "1/2"
    assert cp.wasserstein_primal(p, q, space) == "3/10"

    line = cp.MetricSpace.real_line(["0", "1/2", "1"])
    assert line.points() == ["0", "1", "1/2"]
    assert line.diameter() == "1"
    d = cp.Distribution({"0": "3/5", "1": "2/5"}, carrier=line.points())
    assert d == p
    assert d.weight("1/2") == "0"

    coin = cp.Distribution({"h": "1/2", "t": "1/2"})
    loaded = cp.Distribution({"h": "1/4", "t": "3/4"})
    mix = cp.flatten([(coin, "1/3"), (loaded, "2/3")])
    assert mix.weights() == {"h": "1/3", "t": "2/3"}
    assert coin.pushforward({"h": "x", "t": "x"}, ["x"]).weights() == {"x": "1"}
    assert coin.tensor(loaded).weight("(h,t)") == "3/8"

    g = cp.Polymeasure([["a", "b"], ["u", "v"]], [(["a", "u"], "1/2"), (["b", "v"], "1/2")])
    assert g.eval([["a"], ["u", "v"]]) == "1/2"
    joint = g.extend()
    assert cp.Polymeasure.restrict(joint, g.carriers()) == g
    assert g.marginal(1).weights() == {"u": "1/2", "v": "1/2"}
    assert g.integrate([["1", "0"], ["1", "1"]]) == "1/2"

    laws = {v.check: v.passed for v in cp.law_suite(max_carrier=2, kleisli="inclusion")}
    assert all(laws.values()), laws
    broken = cp.law_suite("broken-mult", max_carrier=2, grid=2)
    assert not next(v for v in broken if v.check.endswith("associativity")).passed

    assert all(v.passed for v in cp.metric_suite(1, draws=20))
    assert all(v.passed for v in cp.star_law_suite(3, draws=10))
    mutant = cp.star_law_suite(3, draws=40, mult="squared-density")
    assert not next(v for v in mutant if v.check == "star.associativity").passed

    text, ok = cp.run_cli(["exactness", "--preset", "and2", "--degree", "2", "--expect", "not-exact"])
    assert ok
    header = json.loads(text.splitlines()[0])
    assert header["values"]["left"] == "4" and header["values"]["right"] == "16", header

    try:
        cp.Distribution({"a": "1/3"})
    except ValueError as e:
        assert "1/3" in str(e)
    else:
        raise AssertionError("unnormalised weights were accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
