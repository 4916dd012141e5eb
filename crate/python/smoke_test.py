"""Smoke test for the pfrac_py extension module.

Uses an installed module when available (e.g. after
`maturin develop -m crates/python/Cargo.toml`); otherwise builds the
extension with cargo and loads it from a temporary directory.
"""

import importlib
import os
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("pfrac_py")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "pfrac-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libpfrac_py.so"
    tmp = tempfile.mkdtemp()
    shutil.copy(lib, os.path.join(tmp, "pfrac_py.so"))
    sys.path.insert(0, tmp)
    return importlib.import_module("pfrac_py")


def main():
    pf = load()

    d = pf.decompose(0, "-1,-2,-3", [1, 1, 1])
    print(d)
    assert [c.evaluate() for _, _, c in d.poles] == [Fraction(1, 2), -1, Fraction(1, 2)]

    d = pf.decompose(3, ["a1", "a2", "a3"], [5, 7, 11])
    ok, report = d.verify(20)
    print(report)
    assert ok

    d = pf.decompose(4, "a,b", [1, 2])
    assert d.monomials[-1][0] == 1 and str(d.monomials[-1][1]) == "1"
    x, b = Fraction(7, 3), {"a": 2, "b": Fraction(-1, 5)}
    assert d.evaluate(x, b) == x**4 / ((x - 2) * (x + Fraction(1, 5)) ** 2)

    assert pf.binomial(40, 20) == 137846528820
    assert len(pf.compositions(5, 8)) == 792

    try:
        pf.decompose(0, "a,a", [1, 1])
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("duplicate roots accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
