"""Smoke test for the courant_py extension.

Build first:  cargo build --release -p courant-python --features extension-module
Then run:     python3 python/smoke_test.py
Set COURANT_PY_LIB to point at a different shared library.
"""

import importlib.util
import os
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def load_extension():
    lib = os.environ.get("COURANT_PY_LIB")
    candidates = [Path(lib)] if lib else [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libcourant_py.so", "libcourant_py.dylib", "courant_py.dll")
    ]
    found = next((p for p in candidates if p.exists()), None)
    if found is None:
        sys.exit("courant_py shared library not found; build it with cargo first")
    suffix = ".pyd" if found.suffix == ".dll" else ".so"
    target = Path(tempfile.mkdtemp()) / f"courant_py{suffix}"
    shutil.copy(found, target)
    spec = importlib.util.spec_from_file_location("courant_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def ranks(modules):
    return [m.free_rank for m in modules]


def main():
    cp = load_extension()

    so3 = cp.so3()
    assert so3.is_courant()
    assert so3.master_equation() == "0"
    assert ranks(so3.standard_cohomology(3)) == [1, 0, 0, 1]
    assert so3.bracket_pairing(0, 1, 2) == "1"

    broken = cp.broken_jacobi()
    assert not broken.is_courant()
    assert broken.axiom_report()["jacobi"][1] > 0
    try:
        broken.standard_cohomology(2)
    except cp.CourantException:
        pass
    else:
        raise AssertionError("broken model was accepted")

    su2 = cp.CourantModel.load(str(ROOT / "fixtures" / "su2xR.model"))
    assert su2.ring == "Q[t]"
    h = su2.standard_cohomology()
    assert ranks(h) == [1, 0, 0, 0, 0, 0, 0]
    assert all(m.is_zero() for m in h[1:])
    assert su2.transgression() == su2.transgression_from_form() == [["1"]]
    e4 = su2.page(4)
    assert [k for k, v in e4.items() if not v.is_zero()] == [(0, 0)]

    const = cp.su2_line("1")
    assert ranks(const.standard_cohomology()) == [1, 0, 1, 1, 1, 1, 1]
    assert const.predict() == const.standard_cohomology()
    assert not const.severa_class_equal(cp.su2_line("2"))

    quadratic = cp.su2_line("t^2")
    assert quadratic.standard_cohomology(5)[3].torsion == ["t"]

    t3 = cp.exact_t3("2")
    assert ranks(t3.standard_cohomology()) == [1, 3, 3, 1, 0, 0, 0]
    shifted = t3.b_field_transform({(0, 1): "1"})
    assert shifted.severa_class_equal(t3)

    text = so3.to_json()
    assert cp.CourantModel.parse(text).to_json() == text
    try:
        cp.CourantModel.parse(text.replace("[1, 2, 3]", "[1, 1, 2]"))
    except cp.CourantException as e:
        assert "increasing" in str(e)
    else:
        raise AssertionError("malformed indices were accepted")

    print("courant_py smoke test passed")


if __name__ == "__main__":
    main()
