"""Smoke test for the fuchsian_py extension.

Build first with `cargo build -p fuchsian-py` (or `--release`). The library is
located through FUCHSIAN_PY_LIB or the cargo target directory.
"""

import importlib.util
import json
import os
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    candidates = [os.environ.get("FUCHSIAN_PY_LIB")] + [
        str(ROOT / "target" / profile / name)
        for profile in ("release", "debug")
        for name in ("libfuchsian_py.so", "libfuchsian_py.dylib", "fuchsian_py.dll")
    ]
    for c in candidates:
        if c and Path(c).exists():
            tmp = Path(tempfile.mkdtemp())
            target = tmp / ("fuchsian_py.pyd" if c.endswith(".dll") else "fuchsian_py.so")
            shutil.copy(c, target)
            spec = importlib.util.spec_from_file_location("fuchsian_py", target)
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("fuchsian_py library not found; run `cargo build -p fuchsian-py`")


def main():
    fp = load()

    assert fp.eval_constant("I3plus", 60).startswith(
        "0.000814462565662504439391217128562721997861158118508"
    )

    chi1 = ["0"] + [str(2 * 4 ** (k - 1)) for k in range(1, 31)]
    ode = fp.guess_ode(chi1, 3, 3)
    assert ode is not None and ode.order == 1
    assert ode.coeffs() == [["-1"], ["0", "1", "-4"]]
    assert ode == fp.Ode([["-1"], ["0", "1", "-4"]])

    g = fp.Ode.gauss("1/3", "1/5", "1/2")
    labels = [p[0] for p in g.singular_points()]
    assert labels == ["0", "1", "infinity"], labels
    basis = json.loads(g.frobenius("0", 10))
    assert all(basis["annihilation"])
    c = g.connect("0", "1", 30)
    assert len(c) == 2 and len(c[0]) == 2
    mono = json.loads(g.monodromy("0", ["0", "1", "inf"], 30))
    assert not mono["product_relation"]["flagged"]

    assert fp.Ode([["0"], ["-2"], ["0", "1"]]).is_apparent("0")
    assert not fp.Ode([["0"], ["1"], ["0", "1"]]).is_apparent("0")

    ws = sorted(float(w) for w, _ in fp.nickel_singularities(1) if w is not None)
    assert ws == [-0.5, 1.0], ws
    s = fp.chi_tilde_series(2, 12)
    assert s[4] == "8"

    rec = json.loads(fp.recognize([[("0.5", "0")]], ["1", "pi"], 40))
    assert not rec["unresolved"]

    report = json.loads(fp.chi3_fixture_report())
    assert all(i["holds"] for i in report["identities"])

    try:
        fp.recognize([[("0.5", "0")]], ["1", "pi"], 20)
    except fp.PrecisionError:
        pass
    else:
        raise AssertionError("expected PrecisionError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
