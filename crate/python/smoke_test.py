"""Smoke test for the compiled bindings.

Build and install first:  pip install --no-build-isolation -e crates/polespec-py
"""

import json
import pathlib
import sys

import polespec_py as ps

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main():
    text = ps.builtin("boolean(4)")
    assert text.splitlines() == ["1 0 0 0", "0 1 0 0", "0 0 1 0", "0 0 0 1"], text

    mu, nu, rho = ps.first_page(text, 12)
    assert mu[4:8] == [1, 4, 10, 16], mu
    assert nu[8] == 3 and rho[12] == 3

    lat = json.loads(ps.lattice("generic5"))
    assert lat["facts"]["tjurinaSection"] == 10 and lat["facts"]["chiU"] == -1

    report = json.loads(ps.verify_report("boolean4"))
    assert report["passed"], report["identities"]["failures"]
    try:
        import jsonschema
    except ImportError:
        jsonschema = None
    if jsonschema is not None:
        schema = json.loads((ROOT / "schema" / "verify-report.schema.json").read_text())
        jsonschema.validate(report, schema)

    try:
        ps.verify_report("1 0 0 0\n0 1 0 0\n")
    except ValueError as e:
        assert "rank 2" in str(e)
    else:
        raise AssertionError("non-essential input accepted")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
