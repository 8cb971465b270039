"""Smoke test for the Python bindings: exercises each exported function."""

import json
import sys

import skewgentle


def main() -> int:
    names = skewgentle.fixture_names()
    assert "cyl_d1" in names, names

    d1 = skewgentle.fixture("cyl_d1")
    summary = json.loads(skewgentle.validate(d1))
    assert summary["topology"]["orbifold_points"] == 2, summary

    quiver = json.loads(skewgentle.quiver(skewgentle.fixture("torus_sym")))
    assert quiver["dimension"] == 20, quiver
    assert skewgentle.quiver_dot(d1).startswith("digraph")

    cover = skewgentle.cover(d1)
    assert json.loads(skewgentle.validate(cover))["topology"]["genus"] == 0
    back = skewgentle.quotient_surface(cover)
    assert json.loads(skewgentle.validate(back))["topology"]["orbifold_points"] == 2

    inv = json.loads(skewgentle.invariants(d1))
    assert sorted(inv["cover"]["windings"]) == [-2, -2, 0, 0], inv

    d4 = skewgentle.fixture("cyl_d4")
    assert json.loads(skewgentle.compare(d1, d4))["verdict"] == "EQUIVALENT"
    d2 = skewgentle.fixture("cyl_d2")
    assert json.loads(skewgentle.compare(d1, d2, mode="ghat"))["verdict"] == "NOT_EQUIVALENT"

    try:
        skewgentle.validate("surface s\npoint p kind=boundary\nwobble\n")
    except ValueError as e:
        assert "SYNTAX" in str(e), e
    else:
        raise AssertionError("invalid surface accepted")

    print("python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
