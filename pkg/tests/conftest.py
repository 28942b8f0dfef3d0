"""Shared problem definitions and session-cached CAD results.

The larger decompositions take tens of seconds, so every test module pulls
them from these fixtures instead of recomputing.
"""
import pytest
from fractions import Fraction

from cadkit import (
    Clause,
    Constraint,
    FormulaSequence,
    VarOrder,
    ec_cad,
    full_cad,
    implicit_ec,
    parse,
    tticad,
)


@pytest.fixture(scope="session")
def xy():
    return VarOrder(["x", "y"])


@pytest.fixture(scope="session")
def xyzw():
    return VarOrder(["x", "y", "z", "w"])


@pytest.fixture(scope="session")
def example1(xy):
    f = parse("x^2 + y^2 - 4", xy)
    g = parse("x*y - 1", xy)
    formula = FormulaSequence((Clause((Constraint(f, "=", "f"), Constraint(g, "<", "g")), ec=0),))
    return {"f": f, "g": g, "polys": {"f": f, "g": g}, "formula": formula, "order": xy}


def _circle_family(xy):
    f1 = parse("x^2 + y^2 - 1", xy)
    g1 = parse("x*y - 1/4", xy)
    f2 = parse("(x-4)^2 + (y-1)^2 - 1", xy)
    g2 = parse("(x-4)*(y-1) - 1/4", xy)
    f3 = parse("(x+4)^2 + (y+1)^2 - 1", xy)
    g3 = parse("(x+4)*(y+1) - 1/4", xy)
    return {"f1": f1, "g1": g1, "f2": f2, "g2": g2, "f3": f3, "g3": g3}


def _clause(fp, gp, fname, gname, ec=True):
    if ec:
        return Clause((Constraint(fp, "=", fname), Constraint(gp, "<", gname)), ec=0)
    return Clause((Constraint(fp, "<", fname), Constraint(gp, "<", gname)), ec=None)


@pytest.fixture(scope="session")
def circles(xy):
    return _circle_family(xy)


@pytest.fixture(scope="session")
def phis(circles):
    c = circles
    cl1 = _clause(c["f1"], c["g1"], "f1", "g1")
    cl2 = _clause(c["f2"], c["g2"], "f2", "g2")
    cl3 = _clause(c["f3"], c["g3"], "f3", "g3")
    rl1 = _clause(c["f1"], c["g1"], "f1", "g1", ec=False)
    names = [("phi1", (cl1,), ["f1", "g1"]),
             ("phi2", (cl1, cl2), ["f1", "g1", "f2", "g2"]),
             ("phi3", (cl1, cl2, cl3), ["f1", "g1", "f2", "g2", "f3", "g3"]),
             ("relaxed1", (rl1,), ["f1", "g1"]),
             ("relaxed2", (rl1, cl2), ["f1", "g1", "f2", "g2"]),
             ("relaxed3", (rl1, cl2, cl3), ["f1", "g1", "f2", "g2", "f3", "g3"])]
    out = {}
    for key, clauses, keep in names:
        out[key] = {
            "formula": FormulaSequence(clauses),
            "polys": {k: c[k] for k in keep},
        }
    return out


@pytest.fixture(scope="session")
def example4(xyzw):
    f = parse("x + y + z + w", xyzw)
    g = parse("z*y - x^2*w", xyzw)
    formula = FormulaSequence((Clause((Constraint(f, "=", "f"), Constraint(g, "<", "g")), ec=0),))
    return {"f": f, "g": g, "polys": {"f": f, "g": g}, "formula": formula, "order": xyzw}


@pytest.fixture(scope="session")
def example6(xyzw):
    f = parse("z + y*w", xyzw)
    g = parse("y*x + 1", xyzw)
    h = parse("w*(z+1) + 1", xyzw)
    formula = FormulaSequence((Clause(
        (Constraint(f, "=", "f"), Constraint(g, "<", "g"), Constraint(h, "<", "h")), ec=0),))
    return {"f": f, "g": g, "h": h, "polys": {"f": f, "g": g, "h": h},
            "formula": formula, "order": xyzw}


# ---- cached results ------------------------------------------------------

@pytest.fixture(scope="session")
def res_ex1(example1, xy):
    return {
        "full": full_cad(example1["polys"], xy, formula=example1["formula"]),
        "ec": ec_cad(example1["f"], [example1["g"]], xy,
                     named_polys=example1["polys"], formula=example1["formula"]),
        "tti": tticad(example1["formula"], xy, named_polys=example1["polys"]),
    }


@pytest.fixture(scope="session")
def res_phis(phis, xy):
    out = {}
    for key in ("phi1", "phi2", "phi3"):
        entry = phis[key]
        formula = entry["formula"]
        fe = implicit_ec(formula)
        others = [cl.constraints[i].poly for cl in formula.clauses
                  for i in range(len(cl.constraints)) if i != cl.ec]
        out[key] = {
            "full": full_cad(entry["polys"], xy, formula=formula),
            "ec": ec_cad(fe, others, xy, named_polys=entry["polys"], formula=formula),
            "tti": tticad(formula, xy, named_polys=entry["polys"]),
        }
    for key in ("relaxed1", "relaxed2", "relaxed3"):
        entry = phis[key]
        out[key] = {"tti": tticad(entry["formula"], xy, named_polys=entry["polys"])}
    return out


@pytest.fixture(scope="session")
def res_ex4(example4, xyzw):
    return {
        "full": full_cad(example4["polys"], xyzw, formula=example4["formula"]),
        "ec": ec_cad(example4["f"], [example4["g"]], xyzw,
                     named_polys=example4["polys"], formula=example4["formula"]),
    }


@pytest.fixture(scope="session")
def res_ex6(example6, xyzw):
    return {
        "ec": ec_cad(example6["f"], [example6["g"], example6["h"]], xyzw,
                     named_polys=example6["polys"], formula=example6["formula"]),
    }
