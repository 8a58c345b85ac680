"""JSON wire formats: rationals as "p/q" strings, dyadic balls as
{"mid","err"}, plus field / ideal / divisor / matrix / result codecs."""

from __future__ import annotations

import json
from fractions import Fraction

from .dyadic import Q, RealBall
from .ideal_arith import HnfIdeal, PrimeIdeal
from .nf_core import FieldElement, NumberField


def rational_to_str(x) -> str:
    x = Q(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def rational_from_str(s) -> Fraction:
    if isinstance(s, int):
        return Q(s)
    if "/" in s:
        num, den = s.split("/")
        return Q(int(num), int(den))
    return Q(int(s))


def ball_to_json(b: RealBall) -> dict:
    return {"mid": rational_to_str(b.mid), "err": rational_to_str(b.rad)}


def ball_from_json(d) -> RealBall:
    return RealBall(rational_from_str(d["mid"]), rational_from_str(d["err"]))


def field_to_json(field: NumberField) -> dict:
    return {"poly": list(field.poly),
            "integral_basis": [[rational_to_str(x) for x in row]
                               for row in field.basis_pb]}


def field_from_json(d) -> NumberField:
    basis = d.get("integral_basis")
    if basis is not None:
        basis = [[rational_from_str(x) for x in row] for row in basis]
        # the power basis needs no explicit matrix
        if basis == [[Q(int(i == j)) for j in range(len(d["poly"]) - 1)]
                     for i in range(len(d["poly"]) - 1)]:
            basis = None
    return NumberField([int(c) for c in d["poly"]], basis)


def ideal_to_json(a: HnfIdeal) -> dict:
    return {"denom": a.denom, "hnf": [list(col) for col in a.hnf]}


def ideal_from_json(field: NumberField, d) -> HnfIdeal:
    return HnfIdeal(field, int(d["denom"]), d["hnf"])


def prime_to_json(p: PrimeIdeal) -> dict:
    out = ideal_to_json(p.hnf)
    out.update({"p": p.p, "e": p.e, "f": p.f})
    return out


def prime_from_json(field: NumberField, d) -> PrimeIdeal:
    return PrimeIdeal(int(d["p"]), ideal_from_json(field, d),
                      int(d["f"]), int(d["e"]))


def element_to_json(e: FieldElement) -> list:
    return [rational_to_str(c) for c in e.coords]


def element_from_json(field: NumberField, data) -> FieldElement:
    return field.element([rational_from_str(c) for c in data])


def divisor_to_json(d) -> dict:
    return {"finite": [{"prime": prime_to_json(p), "exp": e}
                       for p, e in d.finite_part.items()],
            "infinite": [rational_to_str(v.mid) for v in d.infinite_part],
            "err": rational_to_str(max((v.rad for v in d.infinite_part),
                                       default=Q(0)))}


def matrix_to_json(cols, exact: bool = True) -> dict:
    rows = len(cols[0])
    return {"exact": exact, "rows": rows, "cols": len(cols),
            "data": [[rational_to_str(x) for x in col] for col in cols]}


def matrix_from_json(d):
    cols = [[rational_from_str(x) for x in col] for col in d["data"]]
    return cols


def relation_to_json(rel, fb) -> dict:
    return {"alpha": element_to_json(rel.alpha),
            "valuations": list(rel.valuations),
            "total_valuations": list(rel.total_valuations),
            "input_ideal": ideal_to_json(rel.input_ideal),
            "attempts": rel.attempts}


def relation_from_json(field: NumberField, d):
    from .relations import SUnitRelation
    return SUnitRelation(element_from_json(field, d["alpha"]),
                         tuple(d["valuations"]),
                         tuple(d["total_valuations"]),
                         ideal_from_json(field, d["input_ideal"]),
                         int(d["attempts"]))


def result_to_json(res) -> dict:
    tr = res.transcript
    return {
        "class_group": list(res.class_group),
        "regulator": {"mid": res.regulator[0], "err": res.regulator[1]},
        "rank": res.rank,
        "verified": res.verified,
        "sunits": {
            "generators": [element_to_json(g) for g in res.generators],
            "exponent_matrix": [list(r) for r in res.exponent_matrix],
        },
        "transcript": {
            "rank": tr.rank, "expected_rank": tr.expected_rank,
            "class_index": tr.class_index,
            "split_ratio": tr.split_ratio,
            "direct_ratio": tr.direct_ratio,
            "verdict": tr.verdict, "direct_verdict": tr.direct_verdict,
            "d_value": tr.d_value,
            "notes": {k: (v if not isinstance(v, Fraction) else str(v))
                      for k, v in tr.notes.items()},
        },
        "config": res.config_echo,
    }


def dump_relations(path, relations, fb):
    with open(path, "w") as fh:
        for rel in relations:
            fh.write(json.dumps(relation_to_json(rel, fb)) + "\n")


def load_relations(path, field):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(relation_from_json(field, json.loads(line)))
    return out
