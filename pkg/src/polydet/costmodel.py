"""Closed-form nominal costs of every protocol, as implemented here.

"Nominal" means the schedule when no Las Vegas draw fails; redraws are
metered separately (``retry_*`` counters) and never change these numbers.
Each function returns rounds and triples per kind for ONE instance; batched
runs multiply triples and bits by the batch size and keep the rounds.

Derivations, bottom up (t = number of factors, n = matrix size, d = degree
bound, m = series length, b = ceil(log2 q)):

    reveal               1 round,  size·b bits
    beaver_mul           1 round,  1 triple of the ring, 2·size·b bits
    rand_units(t)        2 rounds, t test triples (field for GF(q) and series
                         constant terms, extfield for K[X]/f)
    inverse_field        2 rounds, 1 triple of the base kind
    inverse_series       2 rounds, 1 field + 1 series (mask test || a·r)
    fan_in_mul(t)        5 rounds, 3t+2 triples of the ring
    rand_inv_mat(n)      rand_units(2n) then (U·L || fan_in(2n)):
                         7 rounds, 8n+2 base, 1 matrix
    rand_inv_mat, no det 3 rounds, 2n base, 1 matrix
    det_field_invertible rand_inv_mat then (inverse || A·H and open):
                         9 rounds, 8n+3 base, 2 matrix
    det_field_general    n+1 invertible runs in parallel: 9 rounds,
                         (n+1)(8n+3) base, 2(n+1) matrix
    evalinterp           nd+1 general runs in parallel: 9 rounds
    rand_mat_poly_det    7 rounds, 2n field, 6n+2 series, 1 polymatrix
    det_modx             9 rounds, 2n+1 field, 6n+3 series, 2 polymatrix
    det_modx_general     n+1 det_modx in parallel (+1 round if the points
                         are opened rather than drawn from the public coin)
    det_modf             det_field_general over K[X]/f: extfield/extmatrix
    bt_poly(m)           1 round, 2m-1 field
    bt_mat(n)            1 round, n^3 field
    bt_polymat(n, d)     1 round, 2d+1 matrix
"""

from __future__ import annotations

from dataclasses import dataclass, field

# exponent of matrix multiplication used when converting matrix-kind triples
# to field-triple equivalents; the implementation itself is schoolbook
OMEGA = 3


@dataclass(frozen=True)
class Cost:
    rounds: int
    triples: dict = field(default_factory=dict)

    def scaled(self, k: int) -> "Cost":
        return Cost(self.rounds, {kind: v * k for kind, v in self.triples.items()})


def element_bits(q: int) -> int:
    return (q - 1).bit_length()


def beaver_bits(size: int, q: int) -> int:
    return 2 * size * element_bits(q)


def mul_polymat_bits(n: int, d: int, q: int) -> int:
    return 2 * n * n * (d + 1) * element_bits(q)


def reveal_bits(size: int, q: int) -> int:
    return size * element_bits(q)


def beaver(kind: str) -> Cost:
    return Cost(1, {kind: 1})


def rand_units(t: int, test_kind: str = "field") -> Cost:
    return Cost(2, {test_kind: t})


def inverse_field(kind: str = "field") -> Cost:
    return Cost(2, {kind: 1})


def inverse_series() -> Cost:
    return Cost(2, {"field": 1, "series": 1})


def fan_in(t: int, kind: str = "field") -> Cost:
    return Cost(5, {kind: 3 * t + 2})


def _mat_kind(base: str) -> str:
    return {"field": "matrix", "extfield": "extmatrix"}[base]


def rand_inv_mat(n: int, base: str = "field", with_det: bool = True) -> Cost:
    if with_det:
        return Cost(7, {base: 8 * n + 2, _mat_kind(base): 1})
    return Cost(3, {base: 2 * n, _mat_kind(base): 1})


def rand_inv_polymat(n: int, d: int) -> Cost:
    return rand_inv_mat(n, with_det=False)


def det_field_invertible(n: int, base: str = "field") -> Cost:
    return Cost(9, {base: 8 * n + 3, _mat_kind(base): 2})


def det_field_general(n: int, base: str = "field") -> Cost:
    return det_field_invertible(n, base).scaled(n + 1)


def det_eval_interpol(n: int, d: int) -> Cost:
    return det_field_general(n).scaled(n * d + 1)


def rand_mat_poly_det(n: int) -> Cost:
    return Cost(7, {"field": 2 * n, "series": 6 * n + 2, "polymatrix": 1})


def det_modx(n: int) -> Cost:
    return Cost(9, {"field": 2 * n + 1, "series": 6 * n + 3, "polymatrix": 2})


def det_modx_general(n: int, reveal_z: bool = False) -> Cost:
    c = det_modx(n).scaled(n + 1)
    return Cost(c.rounds + (1 if reveal_z else 0), c.triples)


def det_modf(n: int) -> Cost:
    return det_field_general(n, "extfield")


def bt_poly(m: int) -> Cost:
    return Cost(1, {"field": 2 * m - 1})


def bt_mat(n: int) -> Cost:
    return Cost(1, {"field": n**3})


def bt_polymat(n: int, d: int) -> Cost:
    return Cost(1, {"matrix": 2 * d + 1})


def method_cost(method: str, n: int, d: int) -> Cost:
    return {
        "evalinterp": lambda: det_eval_interpol(n, d),
        "modx": lambda: det_modx(n),
        "modx-general": lambda: det_modx_general(n),
        "modf": lambda: det_modf(n),
    }[method]()


# kinds each method may touch; every other column must stay at zero
ALLOWED_KINDS = {
    "evalinterp": {"field", "matrix"},
    "modx": {"field", "series", "polymatrix"},
    "modx-general": {"field", "series", "polymatrix"},
    "modf": {"extfield", "extmatrix"},
}

ALL_KINDS = ("field", "series", "matrix", "polymatrix", "extfield", "extmatrix")


def field_equivalent(triples: dict, n: int, d: int, include_matrix: bool = True) -> int:
    """Express a triple bill in field triples via the generation protocols.

    A series(m) triple costs 2m-1 field triples, a matrix triple n^OMEGA,
    and a polynomial-matrix triple of degree bound D costs 2D+1 matrix
    triples. The masks of the mod-X method live at m = nd+1, D = nd.
    """
    nd = n * d
    m = nd + 1
    total = triples.get("field", 0) + triples.get("series", 0) * (2 * m - 1)
    if include_matrix:
        total += triples.get("matrix", 0) * n**OMEGA
        total += triples.get("polymatrix", 0) * (2 * nd + 1) * n**OMEGA
    return total
