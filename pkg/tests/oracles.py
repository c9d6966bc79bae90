"""Naive scalar-loop oracles, written straight from the printed formulas.

Nothing here calls into the package's numeric code: channels are plain lists
of complex numbers, far users carry their path loss separately and every sum
is an explicit loop accumulated with ``math.fsum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def inner(a, b) -> complex:
    """``a^H b``."""
    re = math.fsum((x.conjugate() * y).real for x, y in zip(a, b))
    im = math.fsum((x.conjugate() * y).imag for x, y in zip(a, b))
    return complex(re, im)


def sqnorm(a) -> float:
    return math.fsum(abs(x) ** 2 for x in a)


@dataclass
class Instance:
    near_h: list          # raw near channels (lists of complex)
    far_h: list           # raw far channels, unit-variance fading
    far_pl: list          # far path loss d**s (divide by it)
    near_w: list
    far_w: list
    near_p: list
    far_p: list
    noise: float
    labels: list | None = None
    rho: float = 1.0

    @property
    def n_near(self):
        return len(self.near_h)

    def users(self):
        """(kind, index) for every user, near first."""
        return [("near", i) for i in range(len(self.near_h))] + [
            ("far", j) for j in range(len(self.far_h))
        ]

    def beam(self, u):
        kind, k = u
        return self.near_w[k] if kind == "near" else self.far_w[k]

    def power(self, u):
        kind, k = u
        return self.near_p[k] if kind == "near" else self.far_p[k]

    def coupling(self, a, b):
        if self.labels is None:
            return 1.0
        us = self.users()
        return 1.0 if self.labels[us.index(a)] == self.labels[us.index(b)] else self.rho


def oracle_near_base(inst: Instance) -> list[float]:
    out = []
    users = inst.users()
    for i in range(inst.n_near):
        me = ("near", i)
        h = inst.near_h[i]
        signal = inst.near_p[i] * abs(inner(h, inst.near_w[i])) ** 2
        terms = []
        for u in users:
            if u == me:
                continue
            terms.append(inst.coupling(me, u) * inst.power(u) * abs(inner(h, inst.beam(u))) ** 2)
        for j in range(len(inst.far_h)):
            u = ("far", j)
            terms.append(-inst.coupling(me, u) * inst.far_p[j] * abs(inner(h, inst.far_w[j])) ** 2)
        terms.append(inst.noise)
        out.append(signal / math.fsum(terms))
    return out


def oracle_far_base(inst: Instance) -> list[float]:
    out = []
    for i, h in enumerate(inst.far_h):
        me = ("far", i)
        pl = inst.far_pl[i]
        signal = inst.far_p[i] * (abs(inner(h, inst.far_w[i])) ** 2 / pl)
        terms = []
        for u in inst.users():
            if u == me:
                continue
            terms.append(inst.coupling(me, u) * inst.power(u) * (abs(inner(h, inst.beam(u))) ** 2 / pl))
        terms.append(inst.noise)
        out.append(signal / math.fsum(terms))
    return out


def _effective_far(inst: Instance, j: int):
    s = math.sqrt(1.0 / inst.far_pl[j])
    return [x * s for x in inst.far_h[j]]


def _population(inst: Instance, near: bool):
    if near:
        return [("near", i) for i in range(inst.n_near)], inst.near_h, inst.near_w
    hs = [_effective_far(inst, j) for j in range(len(inst.far_h))]
    return [("far", j) for j in range(len(inst.far_h))], hs, inst.far_w


def oracle_scheduled(inst: Instance, near: bool, weighted: bool, form: str = "literal") -> list[float]:
    """Equal share (``weighted=False``) or beam-magnitude weights per policy."""
    users, hs, ws = _population(inst, near)
    u_count = len(users)
    total = math.fsum(inst.near_p if near else inst.far_p)
    if weighted:
        mags = [sqnorm(w) for w in ws]
        denom = math.fsum(mags)
        share = [total * m / denom for m in mags] if denom > 0 else [total / u_count] * u_count
    else:
        share = [total / u_count] * u_count
    out = []
    for i in range(u_count):
        signal = share[i] * abs(inner(hs[i], ws[i])) ** 2
        terms = []
        for m in range(u_count):
            if m == i:
                continue
            victim = hs[m] if (near and form == "literal") else hs[i]
            terms.append(inst.coupling(users[i], users[m]) * share[m] * abs(inner(victim, ws[m])) ** 2)
        terms.append(inst.noise)
        out.append(signal / math.fsum(terms))
    return out


def oracle_weight(i: int, near_h: list, far_h: list, noise: float) -> float:
    """Interference-adjusted ratio, both interference sums taken literally."""
    h = near_h[i]
    signal = abs(inner(h, h)) ** 2
    everyone = [g for k, g in enumerate(near_h) if k != i] + list(far_h)
    terms = [abs(inner(h, g)) ** 2 for g in everyone]
    terms += [-abs(inner(h, g)) ** 2 for g in far_h]
    terms.append(noise)
    return signal / math.fsum(terms)


def project_out(v, basis):
    """Gram-Schmidt residual of ``v`` against ``basis`` (modified GS, twice)."""
    q = []
    for b in basis:
        r = list(b)
        for _ in range(2):
            for e in q:
                c = inner(e, r)
                r = [x - c * y for x, y in zip(r, e)]
        n = math.sqrt(sqnorm(r))
        q.append([x / n for x in r])
    r = list(v)
    for _ in range(2):
        for e in q:
            c = inner(e, r)
            r = [x - c * y for x, y in zip(r, e)]
    return r
