"""Degreewise F3 homology of the four-column complex on the q=0 line.

The differential preserves internal degree t and raises the column, so the
complex splits into tiny matrices per degree.  Each column is truncated to
a finite window before elimination:

  columns 0,3: tower index a//6 < J            (J slots per degree)
  columns 1,2: v1-exponent a < 6V              (the windows must advance at
                                                the same degree speed, 6 per
                                                slot, or boundary junk never
                                                stabilizes under cap doubling)

Truncation is never silent: an in-window source whose single image term
falls outside the target window gets a virtual row holding that term, and
the overflow is recorded.  Kernels are computed with the virtual rows
present (the true image of such a source is nonzero); ranks feeding the
homology subtraction use only the kept rows (an overflowed column
contributes nothing inside the window).
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .d1 import DEFAULT_FORMULAS, D1Formulas, d1_generator
from .e1 import DEFAULT_CAPS, FiltrationCaps, adapted_line
from .witt import DomainError

COLUMN_STRETCH = 6  # degree speed shared by all four truncation windows


class AssemblyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ColumnMap:
    """Matrix of the differential out of one column, one term per source."""
    n_sources: int
    n_kept: int
    entries: tuple        # ((row_idx, col_idx, coeff), ...)
    virtual_rows: tuple   # row indices >= n_kept, in creation order
    overflow: tuple       # (col_idx, target_key) per out-of-window image


@dataclass(frozen=True)
class ComplexAtDegree:
    t: int
    bases: tuple          # four tuples of (kind, index, a)
    maps: tuple           # ColumnMap for p = 0, 1, 2


def _window(p: int, caps: FiltrationCaps):
    if p in (0, 3):
        return {"j_cap": caps.J}
    return {"a_cap": COLUMN_STRETCH * caps.V}


def _in_window(key, caps: FiltrationCaps) -> bool:
    kind, _, a = key
    if kind in ("delta", "deltabar"):
        return a // 6 < caps.J
    return a < COLUMN_STRETCH * caps.V


def complex_at_degree(t: int, caps: FiltrationCaps,
                      formulas: D1Formulas = DEFAULT_FORMULAS) -> ComplexAtDegree:
    """Bases and differential matrices in one internal degree."""
    if t % 4 != 0:
        empty = ColumnMap(0, 0, (), (), ())
        return ComplexAtDegree(t, ((), (), (), ()), (empty, empty, empty))
    bases = [adapted_line(p, t, **_window(p, caps)) for p in range(4)]
    maps = []
    for p in range(3):
        index_of = {key: i for i, key in enumerate(bases[p + 1])}
        n_kept = len(bases[p + 1])
        entries = []
        virtual = []
        overflow = []
        vrow_of = {}
        for c, (kind, index, a) in enumerate(bases[p]):
            img = d1_generator(kind, index, a, formulas)
            if img.is_zero():
                continue
            (key, coeff), = img.coeffs
            if img.t != t:
                raise AssemblyError(f"degree-breaking image at {bases[p][c]}")
            if key in index_of:
                entries.append((index_of[key], c, coeff))
            else:
                if not _in_window(key, caps):
                    overflow.append((c, key))
                r = vrow_of.get(key)
                if r is None:
                    r = n_kept + len(virtual)
                    vrow_of[key] = r
                    virtual.append(r)
                entries.append((r, c, coeff))
        maps.append(ColumnMap(len(bases[p]), n_kept, tuple(entries),
                              tuple(virtual), tuple(overflow)))
    cx = ComplexAtDegree(t, tuple(tuple(b) for b in bases), tuple(maps))
    _check_composites(cx, formulas)
    return cx


def _check_composites(cx: ComplexAtDegree, formulas: D1Formulas):
    """Composite of consecutive kept-block matrices must vanish."""
    for p in (0, 1):
        first = {c: (r, v) for r, c, v in cx.maps[p].entries
                 if r < cx.maps[p].n_kept}
        second = {c: (r, v) for r, c, v in cx.maps[p + 1].entries}
        for c, (r, v) in first.items():
            if r in second:
                raise AssemblyError(
                    f"nonzero composite at t={cx.t}, column {p}, source {c}")


# ---------------------------------------------------------------------------
# F3 elimination: dense below 64 columns, sparse row-echelon above
# ---------------------------------------------------------------------------

def rank_f3(nrows: int, ncols: int, entries, reverse_pivots: bool = False,
            force: str = None) -> int:
    if nrows == 0 or ncols == 0:
        return 0
    mode = force or ("dense" if ncols < 64 else "sparse")
    if mode == "dense":
        return _rank_dense(nrows, ncols, entries, reverse_pivots)
    return _rank_sparse(nrows, ncols, entries, reverse_pivots)


def _rank_dense(nrows, ncols, entries, reverse_pivots):
    rows = [[0] * ncols for _ in range(nrows)]
    for r, c, v in entries:
        rows[r][c] = (rows[r][c] + v) % 3
    rank = 0
    col_order = range(ncols - 1, -1, -1) if reverse_pivots else range(ncols)
    pivot_rows = []
    for c in col_order:
        piv = None
        for r in range(nrows):
            if r not in pivot_rows and rows[r][c]:
                piv = r
                break
        if piv is None:
            continue
        inv = 1 if rows[piv][c] == 1 else 2
        rows[piv] = [(inv * x) % 3 for x in rows[piv]]
        for r in range(nrows):
            if r != piv and rows[r][c]:
                f = rows[r][c]
                rows[r] = [(x - f * y) % 3 for x, y in zip(rows[r], rows[piv])]
        pivot_rows.append(piv)
        rank += 1
    return rank


def _rank_sparse(nrows, ncols, entries, reverse_pivots):
    cols = {}
    for r, c, v in entries:
        col = cols.setdefault(c, {})
        col[r] = (col.get(r, 0) + v) % 3
        if not col[r]:
            del col[r]
    pivots = {}  # pivot row -> reduced column
    order = sorted(cols, reverse=reverse_pivots)
    rank = 0
    for c in order:
        col = dict(cols[c])
        for r in sorted(col):
            while r in col and r in pivots:
                f = col[r]
                for rr, vv in pivots[r].items():
                    nv = (col.get(rr, 0) - f * vv) % 3
                    if nv:
                        col[rr] = nv
                    else:
                        col.pop(rr, None)
        if not col:
            continue
        lead = min(col)
        inv = 1 if col[lead] == 1 else 2
        col = {r: (inv * v) % 3 for r, v in col.items()}
        pivots[lead] = col
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Homology per degree, with cap-doubling stabilization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class E2Report:
    t: int
    dims: tuple
    stabilized: bool
    caps_used: tuple      # (base caps, doubled caps)
    overflow_touched: bool

    def to_dict(self):
        base, fine = self.caps_used
        return {"t": self.t, "dims": list(self.dims),
                "stabilized": self.stabilized,
                "caps": [base.J, base.V], "caps_fine": [fine.J, fine.V],
                "overflow_touched": self.overflow_touched}


def _dims_at(t: int, caps: FiltrationCaps, formulas: D1Formulas,
             reverse_pivots: bool = False, force: str = None):
    cx = complex_at_degree(t, caps, formulas)
    kernels, kept_ranks = [], []
    touched = False
    for p in range(3):
        m = cx.maps[p]
        n_aug = m.n_kept + len(m.virtual_rows)
        rank_aug = rank_f3(n_aug, m.n_sources, m.entries,
                           reverse_pivots, force)
        kept = [(r, c, v) for r, c, v in m.entries if r < m.n_kept]
        rank_kept = rank_f3(m.n_kept, m.n_sources, kept,
                            reverse_pivots, force)
        kernels.append(m.n_sources - rank_aug)
        kept_ranks.append(rank_kept)
        per_vrow = {}
        for r, c, v in m.entries:
            if r >= m.n_kept:
                per_vrow[r] = per_vrow.get(r, 0) + 1
        if any(n >= 2 for n in per_vrow.values()):
            touched = True
    kernels.append(len(cx.bases[3]))
    dims = []
    for p in range(4):
        inc = kept_ranks[p - 1] if p >= 1 else 0
        d = kernels[p] - inc
        if d < 0:
            raise AssemblyError(f"rank exceeds kernel at t={t}, p={p}")
        dims.append(d)
    return tuple(dims), touched, cx


def e2_p0(t: int, caps: FiltrationCaps = DEFAULT_CAPS,
          formulas: D1Formulas = DEFAULT_FORMULAS) -> E2Report:
    """Homology ranks at degree t, reported at the doubled cap.

    stabilized: the two cap levels agree and no virtual row collected two
    or more image terms at the finer level (two sources overflowing onto
    the same slot is the one boundary effect a doubling can miss).
    """
    dims_lo, _, _ = _dims_at(t, caps, formulas)
    fine = caps.doubled()
    dims_hi, touched, _ = _dims_at(t, fine, formulas)
    return E2Report(t, dims_hi,
                    stabilized=(dims_lo == dims_hi) and not touched,
                    caps_used=(caps, fine), overflow_touched=touched)


def e2_window(caps: FiltrationCaps = DEFAULT_CAPS,
              formulas: D1Formulas = DEFAULT_FORMULAS) -> list:
    return [e2_p0(t, caps, formulas)
            for t in range(caps.t_min, caps.t_max + 1) if t % 4 == 0]


def e2_dims_conjugated(t: int, caps: FiltrationCaps, seed: int = 0,
                       formulas: D1Formulas = DEFAULT_FORMULAS) -> tuple:
    """Independent recomputation of the degree-t ranks.

    Applies a random filtration-respecting unipotent change of basis to
    every column (mimicking the ambiguity in the choice of adapted
    representatives), then eliminates densely with reversed pivot order.
    Homology ranks are invariant under both, so any disagreement with the
    direct path flags an assembly bug.
    """
    rng = random.Random(seed)
    cx = complex_at_degree(t, caps, formulas)

    def unipotent(basis):
        n = len(basis)
        u = [[0] * n for _ in range(n)]
        for i in range(n):
            u[i][i] = 1
            for j in range(i + 1, n):
                # basis is ordered by filtration: only add later elements
                u[j][i] = rng.randrange(3)
        return u

    mats = []
    us = [unipotent(cx.bases[p]) for p in range(4)]
    for p in range(3):
        m = cx.maps[p]
        n_aug = m.n_kept + len(m.virtual_rows)
        dense = [[0] * m.n_sources for _ in range(n_aug)]
        for r, c, v in m.entries:
            dense[r][c] = (dense[r][c] + v) % 3
        src, tgt = us[p], us[p + 1]
        # M * U_src
        cols = [[sum(dense[r][k] * src[k][c] for k in range(m.n_sources)) % 3
                 for c in range(m.n_sources)] for r in range(n_aug)]
        # U_tgt^{-1} * (kept block), by forward substitution on unipotent U
        for c in range(m.n_sources):
            vec = [cols[r][c] for r in range(m.n_kept)]
            sol = [0] * m.n_kept
            for r in range(m.n_kept):
                s = vec[r] - sum(tgt[r][k] * sol[k] for k in range(r))
                sol[r] = s % 3
            for r in range(m.n_kept):
                cols[r][c] = sol[r]
        mats.append((n_aug, m.n_kept, cols))
    dims = []
    prev_kept_rank = 0
    for p in range(4):
        if p < 3:
            n_aug, n_kept, cols = mats[p]
            ent = [(r, c, cols[r][c]) for r in range(n_aug)
                   for c in range(len(cols[0]) if cols else 0) if cols[r][c]]
            rank_aug = rank_f3(n_aug, len(cx.bases[p]), ent,
                               reverse_pivots=True, force="dense")
            kept_ent = [(r, c, v) for r, c, v in ent if r < n_kept]
            kept_rank = rank_f3(n_kept, len(cx.bases[p]), kept_ent,
                                reverse_pivots=True, force="dense")
            ker = len(cx.bases[p]) - rank_aug
        else:
            ker, kept_rank = len(cx.bases[3]), 0
        dims.append(ker - prev_kept_rank)
        prev_kept_rank = kept_rank
    return tuple(dims)


# ---------------------------------------------------------------------------
# Localized column counts and the surviving exterior generator
# ---------------------------------------------------------------------------

def localized_poincare(p: int, caps: FiltrationCaps = DEFAULT_CAPS) -> dict:
    """Dimensions of the v1-inverted truncated columns per degree.

    Enumerated from the monomial model with v1 formally invertible, then
    compared against the closed-form count of a Laurent tower over the
    degree-0 filtration variable: J slots per degree (columns 0,3) or V
    slots (columns 1,2), at every t = 0 mod 4.
    """
    if p not in (0, 1, 2, 3):
        raise DomainError("column must be 0..3")
    table = {}
    mismatch = None
    for t in range(caps.t_min, caps.t_max + 1):
        if p in (0, 3):
            # v1^a D^k with a now in Z; one tower slot per a in [0, 6J)
            count = sum(1 for a in range(6 * caps.J)
                        if (t - 4 * a) % 24 == 0)
            expected = caps.J if t % 4 == 0 else 0
        else:
            # u1^i u^e with i in Z after inversion; slots i in [0, 4V)
            e = -t // 2 if t % 2 == 0 else None
            count = 0
            if e is not None and t % 4 == 0:
                count = sum(1 for i in range(4 * caps.V)
                            if (e - (4 - 2 * i)) % 8 == 0)
            expected = caps.V if t % 4 == 0 else 0
        if count:
            table[t] = count
        if count != expected and mismatch is None:
            mismatch = {"t": t, "count": count, "expected": expected}
    return {"column": p, "table": table, "matches_closed_form": mismatch is None,
            "first_mismatch": mismatch}


def survivor_witness(caps: FiltrationCaps = DEFAULT_CAPS,
                     formulas: D1Formulas = DEFAULT_FORMULAS) -> dict:
    """The unit and the column-1 exterior class survive localization.

    Checks d(b_1) = 0 and d(delta_0) = 0; that no column-0 generator maps
    onto b_1 modulo higher filtration even after inverting v1 (every image
    either carries a positive v1-power or lands on a label other than 1);
    and the non-survival witness d(delta_1) = -b_3.
    """
    from .d1 import ZERO, vector
    checks = {}
    checks["d_b1_zero"] = d1_generator("b", 1, 0, formulas) == ZERO
    checks["d_delta0_zero"] = d1_generator("delta", 0, 0, formulas) == ZERO
    checks["d_delta1_hits_b3"] = (
        d1_generator("delta", 1, 0, formulas)
        == vector({("b", 3, 0): 2}))
    bound = 8 * max(caps.J, caps.V) + 16
    hits = []
    for k in range(-bound, bound + 1):
        img = d1_generator("delta", k, 0, formulas)
        if img.is_zero():
            continue
        ((kind, label, a),) = [key for key, _ in img.coeffs]
        if label == 1 and a == 0:
            hits.append(k)
    checks["b1_not_hit_mod_higher_filtration"] = not hits
    return {"checks": checks, "passed": all(checks.values())}
