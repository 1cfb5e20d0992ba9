"""Semantics-preserving DAG-aware transformations.

Six kinds are provided: balance, rewrite, rewrite_z, refactor, refactor_z
and resub.  Every kind can either count the nodes its applicability
predicate holds for (without touching the graph) or apply itself and
report exactly that count.  All passes are deterministic functions of the
input graph: traversal is fixed topological (creation) order and every
tie breaks toward the lowest node id or literal.

Passes rebuild into a fresh graph instead of mutating, so a shared input
graph can be counted or transformed concurrently.

Rule catalogs, in traversal order at each node:

* balance    dismantles maximal single-output AND trees (internal nodes
             have plain fanout one) and rebuilds them depth-minimally,
             pairing shallowest operands first.  A tree root counts as
             transformed when its rebuilt level drops.
* rewrite    local algebraic rules: structural-hash / trivial elimination,
             absorption AND(a, AND(a,b)) -> AND(a,b), contradictory shared
             literals fold to constant false, and sharing-driven
             reassociation AND(AND(s,u), AND(s,v)) -> AND(s, AND(u,v))
             accepted only when hashing proves the node count drops
             (rewrite_z also accepts an even trade that shortens the local
             path).
* refactor   collapses each fanout-free cone with at most 8 support nodes
             to a truth table and resynthesizes it by Shannon decomposition,
             splitting on the variable with the most balanced cofactor
             support sizes; accepted on a strict node-count drop
             (refactor_z also accepts an even trade at lower root level).
* resub      computes 4096-pattern signatures for the whole graph, verifies
             equal-signature candidate pairs exhaustively over their union
             input support (skipped above 16 inputs), and redirects each
             verified duplicate into the lower-level survivor.
"""

from __future__ import annotations

import heapq
import itertools
import random
from array import array
from dataclasses import dataclass
from enum import Enum

from .aig import Aig, _eval_nodes, input_patterns, metrics


class TransformKind(str, Enum):
    BALANCE = "balance"
    REWRITE = "rewrite"
    REWRITE_Z = "rewrite_z"
    REFACTOR = "refactor"
    REFACTOR_Z = "refactor_z"
    RESUB = "resub"


DEFAULT_KINDS: tuple[TransformKind, ...] = tuple(TransformKind)

# Flows are plain tuples of TransformKind (hashable, usable as cache keys).
Flow = tuple[TransformKind, ...]


@dataclass
class TransformReport:
    kind: TransformKind
    tnodes: int
    nodes_before: int
    nodes_after: int
    depth_before: int
    depth_after: int


_RESUB_PATTERNS = 4096
_RESUB_SEED = 0x5EEDF00D
_REFACTOR_SUPPORT_LIMIT = 8
_RESUB_SUPPORT_LIMIT = 16


# ----- shared rebuild helpers ---------------------------------------------------


class _Builder:
    """Fresh output graph plus node levels and an old->new literal map.

    add() inlines the structural-hash fast path; operands are trusted to be
    valid literals of the graph under construction.
    """

    __slots__ = ("g", "lev", "nmap", "_f0", "_f1", "_strash", "_base")

    def __init__(self, src: Aig):
        self.g = Aig(src.num_inputs)
        self.lev = [0] * (src.num_inputs + 1)
        nmap = array("q", bytes(8 * src.num_nodes))
        for i in range(1, src.num_inputs + 1):
            nmap[i] = i << 1
        self.nmap = nmap
        self._f0 = self.g._fan0
        self._f1 = self.g._fan1
        self._strash = self.g._strash
        self._base = src.num_inputs + 1

    def add(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        if a < 2:
            return 0 if a == 0 else b
        if a == b:
            return a
        if a ^ b == 1:
            return 0
        key = (a << 32) | b
        node = self._strash.get(key)
        if node is None:
            f0 = self._f0
            node = self._base + len(f0)
            f0.append(a)
            self._f1.append(b)
            self._strash[key] = node
            lev = self.lev
            la = lev[a >> 1]
            lb = lev[b >> 1]
            lev.append((la if la > lb else lb) + 1)
        return node << 1

    def map_lit(self, l: int) -> int:
        return self.nmap[l >> 1] ^ (l & 1)

    def finish(self, src: Aig) -> Aig:
        nmap = self.nmap
        self.g.outputs = [nmap[l >> 1] ^ (l & 1) for l in src.outputs]
        return self.g


def _fanout_info(g: Aig):
    """Per node: reference count, 'special' flag (complemented or output
    reference), and the consuming AND node (meaningful when refs == 1)."""
    n_nodes = g.num_nodes
    refs = [0] * n_nodes
    special = bytearray(n_nodes)
    consumer = [0] * n_nodes
    ni = g.num_inputs
    f0, f1 = g._fan0, g._fan1
    for k in range(len(f0)):
        node = ni + 1 + k
        a = f0[k]
        m = a >> 1
        refs[m] += 1
        consumer[m] = node
        if a & 1:
            special[m] = 1
        b = f1[k]
        m = b >> 1
        refs[m] += 1
        consumer[m] = node
        if b & 1:
            special[m] = 1
    for l in g.outputs:
        m = l >> 1
        refs[m] += 1
        special[m] = 1
    return refs, special, consumer


# ----- balance ------------------------------------------------------------------


def _pass_balance(g: Aig) -> tuple[Aig, int]:
    ni = g.num_inputs
    refs, special, _ = _fanout_info(g)
    b = _Builder(g)
    nmap = b.nmap
    lev = b.lev
    f0g, f1g = g._fan0, g._fan1
    tnodes = 0

    def is_internal(l: int) -> bool:
        m = l >> 1
        return (l & 1) == 0 and m > ni and refs[m] == 1 and not special[m]

    for k in range(len(f0g)):
        node = ni + 1 + k
        if refs[node] == 1 and not special[node]:
            continue  # internal tree node, rebuilt inside its root
        a = f0g[k]
        c = f1g[k]
        if not is_internal(a) and not is_internal(c):
            ma = nmap[a >> 1] ^ (a & 1)
            mc = nmap[c >> 1] ^ (c & 1)
            if ma > 1 and mc > 1 and ma != mc and ma != (mc ^ 1):
                # two-leaf tree: the depth-minimal rebuild is the node itself
                nmap[node] = b.add(ma, mc)
                continue
            # degenerate after mapping: count it as a collapsed tree
            nmap[node] = b.add(ma, mc)
            tnodes += 1
            continue
        # gather the maximal AND tree under this root
        leaves = []
        internal = []
        stack = [a, c]
        while stack:
            l = stack.pop()
            m = l >> 1
            if is_internal(l):
                internal.append(m)
                kk = m - ni - 1
                stack.append(f0g[kk])
                stack.append(f1g[kk])
            else:
                leaves.append(nmap[m] ^ (l & 1))
        # level this root would get if the tree were copied shape-preserving;
        # a root counts as transformed only when the rebuild beats that, so
        # upstream improvements alone do not inflate the count
        internal.sort()
        clev: dict[int, int] = {}
        for m in internal + [node]:
            kk = m - ni - 1
            a = f0g[kk]
            c = f1g[kk]
            la = clev.get(a >> 1)
            if la is None:
                la = lev[nmap[a >> 1] >> 1]
            lc = clev.get(c >> 1)
            if lc is None:
                lc = lev[nmap[c >> 1] >> 1]
            clev[m] = (la if la > lc else lc) + 1
        copy_root_lev = clev[node]
        # simplify the leaf multiset before pairing
        const0 = False
        seen = set()
        uniq = []
        for l in leaves:
            if l == 0 or (l ^ 1) in seen:
                const0 = True
                break
            if l == 1 or l in seen:
                continue
            seen.add(l)
            uniq.append(l)
        if const0 or not uniq:
            nmap[node] = 0 if const0 else 1
            tnodes += 1  # the whole tree collapsed to a constant
            continue
        heap = [(lev[l >> 1], l) for l in uniq]
        heapq.heapify(heap)
        while len(heap) > 1:
            _, x = heapq.heappop(heap)
            _, y = heapq.heappop(heap)
            l = b.add(x, y)
            heapq.heappush(heap, (lev[l >> 1], l))
        root_lev, root_lit = heap[0]
        nmap[node] = root_lit
        if root_lev < copy_root_lev:
            tnodes += 1
    return b.finish(g), tnodes


# ----- rewrite ------------------------------------------------------------------


def _pass_rewrite(g: Aig, zero_cost: bool) -> tuple[Aig, int]:
    ni = g.num_inputs
    b = _Builder(g)
    out = b.g
    lev = b.lev
    nmap = b.nmap
    f0g, f1g = g._fan0, g._fan1
    of0, of1 = out._fan0, out._fan1
    tnodes = 0

    for k in range(len(f0g)):
        node = ni + 1 + k
        a = f0g[k]
        c = f1g[k]
        mf = nmap[a >> 1] ^ (a & 1)
        mg = nmap[c >> 1] ^ (c & 1)

        # trivial / structural-hash elimination (fires only after upstream
        # rewrites made the mapped pair collapsible)
        probe = out.find_and(mf, mg)
        if probe is not None:
            nmap[node] = probe
            tnodes += 1
            continue

        df = None
        if (mf & 1) == 0 and (mf >> 1) > ni:
            kk = (mf >> 1) - ni - 1
            df = (of0[kk], of1[kk])
        dg = None
        if (mg & 1) == 0 and (mg >> 1) > ni:
            kk = (mg >> 1) - ni - 1
            dg = (of0[kk], of1[kk])

        repl = -1
        if dg is not None:
            p, q = dg
            if mf == p or mf == q:
                repl = mg  # absorption
            elif mf == p ^ 1 or mf == q ^ 1:
                repl = 0  # contradiction one level down
        if repl < 0 and df is not None:
            p, q = df
            if mg == p or mg == q:
                repl = mf
            elif mg == p ^ 1 or mg == q ^ 1:
                repl = 0
        if repl < 0 and df is not None and dg is not None:
            p, q = df
            r, s = dg
            if p ^ 1 == r or p ^ 1 == s or q ^ 1 == r or q ^ 1 == s:
                repl = 0  # the two sub-cones carry contradictory literals
        if repl >= 0:
            nmap[node] = repl
            tnodes += 1
            continue

        # sharing-driven reassociation
        if df is not None and dg is not None:
            p, q = df
            r, s = dg
            shared = -1
            if p == r:
                shared, u, v = p, q, s
            elif p == s:
                shared, u, v = p, q, r
            elif q == r:
                shared, u, v = q, p, s
            elif q == s:
                shared, u, v = q, p, r
            if shared >= 0:
                t1 = out.find_and(u, v)
                t2 = out.find_and(shared, t1) if t1 is not None else None
                accept = t2 is not None
                if not accept and zero_cost and t1 is not None:
                    # one fresh node replaces this one: even trade, take it
                    # only when the local path gets shorter
                    copy_lev = max(lev[mf >> 1], lev[mg >> 1]) + 1
                    cand_lev = max(lev[shared >> 1], lev[t1 >> 1]) + 1
                    accept = cand_lev < copy_lev
                if accept:
                    l1 = t1 if t1 is not None else b.add(u, v)
                    nmap[node] = b.add(shared, l1)
                    tnodes += 1
                    continue

        nmap[node] = b.add(mf, mg)
    return b.finish(g), tnodes


# ----- refactor -----------------------------------------------------------------


def _tt_cof1(tt: int, var_tt: int, span: int) -> int:
    d = tt & var_tt
    return d | (d >> span)


def _tt_cof0(tt: int, var_tt: int, span: int, full: int) -> int:
    d = tt & (var_tt ^ full)
    return (d | (d << span)) & full


def _shannon(b: _Builder, tt: int, full: int, var_tts: list[int],
             sup_lits: list[int], memo: dict[int, int]) -> int:
    hit = memo.get(tt)
    if hit is not None:
        return hit
    res = None
    if tt == 0:
        res = 0
    elif tt == full:
        res = 1
    else:
        for i, vt in enumerate(var_tts):
            if tt == vt:
                res = sup_lits[i]
                break
            if tt == vt ^ full:
                res = sup_lits[i] ^ 1
                break
    if res is None:
        # greedy split: the dependent variable whose cofactor on-set sizes
        # are most balanced, ties toward the lowest variable
        best = None
        for i, vt in enumerate(var_tts):
            span = 1 << i
            hi = _tt_cof1(tt, vt, span)
            lo = _tt_cof0(tt, vt, span, full)
            if hi == lo:
                continue  # tt does not depend on variable i
            score = abs(hi.bit_count() - lo.bit_count())
            if best is None or score < best[0]:
                best = (score, i, hi, lo)
        _, i, hi, lo = best
        fhi = _shannon(b, hi, full, var_tts, sup_lits, memo)
        flo = _shannon(b, lo, full, var_tts, sup_lits, memo)
        xv = sup_lits[i]
        res = b.add(b.add(xv, fhi) ^ 1, b.add(xv ^ 1, flo) ^ 1) ^ 1
    memo[tt] = res
    return res


def _pass_refactor(g: Aig, zero_cost: bool) -> tuple[Aig, int]:
    ni = g.num_inputs
    refs, special, consumer = _fanout_info(g)
    f0g, f1g = g._fan0, g._fan1
    n_ands = len(f0g)

    # partition AND nodes into fanout-free cones: a plain fanout-one node
    # belongs to its consumer's cone, everything else roots its own
    root_of = array("q", bytes(8 * g.num_nodes))
    for k in reversed(range(n_ands)):
        node = ni + 1 + k
        if refs[node] == 1 and not special[node]:
            root_of[node] = root_of[consumer[node]]
        else:
            root_of[node] = node
    members: dict[int, list[int]] = {}
    for k in range(n_ands):
        node = ni + 1 + k
        members.setdefault(root_of[node], []).append(node)

    b = _Builder(g)
    nmap = b.nmap
    tnodes = 0

    for k in range(n_ands):
        root = ni + 1 + k
        if root_of[root] != root:
            continue
        mem = members[root]
        if len(mem) == 1:
            # single-gate cone: Shannon can only match it, so the rebuild
            # wins exactly when the mapped pair already exists
            a = f0g[k]
            c = f1g[k]
            ma = nmap[a >> 1] ^ (a & 1)
            mc = nmap[c >> 1] ^ (c & 1)
            probe = b.g.find_and(ma, mc)
            if probe is not None:
                nmap[root] = probe
                tnodes += 1
            else:
                nmap[root] = b.add(ma, mc)
            continue
        internal = set(mem)
        sup: list[int] = []
        sup_seen = set()
        for u in mem:
            kk = u - ni - 1
            for f in (f0g[kk], f1g[kk]):
                m = f >> 1
                if m not in internal and m not in sup_seen:
                    sup_seen.add(m)
                    sup.append(m)
        accepted = False
        if 0 < len(sup) <= _REFACTOR_SUPPORT_LIMIT:
            sup.sort()
            s = len(sup)
            full = (1 << (1 << s)) - 1
            var_tts = input_patterns(s)
            val = {sn: var_tts[i] for i, sn in enumerate(sup)}
            for u in mem:
                kk = u - ni - 1
                a = f0g[kk]
                c = f1g[kk]
                va = val[a >> 1] ^ (full if a & 1 else 0)
                vb = val[c >> 1] ^ (full if c & 1 else 0)
                val[u] = va & vb
            sup_lits = [nmap[sn] for sn in sup]
            mark = b.g.checkpoint()
            lev_mark = len(b.lev)
            newlit = _shannon(b, val[root], full, var_tts, sup_lits, {})
            created = b.g.num_ands - mark
            if created < len(mem):
                accepted = True
            elif zero_cost and created == len(mem):
                # even trade: accept only when the root gets shallower than
                # a verbatim copy of the cone would be
                copy_lev: dict[int, int] = {}
                for u in mem:
                    kk = u - ni - 1
                    a = f0g[kk]
                    c = f1g[kk]
                    la = copy_lev.get(a >> 1, -1)
                    if la < 0:
                        la = b.lev[nmap[a >> 1] >> 1]
                    lc = copy_lev.get(c >> 1, -1)
                    if lc < 0:
                        lc = b.lev[nmap[c >> 1] >> 1]
                    copy_lev[u] = (la if la > lc else lc) + 1
                accepted = b.lev[newlit >> 1] < copy_lev[root]
            if accepted:
                nmap[root] = newlit
                tnodes += 1
            else:
                b.g.rollback(mark)
                del b.lev[lev_mark:]
        if not accepted:
            for u in mem:
                kk = u - ni - 1
                a = f0g[kk]
                c = f1g[kk]
                nmap[u] = b.add(nmap[a >> 1] ^ (a & 1), nmap[c >> 1] ^ (c & 1))
    return b.finish(g), tnodes


# ----- resub --------------------------------------------------------------------


def _cone_contains(g: Aig, root: int, target: int) -> bool:
    ni = g.num_inputs
    stack = [root]
    seen = set()
    while stack:
        n = stack.pop()
        if n == target:
            return True
        if n <= target or n <= ni or n in seen:
            continue
        seen.add(n)
        f0, f1 = g.fanins(n)
        stack.append(f0 >> 1)
        stack.append(f1 >> 1)
    return False


def _cone_tt(g: Aig, node: int, base_val: dict[int, int], full: int) -> int:
    """Truth table of a node over preassigned support values."""
    if node in base_val:
        return base_val[node]
    ni = g.num_inputs
    todo = [node]
    cone = []
    seen = set()
    while todo:
        n = todo.pop()
        if n in base_val or n in seen or n <= ni:
            continue
        seen.add(n)
        cone.append(n)
        f0, f1 = g.fanins(n)
        todo.append(f0 >> 1)
        todo.append(f1 >> 1)
    cone.sort()
    for n in cone:
        a, c = g.fanins(n)
        va = base_val[a >> 1] ^ (full if a & 1 else 0)
        vb = base_val[c >> 1] ^ (full if c & 1 else 0)
        base_val[n] = va & vb
    return base_val[node]


def _pass_resub(g: Aig) -> tuple[Aig, int]:
    ni = g.num_inputs
    f0g, f1g = g._fan0, g._fan1
    exhaustive = ni <= _RESUB_SUPPORT_LIMIT
    if exhaustive:
        # few enough inputs that the full truth table is cheaper than
        # sampling; equal values then need no second verification step
        pats = input_patterns(ni)
        mask = (1 << (1 << ni)) - 1
    else:
        rng = random.Random(_RESUB_SEED)
        mask = (1 << _RESUB_PATTERNS) - 1
        pats = [rng.getrandbits(_RESUB_PATTERNS) for _ in range(ni)]
    vals = _eval_nodes(g, pats, mask)

    sup: list[int] = []
    if not exhaustive:
        # structural input support per node, as an input bitmask
        sup = [0] * g.num_nodes
        for i in range(1, ni + 1):
            sup[i] = 1 << (i - 1)
        for k in range(len(f0g)):
            sup[ni + 1 + k] = sup[f0g[k] >> 1] | sup[f1g[k] >> 1]

    groups: dict[int, list[int]] = {}
    for n in range(g.num_nodes):
        groups.setdefault(vals[n], []).append(n)

    levels = g.levels()
    subst: dict[int, int] = {}
    tnodes = 0
    for nodes in groups.values():
        if len(nodes) < 2:
            continue
        rep = min(nodes, key=lambda n: (levels[n], n))
        for mnode in nodes:
            if mnode == rep or mnode <= ni:
                continue
            if not exhaustive:
                union = sup[rep] | sup[mnode]
                if union.bit_count() > _RESUB_SUPPORT_LIMIT:
                    continue  # soundness over coverage: no oracle that large
            if rep > mnode and _cone_contains(g, rep, mnode):
                continue  # would create a combinational cycle
            if not exhaustive:
                sup_inputs = [i + 1 for i in range(ni) if union >> i & 1]
                s = len(sup_inputs)
                var_tts = input_patterns(s)
                full = (1 << (1 << s)) - 1
                base_val = {0: 0}
                for idx, inp in enumerate(sup_inputs):
                    base_val[inp] = var_tts[idx]
                if _cone_tt(g, rep, base_val, full) != _cone_tt(g, mnode, base_val, full):
                    continue
            subst[mnode] = rep << 1
            tnodes += 1
    if not subst:
        return g, 0

    # rebuild from the outputs with redirected references (implicit GC);
    # iterative DFS, fanin0 first
    b = _Builder(g)
    nmap = b.nmap
    done = bytearray(g.num_nodes)
    for n in range(ni + 1):
        done[n] = 1
    for out_lit in g.outputs:
        stack = [out_lit >> 1]
        while stack:
            n = stack[-1]
            if done[n]:
                stack.pop()
                continue
            r = subst.get(n)
            if r is not None:
                rn = r >> 1
                if done[rn]:
                    nmap[n] = nmap[rn] ^ (r & 1)
                    done[n] = 1
                    stack.pop()
                else:
                    stack.append(rn)
                continue
            kk = n - ni - 1
            a = f0g[kk]
            c = f1g[kk]
            an = a >> 1
            cn = c >> 1
            if not done[an]:
                stack.append(an)
                continue
            if not done[cn]:
                stack.append(cn)
                continue
            nmap[n] = b.add(nmap[an] ^ (a & 1), nmap[cn] ^ (c & 1))
            done[n] = 1
            stack.pop()
    return b.finish(g), tnodes


# ----- public operations --------------------------------------------------------


def _run_pass(g: Aig, kind: TransformKind) -> tuple[Aig, int]:
    if kind is TransformKind.BALANCE:
        return _pass_balance(g)
    if kind is TransformKind.REWRITE:
        return _pass_rewrite(g, False)
    if kind is TransformKind.REWRITE_Z:
        return _pass_rewrite(g, True)
    if kind is TransformKind.REFACTOR:
        return _pass_refactor(g, False)
    if kind is TransformKind.REFACTOR_Z:
        return _pass_refactor(g, True)
    if kind is TransformKind.RESUB:
        return _pass_resub(g)
    raise ValueError(f"unknown transform kind {kind!r}")


def count_transformable(aig: Aig, kind: TransformKind) -> int:
    """Number of nodes *kind* would transform, without mutating the graph.

    Equals apply(aig, kind)[1].tnodes by construction: the counting dry run
    shares the transformation code and discards the rebuilt graph.
    """
    g = aig if aig._compact else aig.compact()
    return _run_pass(g, kind)[1]


def apply(aig: Aig, kind: TransformKind) -> tuple[Aig, TransformReport]:
    """Apply one transformation; the input graph is left untouched.

    A transform with no applicable nodes returns the input unchanged.
    """
    g = aig if aig._compact else aig.compact()
    before = metrics(g)
    res, tnodes = _run_pass(g, kind)
    if tnodes == 0:
        return g, TransformReport(kind, 0, before.and_count, before.and_count,
                                  before.depth, before.depth)
    if res is not g:
        res = res.compact()
    after = metrics(res)
    return res, TransformReport(kind, tnodes, before.and_count,
                                after.and_count, before.depth, after.depth)


def apply_flow(aig: Aig, flow) -> tuple[Aig, list[TransformReport]]:
    """Apply an ordered sequence of transformations left to right."""
    flow = tuple(flow)
    if not flow:
        raise ValueError("flow must not be empty")
    reports = []
    g = aig
    for kind in flow:
        g, rep = apply(g, kind)
        reports.append(rep)
    return g, reports


_TOKENS = itertools.count(1)


class FlowCache:
    """Memoizes transform results along flow prefixes.

    Transforms are pure functions of the graph, so two flows sharing a
    prefix share every intermediate graph.  Keys are per-graph identity
    tokens assigned on first sight, not object ids, so results stay valid
    for the cache's lifetime.
    """

    def __init__(self):
        self._results: dict[tuple[int, TransformKind], tuple[Aig, TransformReport]] = {}

    @staticmethod
    def _token(g: Aig) -> int:
        if g.token is None:
            g.token = next(_TOKENS)
        return g.token

    def apply_flow(self, aig: Aig, flow) -> tuple[Aig, list[TransformReport]]:
        flow = tuple(flow)
        if not flow:
            raise ValueError("flow must not be empty")
        reports = []
        g = aig
        for kind in flow:
            key = (self._token(g), kind)
            hit = self._results.get(key)
            if hit is None:
                hit = apply(g, kind)
                self._results[key] = hit
            g, rep = hit
            reports.append(rep)
        return g, reports

    def clear(self) -> None:
        self._results.clear()
