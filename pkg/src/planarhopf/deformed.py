"""Deformed grafting on typed trees and the positive (recentering) structure.

Typed trees carry multi-index vertex decorations and kernel/noise typed
edges.  The basis of the enveloping algebra is the normal form "root
decoration m with planted branches": the tree itself.  Lie brackets expand
eagerly to commutators of the normal-form concatenation, whose defining
relation is that moving a polynomial factor past a branch costs a root-edge
decrement.

The recentering coproducts are the Kronecker duals of the deformed product:
a cut edge can raise its index by any amount matched by a decoration raise
on the trunk vertex it was cut from, weighted by the grafting coefficient,
and the left root decoration collects decoration drops of trunk vertices,
weighted by the distribution multinomial.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import floor

from .linalg import LinComb, Tensor, aslc, bilinear
from .postlie import shuffle_many
from .trees import (EdgeType, InvalidTree, MultiIndex, PlanarTree,
                    RegularityConfig, mi_multinomial, mi_range, mi_range_norm,
                    regularity, sequential_binom)


def unit_tree(d: int) -> PlanarTree:
    return PlanarTree(MultiIndex.zero(d))


def is_unit(t: PlanarTree) -> bool:
    return not t.children and isinstance(t.dec, MultiIndex) and t.dec.is_zero()


def tree_dim(t: PlanarTree) -> int:
    if isinstance(t.dec, MultiIndex):
        return len(t.dec)
    for edge, sub in t.children:
        return len(edge.index)
    raise InvalidTree("cannot infer dimension of an undecorated tree")


def planted(edge: EdgeType, sub: PlanarTree) -> PlanarTree:
    d = len(edge.index)
    return PlanarTree(MultiIndex.zero(d), ((edge, sub),))


def is_noise_vertex(t: PlanarTree, path) -> bool:
    return t.has_incoming_noise(path)


def non_noise_paths(t: PlanarTree, include_root: bool = True):
    for p in t.paths():
        if not p and not include_root:
            continue
        if not t.has_incoming_noise(p):
            yield p


# ---------------------------------------------------------------------------
# raising and lowering operators


def up_vertex(t: PlanarTree, path, ell: MultiIndex) -> PlanarTree:
    node = t.subtree(path)
    return t.replace(path, node.with_dec(node.dec.add(ell)))


def down_vertex(t: PlanarTree, path, ell: MultiIndex):
    node = t.subtree(path)
    dec = node.dec.sub(ell)
    if dec is None:
        return None
    return t.replace(path, node.with_dec(dec))


def up_all(t: PlanarTree, m: MultiIndex, include_root: bool = True) -> LinComb:
    """Distribute m over the non-noise vertices, weighted by the number of
    ways to add one unit at a time."""
    if m.is_zero():
        return LinComb.term(t)
    paths = list(non_noise_paths(t, include_root))
    out = LinComb()
    for parts in _distributions(m, len(paths)):
        new = t
        for path, delta in zip(paths, parts):
            if not delta.is_zero():
                new = up_vertex(new, path, delta)
        out.add_term(new, mi_multinomial(parts))
    return out


def _distributions(m: MultiIndex, k: int):
    if k == 0:
        if m.is_zero():
            yield ()
        return
    if k == 1:
        yield (m,)
        return
    for head in mi_range(m):
        for tail in _distributions(m.sub(head), k - 1):
            yield (head,) + tail


def down_root(x, m: MultiIndex) -> LinComb:
    """Distribute m as decrements over the root edges, one unit at a time.

    Terms where an edge index would go negative vanish; the weight is the
    multinomial count of unit orderings.
    """
    def per_basis(t: PlanarTree) -> LinComb:
        if m.is_zero():
            return LinComb.term(t)
        out = LinComb()
        for parts in _distributions(m, len(t.children)):
            kids = []
            for (edge, sub), mu in zip(t.children, parts):
                idx = edge.index.sub(mu)
                if idx is None:
                    kids = None
                    break
                kids.append((edge.with_index(idx), sub))
            if kids is not None:
                out.add_term(t.with_children(tuple(kids)), mi_multinomial(parts))
        return out

    return aslc(x).map_basis(per_basis)


# ---------------------------------------------------------------------------
# deformed grafting


@lru_cache(maxsize=None)
def _dgraft_into_subtree(branch, target: PlanarTree) -> LinComb:
    """Deformed-graft one branch onto every non-noise vertex of a subtree.

    The grafted edge arrives as the new leftmost child; the edge index and
    the target decoration drop together, weighted by the binomial of the
    target decoration over the drop.
    """
    edge, sub = branch
    out = LinComb()
    for path in non_noise_paths(target, include_root=True):
        node = target.subtree(path)
        for ell in mi_range(node.dec):
            idx = edge.index.sub(ell)
            if idx is None:
                continue
            coeff = node.dec.binom(ell)
            grown = PlanarTree(node.dec.sub(ell),
                               ((edge.with_index(idx), sub),) + node.children)
            out.add_term(target.replace(path, grown), coeff)
    return out


def dgraft_planted(p1: PlanarTree, p2: PlanarTree) -> LinComb:
    """Deformed grafting of one planted tree onto another."""
    if len(p1.children) != 1 or len(p2.children) != 1 or not is_unit(p1.with_children(())):
        raise InvalidTree("deformed grafting of planted trees needs planted arguments")
    edge2, sub2 = p2.children[0]
    if edge2.is_noise:
        return LinComb()
    grown = _dgraft_into_subtree(p1.children[0], sub2)
    return grown.map_basis(lambda s: planted(edge2, s))


# ---------------------------------------------------------------------------
# the extended action on normal forms

# a word is a tuple of primitives: MultiIndex units and (EdgeType, tree) branches


def tree_word(t: PlanarTree) -> tuple:
    d = tree_dim(t)
    units = []
    for j, c in enumerate(t.dec):
        units.extend([MultiIndex.unit(d, j)] * c)
    return tuple(units) + tuple(t.children)


def word_tree(word: tuple, d: int) -> PlanarTree:
    dec = MultiIndex.zero(d)
    branches = []
    for u in word:
        if isinstance(u, MultiIndex):
            dec = dec.add(u)
        else:
            branches.append(u)
    return PlanarTree(dec, tuple(branches))


@lru_cache(maxsize=None)
def _act_prim_on_tree(u, y: PlanarTree) -> LinComb:
    """One primitive acting on a tree: a derivation across the branches.

    A unit raises one non-noise vertex inside one branch; a branch
    deformed-grafts into one branch.  Nothing acts on the root (the root is
    reached by the concatenation part of the product instead).
    """
    out = LinComb()
    for j, (edge, sub) in enumerate(y.children):
        if edge.is_noise:
            continue  # noise targets are bare leaves; nothing lands there
        if isinstance(u, MultiIndex):
            hit = LinComb()
            for path in non_noise_paths(sub, include_root=True):
                hit.add_term(up_vertex(sub, path, u), 1)
        else:
            hit = _dgraft_into_subtree(u, sub)
        for new_sub, c in hit.items():
            kids = y.children[:j] + ((edge, new_sub),) + y.children[j + 1:]
            out.add_term(y.with_children(kids), c)
    return out


def _act_prim_on_prim(u, v) -> LinComb:
    """Base cases of the deformed product on primitives."""
    if isinstance(v, MultiIndex):
        return LinComb()
    edge, sub = v
    if edge.is_noise:
        return LinComb()
    if isinstance(u, MultiIndex):
        out = LinComb()
        for path in non_noise_paths(sub, include_root=True):
            out.add_term((edge, up_vertex(sub, path, u)), 1)
        return out
    return _dgraft_into_subtree(u, sub).map_basis(lambda s: (edge, s))


def _word_graft_one(u, word: tuple) -> LinComb:
    out = LinComb()
    for j, v in enumerate(word):
        for nv, c in _act_prim_on_prim(u, v).items():
            out.add_term(word[:j] + (nv,) + word[j + 1:], c)
    return out


@lru_cache(maxsize=None)
def go_act(word: tuple, y: PlanarTree) -> LinComb:
    """Extension of the deformed grafting action to words of primitives."""
    if not word:
        return LinComb.term(y)
    u, rest = word[0], word[1:]
    out = go_act(rest, y).map_basis(lambda t: _act_prim_on_tree(u, t))
    if rest:
        out.iadd_scaled(_word_graft_one(u, rest).map_basis(
            lambda w: go_act(w, y)), -1)
    return out


# ---------------------------------------------------------------------------
# normal-form concatenation and the deformed product


def tplus_concat(a: PlanarTree, b: PlanarTree) -> LinComb:
    """Product of normal forms: the left polynomial part passes through the
    left branches, each crossing costing a root-edge decrement."""
    d = tree_dim(a)
    out = LinComb()
    for r2 in mi_range(b.dec):
        r1 = b.dec.sub(r2)
        coeff = b.dec.binom(r2)
        dropped = down_root(a.with_dec(MultiIndex.zero(d)), r2)
        for t, c in dropped.items():
            merged = PlanarTree(a.dec.add(r1), t.children + b.children)
            out.add_term(merged, coeff * c)
    return out


def concat(x, y) -> LinComb:
    return bilinear(x, y, tplus_concat)


def concat_by_commutation(a: PlanarTree, b: PlanarTree) -> LinComb:
    """Oracle route for the concatenation: push single units left one at a
    time using branch X = X branch + (root-edge drop of the branch)."""
    d = tree_dim(a)

    def push_unit(t: PlanarTree, u: MultiIndex) -> LinComb:
        out = LinComb.term(t.with_dec(t.dec.add(u)))
        for j, (edge, sub) in enumerate(t.children):
            idx = edge.index.sub(u)
            if idx is None:
                continue
            kids = t.children[:j] + ((edge.with_index(idx), sub),) + t.children[j + 1:]
            out.add_term(t.with_children(kids), 1)
        return out

    acc = LinComb.term(a)
    for j, c in enumerate(b.dec):
        for _ in range(c):
            acc = acc.map_basis(lambda t: push_unit(t, MultiIndex.unit(d, j)))
    return acc.map_basis(lambda t: t.with_children(t.children + b.children))


def deshuffle_typed(t: PlanarTree) -> LinComb:
    """Coproduct dual to the concatenation: split the root polynomial with
    binomial weights and the branch word into complementary subsequences."""
    out = LinComb()
    n = len(t.children)
    for m1 in mi_range(t.dec):
        m2 = t.dec.sub(m1)
        coeff = t.dec.binom(m1)
        for mask in range(1 << n):
            left = tuple(t.children[i] for i in range(n) if mask >> i & 1)
            right = tuple(t.children[i] for i in range(n) if not mask >> i & 1)
            out.add_term(Tensor((PlanarTree(m1, left), PlanarTree(m2, right))),
                         coeff)
    return out


def star_plus(x, y) -> LinComb:
    """Deformed product: split the left factor, concatenate one half onto
    the root and act with the other half on the branches."""
    def per_basis(a: PlanarTree, b: PlanarTree) -> LinComb:
        out = LinComb()
        for (a1, a2), c in deshuffle_typed(a).items():
            acted = go_act(tree_word(a2), b)
            out.iadd_scaled(acted.map_basis(lambda t: tplus_concat(a1, t)), c)
        return out

    return bilinear(x, y, per_basis)


# ---------------------------------------------------------------------------
# V-space operations: brackets and the deformed post-Lie product


def bracket0(x, y) -> LinComb:
    """Commutator of the normal-form concatenation."""
    return concat(x, y) - concat(y, x)


def dgraft_v(x, y) -> LinComb:
    """Deformed grafting of an enveloping-algebra element on a tree."""
    def per_basis(a: PlanarTree, b: PlanarTree) -> LinComb:
        word = tree_word(a)
        # acting on a normal form: branches receive the action, the root is
        # never a target
        return go_act(word, b)

    return bilinear(x, y, per_basis)


def up_lc(x, m: MultiIndex, include_root: bool = True) -> LinComb:
    return aslc(x).map_basis(lambda t: up_all(t, m, include_root))


# ---------------------------------------------------------------------------
# recentering coproducts (Kronecker duals of the deformed product)


def _typed_cuts(t: PlanarTree, prefix=()):
    """Left admissible cuts avoiding noise edges.

    Yields (groups, trunk_paths, keepmap) where groups is a tuple of
    (vertex path, branch tuple) for the cut vertices, trunk_paths the
    surviving vertex paths, and keepmap path -> tuple of kept child indices.
    """
    max_prefix = 0
    for edge, _ in t.children:
        if edge.is_noise:
            break
        max_prefix += 1
    for k in range(max_prefix + 1):
        head = ((prefix, t.children[:k]),) if k else ()
        kept = list(range(k, len(t.children)))
        subcuts = [ _typed_cuts(t.children[j][1], prefix + (j,)) for j in kept ]
        for combo in itertools.product(*subcuts):
            groups = head
            trunk_paths = [prefix]
            keepmap = {prefix: tuple(kept)}
            for sub in combo:
                g, tp, km = sub
                groups += g
                trunk_paths.extend(tp)
                keepmap.update(km)
            yield groups, trunk_paths, keepmap


def _rebuild_trunk(t: PlanarTree, keepmap, decmap, prefix=()) -> PlanarTree:
    node = t.subtree(prefix)
    kids = []
    for j in keepmap[prefix]:
        edge, _ = node.children[j]
        kids.append((edge, _rebuild_trunk(t, keepmap, decmap, prefix + (j,))))
    return PlanarTree(decmap[prefix], tuple(kids), node.ext)


def _delta_plus_terms(t: PlanarTree, cfg: RegularityConfig | None,
                      cap: MultiIndex | None, grading=None) -> LinComb:
    """Shared cut-and-increment enumeration behind both coproducts.

    With ``cfg`` the left tensor is projected onto positive grading (the
    unit always kept), which bounds the edge increments; with ``cap`` each
    increment is bounded componentwise instead and nothing is projected.
    """
    d = tree_dim(t)
    grading = grading or (lambda tree: regularity(tree, cfg))
    out = LinComb()
    for groups, trunk_paths, keepmap in _typed_cuts(t):
        cut_edges = [(path, edge, sub) for path, branches in groups
                     for edge, sub in branches]
        # budget for increments when projecting onto positive grading
        if cap is None:
            max_n = sum(t.subtree(p).dec.norm for p in trunk_paths)
            budget = Fraction(max_n)
            for _, edge, sub in cut_edges:
                budget += grading(planted(edge, sub))
            if budget <= 0 and cut_edges:
                bound = 0
            else:
                bound = max(0, floor(budget))
            ell_ranges = [tuple(mi_range_norm(d, bound)) for _ in cut_edges]
        else:
            ell_ranges = [tuple(mi_range(cap)) for _ in cut_edges]
        non_noise_trunk = [p for p in trunk_paths if not t.has_incoming_noise(p)]
        for ells in itertools.product(*ell_ranges):
            ell_at = {}
            for (path, edge, sub), ell in zip(cut_edges, ells):
                ell_at.setdefault(path, []).append(ell)
            # the left root decoration collects drops of trunk decorations
            n_choices = [tuple(mi_range(t.subtree(p).dec)) for p in non_noise_trunk]
            for n_parts in itertools.product(*n_choices):
                decmap = {}
                weight = mi_multinomial(n_parts)
                if weight == 0:
                    continue
                n_of = dict(zip(non_noise_trunk, n_parts))
                ok = True
                for p in trunk_paths:
                    base = t.subtree(p).dec
                    drop = n_of.get(p, MultiIndex.zero(d))
                    raised = base.sub(drop)
                    if raised is None:
                        ok = False
                        break
                    for ell in ell_at.get(p, ()):
                        raised = raised.add(ell)
                    decmap[p] = raised
                    if ell_at.get(p):
                        weight *= sequential_binom(raised, ell_at[p])
                        if weight == 0:
                            ok = False
                            break
                if not ok or weight == 0:
                    continue
                trunk = _rebuild_trunk(t, keepmap, decmap)
                n_total = MultiIndex.zero(d)
                for part in n_parts:
                    n_total = n_total.add(part)
                # assemble the left tensor: per-vertex branch runs shuffled
                ell_iter = iter(ells)
                seqs = []
                for path, branches in groups:
                    seq = []
                    for edge, sub in branches:
                        ell = next(ell_iter)
                        seq.append((edge.with_index(edge.index.add(ell)), sub))
                    seqs.append(tuple(seq))
                new_ext = Fraction(0) if t.ext is not None else None
                lefts = shuffle_many(seqs).map_basis(
                    lambda kids: PlanarTree(n_total, kids, new_ext))
                for left, mult in lefts.items():
                    if cap is None and not is_unit(_strip_ext(left)) \
                            and grading(left) <= 0:
                        continue
                    out.add_term(Tensor((left, trunk)), weight * mult)
    return out


def _strip_ext(t: PlanarTree) -> PlanarTree:
    return PlanarTree(t.dec, tuple((e, _strip_ext(s)) for e, s in t.children))


_DP_CACHE = {}


def delta_plus(x, cfg: RegularityConfig) -> LinComb:
    """Recentering coproduct projected onto positive left factors."""
    def per_basis(t):
        key = (t, "cfg", cfg.key())
        out = _DP_CACHE.get(key)
        if out is None:
            out = _delta_plus_terms(t, cfg, None)
            _DP_CACHE[key] = out
        return out

    return aslc(x).map_basis(per_basis)


def delta_plus_0(x, cap: MultiIndex) -> LinComb:
    """Unprojected recentering coproduct, increments capped componentwise."""
    def per_basis(t):
        key = (t, "cap", cap)
        out = _DP_CACHE.get(key)
        if out is None:
            out = _delta_plus_terms(t, None, cap)
            _DP_CACHE[key] = out
        return out

    return aslc(x).map_basis(per_basis)


# ---------------------------------------------------------------------------
# recentering maps


class TreeCharacter:
    """Multiplicative functional determined by values on indecomposables.

    Keys are bare unit-decorated vertices (for the polynomial part) and
    planted trees; everything else multiplies out through the normal form.
    """

    def __init__(self, values: dict):
        self.values = {k: Fraction(v) for k, v in values.items()}

    def __call__(self, t: PlanarTree) -> Fraction:
        d = tree_dim(t)
        out = Fraction(1)
        for j, c in enumerate(t.dec):
            if c:
                out *= self.values.get(PlanarTree(MultiIndex.unit(d, j)),
                                       Fraction(0)) ** c
        for edge, sub in t.children:
            out *= self.values.get(planted(edge, sub), Fraction(0))
        return out


def gamma_g(g: TreeCharacter, x, cfg: RegularityConfig) -> LinComb:
    """Recentering map: evaluate the character on the left tensor slot."""
    out = LinComb()
    for t, c in aslc(x).items():
        for (left, right), c2 in delta_plus(t, cfg).items():
            out.add_term(right, c * c2 * g(left))
    return out


def gamma_compose(g: TreeCharacter, h: TreeCharacter, cfg: RegularityConfig):
    """The convolution character x -> sum h(x_(1)) g(x_(2)) over the
    positive-projected coproduct; composition law oracle for gamma maps."""
    def k(t: PlanarTree) -> Fraction:
        out = Fraction(0)
        for (a, b), c in delta_plus(t, cfg).items():
            if not is_unit(b) and regularity(b, cfg) <= 0:
                continue
            out += c * h(a) * g(b)
        return out

    return k


def gamma_k(kfun, x, cfg: RegularityConfig) -> LinComb:
    out = LinComb()
    for t, c in aslc(x).items():
        for (left, right), c2 in delta_plus(t, cfg).items():
            out.add_term(right, c * c2 * kfun(left))
    return out


# ---------------------------------------------------------------------------
# degeneration to the plain edge-labelled picture

# plain label 0 maps to kernel 0 with unit grading contribution; label i >= 1
# maps to noise i; all multi-indices zero


def pb_to_typed(t: PlanarTree, d: int = 1) -> PlanarTree:
    zero = MultiIndex.zero(d)
    kids = []
    for edge, sub in t.children:
        et = EdgeType("K", 0, zero) if edge == 0 else EdgeType("X", edge, zero)
        kids.append((et, pb_to_typed(sub, d)))
    return PlanarTree(zero, tuple(kids))


def typed_to_pb(t: PlanarTree) -> PlanarTree:
    """Inverse of the degeneration embedding; InvalidTree off the subspace."""
    if not (isinstance(t.dec, MultiIndex) and t.dec.is_zero()):
        raise InvalidTree("tree carries a vertex decoration")
    kids = []
    for edge, sub in t.children:
        if not edge.index.is_zero():
            raise InvalidTree("tree carries an edge multi-index")
        label = edge.which if edge.is_noise else 0
        if not edge.is_noise and edge.which != 0:
            raise InvalidTree("non-degenerate kernel kind")
        kids.append((label, typed_to_pb(sub)))
    return PlanarTree(None, tuple(kids))


def in_degenerate_subspace(t: PlanarTree) -> bool:
    try:
        typed_to_pb(t)
    except InvalidTree:
        return False
    return True


def degenerate_cfg(cfg: RegularityConfig) -> RegularityConfig:
    """The typed-mode config matching the plain grading: kernel 0 counts 1."""
    betas = dict(cfg.betas)
    betas[0] = Fraction(1)
    return RegularityConfig(cfg.d, cfg.alphas, betas, cfg.truncation)
