"""Admissible partitions and the cosubstitution/cotranslation coactions.

A partition block is a set of vertices of an ordered forest whose induced
components are subtrees such that (i) the component roots are either all
forest roots or all children of one common vertex, consecutively placed in
the planar embedding, and (ii) whenever an edge lies in the block, every
edge to its right at the same vertex does too.

Left tensor factors live in the free symmetric algebra on pairs (Lie
polynomial, letter).  Since the symmetric algebra of a subspace sits inside
the symmetric algebra of the ambient span of forests, monomials are always
expanded multilinearly into multisets of (forest, letter) pairs, which gives
a canonical basis and makes equality checks exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .linalg import LinComb, Multiset, Tensor, aslc, bilinear
from .postlie import _shuffle_words, mkw_coproduct
from .trees import NonplanarTree, PlanarTree, np_forest

# vertex addresses in a forest: (tree index, path within the tree)


def _forest_vertices(w: tuple) -> list:
    out = []
    for i, t in enumerate(w):
        out.extend((i, p) for p in t.paths())
    return out


def _parent(v):
    i, path = v
    return None if not path else (i, path[:-1])


def _children(w, v) -> list:
    i, path = v
    sub = w[i].subtree(path)
    return [(i, path + (j,)) for j in range(len(sub.children))]


def _is_valid_block(w: tuple, block: frozenset) -> bool:
    roots = []
    for v in block:
        p = _parent(v)
        if p is None or p not in block:
            roots.append(v)
        if p is not None and p in block:
            # right-closure: siblings to the right must be in the block too
            i, path = v
            parent_sub = w[i].subtree(path[:-1])
            for j in range(path[-1] + 1, len(parent_sub.children)):
                if (i, path[:-1] + (j,)) not in block:
                    return False
    root_parents = {_parent(v) for v in roots}
    if len(root_parents) != 1:
        return False
    parent = root_parents.pop()
    if parent is None:
        positions = sorted(v[0] for v in roots)
        if any(v[1] for v in roots):
            return False
    else:
        if parent in block:
            return False
        positions = sorted(v[1][-1] for v in roots)
    # adjacency: the roots occupy consecutive positions
    return positions == list(range(positions[0], positions[-1] + 1))


def validate_block(w: tuple, block) -> bool:
    """Independent re-check of both admissibility conditions (used by tests)."""
    block = frozenset(block)
    vertices = set(_forest_vertices(w))
    if not block or not block <= vertices:
        return False
    return _is_valid_block(w, block)


@dataclass(frozen=True)
class Partition:
    """Disjoint admissible blocks of a host forest, in deterministic order."""

    blocks: tuple
    spanning: bool


def _all_blocks(w: tuple) -> list:
    vertices = _forest_vertices(w)
    out = []
    for r in range(1, len(vertices) + 1):
        for combo in itertools.combinations(vertices, r):
            block = frozenset(combo)
            if _is_valid_block(w, block):
                out.append(block)
    return out


def admissible_partitions(w: tuple, spanning: bool) -> list:
    """All (spanning) admissible partitions, deterministically ordered.

    Each family is visited once: at every vertex only blocks whose smallest
    vertex is that vertex may start, so skipped vertices stay uncovered.
    """
    vertices = _forest_vertices(w)
    order = {v: i for i, v in enumerate(vertices)}
    blocks = _all_blocks(w)
    by_min = {}
    for b in blocks:
        by_min.setdefault(min(b, key=order.get), []).append(b)
    results = []

    def rec(idx: int, used: set, chosen: tuple):
        if idx == len(vertices):
            results.append(chosen)
            return
        v = vertices[idx]
        if v in used:
            rec(idx + 1, used, chosen)
            return
        if not spanning:
            rec(idx + 1, used, chosen)
        for b in by_min.get(v, ()):
            if b & used:
                continue
            rec(idx + 1, used | b, chosen + (b,))

    rec(0, set(), ())
    out = []
    for chosen in results:
        ordered = tuple(sorted(chosen, key=lambda b: sorted(b)))
        covered = len(set().union(*chosen)) if chosen else 0
        out.append(Partition(ordered, spanning=covered == len(vertices)))
    out.sort(key=lambda p: (len(p.blocks), [sorted(b) for b in p.blocks]))
    return out


# ---------------------------------------------------------------------------
# block extraction and contraction


def _extract_block(w: tuple, block: frozenset) -> tuple:
    """The block as an ordered forest (components in planar order of roots)."""
    roots = sorted((v for v in block if _parent(v) not in block),
                   key=lambda v: (v[0], v[1]))

    def build(v) -> PlanarTree:
        i, path = v
        sub = w[i].subtree(path)
        kids = []
        for j, (edge, _) in enumerate(sub.children):
            cv = (i, path + (j,))
            if cv in block:
                kids.append((edge, build(cv)))
        return PlanarTree(sub.dec, tuple(kids))

    return tuple(build(v) for v in roots)


def _seq_shuffle(seqs) -> LinComb:
    """Shuffle of several sequences of child entries, as LinComb over tuples."""
    out = LinComb.term(())
    for s in seqs:
        out = bilinear(out, LinComb.term(tuple(s)), _shuffle_words)
    return out


def contract(w: tuple, blocks: tuple, tags: tuple) -> LinComb:
    """Contract each block to one vertex decorated by the matching tag.

    The contracted vertex inherits the planar position of the block's
    leftmost root; children of block vertices that stay outside the block
    are shuffled across block vertices, keeping each vertex's own order.
    """
    vmap = {}
    for b, tag in zip(blocks, tags):
        for v in b:
            vmap[v] = (b, tag)

    def rebuild(v) -> LinComb:
        # v not in any block: rebuild its subtree with groups contracted
        i, path = v
        sub = w[i].subtree(path)
        entries = [(sub.children[j][0], (i, path + (j,)))
                   for j in range(len(sub.children))]
        kids = _assemble(entries)
        return kids.map_basis(lambda ks: PlanarTree(sub.dec, ks))

    def contract_block(b, tag) -> LinComb:
        seqs_lc = LinComb.term(())
        for v in sorted(b):
            i, path = v
            sub = w[i].subtree(path)
            entries = [(sub.children[j][0], (i, path + (j,)))
                       for j in range(len(sub.children))
                       if (i, path + (j,)) not in b]
            seq = _assemble(entries)
            seqs_lc = bilinear(seqs_lc, seq, _shuffle_words)
        return seqs_lc.map_basis(lambda ks: PlanarTree(tag, ks))

    def _assemble(entries) -> LinComb:
        """entries: (edge, vertex) in planar order; group block runs."""
        groups = []
        idx = 0
        while idx < len(entries):
            edge, v = entries[idx]
            if v in vmap:
                b, tag = vmap[v]
                run = [v]
                while idx + 1 < len(entries) and entries[idx + 1][1] in vmap \
                        and vmap[entries[idx + 1][1]][0] is b:
                    idx += 1
                    run.append(entries[idx][1])
                groups.append(("block", edge, b, tag))
            else:
                groups.append(("plain", edge, v, None))
            idx += 1
        out = LinComb.term(())
        for kindtag, edge, x, tag in groups:
            if kindtag == "plain":
                part = rebuild(x).map_basis(lambda t, e=edge: ((e, t),))
            else:
                part = contract_block(x, tag).map_basis(lambda t, e=edge: ((e, t),))
            out = bilinear(out, part, lambda a, b2: a + b2)
        return out

    top_entries = [(None, (i, ())) for i in range(len(w))]
    forest_lc = _assemble(top_entries)
    return forest_lc.map_basis(lambda ks: tuple(t for _, t in ks))


# ---------------------------------------------------------------------------
# projection onto Lie polynomials


@lru_cache(maxsize=None)
def _eulerian_basis(w: tuple) -> LinComb:
    """First Eulerian idempotent: the convolution logarithm of the identity.

    e = sum_k (-1)^(k+1)/k m^(k) J^(tensor k) Delta_deshuffle^(k-1) with J
    the augmentation-complement projection; evaluated by colouring the tree
    positions of w with k colours, all colours used.
    """
    n = len(w)
    if n == 0:
        return LinComb()
    out = LinComb()
    for k in range(1, n + 1):
        coeff = Fraction((-1) ** (k + 1), k)
        for colours in itertools.product(range(k), repeat=n):
            if len(set(colours)) != k:
                continue
            parts = []
            for colour in range(k):
                parts.append(tuple(w[i] for i in range(n) if colours[i] == colour))
            merged = tuple(itertools.chain.from_iterable(parts))
            out.add_term(merged, coeff)
    return out


@lru_cache(maxsize=None)
def _leftbracket_basis(w: tuple) -> LinComb:
    """pi(t1...tk) = [t1, pi(t2...tk)], pi(t) = t, brackets as commutators."""
    if not w:
        return LinComb()
    if len(w) == 1:
        return LinComb.term(w)
    inner = _leftbracket_basis(w[1:])
    out = LinComb()
    for rest, c in inner.items():
        out.add_term((w[0],) + rest, c)
        out.add_term(rest + (w[0],), -c)
    return out


def lie_project(x, normalization: str = "eulerian") -> LinComb:
    """Projection of ordered forests onto Lie polynomials.

    'eulerian' is the idempotent projection onto primitives and is the
    normalization under which the cotranslation compatibility holds in
    general; 'leftbracket' iterates the commutator, reproduces coefficient 1
    on displays where a block has several components, and first diverges
    from the compatibility on 5-vertex hosts (e.g. the forest {o o[o] o[o]}).
    """
    if normalization == "eulerian":
        return aslc(x).map_basis(_eulerian_basis)
    if normalization == "leftbracket":
        return aslc(x).map_basis(_leftbracket_basis)
    raise ValueError(f"unknown normalization {normalization!r}")


# ---------------------------------------------------------------------------
# the coactions


def _as_forest(x):
    if isinstance(x, PlanarTree):
        return (x,)
    return tuple(x)


def rho(w, alphabet, spanning: bool, normalization: str = "eulerian",
        tagged: bool = True, fixed_tag=None) -> LinComb:
    """Common core of the coactions.

    Returns a LinComb over (Multiset of left factors, contracted forest)
    where left factors are (forest, letter) pairs when ``tagged``, bare
    forests otherwise.  ``fixed_tag`` forces one contraction letter instead
    of summing over the alphabet.
    """
    w = _as_forest(w)
    alphabet = tuple(alphabet)
    out = LinComb()
    for part in admissible_partitions(w, spanning):
        blocks = part.blocks
        projected = [lie_project(LinComb.term(_extract_block(w, b)), normalization)
                     for b in blocks]
        tags_iter = [(fixed_tag,) * len(blocks)] if fixed_tag is not None \
            else itertools.product(alphabet, repeat=len(blocks))
        for tags in tags_iter:
            right = contract(w, blocks, tags)
            left = LinComb.term(Multiset())
            for lc_i, tag in zip(projected, tags):
                items = lc_i.map_basis(lambda f, t=tag: Multiset([(f, t)]) if tagged
                                       else Multiset([f]))
                left = bilinear(left, items, lambda m1, m2: m1 * m2)
            out.iadd_scaled(bilinear(left, right, lambda m, f: Tensor((m, f))))
    return out


def rho_S(w, alphabet, normalization: str = "eulerian") -> LinComb:
    """Cosubstitution: spanning admissible partitions, tagged left factors."""
    return rho(w, alphabet, spanning=True, normalization=normalization)


def rho_T(w, alphabet, normalization: str = "eulerian") -> LinComb:
    """Cotranslation: all admissible partitions, tagged left factors."""
    return rho(w, alphabet, spanning=False, normalization=normalization)


def rho_T0(w, normalization: str = "eulerian") -> LinComb:
    """Time-cotranslation: contraction letter fixed to the time letter 0."""
    return rho(w, ("0",), spanning=False, normalization=normalization,
               tagged=False, fixed_tag="0")


# ---------------------------------------------------------------------------
# non-planar coactions


def _np_vertices(t: NonplanarTree, prefix=()):
    yield prefix
    for j, c in enumerate(t.children):
        yield from _np_vertices(c, prefix + (j,))


def _np_subtree(t: NonplanarTree, path):
    for j in path:
        t = t.children[j]
    return t


def _np_connected_subsets(t: NonplanarTree, root_path=()):
    """All vertex sets inducing a connected subtree rooted at root_path."""
    sub = _np_subtree(t, root_path)
    child_sets = []
    for j in range(len(sub.children)):
        opts = [frozenset()]
        opts.extend(_np_connected_subsets(t, root_path + (j,)))
        child_sets.append(opts)
    for combo in itertools.product(*child_sets):
        yield frozenset({root_path}).union(*combo)


def rho_np(forest, alphabet, spanning: bool) -> LinComb:
    """Non-planar coactions: blocks are arbitrary disjoint subtrees.

    Left factors are the subtrees themselves (no Lie projection needed);
    contraction glues outside children onto the new vertex as a multiset.
    """
    if isinstance(forest, NonplanarTree):
        forest = (forest,)
    forest = tuple(forest)
    alphabet = tuple(alphabet)
    all_blocks = []
    for i, t in enumerate(forest):
        for path in _np_vertices(t):
            for s in _np_connected_subsets(t, path):
                all_blocks.append((i, frozenset((i, p) for p in s)))
    vertices = [(i, p) for i, t in enumerate(forest) for p in _np_vertices(t)]
    order = {v: i for i, v in enumerate(vertices)}
    by_min = {}
    for _, b in all_blocks:
        by_min.setdefault(min(b, key=order.get), []).append(b)
    families = []

    def rec(idx, used, chosen):
        if idx == len(vertices):
            if not spanning or len(used) == len(vertices):
                families.append(chosen)
            return
        v = vertices[idx]
        if v in used:
            rec(idx + 1, used, chosen)
            return
        if not spanning:
            rec(idx + 1, used, chosen)
        for b in by_min.get(v, ()):
            if b & used:
                continue
            rec(idx + 1, used | b, chosen + (b,))

    rec(0, set(), ())
    out = LinComb()
    for blocks in families:
        blocks = tuple(sorted(blocks, key=lambda b: sorted(b)))
        extracted = [_np_extract(forest, b) for b in blocks]
        for tags in itertools.product(alphabet, repeat=len(blocks)):
            left = Multiset((sub, tag) for sub, tag in zip(extracted, tags))
            right = _np_contract(forest, blocks, tags)
            out.add_term(Tensor((left, right)), 1)
    return out


def _np_extract(forest, block) -> NonplanarTree:
    root = min(block, key=lambda v: len(v[1]))

    def build(v):
        i, path = v
        sub = _np_subtree(forest[i], path)
        kids = [build((i, path + (j,))) for j in range(len(sub.children))
                if (i, path + (j,)) in block]
        return NonplanarTree(sub.dec, tuple(kids))

    return build(root)


def _np_contract(forest, blocks, tags) -> tuple:
    vmap = {}
    for b, tag in zip(blocks, tags):
        for v in b:
            vmap[v] = (b, tag)

    def rebuild(v):
        i, path = v
        if v in vmap:
            b, tag = vmap[v]
            if any(len(u[1]) < len(path) and u[1] == path[:len(u[1])] for u in b
                   if u != v):
                return None  # interior block vertex; handled at the block root
            kids = []
            for u in sorted(b):
                ui, upath = u
                sub = _np_subtree(forest[ui], upath)
                for j in range(len(sub.children)):
                    cv = (ui, upath + (j,))
                    if cv not in b:
                        kids.append(rebuild(cv))
            return NonplanarTree(tag, tuple(kids))
        sub = _np_subtree(forest[i], path)
        kids = [rebuild((i, path + (j,))) for j in range(len(sub.children))]
        return NonplanarTree(sub.dec, tuple(kids))

    return np_forest(rebuild((i, ())) for i in range(len(forest)))


# ---------------------------------------------------------------------------
# cointeraction


def m13(quad: LinComb) -> LinComb:
    """m^{1,3}(a (x) b (x) c (x) d) = ac (x) b (x) d on multiset left slots."""
    out = LinComb()
    for (a, b, c, d), coeff in quad.items():
        out.add_term(Tensor((a * c, b, d)), coeff)
    return out


def cointeraction_sides(w, normalization: str = "eulerian"):
    """Both sides of the compatibility between time-cotranslation and the
    MKW coproduct, as 3-tensor sums over (multiset, forest, forest)."""
    w = _as_forest(w)
    quad = LinComb()
    for (p, t), c in mkw_coproduct(LinComb.term(w)).items():
        rp = rho_T0(p, normalization)
        rt = rho_T0(t, normalization)
        for (m1, f1), c1 in rp.items():
            for (m2, f2), c2 in rt.items():
                quad.add_term(Tensor((m1, f1, m2, f2)), c * c1 * c2)
    lhs = m13(quad)
    rhs = LinComb()
    for (m, f), c in rho_T0(w, normalization).items():
        for (p, t), c2 in mkw_coproduct(LinComb.term(f)).items():
            rhs.add_term(Tensor((m, p, t)), c * c2)
    return lhs, rhs


def cointeraction_check(w, normalization: str = "eulerian") -> bool:
    lhs, rhs = cointeraction_sides(w, normalization)
    return lhs == rhs


def counit_check(w, alphabet) -> bool:
    """(eps (x) id) rho_T = id where eps keeps only the empty partition."""
    w = _as_forest(w)
    kept = LinComb()
    for (m, f), c in rho_T(w, alphabet).items():
        if not m:
            kept.add_term(f, c)
    return kept == LinComb.term(w)
