"""Edge-decorated planar trees, the rough-path bridge and the exact model.

Plain-mode trees carry integer edge labels 0..n where 0 renders as an
undecorated edge; labels >= 1 sit on edges adjacent to leaves.  The
vertex-decorated picture maps onto this one by replacing every vertex with a
non-zero label i by two vertices joined by a rightmost edge labelled i.

The rough-path provider is the one-parameter exponential character
exp_*((t-s) L) for a primitive L normalised to have coefficient 1 on the
single time vertex; Chen's identity and the character property then hold
exactly and every model value is a rational polynomial in t-s.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .coactions import rho_T0
from .linalg import LinComb, Multiset, Tensor, aslc, bilinear
from .postlie import (_shuffle_words, gl_product, is_primitive,
                      mkw_coproduct, shuffle_many)
from .trees import (DecoratedRoot, NotInImage, NotPrimitive, PlanarTree,
                    RegularityConfig, TruncationExceeded, regularity,
                    vertex_count)

PB_LEAF = PlanarTree()
TIME_TREE = PlanarTree("0")


# ---------------------------------------------------------------------------
# the vertex-to-edge isomorphism


def phi_tree(t: PlanarTree) -> PlanarTree:
    """Replace each non-zero vertex label by a rightmost edge of that label."""
    children = tuple((0, phi_tree(sub)) for _, sub in t.children)
    if t.dec not in (None, "0"):
        if not (isinstance(t.dec, str) and t.dec.isdigit()):
            raise NotInImage(f"vertex label {t.dec!r} is not in 0..n")
        children += ((int(t.dec), PB_LEAF),)
    return PlanarTree(None, children)


def phi(x) -> LinComb:
    """Shuffle-morphism extension of the isomorphism to ordered forests."""
    def per_basis(b):
        if isinstance(b, PlanarTree):
            return phi_tree(b)
        return tuple(phi_tree(t) for t in b)

    return aslc(x).map_basis(per_basis)


def phi_inv_tree(t: PlanarTree) -> PlanarTree:
    """Inverse of phi_tree; NotInImage when a decorated edge is misplaced."""
    children = t.children
    dec = "0"
    if children and isinstance(children[-1][0], int) and children[-1][0] != 0:
        label, leaf = children[-1]
        if leaf.children:
            raise NotInImage("decorated edge not adjacent to a leaf")
        dec = str(label)
        children = children[:-1]
    kids = []
    for edge, sub in children:
        if edge != 0:
            raise NotInImage("decorated edge is not the rightmost at its vertex")
        kids.append((None, phi_inv_tree(sub)))
    return PlanarTree(dec, tuple(kids))


def phi_inv(x) -> LinComb:
    def per_basis(b):
        if isinstance(b, PlanarTree):
            return phi_inv_tree(b)
        return tuple(phi_inv_tree(t) for t in b)

    return aslc(x).map_basis(per_basis)


def in_phi_image(t: PlanarTree) -> bool:
    """Whether every decorated edge is rightmost at its vertex (and unique).

    These are exactly the plain trees on which the vertex-decorated picture
    exists; the model and both coproducts are closed on them.
    """
    try:
        phi_inv_tree(t)
    except NotInImage:
        return False
    return True


# ---------------------------------------------------------------------------
# tree product and the root-adding map


def tree_product_pb(x, y) -> LinComb:
    """Join roots and shuffle the two branch sequences."""
    def per_basis(t1: PlanarTree, t2: PlanarTree) -> LinComb:
        return _shuffle_words(t1.children, t2.children).map_basis(
            lambda kids: PlanarTree(None, kids))

    return bilinear(x, y, per_basis)


def b_plus_pb(forest) -> PlanarTree:
    """Graft all trees of the word onto a new root by undecorated edges."""
    return PlanarTree(None, tuple((0, t) for t in forest))


def b_minus_pb(t: PlanarTree) -> tuple:
    out = []
    for edge, sub in t.children:
        if edge != 0:
            raise DecoratedRoot("root has a decorated edge; not in the image of the root-adding map")
        out.append(sub)
    return tuple(out)


# ---------------------------------------------------------------------------
# the recentering coproduct on plain trees


def _pb_tree_cuts(t: PlanarTree):
    """Left admissible cuts whose cut edges are all undecorated.

    At each vertex the cut edges form a leftmost prefix of the children, so
    a decorated edge blocks every edge to its right from being cut.
    """
    max_prefix = 0
    for edge, _ in t.children:
        if edge != 0:
            break
        max_prefix += 1
    for k in range(max_prefix + 1):
        pruned_here = tuple(sub for _, sub in t.children[:k])
        kept = t.children[k:]
        for combo in itertools.product(*(_pb_tree_cuts(sub) for _, sub in kept)):
            groups = (pruned_here,) if pruned_here else ()
            trunk_children = []
            for (edge, _), (sub_groups, sub_trunk) in zip(kept, combo):
                groups += sub_groups
                trunk_children.append((edge, sub_trunk))
            yield groups, PlanarTree(None, tuple(trunk_children))


def delta_plus_pb(x) -> LinComb:
    """Recentering coproduct: prune along undecorated left admissible cuts,
    shuffle pruned parts across vertices and graft them onto a new root."""
    def per_basis(t: PlanarTree) -> LinComb:
        out = LinComb()
        for groups, trunk in _pb_tree_cuts(t):
            out.iadd_scaled(shuffle_many(groups).map_basis(
                lambda p: Tensor((b_plus_pb(p), trunk))))
        return out

    return aslc(x).map_basis(per_basis)


def delta_plus_pb_via_mkw(t: PlanarTree) -> LinComb:
    """Oracle route through the vertex-decorated coproduct.

    Trees with no decorated root edge transport directly; other trees go
    through the root-adding correction formula.
    """
    if all(edge == 0 for edge, _ in t.children):
        w = tuple(phi_inv_tree(sub) for sub in b_minus_pb(t))
        out = LinComb()
        for (p, trunk), c in mkw_coproduct(LinComb.term(w)).items():
            left = b_plus_pb(tuple(phi_tree(s) for s in p))
            right = b_plus_pb(tuple(phi_tree(s) for s in trunk))
            out.add_term(Tensor((left, right)), c)
        return out
    lifted = delta_plus_pb_via_mkw(b_plus_pb((t,)))
    lifted.add_term(Tensor((b_plus_pb((t,)), PB_LEAF)), -1)
    out = LinComb()
    for (left, right), c in lifted.items():
        parts = b_minus_pb(right)
        if len(parts) != 1:
            raise NotInImage("correction formula produced a non-tree trunk")
        out.add_term(Tensor((left, parts[0])), c)
    return out


# ---------------------------------------------------------------------------
# negative renormalisation on plain trees


def _pb_blocks(t: PlanarTree, cfg: RegularityConfig):
    """Connected, right-closed, noise-complete subtrees of negative degree."""
    vertices = list(t.paths())
    out = []
    for root in vertices:
        for block in _grow_block(t, root):
            sub = _extract_pb(t, root, block)
            if regularity(sub, cfg) < 0:
                out.append((root, frozenset(block), sub))
    return out


def _grow_block(t: PlanarTree, root):
    """All right-closed, noise-complete connected vertex sets rooted at root.

    Children of an included vertex are chosen as a suffix (right-closure);
    a decorated (noise) edge forces its endpoint into the block whenever the
    parent is in, so only suffixes covering every decorated edge are valid.
    """
    sub = t.subtree(root)
    n = len(sub.children)
    first_noise = n
    for j, (edge, _) in enumerate(sub.children):
        if edge != 0:
            first_noise = j
            break
    for start in range(first_noise + 1):
        # include children start..n-1; each non-noise child extends recursively
        opts = []
        valid = True
        for j in range(start, n):
            edge, csub = sub.children[j]
            if edge != 0:
                opts.append(({root + (j,)},))
            else:
                opts.append(tuple(_grow_block(t, root + (j,))))
        for combo in itertools.product(*opts):
            block = {root}
            for s in combo:
                block |= set(s)
            yield block


def _extract_pb(t: PlanarTree, root, block) -> PlanarTree:
    sub = t.subtree(root)

    def build(path) -> PlanarTree:
        node = t.subtree(path)
        kids = []
        for j, (edge, _) in enumerate(node.children):
            if path + (j,) in block:
                kids.append((edge, build(path + (j,))))
        return PlanarTree(None, tuple(kids))

    return build(root)


def pb_minus_partitions(t: PlanarTree, cfg: RegularityConfig) -> list:
    """All families of disjoint negative admissible subtrees, the empty one
    included; deterministic order."""
    blocks = _pb_blocks(t, cfg)
    vertices = list(t.paths())
    order = {v: i for i, v in enumerate(vertices)}
    by_min = {}
    for root, block, sub in blocks:
        by_min.setdefault(min(block, key=order.get), []).append((root, block, sub))
    families = []

    def rec(idx, used, chosen):
        if idx == len(vertices):
            families.append(chosen)
            return
        v = vertices[idx]
        if v in used:
            rec(idx + 1, used, chosen)
            return
        rec(idx + 1, used, chosen)
        for root, block, sub in by_min.get(v, ()):
            if block & used:
                continue
            rec(idx + 1, used | block, chosen + ((root, block, sub),))

    rec(0, set(), ())
    families.sort(key=lambda fam: (len(fam), [sorted(b) for _, b, _ in fam]))
    return families


def _contract_pb(t: PlanarTree, family) -> LinComb:
    """Contract each family subtree to an undecorated vertex; outside
    children are shuffled across the block's vertices."""
    vmap = {}
    for root, block, _ in family:
        for v in block:
            vmap[v] = block

    def rebuild(path) -> LinComb:
        node = t.subtree(path)
        entries = [(node.children[j][0], path + (j,)) for j in range(len(node.children))]
        kids = _assemble(entries)
        return kids.map_basis(lambda ks: PlanarTree(None, ks))

    def contract_block(block) -> LinComb:
        seqs = LinComb.term(())
        for v in sorted(block):
            node = t.subtree(v)
            entries = [(node.children[j][0], v + (j,))
                       for j in range(len(node.children)) if v + (j,) not in block]
            seqs = bilinear(seqs, _assemble(entries), _shuffle_words)
        return seqs.map_basis(lambda ks: PlanarTree(None, ks))

    def _assemble(entries) -> LinComb:
        out = LinComb.term(())
        for edge, v in entries:
            if v in vmap:
                if any(u in vmap and vmap[u] is vmap[v] and len(u) < len(v)
                       for u in [v[:-1]]):
                    continue  # interior vertex of a block; skip
                part = contract_block(vmap[v]).map_basis(lambda tr, e=edge: ((e, tr),))
            else:
                part = rebuild(v).map_basis(lambda tr, e=edge: ((e, tr),))
            out = bilinear(out, part, lambda a, b: a + b)
        return out

    if () in vmap:
        return contract_block(vmap[()])
    return rebuild(())


def delta_minus_pb(x, cfg: RegularityConfig) -> LinComb:
    """Renormalisation coaction: negative admissible families tensor the
    contraction, left factors multiplied in the free symmetric algebra."""
    def per_basis(t: PlanarTree) -> LinComb:
        out = LinComb()
        for family in pb_minus_partitions(t, cfg):
            left = Multiset(sub for _, _, sub in family)
            out.iadd_scaled(_contract_pb(t, family).map_basis(
                lambda tr: Tensor((left, tr))))
        return out

    return aslc(x).map_basis(per_basis)


def delta_minus_pb_via_rho(t: PlanarTree, cfg: RegularityConfig) -> LinComb:
    """Oracle route: time-cotranslation, negative-tree projection, transport.

    Multi-component blocks die under the projection (their Lie projections
    have no single-tree terms), so both lie_project normalizations agree.
    """
    src = phi_inv_tree(t)
    out = LinComb()
    for (mono, forest), c in rho_T0((src,)).items():
        trees = []
        ok = True
        for f in mono:
            if len(f) != 1 or regularity(f, cfg) >= 0:
                ok = False
                break
            trees.append(phi_tree(f[0]))
        if not ok:
            continue
        if len(forest) != 1:
            continue
        out.add_term(Tensor((Multiset(trees), phi_tree(forest[0]))), c)
    return out


# ---------------------------------------------------------------------------
# exact rough-path provider


class Character:
    """Finitely truncated multiplicative functional on ordered forests."""

    def __init__(self, truncation: int, values: dict, product: str = "shuffle"):
        self.truncation = truncation
        self.values = dict(values)
        self.product = product

    def __call__(self, x) -> Fraction:
        if isinstance(x, LinComb):
            out = Fraction(0)
            for b, c in x.items():
                out += c * self(b)
            return out
        if isinstance(x, PlanarTree):
            x = (x,)
        if vertex_count(x) > self.truncation:
            raise TruncationExceeded(
                f"forest has {vertex_count(x)} vertices, truncation is {self.truncation}")
        return self.values.get(x, Fraction(0))


class RoughPathProvider:
    """Exponential character family: pairing(s, t, w) = <exp_*((t-s)L), w>.

    L must be primitive for the deshuffle coproduct and have coefficient 1
    on the single vertex labelled 0, which makes the family time-augmented.
    """

    def __init__(self, generator: LinComb, truncation: int):
        if not is_primitive(generator):
            raise NotPrimitive("the generator must be a Lie element")
        if generator.coefficient((TIME_TREE,)) != 1:
            raise NotPrimitive("the generator needs coefficient 1 on the time vertex")
        self.generator = generator
        self.truncation = truncation
        self.table = {}  # forest -> {power k: coefficient of u^k/k!}
        power = LinComb.term(())
        self._record(power, 0)
        for k in range(1, truncation + 1):
            power = gl_product(power, generator)
            power = LinComb((w, c) for w, c in power.items()
                            if vertex_count(w) <= truncation)
            self._record(power, k)

    def _record(self, power: LinComb, k: int):
        fact = 1
        for i in range(1, k + 1):
            fact *= i
        for w, c in power.items():
            self.table.setdefault(w, {})[k] = Fraction(c, fact)

    def pairing(self, s, t, w) -> Fraction:
        """<X_st, w> as an exact rational, s and t rational."""
        if isinstance(w, PlanarTree):
            w = (w,)
        if vertex_count(w) > self.truncation:
            raise TruncationExceeded(
                f"forest has {vertex_count(w)} vertices, truncation is {self.truncation}")
        u = Fraction(t) - Fraction(s)
        out = Fraction(0)
        for k, c in self.table.get(w, {}).items():
            out += c * u ** k
        return out

    def pairing_lc(self, s, t, x: LinComb) -> Fraction:
        out = Fraction(0)
        for w, c in x.items():
            out += c * self.pairing(s, t, w)
        return out

    def derivative_pairing(self, s, t, w) -> Fraction:
        """d/dt <X_st, w>, computed exactly as <X_st * L, w>."""
        if isinstance(w, PlanarTree):
            w = (w,)
        u = Fraction(t) - Fraction(s)
        out = Fraction(0)
        for k, c in self.table.get(w, {}).items():
            if k >= 1:
                out += c * k * u ** (k - 1)
        return out

    def character(self, s, t) -> Character:
        values = {w: self.pairing(s, t, w) for w in self.table}
        return Character(self.truncation, values, product="shuffle")


def exp_character(generator: LinComb, a, truncation: int) -> Character:
    """exp_*(a L) as a truncated character; exact convolution-power series."""
    provider = RoughPathProvider(generator, truncation)
    return provider.character(0, Fraction(a))


def edges_are_integration_report(provider: RoughPathProvider, forests) -> list:
    """Check <X * L, w -> time> = d/dt-side against <X, w> coefficientwise.

    Returns the list of offending forests; empty means the integration
    property holds on the supplied family.
    """
    from .postlie import go_graft

    bad = []
    for w in forests:
        if vertex_count(w) + 1 > provider.truncation:
            continue
        grafted = go_graft(LinComb.term(w), LinComb.term((TIME_TREE,)))
        lhs = {}
        for v, c in grafted.items():
            for k, coeff in provider.table.get(v, {}).items():
                lhs[k] = lhs.get(k, Fraction(0)) + c * coeff
        rhs = provider.table.get(w, {})
        # d/dt sum_k lhs_k u^k = sum_k rhs_k u^k  <=>  (k+1) lhs_{k+1} = rhs_k
        ok = all(lhs.get(k + 1, Fraction(0)) * (k + 1) == rhs.get(k, Fraction(0))
                 for k in range(provider.truncation + 1)) and \
            lhs.get(0, Fraction(0)) == 0
        if not ok:
            bad.append(w)
    return bad


# ---------------------------------------------------------------------------
# the model


def _phi_inv_forest_of(t: PlanarTree) -> tuple:
    return tuple(phi_inv_tree(sub) for sub in b_minus_pb(t))


class Model:
    """The exact model induced by a provider and an optional renormalising
    character on negative trees."""

    def __init__(self, provider: RoughPathProvider, cfg: RegularityConfig = None,
                 ell: dict = None):
        self.provider = provider
        self.cfg = cfg
        self.ell = {k: Fraction(v) for k, v in (ell or {}).items()}

    # -- renormalisation --------------------------------------------------

    def ell_value(self, mono: Multiset) -> Fraction:
        out = Fraction(1)
        for tree in mono:
            out *= self.ell.get(tree, Fraction(0))
        return out

    def renormalise(self, x) -> LinComb:
        """M_ell = (ell tensor id) applied to the renormalisation coaction."""
        if not self.ell:
            return aslc(x)
        if self.cfg is None:
            raise TruncationExceeded("renormalisation needs a regularity config")
        out = LinComb()
        for t, c in aslc(x).items():
            for (mono, trunk), c2 in delta_minus_pb(t, self.cfg).items():
                out.add_term(trunk, c * c2 * self.ell_value(mono))
        return out

    # -- Pi ---------------------------------------------------------------

    def pi_plain(self, s, t, tree: PlanarTree) -> Fraction:
        if all(edge == 0 for edge, _ in tree.children):
            return self.provider.pairing(s, t, _phi_inv_forest_of(tree))
        # decorated edge at the root: differentiate the root-added value,
        # exact for the exponential provider since d/dt X_st = X_st * L
        return self.provider.derivative_pairing(s, t, (phi_inv_tree(tree),))

    def pi(self, s, t, x) -> Fraction:
        out = Fraction(0)
        for tree, c in aslc(self.renormalise(x)).items():
            out += c * self.pi_plain(s, t, tree)
        return out

    # -- Gamma ------------------------------------------------------------

    def gamma_char(self, s, t, left: PlanarTree) -> Fraction:
        """Character value of the recentering functional on a left factor."""
        renormed = self.renormalise(left)
        out = Fraction(0)
        for tree, c in renormed.items():
            out += c * self.provider.pairing(s, t, _phi_inv_forest_of(tree))
        return out

    def gamma(self, s, t, x) -> LinComb:
        """Gamma_st = (gamma_ts tensor id) applied to the recentering coproduct."""
        out = LinComb()
        for tree, c in aslc(x).items():
            for (left, right), c2 in delta_plus_pb(tree).items():
                out.add_term(right, c * c2 * self.gamma_char(t, s, left))
        return out


def _convolve_with_generator(provider: RoughPathProvider, w: tuple) -> LinComb:
    """The functional x -> <X * L, x> realised as <X, .> of a combination.

    <X_st * L, w> = sum over the MKW coproduct of w of <X_st, w1> <L, w2>.
    """
    out = LinComb()
    gen = provider.generator
    for (w1, w2), c in mkw_coproduct(LinComb.term(w)).items():
        cl = gen.coefficient(w2)
        if cl:
            out.add_term(w1, c * cl)
    return out


# convenience wrappers matching the operation-level surface


def model_pi(provider: RoughPathProvider, s, t, tree,
             cfg: RegularityConfig = None, ell: dict = None) -> Fraction:
    return Model(provider, cfg, ell).pi(s, t, tree)


def model_gamma(provider: RoughPathProvider, s, t, tree,
                cfg: RegularityConfig = None, ell: dict = None) -> LinComb:
    return Model(provider, cfg, ell).gamma(s, t, tree)


def renormalise(ell: dict, x, cfg: RegularityConfig) -> LinComb:
    """M_ell = (ell tensor id) applied to the renormalisation coaction."""
    out = LinComb()
    for t, c in aslc(x).items():
        for (mono, trunk), c2 in delta_minus_pb(t, cfg).items():
            value = Fraction(1)
            for tree in mono:
                value *= ell.get(tree, Fraction(0))
            out.add_term(trunk, c * c2 * value)
    return out
