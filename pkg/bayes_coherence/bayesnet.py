"""Exact inference over Bayesian networks of binary variables.

A node's CPT lists P(node = true | parents) for every parent assignment,
indexed by bitmask with the node's first parent at bit 0. In documents a
row is keyed by a bitstring whose leftmost character is the first parent.
"""

from functools import reduce
from itertools import combinations
from math import isfinite
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, \
    Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from bayes_coherence.distribution import FloatArray
from bayes_coherence.utils import DocumentError, DocumentSource, \
    ModelError, is_number, load_document, parse_bitstring, to_bitstring


Evidence = Mapping[str, bool]


class NetworkError(ModelError):
    """A network, query or evidence set is invalid."""


class CycleError(NetworkError):
    """The parent relation of a network is not acyclic."""
    def __init__(self, cycle: Sequence[str]) -> None:
        super().__init__("cycle detected: {}"
                         .format(' -> '.join(list(cycle) + [cycle[0]])))
        self.cycle = cycle


class CptShapeError(NetworkError):
    """A CPT does not have one row per parent assignment."""


class ProbabilityRangeError(NetworkError):
    """A CPT entry lies outside [0, 1]."""
    def __init__(self, node: str, value: float) -> None:
        super().__init__("probability {} out of range [0, 1] in the CPT of {}"
                         .format(value, node))
        self.node = node
        self.value = value


class UnknownNodeError(NetworkError):
    """A query, evidence or parent name is not a node of the network."""
    def __init__(self, name: str) -> None:
        super().__init__("unknown node: {}".format(name))
        self.name = name


class ImpossibleEvidenceError(NetworkError):
    """The evidence has probability 0 under the network."""
    def __init__(self) -> None:
        super().__init__('impossible evidence: it has probability 0')


class Factor(NamedTuple('Factor', [('variables', Tuple[str, ...]),
                                   ('table', FloatArray)])):
    """A table over binary variables, one axis of length 2 per variable."""
    @classmethod
    def unit(cls) -> 'Factor':
        """The multiplicative identity."""
        return cls((), np.ones(()))

    def multiply(self, other: 'Factor') -> 'Factor':
        """The pointwise product over the union of both scopes."""
        variables = self.variables + tuple(v for v in other.variables
                                           if v not in self.variables)
        return Factor(variables, self._aligned(variables)
                      * other._aligned(variables))

    def sum_out(self, variable: str) -> 'Factor':
        """Marginalizes `variable` away."""
        axis = self.variables.index(variable)
        variables = self.variables[:axis] + self.variables[axis + 1:]
        return Factor(variables, self.table.sum(axis=axis))

    def reduce(self, evidence: Evidence) -> 'Factor':
        """Fixes every observed variable in scope to its observed value."""
        factor = self
        for variable, value in evidence.items():
            if variable in factor.variables:
                axis = factor.variables.index(variable)
                factor = Factor(factor.variables[:axis]
                                + factor.variables[axis + 1:],
                                np.take(factor.table, int(value), axis=axis))
        return factor

    def _aligned(self, variables: Tuple[str, ...]) -> FloatArray:
        # reorder own axes to follow `variables`, broadcasting missing ones
        order = [self.variables.index(v) for v in variables
                 if v in self.variables]
        table = np.transpose(self.table, order)
        shape = [2 if v in self.variables else 1 for v in variables]
        return np.asarray(table.reshape(shape), dtype=np.float64)


class Node(NamedTuple('Node', [('name', str),
                               ('parents', Tuple[str, ...]),
                               ('cpt', Tuple[float, ...])])):
    """A binary node; cpt[mask] = P(true | parents), first parent at bit 0."""
    @property
    def prior(self) -> Optional[float]:
        """P(true) for a root node."""
        return self.cpt[0] if not self.parents else None

    def factor(self) -> Factor:
        """The CPT as a factor over (parents..., self)."""
        true = np.array(self.cpt, dtype=np.float64) \
            .reshape((2,) * len(self.parents))
        table = np.stack([1 - true, true], axis=-1)

        # C order puts the highest bit, the last parent, on the first axis
        return Factor(tuple(reversed(self.parents)) + (self.name,), table)


class BayesNet(NamedTuple('BayesNet', [('nodes', Tuple[Node, ...])])):
    """An immutable network of binary nodes."""
    @classmethod
    def create(cls, nodes: Iterable[Node]) -> 'BayesNet':
        """Builds and validates a network."""
        net = cls(tuple(Node(node.name, tuple(node.parents),
                             tuple(float(p) for p in node.cpt))
                        for node in nodes))
        validate(net)
        return net

    @classmethod
    def load(cls, source: DocumentSource) -> 'BayesNet':
        """Load and return a BayesNet from a network document."""
        return load_network(source)

    @property
    def names(self) -> List[str]:
        """Node names in declaration order."""
        return [node.name for node in self.nodes]

    def node(self, name: str) -> Node:
        """Looks a node up by name."""
        for node in self.nodes:
            if node.name == name:
                return node
        raise UnknownNodeError(name)

    def graph(self) -> nx.DiGraph:
        """The parent relation as a directed graph."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.names)
        graph.add_edges_from((parent, node.name) for node in self.nodes
                             for parent in node.parents)
        return graph


def validate(net: BayesNet) -> None:
    """
    Checks that names are unique, parents exist, CPTs have 2^|parents|
    entries in [0, 1] and the graph is acyclic.
    """
    names = set()  # type: Set[str]
    for node in net.nodes:
        if node.name in names:
            raise NetworkError("duplicate node: {}".format(node.name))
        names.add(node.name)

    for node in net.nodes:
        if len(set(node.parents)) != len(node.parents):
            raise NetworkError("duplicate parent of {}".format(node.name))
        for parent in node.parents:
            if parent not in names:
                raise UnknownNodeError(parent)

        if len(node.cpt) != 1 << len(node.parents):
            raise CptShapeError("the CPT of {} needs {} entries for {} "
                                "parents, got {}"
                                .format(node.name, 1 << len(node.parents),
                                        len(node.parents), len(node.cpt)))
        for value in node.cpt:
            if not isfinite(value) or not 0 <= value <= 1:
                raise ProbabilityRangeError(node.name, value)

    try:
        cycle = nx.find_cycle(net.graph())
    except nx.NetworkXNoCycle:
        return

    raise CycleError([parent for parent, _ in cycle])


def posterior(net: BayesNet, query: str,
              evidence: Optional[Evidence] = None) -> float:
    """
    P(query = true | evidence), exactly, by variable elimination with a
    min-degree elimination order.
    """
    evidence = dict(evidence or {})
    names = set(net.names)

    for name in [query] + list(evidence):
        if name not in names:
            raise UnknownNodeError(name)
    if query in evidence:
        raise NetworkError("query node {} is also observed".format(query))

    factors = [node.factor().reduce(evidence) for node in net.nodes]
    hidden = [name for name in net.names
              if name != query and name not in evidence]

    for variable in elimination_order(factors, hidden):
        related = [f for f in factors if variable in f.variables]
        if not related:
            continue
        factors = [f for f in factors if variable not in f.variables]
        factors.append(_product(related).sum_out(variable))

    result = _product(factors)
    total = float(result.table.sum())
    if total <= 0:
        raise ImpossibleEvidenceError()

    return float(result.table[1]) / total


def elimination_order(factors: Sequence[Factor],
                      hidden: Sequence[str]) -> List[str]:
    """
    Orders `hidden` greedily by degree in the interaction graph of
    `factors`, adding fill-in edges as variables go. Ties go by name.
    """
    graph = nx.Graph()
    graph.add_nodes_from(hidden)
    for factor in factors:
        graph.add_nodes_from(factor.variables)
        graph.add_edges_from(combinations(factor.variables, 2))

    remaining = set(hidden)
    order = []
    while remaining:
        variable = min(remaining, key=lambda v: (graph.degree(v), v))
        neighbors = list(graph.neighbors(variable))
        graph.add_edges_from(combinations(neighbors, 2))
        graph.remove_node(variable)
        remaining.remove(variable)
        order.append(variable)

    return order


def joint_probability(net: BayesNet, assignment: Evidence) -> float:
    """The probability of a full assignment, by the chain rule."""
    probability = 1.0
    for node in net.nodes:
        mask = sum(1 << i for i, parent in enumerate(node.parents)
                   if assignment[parent])
        p = node.cpt[mask]
        probability *= p if assignment[node.name] else 1 - p
    return probability


def d_separated(net: BayesNet, x_nodes: Iterable[str],
                y_nodes: Iterable[str], z_nodes: Iterable[str] = ()) -> bool:
    """
    True iff every path between `x_nodes` and `y_nodes` is blocked by
    `z_nodes`, decided by passing a ball along active trails.
    """
    xs, ys, zs = set(x_nodes), set(y_nodes), set(z_nodes)
    graph = net.graph()

    for name in xs | ys | zs:
        if name not in graph:
            raise UnknownNodeError(name)
    if xs & ys or xs & zs or ys & zs:
        raise NetworkError("d-separation needs disjoint node sets")

    shaded = set(zs)
    for node in zs:
        shaded |= nx.ancestors(graph, node)

    # a ball arrives at a node either from a child or from a parent
    from_child, from_parent = 'child', 'parent'
    schedule = [(node, from_child) for node in xs]
    visited = set()  # type: Set[Tuple[str, str]]

    while schedule:
        node, direction = schedule.pop()
        if node in ys:
            return False
        if (node, direction) in visited:
            continue
        visited.add((node, direction))

        if direction == from_child and node not in zs:
            schedule.extend((p, from_child) for p in graph.predecessors(node))
            schedule.extend((c, from_parent) for c in graph.successors(node))

        if direction == from_parent:
            if node in shaded:
                schedule.extend((p, from_child)
                                for p in graph.predecessors(node))
            if node not in zs:
                schedule.extend((c, from_parent)
                                for c in graph.successors(node))

    return True


def load_network(source: DocumentSource) -> BayesNet:
    """
    Loads a network document:

        {"nodes": [{"name": "R", "parents": [], "cpt": 0.5},
                   {"name": "REPR", "parents": ["R"],
                    "cpt": {"0": 0.4, "1": 0.8}}]}

    A root node's cpt may be a bare probability.
    """
    document = load_document(source)
    entries = document.get('nodes')
    if not isinstance(entries, list):
        raise DocumentError("network document needs a list of 'nodes'")

    return BayesNet.create(_parse_node(entry) for entry in entries)


def load_evidence(source: DocumentSource) -> Dict[str, bool]:
    """Loads an evidence document, {"REPR1": true, ...}."""
    document = load_document(source)

    for name, value in document.items():
        if not isinstance(value, bool):
            raise DocumentError("evidence for {} must be true or false, got "
                                "{!r}".format(name, value))

    return {str(name): bool(value) for name, value in document.items()}


def network_document(net: BayesNet) -> Dict[str, Any]:
    """The document `load_network` reads back as `net`."""
    return {'nodes': [
        {'name': node.name,
         'parents': list(node.parents),
         'cpt': {to_bitstring(mask, len(node.parents)): p
                 for mask, p in enumerate(node.cpt)}}
        for node in net.nodes]}


def _parse_node(entry: Any) -> Node:
    if not isinstance(entry, dict) or not isinstance(entry.get('name'), str):
        raise DocumentError("node entry needs a 'name', got {!r}"
                            .format(entry))

    name = entry['name']
    parents = entry.get('parents', [])
    if not isinstance(parents, list) \
            or not all(isinstance(p, str) for p in parents):
        raise DocumentError("parents of {} must be a list of names"
                            .format(name))

    return Node(name, tuple(parents),
                tuple(parse_cpt(name, entry.get('cpt'), len(parents))))


def parse_cpt(name: str, value: Any, arity: int) -> List[float]:
    """Reads CPT rows keyed by parent bitstring (a root may give a number)."""
    if is_number(value) and arity == 0:
        return [float(value)]
    if not isinstance(value, dict):
        raise DocumentError("cpt of {} must map parent bitstrings to "
                            "probabilities".format(name))

    rows = {}  # type: Dict[int, float]
    for bits, p in value.items():
        if not is_number(p):
            raise DocumentError("cpt of {} has a non-numeric entry {!r}"
                                .format(name, p))
        rows[parse_bitstring(bits, arity)] = float(p)

    if len(rows) != 1 << arity:
        raise CptShapeError("the CPT of {} needs {} rows, got {}"
                            .format(name, 1 << arity, len(rows)))

    return [rows[mask] for mask in range(1 << arity)]


def _product(factors: Iterable[Factor]) -> Factor:
    return reduce(Factor.multiply, factors, Factor.unit())
