"""Networks that read off coherence and acceptance by plain inference.

The coherence network holds propositions R1..Rn, one report node REPRi per
source, a conjunction node C that is true iff every Ri is, and one
counterfactual report node REPi&R per source hanging off C. Instantiating
the REPRi gives P*; instantiating the REPi&R gives the posterior of a
maximally coherent set with the same prior. The expansion network drops
the counterfactual nodes and has two conjunction nodes, Cn over R1..Rn and
C(n+1) over every proposition.

Both constructions accept relaxations: per-source reliabilities, extra
dependence edges into report nodes and one source reporting on several
items. Relaxed networks have no closed form to compare against.
"""

import re
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, \
    Optional, Sequence, Set, Tuple
from warnings import warn

import numpy as np

from bayes_coherence.bayesnet import BayesNet, Node, parse_cpt, posterior
from bayes_coherence.coherence import UndefinedCoherenceError
from bayes_coherence.distribution import JointDistribution, \
    ReliabilityError, ReliabilityParams, load_distribution, marginalize
from bayes_coherence.utils import AdvisoryWarning, DocumentError, \
    DocumentSource, ModelError, is_int, is_number, load_document


CONJUNCTION = 'C'
CONTEXT_FILLER = 0.5

_REPORT = re.compile(r'REPR(\d+(?:\+\d+)*)')
_COUNTERFACTUAL = re.compile(r'REP(\d+)&R')
_CONJUNCTION = re.compile(r'C(\d*)')


class ClosedFormUnavailableWarning(AdvisoryWarning):
    """A relaxed network can only be evaluated by inference."""


class FigureSpecError(ModelError):
    """A figure spec is inconsistent."""


def proposition_name(i: int) -> str:
    """The node of proposition i (1-based)."""
    return "R{}".format(i)


def report_name(*items: int) -> str:
    """The report node of the source reporting on `items`."""
    return "REPR{}".format('+'.join(str(i) for i in items))


def counterfactual_name(i: int) -> str:
    """The counterfactual report node of source i."""
    return "REP{}&R".format(i)


class DependenceEdge(NamedTuple('DependenceEdge', [('parent', str),
                                                   ('child', str)])):
    """An extra arrow into a report node, from a proposition or report."""


class SharedSource(NamedTuple('SharedSource',
                              [('items', Tuple[int, ...]),
                               ('cpt', Tuple[float, ...])])):
    """
    One source reporting on several items: a single report node whose
    parents are the reported propositions (then any extra parents), with a
    user-supplied CPT.
    """
    @property
    def name(self) -> str:
        """The name of the shared report node."""
        return report_name(*self.items)


class FigureSpec(NamedTuple('FigureSpec',
                            [('distribution', JointDistribution),
                             ('sources', Tuple[ReliabilityParams, ...]),
                             ('extra_edges', Tuple[DependenceEdge, ...]),
                             ('report_cpts',
                              Tuple[Tuple[str, Tuple[float, ...]], ...]),
                             ('shared_sources', Tuple[SharedSource, ...]),
                             ('relaxed', bool)])):
    """
    A base distribution over R1..Rn plus the reliability of each source,
    either one (p, q) shared by all sources or one per source. Unless
    `relaxed` is set every source must satisfy p > q > 0.
    """
    @classmethod
    def create(cls, distribution: JointDistribution,
               sources: Sequence[ReliabilityParams], *,
               extra_edges: Iterable[DependenceEdge] = (),
               report_cpts: Optional[Mapping[str, Sequence[float]]] = None,
               shared_sources: Iterable[SharedSource] = (),
               relaxed: bool = False) -> 'FigureSpec':
        """Validates and returns a spec."""
        n = distribution.n
        if len(sources) not in (1, n):
            raise FigureSpecError("expected 1 or {} sources, got {}"
                                  .format(n, len(sources)))

        spec = cls(distribution,
                   tuple(_check_source(s, relaxed) for s in sources),
                   tuple(DependenceEdge(*edge) for edge in extra_edges),
                   tuple((name, tuple(float(p) for p in cpt))
                         for name, cpt in (report_cpts or {}).items()),
                   tuple(SharedSource(tuple(s.items),
                                      tuple(float(p) for p in s.cpt))
                         for s in shared_sources),
                   bool(relaxed))
        _check_structure(spec)

        return spec

    @property
    def n(self) -> int:
        """The number of propositions."""
        return self.distribution.n

    def source(self, i: int) -> ReliabilityParams:
        """The reliability of the source of item i (1-based)."""
        return self.sources[0] if len(self.sources) == 1 \
            else self.sources[i - 1]

    def report_nodes(self) -> List[str]:
        """Every report node name, in item order."""
        shared = {i: s for s in self.shared_sources for i in s.items}
        names = []  # type: List[str]
        for i in range(1, self.n + 1):
            name = shared[i].name if i in shared else report_name(i)
            if name not in names:
                names.append(name)
        return names

    def extra_parents(self, child: str) -> Tuple[str, ...]:
        """Parents of `child` added by dependence edges, in edge order."""
        return tuple(e.parent for e in self.extra_edges if e.child == child)

    @property
    def homogeneous(self) -> bool:
        """True if every source shares one (p, q)."""
        return len(set(self.sources)) == 1

    @property
    def has_relaxations(self) -> bool:
        """True if the closed-form measures do not describe the network."""
        return bool(self.extra_edges or self.shared_sources) \
            or not self.homogeneous \
            or any(not s.p > s.q > 0 for s in self.sources)

    def likelihood_ratio(self) -> float:
        """The shared x = q/p of a spec without relaxations."""
        if self.has_relaxations:
            raise FigureSpecError('a relaxed spec has no single likelihood '
                                  'ratio')
        return self.sources[0].x


FigureOneSpec = FigureSpec
FigureTwoSpec = FigureSpec


class CoherenceReading(NamedTuple('CoherenceReading',
                                  [('posterior', float),
                                   ('max_posterior', float),
                                   ('coherence', float)])):
    """P*, P^max* and their ratio, as read off a coherence network."""


class AcceptanceReading(NamedTuple('AcceptanceReading',
                                   [('value_old', float),
                                    ('value_new', float)])):
    """The acceptance of the old and the expanded set."""


def build_figure_one(spec: FigureSpec) -> BayesNet:
    """Builds the network whose read-offs give P*, P^max* and c."""
    _warn_relaxed(spec)
    n = spec.n

    nodes = _proposition_nodes(spec.distribution) + _report_nodes(spec)
    nodes.append(_conjunction(CONJUNCTION, n))
    for i in range(1, n + 1):
        source = spec.source(i)
        nodes.append(Node(counterfactual_name(i), (CONJUNCTION,),
                          (source.q, source.p)))

    return BayesNet.create(nodes)


def build_figure_two(spec: FigureSpec) -> BayesNet:
    """
    Builds the network whose read-offs give the acceptance of R1..Rn and
    of R1..R(n+1); the spec covers all n + 1 propositions.
    """
    if spec.n < 2:
        raise FigureSpecError('an expansion network needs at least two '
                              'propositions')
    _warn_relaxed(spec)

    nodes = _proposition_nodes(spec.distribution) + _report_nodes(spec)
    nodes.append(_conjunction("C{}".format(spec.n - 1), spec.n - 1))
    nodes.append(_conjunction("C{}".format(spec.n), spec.n))

    return BayesNet.create(nodes)


def read_off_coherence(net: BayesNet) -> CoherenceReading:
    """Reads P*, P^max* and c off a network from `build_figure_one`."""
    reports = [n for n in net.names if _REPORT.fullmatch(n)]
    counterfactuals = [n for n in net.names if _COUNTERFACTUAL.fullmatch(n)]

    p_star = posterior(net, CONJUNCTION, {r: True for r in reports})
    p_max = posterior(net, CONJUNCTION, {c: True for c in counterfactuals})
    if p_max == 0:
        raise UndefinedCoherenceError()

    return CoherenceReading(p_star, p_max, min(p_star / p_max, 1.0))


def read_off_acceptance(net: BayesNet) -> AcceptanceReading:
    """
    Reads the acceptance of the old and the expanded set off a network from
    `build_figure_two`. The old set is evidenced by the report nodes whose
    items all belong to it.
    """
    conjunctions = sorted((n for n in net.names
                           if _CONJUNCTION.fullmatch(n) and n != CONJUNCTION),
                          key=lambda n: len(net.node(n).parents))
    if len(conjunctions) != 2:
        raise FigureSpecError('an expansion network has two conjunction '
                              'nodes, found {}'.format(len(conjunctions)))

    old, new = conjunctions
    old_size = len(net.node(old).parents)
    reports = [n for n in net.names if _REPORT.fullmatch(n)]
    old_reports = [r for r in reports
                   if max(_report_items(r)) <= old_size]

    value_old = posterior(net, old, {r: True for r in old_reports})
    value_new = posterior(net, new, {r: True for r in reports})

    return AcceptanceReading(value_old, value_new)


def load_figure_spec(source: DocumentSource,
                     default_sources: Sequence[ReliabilityParams] = ()
                     ) -> FigureSpec:
    """
    Loads a figure spec document:

        {"distribution": {"cells": 100, "intervals": [[41, 60], [51, 70]]},
         "sources": [{"p": 0.8, "q": 0.4}],
         "extra_edges": [{"from": "REPR1", "to": "REPR2"}],
         "report_cpts": {"REPR2": {"00": 0.3, "10": 0.7, ...}},
         "shared_sources": [{"items": [1, 2], "cpt": {...}}],
         "relaxed": false}

    `default_sources` stand in when the document has no "sources". CPT rows
    are keyed by bitstrings over the report node's parents: its own
    proposition(s) first, then extra parents in edge order.
    """
    document = load_document(source)

    if not isinstance(document.get('distribution'), dict):
        raise DocumentError("figure spec needs a 'distribution' object")
    distribution = load_distribution(document['distribution'])

    relaxed = document.get('relaxed', False)
    if not isinstance(relaxed, bool):
        raise DocumentError("'relaxed' must be true or false")

    if 'sources' in document:
        sources = _parse_sources(document['sources'])
    elif default_sources:
        sources = list(default_sources)
    else:
        raise DocumentError("figure spec needs 'sources' (or a reliability "
                            "on the command line)")

    edges = [_parse_edge(e) for e in _list(document, 'extra_edges')]
    extras = {}  # type: Dict[str, List[str]]
    for edge in edges:
        extras.setdefault(edge.child, []).append(edge.parent)

    shared = []
    for entry in _list(document, 'shared_sources'):
        items = entry.get('items') if isinstance(entry, dict) else None
        if not isinstance(items, list) \
                or not all(is_int(i) for i in items):
            raise DocumentError("shared source needs a list of 'items'")
        name = report_name(*items)
        arity = len(items) + len(extras.get(name, []))
        shared.append(SharedSource(tuple(items), tuple(
            parse_cpt(name, entry.get('cpt'), arity))))

    cpts = document.get('report_cpts', {})
    if not isinstance(cpts, dict):
        raise DocumentError("'report_cpts' must map report nodes to CPTs")
    report_cpts = {name: parse_cpt(name, cpt, 1 + len(extras.get(name, [])))
                   for name, cpt in cpts.items()}

    return FigureSpec.create(distribution, sources, extra_edges=edges,
                             report_cpts=report_cpts, shared_sources=shared,
                             relaxed=relaxed)


def _proposition_nodes(d: JointDistribution) -> List[Node]:
    # chain factorization: R(k+1) has parents R1..Rk
    nodes = []
    for k in range(d.n):
        upper = marginalize(d, k + 1).probs.reshape(2, 1 << k)
        context = upper.sum(axis=0)
        cpt = np.divide(upper[1], context, out=np.full(1 << k, CONTEXT_FILLER),
                        where=context > 0)
        nodes.append(Node(proposition_name(k + 1),
                          tuple(proposition_name(i) for i in range(1, k + 1)),
                          tuple(float(p) for p in cpt)))
    return nodes


def _report_nodes(spec: FigureSpec) -> List[Node]:
    cpts = dict(spec.report_cpts)
    nodes = []

    for shared in spec.shared_sources:
        parents = tuple(proposition_name(i) for i in shared.items)
        nodes.append(Node(shared.name,
                          parents + spec.extra_parents(shared.name),
                          shared.cpt))

    shared_items = {i for s in spec.shared_sources for i in s.items}
    for i in range(1, spec.n + 1):
        if i in shared_items:
            continue
        name = report_name(i)
        extras = spec.extra_parents(name)
        source = spec.source(i)
        cpt = cpts[name] if extras else (source.q, source.p)
        nodes.append(Node(name, (proposition_name(i),) + extras, cpt))

    return nodes


def _conjunction(name: str, size: int) -> Node:
    everything = (1 << size) - 1
    return Node(name, tuple(proposition_name(i) for i in range(1, size + 1)),
                tuple(1.0 if mask == everything else 0.0
                      for mask in range(1 << size)))


def _report_items(name: str) -> List[int]:
    match = _REPORT.fullmatch(name)
    assert match is not None
    return [int(i) for i in match.group(1).split('+')]


def _warn_relaxed(spec: FigureSpec) -> None:
    if spec.has_relaxations:
        warn('the spec relaxes the idealized model; closed-form measures are '
             'unavailable and only the network read-offs apply',
             ClosedFormUnavailableWarning)


def _check_source(source: ReliabilityParams,
                  relaxed: bool) -> ReliabilityParams:
    p, q = source
    if not relaxed:
        return ReliabilityParams.create(p, q)
    if not 0 <= p <= 1 or not 0 <= q <= 1:
        raise ReliabilityError("p and q must be in [0, 1], got p={}, q={}"
                               .format(p, q))
    return ReliabilityParams(float(p), float(q))


def _check_structure(spec: FigureSpec) -> None:
    n = spec.n
    seen = set()  # type: Set[int]
    for shared in spec.shared_sources:
        if len(shared.items) < 2 \
                or len(set(shared.items)) != len(shared.items):
            raise FigureSpecError("a shared source needs two or more "
                                  "distinct items, got {}"
                                  .format(list(shared.items)))
        for i in shared.items:
            if not 1 <= i <= n:
                raise FigureSpecError("no item {} among {} propositions"
                                      .format(i, n))
            if i in seen:
                raise FigureSpecError("item {} has two sources".format(i))
            seen.add(i)

    reports = spec.report_nodes()
    propositions = [proposition_name(i) for i in range(1, n + 1)]
    for edge in spec.extra_edges:
        if edge.child not in reports:
            raise FigureSpecError("dependence edges must end in a report "
                                  "node, not {}".format(edge.child))
        if edge.parent not in reports and edge.parent not in propositions:
            raise FigureSpecError("dependence edges must start at a "
                                  "proposition or report node, not {}"
                                  .format(edge.parent))
        own = [proposition_name(i) for i in _report_items(edge.child)]
        if edge.parent == edge.child or edge.parent in own:
            raise FigureSpecError("{} -> {} is not an extra dependence"
                                  .format(edge.parent, edge.child))

    with_extras = {e.child for e in spec.extra_edges}
    shared_names = {s.name for s in spec.shared_sources}
    for name, _ in spec.report_cpts:
        if name not in with_extras or name in shared_names:
            raise FigureSpecError("report_cpts only covers report nodes with "
                                  "extra parents, not {}".format(name))
    missing = with_extras - shared_names - {name for name, _ in
                                            spec.report_cpts}
    if missing:
        raise FigureSpecError("report nodes with extra parents need a CPT: "
                              "{}".format(', '.join(sorted(missing))))


def _parse_sources(value: Any) -> List[ReliabilityParams]:
    if not isinstance(value, list) or not value:
        raise DocumentError("'sources' must be a non-empty list")

    sources = []
    for entry in value:
        if not isinstance(entry, dict) \
                or not all(is_number(entry.get(k)) for k in ('p', 'q')):
            raise DocumentError("a source needs numeric 'p' and 'q', got {!r}"
                                .format(entry))
        sources.append(ReliabilityParams(float(entry['p']),
                                         float(entry['q'])))
    return sources


def _parse_edge(entry: Any) -> DependenceEdge:
    if not isinstance(entry, dict) \
            or not isinstance(entry.get('from'), str) \
            or not isinstance(entry.get('to'), str):
        raise DocumentError("an extra edge needs 'from' and 'to' node names, "
                            "got {!r}".format(entry))
    return DependenceEdge(entry['from'], entry['to'])


def _list(document: Mapping[str, Any], key: str) -> List[Any]:
    value = document.get(key, [])
    if not isinstance(value, list):
        raise DocumentError("'{}' must be a list".format(key))
    return value
