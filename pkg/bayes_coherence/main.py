"""Main entry point for the coherence and belief expansion calculator."""

from argparse import ArgumentParser, ArgumentTypeError, Namespace
from datetime import datetime, timezone
import json
from os import environ
from pathlib import Path
from shlex import quote as shell_quote
import sys
from typing import List, Optional, Sequence, Tuple
from warnings import catch_warnings, showwarning, simplefilter, warn

from bayes_coherence.bayesnet import d_separated, load_evidence, \
    load_network, network_document, posterior
from bayes_coherence.coherence import DEFAULT_PROBE_RESOLUTION, \
    MIN_PROBE_RESOLUTION, ProbeEvidenceWarning, SizeMismatchError, \
    compare, coherence_measure, max_coherence_posterior, \
    posterior_confidence
from bayes_coherence.distribution import ReliabilityParams, \
    load_distribution, marginalize, weight_vector
from bayes_coherence.expansion import DEFAULT_THRESHOLD, ExpansionMode, \
    acceptance, decide_expansion, expansion_coherence_probe
from bayes_coherence.figures import build_figure_one, build_figure_two, \
    load_figure_spec, read_off_acceptance, read_off_coherence
from bayes_coherence.report import FORMATS, InputDigest, RunReport, Value
from bayes_coherence.utils import AdvisoryWarning, ModelError, file_digest


FORMAT_VARIABLE = 'BAYES_COHERENCE_FORMAT'

Items = List[Tuple[str, Value]]


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Runs one subcommand and prints its report. Returns 0 on success, 1 if
    the command failed (argparse exits with 2 on usage errors).
    """
    arguments = list(sys.argv[1:] if argv is None else argv)
    args = _get_args(arguments)
    command = ' '.join(shell_quote(a) for a in arguments)

    try:
        with catch_warnings(record=True) as caught:
            simplefilter('always', AdvisoryWarning)
            report = args.handler(args, command)
    except (ModelError, OSError) as e:
        print("error: {}".format(e), file=sys.stderr)
        return 1

    advisories = []
    for w in caught:
        if issubclass(w.category, AdvisoryWarning):
            advisories.append(str(w.message))
        else:
            showwarning(w.message, w.category, w.filename, w.lineno)

    generated = datetime.now(timezone.utc).isoformat(timespec='seconds') \
        if args.verbose else None

    print(report.with_warnings(advisories).render(args.format, generated),
          end='')
    return 0


def run() -> None:
    """Console script entry point."""
    sys.exit(main())


def cmd_coherence(args: Namespace, command: str) -> RunReport:
    """P*, P^max* and c_x of the information set in a distribution file."""
    d = load_distribution(args.distribution)
    w = weight_vector(d)

    measures = [('n', d.n), ('a', _coefficients(w.a)),
                ('a0', w.a0)]  # type: Items
    if args.x is not None:
        x = args.x
    else:
        params = ReliabilityParams.create(args.p, args.q)
        x = params.x
        measures.extend([('p', params.p), ('q', params.q)])

    measures.extend([('x', x), ('r', 1 - x),
                     ('posterior', posterior_confidence(w, x)),
                     ('max_posterior', max_coherence_posterior(w.a0, w.n, x)),
                     ('coherence', coherence_measure(w, x).c)])

    return RunReport.create(command, [_digest(args.distribution)], measures)


def cmd_order(args: Namespace, command: str) -> RunReport:
    """Orders the information sets of two distribution files by coherence."""
    w_first = weight_vector(load_distribution(args.first))
    w_second = weight_vector(load_distribution(args.second))
    verdict = compare(w_first, w_second, args.probe_resolution)

    return RunReport.create(
        command, [_digest(args.first), _digest(args.second)],
        [('a_first', _coefficients(w_first.a)),
         ('a_second', _coefficients(w_second.a))],
        [('ordering', str(verdict.relation)),
         ('criterion', str(verdict.criterion))])


def cmd_expand(args: Namespace, command: str) -> RunReport:
    """
    Decides whether the last variable of a joint distribution should join
    the belief set made of the others.
    """
    d = load_distribution(args.joint)
    if d.n < 2:
        raise SizeMismatchError("expansion needs a joint over at least two "
                                "variables, got {}".format(d.n))

    w_old = weight_vector(marginalize(d, d.n - 1))
    w_new = weight_vector(d)
    mode = ExpansionMode.fixed(args.x) if args.mode == 'fixed' \
        else ExpansionMode.averaged()

    verdict = decide_expansion(w_old, w_new, mode, args.threshold)
    verdicts = [('expansion', 'accept' if verdict.accept else 'reject'),
                ('threshold_met', verdict.threshold_met)]  # type: Items

    if args.coherence_probe:
        trend = expansion_coherence_probe(w_old, w_new,
                                          args.probe_resolution)
        verdicts.append(('coherence_old_vs_new', str(trend.relation)))
        warn("coherence_old_vs_new is grid-probe evidence only; no "
             "criterion orders sets of different size", ProbeEvidenceWarning)

    return RunReport.create(
        command, [_digest(args.joint)],
        [('n', w_old.n), ('a_old', _coefficients(w_old.a)),
         ('a_new', _coefficients(w_new.a)),
         ('mode', str(mode)), ('threshold', args.threshold),
         ('e_old', verdict.value_old), ('e_new', verdict.value_new)],
        verdicts)


def cmd_bn(args: Namespace, command: str) -> RunReport:
    """Posterior and d-separation queries against a network file."""
    net = load_network(args.network)
    evidence = load_evidence(args.evidence) if args.evidence else {}

    inputs = [_digest(args.network)]
    if args.evidence:
        inputs.append(_digest(args.evidence))

    measures = []  # type: Items
    if args.query is not None:
        measures = [('query', args.query),
                    ('evidence', ','.join("{}={}".format(k, str(v).lower())
                                          for k, v in evidence.items())),
                    ('posterior', posterior(net, args.query, evidence))]

    verdicts = []  # type: Items
    for xs, ys, zs in args.d_sep or []:
        label = "{} _|_ {} | {}".format(','.join(xs), ','.join(ys),
                                        ','.join(zs) or '-')
        separated = d_separated(net, xs, ys, zs)
        verdicts.append((label, 'separated' if separated else 'connected'))

    return RunReport.create(command, inputs, measures, verdicts)


def cmd_figure(args: Namespace, command: str) -> RunReport:
    """Builds a coherence or expansion network and reads its values off."""
    defaults = [] if args.x is None and args.p is None \
        else [_reliability(args)]
    spec = load_figure_spec(args.spec, defaults)
    closed_form = not spec.has_relaxations
    w = weight_vector(spec.distribution)

    measures = [('n', spec.n), ('kind', args.kind)]  # type: Items
    verdicts = []  # type: Items

    if args.kind == 'coherence':
        net = build_figure_one(spec)
        reading = read_off_coherence(net)
        measures.extend([('nodes', len(net.nodes)),
                         ('posterior', reading.posterior),
                         ('max_posterior', reading.max_posterior),
                         ('coherence', reading.coherence)])
        if closed_form:
            measures.append(('closed_form_coherence',
                             coherence_measure(w, spec.likelihood_ratio()).c))
    else:
        net = build_figure_two(spec)
        reading_two = read_off_acceptance(net)
        measures.extend([('nodes', len(net.nodes)),
                         ('e_old', reading_two.value_old),
                         ('e_new', reading_two.value_new)])
        if closed_form:
            x = spec.likelihood_ratio()
            w_old = weight_vector(marginalize(spec.distribution, spec.n - 1))
            measures.extend([('closed_form_e_old', acceptance(w_old, x)),
                             ('closed_form_e_new', acceptance(w, x))])
        accept = reading_two.value_new >= reading_two.value_old
        verdicts = [('expansion', 'accept' if accept else 'reject'),
                    ('threshold_met', reading_two.value_old >= args.threshold)]

    if args.emit_network is not None:
        with Path(args.emit_network).open('w') as f:
            json.dump(network_document(net), f, indent=2)
            f.write('\n')

    return RunReport.create(command, [_digest(args.spec)], measures, verdicts)


def _coefficients(a: Sequence[float]) -> Tuple[float, ...]:
    return tuple(float(v) for v in a)


def _digest(path: str) -> InputDigest:
    return InputDigest(path, file_digest(path))


def _reliability(args: Namespace) -> ReliabilityParams:
    if args.x is not None:
        return ReliabilityParams.from_ratio(args.x)
    return ReliabilityParams.create(args.p, args.q)


def _get_args(argv: Sequence[str]) -> Namespace:
    common = ArgumentParser(add_help=False)
    common.add_argument('--format', type=_parse_format,
                        default=environ.get(FORMAT_VARIABLE, 'text'),
                        help="report format, one of {} (default: ${} or "
                             "text)".format(', '.join(FORMATS),
                                            FORMAT_VARIABLE))
    common.add_argument('-v', '--verbose', action='store_true',
                        help='add a generation timestamp to the report')

    parser = ArgumentParser(prog='bayes-coherence',
                            description='probabilistic coherence and '
                                        'belief expansion calculator')
    subparsers = parser.add_subparsers(dest='subcommand', metavar='COMMAND')
    subparsers.required = True

    coherence = subparsers.add_parser(
        'coherence', parents=[common],
        help='coherence of the information set in a distribution file')
    coherence.add_argument('distribution', help='distribution or grid file')
    _add_reliability(coherence)
    coherence.set_defaults(handler=cmd_coherence)

    order = subparsers.add_parser(
        'order', parents=[common],
        help='order two information sets of equal size by coherence')
    order.add_argument('first', help='distribution file of the first set')
    order.add_argument('second', help='distribution file of the second set')
    _add_resolution(order)
    order.set_defaults(handler=cmd_order)

    expand = subparsers.add_parser(
        'expand', parents=[common],
        help='should the last variable of a joint join the belief set?')
    expand.add_argument('joint', help='distribution file over n+1 variables')
    expand.add_argument('--mode', choices=('fixed', 'averaged'),
                        default='fixed',
                        help='acceptance at a known x, or averaged over x '
                             '(default: fixed)')
    expand.add_argument('--x', type=_likelihood_ratio,
                        help='likelihood ratio q/p in (0, 1]')
    expand.add_argument('--threshold', type=_probability,
                        default=DEFAULT_THRESHOLD,
                        help="belief threshold (default: {})"
                             .format(DEFAULT_THRESHOLD))
    expand.add_argument('--coherence-probe', action='store_true',
                        help='also probe whether coherence rises or falls')
    _add_resolution(expand)
    expand.set_defaults(handler=cmd_expand)

    bn = subparsers.add_parser(
        'bn', parents=[common],
        help='posterior and d-separation queries on a network file')
    bn.add_argument('network', help='network file')
    bn.add_argument('--evidence', help='evidence file')
    bn.add_argument('--query', help='node whose posterior to print')
    bn.add_argument('--d-sep', dest='d_sep', nargs=3, type=_node_set,
                    action='append', metavar=('X', 'Y', 'Z'),
                    help='test X _|_ Y | Z; comma-separated node names, '
                         '- for none')
    bn.set_defaults(handler=cmd_bn)

    figure = subparsers.add_parser(
        'figure', parents=[common],
        help='build a coherence or expansion network from a figure spec')
    figure.add_argument('spec', help='figure spec file')
    figure.add_argument('--kind', choices=('coherence', 'expansion'),
                        default='coherence',
                        help='network to build (default: coherence)')
    _add_reliability(figure)
    figure.add_argument('--threshold', type=_probability,
                        default=DEFAULT_THRESHOLD,
                        help="belief threshold (default: {})"
                             .format(DEFAULT_THRESHOLD))
    figure.add_argument('--emit-network', metavar='PATH',
                        help='also write the network as a network file')
    figure.set_defaults(handler=cmd_figure)

    args = parser.parse_args(argv)
    _check_args(parser, args)

    return args


def _add_reliability(parser: ArgumentParser) -> None:
    parser.add_argument('--x', type=_likelihood_ratio,
                        help='likelihood ratio q/p in (0, 1]')
    parser.add_argument('--p', type=float, help='P(report | true)')
    parser.add_argument('--q', type=float, help='P(report | false)')


def _add_resolution(parser: ArgumentParser) -> None:
    parser.add_argument('--probe-resolution', type=_resolution,
                        default=DEFAULT_PROBE_RESOLUTION,
                        help="grid points of the numeric probe (default: {})"
                             .format(DEFAULT_PROBE_RESOLUTION))


def _check_args(parser: ArgumentParser, args: Namespace) -> None:
    if args.subcommand in ('coherence', 'figure'):
        given = [args.x is not None, args.p is not None, args.q is not None]
        if given[1] != given[2]:
            parser.error('--p and --q must be given together')
        if given[0] and given[1]:
            parser.error('give either --x or --p and --q, not both')
        if args.subcommand == 'coherence' and not any(given):
            parser.error('give either --x or --p and --q')

    if args.subcommand == 'expand':
        if args.mode == 'fixed' and args.x is None:
            parser.error('--mode fixed needs --x')
        if args.mode == 'averaged' and args.x is not None:
            parser.error('--mode averaged takes no --x')

    if args.subcommand == 'bn' and args.query is None and not args.d_sep:
        parser.error('give --query, --d-sep or both')


def _parse_format(name: str) -> str:
    if name not in FORMATS:
        choices = ', '.join(map(repr, FORMATS))
        raise ArgumentTypeError("invalid choice: {} (choose from {})"
                                .format(repr(name), choices))
    return name


def _likelihood_ratio(text: str) -> float:
    x = _real(text)
    if not 0 < x <= 1:
        raise ArgumentTypeError("likelihood ratio must be in (0, 1], got {}"
                                .format(text))
    return x


def _probability(text: str) -> float:
    p = _real(text)
    if not 0 <= p <= 1:
        raise ArgumentTypeError("probability must be in [0, 1], got {}"
                                .format(text))
    return p


def _resolution(text: str) -> int:
    try:
        resolution = int(text)
    except ValueError:
        raise ArgumentTypeError("invalid resolution: {}"
                                .format(repr(text))) from None
    if resolution < MIN_PROBE_RESOLUTION:
        raise ArgumentTypeError("resolution must be at least {}, got {}"
                                .format(MIN_PROBE_RESOLUTION, resolution))
    return resolution


def _node_set(text: str) -> List[str]:
    if text in ('', '-'):
        return []
    return [name.strip() for name in text.split(',') if name.strip()]


def _real(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ArgumentTypeError("invalid number: {}"
                                .format(repr(text))) from None


if __name__ == '__main__':
    run()
