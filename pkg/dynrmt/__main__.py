import argparse
import math
import sys

import dynrmt

from .config import load_config
from .exceptions import ConfigError, DomainError, NumericalFailure, SampleSizeError, WindowError
from .lab import (
    ETA_EXPONENTS, FLOW_TIMES, cmd_deloc, cmd_density, cmd_export, cmd_flow, cmd_locallaw, cmd_universality,
)
from .stats import MIN_GAPS


def _time(text):
    if text.strip().lower() in ('inf', 'infinity'):
        return math.inf
    return float(text)


def _add_common(parser):
    parser.add_argument(
        '-c', '--config',
        help='JSON document describing the run.',
    )
    parser.add_argument('--N', '--n', dest='N', type=int, help='Block size; H is 2N x 2N.')
    parser.add_argument('--W', dest='W', type=int, help='Resampling window and correlation band.')
    parser.add_argument('--seed', type=int, help='Run seed (DYNRMT_SEED overrides it).')
    parser.add_argument('--trials', type=int, help='Number of Monte-Carlo trials.')
    parser.add_argument('--jobs', type=int, help='Worker processes (default: all cores).')
    parser.add_argument('--eta', type=float, help='Imaginary part used to read off densities.')
    parser.add_argument('--grid', type=int, help='Number of points on the energy grid.')
    parser.add_argument(
        '--window',
        type=float,
        nargs=2,
        metavar=('E_LO', 'E_HI'),
        help='Energy window for bulk statistics.',
    )
    parser.add_argument(
        '--resampled',
        action='store_true',
        default=None,
        help='Use the resampled ensemble H_Y.',
    )
    parser.add_argument(
        '-o', '--out', '--output',
        dest='output',
        help='The directory where results should be written.',
        default='.',
    )
    parser.add_argument(
        '-v', '--verbosity',
        action='count',
        default=0,
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog='dynrmt',
        description='Random matrices from doubling-map orbits: limiting laws and local statistics.'
    )
    parser.add_argument(
        '--version',
        action='version',
        version='dynrmt %s' % dynrmt.__version__,
    )
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    density = commands.add_parser('density', help='Limiting density against the eigenvalue histogram.')
    _add_common(density)

    locallaw = commands.add_parser('locallaw', help='Stieltjes transform error against eta = N^-a.')
    _add_common(locallaw)
    locallaw.add_argument(
        '--eta-exponents',
        type=float,
        nargs='+',
        default=list(ETA_EXPONENTS),
        metavar='A',
    )

    universality = commands.add_parser('universality', help='Gap ratios and spacing distributions.')
    _add_common(universality)
    universality.add_argument('--control', choices=['poisson'])
    universality.add_argument('--min-gaps', type=int, default=MIN_GAPS)

    flow = commands.add_parser('flow', help='Statistics along the Ornstein-Uhlenbeck flow.')
    _add_common(flow)
    flow.add_argument('--t-list', type=_time, nargs='+', default=list(FLOW_TIMES), metavar='T')
    flow.add_argument('--min-gaps', type=int, default=MIN_GAPS)

    deloc = commands.add_parser('deloc', help='Eigenvector sup-norms.')
    _add_common(deloc)
    deloc.add_argument('--control', choices=['localized'])

    export = commands.add_parser('export', help='Write one ensemble member to a binary file.')
    _add_common(export)
    export.add_argument('--trial', type=int, default=0)

    return parser


def run(args):
    config = load_config(args.config, {
        'N': args.N,
        'W': args.W,
        'seed': args.seed,
        'trials': args.trials,
        'jobs': args.jobs,
        'eta': args.eta,
        'grid': args.grid,
        'window': args.window,
        'resampled': args.resampled,
    })
    common = {'outdir': args.output, 'verbosity': args.verbosity}

    if args.command == 'density':
        cmd_density(config, **common)
    elif args.command == 'locallaw':
        cmd_locallaw(config, exponents=args.eta_exponents, **common)
    elif args.command == 'universality':
        cmd_universality(config, control=args.control, min_gaps=args.min_gaps, **common)
    elif args.command == 'flow':
        cmd_flow(config, times=args.t_list, min_gaps=args.min_gaps, **common)
    elif args.command == 'deloc':
        cmd_deloc(config, control=args.control, **common)
    elif args.command == 'export':
        cmd_export(config, trial=args.trial, **common)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run(args)
    except (ConfigError, WindowError, SampleSizeError, DomainError) as e:
        print('dynrmt: error: %s' % e, file=sys.stderr)
        return 2
    except NumericalFailure as e:
        print('dynrmt: error: %s' % e, file=sys.stderr)
        return 3
    return 0


if __name__ == '__main__':
    sys.exit(main())
