"""Command-line front end.

Exit codes: 0 all applicable checks pass, 1 some check failed (or was
inconclusive), 2 usage or configuration error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import sys

from .quotient import DEFAULT_DEGREE_CAP, DegreeCapExceeded
from .report import SUITES, RunConfig, build_report, render_text, to_json
from .tree import DepthLimitExceeded
from .vectors import NotApplicable

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

COMMANDS = ('classify', 'verify', 'constant-case', 'battery')


def parse_entries(text: str, p: int, n: int) -> tuple[int, ...]:
    """Comma-separated least non-negative residues mod p^n, exactly p^n - 1 of them."""
    m = p ** n
    try:
        entries = tuple(int(x) for x in text.split(',') if x.strip() != '')
    except ValueError:
        raise ValueError(f'--e must be comma-separated integers, got {text!r}') from None
    if len(entries) != m - 1:
        raise ValueError(f'--e needs {m - 1} entries for p^n = {m}, got {len(entries)}')
    bad = [x for x in entries if not 0 <= x < m]
    if bad:
        raise ValueError(f'entries must be least residues in [0, {m}), got {bad}')
    return entries


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog='ggsbranch',
                                 description='Classify GGS defining vectors and verify branch structures '
                                             'in finite congruence quotients.')
    ap.add_argument('command', choices=COMMANDS)
    ap.add_argument('--p', type=int, required=True, help='prime p')
    ap.add_argument('--n', type=int, required=True, help='exponent n (alphabet size p^n)')
    ap.add_argument('--e', default=None,
                    help='defining vector, comma-separated residues mod p^n '
                         '(constant-case defaults to all ones)')
    ap.add_argument('--depth', type=int, default=3, help='depth of the congruence quotient (default 3)')
    ap.add_argument('--cap', type=int, default=DEFAULT_DEGREE_CAP,
                    help=f'maximum number of leaves (default {DEFAULT_DEGREE_CAP})')
    ap.add_argument('--format', choices=('text', 'json'), default='text')
    ap.add_argument('--seed', type=int, default=0, help='seed for sampled checks')
    ap.add_argument('--cmd', choices=SUITES, default='all',
                    help='sub-suite for the verify command (default all)')
    return ap


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.e is None:
            if args.command != 'constant-case':
                raise ValueError('--e is required')
            entries = (1,) * (args.p ** args.n - 1)
        else:
            entries = parse_entries(args.e, args.p, args.n)
        cfg = RunConfig(args.command, args.p, args.n, entries, args.depth, args.cap,
                        args.format, args.seed, args.cmd)
        cfg.vector  # validates p, n and non-zeroness
    except (ValueError, TypeError) as exc:
        print(f'error: {exc}', file=err)
        return EXIT_USAGE
    try:
        report = build_report(cfg)
    except (DegreeCapExceeded, DepthLimitExceeded) as exc:
        print(f'resource cap exceeded: {exc}', file=err)
        return EXIT_CAP
    except NotApplicable as exc:
        print(f'error: {exc}', file=err)
        return EXIT_USAGE
    print(to_json(report) if cfg.format == 'json' else render_text(report), file=out)
    return report['summary']['exit_code']


def main() -> None:
    sys.exit(run())


if __name__ == '__main__':
    main()
