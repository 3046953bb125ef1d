"""Main entry point for the robsel command-line tool."""

import argparse
import logging
import sys
from typing import List, Optional

from robsel import __version__
from robsel.config import load_config
from robsel.errors import ConfigError
from robsel.main_app import cmd_run, cmd_sweep, cmd_trace
from robsel.verify import TIERS, cmd_verify

COMMANDS = {'run': cmd_run, 'sweep': cmd_sweep, 'trace': cmd_trace}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='robsel', description="Robust subset selection experiments.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument('--config', required=True, help="key = value experiment file")
        cmd.add_argument('--seed', type=int, default=None, help="overrides the config seed")
        cmd.add_argument('--out', default=None, help="overrides output_dir")
    verify = sub.add_parser('verify')
    verify.add_argument('--tier', choices=sorted(TIERS), default='tiny')
    verify.add_argument('--config', default=None, help="unused; accepted for a uniform command line")
    verify.add_argument('--seed', type=int, default=0)
    verify.add_argument('--out', default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if args.command == 'verify':
        return cmd_verify(args.tier, args.seed)
    try:
        config = load_config(args.config).with_overrides(seed=args.seed, output_dir=args.out)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return 2
    return COMMANDS[args.command](config)


if __name__ == "__main__":
    sys.exit(main())
