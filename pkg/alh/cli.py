"""Command-line front end.

	python -m alh mass  spec.json [--out DIR]
	python -m alh check spec.json [--out DIR]
	python -m alh boost spec.json --dir I --beta B [--out DIR]
	python -m alh catalog
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from alh import __version__
from alh.core.config import settings
from alh.core.errors import AlhError, SpecFileError
from alh.services import commands, reports
from alh.services.specfile import load_problem

logger = logging.getLogger("alh")


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(prog="alh", description="Mass and energy-momentum of asymptotically locally hyperbolic metrics.")
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	parser.add_argument("--log-level", default=None, help="overrides ALH_LOG_LEVEL")
	sub = parser.add_subparsers(dest="command", required=True)

	p = sub.add_parser("mass", help="mass or energy-momentum of the end described by a spec file")
	p.add_argument("spec")
	p.add_argument("--out", default=None, help="directory for report.json and convergence.csv")

	p = sub.add_parser("check", help="hypothesis margins for a spec file")
	p.add_argument("spec")
	p.add_argument("--out", default=None)

	p = sub.add_parser("boost", help="energy-momentum before and after a boost")
	p.add_argument("spec")
	p.add_argument("--dir", dest="direction", type=int, required=True, help="boost axis 1..n")
	p.add_argument("--beta", type=float, required=True, help="rapidity")
	p.add_argument("--out", default=None)

	sub.add_parser("catalog", help="list the catalog of reference metrics")
	return parser


def _emit(outcome: commands.Outcome, out: Optional[str], table_name: str = "convergence.csv") -> None:
	text = reports.report_json(outcome.report)
	if out is None:
		sys.stdout.write(text + "\n")
		return
	reports.write_report(os.path.join(out, "report.json"), outcome.report)
	if outcome.table is not None and not outcome.table.empty:
		reports.write_table(os.path.join(out, table_name), outcome.table)


def _summary(outcome: commands.Outcome) -> str:
	report = outcome.report
	for key in ("status", "verdict"):
		if hasattr(report, key):
			return f"{key}: {getattr(report, key)} (exit {outcome.exit_code})"
	return f"exit {outcome.exit_code}"


def main(argv: Optional[List[str]] = None) -> int:
	args = build_parser().parse_args(argv)
	logging.basicConfig(
		level=(args.log_level or settings.log_level).upper(),
		stream=sys.stderr,
		format="%(asctime)s %(levelname)s %(name)s: %(message)s",
	)
	if args.command == "catalog":
		sys.stdout.write(reports.report_json(commands.catalog_listing()) + "\n")
		return commands.EXIT_OK

	try:
		problem = load_problem(args.spec)
		if args.command == "mass":
			outcome = commands.run_mass(problem)
		elif args.command == "check":
			outcome = commands.run_check(problem)
		else:
			outcome = commands.run_boost(problem, args.direction, args.beta)
	except SpecFileError as exc:
		logger.error("input error: %s", exc)
		return commands.EXIT_INPUT
	except AlhError as exc:
		logger.error("input error in %s: %s", args.spec, exc)
		return commands.EXIT_INPUT

	_emit(outcome, args.out, "divergence.csv" if outcome.exit_code == commands.EXIT_DIVERGENCE else "convergence.csv")
	logger.info("%s: %s", args.command, _summary(outcome))
	return outcome.exit_code


if __name__ == "__main__":
	sys.exit(main())
