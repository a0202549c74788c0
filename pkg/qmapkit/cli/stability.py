from argparse import ArgumentParser

from loguru import logger

from qmapkit import emitters
from qmapkit.git_model import maximal_unstable_supports, verify_assumptions
from qmapkit.schemas import load_target

from . import BaseQmapkitCommand


def stability_command_factory(args):
    return StabilityCommand(
        args.target,
        args.supports,
        args.verify,
        args.json,
    )


class StabilityCommand(BaseQmapkitCommand):
    @staticmethod
    def register_subcommand(parser: ArgumentParser):
        stability_parser = parser.add_parser(
            "stability",
            description="Unstable supports of a target and its standing assumptions",
        )
        stability_parser.add_argument(
            "target",
            type=str,
            help="Path to the target JSON file",
        )
        stability_parser.add_argument(
            "--supports",
            action="store_true",
            help="Print the maximal unstable supports",
        )
        stability_parser.add_argument(
            "--verify",
            action="store_true",
            help="Check ss = s, nonemptiness and freeness; exit code 1 if one fails",
        )
        stability_parser.add_argument(
            "--json",
            action="store_true",
            help="Emit JSON instead of text",
        )
        stability_parser.set_defaults(func=stability_command_factory)

    def __init__(self, target, supports, verify, json):
        self.target = target
        # with neither flag both reports are printed
        self.supports = supports or not verify
        self.verify = verify or not supports
        self.json = json

    def run(self) -> int:
        t = load_target(self.target)
        logger.info(f"Loaded {t}")
        supports = maximal_unstable_supports(t) if self.supports else None
        report = verify_assumptions(t) if self.verify else None
        if self.json:
            print(emitters.stability_model(t, supports, report).model_dump_json(indent=2))
        else:
            print(emitters.stability_text(t, supports, report))
        if report is not None and not report.all_hold:
            logger.error(f"{t.name} does not satisfy the standing assumptions")
            return 1
        return 0
