from argparse import ArgumentParser

from loguru import logger

from qmapkit import emitters
from qmapkit.errors import MalformedDatum
from qmapkit.fixed_locus import dim_fixed_component, enumerate_effective, weyl_orbit_partition
from qmapkit.schemas import load_target

from . import BaseQmapkitCommand


def parse_degree(text: str):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as e:
        raise MalformedDatum(f"Cannot read the degree {text!r}, expected integers separated by commas") from e


def fixed_loci_command_factory(args):
    return FixedLociCommand(
        args.target,
        args.degree,
        args.bound,
        args.json,
    )


class FixedLociCommand(BaseQmapkitCommand):
    @staticmethod
    def register_subcommand(parser: ArgumentParser):
        fixed_loci_parser = parser.add_parser(
            "fixed-loci",
            description="Effective lifts of a degree, their fixed components and Weyl orbits",
        )
        fixed_loci_parser.add_argument(
            "target",
            type=str,
            help="Path to the target JSON file",
        )
        fixed_loci_parser.add_argument(
            "--degree",
            type=str,
            required=True,
            help="Degree beta, comma separated when the group has several characters, e.g. 2 or 1,0",
        )
        fixed_loci_parser.add_argument(
            "--bound",
            type=int,
            required=False,
            help="Box bound for the lifts of custom targets",
        )
        fixed_loci_parser.add_argument(
            "--json",
            action="store_true",
            help="Emit JSON instead of text",
        )
        fixed_loci_parser.set_defaults(func=fixed_loci_command_factory)

    def __init__(self, target, degree, bound, json):
        self.target = target
        self.degree = degree
        self.bound = bound
        self.json = json

    def run(self) -> int:
        t = load_target(self.target)
        beta = parse_degree(self.degree)
        logger.info(f"Loaded {t}")
        lifts = enumerate_effective(t, beta, self.bound)
        components = [dim_fixed_component(t, b) for b in lifts]
        orbits = weyl_orbit_partition(t, lifts)
        if self.json:
            print(emitters.fixed_loci_model(t, beta, components, orbits).model_dump_json(indent=2))
        else:
            print(emitters.fixed_loci_text(t, beta, components, orbits))
        return 0
