from argparse import ArgumentParser

from loguru import logger

from qmapkit import emitters
from qmapkit.quasimap_check import basepoint_divisor, epsilon_stability_range, is_constant_map, quasimap_degree
from qmapkit.schemas import load_quasimap

from . import BaseQmapkitCommand


def quasimap_command_factory(args):
    return QuasimapCommand(
        args.quasimap,
        args.json,
    )


class QuasimapCommand(BaseQmapkitCommand):
    @staticmethod
    def register_subcommand(parser: ArgumentParser):
        quasimap_parser = parser.add_parser(
            "quasimap",
            description="Degree, basepoints and epsilon-stability of an explicit quasimap from P^1",
        )
        quasimap_parser.add_argument(
            "quasimap",
            type=str,
            help="Path to the quasimap JSON file",
        )
        quasimap_parser.add_argument(
            "--json",
            action="store_true",
            help="Emit JSON instead of text",
        )
        quasimap_parser.set_defaults(func=quasimap_command_factory)

    def __init__(self, quasimap, json):
        self.quasimap = quasimap
        self.json = json

    def run(self) -> int:
        q = load_quasimap(self.quasimap)
        logger.info(f"Loaded {q}")
        divisor = basepoint_divisor(q)
        args = (quasimap_degree(q), divisor, is_constant_map(q), epsilon_stability_range(q))
        if self.json:
            print(emitters.quasimap_model(*args).model_dump_json(indent=2))
        else:
            print(emitters.quasimap_text(*args))
        return 0
