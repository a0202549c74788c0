from argparse import ArgumentParser

from loguru import logger

from qmapkit import emitters
from qmapkit.ifunction import (
    assemble_series,
    check_weyl_invariance,
    series_reduced_in_cohomology,
    verify_proof_identities,
)
from qmapkit.schemas import load_target

from . import BaseQmapkitCommand


def ifunction_command_factory(args):
    return IFunctionCommand(
        args.target,
        args.max_degree,
        args.bound,
        args.json,
        args.latex,
        args.reduce_pn,
        args.check,
    )


class IFunctionCommand(BaseQmapkitCommand):
    @staticmethod
    def register_subcommand(parser: ArgumentParser):
        ifunction_parser = parser.add_parser(
            "ifunction",
            description="Coefficients of the quasimap I-function up to a total degree",
        )
        ifunction_parser.add_argument(
            "target",
            type=str,
            help="Path to the target JSON file",
        )
        ifunction_parser.add_argument(
            "--max-degree",
            type=int,
            required=True,
            help="Largest total degree of the coefficients",
        )
        ifunction_parser.add_argument(
            "--bound",
            type=int,
            required=False,
            help="Box bound for the lifts of custom targets",
        )
        output = ifunction_parser.add_mutually_exclusive_group()
        output.add_argument(
            "--json",
            action="store_true",
            help="Emit JSON with the per-lift terms, the reduced sums and the conventions used",
        )
        output.add_argument(
            "--latex",
            action="store_true",
            help="Emit the reduced coefficients as LaTeX",
        )
        ifunction_parser.add_argument(
            "--reduce-pn",
            action="store_true",
            help="Expand the coefficients of P^n in z using H^(n+1) = 0",
        )
        ifunction_parser.add_argument(
            "--check",
            action="store_true",
            help="Check the localization identities and Weyl invariance of every coefficient",
        )
        ifunction_parser.set_defaults(func=ifunction_command_factory)

    def __init__(self, target, max_degree, bound, json, latex, reduce_pn, check):
        self.target = target
        self.max_degree = max_degree
        self.bound = bound
        self.json = json
        self.latex = latex
        self.reduce_pn = reduce_pn
        self.check = check

    def run(self) -> int:
        t = load_target(self.target)
        logger.info(f"Loaded {t}")
        if self.reduce_pn and t.preset != "projective":
            logger.error("--reduce-pn only applies to the projective preset")
            return 2
        if self.max_degree < 1:
            logger.error(f"--max-degree must be at least 1, got {self.max_degree}")
            return 2

        series = assemble_series(t, self.max_degree, self.bound)
        checks = None
        if self.check:
            checks = {}
            for beta, c in series.coefficients.items():
                checks[beta] = {
                    "proof_identities": all(verify_proof_identities(t, b) for b, _ in c.terms),
                    "weyl_invariance": check_weyl_invariance(t, c),
                }
        reduced = series_reduced_in_cohomology(series, t.preset_params[0]) if self.reduce_pn else None

        if self.json:
            print(emitters.series_json(series, t, checks, reduced))
        elif self.latex:
            print(emitters.series_latex(series, t))
        else:
            print(emitters.series_text(series, t, checks, reduced))

        if checks is not None:
            failed = [beta for beta, result in checks.items() if not all(result.values())]
            if failed:
                logger.error(f"Checks failed for degrees {[list(b) for b in failed]}")
                return 4
            logger.info(f"All checks passed for {len(checks)} coefficients")
        return 0
