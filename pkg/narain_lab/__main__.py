"""Entry point for narain-lab."""

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .codec import (
    decode_complex,
    decode_vector,
    dump_json,
    expansion_to_csv,
    load_element,
    load_family,
    load_psi,
    read_json,
    triplet_from_args,
)
from .config import CONVENTIONS, LATTICES, RunConfig
from .errors import BudgetError, DomainError, InputError
from .lattice_core import LABELS, build_lattice, classify, enumerate_by_norm
from .narain_momenta import derived_moduli, momenta_gram, verify_gram, verify_period_line
from .parabolic_group import alpha, factorize, inverse, multiply
from .stable_family import construct_family_a, construct_family_b, verify_special_family
from .sweeps import SUITES, run_suites
from .theta_characters import THETA_LABELS, character, q_expansion, theta_lattice

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TOLERANCES = ("structural_tol", "automorphy_tol", "character_tol", "equality_tol", "family_tol")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="Config file (default: per-user config.json).")
    p.add_argument("--seed", type=int, help="Seed for randomized sweeps.")
    p.add_argument("--samples", type=int, help="Samples per randomized suite.")
    p.add_argument("--tol", type=float, help="Override every verification tolerance.")
    p.add_argument("--lattice", choices=sorted(set(LATTICES) | set(THETA_LABELS)),
                   help="Internal lattice Λ.")
    p.add_argument("--convention", choices=CONVENTIONS, help="Scaling of the section σ_n.")
    p.add_argument("--threads", type=int, help="Worker threads (0 = automatic).")
    p.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    p.add_argument("-q", "--quiet", action="store_true", help="Warnings only.")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="narain-lab",
                                     description="F-theory/heterotic duality checks in eight dimensions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-all", parents=[common], help="Run the verification suites.")
    p.add_argument("--suite", action="append", choices=list(SUITES), help="Run only this suite (repeatable).")

    lat = sub.add_parser("lattice", help="Lattice utilities.").add_subparsers(dest="action", required=True)
    for action in ("classify", "gram", "count"):
        p = lat.add_parser(action, parents=[common])
        p.add_argument("name", choices=LABELS)
        if action == "count":
            p.add_argument("--max-norm", type=int, default=4)

    theta = sub.add_parser("theta", help="Theta functions and characters.").add_subparsers(dest="action", required=True)
    p = theta.add_parser("eval", parents=[common])
    p.add_argument("--tau", required=True, help="τ as RE,IM.")
    p.add_argument("--z", help="JSON file with the vector z as a list of [re, im].")
    p.add_argument("--method", choices=("jacobi", "enumeration"), default="jacobi")
    p = theta.add_parser("qexp", parents=[common])
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--kind", choices=("theta", "character"), default="theta")
    p.add_argument("--exponents", action="store_true", help="Write exponent,coefficient rows.")

    group = sub.add_parser("group", help="Arithmetic in Γ_F⁺.").add_subparsers(dest="action", required=True)
    p = group.add_parser("mul", parents=[common])
    p.add_argument("first")
    p.add_argument("second")
    for action in ("inv", "factor", "alpha"):
        group.add_parser(action, parents=[common]).add_argument("element")

    narain = sub.add_parser("narain", help="Narain lattice of momenta.").add_subparsers(dest="action", required=True)
    p = narain.add_parser("gram", parents=[common])
    p.add_argument("--metric", required=True, help="g11,g12,g22")
    p.add_argument("--b", type=float, default=0.0, dest="b_field")
    p.add_argument("--wilson", help="JSON file with z1, z2.")

    family = sub.add_parser("family", help="Special families on E_τ.").add_subparsers(dest="action", required=True)
    p = family.add_parser("construct", parents=[common])
    p.add_argument("--category", choices=("a", "b"), required=True)
    p.add_argument("--tau", required=True, help="τ as RE,IM.")
    p.add_argument("--psi", required=True, help="JSON file with sixteen ψ values or a vector z.")
    p.add_argument("--branch", default="0,0", help="Preimage k,l for the first division.")
    family.add_parser("verify", parents=[common]).add_argument("family")

    conf = sub.add_parser("config", help="Show or initialize the config file.").add_subparsers(dest="action", required=True)
    conf.add_parser("show", parents=[common])
    conf.add_parser("init", parents=[common])
    return parser


def load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config)
    changes = {"seed": args.seed, "samples": args.samples, "convention": args.convention,
               "threads": args.threads}
    if args.lattice in LATTICES:
        changes["lattice"] = args.lattice
    if args.tol is not None:
        changes.update({name: args.tol for name in TOLERANCES})
    return cfg.override(**changes).validate()


def _tau(text: str) -> complex:
    tau = decode_complex(text, "--tau")
    if not tau.imag > 0:
        raise InputError("Im τ must be positive", "--tau")
    return tau


def _emit(payload) -> None:
    sys.stdout.write(dump_json(payload) + "\n")


def cmd_verify_all(args, cfg: RunConfig) -> int:
    lattices = [args.lattice] if args.lattice in LATTICES else list(LATTICES)
    results = run_suites(cfg, args.suite, lattices)
    passed = all(r.passed for r in results)
    _emit({"config": cfg.to_dict(), "lattices": lattices,
           "suites": [r.to_dict() for r in results], "pass": passed})
    return EXIT_OK if passed else EXIT_FAIL


def cmd_lattice(args, cfg: RunConfig) -> int:
    lattice = build_lattice(args.name)
    if args.action == "classify":
        _emit({"lattice": lattice.name, **classify(lattice).to_dict()})
    elif args.action == "gram":
        _emit({"lattice": lattice.name, "gram": lattice.gram})
    else:
        shells = enumerate_by_norm(lattice, args.max_norm, keep_vectors=False)
        _emit({"lattice": lattice.name, "counts": {str(n): s.count for n, s in sorted(shells.items())}})
    return EXIT_OK


def cmd_theta(args, cfg: RunConfig) -> int:
    label = args.lattice or cfg.lattice
    if args.action == "qexp":
        sys.stdout.write(expansion_to_csv(q_expansion(label, args.order, args.kind, cfg.theta_max_norm),
                                          args.exponents))
        return EXIT_OK
    tau = _tau(args.tau)
    rank = build_lattice(label).rank
    z = np.zeros(rank, dtype=complex)
    if args.z:
        z = decode_vector(read_json(args.z), rank, args.z, complex)
    theta = theta_lattice(label, tau, z, args.method, cfg.theta_max_norm)
    _emit({"lattice": label, "tau": tau, "theta": theta,
           "character": character(label, tau, z, args.method, cfg.theta_max_norm)})
    return EXIT_OK


def cmd_group(args, cfg: RunConfig) -> int:
    if args.action == "mul":
        _emit(multiply(load_element(args.first), load_element(args.second)).to_dict())
        return EXIT_OK
    g = load_element(args.element)
    if args.action == "inv":
        _emit(inverse(g).to_dict())
    elif args.action == "factor":
        t, w, s = factorize(g)
        _emit({"t": t.to_dict(), "w": w.to_dict(), "s": s.to_dict()})
    else:
        _emit(alpha(g).to_dict())
    return EXIT_OK


def cmd_narain(args, cfg: RunConfig) -> int:
    h = triplet_from_args(args.metric, args.b_field, args.wilson, cfg.lattice)
    gram = verify_gram(h, cfg.structural_tol)
    line = verify_period_line(h, cfg.structural_tol)
    mod = derived_moduli(h)
    _emit({"gram": momenta_gram(h), "gram_check": gram.to_dict(), "period_line": line.to_dict(),
           "moduli": {"v": mod.v, "tau": mod.tau, "z": [[c.real, c.imag] for c in mod.z], "u": mod.u}})
    return EXIT_OK if gram.passed and line.passed else EXIT_FAIL


def cmd_family(args, cfg: RunConfig) -> int:
    if args.action == "verify":
        fam = load_family(args.family)
        report = verify_special_family(fam, cfg.family_tol)
        _emit(report.to_dict())
        return EXIT_OK if report.passed else EXIT_FAIL
    tau = _tau(args.tau)
    try:
        branch = tuple(int(x) for x in args.branch.split(","))
    except ValueError as e:
        raise InputError("branch must be k,l", "--branch") from e
    label = "e8e8" if args.category == "a" else "gamma16"
    psi = load_psi(args.psi, tau, label)
    build = construct_family_a if args.category == "a" else construct_family_b
    _emit(build(tau, psi, branch).to_dict())
    return EXIT_OK


def cmd_config(args, cfg: RunConfig) -> int:
    if args.action == "init":
        cfg.save()
        logger.info("Wrote %s", cfg._path)
    _emit(cfg.to_dict())
    return EXIT_OK


COMMANDS = {"verify-all": cmd_verify_all, "lattice": cmd_lattice, "theta": cmd_theta,
            "group": cmd_group, "narain": cmd_narain, "family": cmd_family, "config": cmd_config}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args)
        logger.debug("Config loaded: %s", cfg)
        return COMMANDS[args.command](args, cfg)
    except (InputError, DomainError, BudgetError) as e:
        sys.stderr.write(f"narain-lab: error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
