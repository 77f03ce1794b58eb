"""Command-line entry point: ``psic {build,probs,reconstruct,check,ambiguity,tomo}``.

Exit codes: 0 success, 1 I/O or schema error, 2 invalid parameters (including
a non-positive throw-away element), 3 reconstruction failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import serialization as ser
from .analysis import certify_psic, find_ambiguity, frame_rank
from .constructions import (
    THETA_TETRA,
    RankOneConstructionParams,
    TwoDConstructionParams,
    amalgamate_last_pair,
    build_complementary_bases,
    build_psic_2d,
    build_rank_one_3dm2,
    build_tetrahedral,
    build_trine,
)
from .errors import InvalidParameter, NotFound, PsicError, ThrowawayNotPositive
from .objects import Povm, fidelity, probabilities, random_pure_state
from .tomo import efficiency_sweep, make_scheme, sweep_to_csv

FAMILIES = ("psic2d", "rank1-3dm2", "tetrahedral", "trine", "comp-bases", "comp-bases-2dm1", "custom")
INVERTIBLE = ("psic2d", "rank1-3dm2", "tetrahedral")
COMMANDS = ("build", "probs", "reconstruct", "check", "ambiguity", "tomo")


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def parse_theta(text: str | None) -> float | None:
    if text is None:
        return None
    if text == "tetra":
        return THETA_TETRA
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"theta must be 'tetra' or radians, got {text!r}") from exc


def parse_int_list(text: str) -> list[int]:
    return [int(float(tok)) for tok in text.split(",") if tok.strip()]


@dataclass
class ExperimentConfig:
    command: str
    family: str | None = None
    dim: int | None = None
    a: float | None = None
    b: float | None = None
    theta: float | None = None
    seed: int = 0
    shots: list[int] = field(default_factory=list)
    trials: int = 1000
    restarts: int = 50
    seeds: int = 100
    povm_path: Path | None = None
    state_path: Path | None = None
    probs_path: Path | None = None
    truth_path: Path | None = None
    output: Path | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise CliError(f"unknown command {self.command!r}", 2)
        if self.family is not None and self.family not in FAMILIES:
            raise CliError(f"unknown family {self.family!r}", 2)
        needs_family = {"build", "reconstruct", "tomo"}
        if self.command in needs_family and self.family is None:
            raise CliError(f"{self.command} needs --family", 2)
        if self.family == "custom" and self.povm_path is None:
            raise CliError("family 'custom' needs --povm", 2)
        if self.family in ("tetrahedral", "trine"):
            if self.dim not in (None, 2):
                raise CliError(f"{self.family} is a qubit POVM; --dim must be 2", 2)
            self.dim = 2
        if self.family in ("psic2d", "rank1-3dm2", "comp-bases", "comp-bases-2dm1") and self.dim is None:
            raise CliError(f"family {self.family!r} needs --dim", 2)
        if self.command in ("reconstruct", "tomo") and self.family not in INVERTIBLE:
            raise CliError(f"{self.command} needs a family with an inverter: {', '.join(INVERTIBLE)}", 2)
        if self.command == "reconstruct" and self.probs_path is None:
            raise CliError("reconstruct needs --probs", 2)
        if self.command == "probs" and self.povm_path is None and self.family is None:
            raise CliError("probs needs --povm or --family", 2)
        if self.command == "tomo" and not self.shots:
            raise CliError("tomo needs --shots", 2)
        if self.command == "tomo" and min(self.shots) <= 0:
            raise CliError("shot counts must be positive", 2)

    def parameters(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if v is not None and not k.endswith("path") and k != "output"}
        return {k: (str(v) if isinstance(v, Path) else v) for k, v in out.items()}


def build_family(cfg: ExperimentConfig) -> Povm:
    fam = cfg.family
    if fam == "custom":
        return ser.povm_from_json(_read_json(cfg.povm_path))
    if fam == "tetrahedral":
        return build_tetrahedral()
    if fam == "trine":
        return build_trine()
    if fam == "psic2d":
        return build_psic_2d(TwoDConstructionParams(cfg.dim, cfg.a, cfg.b))
    if fam == "rank1-3dm2":
        kwargs = {} if cfg.theta is None else {"theta": cfg.theta}
        return build_rank_one_3dm2(RankOneConstructionParams(cfg.dim, a=cfg.a, b=cfg.b, **kwargs))
    if fam == "comp-bases":
        return build_complementary_bases(cfg.dim)
    if fam == "comp-bases-2dm1":
        return amalgamate_last_pair(build_complementary_bases(cfg.dim))
    raise CliError(f"unknown family {fam!r}", 2)


def _read_json(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", 1) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}", 1) from exc


def _povm(cfg: ExperimentConfig) -> Povm:
    if cfg.povm_path is not None:
        return ser.povm_from_json(_read_json(cfg.povm_path))
    return build_family(cfg)


def _emit(text: str, cfg: ExperimentConfig) -> None:
    if cfg.output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        Path(cfg.output).write_text(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {cfg.output}: {exc.strerror}", 1) from exc


def _wrap(cfg: ExperimentConfig, body: dict) -> str:
    return ser.dumps(ser.with_metadata(body, cfg.command, cfg.seed, cfg.parameters()))


def cmd_build(cfg: ExperimentConfig) -> int:
    povm = build_family(cfg)
    _emit(_wrap(cfg, {**ser.povm_to_json(povm), "validation": ser.validation_block(povm)}), cfg)
    return 0


def cmd_probs(cfg: ExperimentConfig) -> int:
    povm = _povm(cfg)
    if cfg.state_path is not None:
        state = ser.state_from_json(_read_json(cfg.state_path))
    else:
        state = random_pure_state(povm.dim, cfg.seed)
    dist = probabilities(povm, state)
    _emit(_wrap(cfg, {**ser.distribution_to_json(dist), "state": ser.state_to_json(state)}), cfg)
    return 0


def cmd_reconstruct(cfg: ExperimentConfig) -> int:
    scheme = make_scheme(cfg.family, cfg.dim, cfg.a, cfg.b, cfg.theta)
    dist = ser.distribution_from_json(_read_json(cfg.probs_path))
    report = scheme.invert(dist)
    body = ser.report_to_json(report)
    if cfg.truth_path is not None:
        truth = ser.state_from_json(_read_json(cfg.truth_path))
        body["fidelity"] = fidelity(truth, report.state) if report.state is not None else None
    _emit(_wrap(cfg, body), cfg)
    return 0 if report.failure is None else 3


def cmd_check(cfg: ExperimentConfig) -> int:
    povm = _povm(cfg)
    body = {"frame": ser.frame_report_to_json(frame_rank(povm))}
    if cfg.family in INVERTIBLE:
        scheme = make_scheme(cfg.family, povm.dim, cfg.a, cfg.b, cfg.theta)
        body["certification"] = ser.certification_to_json(
            certify_psic(scheme.povm, scheme.invert, cfg.trials, cfg.seed)
        )
    else:
        body["certification"] = None
    _emit(_wrap(cfg, body), cfg)
    return 0


def cmd_ambiguity(cfg: ExperimentConfig) -> int:
    povm = _povm(cfg)
    if cfg.state_path is not None:
        target = ser.state_from_json(_read_json(cfg.state_path))
    else:
        target = random_pure_state(povm.dim, cfg.seed)
    try:
        witness = find_ambiguity(povm, target, cfg.restarts, cfg.seed)
        body = ser.witness_to_json(witness)
    except NotFound:
        body = {"found": False, "state_a": ser.state_to_json(target), "restarts": cfg.restarts}
    _emit(_wrap(cfg, body), cfg)
    return 0


def cmd_tomo(cfg: ExperimentConfig) -> int:
    scheme = make_scheme(cfg.family, cfg.dim, cfg.a, cfg.b, cfg.theta)
    rows = efficiency_sweep(scheme, sorted(cfg.shots), range(cfg.seed, cfg.seed + cfg.seeds))
    meta = {"schema_version": ser.SCHEMA_VERSION, "seed": cfg.seed,
            "parameters": json.dumps(cfg.parameters(), sort_keys=True)}
    _emit(sweep_to_csv(rows, meta), cfg)
    return 0


HANDLERS = {
    "build": cmd_build,
    "probs": cmd_probs,
    "reconstruct": cmd_reconstruct,
    "check": cmd_check,
    "ambiguity": cmd_ambiguity,
    "tomo": cmd_tomo,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psic",
        description="Build, invert and test pure-state informationally complete POVMs.",
        epilog="exit codes: 0 ok, 1 I/O or schema error, 2 invalid parameters, 3 reconstruction failure",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--dim", type=int)
        p.add_argument("--a", type=float, help="anchor weight")
        p.add_argument("--b", type=float, help="middle-element weight")
        p.add_argument("--theta", type=parse_theta, help="'tetra' (cos theta = -1/3) or radians")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--povm", dest="povm_path", type=Path, help="POVM JSON file")
        p.add_argument("-o", "--out", dest="output", type=Path, help="write here instead of stdout")

    p = sub.add_parser("build", help="construct a POVM and print it as JSON")
    common(p)
    p = sub.add_parser("probs", help="outcome probabilities of a state")
    common(p)
    p.add_argument("--state", dest="state_path", type=Path, help="state JSON (default: Haar state from --seed)")
    p = sub.add_parser("reconstruct", help="invert outcome probabilities to a state")
    common(p)
    p.add_argument("--probs", dest="probs_path", type=Path, required=True)
    p.add_argument("--truth", dest="truth_path", type=Path, help="state JSON to score fidelity against")
    p = sub.add_parser("check", help="frame rank and round-trip certification")
    common(p)
    p.add_argument("--trials", type=int, default=1000)
    p = sub.add_parser("ambiguity", help="search for two states with equal outcome probabilities")
    common(p)
    p.add_argument("--state", dest="state_path", type=Path, help="target state JSON (default: Haar)")
    p.add_argument("--restarts", type=int, default=50)
    p = sub.add_parser("tomo", help="finite-shot efficiency sweep as CSV")
    common(p)
    p.add_argument("--shots", type=parse_int_list, required=True, help="comma-separated shot counts")
    p.add_argument("--seeds", type=int, default=100, help="number of seeds starting at --seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k in ExperimentConfig.__dataclass_fields__}
    cfg = ExperimentConfig(**fields)
    try:
        cfg.validate()
        return HANDLERS[cfg.command](cfg)
    except CliError as exc:
        print(f"psic: {exc}", file=sys.stderr)
        return exc.code
    except (ThrowawayNotPositive, InvalidParameter) as exc:
        print(f"psic: {exc}", file=sys.stderr)
        return 2
    except (PsicError, ValueError) as exc:
        print(f"psic: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
