"""Command-line front end: ``ptcoupled {spectrum,verify,gram,phase-scan,oracle-compare}``.

Exit codes: 0 ok, 1 usage, 2 critical regime, 3 verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fockrep, reports, wavefn
from .canonical import BRANCH, diagonalize
from .model import DEFAULT_GAUGE, CriticalCouplingError, Model, ModelError, ModelParams, RegimeError
from .spectrum import Regime, classify_regime, spectrum_table

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CRITICAL = 2
EXIT_VERIFY = 3

COMMANDS = ("spectrum", "verify", "gram", "phase-scan", "oracle-compare")

DEFAULT_TOLERANCES = {
    "verify": 1e-8,
    "gram": 1e-8,
    "oracle-compare": 1e-5,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    model: int = 1
    epsilon: float = 0.0
    tau1: float | None = None
    tau2: float | None = None
    a: float = DEFAULT_GAUGE
    b: float = DEFAULT_GAUGE
    zeta: int = 1
    truncation: int = 20
    truncation_cap: int = fockrep.TRUNCATION_CAP
    margin: int = fockrep.INTERIOR_MARGIN
    quad_order: int = wavefn.DEFAULT_ORDER
    tolerance: float | None = None
    format: str = "json"
    out: str | None = None
    max_total: int = 3
    nmax: int = 4
    route: str = "pv"
    eps_from: float = 0.0
    eps_to: float = 2.0
    steps: int = 40
    oracle: bool = False
    workers: int = 4
    check_tol: dict[str, float] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        numeric = [self.epsilon, self.a, self.b, self.eps_from, self.eps_to]
        numeric += [v for v in (self.tau1, self.tau2, self.tolerance) if v is not None]
        numeric += list(self.check_tol.values())
        if not all(math.isfinite(v) for v in numeric):
            raise UsageError("numeric options must be finite")
        if self.truncation > self.truncation_cap:
            raise UsageError(f"truncation {self.truncation} exceeds the cap {self.truncation_cap}")
        if self.truncation - self.margin < 0:
            raise UsageError("truncation must exceed the interior margin")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        if self.steps < 1 or self.max_total < 0 or self.nmax < 0:
            raise UsageError("steps must be >= 1; max-total and nmax must be >= 0")

    @property
    def tol(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return DEFAULT_TOLERANCES.get(self.command, 1e-8)

    def params(self, epsilon: float | None = None) -> ModelParams:
        eps = self.epsilon if epsilon is None else epsilon
        if self.model == 1:
            tau1 = 0.0 if self.tau1 is None else self.tau1
            tau2 = 1.0 if self.tau2 is None else self.tau2
        else:
            tau1 = 0.0 if self.tau1 is None else self.tau1
            tau2 = 0.0 if self.tau2 is None else self.tau2
        try:
            return ModelParams(Model(self.model), eps, tau1, tau2, self.a, self.b, self.zeta)
        except ModelError as exc:
            raise UsageError(str(exc)) from exc


@dataclass
class Outcome:
    status: int
    report: dict
    columns: list[str]
    rows: list[list]

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return reports.to_csv(self.columns, self.rows)
        return reports.dumps(self.report)


def _header(config: RunConfig, params: ModelParams) -> dict:
    return {
        "params": params.as_dict(),
        "regime": classify_regime(float(params.epsilon)),
        "branch": BRANCH,
    }


def _spectrum(config: RunConfig) -> Outcome:
    params = config.params()
    regime = classify_regime(config.epsilon)
    levels = spectrum_table(params, config.max_total)
    form = diagonalize(params)
    rows = [[lv.n1, lv.n2, lv.value.real, lv.value.imag, regime.value] for lv in levels]
    report = reports.make_report(
        "spectrum", **_header(config, params),
        diagonal_form={"omega1": form.omega1, "omega2": form.omega2, "I1": form.I1, "I2": form.I2,
                       "const_shift": form.const_shift},
        levels=[{"n1": lv.n1, "n2": lv.n2, "value": lv.value} for lv in levels],
    )
    return Outcome(EXIT_OK, report, ["n1", "n2", "re_E", "im_E", "regime"], rows)


def _verify(config: RunConfig) -> Outcome:
    params = config.params()
    regime = classify_regime(config.epsilon)
    if regime is Regime.CRITICAL:
        raise CriticalCouplingError(config.epsilon)
    N, K, tol = config.truncation, config.margin, config.tol
    checks, skipped = [], []
    if params.model is Model.MODEL1:
        checks.append(fockrep.commutator_counterpart_check(params, N, K, tol))
    if regime is Regime.UNBROKEN:
        checks.append(fockrep.verify_pseudo_hermiticity(params, N, K, tol))
        checks.append(fockrep.ladder_algebra_check(params, N, K, tol))
    else:
        skipped = ["pseudo_hermiticity", "ladder_algebra"]
    for c in checks:
        c.overrides = {k: v for k, v in config.check_tol.items() if k in c.defects}
    passed = all(c.passed for c in checks)
    rows = []
    for c in checks:
        for name, value in c.defects.items():
            rows.append([c.check, name, value, c.limit(name), value <= c.limit(name)])
    report = reports.make_report(
        "verify", **_header(config, params),
        truncation=N, margin=K, tolerance=tol,
        passed=passed, checks=[c.as_dict() for c in checks], skipped=skipped,
    )
    return Outcome(EXIT_OK if passed else EXIT_VERIFY, report,
                   ["check", "defect", "value", "tolerance", "passed"], rows)


def _gram(config: RunConfig) -> Outcome:
    params = config.params()
    regime = classify_regime(config.epsilon)
    if regime is Regime.CRITICAL:
        raise CriticalCouplingError(config.epsilon)
    if regime is Regime.BROKEN:
        raise RegimeError("the Gram matrix is only defined in the unbroken regime")
    G = wavefn.gram(params, config.nmax, config.quad_order, config.route)
    diag = G.diagnostics()
    passed = diag["max_deviation"] <= config.tol
    rows = []
    for i, (n1, n2) in enumerate(G.indices):
        for j, (m1, m2) in enumerate(G.indices):
            z = G.entries[i, j]
            rows.append([n1, n2, m1, m2, z.real, z.imag])
    report = reports.make_report(
        "gram", **_header(config, params),
        nmax=config.nmax, quadrature_order=G.quadrature_order, contour=G.contour,
        indices=[list(ix) for ix in G.indices], entries=G.entries,
        diagnostics=diag, tolerance=config.tol, passed=passed,
    )
    return Outcome(EXIT_OK if passed else EXIT_VERIFY, report,
                   ["n1", "n2", "m1", "m2", "re", "im"], rows)


def _scan_point(config: RunConfig, eps: float) -> dict:
    regime = classify_regime(eps)
    row = {"epsilon": eps, "regime": regime, "max_abs_imag": None}
    if regime is Regime.CRITICAL:
        return row
    params = config.params(eps)
    row["max_abs_imag"] = max(abs(lv.value.imag) for lv in spectrum_table(params, config.max_total))
    if config.oracle:
        oracle = fockrep.oracle_eigensolve(params, config.truncation)
        # the top of a truncated spectrum never settles; judge reality on converged levels only
        settled = oracle.converged_values()
        row["oracle_converged"] = int(settled.size)
        row["oracle_max_abs_imag"] = float(np.max(np.abs(settled.imag))) if settled.size else None
        row["oracle_conjugation_defect"] = fockrep.conjugation_closure_defect(oracle.eigenvalues)
    return row


def _phase_scan(config: RunConfig) -> Outcome:
    grid = [round(float(e), 12) for e in np.linspace(config.eps_from, config.eps_to, config.steps + 1)]
    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        points = list(pool.map(lambda e: _scan_point(config, e), grid))
    params = config.params(0.0)
    columns = ["epsilon", "max_abs_imag", "regime"]
    if config.oracle:
        columns += ["oracle_converged", "oracle_max_abs_imag", "oracle_conjugation_defect"]
    rows = [[p.get(c) if c != "regime" else p["regime"].value for c in columns] for p in points]
    report = reports.make_report(
        "phase-scan",
        params={k: v for k, v in params.as_dict().items() if k != "epsilon"},
        branch=BRANCH, max_total=config.max_total, points=points,
    )
    return Outcome(EXIT_OK, report, columns, rows)


def _oracle_compare(config: RunConfig) -> Outcome:
    params = config.params()
    regime = classify_regime(config.epsilon)
    if regime is Regime.CRITICAL:
        raise CriticalCouplingError(config.epsilon)
    oracle = fockrep.oracle_eigensolve(params, config.truncation)
    cmp = fockrep.compare_with_closed_form(params, config.truncation, config.max_total, oracle)
    passed = all(r["delta"] <= config.tol for r in cmp)
    rows = [[r["n1"], r["n2"], r["closed_form"].real, r["closed_form"].imag,
             r["oracle"].real, r["oracle"].imag, r["delta"]] for r in cmp]
    report = reports.make_report(
        "oracle-compare", **_header(config, params),
        truncation=config.truncation, tolerance=config.tol, passed=passed, levels=cmp,
        conjugation_defect=fockrep.conjugation_closure_defect(oracle.eigenvalues),
    )
    return Outcome(EXIT_OK if passed else EXIT_VERIFY, report,
                   ["n1", "n2", "re_closed", "im_closed", "re_oracle", "im_oracle", "delta"], rows)


HANDLERS = {
    "spectrum": _spectrum,
    "verify": _verify,
    "gram": _gram,
    "phase-scan": _phase_scan,
    "oracle-compare": _oracle_compare,
}


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns the exit status and the serialised output."""
    try:
        config.validate()
        outcome = HANDLERS[config.command](config)
    except UsageError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    except CriticalCouplingError as exc:
        return EXIT_CRITICAL, f"error: {exc}\n"
    except (ModelError, ValueError) as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    return outcome.status, outcome.render(config.format)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _zeta(text: str) -> int:
    value = int(text)
    if value not in (1, -1):
        raise argparse.ArgumentTypeError("zeta must be +1 or -1")
    return value


def _check_tol(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    try:
        return name, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", type=int, choices=(1, 2), default=1)
    common.add_argument("--epsilon", type=float, default=0.0)
    common.add_argument("--tau1", type=float)
    common.add_argument("--tau2", type=float)
    common.add_argument("--a", type=float, default=DEFAULT_GAUGE)
    common.add_argument("--b", type=float, default=DEFAULT_GAUGE)
    common.add_argument("--zeta", type=_zeta, default=1)
    common.add_argument("-N", "--truncation", type=int, default=20)
    common.add_argument("--truncation-cap", type=int, default=fockrep.TRUNCATION_CAP)
    common.add_argument("--margin", type=int, default=fockrep.INTERIOR_MARGIN)
    common.add_argument("--quad-order", type=int, default=wavefn.DEFAULT_ORDER)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out")

    parser = _Parser(prog="ptcoupled", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="closed-form energy levels")
    p.add_argument("--max-total", type=int, default=3)
    p = sub.add_parser("verify", parents=[common], help="Fock-space operator identity checks")
    p.add_argument("--check-tol", type=_check_tol, action="append", default=[], metavar="NAME=VALUE",
                   help="override the tolerance of one named defect (repeatable)")
    p = sub.add_parser("gram", parents=[common], help="PV Gram matrix of eigenfunctions")
    p.add_argument("--nmax", type=int, default=4)
    p.add_argument("--route", choices=("pv", "ptv"), default="pv")
    p = sub.add_parser("phase-scan", parents=[common], help="max |Im E| over a coupling sweep")
    p.add_argument("--eps-from", type=float, default=0.0)
    p.add_argument("--eps-to", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--max-total", type=int, default=4)
    p.add_argument("--oracle", action="store_true", help="also eigensolve the truncated matrix")
    p.add_argument("--workers", type=int, default=4)
    p = sub.add_parser("oracle-compare", parents=[common], help="closed form vs dense eigensolve")
    p.add_argument("--max-total", type=int, default=3)
    return parser


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    ns["check_tol"] = dict(ns.get("check_tol") or [])
    return RunConfig(**ns)


def main(argv: list[str] | None = None) -> int:
    config = config_from_args(argv)
    status, text = run(config)
    if status in (EXIT_USAGE, EXIT_CRITICAL) and text.startswith("error:"):
        sys.stderr.write(text)
    elif config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
