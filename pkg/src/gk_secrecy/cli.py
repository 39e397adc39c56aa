"""``gk-secrecy`` command-line front end.

Exit codes: 0 success, 1 validation failure, 2 invalid input, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import DomainError, NonConvergenceError
from .gk_model import GkParams, db_to_linear
from .montecarlo import McConfig, sop_mc
from .sop_engine import SecrecyScenario, SopEstimate, sop_approx, sop_asymptotic, sop_exact
from . import validation

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

CSV_COLUMNS = (
    "snr_d_db", "sop_approx", "sop_exact", "sop_asymptotic", "sop_mc", "mc_stderr", "sigma_e_sq", "validity_warning",
)
TINY_SOP = 1e-12
MAX_POINTS = 10_000
CURVE_METHODS = ("approx", "exact", "asymptotic", "mc")

DEFAULTS = {
    "rs": 1.0,
    "method": None,
    "start-db": 0.0,
    "stop-db": 30.0,
    "step-db": 1.0,
    "mc-samples": 10_000_000,
    "seed": 42,
    "workers": 1,
    "quick": False,
}

# preset -> (fixed values, required flags)
PRESETS = {
    "fig1": ({"kd": 2.0, "md": 2.5, "ke": 2.0, "me": 2.5, "rs": 1.0,
              "start-db": 0.0, "stop-db": 30.0, "step-db": 1.0}, ("snr-e-db",)),
    "fig2": ({"kd": 1.5, "ke": 1.5, "me": 1.5, "snr-e-db": 0.0, "rs": 1.0,
              "start-db": 0.0, "stop-db": 60.0, "step-db": 2.0}, ("md",)),
    "fig3": ({"ke": 2.0, "me": 2.0, "snr-e-db": 5.0, "rs": 1.0,
              "start-db": 0.0, "stop-db": 60.0, "step-db": 2.0}, ("md",)),
}


class InputError(Exception):
    """Bad command-line or config input (exit 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _fmt(x: float) -> str:
    return f"{x:.8e}"


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# -- option handling --------------------------------------------------------


def _scenario_flags(p: argparse.ArgumentParser) -> None:
    for flag in ("kd", "md", "ke", "me"):
        p.add_argument(f"--{flag}", type=float)
    p.add_argument("--snr-d-db", type=float)
    p.add_argument("--snr-e-db", type=float)
    p.add_argument("--rs", type=float)


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="file of 'key = value' lines; keys are long flag names")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gk-secrecy", description="Secrecy outage probability over generalized-K fading.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="evaluate one scenario")
    _scenario_flags(ev)
    ev.add_argument("--method", help="approx, exact, asymptotic, mc or all (default approx)")
    ev.add_argument("--mc-samples", type=int)
    ev.add_argument("--seed", type=int)
    ev.add_argument("--workers", type=int)
    _common_flags(ev)

    cu = sub.add_parser("curve", help="sweep the main-link mean SNR and write CSV")
    _scenario_flags(cu)
    cu.add_argument("--preset", choices=sorted(PRESETS))
    cu.add_argument("--method", help="comma list of approx,exact,asymptotic,mc or all (default approx,exact,asymptotic)")
    cu.add_argument("--start-db", type=float)
    cu.add_argument("--stop-db", type=float)
    cu.add_argument("--step-db", type=float)
    cu.add_argument("--mc-samples", type=int)
    cu.add_argument("--seed", type=int)
    cu.add_argument("--workers", type=int)
    cu.add_argument("--out", help="output file (default stdout)")
    _common_flags(cu)

    mc = sub.add_parser("mc", help="Monte-Carlo estimate for one scenario")
    _scenario_flags(mc)
    mc.add_argument("--mc-samples", type=int)
    mc.add_argument("--seed", type=int)
    mc.add_argument("--workers", type=int)
    _common_flags(mc)

    va = sub.add_parser("validate", help="run the acceptance checks")
    va.add_argument("--quick", action="store_const", const=True)
    va.add_argument("--debug-bad-tolerance", action="append", metavar="CHECK",
                    help="force a negative tolerance on CHECK (harness self-test)")
    _common_flags(va)
    return parser


def _flag_actions(sub: argparse.ArgumentParser) -> dict[str, argparse.Action]:
    out = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--") and opt not in ("--help", "--config"):
                out[opt[2:]] = action
    return out


def read_config(path: str, actions: dict[str, argparse.Action]) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"--config: cannot read {path!r}: {exc.strerror}") from exc
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in actions:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        action = actions[key]
        try:
            if isinstance(action, argparse._StoreConstAction):
                converted = _parse_bool(value)
            elif isinstance(action, argparse._AppendAction):
                converted = [v.strip() for v in value.split(",") if v.strip()]
            elif action.type is not None:
                converted = action.type(value)
            else:
                converted = value
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
        if action.choices is not None and converted not in action.choices:
            raise InputError(f"{path}:{lineno}: {key!r} must be one of {sorted(action.choices)}")
        values[key] = converted
    return values


def resolve_options(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Merge sources: command-line flag > config file > preset > built-in default."""
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = _flag_actions(sub)
    config = read_config(args.config, actions) if args.config else {}
    flags = {key: getattr(args, act.dest) for key, act in actions.items() if getattr(args, act.dest) is not None}
    merged = {key: DEFAULTS[key] for key in actions if key in DEFAULTS}
    preset = flags.get("preset", config.get("preset"))
    required = ()
    if preset is not None:
        fixed, required = PRESETS[preset]
        merged.update(fixed)
    merged.update(config)
    merged.update(flags)
    if preset == "fig3":
        if "kd" in merged and "md" in merged and merged["kd"] != merged["md"]:
            raise InputError("--kd: preset fig3 requires kd = md")
        if "md" not in merged and "kd" in merged:
            merged["md"] = merged["kd"]
        if "md" in merged:
            merged["kd"] = merged["md"]
    for key in required:
        if key not in merged:
            raise InputError(f"--{key} is required with --preset {preset}")
    return merged


def _positive(opts: dict, key: str) -> float:
    if key not in opts:
        raise InputError(f"--{key} is required")
    value = opts[key]
    if not (math.isfinite(value) and value > 0):
        raise InputError(f"--{key}: {key} must be > 0, got {value:g}")
    return value


def _finite(opts: dict, key: str) -> float:
    if key not in opts:
        raise InputError(f"--{key} is required")
    value = opts[key]
    if not math.isfinite(value):
        raise InputError(f"--{key}: must be finite")
    return value


def _scenario(opts: dict, snr_d_db: float | None = None) -> SecrecyScenario:
    kd, md, ke, me, rs = (_positive(opts, k) for k in ("kd", "md", "ke", "me", "rs"))
    snr_e = _finite(opts, "snr-e-db")
    snr_d = _finite(opts, "snr-d-db") if snr_d_db is None else snr_d_db
    return SecrecyScenario(GkParams(kd, md, db_to_linear(snr_d)), GkParams(ke, me, db_to_linear(snr_e)), rs)


def _mc_config(opts: dict, workers: int | None = None) -> McConfig:
    try:
        return McConfig(opts["mc-samples"], opts["seed"], opts["workers"] if workers is None else workers)
    except DomainError as exc:
        flag = "--mc-samples" if "samples" in str(exc) else "--seed" if "seed" in str(exc) else "--workers"
        raise InputError(f"{flag}: {exc}") from exc


# -- commands ---------------------------------------------------------------


def _describe(est: SopEstimate) -> str:
    extra = " ".join(
        f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in est.extra.items()
    )
    line = (
        f"{est.method:<20} value={_fmt(est.value)} raw={_fmt(est.raw_value)} "
        f"sigma_e_sq={_fmt(est.sigma_e_sq)} validity_warning={str(est.validity_warning).lower()}"
    )
    return f"{line} {extra}".rstrip()


def cmd_eval(opts: dict, out) -> int:
    s = _scenario(opts)
    method = opts.get("method") or "approx"
    methods = ["approx", "exact", "mc", "asymptotic"] if method == "all" else [method]
    lines = []
    for name in methods:
        if name == "approx":
            lines.append(_describe(sop_approx(s)))
        elif name == "exact":
            lines.append(_describe(sop_exact(s)))
        elif name == "asymptotic":
            lines.append(_describe(sop_asymptotic(s)))
        elif name == "mc":
            r = sop_mc(s, _mc_config(opts))
            lines.append(
                f"{'monte-carlo':<20} value={_fmt(r.estimate)} stderr={_fmt(r.stderr)} "
                f"samples={r.samples} seed={r.seed}"
            )
        else:
            raise InputError(f"--method: unknown method {name!r}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_mc(opts: dict, out) -> int:
    s = _scenario(opts)
    r = sop_mc(s, _mc_config(opts))
    out.write(
        f"estimate={_fmt(r.estimate)} stderr={_fmt(r.stderr)} samples={r.samples} seed={r.seed} "
        f"mean_gamma_d={_fmt(r.mean_gamma_d)} mean_gamma_e={_fmt(r.mean_gamma_e)}\n"
    )
    return EXIT_OK


@dataclass(frozen=True)
class SweepSpec:
    start_db: float
    stop_db: float
    step_db: float
    methods: frozenset
    mc_samples: int
    seed: int

    def __post_init__(self):
        if not self.step_db > 0:
            raise InputError("--step-db: step must be > 0")
        if not self.start_db < self.stop_db:
            raise InputError("--start-db: start must be below --stop-db")
        if (self.stop_db - self.start_db) / self.step_db > MAX_POINTS:
            raise InputError(f"--step-db: sweep exceeds {MAX_POINTS} points")

    def grid(self) -> list[float]:
        count = int(math.floor((self.stop_db - self.start_db) / self.step_db + 1e-9)) + 1
        # snap to the printed representation so rows re-evaluate exactly
        return [float(_fmt(self.start_db + i * self.step_db)) for i in range(count)]


def _parse_methods(text: str | None) -> frozenset:
    if text is None:
        return frozenset(("approx", "exact", "asymptotic"))
    names = [t.strip() for t in text.split(",") if t.strip()]
    if names == ["all"]:
        return frozenset(CURVE_METHODS)
    bad = [n for n in names if n not in CURVE_METHODS]
    if bad or not names:
        raise InputError(f"--method: unknown method(s) {', '.join(bad) or '(none)'}")
    return frozenset(names)


def curve_row(opts: dict, sweep: SweepSpec, snr_d_db: float) -> list[str]:
    """One CSV row; reproducible from its own ``snr_d_db`` cell."""
    s = _scenario(opts, snr_d_db)
    cells = {"snr_d_db": _fmt(snr_d_db)}
    warn = False
    sigma = None
    for name, fn in (("approx", sop_approx), ("exact", sop_exact), ("asymptotic", sop_asymptotic)):
        if name in sweep.methods:
            est = fn(s)
            sigma = est.sigma_e_sq
            warn |= est.validity_warning
            value = est.value
            if value < TINY_SOP:
                value, warn = 0.0, True
            cells[f"sop_{name}"] = _fmt(value)
    if "mc" in sweep.methods:
        r = sop_mc(s, McConfig(sweep.mc_samples, sweep.seed, 1))
        value = r.estimate
        if value < TINY_SOP:
            value, warn = 0.0, True
        cells["sop_mc"] = _fmt(value)
        cells["mc_stderr"] = _fmt(r.stderr)
    if sigma is None:
        sigma = sop_approx(s).sigma_e_sq
    cells["sigma_e_sq"] = _fmt(sigma)
    cells["validity_warning"] = "true" if warn else "false"
    return [cells.get(col, "") for col in CSV_COLUMNS]


def cmd_curve(opts: dict, out) -> int:
    sweep = SweepSpec(
        _finite(opts, "start-db"), _finite(opts, "stop-db"), opts["step-db"],
        _parse_methods(opts.get("method")), opts["mc-samples"], opts["seed"],
    )
    _scenario(opts, 0.0)  # validate before any work
    if "mc" in sweep.methods:
        _mc_config(opts, workers=1)
    workers = opts["workers"]
    if workers < 1:
        raise InputError("--workers: must be >= 1")
    grid = sweep.grid()
    if workers == 1:
        rows = [curve_row(opts, sweep, x) for x in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda x: curve_row(opts, sweep, x), grid))
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    text = buf.getvalue()
    target = opts.get("out")
    if target:
        try:
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"--out: cannot write {target!r}: {exc.strerror}") from exc
    else:
        out.write(text)
    return EXIT_OK


def cmd_validate(opts: dict, out) -> int:
    forced = frozenset(opts.get("debug-bad-tolerance") or ())
    unknown = forced - set(validation.CHECKS)
    if unknown:
        raise InputError(f"--debug-bad-tolerance: unknown check(s) {', '.join(sorted(unknown))}")
    ok = True
    for res in validation.run_checks(quick=bool(opts.get("quick")), bad_tolerance=forced):
        out.write(validation.format_result(res) + "\n")
        if not res.passed:
            for line in res.details:
                if line.endswith("FAIL"):
                    out.write(f"      {line}\n")
        out.flush()
        ok &= res.passed
    out.write(("all checks passed" if ok else "some checks FAILED") + "\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"eval": cmd_eval, "curve": cmd_curve, "mc": cmd_mc, "validate": cmd_validate}


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
        opts = resolve_options(args, parser)
        return COMMANDS[args.command](opts, out)
    except InputError as exc:
        err.write(f"gk-secrecy: error: {exc}\n")
        return EXIT_INPUT
    except DomainError as exc:
        err.write(f"gk-secrecy: error: {exc}\n")
        return EXIT_INPUT
    except (NonConvergenceError, ArithmeticError) as exc:
        err.write(f"gk-secrecy: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
