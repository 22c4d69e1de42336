"""Command-line front end.

    sibuya spectrum   --m 3 --a 0,0 --lmin 0 --lmax 30 --out s.csv
    sibuya eval       --m 3 --a 0,0,1.5
    sibuya sweep      --m 3 --a 0,-alpha --alpha-start 2 --alpha-stop -3 --alpha-step 0.1
    sibuya verify     --checks symmetry,wronskian_lemma --seed 7
    sibuya hypothesis --m 4 --a 1,-0.5,-2

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 numerical or
I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import re
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, SibuyaError, VerificationError
from .integrator import RayConfig
from .potential import Potential
from .stokes import origin_cached, stokes_c
from .verify import ALL_CHECKS, DEFAULT_THRESHOLDS, SuiteConfig, check_hypothesis, run_suite
from .zeros import (
    SearchWindow,
    ZeroRecord,
    classify_zeros,
    derivative_c,
    scan_real_zeros,
    sweep_family,
)

log = logging.getLogger("sibuya")

COMMANDS = ("spectrum", "eval", "sweep", "verify", "hypothesis")
CSV_COLUMNS = ("kind", "alpha", "lambda_re", "lambda_im", "c_abs", "dc_re", "dc_im", "winding", "is_real",
               "is_simple", "residual")
_ALPHA = re.compile(r"^([+-]?)(?:([0-9.eE+-]+)\*)?alpha$")


class InputError(DegenerateInputError):
    pass


@dataclass
class RunConfig:
    command: str
    m: int | None = None
    a: tuple = ()
    lmin: float = 0.0
    lmax: float = 20.0
    grid: int = 64
    box_height: float = 0.5
    tol: float = 1e-11
    alpha_start: float = 2.0
    alpha_stop: float = -3.0
    alpha_step: float = 0.1
    out: str | None = None
    format: str = "csv"
    seed: int = 0
    checks: tuple = ()
    n_cases: int = 20
    thresholds: dict = field(default_factory=dict)
    rel_tol: float = 1e-12
    abs_tol: float = 1e-18

    def ray(self) -> RayConfig:
        return RayConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def window(self) -> SearchWindow:
        return SearchWindow(self.lmin, self.lmax, self.grid, self.box_height, self.tol)

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.command != "verify":
            if self.m is None or self.m < 1:
                raise InputError("--m must be a positive integer")
            want = self.m if self.command == "eval" else self.m - 1
            if len(self.a) != want:
                raise InputError(f"{self.command} expects {want} coefficients for m={self.m}, got {len(self.a)}")
            has_alpha = any(isinstance(x, AlphaSlot) for x in self.a)
            if has_alpha != (self.command == "sweep"):
                raise InputError("the 'alpha' placeholder is required for sweep and only allowed there")
            if self.command in ("spectrum", "sweep", "hypothesis") and any(_imag(x) for x in self.a):
                raise InputError(f"{self.command} needs real coefficients")
        for name in ("tol", "rel_tol", "abs_tol", "box_height", "alpha_step"):
            if not getattr(self, name) > 0:
                raise InputError(f"--{name.replace('_', '-')} must be positive")
        if self.format not in ("csv", "json"):
            raise InputError("--format must be csv or json")
        if not self.lmin < self.lmax:
            raise InputError("--lmin must be below --lmax")
        if self.grid < 16:
            raise InputError("--grid must be at least 16")
        unknown = set(self.thresholds) - set(DEFAULT_THRESHOLDS)
        if unknown:
            raise InputError(f"unknown thresholds: {sorted(unknown)}")
        bad = set(self.checks) - set(ALL_CHECKS)
        if bad:
            raise InputError(f"unknown checks: {sorted(bad)}; choose from {', '.join(ALL_CHECKS)}")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["a"] = ",".join(format_coeff(x) for x in self.a)
        d["checks"] = list(self.checks)
        return d


@dataclass(frozen=True)
class AlphaSlot:
    """``scale * alpha`` in a coefficient template."""

    scale: float = 1.0

    def __call__(self, alpha: float) -> float:
        return self.scale * alpha


def _imag(x) -> float:
    return 0.0 if isinstance(x, AlphaSlot) else complex(x).imag


def parse_coeff(text: str):
    """``"1.5"``, ``"2-0.5i"``, ``"i"``, ``"alpha"``, ``"-alpha"``, ``"0.5*alpha"``."""
    s = text.strip().replace(" ", "")
    m = _ALPHA.match(s)
    if m:
        scale = float(m.group(2)) if m.group(2) else 1.0
        return AlphaSlot(-scale if m.group(1) == "-" else scale)
    if s.endswith("i") and not s.endswith("inf"):
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
        s = re.sub(r"([+-])j$", r"\g<1>1j", s)
    try:
        z = complex(s)
    except ValueError:
        raise InputError(f"cannot parse coefficient {text!r} (use re, re+imi or alpha)") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"coefficient {text!r} is not finite")
    return z.real if z.imag == 0 else z


def format_coeff(x) -> str:
    if isinstance(x, AlphaSlot):
        return "alpha" if x.scale == 1 else ("-alpha" if x.scale == -1 else f"{x.scale!r}*alpha")
    z = complex(x)
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def parse_coeffs(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(parse_coeff(str(t)) for t in text)
    text = str(text).strip()
    if not text:
        return ()
    return tuple(parse_coeff(t) for t in text.split(","))


# ---------------------------------------------------------------------------
# parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sibuya", description="Stokes multipliers and their zeros.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (flags take precedence)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int)
    common.add_argument("--rel-tol", type=float, dest="rel_tol")
    common.add_argument("--abs-tol", type=float, dest="abs_tol")
    common.add_argument("-v", "--verbose", action="store_true")
    coeffs = argparse.ArgumentParser(add_help=False)
    coeffs.add_argument("--m", type=int)
    coeffs.add_argument("--a", help="comma-separated coefficients a1,...")
    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--lmin", type=float)
    window.add_argument("--lmax", type=float)
    window.add_argument("--grid", type=int)
    window.add_argument("--box-height", type=float, dest="box_height")
    window.add_argument("--tol", type=float)

    sub.add_parser("spectrum", parents=[common, coeffs, window], help="real zeros of lambda -> C(a, lambda)")
    sub.add_parser("eval", parents=[common, coeffs], help="C and f0 at a = (a1, ..., am)")
    sw = sub.add_parser("sweep", parents=[common, coeffs, window], help="follow zeros along a family a(alpha)")
    sw.add_argument("--alpha-start", type=float, dest="alpha_start")
    sw.add_argument("--alpha-stop", type=float, dest="alpha_stop")
    sw.add_argument("--alpha-step", type=float, dest="alpha_step")
    ve = sub.add_parser("verify", parents=[common], help="run the identity and zero-location checks")
    ve.add_argument("--checks", help=f"comma-separated subset of {','.join(ALL_CHECKS)}")
    ve.add_argument("--n-cases", type=int, dest="n_cases")
    ve.add_argument("--threshold", action="append", default=[], metavar="NAME=VALUE",
                    help="override a check threshold (repeatable)")
    sub.add_parser("hypothesis", parents=[common, coeffs], help="test (H) with its m=4 supplement")
    return ap


_FIELDS = {f.name for f in fields(RunConfig)}


def _glue_negative(argv: list[str]) -> list[str]:
    """Turn ``--a -1,2`` into ``--a=-1,2`` so argparse does not read the value as a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--a" and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2] not in ("-", ""):
            out.append(f"--a={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    if isinstance(data, dict) and "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    unknown = set(data) - _FIELDS
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    return data


def parse(argv: Sequence[str] | None = None) -> tuple[RunConfig, bool]:
    """``argv`` to a validated :class:`RunConfig`; returns ``(config, verbose)``."""
    args = build_parser().parse_args(_glue_negative(list(sys.argv[1:] if argv is None else argv)))
    values: dict = {}
    if args.config:
        values.update(load_config(args.config))
        values.pop("command", None)
    for key, val in vars(args).items():
        if key in ("config", "verbose", "threshold", "command") or val is None:
            continue
        values[key] = val
    values["a"] = parse_coeffs(values.get("a", ()))
    if isinstance(values.get("checks"), str):
        values["checks"] = tuple(c for c in values["checks"].split(",") if c)
    values["checks"] = tuple(values.get("checks", ()))
    thresholds = dict(values.get("thresholds", {}))
    for item in getattr(args, "threshold", []):
        name, _, val = item.partition("=")
        try:
            thresholds[name] = float(val)
        except ValueError:
            raise InputError(f"bad --threshold {item!r}; expected NAME=VALUE") from None
    values["thresholds"] = thresholds
    rc = RunConfig(command=args.command, **values)
    return rc.validate(), bool(args.verbose)


# ---------------------------------------------------------------------------
# output


def record_row(r: ZeroRecord) -> dict:
    return {
        "kind": r.kind,
        "alpha": "" if r.alpha is None else r.alpha,
        "lambda_re": r.lam.real,
        "lambda_im": r.lam.imag,
        "c_abs": "",
        "dc_re": r.c_deriv.real,
        "dc_im": r.c_deriv.imag,
        "winding": r.winding,
        "is_real": str(bool(r.is_real)).lower(),
        "is_simple": str(bool(r.is_simple)).lower(),
        "residual": r.residual,
    }


def render(rows: list[dict], rc: RunConfig, extra: dict | None = None) -> str:
    if rc.format == "json":
        doc = {"config": rc.to_dict(), "records": [{k: row.get(k, "") for k in CSV_COLUMNS} for row in rows]}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, default=_json_default) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: _csv_value(row.get(k, "")) for k in CSV_COLUMNS})
    return buf.getvalue()


def _csv_value(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(type(x))


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(rows: list[dict], rc: RunConfig, extra: dict | None = None, stdout=None) -> None:
    text = render(rows, rc, extra)
    if rc.out:
        write_atomic(rc.out, text)
    else:
        (stdout or sys.stdout).write(text)


def trajectory_paths(out: str, n: int) -> list[Path]:
    base = Path(out)
    return [base.with_name(f"{base.stem}_track{k:03d}.dat") for k in range(n)]


# ---------------------------------------------------------------------------
# commands


def _zero_row(r: ZeroRecord, c_abs: float) -> dict:
    row = record_row(r)
    row["c_abs"] = c_abs
    return row


def cmd_spectrum(rc: RunConfig, say) -> int:
    a = tuple(float(complex(x).real) for x in rc.a)
    ray = rc.ray()
    found = scan_real_zeros(a, rc.window(), ray)
    recs = classify_zeros(found.zeros, a, ray) if found.zeros else []
    rows = []
    for r in recs:
        c_abs = abs(stokes_c(Potential.with_lambda(a, r.lam), ray).c)
        rows.append(_zero_row(r, c_abs))
        say(f"zero lambda={r.lam.real:.12g} winding={r.winding} simple={str(r.is_simple).lower()} "
            f"dC={r.c_deriv.real:.6g}{r.c_deriv.imag:+.6g}i")
    for t in found.tangencies:
        say(f"tangency candidate near lambda={t:.10g}")
    emit(rows, rc)
    say(f"{len(rows)} zeros in [{rc.lmin}, {rc.lmax}]")
    return 0


def cmd_eval(rc: RunConfig, say) -> int:
    ray = rc.ray()
    p = Potential.from_coeffs(rc.a)
    data = stokes_c(p, ray)
    f = origin_cached(p, ray)
    dc = derivative_c(p.head, p.lam, ray)
    rec = ZeroRecord(complex(p.lam), dc, 0, p.lam.imag == 0, False, data.unit_coeff_residual, kind="eval")
    row = _zero_row(rec, abs(data.c))
    row["winding"] = ""
    row["is_simple"] = ""
    say(f"C={data.c.real:.15g}{data.c.imag:+.15g}i |C|={abs(data.c):.6g} "
        f"log|f0|={f.log_abs_value():.12g} unit_residual={data.unit_coeff_residual:.2g}")
    emit([row], rc, {"c": [data.c.real, data.c.imag]} if rc.format == "json" else None)
    return 0


def cmd_sweep(rc: RunConfig, say) -> int:
    template = rc.a

    def family(alpha):
        return tuple(x(alpha) if isinstance(x, AlphaSlot) else float(complex(x).real) for x in template)

    n = int(math.floor(abs(rc.alpha_stop - rc.alpha_start) / rc.alpha_step + 1e-9)) + 1
    sign = 1.0 if rc.alpha_stop >= rc.alpha_start else -1.0
    alphas = rc.alpha_start + sign * rc.alpha_step * np.arange(n)
    ray = rc.ray()
    res = sweep_family(family, alphas, rc.window(), ray)
    rows = []
    for al, zs in zip(res.alphas, res.zeros):
        for z in zs:
            rows.append({"kind": "zero", "alpha": float(al), "lambda_re": float(z), "lambda_im": 0.0,
                         "c_abs": "", "dc_re": "", "dc_im": "", "winding": "", "is_real": "true",
                         "is_simple": "", "residual": ""})
    for ev in res.events:
        rows.append({"kind": "coalescence", "alpha": ev.alpha, "lambda_re": ev.lam, "lambda_im": 0.0,
                     "c_abs": ev.c_abs, "dc_re": ev.dc.real, "dc_im": ev.dc.imag, "winding": ev.winding,
                     "is_real": "true", "is_simple": "false", "residual": ev.c_abs})
        say(f"coalescence alpha={ev.alpha:.12g} lambda={ev.lam:.10g} |C|={ev.c_abs:.3g} "
            f"|dC|={ev.dc_abs:.3g} winding={ev.winding}")
    emit(rows, rc)
    if rc.out:
        for path, track in zip(trajectory_paths(rc.out, len(res.tracks)), res.tracks):
            write_atomic(path, "".join(f"{float(al)!r} {float(lam)!r}\n" for al, lam in track))
    say(f"{len(res.alphas)} parameter values, {len(res.tracks)} tracks, {len(res.events)} coalescence events")
    return 0


def cmd_verify(rc: RunConfig, say) -> int:
    thresholds = dict(DEFAULT_THRESHOLDS)
    thresholds.update(rc.thresholds)
    cfg = SuiteConfig(seed=rc.seed, n_cases=rc.n_cases, thresholds=thresholds, ray=rc.ray())
    report = run_suite(rc.seed, rc.checks or None, cfg)
    for e in report.entries:
        if not e.verdict:
            say(f"FAIL {e.name} residual={e.residual!r} threshold={e.threshold!r} params={e.params}")
    text = report.to_json()
    if rc.out:
        write_atomic(rc.out, text + "\n")
    else:
        sys.stdout.write(text + "\n")
    say(f"{len(report.entries) - len(report.failures())}/{len(report.entries)} checks passed "
        f"(seed {report.seed}, config {report.config_digest})")
    return 0 if report.passed else 1


def cmd_hypothesis(rc: RunConfig, say) -> int:
    res = check_hypothesis([complex(x).real for x in rc.a], rc.m)
    print(res.describe())
    return 0 if res.accepted else 1


HANDLERS = {"spectrum": cmd_spectrum, "eval": cmd_eval, "sweep": cmd_sweep, "verify": cmd_verify,
            "hypothesis": cmd_hypothesis}


def execute(rc: RunConfig, say=None) -> int:
    say = say or (lambda msg: print(msg, file=sys.stderr))
    try:
        return HANDLERS[rc.command](rc, say)
    except VerificationError as exc:
        say(f"verification failed: {exc}")
        return 1
    except DegenerateInputError as exc:
        say(f"bad input: {exc}")
        return 2
    except SibuyaError as exc:
        say(f"numerical failure: {exc}")
        return 3
    except OSError as exc:
        say(f"I/O failure: {exc}")
        return 3


def main(argv: Sequence[str] | None = None) -> int:
    try:
        rc, verbose = parse(argv)
    except DegenerateInputError as exc:
        print(f"sibuya: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return execute(rc)


if __name__ == "__main__":
    sys.exit(main())
