"""Command-line front end: solve, cheeger, sweep, and verify subcommands.

Exit codes: 0 success (all checks pass for verify), 1 a verification check
failed, 2 invalid input, 3 solver non-convergence. Results go to --out or
standard output (JSON for solve/cheeger/verify, CSV for sweep); progress and
diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .cheeger_solver import cheeger_inner_parallel, cheeger_tv
from .domain_grid import GridDomain, build_domain, load_mask
from .limit_harness import QPath, run_sweep, sweep_csv_text
from .plap_solver import SolveParams, minimize_rayleigh
from .verify import verify_all

__all__ = ["main", "run", "build_parser"]

_COMMON_KEYS = {"domain", "n", "side", "r", "tol", "out", "seed"}
_ALLOWED_KEYS = {
    "solve": _COMMON_KEYS | {"p", "q"},
    "cheeger": _COMMON_KEYS | {"method"},
    "sweep": _COMMON_KEYS | {"path", "p_list"},
    "verify": {"n", "n_sweep", "tol", "out", "seed"},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cheegerlab",
        description="Rayleigh constants of the p-Laplacian, Cheeger constants, "
        "and p -> 1 limit sweeps on raster domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, with_domain=True):
        if with_domain:
            sp.add_argument(
                "--domain",
                help="square | disk | rectangle:a:b | lshape | mask:<path>",
            )
            sp.add_argument("--n", type=int, help="cells across the domain")
            sp.add_argument("--side", type=float, help="square/lshape side length")
            sp.add_argument("--r", type=float, help="disk radius")
        sp.add_argument("--tol", type=float, help="method tolerance override")
        sp.add_argument("--out", help="output file (verify: output directory)")
        sp.add_argument("--seed", type=int, help="seed for randomized ingredients")
        sp.add_argument("--config", help="flat JSON config file; flags override it")

    sp_solve = sub.add_parser("solve", help="minimize the (p, q) Rayleigh quotient")
    sp_solve.add_argument("--p", type=float, help="gradient exponent in (1, 2]")
    sp_solve.add_argument("--q", type=float, help="normalization exponent in (0, p*)")
    add_common(sp_solve)

    sp_ch = sub.add_parser("cheeger", help="compute the Cheeger constant")
    sp_ch.add_argument("--method", choices=("inner", "tv"), help="algorithm")
    add_common(sp_ch)

    sp_sw = sub.add_parser("sweep", help="continuation sweep p -> 1+")
    sp_sw.add_argument("--path", help="q path: one | p | pow:<beta> | list:<file>")
    sp_sw.add_argument("--p-list", dest="p_list", help="comma-separated p values")
    add_common(sp_sw)

    sp_vf = sub.add_parser("verify", help="run the full verification pipeline")
    sp_vf.add_argument("--n", type=int, help="calibration grid resolution")
    sp_vf.add_argument("--n-sweep", dest="n_sweep", type=int, help="sweep resolution")
    add_common(sp_vf, with_domain=False)

    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    cfg = vars(args).copy()
    config_path = cfg.pop("config", None)
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text())
        except OSError as exc:
            raise ValueError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a flat JSON object")
        allowed = _ALLOWED_KEYS[cfg["command"]]
        unknown = sorted(set(loaded) - allowed)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        for key, value in loaded.items():
            if cfg.get(key) is None:
                cfg[key] = value
    return cfg


def _build_domain(cfg: dict) -> GridDomain:
    desc = cfg.get("domain") or "square"
    n = cfg.get("n") or 128
    tokens = str(desc).split(":")
    tag = tokens[0]
    if tag == "square":
        return build_domain("square", n, side=cfg.get("side") or 1.0)
    if tag == "disk":
        return build_domain("disk", n, radius=cfg.get("r") or 1.0)
    if tag == "rectangle":
        if len(tokens) != 3:
            raise ValueError("rectangle domain must be rectangle:a:b")
        return build_domain("rectangle", n, a=float(tokens[1]), b=float(tokens[2]))
    if tag == "lshape":
        return build_domain("lshape", n, side=cfg.get("side") or 1.0)
    if tag == "mask":
        if len(tokens) != 2:
            raise ValueError("mask domain must be mask:<path>")
        try:
            return load_mask(tokens[1])
        except OSError as exc:
            raise ValueError(f"cannot read mask file: {exc}")
    raise ValueError(f"unknown domain {desc!r}")


def _parse_qpath(token: str) -> QPath:
    if token == "one":
        return QPath.constant_one()
    if token == "p":
        return QPath.equal_p()
    if token.startswith("pow:"):
        return QPath.power(float(token.split(":", 1)[1]))
    if token.startswith("list:"):
        path = token.split(":", 1)[1]
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ValueError(f"cannot read q list file: {exc}")
        values = [float(tok) for tok in text.replace(",", " ").split()]
        return QPath.explicit(values)
    raise ValueError(f"unknown q path {token!r}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _solve_params(cfg: dict) -> SolveParams:
    kwargs = {"seed": int(cfg.get("seed") or 0)}
    if cfg.get("tol") is not None:
        kwargs["tol_lambda"] = float(cfg["tol"])
    return SolveParams(**kwargs)


def _cmd_solve(cfg: dict) -> int:
    if cfg.get("p") is None or cfg.get("q") is None:
        raise ValueError("solve requires --p and --q")
    domain = _build_domain(cfg)
    result = minimize_rayleigh(domain, cfg["p"], cfg["q"], _solve_params(cfg))
    _emit(json.dumps(result.to_json_dict(), indent=2) + "\n", cfg.get("out"))
    if not result.converged:
        print(
            f"solver did not converge: residual {result.residual:.3e}",
            file=sys.stderr,
        )
        return 3
    return 0


def _cmd_cheeger(cfg: dict) -> int:
    domain = _build_domain(cfg)
    method = cfg.get("method") or "inner"
    if method == "inner":
        result = cheeger_inner_parallel(domain, tol=cfg.get("tol") or 1e-3)
    elif method == "tv":
        result = cheeger_tv(domain, tol=cfg.get("tol") or 5e-3)
    else:
        raise ValueError(f"unknown method {method!r}")
    _emit(json.dumps(result.to_json_dict(), indent=2) + "\n", cfg.get("out"))
    return 0


def _cmd_sweep(cfg: dict) -> int:
    if not cfg.get("path") or not cfg.get("p_list"):
        raise ValueError("sweep requires --path and --p-list")
    domain = _build_domain(cfg)
    qpath = _parse_qpath(str(cfg["path"]))
    p_list = [float(tok) for tok in str(cfg["p_list"]).split(",") if tok.strip()]
    records = run_sweep(domain, qpath, p_list, _solve_params(cfg))
    _emit(sweep_csv_text(records), cfg.get("out"))
    if len(records) != len(p_list):
        print(
            f"sweep stopped after {len(records)}/{len(p_list)} points",
            file=sys.stderr,
        )
        return 3
    return 0


def _cmd_verify(cfg: dict) -> int:
    summary = verify_all(
        out_dir=cfg.get("out"),
        n_grid=int(cfg.get("n") or 256),
        n_sweep=int(cfg.get("n_sweep") or 128),
        seed=int(cfg.get("seed") or 0),
        log=lambda line: print(line, file=sys.stderr),
    )
    if not cfg.get("out"):
        sys.stdout.write(json.dumps(summary.to_json_dict(), indent=2) + "\n")
    for line in summary.format_lines():
        print(line, file=sys.stderr)
    return 0 if summary.passed else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        cfg = _merge_config(args)
        handler = {
            "solve": _cmd_solve,
            "cheeger": _cmd_cheeger,
            "sweep": _cmd_sweep,
            "verify": _cmd_verify,
        }[cfg["command"]]
        return handler(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Alias of :func:`main` for programmatic use."""
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
