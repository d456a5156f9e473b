"""
Batch command line for the extraction module.

Every command builds an {"operation", "parameters"} request for the unified
tool and serializes its output. Exit codes: 0 success, 1 input or solver
error, 2 a verification or acceptance check failed.
"""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any

from .core.serialize import SWEEP_COLUMNS, samples_csv, to_csv, to_json
from .exceptions import ExtractionError
from .manager import ExtractionManager
from .unified_tool import ExtractionUnifiedTool

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED_CHECK = 2

SAMPLE_COMMANDS = {"simulate", "stopping"}


def _csv_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="Parameter JSON file")
    common.add_argument("--out", help="Output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="Output format")
    common.add_argument("--seed", type=int, help="Master seed (unsigned 64-bit)")
    common.add_argument("--workers", type=int, help="Worker processes for simulations and sweeps")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help="Log level for messages on stderr",
    )

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--paths", type=int, help="Number of Monte Carlo paths")
    sim.add_argument("--dt", type=float, help="Time step (default: 1e-3/rho)")
    sim.add_argument("--horizon", type=float, help="Horizon T (default: -ln(1e-9)/rho)")
    sim.add_argument("--bridge-max", action="store_true", default=None, help="Exact bridge maximum between grid points")
    sim.add_argument("--dump-paths", help="Write per-path samples to this CSV file")

    parser = argparse.ArgumentParser(
        prog="extraction",
        description="Optimal extraction under jump-diffusion prices with price impact",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("solve", parents=[common], help="Optimal barrier, coefficients and identity ledger")

    cof = sub.add_parser("cofactors", parents=[common], help="Cofactor identities on random instances")
    cof.add_argument("--instances", type=int, default=100)
    cof.add_argument("--max-n", type=int, default=6)
    cof.add_argument("--tolerance", type=float, default=1e-9)

    val = sub.add_parser("value", parents=[common], help="Value function at state points")
    val.add_argument("--solution", help="Solution JSON written by the solve command")
    val.add_argument("--points", required=True, help="JSON file of [[x, y], ...] or inline x:y,x:y")
    val.add_argument("--high-precision", action="store_true", help="Add a 50-digit re-evaluation")
    val.add_argument("--growth", action="store_true", help="Check the growth bound over the points")
    val.add_argument("--alphas", type=_csv_floats, help="Price impacts for the alpha limits, a,b,c")

    ver = sub.add_parser("verify", parents=[common], help="HJB inequality suite")
    ver.add_argument("--solution", help="Solution JSON written by the solve command")
    ver.add_argument("--y-values", type=_csv_floats, help="Inventories for the value sections, a,b,c")
    ver.add_argument("--span", type=float)
    ver.add_argument("--levels", type=int)

    simulate = sub.add_parser("simulate", parents=[common, sim], help="Monte Carlo profit of a barrier strategy")
    simulate.add_argument("--x0", type=float, required=True)
    simulate.add_argument("--y0", type=float, required=True)
    simulate.add_argument("--b", type=float, help="Barrier (default: b*)")
    simulate.add_argument("--barriers", type=_csv_floats, help="Barriers compared with b*, a,b,c")
    simulate.add_argument("--moments-at", type=float, help="Check price moments at this time")

    stopping = sub.add_parser("stopping", parents=[common, sim], help="Monte Carlo stopping payoff")
    stopping.add_argument("--x0", type=float, required=True)

    sweep = sub.add_parser("sweep", parents=[common], help="Comparative statics along a grid")
    sweep.add_argument("--param", required=True, help="mu, sigma, lambda_n, lambda_p or alpha")
    sweep.add_argument("--grid", type=_csv_floats, help="Strictly increasing grid, a,b,c")
    sweep.add_argument("--probes", help="JSON file of [[x, y], ...] or inline x:y,x:y")
    sweep.add_argument("--kinds", help="Comma-separated subset of bstar,value,roots")
    sweep.add_argument("--random-bases", type=int, help="Sweep this many random base parameter sets")
    sweep.add_argument("--m-max", type=int, help="Most mixture components per side for random bases")

    return parser


def _points_arg(value: str | None) -> Any:
    if value is None:
        return None
    path = Path(value)
    if path.is_file():
        return json.loads(path.read_text())
    return value


def build_request(args: argparse.Namespace) -> dict[str, Any]:
    """Translate parsed arguments into a unified-tool request."""
    command = args.command
    parameters: dict[str, Any] = {"params": args.params}

    if command == "solve":
        pass
    elif command == "cofactors":
        parameters = {
            "instances": args.instances,
            "max_n": args.max_n,
            "tolerance": args.tolerance,
            "seed": args.seed,
        }
    elif command == "value":
        parameters.update({
            "solution": args.solution,
            "points": _points_arg(args.points),
            "high_precision": args.high_precision,
            "growth": args.growth,
            "alphas": args.alphas,
        })
    elif command == "verify":
        parameters.update({
            "solution": args.solution,
            "y_values": args.y_values,
            "span": args.span,
            "levels": args.levels,
        })
    elif command in SAMPLE_COMMANDS:
        parameters.update({
            "x0": args.x0,
            "paths": args.paths,
            "dt": args.dt,
            "horizon": args.horizon,
            "seed": args.seed,
            "bridge_max": args.bridge_max,
            "keep_samples": bool(args.dump_paths),
        })
        if command == "simulate":
            parameters.update({
                "y0": args.y0,
                "b": args.b,
                "barriers": args.barriers,
                "moments_at": args.moments_at,
            })
    elif command == "sweep":
        parameters.update({
            "parameter": args.param,
            "grid": args.grid,
            "probes": _points_arg(args.probes),
            "kinds": args.kinds.split(",") if args.kinds else None,
            "random_bases": args.random_bases,
            "m_max": args.m_max,
            "seed": args.seed,
        })

    return {
        "operation": command,
        "parameters": {k: v for k, v in parameters.items() if v is not None},
    }


def manager_config(args: argparse.Namespace) -> dict[str, Any]:
    config: dict[str, Any] = {}
    if args.seed is not None:
        config["seed"] = args.seed
    if args.workers is not None:
        config["max_workers"] = args.workers
    return config


def _error_payload(error: dict[str, Any]) -> dict[str, Any]:
    code = error.get("code", "UNEXPECTED_ERROR")
    kind = error.get("kind") or ("Validation" if code == "MISSING_PARAMETER" else "Unexpected")
    return {"error": {"kind": kind, "message": error.get("message", ""), "code": code}}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _render(output: dict[str, Any], args: argparse.Namespace) -> str:
    if args.format == "csv":
        columns = SWEEP_COLUMNS if args.command == "sweep" else None
        return to_csv(output.get("rows", []), columns)
    return to_json({k: v for k, v in output.items() if k != "rows"})


async def run(args: argparse.Namespace) -> int:
    if args.command not in ("cofactors", "sweep", "value", "verify") and not args.params:
        _emit(to_json(_error_payload({"message": "--params is required", "code": "MISSING_PARAMETER"})), None)
        return EXIT_ERROR

    manager = ExtractionManager(manager_config(args))
    await manager.start()
    try:
        tool = ExtractionUnifiedTool(manager)
        result = await tool.execute(build_request(args))
    finally:
        await manager.stop()

    if not result.success:
        _emit(to_json(_error_payload(result.error)), None)
        return EXIT_ERROR

    output = dict(result.output)
    samples = output.pop("samples", None)
    if getattr(args, "dump_paths", None) and samples is not None:
        Path(args.dump_paths).write_text(samples_csv(samples))
    _emit(_render(output, args), args.out)
    return EXIT_OK if output.get("passed", True) else EXIT_FAILED_CHECK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return asyncio.run(run(args))
    except ExtractionError as e:
        _emit(to_json(_error_payload(e.to_dict())), None)
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"extraction {args.command} failed: {e}")
        _emit(to_json(_error_payload({"message": str(e), "code": "UNEXPECTED_ERROR"})), None)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
