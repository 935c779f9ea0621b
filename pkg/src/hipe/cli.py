"""Command-line entry point: generate saliency maps, evaluate them, and
benchmark methods against each other.

Subcommands: map, eval, bench, render. Option precedence is flags over a
JSON config file (--config) over built-in defaults. HIPE_LOG selects log
verbosity (error, info, debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import statistics
import sys
import time
from contextlib import ExitStack, closing, nullcontext
from pathlib import Path

from .arrays import ImageTensor, ScalarField2D
from .baselines import OcclusionConfig, RiseConfig, occlusion, rise
from .engine import HiPeConfig, ThresholdMode, hipe
from .errors import ProtocolError
from .hfa import load_array, save_array
from .imaging import load_image, render_heatmap
from .metrics import (
    deletion_curve,
    efficiency_report,
    format_efficiency_table,
    insertion_curve,
    pointing_game,
)
from .oracles import MultiClassProxy, OraclePool, WeightedSumProxy, open_external
from .substrates import parse_substrate

log = logging.getLogger("hipe")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PROTOCOL = 3

DEFAULTS = {
    "method": "hipe",
    "substrate": "local-mean",
    "threshold": "mid-range",
    "signed": False,
    "batch_size": 32,
    "n_masks": 8000,
    "grid": 7,
    "keep_prob": 0.5,
    "seed": 0,
    "kernel": 32,
    "stride": 16,
    "target": 0,
    "timeout": 30.0,
    "oracle_workers": 1,
    "step_frac": 0.01,
    "blur_sigma": 10.0,
    "tolerance": 0,
    "repeats": 1,
}


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _setting(ns: argparse.Namespace, config: dict, name: str):
    value = getattr(ns, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return DEFAULTS.get(name)


def _load_config(ns: argparse.Namespace) -> dict:
    path = getattr(ns, "config", None)
    if path is None:
        return {}
    with open(path) as fh:
        loaded = json.load(fh)
    if not isinstance(loaded, dict):
        raise ValueError(f"config {path} must hold a JSON object")
    return loaded


def _load_input(path: str) -> ImageTensor:
    if path.endswith(".hfa"):
        arr = load_array(path)
        if isinstance(arr, ScalarField2D):
            return ImageTensor(arr.values[None, :, :])
        return arr
    return load_image(path)


def _make_oracle(spec: str, x: ImageTensor, target: int, timeout: float, workers: int = 1):
    if spec == "proxy:sum":
        return WeightedSumProxy.uniform(x.height, x.width)
    if spec.startswith("proxy:weighted:"):
        weights = load_array(spec[len("proxy:weighted:") :])
        if not isinstance(weights, ScalarField2D):
            raise ValueError("weighted proxy needs a rank-2 HFA weights file")
        return WeightedSumProxy(weights)
    if spec.startswith("proxy:multi:"):
        stack = load_array(spec[len("proxy:multi:") :])
        if not isinstance(stack, ImageTensor):
            raise ValueError("multi-class proxy needs a rank-3 HFA stack, one slice per class")
        fields = [ScalarField2D(stack.values[k]) for k in range(stack.channels)]
        return MultiClassProxy(fields, target=target)
    if spec.startswith(("exec:", "tcp:")):
        if workers > 1:
            oracle = OraclePool([open_external(spec, timeout=timeout) for _ in range(workers)])
        else:
            oracle = open_external(spec, timeout=timeout)
        if target:
            oracle.set_target(target)
        return oracle
    raise ValueError(f"unknown oracle spec {spec!r}")


def _closing(oracle):
    return closing(oracle) if hasattr(oracle, "close") else nullcontext(oracle)


def _oracle_from(ns: argparse.Namespace, config: dict, x: ImageTensor):
    return _make_oracle(
        ns.oracle,
        x,
        int(_setting(ns, config, "target")),
        float(_setting(ns, config, "timeout")),
        int(_setting(ns, config, "oracle_workers")),
    )


def _run_method(method: str, x: ImageTensor, oracle, ns, config: dict):
    """Returns (saliency map, oracle calls consumed, per-level records or None,
    wall milliseconds). Wall time spans scoring and accumulation only."""
    calls_before = oracle.call_count
    levels = None
    started = time.perf_counter()
    if method == "hipe":
        cfg = HiPeConfig(
            substrate=parse_substrate(_setting(ns, config, "substrate")),
            threshold_mode=ThresholdMode(_setting(ns, config, "threshold")),
            signed_mode=bool(_setting(ns, config, "signed")),
            batch_size=int(_setting(ns, config, "batch_size")),
        )
        run = hipe(x, oracle, cfg)
        saliency = run.saliency
        levels = [
            {
                "d": rec.d,
                "masks_enumerated": rec.masks_enumerated,
                "masks_passed": rec.masks_passed,
                "calls": rec.calls,
            }
            for rec in run.levels
        ]
    elif method == "rise":
        cfg = RiseConfig(
            n_masks=int(_setting(ns, config, "n_masks")),
            grid=int(_setting(ns, config, "grid")),
            keep_prob=float(_setting(ns, config, "keep_prob")),
            seed=int(_setting(ns, config, "seed")),
        )
        saliency, _ = rise(x, oracle, cfg)
    elif method == "occlusion":
        cfg = OcclusionConfig(
            kernel=int(_setting(ns, config, "kernel")),
            stride=int(_setting(ns, config, "stride")),
            substrate=parse_substrate(_setting(ns, config, "substrate")),
        )
        saliency, _ = occlusion(x, oracle, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    wall_ms = (time.perf_counter() - started) * 1000.0
    return saliency, oracle.call_count - calls_before, levels, wall_ms


def cmd_map(ns: argparse.Namespace) -> int:
    config = _load_config(ns)
    x = _load_input(ns.input)
    method = _setting(ns, config, "method")
    with _closing(_oracle_from(ns, config, x)) as oracle:
        saliency, calls, levels, wall_ms = _run_method(method, x, oracle, ns, config)

    if ns.out_map:
        save_array(saliency, ns.out_map)
    if ns.out_heatmap:
        render_heatmap(saliency, ns.out_heatmap, overlay=x)
    report = {"method": method, "oracle_calls": calls, "wall_time_ms": wall_ms}
    if levels is not None:
        report["levels"] = levels
    if ns.out_report:
        Path(ns.out_report).write_text(json.dumps(report, indent=2))
    print(json.dumps(report))
    return EXIT_OK


def cmd_eval(ns: argparse.Namespace) -> int:
    config = _load_config(ns)
    x = _load_input(ns.input)
    saliency = load_array(ns.map)
    if not isinstance(saliency, ScalarField2D):
        raise ValueError("saliency map must be a rank-2 HFA file")

    if ns.which == "pointing":
        if not ns.region:
            raise ValueError("pointing needs --region with a binary HFA mask")
        region = load_array(ns.region)
        if not isinstance(region, ScalarField2D):
            raise ValueError("region must be a rank-2 HFA file")
        hit = pointing_game(saliency, region, int(_setting(ns, config, "tolerance")))
        result = {"metric": "pointing", "hit": hit}
    else:
        step_frac = float(_setting(ns, config, "step_frac"))
        with _closing(_oracle_from(ns, config, x)) as oracle:
            if ns.which == "deletion":
                curve = deletion_curve(x, saliency, oracle, step_frac)
            else:
                curve = insertion_curve(
                    x, saliency, oracle, step_frac, float(_setting(ns, config, "blur_sigma"))
                )
        if ns.out_csv:
            curve.write_csv(ns.out_csv)
        result = {
            "metric": ns.which,
            "auc": curve.auc,
            "auc_normalized": curve.normalized().auc,
        }

    if ns.out_json:
        Path(ns.out_json).write_text(json.dumps(result, indent=2))
    print(json.dumps(result))
    return EXIT_OK


def cmd_bench(ns: argparse.Namespace) -> int:
    config = _load_config(ns)
    x = _load_input(ns.input)
    methods = [m.strip() for m in ns.methods.split(",") if m.strip()]
    if not methods:
        raise ValueError("--methods must name at least one method")
    unknown = [m for m in methods if m not in ("hipe", "rise", "occlusion")]
    if unknown:
        raise ValueError(f"unknown methods: {', '.join(unknown)}")
    repeats = int(_setting(ns, config, "repeats"))
    step_frac = float(_setting(ns, config, "step_frac"))

    rows = []
    failed = False
    for method in methods:
        try:
            with ExitStack() as stack:
                oracle = stack.enter_context(_closing(_oracle_from(ns, config, x)))
                times = []
                for _ in range(max(1, repeats)):
                    saliency, calls, _, wall_ms = _run_method(method, x, oracle, ns, config)
                    times.append(wall_ms)
                ins = insertion_curve(
                    x, saliency, oracle, step_frac, float(_setting(ns, config, "blur_sigma"))
                )
                dele = deletion_curve(x, saliency, oracle, step_frac)
            rows.append(
                {
                    "method": method,
                    "calls": calls,
                    "wall_time_ms_median": statistics.median(times),
                    "insertion_auc": ins.normalized().auc,
                    "deletion_auc": dele.normalized().auc,
                    "ok": True,
                }
            )
        except Exception as exc:  # keep benching the other methods
            log.warning("method %s failed: %s", method, exc)
            rows.append({"method": method, "ok": False, "error": str(exc)})
            failed = True

    good = [(r["method"], r["calls"], r["wall_time_ms_median"] / 1000.0) for r in rows if r["ok"]]
    if good:
        print(format_efficiency_table(efficiency_report(good)))
    report = {"rows": rows}
    if ns.out_json:
        Path(ns.out_json).write_text(json.dumps(report, indent=2))
    print(json.dumps(report))
    return 1 if failed else EXIT_OK


def cmd_render(ns: argparse.Namespace) -> int:
    saliency = load_array(ns.map)
    if not isinstance(saliency, ScalarField2D):
        raise ValueError("render expects a rank-2 HFA map")
    overlay = _load_input(ns.overlay) if ns.overlay else None
    render_heatmap(saliency, ns.out, overlay=overlay)
    print(json.dumps({"rendered": str(ns.out)}))
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--target", type=int, help="class index for multi-class oracles")
    parser.add_argument("--timeout", type=float, help="external oracle timeout, seconds")
    parser.add_argument(
        "--oracle-workers",
        type=int,
        dest="oracle_workers",
        help="parallel connections for external oracles (proxies ignore this)",
    )


def _add_method_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--substrate", help="local-mean | zero | blur:<sigma> | noise:<seed>:<amp>")
    parser.add_argument("--threshold", choices=["mid-range", "mean"])
    parser.add_argument("--signed", action="store_true", default=None)
    parser.add_argument("--batch-size", type=int, dest="batch_size")
    parser.add_argument("--n-masks", type=int, dest="n_masks")
    parser.add_argument("--grid", type=int)
    parser.add_argument("--keep-prob", type=float, dest="keep_prob")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--kernel", type=int)
    parser.add_argument("--stride", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hipe",
        description="Saliency maps for black-box scoring models, plus causal evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="generate a saliency map")
    p_map.add_argument("--method", choices=["hipe", "rise", "occlusion"])
    p_map.add_argument("--input", required=True, help="PNG image or rank-3 HFA tensor")
    p_map.add_argument("--oracle", required=True, help="proxy:..., exec:<cmd> or tcp:<host:port>")
    p_map.add_argument("--out-map", dest="out_map", help="HFA output path")
    p_map.add_argument("--out-heatmap", dest="out_heatmap", help="PNG heatmap path")
    p_map.add_argument("--out-report", dest="out_report", help="JSON report path")
    _add_method_params(p_map)
    _add_common(p_map)
    p_map.set_defaults(func=cmd_map)

    p_eval = sub.add_parser("eval", help="evaluate a saliency map")
    p_eval.add_argument("--which", required=True, choices=["insertion", "deletion", "pointing"])
    p_eval.add_argument("--map", required=True, help="rank-2 HFA saliency map")
    p_eval.add_argument("--input", required=True)
    p_eval.add_argument("--oracle", default="proxy:sum")
    p_eval.add_argument("--region", help="binary rank-2 HFA mask (pointing)")
    p_eval.add_argument("--tolerance", type=int, help="pointing dilation, pixels")
    p_eval.add_argument("--step-frac", type=float, dest="step_frac")
    p_eval.add_argument("--blur-sigma", type=float, dest="blur_sigma")
    p_eval.add_argument("--out-csv", dest="out_csv")
    p_eval.add_argument("--out-json", dest="out_json")
    _add_common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_bench = sub.add_parser("bench", help="compare methods on one input")
    p_bench.add_argument("--input", required=True)
    p_bench.add_argument("--oracle", required=True)
    p_bench.add_argument("--methods", required=True, help="comma-separated method names")
    p_bench.add_argument("--repeats", type=int)
    p_bench.add_argument("--step-frac", type=float, dest="step_frac")
    p_bench.add_argument("--blur-sigma", type=float, dest="blur_sigma")
    p_bench.add_argument("--out-json", dest="out_json")
    _add_method_params(p_bench)
    _add_common(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_render = sub.add_parser("render", help="render an HFA map as a PNG heatmap")
    p_render.add_argument("--map", required=True)
    p_render.add_argument("--out", required=True)
    p_render.add_argument("--overlay", help="PNG or HFA tensor to blend under the heatmap")
    p_render.set_defaults(func=cmd_render)

    return parser


def _configure_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("HIPE_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except ProtocolError as exc:
        return _fail(str(exc), EXIT_PROTOCOL)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
