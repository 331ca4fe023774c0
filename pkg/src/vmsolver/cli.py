"""Command-line surface.

Subcommands:
    recommend   rank instances for a workload and print a table or JSON
    predict     phase timings and TPS for one instance
    calibrate   fit corrections from a profiling CSV into a store
    report      sweep the SLO target and write frontier.csv + frontier.png
    serve       run the HTTP service

Exit codes: 0 success (recommend found a winner), 2 no feasible instance,
1 input or usage errors. Human tables round to two decimals; JSON output
carries full precision and is byte-stable for identical flags.

The default catalog and calibration store can be overridden with the
VMSOLVER_CATALOG and VMSOLVER_CALIBRATION environment variables.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .calibration import DEFAULT_CALIBRATION, CalibrationStore
from .catalog import DEFAULT_CATALOG, load_catalog
from .errors import VmsolverError
from .model_registry import WorkloadSpec, lookup_model, memory_footprint
from .perf_model import predict as predict_perf
from .planner import (
    PlannerOptions,
    Policy,
    Recommendation,
    explain,
    prediction_to_document,
    recommend,
    to_document,
)
from .report import sweep_frontier, write_frontier_report
from .suitability import evaluate_instance

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NO_FEASIBLE = 2

_FLAG_NAMES = {
    "batch_size": "--batch",
    "l_in": "--input-tokens",
    "l_out": "--output-tokens",
    "total_requests": "--requests",
    "slo_tps": "--slo-tps",
    "p_max": "--max-price",
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for
    no-feasible-instance, so usage errors exit 1 instead."""

    def error(self, message):  # noqa: A002 - argparse API
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _flagize(message: str) -> str:
    for fname, flag in _FLAG_NAMES.items():
        message = message.replace(fname, flag)
    return message


def _env_default(var: str, fallback: str) -> str:
    return os.environ.get(var, fallback)


def _add_workload_flags(parser: argparse.ArgumentParser, *, require_slo: bool) -> None:
    parser.add_argument("--model", required=True, help="registry name or model JSON path")
    parser.add_argument("--batch", type=int, required=True, help="batch size")
    parser.add_argument("--input-tokens", type=int, required=True)
    parser.add_argument("--output-tokens", type=int, required=True)
    parser.add_argument(
        "--requests",
        type=int,
        default=None,
        help="total requests in the job (default: one batch)",
    )
    parser.add_argument("--slo-tps", type=float, required=require_slo, default=1.0)
    parser.add_argument("--max-price", type=float, required=require_slo, default=None)


def _add_source_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--catalog",
        default=_env_default("VMSOLVER_CATALOG", DEFAULT_CATALOG),
        help="catalog file or bundled fixture id",
    )
    parser.add_argument(
        "--calibration",
        default=_env_default("VMSOLVER_CALIBRATION", DEFAULT_CALIBRATION),
        help="calibration store file or bundled fixture id",
    )


def _workload(args, *, p_max_fallback: float | None = None) -> WorkloadSpec:
    requests = args.requests if args.requests is not None else args.batch
    p_max = args.max_price if args.max_price is not None else p_max_fallback
    return WorkloadSpec(
        batch_size=args.batch,
        l_in=args.input_tokens,
        l_out=args.output_tokens,
        total_requests=requests,
        slo_tps=args.slo_tps,
        p_max=p_max,
    )


def _parse_overrides(pairs: list[str]) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise ValueError(f"--force-c-off expects NAME=FRACTION, got '{pair}'")
        overrides[name] = float(value)
    return overrides


def _pct(fraction: float) -> str:
    return f"{100.0 * fraction:.2f}%"


def _render_table(rec: Recommendation) -> str:
    lines = []
    wl = rec.workload
    lines.append(
        f"model={rec.model.name}  batch={wl.batch_size}  tokens={wl.l_in}/{wl.l_out}  "
        f"requests={wl.total_requests}  slo={wl.slo_tps:g} TPS  cap=${wl.p_max:g}/h  "
        f"policy={rec.options.policy.value}"
    )
    lines.append(f"catalog={rec.catalog_source}  calibration={rec.calibration_source}")
    lines.append("")
    if rec.winner is None:
        lines.append(f"no feasible instance: {rec.no_feasible_cause}")
    else:
        header = (
            f"{'#':>2} {'instance':<14} {'$/h':>7} {'verdict':<16} {'C_off':>8} "
            f"{'TPS':>10} {'CE tok/$':>12} {'billed $':>9}  flags"
        )
        lines.append(header)
        lines.append("-" * len(header))
        for i, rc in enumerate(rec.ranking, start=1):
            flags = []
            if rc.uncalibrated:
                flags.append("uncalibrated")
            if rc.c_off_forced:
                flags.append("forced-c-off")
            lines.append(
                f"{i:>2} {rc.name:<14} {rc.candidate.instance.price_per_hour:>7.2f} "
                f"{rc.candidate.verdict.value:<16} {_pct(rc.candidate.c_off):>8} "
                f"{rc.prediction.tps:>10.2f} {rc.cost.cost_efficiency:>12.2f} "
                f"{rc.cost.billed_cost:>9.2f}  {','.join(flags)}"
            )
        lines.append("")
        lines.append(f"winner: {rec.winner.name}")
    if rec.rejected:
        lines.append("")
        lines.append("rejected:")
        for name, reason in rec.rejected:
            lines.append(f"  {name:<14} {reason}")
    return "\n".join(lines)


def _render_explain(doc: dict) -> str:
    lines = [f"instance: {doc['instance']} ({doc['gpu_type']})"]
    lines.append(f"  price: ${doc['price_per_hour_usd']}/h  gpu_memory: {doc['gpu_memory_gb']:g} GB")
    lines.append(f"  verdict: {doc['verdict']}  c_off: {_pct(doc['c_off'])}")
    lines.append(f"  status: {doc['status']}")
    if doc["failed_predicate"]:
        lines.append(f"  failed predicate: {doc['failed_predicate']}")
    mem = doc["memory"]
    lines.append(
        "  memory (GB): model={:.3f} activation={:.3f} kv={:.3f} kv/layer={:.3f} "
        "total={:.3f} available={:.3f}".format(
            mem["model_bytes"] / 1e9,
            mem["activation_bytes"] / 1e9,
            mem["kv_cache_bytes"] / 1e9,
            mem["kv_cache_per_layer_bytes"] / 1e9,
            mem["total_bytes"] / 1e9,
            mem["available_bytes"] / 1e9,
        )
    )
    if doc["timing"]:
        t = doc["timing"]
        lines.append(
            f"  prefill layer: {t['prefill']['layer_time_s']:.6f}s  "
            f"decode layer: {t['decode']['layer_time_s']:.6f}s  "
            f"t_task: {t['t_task_s']:.3f}s"
        )
    if doc["tps"] is not None:
        lines.append(f"  predicted TPS: {doc['tps']:.2f}")
    if doc["cost"]:
        lines.append(
            f"  billed: {doc['cost']['billed_hours']} h -> ${doc['cost']['billed_cost_usd']:.2f}  "
            f"CE: {doc['cost']['cost_efficiency_tokens_per_usd']:.2f} tokens/$"
        )
    return "\n".join(lines)


def cmd_recommend(args) -> int:
    workload = _workload(args)
    model = lookup_model(args.model)
    catalog = load_catalog(args.catalog)
    store = CalibrationStore.load(args.calibration)
    options = PlannerOptions(
        policy=Policy(args.policy),
        disable_offloading=args.no_offload,
        only_calibrated=args.only_calibrated,
        c_off_overrides=_parse_overrides(args.force_c_off),
    )
    rec = recommend(model, workload, catalog, store, options)

    if args.explain:
        doc = explain(rec, args.explain)
        if args.format == "json":
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            print(_render_explain(doc))
        return EXIT_OK if rec.winner else EXIT_NO_FEASIBLE

    if args.format == "json":
        print(json.dumps(to_document(rec), indent=2, sort_keys=True))
    else:
        print(_render_table(rec))
    return EXIT_OK if rec.winner else EXIT_NO_FEASIBLE


def cmd_predict(args) -> int:
    workload = _workload(args, p_max_fallback=float("inf"))
    model = lookup_model(args.model)
    catalog = load_catalog(args.catalog)
    instance = catalog.get(args.instance)
    store = CalibrationStore.load(args.calibration)

    if args.c_off is not None:
        c_off = args.c_off
    else:
        candidate = evaluate_instance(instance, memory_footprint(model, workload))
        if not candidate.feasible:
            print(f"error: {args.instance} is unsuitable: {candidate.reason}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        c_off = candidate.c_off

    params, uncalibrated = store.params_for(instance.name)
    prediction = predict_perf(model, workload, instance, c_off, params)
    doc = prediction_to_document(
        model, instance, workload, c_off, prediction, uncalibrated, store.source
    )
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_OK

    flag = "uncalibrated (identity correction)" if uncalibrated else "calibrated"
    print(f"{instance.name}  model={model.name}  c_off={_pct(c_off)}  [{flag}]")
    print(
        f"  prefill/layer: compute={prediction.prefill.compute_s:.6f}s "
        f"calibrated={prediction.prefill.compute_calibrated_s:.6f}s "
        f"transfer={prediction.prefill.transfer_s:.6f}s -> {prediction.prefill.layer_time_s:.6f}s"
    )
    print(
        f"  decode/layer:  compute={prediction.decode.compute_s:.6f}s "
        f"calibrated={prediction.decode.compute_calibrated_s:.6f}s "
        f"transfer={prediction.decode.transfer_s:.6f}s -> {prediction.decode.layer_time_s:.6f}s"
    )
    print(f"  t_task: {prediction.t_task_s:.4f}s   TPS: {prediction.tps:.2f}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    store_path = Path(args.store)
    if store_path.exists():
        store = CalibrationStore.load(store_path)
    else:
        store = CalibrationStore(source=str(store_path))

    known = None
    if args.catalog:
        known = load_catalog(args.catalog).names()
    fitted = store.ingest_profile(args.profile, known_instances=known)

    if not fitted:
        print("0 groups fitted")
        return EXIT_OK

    store.save(store_path)
    header = f"{'instance':<16} {'phase':<8} {'alpha':>12} {'beta':>12} {'avg err %':>10} {'n':>4}"
    print(header)
    print("-" * len(header))
    for instance, phase, result in fitted:
        print(
            f"{instance:<16} {phase:<8} {result.alpha:>12.6f} {result.beta:>12.6f} "
            f"{100.0 * result.avg_error_rate:>10.2f} {result.sample_count:>4}"
        )
    print(f"{len(fitted)} groups fitted -> {store_path}")
    return EXIT_OK


def cmd_report(args) -> int:
    workload = _workload(args)
    model = lookup_model(args.model)
    catalog = load_catalog(args.catalog)
    store = CalibrationStore.load(args.calibration)
    options = PlannerOptions(
        policy=Policy(args.policy),
        disable_offloading=args.no_offload,
        only_calibrated=args.only_calibrated,
        c_off_overrides=_parse_overrides(args.force_c_off),
    )

    if args.slo:
        slos = [float(s) for s in args.slo]
    else:
        start, stop, step = (float(x) for x in args.slo_sweep.split(":"))
        if step <= 0 or stop < start:
            raise ValueError("--slo-sweep expects MIN:MAX:STEP with STEP > 0")
        slos, value = [], start
        while value <= stop + 1e-9:
            slos.append(value)
            value += step

    points = sweep_frontier(model, workload, catalog, store, slos, options)
    csv_path, png_path = write_frontier_report(points, args.out_dir)
    feasible = sum(1 for p in points if p.winner)
    print(f"swept {len(points)} SLO points ({feasible} feasible)")
    for p in points:
        if p.winner:
            print(
                f"  slo={p.slo_tps:>8g}  winner={p.winner:<14} "
                f"tps={p.predicted_tps:>9.2f}  billed=${p.billed_cost:.2f}"
            )
        else:
            print(f"  slo={p.slo_tps:>8g}  (infeasible: {p.cause})")
    print(f"wrote {csv_path}")
    print(f"wrote {png_path}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .api_service import create_app

    addr = args.addr or os.environ.get("VMSOLVER_ADDR", "127.0.0.1:8176")
    host, _, port = addr.rpartition(":")
    app = create_app(catalog_source=args.catalog, calibration_source=args.calibration)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vmsolver", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_rec = sub.add_parser("recommend", help="rank instances for a workload")
    _add_workload_flags(p_rec, require_slo=True)
    _add_source_flags(p_rec)
    p_rec.add_argument("--no-offload", action="store_true", help="drop candidates needing offload")
    p_rec.add_argument("--policy", choices=[p.value for p in Policy], default=Policy.INFERSAVE.value)
    p_rec.add_argument("--format", choices=["table", "json"], default="table")
    p_rec.add_argument("--only-calibrated", action="store_true",
                       help="rank only instances with calibration entries")
    p_rec.add_argument("--force-c-off", action="append", default=[], metavar="NAME=FRACTION",
                       help="pin an instance's offload ratio (repeatable)")
    p_rec.add_argument("--explain", metavar="INSTANCE",
                       help="print the assessment of one instance instead of the ranking")
    p_rec.set_defaults(func=cmd_recommend)

    p_pred = sub.add_parser("predict", help="phase timings and TPS for one instance")
    _add_workload_flags(p_pred, require_slo=False)
    _add_source_flags(p_pred)
    p_pred.add_argument("--instance", required=True)
    p_pred.add_argument("--c-off", type=float, default=None,
                        help="offload ratio; computed from memory fit when omitted")
    p_pred.add_argument("--format", choices=["table", "json"], default="table")
    p_pred.set_defaults(func=cmd_predict)

    p_cal = sub.add_parser("calibrate", help="fit corrections from a profiling CSV")
    p_cal.add_argument("--profile", required=True, help="profiling CSV path")
    p_cal.add_argument("--store", required=True, help="calibration store JSON to update")
    p_cal.add_argument("--catalog", default=None,
                       help="optional catalog to warn about unknown instances")
    p_cal.set_defaults(func=cmd_calibrate)

    p_rep = sub.add_parser("report", help="SLO sweep with CSV + figure output")
    _add_workload_flags(p_rep, require_slo=True)
    _add_source_flags(p_rep)
    p_rep.add_argument("--slo-sweep", default=None, metavar="MIN:MAX:STEP")
    p_rep.add_argument("--slo", action="append", default=[],
                       help="explicit SLO point (repeatable, overrides --slo-sweep)")
    p_rep.add_argument("--out-dir", required=True)
    p_rep.add_argument("--no-offload", action="store_true")
    p_rep.add_argument("--policy", choices=[p.value for p in Policy], default=Policy.INFERSAVE.value)
    p_rep.add_argument("--only-calibrated", action="store_true")
    p_rep.add_argument("--force-c-off", action="append", default=[], metavar="NAME=FRACTION")
    p_rep.set_defaults(func=cmd_report)

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--addr", default=None, help="HOST:PORT (default VMSOLVER_ADDR or 127.0.0.1:8176)")
    _add_source_flags(p_srv)
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "report" and not args.slo and not args.slo_sweep:
        parser.error("report requires --slo-sweep or at least one --slo")
    try:
        return args.func(args)
    except (VmsolverError, ValueError) as exc:
        print(f"error: {_flagize(str(exc))}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
