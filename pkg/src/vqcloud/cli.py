"""Command line entry points: serve, extract-b, train, infer, verify, bench.

Every flag can also come from ``--config FILE`` (JSON, keys spelled like the
flags with dashes or underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .cloud import CloudCore, ServiceConfig
from .cloud.service import CloudServer
from .data import read_csv
from .encoding import AmplitudeEncoder, QubitEncoder
from .errors import ServiceStartupError, VQCloudError
from .protocol import (
    ExtractionOptions,
    HttpEndpoint,
    LocalEndpoint,
    extract_b,
    extract_padded,
    extract_with_decoys,
    pad_dimension,
    reconstruct_probabilities,
)
from .simulator import AnsatzSpec, ObservableRotation, run_state
from .trainer import TrainConfig, TrainedModel, accuracy, infer, init_thetas, train


def fmt(value: float) -> str:
    return f"{value:.12g}"


def _endpoint(spec: str | None):
    if spec in (None, "local"):
        return LocalEndpoint(CloudCore())
    return HttpEndpoint(spec)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ansatz(args, n: int | None = None) -> AnsatzSpec:
    n = args.qubits if n is None else n
    if args.thetas:
        return AnsatzSpec(n, args.reps, args.entanglement, tuple(_floats(args.thetas)))
    return AnsatzSpec(n, args.reps, args.entanglement, tuple(init_thetas(n, args.reps, args.seed)))


# -- subcommands -------------------------------------------------------------

def cmd_serve(args) -> int:
    config = ServiceConfig(max_qubits=args.max_qubits, rng_seed=args.seed, log_path=args.log_path)
    try:
        server = CloudServer(args.host, args.port, config)
    except ServiceStartupError as exc:
        print(json.dumps({"error": "startup", "message": str(exc)}), file=sys.stderr)
        return 1
    print(f"serving on {server.url}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server._httpd.server_close()
    return 0


def cmd_extract(args) -> int:
    endpoint = _endpoint(args.endpoint)
    options = ExtractionOptions(shots=args.shots, reference=args.reference)
    if args.pad_to_qubits is not None:
        plan = pad_dimension(args.dim or (1 << args.qubits), args.pad_to_qubits)
        ansatz = _ansatz(args, plan.n_padded)
        b, report = extract_padded(endpoint, ansatz, plan, options=options)
    elif args.decoys:
        ansatz = _ansatz(args)
        result = extract_with_decoys(endpoint, ansatz, args.decoys, seed=args.seed, d=args.dim, options=options)
        b, report = result.b, result.report
        print(f"parameter_sets {args.decoys + 1}")
    else:
        ansatz = _ansatz(args)
        b, report = extract_b(endpoint, ansatz, d=args.dim, options=options)
    if args.out:
        b.save(args.out, ansatz, report)
    print(f"runs_issued {report.runs_issued}")
    print(f"references_used {' '.join(map(str, report.references_used))}")
    print(f"zero_rows {len(report.zero_rows)}")
    return 0


def cmd_train(args) -> int:
    data = read_csv(args.data)
    encoder = AmplitudeEncoder() if args.encoder == "amplitude" else QubitEncoder(args.qubits)
    template = AnsatzSpec.zeros(args.qubits, args.reps, args.entanglement)
    config = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        cost=args.cost,
        gradient=args.gradient,
        fd_step=args.fd_step,
        shots=args.shots,
        seed=args.seed,
    )
    initial = _floats(args.thetas) if args.thetas else None
    model = train(data, encoder, template, config, _endpoint(args.endpoint), initial_thetas=initial)
    print("epoch cost")
    for epoch, cost in enumerate(model.history):
        print(f"{epoch} {fmt(cost)}")
    print(f"final {fmt(model.final_cost)}")
    print(f"train_accuracy {fmt(accuracy(model, data))}")
    if args.out:
        model.save(args.out)
    return 0


def cmd_infer(args) -> int:
    model = TrainedModel.load(args.model)
    if args.x is not None:
        rows = [np.array(_floats(args.x))]
    else:
        rows = list(read_csv(args.data).features)
    for x in rows:
        cls, g = infer(model, x)
        print(f"class {cls} marginals {' '.join(fmt(v) for v in g)}")
    return 0


def cmd_verify(args) -> int:
    """Protocol reconstruction vs direct simulation on random encoded inputs."""
    rng = np.random.default_rng(args.seed)
    ansatz = _ansatz(args)
    d = args.dim or (1 << ansatz.n)
    b, report = extract_b(_endpoint(args.endpoint), ansatz, d=d, options=ExtractionOptions(shots=args.shots))
    worst = 0.0
    for _ in range(args.samples):
        x = rng.standard_normal(d)
        f = x / np.linalg.norm(x)
        direct = run_state(ansatz, ObservableRotation(), np.pad(f, (0, (1 << ansatz.n) - d))) ** 2
        worst = max(worst, float(np.max(np.abs(reconstruct_probabilities(b, f) - direct))))
    print(f"runs_issued {report.runs_issued}")
    print(f"max_deviation {fmt(worst)}")
    ok = worst <= args.tol
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def bench_rows(dims, samples):
    for d in dims:
        for s in samples:
            yield d, s, s, 2 * d - 1, (d + 1) * d // 2


def cmd_bench(args) -> int:
    print("d s conventional protocol protocol_worst")
    for row in bench_rows(args.dim, args.samples):
        print(" ".join(str(v) for v in row))
    return 0


# -- parser ------------------------------------------------------------------

def _add_ansatz_flags(p, qubits_default=2):
    p.add_argument("--qubits", "-n", type=int, default=qubits_default)
    p.add_argument("--reps", type=int, default=2)
    p.add_argument("--entanglement", choices=("full", "linear"), default="full")
    p.add_argument("--thetas", help="comma-separated angles; random (seeded) if omitted")


def _add_shared(p):
    p.add_argument("--endpoint", default=None, help="service URL, or 'local' for an in-process cloud")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--config", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqcloud", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the quantum cloud service")
    _add_shared(p)
    p.set_defaults(seed=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--max-qubits", type=int, default=12)
    p.add_argument("--log-path", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("extract-b", help="reconstruct B for one parameter set")
    _add_shared(p)
    _add_ansatz_flags(p)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--pad-to-qubits", type=int, default=None)
    p.add_argument("--decoys", type=int, default=0)
    p.add_argument("--reference", default="auto", type=lambda v: v if v == "auto" else int(v))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train on a CSV dataset")
    _add_shared(p)
    _add_ansatz_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--encoder", choices=("amplitude", "qubit"), default="amplitude")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--cost", choices=("mse", "ce"), default="mse")
    p.add_argument("--gradient", choices=("parameter-shift", "cost-shift", "finite-difference"), default="parameter-shift")
    p.add_argument("--fd-step", type=float, default=1e-4)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="classify with a saved model, classically")
    _add_shared(p)
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--x", help="comma-separated feature vector")
    group.add_argument("--data", help="CSV of samples")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("verify", help="compare protocol reconstruction with direct simulation")
    _add_shared(p)
    _add_ansatz_flags(p, qubits_default=3)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="circuit-run counts: protocol vs per-sample execution")
    _add_shared(p)
    p.add_argument("--dim", type=int, nargs="+", default=[784])
    p.add_argument("--samples", type=int, nargs="+", default=[50000])
    p.set_defaults(func=cmd_bench)
    return parser


def _apply_config(parser, argv):
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        config = json.load(fh)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        dest = key.replace("-", "_")
        if dest not in known:
            parser.error(f"unknown config key {key!r} for {args.command}")
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (VQCloudError, OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
