"""
Command line entry point: ``srm-benchmark generate|train|eval|bench|project``.

Exit codes: 0 ok, 1 runtime error, 2 usage error, 3 diverged training, 4 infeasible instance.
"""
import argparse
import logging
import sys

import numpy as np
import pandas as pd

from srm_benchmark.baselines.penalty import MODES, search_penalty_weight, train_penalty_net
from srm_benchmark.config import (LocalOptConfig, PenaltyConfig, ScenarioConfig, TrainConfig, build, read_config,
                                  worker_count)
from srm_benchmark.errors import DivergedError, InfeasibleInstanceError, InvalidArgumentError, SRMError
from srm_benchmark.harness.bench import bench, write_bench
from srm_benchmark.harness.evaluate import evaluate, write_report, write_samples
from srm_benchmark.harness.methods import resolve_method
from srm_benchmark.harness.project import dump, load_instance, parse_vector
from srm_benchmark.scenarios.dataset import generate_dataset, load_dataset, save_dataset
from srm_benchmark.srnet.checkpoint import save_model
from srm_benchmark.srnet.model import VARIANTS, init_model
from srm_benchmark.srnet.train import train

logger = logging.getLogger("srm_benchmark")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_DIVERGED, EXIT_INFEASIBLE = 0, 1, 2, 3, 4


def _config_values(args):
    return read_config(args.config) if getattr(args, "config", None) else {}


def _region(text):
    values = parse_vector(text)
    if values.size != 2:
        raise argparse.ArgumentTypeError("region has to look like RHO_MIN,RHO_MAX")
    return float(values[0]), float(values[1])


def cmd_generate(args):
    rate = "random" if args.lambda_random else repr(args.rate)
    config = build(ScenarioConfig, _config_values(args), rho_min=args.region[0], rho_max=args.region[1],
                   rate=rate, count=args.count, seed=args.seed, cell_count=args.cells)
    dataset = generate_dataset(config, workers=worker_count())
    save_dataset(dataset, args.out)
    meta = dataset.meta
    print(f"{meta.count} feasible samples from {meta.attempts} draws: rejection rate {meta.rejection_rate:.4f}, "
          f"{meta.infeasible} infeasible, {meta.degenerate} degenerate")
    return EXIT_OK


def cmd_train(args):
    values = _config_values(args)
    if args.preset:
        values["preset"] = args.preset
    config = build(TrainConfig, values, seed=args.seed, iterations=args.iterations)
    dataset = load_dataset(args.data)
    rng = np.random.default_rng(config.seed)
    if args.variant in ("srnet", "srnet-heu"):
        model = init_model(config, dataset.size, args.variant, rng)
        model, trace = train(model, dataset, config, rng)
    else:
        mode = {v: k for k, v in MODES.items()}[args.variant]
        penalty = build(PenaltyConfig, values, mode=mode, weight=args.penalty_weight, domain=args.penalty_domain)
        if args.search_weight:
            weight, model, scores = search_penalty_weight(dataset, config, penalty, rng)
            print(f"selected penalty weight {weight:g} from {scores}")
            trace = np.zeros(0)
        else:
            model, trace = train_penalty_net(dataset, config, penalty, rng)
    save_model(model, args.out)
    trace_path = args.trace or args.out + ".trace.csv"
    pd.DataFrame({"step": np.arange(len(trace)), "loss": trace}).to_csv(trace_path, index=False, float_format="%.17g")
    print(f"wrote {args.out} and {trace_path}")
    return EXIT_OK


def cmd_eval(args):
    values = _config_values(args)
    local_config = build(LocalOptConfig, values)
    methods = [resolve_method(name, local_config) for name in args.method]
    reports = []
    for path in args.test:
        dataset = load_dataset(path)
        reports.append(evaluate(dataset, methods, test_name=path, seed=args.seed, config=values))
    write_report(reports, args.out)
    samples = args.samples or args.out.rsplit(".", 1)[0] + ".samples.csv"
    write_samples(reports, samples)
    for report in reports:
        for m in report.methods:
            print(f"{report.test}\t{m.method}\tsum rate {m.mean_sum_rate:.4f}\tsatisfaction {m.satisfaction:.4f}"
                  f" (raw {m.satisfaction_raw:.4f})\tfallback {m.fallback_rate:.4f}\t{m.mean_time_us:.1f} us")
    return EXIT_OK


def cmd_bench(args):
    if args.repeats < 1:
        raise InvalidArgumentError("--repeats has to be at least 1")
    local_config = build(LocalOptConfig, _config_values(args))
    methods = [resolve_method(name, local_config) for name in args.methods]
    rows = bench(load_dataset(args.test), methods, args.repeats, args.seed)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_bench(rows, fh)
    else:
        write_bench(rows, sys.stdout)
    return EXIT_OK


def cmd_project(args):
    ch, cs = load_instance(args.instance, args.gains, args.gamma, args.B, args.q, args.p_max, args.noise)
    d = parse_vector(args.d) if args.d else None
    for line in dump(ch, cs, parse_vector(args.phat), d, args.heuristic):
        print(line)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="srm-benchmark",
                                     description="Learning-based sum-rate maximization under per-user rate requirements")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="only warnings and errors")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="draw a feasibility-filtered dataset")
    generate.add_argument("--region", type=_region, required=True, help="cell-edge region in dB, e.g. 0,3")
    rates = generate.add_mutually_exclusive_group(required=True)
    rates.add_argument("--lambda", dest="rate", type=float, help="rate requirement of every UE in bit/s/Hz")
    rates.add_argument("--lambda-random", action="store_true", help="per-UE requirement drawn from 0.1..1.0")
    generate.add_argument("--count", type=int, required=True)
    generate.add_argument("--seed", type=int)
    generate.add_argument("--cells", type=int)
    generate.add_argument("--config", help="key = value config file")
    generate.add_argument("--out", required=True)
    generate.set_defaults(func=cmd_generate)

    training = commands.add_parser("train", help="train a network on a dataset")
    training.add_argument("--data", required=True)
    training.add_argument("--variant", choices=VARIANTS, default="srnet")
    training.add_argument("--config")
    training.add_argument("--preset", choices=("desk", "full"))
    training.add_argument("--seed", type=int)
    training.add_argument("--iterations", type=int)
    training.add_argument("--penalty-weight", type=float)
    training.add_argument("--penalty-domain", choices=("sinr", "rate"))
    training.add_argument("--search-weight", action="store_true", help="pick the penalty weight on a validation split")
    training.add_argument("--trace", help="loss trace CSV, defaults to OUT.trace.csv")
    training.add_argument("--out", required=True)
    training.set_defaults(func=cmd_train)

    evaluation = commands.add_parser("eval", help="evaluate methods on test sets")
    evaluation.add_argument("--test", action="append", required=True)
    evaluation.add_argument("--method", action="append", required=True,
                            help="checkpoint path, p0, local-opt or ensemble:A,B,...")
    evaluation.add_argument("--config")
    evaluation.add_argument("--seed", type=int, default=0)
    evaluation.add_argument("--samples", help="per-sample CSV, defaults next to --out")
    evaluation.add_argument("--out", required=True, help="JSON report")
    evaluation.set_defaults(func=cmd_eval)

    timing = commands.add_parser("bench", help="per-instance solve time of methods")
    timing.add_argument("--test", required=True)
    timing.add_argument("--methods", nargs="+", required=True)
    timing.add_argument("--repeats", type=int, default=3)
    timing.add_argument("--config")
    timing.add_argument("--seed", type=int, default=0)
    timing.add_argument("--out")
    timing.set_defaults(func=cmd_bench)

    projection = commands.add_parser("project", help="dump the projection block for one instance")
    projection.add_argument("--instance", help="FILE:INDEX of a dataset sample")
    projection.add_argument("--gains", help="rows separated by ';', e.g. '1,0.5;0.5,1'")
    projection.add_argument("--gamma")
    projection.add_argument("--B")
    projection.add_argument("--q")
    projection.add_argument("--p-max", type=float, default=1.0)
    projection.add_argument("--noise", type=float, default=1.0)
    projection.add_argument("--phat", required=True)
    projection.add_argument("--d")
    projection.add_argument("--heuristic", action="store_true")
    projection.set_defaults(func=cmd_project)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except DivergedError as e:
        logger.error("%s", e)
        return EXIT_DIVERGED
    except InfeasibleInstanceError as e:
        logger.error("%s", e)
        if e.p0 is not None:
            print("p0 = " + ", ".join(f"{v:.10g}" for v in np.ravel(e.p0)))
        return EXIT_INFEASIBLE
    except InvalidArgumentError as e:
        parser.print_usage(sys.stderr)
        logger.error("%s", e)
        return EXIT_USAGE
    except (SRMError, OSError) as e:
        logger.error("%s", e)
        return EXIT_RUNTIME
