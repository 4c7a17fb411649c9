"""Command-line front end.

Exit status is 0 on success, 2 on usage errors and 1 on runtime errors.
Errors are written to stderr as one JSON line ``{"error": ..., "detail": ...}``.
With ``--unconstrained``, latent values are given in unconstrained space
under a ``_u`` suffix, e.g. ``--latent z_u=0``.
"""
import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import autodiff as ad
from .effects import Context, handlers
from .errors import HandlebarError, NotFound
from .handlers import Condition, NonCenter, Substitute, Unconstrain, log_joint, make_trace
from .inference import ADVIConfig, MHConfig, advi_fit, mh_run, to_csv
from .models import REGISTRY, registry_lookup

SEED_ENV = "HANDLEBAR_SEED"
UNCONSTRAINED_SUFFIX = "_u"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _assignment(text):
    name, sep, raw = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value for {name!r} is not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"value for {name!r} must be finite")
    return name, value


def build_parser():
    parser = _Parser(prog="handlebar", description="Run models and inference built from effect handlers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_command(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--model", required=True)
        p.add_argument("--hyper", action="append", type=_assignment, default=[], metavar="NAME=VALUE")
        p.add_argument("--observe", action="append", type=_assignment, default=[], metavar="NAME=VALUE")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        return p

    p = model_command("sample", "draw forward samples of every site")
    p.add_argument("--num-samples", type=int, default=1)

    p = model_command("trace", "print the trace of one forward run")
    p.add_argument("--latent", action="append", type=_assignment, default=[], metavar="NAME=VALUE")
    p.add_argument("--unconstrained", action="store_true")
    p.add_argument("--noncenter", action="store_true")

    p = model_command("logprob", "evaluate the log joint density")
    p.add_argument("--latent", action="append", type=_assignment, default=[], metavar="NAME=VALUE")
    p.add_argument("--unconstrained", action="store_true")

    p = model_command("mh", "random-walk Metropolis-Hastings")
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--step-size", type=float, default=0.5)
    p.add_argument("--chains", type=int, default=1)

    p = model_command("advi", "mean-field ADVI")
    p.add_argument("--steps", type=int, default=3000)
    p.add_argument("--learning-rate", "--lr", type=float, default=0.05)
    p.add_argument("--mc-samples", type=int, default=1)

    p = sub.add_parser("list-models", help="list registered models")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    return parser


def _as_dict(pairs, what):
    out = {}
    for name, value in pairs:
        if name in out:
            raise UsageError(f"{what} {name!r} given twice")
        out[name] = value
    return out


def _resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _build_model(args):
    try:
        entry = registry_lookup(args.model)
    except NotFound as e:
        raise UsageError(str(e)) from None
    hyper = _as_dict(args.hyper, "hyperparameter")
    unknown = set(hyper) - set(entry.defaults)
    if unknown:
        raise UsageError(f"unknown hyperparameters for {entry.name}: {sorted(unknown)}")
    return entry, entry.build(hyper)


def _latents(args):
    latents = _as_dict(args.latent, "latent")
    if not args.unconstrained:
        return latents
    out = {}
    for name, value in latents.items():
        if not name.endswith(UNCONSTRAINED_SUFFIX) or name == UNCONSTRAINED_SUFFIX:
            raise UsageError(f"with --unconstrained, latent names take a {UNCONSTRAINED_SUFFIX!r} suffix: {name!r}")
        out[name[: -len(UNCONSTRAINED_SUFFIX)]] = value
    return out


def _dumps(obj):
    return json.dumps(obj, allow_nan=True)


def cmd_list_models(args, out):
    entries = [
        {"name": e.name, "latent": e.latent_names, "observed": e.observed_names,
         "defaults": e.defaults, "description": e.description}
        for e in REGISTRY.values()
    ]
    if args.format == "json":
        out.write(_dumps(entries) + "\n")
    else:
        rows = [[e["name"], " ".join(e["latent"]), " ".join(e["observed"])] for e in entries]
        out.write(to_csv(["name", "latent", "observed"], rows))


def cmd_sample(args, out):
    _, model = _build_model(args)
    if args.num_samples < 1:
        raise UsageError("--num-samples must be at least 1")
    ctx = Context(_resolve_seed(args.seed))
    th, tr = make_trace()
    draws = {}
    with handlers(ctx, th, Condition(_as_dict(args.observe, "observation"))):
        for _ in range(args.num_samples):
            ctx.run(model)
            for name, rec in tr.items():
                draws.setdefault(name, []).append(float(ad.primal(rec.value)))
            th.begin()
    if args.format == "json":
        out.write(_dumps(draws) + "\n")
    else:
        names = list(draws)
        rows = [[i] + [f"{draws[n][i]:.6f}" for n in names] for i in range(args.num_samples)]
        out.write(to_csv(["draw"] + names, rows))


def cmd_trace(args, out):
    _, model = _build_model(args)
    ctx = Context(_resolve_seed(args.seed))
    th, tr = make_trace()
    stack = [th]
    latents = _latents(args)
    if args.unconstrained:
        stack += [Substitute(latents), Unconstrain()]
    if args.noncenter:
        stack.append(NonCenter())
    if not args.unconstrained:
        stack.append(Substitute(latents))
    stack.append(Condition(_as_dict(args.observe, "observation")))
    with handlers(ctx, *stack):
        ctx.run(model)
    records = tr.to_json()
    if args.format == "json":
        out.write(_dumps({"trace": records, "total_log_prob": float(tr.total_log_prob)}) + "\n")
    else:
        rows = [[r["name"], f"{r['value']:.6f}", f"{r['log_prob']:.6f}", str(r["observed"]).lower(), r["family"]]
                for r in records]
        out.write(to_csv(["name", "value", "log_prob", "observed", "family"], rows))


def cmd_logprob(args, out):
    _, model = _build_model(args)
    lp = float(log_joint(model, _latents(args), _as_dict(args.observe, "observation"),
                         unconstrained=args.unconstrained, seed=_resolve_seed(args.seed)))
    if args.format == "json":
        out.write(_dumps({"log_joint": lp}) + "\n")
    else:
        out.write(to_csv(["log_joint"], [[f"{lp:.6f}"]]))


def _mh_chain(model_name, hyper, observations, cfg, chain):
    model = registry_lookup(model_name).build(hyper)
    samples = mh_run(model, observations, cfg)
    samples.chain = chain
    return samples


def cmd_mh(args, out):
    entry, _ = _build_model(args)
    if args.chains < 1:
        raise UsageError("--chains must be at least 1")
    seed = _resolve_seed(args.seed)
    try:
        cfgs = [MHConfig(args.steps, args.burn_in, args.step_size, seed + c) for c in range(args.chains)]
    except HandlebarError as e:
        raise UsageError(str(e)) from None
    hyper = _as_dict(args.hyper, "hyperparameter")
    observations = _as_dict(args.observe, "observation")
    if args.chains == 1:
        results = [_mh_chain(entry.name, hyper, observations, cfgs[0], 0)]
    else:
        with ProcessPoolExecutor(max_workers=min(args.chains, os.cpu_count() or 1)) as pool:
            futures = [pool.submit(_mh_chain, entry.name, hyper, observations, cfg, c)
                       for c, cfg in enumerate(cfgs)]
            results = [f.result() for f in futures]
    multi = args.chains > 1
    if args.format == "json":
        if multi:
            out.write(_dumps([{"chain": r.chain, **r.to_json()} for r in results]) + "\n")
        else:
            out.write(_dumps(results[0].to_json()) + "\n")
    else:
        header, rows = None, []
        for r in results:
            header, chain_rows = r.csv_rows(with_chain=multi)
            rows.extend(chain_rows)
        out.write(to_csv(header, rows))


def cmd_advi(args, out):
    _, model = _build_model(args)
    try:
        cfg = ADVIConfig(args.steps, args.learning_rate, args.mc_samples, _resolve_seed(args.seed))
    except HandlebarError as e:
        raise UsageError(str(e)) from None
    result = advi_fit(model, _as_dict(args.observe, "observation"), cfg)
    if args.format == "json":
        params = {n: {"mu": mu, "log_sigma": ls} for n, (mu, ls) in result.params.items()}
        out.write(_dumps({"params": params, "history": result.history_json()}) + "\n")
    else:
        out.write(to_csv(["step", "elbo"], [[i, f"{e:.6f}"] for i, e in enumerate(result.history)]))


COMMANDS = {
    "list-models": cmd_list_models,
    "sample": cmd_sample,
    "trace": cmd_trace,
    "logprob": cmd_logprob,
    "mh": cmd_mh,
    "advi": cmd_advi,
}


def _report(err, kind, detail):
    err.write(json.dumps({"error": kind, "detail": detail}) + "\n")


def run_cli(argv=None, out=None, err=None):
    """Run one command; returns the process exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, out)
    except UsageError as e:
        _report(err, "usage", str(e))
        return 2
    except HandlebarError as e:
        _report(err, type(e).__name__, str(e))
        return 1
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else 0
    except Exception as e:
        _report(err, type(e).__name__, str(e))
        return 1
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
