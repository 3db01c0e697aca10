"""Seeded experiment runner: ``schurdistill <subcommand> [options]``.

Every subcommand accepts ``--seed``, ``--format {json,csv}``, ``--out`` and
``--cap``. Exit codes: 0 on success, 2 on parse or domain errors, 3 when a
size cap is exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Callable, Sequence

import numpy as np

from . import distillation as dist
from . import ensembles as ens
from . import schur_weyl as sw
from . import tomography as tomo
from .errors import CapacityError, DomainError
from .partitions import Partition, plancherel
from .quantum import BipartiteState, DensityOperator, Spectrum, bell_pair, random_bipartite
from .report import ExperimentReport

EXIT_OK, EXIT_DOMAIN, EXIT_CAPACITY = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise DomainError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.replace(" ", ",").split(",") if t]
    except ValueError:
        raise DomainError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise DomainError("expected at least one integer")
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise DomainError(f"expected comma-separated numbers, got {text!r}") from None


def _split(text: str) -> tuple[int, int]:
    parts = _int_list(text)
    if len(parts) != 2:
        raise DomainError(f"split must be two integers n_A,n_B, got {text!r}")
    return parts[0], parts[1]


def _state(args, rng: np.random.Generator) -> BipartiteState:
    if args.state == "bell":
        return bell_pair()
    if args.state == "random":
        return random_bipartite(_split(args.split), rng)
    split = _split(args.split)
    amps = np.array(_float_list(args.state), dtype=complex)
    if amps.size != 2 ** sum(split):
        raise DomainError(f"{amps.size} amplitudes do not match split {split}")
    if np.linalg.norm(amps) == 0:
        raise DomainError("state vector is zero")
    return BipartiteState.from_amplitudes(amps, split)


def _lam(p: Partition) -> list[int]:
    return list(p)


# -- subcommands -------------------------------------------------------------------


def cmd_rate_table(args, rng) -> ExperimentReport:
    spec = Spectrum.parse(args.spectrum)
    ks = _int_list(args.k)
    thresholds = _float_list(args.thresholds) if args.thresholds else []
    rows, summary = [], {}
    for k in ks:
        report = dist.rate_statistics(spec, k, thresholds, cap=args.cap or None)
        rows.extend(
            {"k": k, "lambda": _lam(o.partition), "prob": o.probability, "ebits": o.ebits}
            for o in report.outcomes
        )
        summary[str(k)] = {
            "expected_ebits": report.expected_ebits,
            "expected_rate": report.expected_rate,
            "tails": [{"t": t, "prob": p} for t, p in report.thresholds.items()],
            "guaranteed": report.guaranteed.to_json(),
        }
    return ExperimentReport("rate-table", args.seed, {"spectrum": list(spec.values), "k": ks, "thresholds": thresholds}, rows, summary)


def cmd_schur_law(args, rng) -> ExperimentReport:
    spec = Spectrum.parse(args.spectrum)
    k = args.k
    if args.method == "formula":
        law = sw.schur_law(spec, k, args.cap or None)
    elif args.method == "characters":
        law = sw.character_sum_law(spec, k)
    else:
        rho = DensityOperator(np.diag(np.array(spec.values, dtype=complex)))
        law = sw.schur_law_bruteforce(rho, k, args.cap or None)
    rows = [{"lambda": _lam(lam), "prob": p} for lam, p in law.entries.items()]
    return ExperimentReport(
        "schur-law", args.seed, {"spectrum": list(spec.values), "k": k, "method": args.method},
        rows, {"total": math.fsum(law.entries.values())},
    )


def cmd_verify_iid(args, rng) -> ExperimentReport:
    psi = _state(args, rng)
    report = sw.verify_iid_decomposition(psi, args.k, args.cap or None)
    rows = [b.to_json() for b in report.blocks]
    return ExperimentReport(
        "verify-iid", args.seed, {"state": args.state, "split": list(psi.split), "k": args.k},
        rows, {"max_cross_mass": report.max_cross_mass, "pass": report.passes()},
    )


def cmd_bounds(args, rng) -> ExperimentReport:
    spec = Spectrum.parse(args.spectrum)
    k = args.k
    rows = []
    for o in dist.distill_law(spec, k, args.cap or None):
        bound = dist.probability_upper_bound(o.partition, spec, k)
        rows.append({
            "lambda": _lam(o.partition), "prob": o.probability,
            "plancherel": float(plancherel(o.partition)), "upper_bound": bound,
            "holds": o.probability <= bound,
        })
    summary = {
        "gamma": spec.gamma,
        "k_at_most_gamma": k <= spec.gamma,
        "c": args.c,
        "tail_bound": dist.tail_bound(k, args.c),
        "exact_tail": dist.exact_low_dimension_tail(spec, k, args.c),
    }
    return ExperimentReport("bounds", args.seed, {"spectrum": list(spec.values), "k": k, "c": args.c}, rows, summary)


def cmd_dominance(args, rng) -> ExperimentReport:
    spec = Spectrum.parse(args.spectrum)
    res = dist.dominance_check(spec, args.k)
    data = res.to_json()
    return ExperimentReport(
        "dominance", args.seed, {"spectrum": list(spec.values), "k": args.k},
        data["rows"], {"holds": res.holds, "worst_slack": res.worst_slack},
    )


def cmd_moment_distance(args, rng) -> ExperimentReport:
    a, b = ens.parse_spec(args.a), ens.parse_spec(args.b)
    res = ens.moment_distance(a, b, args.k, args.mode, args.samples, rng, args.cap or ens.DEFAULT_MOMENT_CAP)
    params = {"a": a.to_json(), "b": b.to_json(), "k": args.k, "mode": args.mode}
    if args.mode == "empirical":
        params["samples"] = args.samples
    return ExperimentReport(
        "moment-distance", args.seed, params,
        [{"distance": res.distance, "error_budget": res.error_budget}],
        {"a": res.tags[0], "b": res.tags[1], "reference_scale": res.reference_scale},
    )


def cmd_concentration(args, rng) -> ExperimentReport:
    spec = ens.parse_spec(args.ensemble)
    rows = []
    for n in _int_list(args.samples):
        rows.append(ens.concentration_check(spec, args.k, n, rng, args.failure, args.cap or ens.DEFAULT_MOMENT_CAP).to_json())
    return ExperimentReport(
        "concentration", args.seed,
        {"ensemble": spec.to_json(), "k": args.k, "samples": _int_list(args.samples), "failure": args.failure},
        rows, {"all_pass": all(r["pass"] for r in rows)},
    )


def cmd_planted_entropy(args, rng) -> ExperimentReport:
    s1, smin = ens.planted_entropies(args.eta, args.s_min, args.inner_s1, args.inner_smin)
    params = {"eta": args.eta, "s_min": args.s_min, "inner_s1": args.inner_s1, "inner_smin": args.inner_smin}
    return ExperimentReport("planted-entropy", args.seed, params, [{"s1": s1, "smin": smin}], {})


def cmd_entropy_test_instance(args, rng) -> ExperimentReport:
    inst = ens.entropy_test_instance(args.alpha, args.beta, args.n, rng)
    data = inst.to_json()
    rows = [
        {"family": "high", "s1": data["high_s1"], "smin": data["high_smin"]},
        {"family": "low", "s1": data["low_s1"], "smin": data["low_smin"]},
    ]
    summary = {"m": inst.m, "eta": inst.eta, "sample_bound": inst.sample_bound,
               "high": data["high"], "low": data["low"]}
    return ExperimentReport("entropy-test-instance", args.seed, {"alpha": args.alpha, "beta": args.beta, "n": args.n}, rows, summary)


def cmd_tomo_plan(args, rng) -> ExperimentReport:
    plan = tomo.locc_tomography_plan(args.n, args.epsilon, args.kn, args.ka, args.kb, args.s_min)
    params = {"n": args.n, "epsilon": args.epsilon, "kn": args.kn, "ka": args.ka, "kb": args.kb, "s_min": args.s_min}
    return ExperimentReport("tomo-plan", args.seed, params, [plan.to_json()], {"total_copies": plan.total_copies, "branch": plan.branch})


def cmd_rate_bounds(args, rng) -> ExperimentReport:
    res = tomo.rate_bounds(args.s1, args.na, args.p, args.epsilon)
    params = {"s1": args.s1, "na": args.na, "p": args.p, "epsilon": args.epsilon}
    return ExperimentReport("rate-bounds", args.seed, params, [res.to_json()], {})


def cmd_run_protocol(args, rng) -> ExperimentReport:
    psi = _state(args, rng)
    sim = dist.simulate_protocol(psi, args.k, args.cap or None)
    counts = dist.run_protocol_trials(psi, args.k, args.trials, args.seed, args.cap or None)
    rows = []
    for o in sim.outcomes:
        rows.append({
            "lambda": _lam(o.partition), "ebits": o.ebits, "prob": o.probability,
            "fidelity": o.fidelity, "count": counts[o.partition],
            "frequency": counts[o.partition] / args.trials if args.trials else 0.0,
        })
    mean = sum(r["ebits"] * r["count"] for r in rows) / args.trials if args.trials else 0.0
    return ExperimentReport(
        "run-protocol", args.seed, {"state": args.state, "split": list(psi.split), "k": args.k, "trials": args.trials},
        rows, {"mean_ebits": mean, "min_fidelity": min(r["fidelity"] for r in rows)},
    )


# -- parser -------------------------------------------------------------------------


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_seed, default=0, help="64-bit RNG seed (default 0)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--cap", type=int, default=0, help="override the dense-size cap")


def _state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", default="bell", help="'bell', 'random', or comma-separated real amplitudes")
    p.add_argument("--split", default="1,1", help="qubits on each side, e.g. 2,2")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schurdistill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    handlers: dict[str, Callable] = {}

    def add(name: str, fn: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _common(p)
        p.set_defaults(handler=fn)
        handlers[name] = fn
        return p

    p = add("rate-table", cmd_rate_table, "exact distillation law and rates")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--k", required=True, help="comma-separated copy counts")
    p.add_argument("--thresholds", default="", help="ebit thresholds for tail probabilities")

    p = add("schur-law", cmd_schur_law, "weak Schur sampling law")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("formula", "characters", "bruteforce"), default="formula")

    p = add("verify-iid", cmd_verify_iid, "block structure of k-fold bipartite pure states")
    _state_args(p)
    p.add_argument("--k", type=int, required=True)

    p = add("bounds", cmd_bounds, "probability and tail bounds against the exact law")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c", type=float, default=0.25)

    p = add("dominance", cmd_dominance, "ebit-count dominance from k to k+1")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("moment-distance", cmd_moment_distance, "trace distance between k-copy moments")
    p.add_argument("--a", required=True, help=ens._SPEC_HELP)
    p.add_argument("--b", required=True, help=ens._SPEC_HELP)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "empirical"), default="exact")
    p.add_argument("--samples", type=int, default=0)

    p = add("concentration", cmd_concentration, "empirical moment vs exact with Bernstein bound")
    p.add_argument("--ensemble", required=True, help=ens._SPEC_HELP)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", required=True, help="comma-separated sample counts")
    p.add_argument("--failure", type=float, default=ens.DEFAULT_FAILURE_PROBABILITY)

    p = add("planted-entropy", cmd_planted_entropy, "entropies of a pseudoentangled reduction")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--s-min", type=float, required=True)
    p.add_argument("--inner-s1", type=float, required=True)
    p.add_argument("--inner-smin", type=float, required=True)

    p = add("entropy-test-instance", cmd_entropy_test_instance, "ensemble pair hiding an entropy gap")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)

    p = add("tomo-plan", cmd_tomo_plan, "LOCC tomography copy budget")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--kn", type=int, required=True)
    p.add_argument("--ka", type=int, default=1)
    p.add_argument("--kb", type=int, default=1)
    p.add_argument("--s-min", type=float, default=None)

    p = add("rate-bounds", cmd_rate_bounds, "finite-error distillation and dilution rate bounds")
    p.add_argument("--s1", type=float, required=True)
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)

    p = add("run-protocol", cmd_run_protocol, "simulate the distillation protocol")
    _state_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        rng = np.random.default_rng(args.seed)
        report = args.handler(args, rng)
        text = report.render(args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
