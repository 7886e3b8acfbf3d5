"""Command-line entry point: fit, assess, plan, walk, reproduce, serve.

Exit codes: 0 success, 1 user error (bad arguments or unusable input
files), 2 pipeline error (the numerics refused the inputs).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import covariate_vector, parse_link_profile, parse_regional_csv, with_intercept
from .decision import DependencyModel, UtilitySpec, recommend, scale_link_probabilities
from .errors import PipelineError
from .fixtures import (
    REFERENCE_ATTACK_PROBABILITY,
    reference_link_profile,
    regional_dataset,
)
from .fusion import IntegrationGrid, PriorSpec
from .induced import CurveConfig, curve_to_csv, induce_curve
from .logit import GaussianPrior, draws_to_csv, fit_mle, sample_skewness
from .network import demo_network, network_from_json
from .pipeline import AssessmentConfig, assess_from_inputs, stage_one_draws
from .reproduce import run_report
from .sequential import advance, continuations, create_session, session_to_dict


class CliParser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this artifact reserves 2 for
    pipeline failures, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_sampler_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=1, help="seed for both random stages")
    p.add_argument("--iterations", type=int, default=11000, help="total MCMC sweeps")
    p.add_argument("--burn-in", type=int, default=1000, help="sweeps discarded before retention")


def _add_curve_flags(p: argparse.ArgumentParser):
    p.add_argument("--samples", type=int, default=60, help="posterior draws used for the curve")
    p.add_argument("--window", type=int, default=5, help="odd moving-average window")


def _add_grid_flags(p: argparse.ArgumentParser):
    p.add_argument(
        "--grid", choices=("coarse", "fine"), default="fine",
        help="quadrature: coarse 0.05 reproduction grid or fine trapezoid",
    )
    p.add_argument("--step", type=float, default=0.001, help="fine-grid step size")


def _grid(args) -> IntegrationGrid:
    if args.grid == "coarse":
        return IntegrationGrid.coarse()
    return IntegrationGrid.fine(step=args.step)


def _prior(args) -> PriorSpec:
    if args.prior == "uniform":
        return PriorSpec()
    return PriorSpec(kind="beta", a=args.prior_a, b=args.prior_b)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc


def _write_text(path: str, text: str):
    Path(path).write_text(text, encoding="utf-8")


def _load_data(args):
    if args.data is None:
        return regional_dataset()
    return parse_regional_csv(_read_text(args.data))


def cmd_fit(args) -> int:
    data = _load_data(args)
    full = with_intercept(data)
    mle, diag = fit_mle(full)
    config = AssessmentConfig(iterations=args.iterations, burn_in=args.burn_in, seed=args.seed)
    draws, _ = stage_one_draws(data, config)
    means = draws.means()

    print("coefficient fits on the regional dataset")
    print(f"{'coefficient':>12s} {'max likelihood':>15s} {'posterior mean':>15s}")
    for u, name in enumerate(full.columns):
        print(f"{name:>12s} {mle[u]:>15.4f} {means[u]:>15.4f}")
    print(f"gradient max-norm {diag['gradient_norm']:.3e}, "
          f"newton iterations {diag['iterations']}, "
          f"acceptance rate {draws.acceptance_rate:.3f}")

    summary = {
        "columns": list(full.columns),
        "maximum_likelihood": [float(v) for v in mle],
        "ml_diagnostics": diag,
        "posterior_means": [float(v) for v in means],
        "posterior_skewness": [float(sample_skewness(draws.betas[:, u])) for u in range(draws.dimension)],
        "acceptance_rate": draws.acceptance_rate,
        "acceptance_by_coordinate": list(draws.acceptance_by_coordinate),
        "meta": {"iterations": args.iterations, "burn_in": args.burn_in, "seed": args.seed},
    }
    if args.out:
        _write_text(args.out, json.dumps(summary, indent=2))
        print(f"summary written to {args.out}")
    if args.draws_csv:
        _write_text(args.draws_csv, draws_to_csv(draws))
        print(f"draws written to {args.draws_csv}")
    return 0


def cmd_assess(args) -> int:
    data = _load_data(args)
    if args.profile:
        profile = parse_link_profile(_read_text(args.profile))
    elif args.history is not None:
        profile = {
            "link": args.link,
            "history": [int(c) for c in args.history.split(",") if c != ""] if args.history else [],
            "covariates": json.loads(args.covariates) if args.covariates else {},
        }
    else:
        profile = reference_link_profile()
    config = AssessmentConfig(
        likelihood_kind=args.likelihood,
        prior=_prior(args),
        grid=_grid(args),
        iterations=args.iterations,
        burn_in=args.burn_in,
        seed=args.seed,
        sample_count=args.samples,
        window=args.window,
        flat_curve=args.flat_curve,
        likelihood_exponent=args.likelihood_exponent,
    )
    assessment, cache_state = assess_from_inputs(
        data, profile["covariates"], profile["history"], config=config, link_id=profile["link"]
    )
    print(f"link {assessment.link_id or '?'}: attack probability {assessment.p_attack:.6f} "
          f"(clear {assessment.p_clear:.6f})")
    print(f"unnormalized attack {assessment.unnormalized_attack:.6g}, "
          f"clear {assessment.unnormalized_clear:.6g}, "
          f"constant {assessment.normalizing_constant:.6g} [stage one: {cache_state}]")
    if args.out:
        _write_text(args.out, json.dumps(assessment.to_dict(), indent=2))
        print(f"assessment written to {args.out}")
    if args.curve_csv:
        if args.flat_curve:
            raise ValueError("no induced curve to export in flat-curve mode")
        draws, _ = stage_one_draws(data, config)
        full = with_intercept(data) if not data.intercept else data
        z = covariate_vector(profile["covariates"], tuple(c for c in full.columns if c != "intercept"))
        curve = induce_curve(
            draws, z, CurveConfig(sample_count=args.samples, window=args.window, seed=args.seed + 77)
        )
        _write_text(args.curve_csv, curve_to_csv(curve))
        print(f"curve written to {args.curve_csv}")
    return 0


def _network(args):
    if args.network:
        return network_from_json(_read_text(args.network))
    return demo_network()


def _marginals(args, network):
    if args.marginals:
        doc = json.loads(_read_text(args.marginals))
        return {str(k): float(v) for k, v in doc.items()}
    return scale_link_probabilities(
        network,
        args.reference_link,
        args.reference_p,
        round_2dp=args.reference_compat,
    )


def _utility(args) -> UtilitySpec:
    if args.utility == "binary":
        return UtilitySpec()
    return UtilitySpec(kind="length-penalty", x_util=args.x_util)


def _dependency(args) -> DependencyModel:
    if args.dependency:
        return DependencyModel.from_dict(json.loads(_read_text(args.dependency)))
    return DependencyModel()


def _print_plan(result):
    print(f"{'route':30s} {'p(success)':>11s} {'p(failure)':>11s} {'utility':>9s}")
    for i, entry in enumerate(result.per_route):
        label = "-".join(entry.route.link_ids)
        mark = " <- recommended" if i == result.recommended else ""
        print(f"{label:30s} {entry.p_success:>11.4f} {entry.p_failure:>11.4f} "
              f"{entry.expected_utility:>9.4f}{mark}")


def cmd_plan(args) -> int:
    network = _network(args)
    marginals = _marginals(args, network)
    result = recommend(network, marginals, _dependency(args), _utility(args))
    _print_plan(result)
    if args.out:
        doc = result.to_dict()
        doc["marginals"] = marginals
        _write_text(args.out, json.dumps(doc, indent=2))
        print(f"plan written to {args.out}")
    return 0


def cmd_walk(args) -> int:
    network = _network(args)
    marginals = _marginals(args, network)
    session = create_session(
        network,
        marginals,
        _dependency(args),
        _utility(args),
        poc_mode=args.poc,
        w_clear=args.w_clear,
        w_incident=args.w_incident,
        propagation=args.propagation,
    )
    print(f"walk opened at node {session.current_node} "
          f"(conditionalization {session.poc_mode}, weights clear {session.w_clear:g} / "
          f"incident {session.w_incident:g})")
    rec = session.log[-1]["recommendation"]
    print("recommended route: " + "-".join(rec["recommendedLinks"]))

    while session.status == "open":
        options = continuations(session)
        print(f"at node {session.current_node}; crossable links: {', '.join(options)}")
        print("enter 'LINK OUTCOME' (outcome: clear or incident), or 'quit':")
        line = sys.stdin.readline()
        if not line:
            print("input ended; walk abandoned")
            return 0
        line = line.strip()
        if not line:
            continue
        if line.lower() in ("quit", "q"):
            print("walk abandoned")
            return 0
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("clear", "incident"):
            print("could not parse; expected for example: 1 clear")
            continue
        link_id, outcome = parts
        try:
            result = advance(session, link_id, outcome)
        except PipelineError as exc:
            print(f"rejected: {exc}")
            continue
        if result is None:
            print(f"arrived at sink {session.current_node}")
        else:
            print(f"crossed link {link_id} ({outcome}); now at {session.current_node}")
            print("recommended continuation: " + "-".join(result.recommended_route.link_ids))

    traversed = ", ".join(f"{t['link']}:{t['outcome']}" for t in session.traversed)
    print(f"walk complete; traversed {traversed}")
    if args.out:
        _write_text(args.out, json.dumps(session_to_dict(session), indent=2))
        print(f"transcript written to {args.out}")
    return 0


def cmd_reproduce(args) -> int:
    report = run_report(
        seed=args.seed,
        iterations=args.iterations,
        burn_in=args.burn_in,
        sample_count=args.samples,
        window=args.window,
        fine_integration=args.fine_integration,
    )
    print(report.render_text())
    if args.json:
        _write_text(args.json, report.to_json())
        print(f"report written to {args.json}")
    if not report.deterministic_ok():
        raise PipelineError("deterministic reproduction rows failed")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(store_dir=args.store), host=args.host, port=args.port)
    return 0


def build_parser() -> CliParser:
    parser = CliParser(prog="convoy", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    p_fit = sub.add_parser("fit",
                           help="fit the regional model both ways and summarize")
    p_fit.add_argument("--data", help="regional CSV path (default: bundled fixture)")
    _add_sampler_flags(p_fit)
    p_fit.add_argument("--out", help="write a JSON summary here")
    p_fit.add_argument("--draws-csv", help="write retained draws as CSV here")
    p_fit.set_defaults(func=cmd_fit)

    p_assess = sub.add_parser("assess",
                              help="fuse evidence into one link's attack probability")
    p_assess.add_argument("--data", help="regional CSV path (default: bundled fixture)")
    p_assess.add_argument("--profile", help="link profile JSON path")
    p_assess.add_argument("--link", default="9", help="link id for report labeling")
    p_assess.add_argument("--history", help="comma-separated 0/1 crossing outcomes")
    p_assess.add_argument("--covariates", help="JSON object of covariate values")
    p_assess.add_argument("--likelihood", choices=("adversarial", "conventional"),
                          default="adversarial")
    p_assess.add_argument("--prior", choices=("uniform", "beta"), default="uniform")
    p_assess.add_argument("--prior-a", type=float, default=1.0)
    p_assess.add_argument("--prior-b", type=float, default=1.0)
    p_assess.add_argument("--flat-curve", action="store_true",
                          help="debug: replace the induced curve by a flat one (no MCMC)")
    p_assess.add_argument("--likelihood-exponent", type=float, default=1.0,
                          help="raise the history likelihood to this power")
    _add_sampler_flags(p_assess)
    _add_curve_flags(p_assess)
    _add_grid_flags(p_assess)
    p_assess.add_argument("--out", help="write the assessment JSON here")
    p_assess.add_argument("--curve-csv", help="write the induced curve as CSV here")
    p_assess.set_defaults(func=cmd_assess)

    def add_plan_flags(p):
        p.add_argument("--network", help="network JSON path (default: bundled demo network)")
        p.add_argument("--marginals", help="JSON path mapping link id to attack probability")
        p.add_argument("--reference-link", default="9",
                       help="calibration link when scaling marginals from ratios")
        p.add_argument("--reference-p", type=float, default=REFERENCE_ATTACK_PROBABILITY,
                       help="attack probability of the calibration link")
        p.add_argument("--reference-compat", action="store_true",
                       help="round scaled marginals to 2 decimals as the reference run did")
        p.add_argument("--dependency", help="dependency model JSON path")
        p.add_argument("--utility", choices=("binary", "length-penalty"),
                       default="length-penalty")
        p.add_argument("--x-util", type=float, default=100.0,
                       help="disutility scale of the length-penalty utility")

    p_plan = sub.add_parser("plan",
                            help="rank routes by expected utility")
    add_plan_flags(p_plan)
    p_plan.add_argument("--out", help="write the decision JSON here")
    p_plan.set_defaults(func=cmd_plan)

    p_walk = sub.add_parser("walk",
                            help="interactive sequential walk from source to sink")
    add_plan_flags(p_walk)
    p_walk.add_argument("--poc", choices=("upheld", "rejected"), default="upheld",
                        help="keep conditionalization or reject it")
    p_walk.add_argument("--w-clear", type=float, default=1.0,
                        help="weight on the clear hypothesis when rejecting")
    p_walk.add_argument("--w-incident", type=float, default=1.0,
                        help="weight on the incident hypothesis when rejecting")
    p_walk.add_argument("--propagation", choices=("adjacent", "all-downstream"),
                        default="adjacent",
                        help="which untraversed links a rejection reweights")
    p_walk.add_argument("--out", help="write the session transcript JSON here")
    p_walk.set_defaults(func=cmd_walk)

    p_rep = sub.add_parser("reproduce",
                           help="run the reference-compatible pipeline and compare")
    _add_sampler_flags(p_rep)
    _add_curve_flags(p_rep)
    p_rep.add_argument("--fine-integration", action="store_true",
                       help="use the fine grid; closed-form rows tighten to 1e-4")
    p_rep.add_argument("--json", help="write the report JSON here")
    p_rep.set_defaults(func=cmd_reproduce)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--store", help="session store directory (default: temporary)")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
