"""Command line front end: experiment subcommands with CSV output.

Subcommands::

    gen         write an artificial dataset as LIBSVM text
    bounds      expected-smoothness curves (exact + three estimates) vs b
    stepsizes   step size curves vs b (incl. the Hofmann et al. formula)
    complexity  total-complexity curves and their affine g/h components
    run         one SAGA run with resolved (b, gamma), trace CSV
    grid        empirical total complexity over a power-of-two b grid
    bernstein   Monte-Carlo check of the matrix concentration bound

Every CSV starts with ``#`` comment lines recording the resolved settings;
floats are serialized with 17 significant digits.  Exit codes: 0 success,
1 non-convergence, 2 usage or I/O errors.
"""

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import expsmooth, tuning
from .bernstein import bernstein_check, center_ensemble
from .data import generate_artificial, parse_libsvm, rotate, standardize_features, write_libsvm
from .errors import IntractableError, SagatuneError
from .glm import GLMProblem
from .smoothness import compute_profile
from .solver import (
    STATUS_CONVERGED,
    SolverConfig,
    compute_reference_solution,
    run_saga,
)

GEN_KINDS = {
    "uniform": "uniform",
    "alone": "alone_eigval",
    "staircase": "staircase_eigval",
}
LARGE_N_THRESHOLD = 1000
GRID_MAX_POWER = 14


def _warn(message):
    print("warning: %s" % message, file=sys.stderr)


def _fmt(value):
    if value is None:
        return ""
    return "%.17g" % value


def _emit(path, comments, header, rows):
    lines = ["# %s" % c for c in comments]
    lines.append(header)
    lines.extend(rows)
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


def _parse_gen_spec(spec):
    parts = spec.split(":")
    if len(parts) not in (2, 3) or parts[0] not in GEN_KINDS:
        raise SagatuneError(
            "--gen expects kind:n[:d] with kind in %s" % "|".join(GEN_KINDS)
        )
    kind = GEN_KINDS[parts[0]]
    n = int(parts[1])
    if len(parts) == 3:
        d = int(parts[2])
    elif kind == "uniform":
        raise SagatuneError("--gen uniform:n:d requires an explicit d")
    else:
        d = n
    return kind, n, d


def _load_dataset(args):
    if args.data:
        with open(args.data) as handle:
            ds = parse_libsvm(handle.read())
    else:
        kind, n, d = _parse_gen_spec(args.gen)
        ds = generate_artificial(kind, n, d, args.seed)
    if args.scale:
        ds = standardize_features(ds)
    if args.rotate:
        ds = rotate(ds, args.seed)
    return ds


def _make_problem(args):
    ds = _load_dataset(args)
    return GLMProblem(ds, args.loss, args.lam)


def _dataset_comments(args):
    source = args.data if args.data else "--gen %s" % args.gen
    return [
        "source=%s loss=%s lambda=%.17g scale=%s rotate=%s seed=%d"
        % (source, args.loss, args.lam, args.scale, args.rotate, args.seed)
    ]


def _batch_grid(n):
    if n <= LARGE_N_THRESHOLD:
        return list(range(1, n + 1))
    points = np.unique(
        np.round(np.logspace(0.0, math.log10(n), 60)).astype(int)
    )
    points = points[(points >= 1) & (points <= n)]
    return sorted(set(points.tolist()) | {1, n})


def _exact_column(problem, batch_sizes, cap):
    values = {}
    skipped = []
    for b in batch_sizes:
        try:
            values[b] = expsmooth.exact_expected_smoothness(problem, b, cap=cap)
        except IntractableError:
            skipped.append(b)
    if skipped:
        _warn(
            "exact value skipped for b in %s (enumeration over cap %d)"
            % (skipped, cap)
        )
    return values


def cmd_gen(args):
    kind, n, d = _parse_gen_spec(args.gen)
    ds = generate_artificial(kind, n, d, args.seed)
    text = write_libsvm(ds)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as handle:
            handle.write(text)
    return 0


def cmd_bounds(args):
    problem = _make_problem(args)
    profile = compute_profile(problem)
    batch_sizes = _batch_grid(problem.n)
    exact = _exact_column(problem, batch_sizes, args.exact_cap)
    rows = []
    for b in batch_sizes:
        rows.append(
            "%d,%s,%s,%s,%s"
            % (
                b,
                _fmt(exact.get(b)),
                _fmt(expsmooth.simple_bound(profile, b)),
                _fmt(expsmooth.bernstein_bound(profile, b)),
                _fmt(expsmooth.practical_estimate(profile, b)),
            )
        )
    comments = ["sagatune bounds"] + _dataset_comments(args)
    comments.append("profile: " + profile.csv_row())
    _emit(args.out, comments, "b,exact,simple,bernstein,practical", rows)
    return 0


def cmd_stepsizes(args):
    problem = _make_problem(args)
    profile = compute_profile(problem)
    batch_sizes = _batch_grid(problem.n)
    exact = _exact_column(problem, batch_sizes, args.exact_cap)
    rows = []
    for b in batch_sizes:
        gamma_exact = None
        if b in exact:
            gamma_exact = tuning.step_size(exact[b], profile, b)
        rows.append(
            "%d,%s,%s,%s,%s,%s"
            % (
                b,
                _fmt(tuning.step_size(expsmooth.simple_bound(profile, b), profile, b)),
                _fmt(
                    tuning.step_size(expsmooth.bernstein_bound(profile, b), profile, b)
                ),
                _fmt(
                    tuning.step_size(
                        expsmooth.practical_estimate(profile, b), profile, b
                    )
                ),
                _fmt(gamma_exact),
                _fmt(tuning.hofmann_step_size(profile, b)),
            )
        )
    comments = ["sagatune stepsizes"] + _dataset_comments(args)
    _emit(
        args.out,
        comments,
        "b,gamma_simple,gamma_bernstein,gamma_practical,gamma_exact,gamma_hofmann",
        rows,
    )
    return 0


def cmd_complexity(args):
    problem = _make_problem(args)
    profile = compute_profile(problem)
    rows = []
    for b in _batch_grid(problem.n):
        g_simple, h = tuning.complexity_components(profile, b, "simple")
        rows.append(
            "%d,%s,%s,%s,%s,%s"
            % (
                b,
                _fmt(
                    tuning.complexity(
                        expsmooth.simple_bound(profile, b), profile, b
                    )[1]
                ),
                _fmt(
                    tuning.complexity(
                        expsmooth.bernstein_bound(profile, b), profile, b
                    )[1]
                ),
                _fmt(
                    tuning.complexity(
                        expsmooth.practical_estimate(profile, b), profile, b
                    )[1]
                ),
                _fmt(g_simple),
                _fmt(h),
            )
        )
    comments = ["sagatune complexity"] + _dataset_comments(args)
    comments.append(
        "b_simple=%d b_bernstein=%d b_practical=%d"
        % (
            tuning.optimal_b_simple(profile),
            tuning.optimal_b_bernstein(profile),
            tuning.optimal_b_practical(profile),
        )
    )
    _emit(
        args.out,
        comments,
        "b,Ktotal_simple,Ktotal_bernstein,Ktotal_practical,g,h",
        rows,
    )
    return 0


def _resolve_batch(args, problem, profile):
    spec = args.b
    if spec == "practical":
        return tuning.optimal_b_practical(profile)
    if spec == "simple":
        return tuning.optimal_b_simple(profile)
    if spec == "bernstein":
        return tuning.optimal_b_bernstein(profile)
    b = int(spec)
    if not 1 <= b <= problem.n:
        raise SagatuneError("--b %d out of range [1, %d]" % (b, problem.n))
    return b


def _resolve_run_settings(args, problem, profile):
    """Map --b/--gamma to a concrete (b, gamma); the named presets
    defazio and hofmann fix the batch size as well."""
    gamma_spec = args.gamma
    if gamma_spec == "defazio":
        b = 1
        return b, tuning.defazio_step_size(profile)
    if gamma_spec == "hofmann":
        b = min(20, problem.n)
        if b < 20:
            _warn("hofmann preset clamps b=20 to n=%d" % problem.n)
        return b, b / (problem.n * profile.mu)
    b = _resolve_batch(args, problem, profile)
    if gamma_spec.startswith("fixed:"):
        return b, float(gamma_spec.split(":", 1)[1])
    cfg = SolverConfig(b=b, gamma=gamma_spec, exact_cap=args.exact_cap)
    from .solver import resolve_step_size

    return b, resolve_step_size(problem, cfg, profile=profile)


def _predicted_total(problem, profile, b, gamma_spec, tol, cap):
    """K_total prediction at precision tol, using the curve matching the
    step size policy when there is one (practical otherwise)."""
    kind = gamma_spec if gamma_spec in ("simple", "bernstein", "exact") else "practical"
    if kind == "exact":
        try:
            cl = expsmooth.exact_expected_smoothness(problem, b, cap=cap)
        except IntractableError:
            cl = expsmooth.practical_estimate(profile, b)
            kind = "practical"
    elif kind == "simple":
        cl = expsmooth.simple_bound(profile, b)
    elif kind == "bernstein":
        cl = expsmooth.bernstein_bound(profile, b)
    else:
        cl = expsmooth.practical_estimate(profile, b)
    return tuning.complexity(cl, profile, b, epsilon=tol)[1], kind


def cmd_run(args):
    problem = _make_problem(args)
    profile = compute_profile(problem)
    b, gamma = _resolve_run_settings(args, problem, profile)
    ref = compute_reference_solution(problem)
    if not ref.converged:
        _warn(
            "reference solution stopped at grad norm %.3g after %d iterations"
            % (ref.grad_inf_norm, ref.iterations)
        )
    cfg = SolverConfig(
        b=b,
        gamma=gamma,
        max_epochs=args.max_epochs,
        tol=args.tol,
        seed=args.seed,
        exact_cap=args.exact_cap,
    )
    trace = run_saga(problem, cfg, ref, profile=profile)
    predicted, kind = _predicted_total(
        problem, profile, b, args.gamma, args.tol, args.exact_cap
    )
    comments = ["sagatune run"] + _dataset_comments(args)
    comments.append(
        "b=%d gamma=%.17g policy=%s tol=%.17g" % (b, gamma, args.gamma, args.tol)
    )
    comments.append("Ktotal_prediction=%.17g (%s curve)" % (predicted, kind))
    _emit(args.out, comments, "epoch,rel_subopt,grad_evals,seconds", trace.csv_rows())
    print(
        "status: %s (rel_subopt=%.3g, grad_evals=%d)"
        % (trace.status, trace.final_rel_subopt, trace.grad_evals),
        file=sys.stderr,
    )
    return 0 if trace.status == STATUS_CONVERGED else 1


def cmd_grid(args):
    problem = _make_problem(args)
    profile = compute_profile(problem)
    n = problem.n
    grid = [2**i for i in range(GRID_MAX_POWER + 1)]
    skipped = [b for b in grid if b > n]
    if skipped:
        _warn("grid points above n=%d skipped: %s" % (n, skipped))
    grid = sorted({b for b in grid if b <= n} | {n})
    ref = compute_reference_solution(problem)
    if not ref.converged:
        _warn(
            "reference solution stopped at grad norm %.3g after %d iterations"
            % (ref.grad_inf_norm, ref.iterations)
        )

    def one_row(run_id, b):
        gamma = tuning.step_size(
            expsmooth.practical_estimate(profile, b), profile, b
        )
        cfg = SolverConfig(
            b=b,
            gamma=gamma,
            max_epochs=args.max_epochs,
            tol=args.tol,
            seed=args.seed,
        )
        trace = run_saga(problem, cfg, ref, run_id=run_id, profile=profile)
        predicted = tuning.complexity(
            expsmooth.practical_estimate(profile, b), profile, b, epsilon=args.tol
        )[1]
        empirical = trace.grad_evals if trace.status == STATUS_CONVERGED else None
        return "%d,%s,%s,%s,%s" % (
            b,
            _fmt(gamma),
            _fmt(empirical),
            _fmt(predicted),
            trace.status,
        )

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        rows = list(pool.map(one_row, range(len(grid)), grid))
    comments = ["sagatune grid"] + _dataset_comments(args)
    comments.append(
        "tol=%.17g b_practical=%d" % (args.tol, tuning.optimal_b_practical(profile))
    )
    _emit(args.out, comments, "b,gamma,emp_grad_evals,Ktotal_prediction,status", rows)
    return 0


def cmd_bernstein(args):
    rng = np.random.default_rng(args.seed)
    raw = rng.uniform(-1.0, 1.0, size=(args.members, args.dim, args.dim))
    members = 0.5 * (raw + raw.transpose(0, 2, 1))
    ensemble = center_ensemble(members)
    m_draws = args.draws if args.draws is not None else max(1, args.members // 2)
    report = bernstein_check(ensemble, m_draws, args.trials, args.seed)
    comments = [
        "sagatune bernstein",
        "dim=%d members=%d draws=%d trials=%d seed=%d"
        % (args.dim, args.members, m_draws, args.trials, args.seed),
    ]
    _emit(
        args.out,
        comments,
        "d,set_size,m_draws,trials,empirical,bound,pass",
        [report.csv_row()],
    )
    return 0


def _add_dataset_arguments(parser):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--data", help="LIBSVM text file")
    source.add_argument("--gen", help="artificial dataset spec kind:n[:d]")
    parser.add_argument("--loss", choices=("ridge", "logistic"), default="ridge")
    parser.add_argument(
        "--lambda", dest="lam", type=float, default=0.0, help="regularization"
    )
    parser.add_argument(
        "--scale", action="store_true", help="standardize features first"
    )
    parser.add_argument(
        "--rotate", action="store_true", help="conjugate by a random rotation"
    )


def _add_common_arguments(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sagatune",
        description="mini-batch SAGA tuning from expected-smoothness bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write an artificial dataset as LIBSVM text")
    p.add_argument("--gen", required=True, help="kind:n[:d]")
    _add_common_arguments(p)
    p.set_defaults(func=cmd_gen)

    for name, func in (
        ("bounds", cmd_bounds),
        ("stepsizes", cmd_stepsizes),
        ("complexity", cmd_complexity),
    ):
        p = sub.add_parser(name, help="per-b %s CSV" % name)
        _add_dataset_arguments(p)
        _add_common_arguments(p)
        p.add_argument(
            "--exact-cap",
            type=int,
            default=expsmooth.ENUMERATION_CAP,
            help="enumeration budget for the exact constant",
        )
        p.set_defaults(func=func)

    p = sub.add_parser("run", help="one SAGA run")
    _add_dataset_arguments(p)
    _add_common_arguments(p)
    p.add_argument("--b", default="practical", help="batch size or policy")
    p.add_argument(
        "--gamma",
        default="practical",
        help="practical|simple|bernstein|exact|defazio|hofmann|fixed:<x>",
    )
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-epochs", type=int, default=500)
    p.add_argument("--exact-cap", type=int, default=expsmooth.ENUMERATION_CAP)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grid", help="empirical complexity over a b grid")
    _add_dataset_arguments(p)
    _add_common_arguments(p)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-epochs", type=int, default=500)
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("bernstein", help="matrix concentration checker")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--members", type=int, default=12)
    p.add_argument("--draws", type=int, default=None)
    p.add_argument("--trials", type=int, default=10_000)
    _add_common_arguments(p)
    p.set_defaults(func=cmd_bernstein)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SagatuneError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
