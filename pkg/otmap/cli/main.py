import argparse
import json
import os
import os.path as osp
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from otmap.apps import (
    bayes_lasso_transport,
    default_noise_variance,
    gibbs_lasso,
    kde_dump,
    lasso_map_estimate,
    load_regression_csv,
    sample_source,
    summarize_posterior,
    write_kde_csv,
    write_summary_csv,
)
from otmap.basis import build_multi_index_set
from otmap.map import compose_forward, compose_inverse, load_map, save_map
from otmap.solver import fit_dense, fit_sequential
from otmap.solver.config import WORKERS_ENV
from otmap.utils import (
    InvalidArgumentError,
    MethodType,
    NonConvergence,
    OtmapError,
    StageFitError,
    StructureType,
    dict2str,
    get_logger,
    read_samples_csv,
    set_log_level,
    write_records_csv,
    write_samples_csv,
)

from .config import (
    BasisSection,
    CompositionSection,
    FitDocument,
    LassoBasisSection,
    LassoDocument,
    SolverSection,
    load_config,
    merge_overrides,
    validate_document,
)

__all__ = ["EXIT_OK", "EXIT_ERROR", "EXIT_NONCONVERGED", "build_parser", "main"]

logger = get_logger()

EXIT_OK: int = 0
EXIT_ERROR: int = 1
EXIT_NONCONVERGED: int = 2

CFG: str = "cfg."
ADMM_FIELDS: Tuple[str, ...] = ("iter", "objective", "primal_res", "dual_res")
STAGE_FIELDS: Tuple[str, ...] = ("stage", "theta", "objective_train", "objective_holdout", "admm_iters")


def _default(model: type, name: str) -> Any:
    info = model.model_fields[name]
    if info.default_factory is not None:
        return f"${WORKERS_ENV} or 1" if name == "workers" else "see config"
    default = info.default
    return default.value if hasattr(default, "value") else default


def _flag(parser: argparse.ArgumentParser, flag: str, key: str, text: str, model: Optional[type] = None, **kwargs):
    """Add a flag overriding the config key `key`; its default is documented from `model`."""
    if model is not None:
        text = f"{text} (default: {_default(model, key.split('.')[-1])})"
    parser.add_argument(flag, dest=CFG + key, default=None, help=text, **kwargs)


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {key[len(CFG) :]: value for key, value in vars(args).items() if key.startswith(CFG)}


def _add_basis_flags(parser: argparse.ArgumentParser, model: type = BasisSection) -> None:
    _flag(parser, "--structure", "basis.structure", "Map structure", model, choices=[s.value for s in StructureType])
    _flag(parser, "--order", "basis.order", "Maximum total polynomial order", model, type=int)
    _flag(parser, "--family", "basis.family", "Univariate family", model, choices=["hermite", "monomial"])
    _flag(parser, "--max-terms", "basis.max_terms", "Cap on the number of basis terms K", model, type=int)


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    m = SolverSection
    _flag(parser, "--rho", "solver.rho", "ADMM penalty", m, type=float)
    _flag(parser, "--max-iters", "solver.max_iters", "ADMM iteration cap", m, type=int)
    _flag(parser, "--tol-primal", "solver.tol_primal", "Primal residual tolerance", m, type=float)
    _flag(parser, "--tol-dual", "solver.tol_dual", "Dual residual tolerance", m, type=float)
    _flag(parser, "--p-update", "solver.p_update", "Inner solver of the p-update", m, choices=["newton", "lbfgs"])
    _flag(parser, "--huber-width", "solver.huber_width", "Smoothing width of Laplace terms", m, type=float)
    _flag(parser, "--workers", "solver.workers", "Parallel sample shards", m, type=int)
    _flag(parser, "--seed", "solver.seed", "Random seed", m, type=int)
    _flag(parser, "--log-every", "solver.log_every", "Iterations between DEBUG progress lines", m, type=int)
    _flag(
        parser,
        "--strict-reduction",
        "solver.strict_reduction",
        "Reduce per-sample terms in sample order",
        m,
        action="store_const",
        const=True,
    )
    _flag(
        parser,
        "--no-standardize",
        "solver.standardize",
        "Evaluate the basis at raw inputs",
        action="store_const",
        const=False,
    )


def _add_composition_flags(parser: argparse.ArgumentParser) -> None:
    m = CompositionSection
    _flag(parser, "--stages", "composition.stages", "Maximum number of KR stages", m, type=int)
    _flag(parser, "--schedule", "composition.schedule", "Theta schedule", m, choices=["constant", "geometric"])
    _flag(parser, "--theta0", "composition.theta0", "Theta of the first stage", m, type=float)
    _flag(parser, "--ratio", "composition.ratio", "Geometric schedule ratio", m, type=float)
    _flag(parser, "--eps-stop", "composition.eps_stop", "Minimum holdout improvement per stage", m, type=float)
    _flag(parser, "--patience", "composition.patience", "Stages without improvement before stopping", m, type=int)
    _flag(parser, "--holdout", "composition.holdout_fraction", "Holdout share of the samples", m, type=float)
    _flag(
        parser,
        "--no-project",
        "composition.project",
        "Keep non-monotone stages instead of projecting them",
        action="store_const",
        const=False,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otmap",
        description="Fit, apply and invert polynomial transport maps by consensus ADMM.",
    )
    parser.add_argument(
        "--log-level",
        type=str,
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level; $OTMAP_LOG_LEVEL or INFO when omitted",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    fit = commands.add_parser(
        "fit", help="Fit a map pushing source samples to a target density", allow_abbrev=False
    )
    fit.add_argument("-c", "--config", type=str, default=None, help="JSON config document")
    _flag(fit, "--source", "source", "Source samples CSV, one sample per row")
    _flag(fit, "--out", "out", "Output map document")
    _flag(fit, "--diagnostics", "diagnostics", "Diagnostics CSV (default: <out>_diagnostics.csv)")
    _flag(fit, "--dim", "dim", "Expected dimension D, checked before the samples are read", type=int)
    _flag(fit, "--target", "target.kind", "Target density", choices=["gaussian-std", "gaussian", "laplace"])
    _flag(fit, "--target-rate", "target.rate", "Rate of a Laplace target", type=float)
    _add_basis_flags(fit)
    _add_solver_flags(fit)
    _add_composition_flags(fit)
    fit.set_defaults(func=cmd_fit)

    for name, func, text in (
        ("push", cmd_push, "Push samples through a map"),
        ("invert", cmd_invert, "Pull samples back through the inverse of a KR map"),
    ):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("-m", "--map", type=str, required=True, help="Map document")
        sub.add_argument("-s", "--samples", type=str, required=True, help="Samples CSV, one sample per row")
        sub.add_argument("-o", "--out", type=str, required=True, help="Output CSV")
        sub.set_defaults(func=func)

    sample = commands.add_parser("sample", help="Draw seeded samples from a built-in source")
    sample.add_argument(
        "--kind", type=str, required=True, choices=["laplace", "gaussian", "two-gaussian-mixture"], help="Source"
    )
    sample.add_argument("-n", "--num", type=int, required=True, help="Number of samples")
    sample.add_argument("--dim", type=int, default=None, help="Dimension")
    sample.add_argument("--seed", type=int, default=0, help="Random seed")
    sample.add_argument("--rate", type=float, default=1.0, help="Laplace rate")
    sample.add_argument("--shift", type=float, default=2.0, help="Mixture modes at -+shift on the first axis")
    sample.add_argument("--std", type=float, default=1.0, help="Mixture component standard deviation")
    sample.add_argument("--weight", type=float, default=0.5, help="Mixture weight of the first mode")
    sample.add_argument("-o", "--out", type=str, required=True, help="Output CSV")
    sample.set_defaults(func=cmd_sample)

    lasso = commands.add_parser(
        "lasso", help="Bayesian LASSO posterior by transport and/or Gibbs sampling", allow_abbrev=False
    )
    lasso.add_argument("-c", "--config", type=str, default=None, help="JSON config document")
    _flag(lasso, "--data", "data", "Regression CSV with a header row")
    _flag(lasso, "--response", "response", "Response column", LassoDocument)
    _flag(lasso, "--lambda", "lambda", "Laplace prior rate (required)", type=float)
    _flag(lasso, "--sigma2", "sigma2", "Noise variance (default: least-squares residual variance)", type=float)
    _flag(lasso, "--method", "method", "Posterior sampler", LassoDocument, choices=[m.value for m in MethodType])
    _flag(lasso, "--num-prior", "num_prior", "Prior samples of the transport fit", LassoDocument, type=int)
    _flag(lasso, "--burn-in", "burn_in", "Gibbs sweeps discarded", LassoDocument, type=int)
    _flag(lasso, "--n-samples", "n_samples", "Gibbs draws kept", LassoDocument, type=int)
    _flag(lasso, "--out-dir", "out_dir", "Output directory", LassoDocument)
    _flag(lasso, "--prefix", "prefix", "Output file prefix", LassoDocument)
    _flag(lasso, "--kde-grid", "kde_grid", "KDE grid points per coordinate", LassoDocument, type=int)
    _flag(
        lasso,
        "--no-lasso-estimate",
        "with_lasso",
        "Omit the `lasso` point-estimate column",
        action="store_const",
        const=False,
    )
    _add_basis_flags(lasso, LassoBasisSection)
    _add_solver_flags(lasso)
    _add_composition_flags(lasso)
    lasso.set_defaults(func=cmd_lasso)

    index_set = commands.add_parser("index-set", help="Print a multi-index set")
    index_set.add_argument("--structure", type=str, default="dense", choices=[s.value for s in StructureType])
    index_set.add_argument("--dim", type=int, required=True, help="Dimension D")
    index_set.add_argument("--order", type=int, required=True, help="Maximum total order O")
    index_set.add_argument("--max-terms", type=int, default=None, help="Cap on the number of terms")
    index_set.set_defaults(func=cmd_index_set)
    return parser


def _effective(model: type, args: argparse.Namespace) -> Tuple[Any, Dict[str, Any]]:
    document = merge_overrides(load_config(getattr(args, "config", None)), _overrides(args))
    parsed = validate_document(model, document)
    effective = parsed.model_dump(mode="json", by_alias=True)
    logger.info(f"Effective config: {dict2str(effective, format=True)}")
    return parsed, effective


def _provenance(effective: Dict[str, Any]) -> List[str]:
    return [f"config: {json.dumps(effective, sort_keys=True)}"]


def _default_diagnostics_path(out: str) -> str:
    return osp.splitext(out)[0] + "_diagnostics.csv"


def cmd_fit(args: argparse.Namespace) -> int:
    doc, effective = _effective(FitDocument, args)
    if doc.source is None or doc.out is None:
        raise InvalidArgumentError("fit needs --source and --out (or `source`/`out` in the config)")
    basis = doc.basis.build()
    if doc.dim is not None:
        basis.build(doc.dim)
    solver = doc.solver.build()

    samples, _ = read_samples_csv(doc.source, doc.dim)
    dim = samples.shape[1]
    target = doc.target.build(dim, solver.huber_width)
    diagnostics_path = doc.diagnostics or _default_diagnostics_path(doc.out)
    comments = _provenance(effective)

    if basis.structure == StructureType.DENSE:
        try:
            tmap, diagnostics = fit_dense(samples, target, basis, solver)
        except NonConvergence as err:
            tmap, diagnostics = err.result
        save_map(tmap, doc.out)
        write_records_csv(diagnostics_path, ADMM_FIELDS, diagnostics.to_rows(), comments)
        converged = diagnostics.converged
    else:
        try:
            seq = fit_sequential(samples, target, basis, doc.composition.build(), solver)
        except StageFitError as err:
            if err.partial is not None:
                save_map(err.partial, doc.out)
                logger.error(f"Wrote the {len(err.partial)} stages fitted before the failure to {doc.out}")
            raise
        save_map(seq, doc.out)
        write_records_csv(diagnostics_path, STAGE_FIELDS, [s.metadata for s in seq], comments)
        converged = all(s.metadata.get("converged", True) for s in seq)

    logger.info(f"Wrote {doc.out} and {diagnostics_path}")
    return EXIT_OK if converged else EXIT_NONCONVERGED


def _apply(args: argparse.Namespace, transform: Callable[[Any, np.ndarray], np.ndarray]) -> int:
    tmap = load_map(args.map)
    samples, header = read_samples_csv(args.samples, tmap.dim)
    write_samples_csv(args.out, transform(tmap, samples), header)
    logger.info(f"Wrote {samples.shape[0]} samples to {args.out}")
    return EXIT_OK


def cmd_push(args: argparse.Namespace) -> int:
    return _apply(args, compose_forward)


def cmd_invert(args: argparse.Namespace) -> int:
    return _apply(args, compose_inverse)


def cmd_sample(args: argparse.Namespace) -> int:
    samples = sample_source(
        args.kind,
        args.num,
        seed=args.seed,
        dim=args.dim,
        rate=args.rate,
        shift=args.shift,
        std=args.std,
        weight=args.weight,
    )
    write_samples_csv(args.out, samples, [f"x{j}" for j in range(samples.shape[1])])
    logger.info(f"Wrote {samples.shape[0]} {args.kind} samples to {args.out}")
    return EXIT_OK


def _write_posterior(
    doc: LassoDocument,
    method: MethodType,
    samples: np.ndarray,
    names: Sequence[str],
    lasso: Optional[np.ndarray],
    comments: List[str],
) -> None:
    stem = osp.join(doc.out_dir, f"{doc.prefix}_{method.value}")
    write_samples_csv(f"{stem}_samples.csv", samples, names)
    write_summary_csv(f"{stem}_summary.csv", summarize_posterior(samples, method, names), lasso, comments)
    write_kde_csv(f"{stem}_kde.csv", kde_dump(samples, doc.kde_grid), names)
    logger.info(f"Wrote {stem}_samples.csv, {stem}_summary.csv and {stem}_kde.csv")


def cmd_lasso(args: argparse.Namespace) -> int:
    doc, effective = _effective(LassoDocument, args)
    if doc.data is None:
        raise InvalidArgumentError("lasso needs --data (or `data` in the config)")
    if doc.rate is None:
        raise InvalidArgumentError("lasso needs --lambda (or `lambda` in the config)")

    dataset = load_regression_csv(doc.data, doc.response)
    noise_variance = doc.noise_variance if doc.noise_variance is not None else default_noise_variance(dataset)
    effective["sigma2"] = noise_variance
    comments = _provenance(effective)
    lasso = lasso_map_estimate(dataset, doc.rate, noise_variance) if doc.with_lasso else None
    os.makedirs(doc.out_dir, exist_ok=True)

    converged = True
    if doc.method in (MethodType.TRANSPORT, MethodType.BOTH):
        result = bayes_lasso_transport(
            dataset,
            doc.rate,
            noise_variance,
            doc.num_prior,
            doc.basis.order,
            doc.basis.structure,
            doc.solver.build(),
            doc.composition.build(),
        )
        save_map(result.map, osp.join(doc.out_dir, f"{doc.prefix}_map.json"))
        if result.diagnostics is not None:
            converged = result.diagnostics.converged
        _write_posterior(doc, MethodType.TRANSPORT, result.samples, dataset.names, lasso, comments)
    if doc.method in (MethodType.GIBBS, MethodType.BOTH):
        draws = gibbs_lasso(dataset, doc.rate, noise_variance, doc.burn_in, doc.n_samples, doc.solver.seed)
        _write_posterior(doc, MethodType.GIBBS, draws, dataset.names, lasso, comments)
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_index_set(args: argparse.Namespace) -> int:
    kwargs = {} if args.max_terms is None else {"max_terms": args.max_terms}
    index_set = build_multi_index_set(args.structure, args.dim, args.order, **kwargs)
    print(f"structure={index_set.structure.value} D={index_set.dim} O={index_set.order} K={index_set.size}")
    if index_set.row_sizes is not None:
        print(f"row sizes: {list(index_set.row_sizes)}")
    for k, index in enumerate(index_set.indices):
        print(f"{k}: {tuple(int(j) for j in index)}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the `otmap` command.

    Returns:
        int: 0 on success, 1 on a config, IO or library error, 2 when a fit wrote a non-converged iterate.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level is not None:
        set_log_level(args.log_level)

    try:
        return args.func(args)
    except (OtmapError, OSError, ValueError) as err:
        print(f"otmap {args.command}: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
