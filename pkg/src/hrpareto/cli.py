"""JSON-in, JSON-out command line front end.

Input is a model document ``{"d": int, "theta"?: [[...]], "gamma"?: [[...]],
"mu"?: [...]}`` read from a file argument or stdin. Output is a single JSON
document on stdout with floats serialized to 17 significant digits, so runs
are byte-identical given identical inputs and seeds. Errors produce a
machine-readable ``{"error": {"code", "message"}}`` on stderr with exit
code 1 for validation/domain problems and 2 for numerical failures.

Vertex and coordinate labels in CLI output are 1-based; the Python API
underneath is 0-based.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from functools import cached_property

import numpy as np

from . import classification as _classify
from . import graphs as _graphs
from . import hr as _hr
from . import oracle as _oracle
from . import probe as _probe
from .errors import (
    HrParetoError,
    InputError,
    NotIntegrableError,
    NumericalError,
)
from .linalg import certify_s1_plus, pseudo_determinant, pseudo_inverse, symmetrize

DEFAULT_TOL = 1e-9
DEFAULT_SEED = 0
DEFAULT_SAMPLES = 100_000

_DOCUMENT_KEYS = {"d", "theta", "gamma", "mu"}
_PROBE_T_VALUES = (1.5, 2.0, 10.0)
_PROBE_POINTS = 100
_RESIDUAL_THRESHOLD = 0.1


# ---------------------------------------------------------------------------
# Deterministic JSON emission (17 significant digits for floats)
# ---------------------------------------------------------------------------

def _format_number(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise InputError("non-finite number reached the output serializer")
    return format(float(x), ".17g")


def emit_json(obj) -> str:
    """Serialize to JSON with round-trip-exact float formatting."""
    parts = []
    _emit(obj, parts)
    return "".join(parts)


def _emit(obj, parts: list) -> None:
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(_format_number(float(obj)))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        parts.append("[")
        for idx, item in enumerate(seq):
            if idx:
                parts.append(",")
            _emit(item, parts)
        parts.append("]")
    elif isinstance(obj, dict):
        parts.append("{")
        for idx, (key, value) in enumerate(obj.items()):
            if idx:
                parts.append(",")
            parts.append(json.dumps(str(key)))
            parts.append(":")
            _emit(value, parts)
        parts.append("}")
    else:
        raise InputError(f"cannot serialize value of type {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Document parsing
# ---------------------------------------------------------------------------

def _parse_matrix(obj, d: int, name: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != d:
        raise InputError(f"'{name}' must be a {d} x {d} array of arrays")
    rows = []
    for row in obj:
        if not isinstance(row, list) or len(row) != d:
            raise InputError(f"'{name}' must be rectangular with {d} columns per row")
        rows.append([_parse_scalar(v, name) for v in row])
    return np.array(rows, dtype=float)


def _parse_scalar(v, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"'{name}' entries must be numbers")
    x = float(v)
    if not math.isfinite(x):
        raise InputError(f"'{name}' entries must be finite")
    return x


class ModelContext:
    """Parsed document plus lazily derived parameterizations."""

    def __init__(self, raw, tol: float):
        if not isinstance(raw, dict):
            raise InputError("input document must be a JSON object")
        unknown = set(raw) - _DOCUMENT_KEYS
        if unknown:
            raise InputError(f"unknown document keys: {sorted(unknown)}")
        if "d" not in raw or isinstance(raw["d"], bool) or not isinstance(raw["d"], int):
            raise InputError("document needs an integer dimension 'd'")
        self.d = raw["d"]
        if self.d < 2:
            raise InputError("dimension 'd' must be at least 2")
        self.tol = tol
        self.theta_raw = (
            _parse_matrix(raw["theta"], self.d, "theta") if "theta" in raw else None
        )
        self.gamma_raw = (
            _parse_matrix(raw["gamma"], self.d, "gamma") if "gamma" in raw else None
        )
        if self.theta_raw is None and self.gamma_raw is None:
            raise InputError("document needs at least one of 'theta' or 'gamma'")
        if "mu" in raw:
            mu = raw["mu"]
            if not isinstance(mu, list) or len(mu) != self.d:
                raise InputError(f"'mu' must be an array of length {self.d}")
            self.mu_raw = np.array([_parse_scalar(v, "mu") for v in mu])
        else:
            self.mu_raw = None

    @cached_property
    def theta(self) -> _hr.PrecisionMatrix:
        if self.theta_raw is not None:
            return _hr.PrecisionMatrix.from_matrix(self.theta_raw, self.tol)
        return _hr.gamma_to_theta(self.variogram, self.tol)

    @property
    def theta_source(self) -> str:
        return "document" if self.theta_raw is not None else "converted_from_gamma"

    @cached_property
    def variogram(self) -> _hr.VariogramMatrix:
        if self.gamma_raw is not None:
            return _hr.VariogramMatrix.from_matrix(self.gamma_raw, self.tol)
        return _hr.theta_to_gamma(self.theta, self.tol)

    def params(self, require_document_mu: bool = False):
        """GhrParams with the document mu, or mu_hr as a labeled fallback."""
        if self.mu_raw is not None:
            return _hr.GhrParams(self.mu_raw, self.theta), "document"
        if require_document_mu:
            raise InputError("this command needs 'mu' in the input document")
        return _hr.GhrParams(_hr.mu_hr(self.theta, self.tol), self.theta), "mu_hr"


# ---------------------------------------------------------------------------
# Subcommand handlers (return payload dict and exit code)
# ---------------------------------------------------------------------------

def _mc_dict(est: _oracle.McEstimate) -> dict:
    return {
        "value": est.value,
        "std_error": est.std_error,
        "n": est.n,
        "seed": est.seed,
        "max_weight_ratio": est.max_weight_ratio,
    }


def _cmd_validate(model: ModelContext, args) -> tuple:
    out = {}
    theta_sec = {"present": model.theta_raw is not None}
    if model.theta_raw is not None:
        try:
            cert = certify_s1_plus(symmetrize(model.theta_raw), model.tol)
            reasons = []
            if not cert.in_s1:
                reasons.append("NotS1")
            if not cert.in_s1_plus:
                reasons.extend(_classify.spectral_reasons(cert))
            theta_sec.update(
                in_s1=cert.in_s1,
                in_s1_plus=cert.in_s1_plus,
                rank=cert.rank,
                eigenvalues=list(cert.eigenvalues),
                reasons=reasons,
            )
        except HrParetoError as exc:
            theta_sec.update(in_s1=False, in_s1_plus=False, reasons=[_error_code(exc)])
    out["theta"] = theta_sec

    gamma_sec = {"present": model.gamma_raw is not None}
    if model.gamma_raw is not None:
        try:
            _hr.VariogramMatrix.from_matrix(model.gamma_raw, model.tol)
            gamma_sec.update(valid=True, reasons=[])
        except HrParetoError as exc:
            gamma_sec.update(valid=False, reasons=[_error_code(exc)], message=str(exc))
    out["gamma"] = gamma_sec
    return out, 0


def _cmd_convert(model: ModelContext, args) -> tuple:
    if args.to == "gamma":
        if model.theta_raw is None:
            raise InputError("convert --to gamma needs 'theta' in the document")
        gamma = _hr.theta_to_gamma(model.theta, model.tol)
        return {"gamma": gamma.gamma.tolist()}, 0
    if model.gamma_raw is None:
        raise InputError("convert --to theta needs 'gamma' in the document")
    theta = _hr.gamma_to_theta(model.variogram, model.tol)
    return {"theta": theta.theta.tolist()}, 0


def _cmd_mu(model: ModelContext, args) -> tuple:
    diag = _hr.mu_diagnostics(model.theta, model.tol)
    return {
        "mu": list(diag.mu),
        "mu_printed_formula": list(diag.mu_printed),
        "formulas_agree": diag.formulas_agree,
        "gamma_solved": diag.gamma_solved,
        "claimed_gamma_scalar": diag.claimed_gamma_scalar,
        "gamma_times_printed_minus_one": list(diag.gamma_of_printed),
        "theta_source": model.theta_source,
    }, 0


def _cmd_classify(model: ModelContext, args) -> tuple:
    params, _ = model.params(require_document_mu=True)
    result = _classify.classify(params, args.tol)
    return {
        "tag": result.tag,
        "reasons": list(result.reasons),
        "homogeneity_degree": result.homogeneity_degree,
    }, 0


def _cmd_density(model: ModelContext, args) -> tuple:
    point = [float(v) for v in args.point.split(",")]
    if len(point) != model.d:
        raise InputError(f"--point needs {model.d} comma-separated values")
    params, mu_source = model.params()
    log_value = _hr.log_density_unnormalized(params, point)
    density = math.exp(log_value) if log_value < 700.0 else None
    return {
        "point": point,
        "log_density": log_value,
        "density": density,
        "mu_source": mu_source,
    }, 0


def _cmd_marginals(model: ModelContext, args) -> tuple:
    params, mu_source = model.params()
    logs = [_hr.log_marginal_integral_k(params, k, model.tol) for k in range(model.d)]
    ratios = [
        [_hr.exceedance_ratio(params, k, el, model.tol) for el in range(model.d)]
        for k in range(model.d)
    ]
    return {
        "marginal_integrals": [math.exp(v) for v in logs],
        "log_marginal_integrals": logs,
        "exceedance_ratios": ratios,
        "mu_source": mu_source,
    }, 0


def _cmd_mass(model: ModelContext, args) -> tuple:
    params, mu_source = model.params()
    total = _oracle.estimate_total_mass(params, args.samples, args.seed, model.tol)
    marginals = [
        _oracle.estimate_marginal_mass(params, k, args.samples, args.seed, model.tol)
        for k in range(model.d)
    ]
    probs = []
    for est in marginals:
        ratio = est.value / total.value
        rel = math.sqrt(
            (est.std_error / est.value) ** 2 + (total.std_error / total.value) ** 2
        )
        probs.append({"value": ratio, "std_error": abs(ratio) * rel})
    return {
        "total_mass": _mc_dict(total),
        "marginal_masses": [_mc_dict(e) for e in marginals],
        "exceedance_probabilities": probs,
        "mu_source": mu_source,
    }, 0


def _cmd_graph(model: ModelContext, args) -> tuple:
    graph = _graphs.extremal_graph(model.theta, model.tol)
    flags = _graphs.check_pi2(graph)
    edges = sorted([i + 1, j + 1] for i, j in graph.edges)
    return {
        "vertices": model.d,
        "index_base": 1,
        "edges": edges,
        "connected": flags.connected,
        "every_edge_on_odd_cycle": flags.every_edge_on_odd_cycle,
    }, 0


def _cmd_probe(model: ModelContext, args) -> tuple:
    stat = _probe.StatFn.parse(args.stats)
    params, mu_source = model.params()
    family = _probe.PairwiseFamilySpec.uniform(stat, params.mu, model.theta.theta)
    scan = _probe.homogeneity_residual_scan(
        family, _PROBE_T_VALUES, _PROBE_POINTS, args.seed
    )
    return {
        "stats": args.stats,
        "max_residual": scan.max_residual,
        "worst_point": list(scan.worst_point),
        "worst_t": scan.worst_t,
        "n_points": scan.n_points,
        "t_values": list(scan.t_values),
        "threshold": _RESIDUAL_THRESHOLD,
        "exceeds_threshold": scan.max_residual > _RESIDUAL_THRESHOLD,
        "support_connected": family.support_connected,
        "mu_source": mu_source,
    }, 0


# ---------------------------------------------------------------------------
# verify: the full invariant suite
# ---------------------------------------------------------------------------

def _cmd_verify(model: ModelContext, args) -> tuple:
    checks = []

    def run(name: str, applicable: bool, fn) -> None:
        if not applicable:
            checks.append({"name": name, "status": "skipped", "detail": "not applicable"})
            return
        try:
            ok, detail = fn()
        except HrParetoError as exc:
            ok, detail = False, f"{_error_code(exc)}: {exc}"
        checks.append(
            {"name": name, "status": "pass" if ok else "fail", "detail": detail}
        )

    tol = model.tol
    theta = None
    try:
        theta = model.theta
    except HrParetoError as exc:
        checks.append(
            {"name": "theta_in_s1", "status": "fail", "detail": f"{_error_code(exc)}: {exc}"}
        )
    if theta is not None:
        cert = theta.certificate
        run("theta_in_s1", True, lambda: (cert.in_s1, f"rank {cert.rank}"))
        # S1+ membership is a property of the input, not an invariant: the
        # certification outcome is recorded and gates the dependent checks.
        run(
            "theta_certification",
            True,
            lambda: (
                True,
                "S1+ certified"
                if cert.in_s1_plus
                else f"not S1+: {_classify.spectral_reasons(cert)}",
            ),
        )
        plus = cert.in_s1_plus

        def round_trip():
            gamma = _hr.theta_to_gamma(theta, tol)
            back = _hr.gamma_to_theta(gamma, tol)
            err = float(np.max(np.abs(back.theta - theta.theta)))
            bound = 1e-8 * max(1.0, float(np.max(np.abs(theta.theta))))
            return err < bound, f"max entry error {err:.3e}"

        run("theta_gamma_round_trip", plus, round_trip)

        def involution():
            twice = pseudo_inverse(pseudo_inverse(theta.theta, tol), tol)
            err = float(np.max(np.abs(twice - theta.theta)))
            return err < 1e-8 * max(1.0, float(np.max(np.abs(theta.theta)))), (
                f"max entry error {err:.3e}"
            )

        run("pseudo_inverse_involution", plus, involution)

        def variogram_ok():
            _ = model.variogram
            return True, "invariants hold"

        run("variogram_invariants", plus or model.gamma_raw is not None, variogram_ok)

        mu_star = _hr.mu_hr(theta, tol) if plus else None

        def mu_system():
            gamma = model.variogram.gamma
            vec = gamma @ (mu_star - 1.0)
            dev = float(np.max(np.abs(vec - vec.mean())))
            norm_err = abs(float((mu_star - 1.0).sum()) - 1.0)
            return dev < 1e-8 and norm_err < 1e-12, (
                f"constant-vector deviation {dev:.3e}, normalization error {norm_err:.3e}"
            )

        run("mu_linear_system", plus, mu_system)

        def marginal_equality():
            params = _hr.GhrParams(mu_star, theta)
            logs = [_hr.log_marginal_integral_k(params, k, tol) for k in range(model.d)]
            spread = max(logs) - min(logs)
            return spread < 1e-9, f"log-mass spread {spread:.3e}"

        run("marginal_standardization", plus, marginal_equality)

        def det_invariance():
            dets = [_hr.det_theta_k(theta, k, tol) for k in range(model.d)]
            spread = (max(dets) - min(dets)) / max(dets)
            constant = model.d * dets[0] / pseudo_determinant(theta.theta, tol)
            return spread < 1e-9, (
                f"relative spread {spread:.3e}; d*det/pdet = {constant:.12f}"
            )

        run("det_k_invariance", plus, det_invariance)

        def sigma_tilde():
            gamma = model.variogram
            worst = 0.0
            for k in range(model.d):
                tilde = _hr.sigma_tilde_k(gamma, k)
                sub = np.delete(np.delete(tilde, k, 0), k, 1)
                worst = max(worst, float(np.max(np.abs(sub - _hr.sigma_k(theta, k, tol)))))
            return worst < 1e-9, f"max deviation {worst:.3e}"

        run("sigma_tilde_consistency", plus, sigma_tilde)

        params = None
        if model.mu_raw is not None:
            params = _hr.GhrParams(model.mu_raw, theta)
        elif plus:
            params = _hr.GhrParams(mu_star, theta)

        def homogeneity():
            grid = _probe.residual_grid(model.d, 20, args.seed)
            degree = _classify.homogeneity_degree(params)
            worst = 0.0
            for y in grid:
                base = _hr.log_density_unnormalized(params, y)
                for t in _PROBE_T_VALUES:
                    shifted = _hr.log_density_unnormalized(params, t * y)
                    worst = max(worst, abs(shifted - base + degree * math.log(t)))
            return worst < 1e-12, f"max residual {worst:.3e} (degree {degree:.6f})"

        run("log_homogeneity_identity", params is not None, homogeneity)

        def quad_difference():
            gamma = model.variogram.gamma
            p_star = _hr.GhrParams(mu_star, theta)
            worst = 0.0
            for k in range(model.d):
                for el in range(k + 1, model.d):
                    qk = math.log(_hr.exceedance_ratio(p_star, k, el, tol))
                    rhs = float((gamma[k] - gamma[el]) @ (mu_star - 1.0))
                    worst = max(worst, abs(4.0 * qk - rhs))
            return worst < 1e-9, f"max identity violation {worst:.3e}"

        run("quadratic_difference_identity", plus, quad_difference)

        def classification_agreement():
            tag = _classify.classify(params, args.tol).tag
            via_masses = _classify.is_mp_density(params, args.tol)
            agree = (tag == _classify.TAG_HR_DENSITY) == via_masses
            return agree, f"classify: {tag}, marginal-mass route: {via_masses}"

        run("classification_consistency", params is not None, classification_agreement)

        integrable = False
        if params is not None:
            try:
                _hr.log_marginal_integral_k(params, 0, tol)
                integrable = True
            except NotIntegrableError:
                integrable = False

        def mc_marginals():
            worst = 0.0
            for k in range(model.d):
                est = _oracle.estimate_marginal_mass(params, k, args.samples, args.seed, tol)
                closed = _hr.marginal_integral_k(params, k, tol)
                worst = max(worst, abs(est.value - closed) / est.std_error)
            return worst <= 4.0, f"worst |estimate - closed form| = {worst:.2f} std errors"

        run("mc_marginal_agreement", integrable, mc_marginals)

        def mc_total():
            est = _oracle.estimate_total_mass(params, args.samples, args.seed, tol)
            closed = [_hr.marginal_integral_k(params, k, tol) for k in range(model.d)]
            lo = max(closed) - 3.0 * est.std_error
            hi = sum(closed) + 3.0 * est.std_error
            return lo <= est.value <= hi, (
                f"Z = {est.value:.6g} (se {est.std_error:.2g}), bounds [{lo:.6g}, {hi:.6g}]"
            )

        run("mc_total_mass_bounds", integrable and model.d <= 8, mc_total)

        def graph_consistency():
            graph = _graphs.extremal_graph(theta, tol)
            scale = float(np.max(np.abs(theta.theta)))
            # The residual cancels all marginal terms, so any mu works here.
            probe_params = params if params is not None else _hr.GhrParams(mu_star, theta)
            residual_edges = set()
            for i in range(model.d):
                for j in range(i + 1, model.d):
                    if _graphs.factorization_residual(probe_params, i, j) > 8.0 * tol * scale:
                        residual_edges.add((i, j))
            return residual_edges == set(graph.edges), (
                f"{len(graph.edges)} edges, residual route matches: "
                f"{residual_edges == set(graph.edges)}"
            )

        run("graph_factorization_consistency", params is not None or plus, graph_consistency)

    failed = sum(1 for c in checks if c["status"] == "fail")
    passed = sum(1 for c in checks if c["status"] == "pass")
    skipped = sum(1 for c in checks if c["status"] == "skipped")
    payload = {
        "checks": checks,
        "passed": passed,
        "failed": failed,
        "skipped": skipped,
        "all_passed": failed == 0,
    }
    return payload, 0 if failed == 0 else 1


_HANDLERS = {
    "validate": _cmd_validate,
    "convert": _cmd_convert,
    "mu": _cmd_mu,
    "classify": _cmd_classify,
    "density": _cmd_density,
    "marginals": _cmd_marginals,
    "mass": _cmd_mass,
    "graph": _cmd_graph,
    "probe": _cmd_probe,
    "verify": _cmd_verify,
}


# ---------------------------------------------------------------------------
# Argument parsing and entry point
# ---------------------------------------------------------------------------

class _ArgumentParser(argparse.ArgumentParser):
    # Usage errors are validation errors: exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument(
        "input", nargs="?", default="-", help="model document path, or - for stdin"
    )
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative tolerance")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed")
    common.add_argument(
        "--samples", type=int, default=DEFAULT_SAMPLES, help="Monte Carlo sample count"
    )
    parser = _ArgumentParser(
        prog="hrpareto",
        description="Huesler-Reiss multivariate Pareto parameterization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="certify theta / gamma membership")
    convert = sub.add_parser("convert", parents=[common], help="convert between theta and gamma")
    convert.add_argument("--to", choices=("gamma", "theta"), required=True)
    sub.add_parser("mu", parents=[common], help="marginally standardizing mu plus diagnostics")
    sub.add_parser("classify", parents=[common], help="three-way classification of (mu, theta)")
    density = sub.add_parser("density", parents=[common], help="unnormalized density at a point")
    density.add_argument("--point", required=True, help="comma-separated coordinates")
    sub.add_parser("marginals", parents=[common], help="closed-form slab masses and ratios")
    sub.add_parser("mass", parents=[common], help="Monte Carlo total and marginal masses")
    sub.add_parser("graph", parents=[common], help="conditional-independence graph")
    probe = sub.add_parser("probe", parents=[common], help="homogeneity residual scan")
    probe.add_argument(
        "--stats", required=True, help="log | identity | power:ALPHA | squared_log"
    )
    sub.add_parser("verify", parents=[common], help="run the full invariant suite")
    return parser


def _error_code(exc: Exception) -> str:
    name = type(exc).__name__
    return name[:-5] if name.endswith("Error") else name


def _read_document(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"input is not valid JSON: {exc}") from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = _read_document(args.input)
        model = ModelContext(raw, args.tol)
        payload, code = _HANDLERS[args.command](model, args)
    except InputError as exc:
        _write_error(exc)
        return 1
    except NumericalError as exc:
        _write_error(exc)
        return 2
    except ValueError as exc:
        # Bad numeric literals in flags (e.g. malformed --point values).
        _write_error(InputError(str(exc)))
        return 1
    except Exception as exc:  # noqa: BLE001 - never leak a bare traceback
        sys.stderr.write(
            emit_json({"error": {"code": "Internal", "message": f"{type(exc).__name__}: {exc}"}})
            + "\n"
        )
        return 2
    doc = {
        "command": args.command,
        "settings": {"tol": args.tol, "seed": args.seed, "samples": args.samples},
    }
    doc.update(payload)
    sys.stdout.write(emit_json(doc) + "\n")
    return code


def _write_error(exc: Exception) -> None:
    doc = {"error": {"code": _error_code(exc), "message": str(exc)}}
    sys.stderr.write(emit_json(doc) + "\n")


if __name__ == "__main__":
    raise SystemExit(main())
