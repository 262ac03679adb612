"""Command-line front end.

Subcommands map one-to-one onto the library surface:

* ``solve-profile``  background profile as r,u,du CSV
* ``spectrum``       1-D eigenvalues (alpha for the slab, the first
                     singular eigenvalue for the cone)
* ``neumann``        first nontrivial Neumann eigenvalue of a cross-section
* ``classify``       stability report (JSON by default)
* ``verify``         two-route identity check, exit 0 when it passes
* ``sweep``          rho as a function of lambda1, CSV plus a sidecar with
                     the sign-change bracket
* ``threshold``      the torsion stability threshold

Exit codes: 0 success, 2 usage (bad flags, bad descriptors, violated
preconditions), 1 solver failure.  All numbers print with 17 significant
digits so regression files round-trip exactly; nothing here depends on the
environment, so identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

from .errors import EnstabError
from .profiles import (NonlinearitySpec, ShootConfig, parse_nonlinearity,
                       profile_to_csv, solve_1d, solve_radial)
from .spectra import (alpha_spectrum, neumann_lambda1, nuhat_first,
                      parse_domain, spectrum_to_csv)
from .stability import (StabilityReport, classify_cone, classify_cylinder,
                        cone_identity_residual, cylinder_identity_residual,
                        mode_second_variation, rho_index, solve_h_cone,
                        solve_h_cylinder, sweep_rho, sweep_to_csv,
                        torsion_beta)

_CONFIG_KEYS = ("geometry", "dim", "nonlinearity", "lambda1", "domain",
                "range", "format", "out", "tol", "suite", "count")


class _Usage(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enstab",
        description="stability of energy-stationary pairs on cones and cylinders",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, lambda1=False, fmt=None):
        p.add_argument("--geometry", choices=("cone", "cylinder"))
        p.add_argument("--dim", type=int, help="ambient dimension (cone only)")
        p.add_argument("--nonlinearity",
                       help="torsion | lane-emden:P | linear:A,B | tabulated:PATH")
        if lambda1:
            p.add_argument("--lambda1",
                           help="first Neumann eigenvalue, as a number or a "
                                "domain descriptor like disk:1")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default=None)
            p.set_defaults(format_default=fmt)
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--tol", type=float,
                       help="shooting-search tolerance override")
        p.add_argument("--config",
                       help="flat key=value file; explicit flags win")

    p = sub.add_parser("solve-profile", help="solve the background profile")
    common(p, fmt="csv")

    p = sub.add_parser("spectrum", help="1-D linearized eigenvalues")
    common(p, fmt="csv")
    p.add_argument("--count", type=int, default=None,
                   help="how many eigenvalues (slab problem only, default 5)")

    p = sub.add_parser("neumann", help="cross-section Neumann eigenvalue")
    p.add_argument("--domain", required=True,
                   help="interval:L | rectangle:a,b | disk:R | cap:theta0,N "
                        "| sphere:N")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.set_defaults(format_default="csv")
    p.add_argument("--out")
    p.add_argument("--config")

    p = sub.add_parser("classify", help="stability verdict with evidence")
    common(p, lambda1=True, fmt="json")

    p = sub.add_parser("verify", help="two-route identity check")
    p.add_argument("--suite", required=True, choices=("identities",))
    common(p, lambda1=True)

    p = sub.add_parser("sweep", help="rho over a lambda1 range (cylinder)")
    common(p, fmt="csv")
    p.add_argument("--range", dest="range_",
                   help="lo:hi:steps", required=False)

    p = sub.add_parser("threshold", help="torsion stability threshold")
    p.add_argument("--nonlinearity", default=None)
    p.add_argument("--config")
    return parser


def _apply_config(ns: argparse.Namespace) -> None:
    path = getattr(ns, "config", None)
    if not path:
        return
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise _Usage(f"cannot read config file {path!r}: {exc}") from exc
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep:
            raise _Usage(f"config line {raw!r} is not key=value")
        if key not in _CONFIG_KEYS:
            raise _Usage(f"unknown config key {key!r}")
        attr = "range_" if key == "range" else key
        if not hasattr(ns, attr) or getattr(ns, attr) in (None,):
            if key in ("dim", "count"):
                value = int(value)
            elif key == "tol":
                value = float(value)
            if hasattr(ns, attr):
                setattr(ns, attr, value)
            else:
                raise _Usage(
                    f"config key {key!r} does not apply to {ns.command!r}")


def _shoot_config(ns) -> ShootConfig | None:
    tol = getattr(ns, "tol", None)
    if tol is None:
        return None
    if not 0.0 < tol < 1e-2:
        raise _Usage("--tol must lie in (0, 1e-2)")
    return ShootConfig(rel_tol=tol, abs_tol=tol)


def _need(ns, attr, flag):
    value = getattr(ns, attr, None)
    if value is None:
        raise _Usage(f"{ns.command} requires {flag}")
    return value


def _profile(ns):
    geometry = _need(ns, "geometry", "--geometry")
    nl = parse_nonlinearity(_need(ns, "nonlinearity", "--nonlinearity"))
    cfg = _shoot_config(ns)
    if geometry == "cone":
        dim = _need(ns, "dim", "--dim")
        return solve_radial(nl, dim, cfg), nl
    if ns.dim is not None:
        raise _Usage("--dim applies to the cone geometry only")
    return solve_1d(nl, cfg), nl


def _resolve_lambda1(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        return neumann_lambda1(parse_domain(text))
    if not value > 0.0:
        raise _Usage("lambda1 must be positive")
    return value


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _cmd_solve_profile(ns) -> int:
    if ns.format != "csv":
        raise _Usage("solve-profile emits CSV only")
    profile, _ = _profile(ns)
    buf = io.StringIO()
    profile_to_csv(profile, buf)
    _write(buf.getvalue(), ns.out)
    return 0


def _cmd_spectrum(ns) -> int:
    profile, _ = _profile(ns)
    if profile.geometry == "cylinder_1d":
        if not 1 <= ns.count <= 12:
            raise _Usage("--count must lie in [1, 12]")
        results = alpha_spectrum(profile, ns.count)
        if ns.format == "json":
            payload = [{"index": r.index, "value": r.value} for r in results]
            _write(json.dumps(payload, indent=2) + "\n", ns.out)
        else:
            buf = io.StringIO()
            spectrum_to_csv(results, buf)
            _write(buf.getvalue(), ns.out)
        return 0
    first = nuhat_first(profile)
    if ns.format == "json":
        payload = {
            "nuhat1": None if first is None else first.value,
            "verdict": "nonnegative" if first is None else "negative",
        }
        _write(json.dumps(payload, indent=2) + "\n", ns.out)
        return 0
    if first is None:
        _write("index,value\n", ns.out)
        print("no nonpositive eigenvalue (verdict: nonnegative)",
              file=sys.stderr)
    else:
        buf = io.StringIO()
        spectrum_to_csv([first], buf)
        _write(buf.getvalue(), ns.out)
    return 0


def _cmd_neumann(ns) -> int:
    value = neumann_lambda1(parse_domain(ns.domain))
    if ns.format == "json":
        _write(json.dumps({"domain": ns.domain, "lambda1": value}) + "\n",
               ns.out)
    else:
        field = f'"{ns.domain}"' if "," in ns.domain else ns.domain
        _write(f"domain,lambda1\n{field},{value:.17g}\n", ns.out)
    return 0


def _cmd_classify(ns) -> int:
    geometry = _need(ns, "geometry", "--geometry")
    nl = parse_nonlinearity(_need(ns, "nonlinearity", "--nonlinearity"))
    lam = _resolve_lambda1(_need(ns, "lambda1", "--lambda1"))
    cfg = _shoot_config(ns)
    if geometry == "cone":
        report = classify_cone(nl, _need(ns, "dim", "--dim"), lam,
                               shoot_config=cfg)
    else:
        if ns.dim is not None:
            raise _Usage("--dim applies to the cone geometry only")
        report = classify_cylinder(nl, lam, shoot_config=cfg)
    if ns.format == "json":
        _write(report.to_json(), ns.out)
    else:
        data = report.to_dict()
        keys = ",".join(data)
        cells = []
        for value in data.values():
            if isinstance(value, float):
                cells.append(f"{value:.17g}")
            elif value is None:
                cells.append("")
            else:
                cells.append(str(value).replace(",", ";"))
        _write(f"{keys}\n{','.join(cells)}\n", ns.out)
    return 0


def _cmd_verify(ns) -> int:
    geometry = _need(ns, "geometry", "--geometry")
    lam = _resolve_lambda1(_need(ns, "lambda1", "--lambda1"))
    profile, _ = _profile(ns)
    if geometry == "cone":
        h1 = solve_h_cone(profile, lam)
        residual = cone_identity_residual(profile, h1)
    else:
        h1 = solve_h_cylinder(profile, lam)
        residual = max(
            cylinder_identity_residual(profile, h1),
            abs(rho_index(profile, h1) - mode_second_variation(profile, h1)),
        )
    print(f"max identity residual = {residual:.17g}")
    if residual < 1e-6:
        return 0
    print("error: identity residual exceeds 1e-6", file=sys.stderr)
    return 1


def _cmd_sweep(ns) -> int:
    geometry = _need(ns, "geometry", "--geometry")
    if geometry != "cylinder":
        raise _Usage("rho sweeps are defined on the cylinder problem")
    if ns.dim is not None:
        raise _Usage("--dim applies to the cone geometry only")
    out = _need(ns, "out", "--out")
    spec = _need(ns, "range_", "--range")
    parts = spec.split(":")
    if len(parts) != 3:
        raise _Usage("--range must look like lo:hi:steps")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise _Usage(f"bad --range {spec!r}: {exc}") from exc
    nl = parse_nonlinearity(_need(ns, "nonlinearity", "--nonlinearity"))
    result = sweep_rho(nl, lo, hi, steps, _shoot_config(ns))
    sweep_to_csv(result, out)
    meta = {
        "rows": len(result.rows),
        "alpha1": result.alpha1,
        "brackets": [list(b) for b in result.brackets],
    }
    if len(result.brackets) == 1:
        meta["bracket"] = list(result.brackets[0])
    with open(out + ".meta.json", "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(result.rows)} rows to {out}")
    if "bracket" in meta:
        lo_b, hi_b = meta["bracket"]
        print(f"sign change bracketed in ({lo_b:.17g}, {hi_b:.17g})")
    return 0


def _cmd_threshold(ns) -> int:
    nl = parse_nonlinearity(ns.nonlinearity)
    if nl.kind != "torsion":
        raise _Usage("the sharp threshold is defined for the torsion family")
    beta = torsion_beta()
    print(f"beta={beta:.16g}")
    return 0


_DISPATCH = {
    "solve-profile": _cmd_solve_profile,
    "spectrum": _cmd_spectrum,
    "neumann": _cmd_neumann,
    "classify": _cmd_classify,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "threshold": _cmd_threshold,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(ns)
        if getattr(ns, "format", None) is None and hasattr(ns, "format_default"):
            ns.format = ns.format_default
        if ns.command == "spectrum" and ns.count is None:
            ns.count = 5
        if ns.command == "threshold" and ns.nonlinearity is None:
            ns.nonlinearity = "torsion"
        return _DISPATCH[ns.command](ns)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EnstabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
