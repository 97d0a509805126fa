"""Command line: analyze | minimize | gamma | gel."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import classify
from .cylinders import (ConstructionError, Exists, construct_patchwork,
                        pointwise_minimizer_exists, second_fundamental_form)
from .energy import gamma_experiment, limit_energy, lower_bound, make_density
from .gel import (BoundaryMinimizerError, GelParameters, bilayer_minimizers,
                  derive_constants, gel_limit_energy, unit_isometry_equivalent)
from .io import ScenarioError, dumps, export_obj, load_scenario, write_report

log = logging.getLogger("hetplate")

EXIT_OK, EXIT_ERROR, EXIT_OBSTRUCTION = 0, 1, 2


def _sym(M) -> list:
    M = np.asarray(M, dtype=float)
    return [float(M[0, 0]), float(0.5 * (M[0, 1] + M[1, 0])), float(M[1, 1])]


def _classification(S) -> dict:
    return {
        "case": S.case.value,
        "principal_curvature": S.r,
        "normals": [list(map(float, n)) for n in S.normals],
        "curvatures": list(S.curvatures),
        "min_density": S.value(),
    }


def _require_plate(sc):
    if sc.field is None or sc.moduli is None:
        raise ScenarioError(f"{sc.name}: this command needs 'profiles' and 'moduli'")


def analyze(sc) -> tuple[dict, int, list]:
    from .strain import compatibility_report

    _require_plate(sc)
    a = sc.analysis
    n = a["thickness_order"]
    beta = sc.moduli.beta
    pieces, sets = [], []
    for k, prof in enumerate(sc.field.profiles):
        Abar = prof.target_curvature(16)
        S = classify(Abar, beta)
        sets.append(S)
        pieces.append({
            "index": k,
            "area": sc.domain.area(k),
            "d_min": _sym(prof.d_min(16)),
            "target_curvature": _sym(Abar),
            "classification": _classification(S),
        })
    warnings = []
    for i, j in sorted(sc.domain.adjacency()):
        Ai, Aj = pieces[i]["target_curvature"], pieces[j]["target_curvature"]
        if np.allclose(Ai, Aj, rtol=0, atol=1e-14):
            warnings.append(f"neighbours {i} and {j} share the same target curvature")
    rep = compatibility_report(sc.field, a["grid"])
    compat = {
        "compatible": rep.compatible,
        "max_residual": rep.max_residual,
        "tolerance": rep.tolerance,
        "grid": list(rep.grid),
        "note": rep.note,
    }
    if rep.witness is not None:
        compat["witness_fit_error"] = rep.witness.fit_error
        compat["witness_affine_defect"] = rep.witness.affine_defect()
    report = {
        "command": "analyze",
        "scenario": sc.name,
        "version": __version__,
        "moduli": {"mu": sc.moduli.mu, "lambda": sc.moduli.lam, "beta": beta},
        "quadrature": {"thickness_nodes_per_interval": 16, "thickness_order_setting": n},
        "pieces": pieces,
        "compatibility": compat,
        "warnings": warnings,
    }
    return report, EXIT_OK, sets


def minimize(sc, out: Path) -> tuple[dict, int]:
    report, _, sets = analyze(sc)
    report["command"] = "minimize"
    verdict = pointwise_minimizer_exists(sc.domain, sets)
    if not isinstance(verdict, Exists):
        report["existence"] = {"exists": False, "reason": verdict.reason.value,
                               "location": verdict.location, "detail": verdict.detail}
        return report, EXIT_OBSTRUCTION
    surf = construct_patchwork(sc.domain, verdict.elements)
    n = sc.analysis["quad_order"]
    E0 = limit_energy(surf, sc.field, sc.moduli, n=n)
    LB = lower_bound(sc.field, sc.moduli)
    gap = E0.total - LB.total
    report["existence"] = {
        "exists": True,
        "elements": [_sym(E) for E in verdict.elements],
        "constrained_interfaces": [list(p) for p in verdict.constrained],
        "unconstrained_interfaces": [list(p) for p in verdict.unconstrained],
        "log": verdict.log,
    }
    report["surface"] = {
        "cylinders": [{"radius": c.r if np.isfinite(c.r) else "inf",
                       "rotation": c.R, "translation": c.v, "rho": c.rho,
                       "second_fundamental_form": _sym(second_fundamental_form(c))}
                      for c in surf.cylinders],
        "isometry_defect": surf.isometry_defect(),
        "max_cut_jump": surf.max_cut_jump(),
        "curvature_error": max(float(np.abs(A - E).max())
                               for A, E in zip(surf.piece_curvatures(), verdict.elements)),
        "cut_samples": 32,
    }
    report["energy"] = {
        "limit_energy": E0.total,
        "bending": E0.bending,
        "additional_terms": E0.additional,
        "lower_bound": LB.total,
        "gap": gap,
        "relative_gap": gap / max(abs(LB.total), 1e-300) if LB.total else gap,
        "quad_order": n,
    }
    res = sc.analysis["obj_resolution"]
    counts = export_obj(surf, out / "surface.obj", res, header=f"{sc.name}: pointwise minimizer")
    report["mesh"] = {"file": "surface.obj", "resolution": res, "groups": counts}
    return report, EXIT_OK


def _surface_for_gamma(sc, sets):
    choice = sc.analysis["surface"]
    if choice["kind"] == "elements":
        return construct_patchwork(sc.domain, [np.asarray(E, dtype=float)
                                               for E in choice["elements"]])
    verdict = pointwise_minimizer_exists(sc.domain, sets)
    if not isinstance(verdict, Exists):
        raise ConstructionError(f"no pointwise minimizer: {verdict.reason.value}")
    return construct_patchwork(sc.domain, verdict.elements)


def gamma(sc, out: Path) -> tuple[dict, int]:
    _require_plate(sc)
    a = sc.analysis
    density = make_density(a["density"], sc.moduli)
    beta = density.moduli.beta
    sets = [classify(p.target_curvature(16), beta) for p in sc.field.profiles]
    surf = _surface_for_gamma(sc, sets)
    table = gamma_experiment(surf, sc.field, density, a["h_ladder"], n=a["quad_order"],
                             tn=a["thickness_order"], grid=a["grid"])
    (out / "gamma.csv").write_text(table.csv())
    report = {
        "command": "gamma",
        "scenario": sc.name,
        "version": __version__,
        "density": density.name,
        "limit_moduli": {"mu": density.moduli.mu, "lambda": density.moduli.lam},
        "limit_energy": {"total": table.limit.total, "bending": table.limit.bending,
                         "additional_terms": table.limit.additional},
        "rows": [{"h": r.h, "scaled_energy": r.scaled_energy, "gap": r.gap,
                  "ratio": r.ratio} for r in table.rows],
        "fitted_slope": table.slope,
        "settings": table.settings,
        "table": "gamma.csv",
    }
    return report, EXIT_OK


def gel(sc, out: Path) -> tuple[dict, int]:
    if sc.gel is None:
        raise ScenarioError(f"{sc.name}: this command needs a 'gel' section")
    g = sc.gel
    p = GelParameters(g["v"], g["Nbar"], g["chi"], g["delta"])
    c = derive_constants(p)
    bil = bilayer_minimizers(p, g["g1"], g["g2"], g["d"], g["ell"], c)
    res = sc.analysis["obj_resolution"]
    surfaces = []
    for s1 in (1.0, -1.0):
        surf = bil.surfaces[s1]
        tag = "plus" if s1 > 0 else "minus"
        name = f"bilayer_sigma1_{tag}.obj"
        export_obj(surf, out / name, res, header=f"{sc.name}: sigma1 = {int(s1)}")
        field, moduli = unit_isometry_equivalent(bil)
        unit = limit_energy(surf.rescaled(1.0 / c.alpha), field, moduli)
        direct = gel_limit_energy(surf, bil)
        s0, _, s2 = bil.signs[s1]
        surfaces.append({
            "file": name,
            "sigma0": s0, "sigma1": s1, "sigma2": s2,
            "piece_curvatures": [_sym(A) for A in surf.piece_curvatures()],
            "metric_defect": surf.isometry_defect(),
            "max_cut_jump": surf.max_cut_jump(),
            "energy": direct,
            "energy_unit_isometry": unit.total,
        })
    report = {
        "command": "gel",
        "scenario": sc.name,
        "version": __version__,
        "parameters": {"v": p.v, "Nbar": p.Nbar, "chi": p.chi, "delta": p.delta},
        "constants": {
            "alpha": c.alpha,
            "first_order_residual": c.first_order_residual,
            "second_derivative": c.second_derivative,
            "Theta": c.Theta.implicit,
            "Theta_finite_difference": c.Theta.finite_difference,
            "Theta_relative_difference": c.Theta.rel_diff,
            "G": c.moduli.G,
            "Lambda": c.moduli.Lambda,
            "moduli_fit_residual": c.moduli.fit_residual,
        },
        "target_curvatures": list(bil.a),
        "principal_curvatures": list(bil.curvatures),
        "surfaces": surfaces,
        "mesh_resolution": res,
    }
    return report, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hetplate", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("analyze", "minimize", "gamma", "gel"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", required=True, type=Path)
        sp.add_argument("--grid", type=int, help="compatibility grid size")
        sp.add_argument("--h-ladder", help="comma separated thickness ratios")
        sp.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        sc = load_scenario(args.config)
        if args.grid is not None:
            if args.grid < 4:
                raise ScenarioError("--grid must be at least 4")
            sc.analysis["grid"] = args.grid
        if args.h_ladder:
            try:
                ladder = [float(s) for s in args.h_ladder.split(",")]
            except ValueError as exc:
                raise ScenarioError(f"bad --h-ladder: {args.h_ladder}") from exc
            if any(h <= 0 for h in ladder):
                raise ScenarioError("--h-ladder entries must be positive")
            sc.analysis["h_ladder"] = ladder
        args.out.mkdir(parents=True, exist_ok=True)
        if args.command == "analyze":
            report, code, _ = analyze(sc)
        else:
            report, code = {"minimize": minimize, "gamma": gamma, "gel": gel}[args.command](
                sc, args.out)
    except (ScenarioError, ConstructionError, BoundaryMinimizerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    write_report(report, args.out / "report.json")
    log.info("wrote %s", args.out / "report.json")
    if code == EXIT_OBSTRUCTION:
        ex = report["existence"]
        print(f"obstruction: {ex['reason']} at {dumps(ex['location']).strip()}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
