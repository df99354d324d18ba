"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails (or a POVM is
invalid), 2 for usage and input errors.
"""
import argparse
import sys
import time

import numpy as np

from . import cloner as cl
from . import povm as pv
from . import restoration as rs
from .errors import QCloneError
from .io import PovmFileError, complex_list, dumps_report, load_povm, number
from .linalg import ket_fidelity
from .montecarlo import monte_carlo
from .states import bloch_to_ket, expand_in_generators, ket_to_bloch, normalized_ket, random_pure_ket, to_bell_basis
from .verify import SUITES, Check, run_suite


class UsageError(Exception):
    pass


def _floats(text, n, flag):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{flag} expects {n} comma-separated numbers, got {len(vals)}")
    return vals


def parse_input(bloch=None, amplitudes=None):
    """Input ket from ``--bloch x,y,z`` or ``--amplitudes re,im,re,im``."""
    if bloch is not None and amplitudes is not None:
        raise UsageError("give either --bloch or --amplitudes, not both")
    try:
        if bloch is not None:
            s = np.array(_floats(bloch, 3, "--bloch"))
            if abs(np.linalg.norm(s) - 1) > 1e-9:
                raise UsageError(f"--bloch must be a unit vector (|s| = {np.linalg.norm(s):.6g})")
            return bloch_to_ket(s / np.linalg.norm(s))
        if amplitudes is not None:
            v = _floats(amplitudes, 4, "--amplitudes")
            return normalized_ket([v[0] + 1j * v[1], v[2] + 1j * v[3]], atol=1e-9)
    except QCloneError as exc:
        raise UsageError(str(exc)) from None
    return None


def _matrix(m):
    return complex_list(m)


def _report(command, config, checks, results, started=None):
    doc = {
        "command": command,
        "config": config,
        "checks": [c.as_dict() for c in checks],
        "results": results,
        "status": "pass" if all(c.passed for c in checks) else "fail",
    }
    if started is not None:
        doc["timing"] = {"seconds": round(time.perf_counter() - started, 3)}
    return doc


def render_text(doc):
    lines = [f"qclone {doc['command']}  status: {doc['status'].upper()}"]
    for k, v in doc["config"].items():
        lines.append(f"  {k}: {v}")
    if doc["checks"]:
        lines.append("checks:")
        for c in doc["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            lines.append(f"  [{mark}] {c['name']}: measured={_fmt(c['measured'])} expected={_fmt(c['expected'])} tol={c['tolerance']:g}")
    if doc["results"]:
        lines.append("results:")
        _walk(doc["results"], lines, 2)
    if "timing" in doc:
        lines.append(f"timing: {doc['timing']['seconds']}s")
    return "\n".join(lines) + "\n"


def _fmt(x):
    if isinstance(x, dict) and "exact" in x:
        return f"{x['exact']} ({x['decimal']:.12g})"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _walk(obj, lines, indent):
    pad = " " * indent
    for k, v in obj.items():
        if isinstance(v, dict) and "exact" not in v:
            lines.append(f"{pad}{k}:")
            _walk(v, lines, indent + 2)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for i, item in enumerate(v):
                lines.append(f"{pad}  - [{i}]")
                _walk(item, lines, indent + 6)
        else:
            lines.append(f"{pad}{k}: {_fmt(v)}")


# --------------------------------------------------------------------- commands

def cmd_verify(args):
    started = time.perf_counter() if args.timing else None
    checks = run_suite(args.suite, seed=args.seed, tol=args.tolerance, trials=args.trials)
    config = {"suite": args.suite, "seed": args.seed, "tolerance": args.tolerance, "trials": args.trials}
    return _report("verify", config, checks, {}, started)


def cmd_clone(args):
    phi = parse_input(args.bloch, args.amplitudes)
    if phi is None:
        raise UsageError("clone needs --bloch or --amplitudes")
    out = cl.clone(phi)
    s = ket_to_bloch(phi)
    blochs = {k: [float(x) for x in out.bloch(k)] for k in cl.SUBSYSTEM_NAMES}
    checks = [
        Check("output norm = 1", bool(abs(np.linalg.norm(out.state) - 1) <= 1e-12), float(np.linalg.norm(out.state)), 1.0, 1e-12),
        Check("clone Bloch = (2/3) input", bool(np.max(np.abs(out.bloch("clone1") - 2 / 3 * s)) <= 1e-12),
              float(np.max(np.abs(out.bloch("clone1") - 2 / 3 * s))), 0.0, 1e-12),
        Check("ancilla Bloch = -(1/3) input", bool(np.max(np.abs(out.bloch("ancilla") + s / 3)) <= 1e-12),
              float(np.max(np.abs(out.bloch("ancilla") + s / 3))), 0.0, 1e-12),
    ]
    results = {
        "input_amplitudes": complex_list(phi),
        "input_bloch": [float(x) for x in s],
        "output_amplitudes": complex_list(out.state),
        "bloch": blochs,
        "reduced": {
            "clone1": _matrix(out.reduced(["clone1"])),
            "clone2": _matrix(out.reduced(["clone2"])),
            "ancilla": _matrix(out.reduced(["ancilla"])),
            "both-clones": _matrix(out.reduced([0, 1])),
            "both-clones-bell": _matrix(cl.reduced_two_clones(out)),
            "clone-ancilla": _matrix(out.reduced([1, 2])),
            "clone-ancilla-bell": _matrix(cl.reduced_clone_ancilla(out)),
        },
    }
    config = {"bloch": args.bloch, "amplitudes": args.amplitudes}
    return _report("clone", config, checks, results)


def _closed_form(el, support):
    """Closed-form effective parameters for ``el`` where one exists, else ``None``."""
    sel = el.selector
    F = el.matrix
    if sel in ("clone1", "clone2", "ancilla"):
        b, f = expand_in_generators(F)
        if b <= 0:
            return None
        return pv.single_qubit_map(b, f, "ancilla" if sel == "ancilla" else "clone")
    if sel == "both-clones":
        b, f = pv.symmetric_parameters(F)
        if b <= 0:
            return None
        return pv.two_clone_map(b, f)
    if sel == "clone-ancilla":
        b, f = expand_in_generators(to_bell_basis(F))
        if b <= 0 or 1 - np.sqrt(2 / 3) * f[14] <= 0:
            return None
        return pv.clone_ancilla_map(b, f)
    return None


def cmd_povm_map(args):
    try:
        povm = load_povm(args.file)
    except PovmFileError as exc:
        raise UsageError(str(exc)) from None
    if args.selector and args.selector != povm.selector:
        try:
            els = tuple(pv.PovmElement(args.selector, e.matrix) for e in povm.elements)
            povm = pv.Povm(els, povm.support, povm.labels)
        except QCloneError as exc:
            raise UsageError(f"cannot place POVM on selector {args.selector!r}: {exc}") from None
    diag = pv.validate_povm(povm)
    checks = [Check("output POVM valid", diag.ok, len(diag.violations), 0, 0.0)]
    elements = []
    eff_total = np.zeros((2, 2), dtype=np.complex128)
    for lab, el in zip(povm.labels, povm.elements):
        E = pv.effective_element(el).matrix
        eff_total += E
        a, e = pv.qubit_parameters(E)
        sh = pv.is_sharp(E)
        entry = {
            "label": lab,
            "effective": _matrix(E),
            "a": float(a),
            "e": [float(x) for x in e],
            "trace": float(np.trace(E).real),
            "sharp": sh.sharp,
        }
        if sh.sharp:
            entry["p"] = sh.p
            entry["chi"] = complex_list(sh.chi)
        try:
            cf = _closed_form(el, povm.support)
        except QCloneError:
            cf = None
        if cf is not None:
            dev = float(np.max(np.abs(pv.from_qubit_parameters(*cf) - E)))
            entry["closed_form_deviation"] = dev
            checks.append(Check(f"closed form vs conjugation ({lab})", dev <= 1e-10, dev, 0.0, 1e-10))
        elements.append(entry)
    eff_dev = float(np.max(np.abs(eff_total - np.eye(2))))
    results = {
        "selector": povm.selector,
        "support": povm.support,
        "elements": elements,
        "effective_sum": _matrix(eff_total),
        "effective_complete": eff_dev <= 1e-10,
        "violations": [{"element": v.element, "check": v.check, "detail": v.detail} for v in diag.violations],
    }
    if diag.ok:
        checks.append(Check("effective POVM sums to identity", eff_dev <= 1e-10, eff_dev, 0.0, 1e-10))
    config = {"file": args.file, "selector": args.selector}
    return _report("povm-map", config, checks, results)


def cmd_restore(args):
    if args.scenario not in rs.SCENARIOS:
        raise UsageError(f"unknown scenario {args.scenario!r}; choose from {', '.join(rs.SCENARIOS)}")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    phi = parse_input(args.bloch, args.amplitudes)
    sampler = "uniform" if phi is None else phi
    sc = rs.get_scenario(args.scenario)
    p_exact = rs.analytic_success_probability(args.scenario)
    checks = []
    results = {"success_probability": number(p_exact)}

    if phi is None:
        # average over the uniform ensemble: <phi|A^dag A|phi> averages to Tr(A^dag A)/2
        avg = {}
        for lab, A in zip(sc.outcome_labels, sc.stage_one_kraus()):
            p = np.trace(A.conj().T @ A).real / 2
            fr = rs.rationalize(p)
            avg[lab] = number(fr) if fr is not None else p
        results["outcome_probabilities"] = avg
    else:
        branches = rs.enumerate_branches(args.scenario, phi)
        results["branches"] = [
            {
                "outcome": b.outcome,
                "step": b.step,
                "success": b.success,
                "probability": number(rs.rationalize(b.probability) or b.probability),
                "fidelity": None if b.final_state is None else ket_fidelity(phi, b.final_state),
            }
            for b in branches
        ]

    mc = monte_carlo(args.scenario, sampler, args.trials, args.seed)
    results["monte_carlo"] = mc.as_dict()
    sigma = np.sqrt(float(p_exact) * (1 - float(p_exact)) / args.trials)
    checks.append(Check("Monte Carlo success rate vs exact", abs(mc.success_rate - float(p_exact)) <= 4 * sigma + 1e-15,
                        mc.success_rate, p_exact, float(4 * sigma)))
    if mc.successes:
        checks.append(Check("restored fidelity = 1", 1 - mc.min_fidelity <= 1e-12, mc.min_fidelity, 1.0, 1e-12))
    if args.transcripts:
        rng = np.random.default_rng(args.seed)
        results["transcripts"] = [
            rs.run_protocol(args.scenario, phi if phi is not None else random_pure_ket(rng), rng).as_dict()
            for _ in range(args.transcripts)
        ]
    config = {"scenario": args.scenario, "input": "uniform" if phi is None else complex_list(phi),
              "trials": args.trials, "seed": args.seed}
    return _report("restore", config, checks, results)


# --------------------------------------------------------------------- entry point

def build_parser():
    p = argparse.ArgumentParser(prog="qclone", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="emit the JSON report")
        sp.add_argument("--timing", action="store_true", help="append wall-clock timing (makes output non-reproducible)")

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--tolerance", type=float, default=None, help="override deterministic check tolerances")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=100000, help="Monte Carlo trials per three-party scenario")
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("clone", help="clone one input state and print all reduced states")
    c.add_argument("--bloch")
    c.add_argument("--amplitudes")
    common(c)
    c.set_defaults(func=cmd_clone)

    m = sub.add_parser("povm-map", help="map an output POVM file to its effective input POVM")
    m.add_argument("--file", required=True, help="POVM JSON file, or builtin:six-state|tetrahedron|identity")
    m.add_argument("--selector", choices=sorted(cl.SELECTORS), default=None)
    common(m)
    m.set_defaults(func=cmd_povm_map)

    r = sub.add_parser("restore", help="exact and Monte Carlo restoration statistics")
    r.add_argument("--scenario", required=True)
    r.add_argument("--bloch")
    r.add_argument("--amplitudes")
    r.add_argument("--trials", type=int, default=10000)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--transcripts", type=int, default=0, help="also record this many single-trial transcripts")
    common(r)
    r.set_defaults(func=cmd_restore)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = args.func(args)
    except UsageError as exc:
        print(f"qclone: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(dumps_report(doc) if args.json else render_text(doc))
    return 0 if doc["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
