"""Command line interface: ``sylowtower <command> FILE [options]``.

Output is deterministic: the same file and flags give byte-identical output,
whatever the thread count.  Exit codes are 0 success, 1 user-input error,
2 capacity error, 3 theory violation.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import __version__
from .burnside import analyze_fibration, finite_gset_fixed_points, homotopy_fixed_point_section
from .cohomology import cohomology_group
from .document import Document, load
from .errors import CapacityError, SylowTowerError, TheoryViolation, UserInputError
from .nilpotent import decompose_nilpotent, is_nilpotent_tower, p_completion
from .numtheory import is_prime
from .postnikov import PostnikovTower
from .sylow import are_conjugate_sylow_maps, enumerate_sylow_maps, factor_through_sylow, normality_obstruction


# reports: each builder returns (json-able dict, list of text lines) -------------

def _prime(p: int) -> int:
    if not is_prime(p):
        raise UserInputError(f"{p} is not a prime", location="--prime", hint="pass a prime such as 2 or 3")
    return p


def _orders(T: PostnikovTower) -> str:
    return ", ".join(f"pi_{lv}={o}" for lv, o in sorted(T.homotopy_orders().items()))


def _abelian_str(factors) -> str:
    return " + ".join(f"Z/{d}" for d in factors) if factors else "0"


def report_sylow(T: PostnikovTower, p: int):
    s = enumerate_sylow_maps(T, _prime(p))
    rep = {"tower": T.name, **s.to_json()}
    lines = [f"tower {T.name}: {s.count} Sylow {p}-map(s)"]
    for i, m in enumerate(s.maps):
        lines.append(f"  map {i}: pi_1 image {list(m.image_subgroup().elements)}; source {_orders(m.source)}")
    return rep, lines


def report_sylow_count(T: PostnikovTower, p: int):
    s = enumerate_sylow_maps(T, _prime(p))
    return {"tower": T.name, "prime": p, "count": s.count}, [str(s.count)]


def report_factor(doc: Document, map_name: str, p: int):
    f = doc.map(map_name)
    fa = factor_through_sylow(f, _prime(p))
    rep = {"map": map_name, "prime": p, **fa.to_json(), "lift_pi1": fa.g.phi1.tolist(), "verified": True}
    lines = [f"map {map_name} factors through the Sylow {p}-map onto {list(fa.s.image_subgroup().elements)}",
             f"  lift on pi_1: {fa.g.phi1.tolist()}",
             f"  homotopies verified at levels: {sorted(fa.homotopies)}"]
    return rep, lines


def report_conjugate(T: PostnikovTower, p: int):
    s = enumerate_sylow_maps(T, _prime(p))
    pairs, lines = [], [f"tower {T.name}: {s.count} Sylow {p}-map(s), all conjugate to map 0"]
    for i, m in enumerate(s.maps):
        c = are_conjugate_sylow_maps(s.maps[0], m, p)
        pairs.append({"map": i, "element": c.element})
        lines.append(f"  map {i}: conjugating element {c.element}, equivalence of sources verified")
    return {"tower": T.name, "prime": p, "count": s.count, "conjugations": pairs}, lines


def report_normality(T: PostnikovTower, p: int):
    s = enumerate_sylow_maps(T, _prime(p))
    reps = [normality_obstruction(m, p) for m in s.maps]
    lines = []
    for i, r in enumerate(reps):
        lines.append(f"map {i}: {r.status}")
        lines.append(f"  pi_1 image normal: {'yes' if r.pi1_normal else 'no'}")
        if r.pi1_witness is not None:
            lines.append(f"  conjugating by {r.pi1_witness[0]} gives {r.pi1_witness[1]}")
        for lv in sorted(r.trivial_action):
            if r.trivial_action[lv]:
                lines.append(f"  level {lv}: image acts trivially on the prime-to-{p} part")
            else:
                g, v = r.failures[lv][0]
                lines.append(f"  level {lv}: obstruction, element {g} moves {v} in the prime-to-{p} part")
        if r.status == "undecided":
            lines.append("  necessary conditions hold; nonzero k-invariants leave normality undecided")
    rep = {"tower": T.name, "prime": p, "maps": [r.to_json() for r in reps]}
    return rep, lines


def report_nilpotent(T: PostnikovTower):
    r = is_nilpotent_tower(T)
    lines = [f"tower {T.name}: {'nilpotent' if r else 'not nilpotent'}",
             f"  pi_1 lower central series orders: {[H.order for H in r.group.series]}"]
    for lv, c in sorted(r.actions.items()):
        lines.append(f"  pi_{lv}: action {'nilpotent' if c else 'not nilpotent'}, "
                     f"filtration orders {[A.order for A in c.chain]}")
    return {"tower": T.name, **r.to_json()}, lines


def report_decompose(T: PostnikovTower):
    d = decompose_nilpotent(T)
    lines = [f"tower {T.name}: {len(d.factors)} factor(s)"]
    for p, s in d.factors:
        lines.append(f"  p={p}: {_orders(s.source)}")
    return {"tower": T.name, **d.to_json()}, lines


def report_p_complete(T: PostnikovTower, p: int):
    c = p_completion(T, _prime(p))
    lines = [f"tower {T.name}: {p}-completion {_orders(c.completion)}",
             "  Sylow map followed by completion is an equivalence"]
    return {"tower": T.name, **c.to_json()}, lines


def report_burnside(doc: Document, p: int, fibration: str | None = None, gset: str | None = None):
    _prime(p)
    fibs = doc.fibrations if fibration is None else {fibration: doc.fibrations.get(fibration)}
    sets = doc.gsets if gset is None else {gset: doc.gsets.get(gset)}
    if fibration is not None and gset is None:
        sets = {}
    if gset is not None and fibration is None:
        fibs = {}
    for kind, d, name in (("fibration", fibs, fibration), ("G-set", sets, gset)):
        if name is not None and d.get(name) is None:
            raise UserInputError(f"no {kind} named {name!r}", location=f"{doc.source}#/{kind}s")
    if not fibs and not sets:
        raise UserInputError("the document has no fibrations or G-sets", location=f"{doc.source}#/",
                             hint="add entries under \"fibrations\" or \"gsets\"")
    rep, lines = {"prime": p, "fibrations": [], "gsets": []}, []
    for name, gamma in fibs.items():
        sec = homotopy_fixed_point_section(gamma, p)
        fo = analyze_fibration(gamma).fiber_orders()
        rep["fibrations"].append({"name": name, **sec.to_json(),
                                  "fiber_orders": {str(k): v for k, v in sorted(fo.items())}})
        lines.append(f"fibration {name}: section through Sylow {p}-subgroup "
                     f"{list(sec.sylow.image_subgroup().elements)}; gamma after section is an equivalence")
    for name, X in sets.items():
        fp = finite_gset_fixed_points(X.group, X.action, p, require_coprime=False)
        rep["gsets"].append({"name": name, **fp.to_json()})
        lines.append(f"G-set {name}: |X| = {fp.size}, fixed points {fp.points}, "
                     f"|X| = |X^G| mod {p}: {'yes' if fp.congruent else 'no'}")
    return rep, lines


def report_cohomology(doc: Document, group: str, module: str, degree: int):
    G = doc.group(group)
    M = doc.module(module, G)
    H = cohomology_group(G, M, degree)
    inv = [int(d) for d in H.invariant_factors]
    rep = {"group": G.name, "module": list(M.abelian.invariant_factors), "degree": degree,
           "invariant_factors": inv, "order": H.order}
    return rep, [_abelian_str(inv)]


def run_request(doc: Document, req: dict):
    cmd = req["command"]
    need = {"sylow": ["prime"], "sylow-count": ["prime"], "factor": ["map", "prime"], "conjugate": ["prime"],
            "normality": ["prime"], "p-complete": ["prime"], "burnside": ["prime"],
            "cohomology": ["group", "module", "degree"]}.get(cmd, [])
    missing = [k for k in need if k not in req]
    if missing:
        raise UserInputError(f"request {cmd!r} needs {', '.join(missing)}", location=f"{doc.source}#/requests")
    T = lambda: doc.tower(req.get("tower"))  # noqa: E731
    p = req.get("prime")
    if cmd == "sylow":
        return report_sylow(T(), p)
    if cmd == "sylow-count":
        return report_sylow_count(T(), p)
    if cmd == "factor":
        return report_factor(doc, req["map"], p)
    if cmd == "conjugate":
        return report_conjugate(T(), p)
    if cmd == "normality":
        return report_normality(T(), p)
    if cmd == "nilpotent-check":
        return report_nilpotent(T())
    if cmd == "decompose":
        return report_decompose(T())
    if cmd == "p-complete":
        return report_p_complete(T(), p)
    if cmd == "burnside":
        return report_burnside(doc, p)
    return report_cohomology(doc, req["group"], req["module"], req["degree"])


# output ------------------------------------------------------------------------

def emit(rep, lines, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(rep, indent=2, sort_keys=True, default=_json_default))
    else:
        for line in lines:
            click.echo(line)


def _json_default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _threads(n: int | None) -> int:
    if n is None:
        n = int(os.environ.get("SYLOWTOWER_THREADS", "1") or 1)
    if n < 1:
        raise UserInputError("thread count must be positive", location="--threads")
    return n


def _error_json(e: SylowTowerError) -> dict:
    return {"error": {"class": e.kind, "location": e.location, "message": e.message, "hint": e.hint}}


# commands ----------------------------------------------------------------------

json_opt = click.option("--json", "as_json", is_flag=True, help="Emit machine-readable JSON.")
tower_opt = click.option("--tower", default=None, help="Tower name in the document (default: the first).")
prime_opt = click.option("--prime", "-p", type=int, required=True, help="The prime p.")
file_arg = click.argument("path", type=click.Path(dir_okay=False))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="sylowtower")
def cli():
    """Sylow theory for Postnikov towers with finite homotopy groups."""


@cli.command()
@file_arg
@json_opt
def validate(path, as_json):
    """Load and validate a document, then list its contents."""
    doc = load(path)
    rep = {k: sorted(getattr(doc, k)) for k in ("groups", "modules", "towers", "maps", "gsets", "fibrations")}
    rep["requests"] = len(doc.requests)
    lines = [f"{path}: valid"] + [f"  {k}: {', '.join(v) if v else '-'}" for k, v in rep.items() if k != "requests"]
    lines.append(f"  requests: {rep['requests']}")
    emit(rep, lines, as_json)


@cli.command()
@file_arg
@prime_opt
@tower_opt
@json_opt
def sylow(path, prime, tower, as_json):
    """Enumerate the p-Sylow maps into a tower."""
    emit(*report_sylow(load(path).tower(tower), prime), as_json)


@cli.command("sylow-count")
@file_arg
@prime_opt
@tower_opt
@json_opt
def sylow_count(path, prime, tower, as_json):
    """Print the number of p-Sylow maps up to equivalence over the tower."""
    emit(*report_sylow_count(load(path).tower(tower), prime), as_json)


@cli.command()
@file_arg
@click.option("--map", "map_name", required=True, help="Name of a map whose source is a p-tower.")
@prime_opt
@json_opt
def factor(path, map_name, prime, as_json):
    """Factor a map from a p-tower through a Sylow map."""
    emit(*report_factor(load(path), map_name, prime), as_json)


@cli.command()
@file_arg
@prime_opt
@tower_opt
@json_opt
def conjugate(path, prime, tower, as_json):
    """Exhibit conjugating elements between the p-Sylow maps."""
    emit(*report_conjugate(load(path).tower(tower), prime), as_json)


@cli.command()
@file_arg
@prime_opt
@tower_opt
@json_opt
def normality(path, prime, tower, as_json):
    """Test the p-Sylow maps for normality and report obstructions by level."""
    emit(*report_normality(load(path).tower(tower), prime), as_json)


@cli.command("nilpotent-check")
@file_arg
@tower_opt
@json_opt
def nilpotent_check(path, tower, as_json):
    """Decide nilpotency of a tower with certificates."""
    emit(*report_nilpotent(load(path).tower(tower)), as_json)


@cli.command()
@file_arg
@tower_opt
@json_opt
def decompose(path, tower, as_json):
    """Split a nilpotent tower as the product of its Sylow towers."""
    emit(*report_decompose(load(path).tower(tower)), as_json)


@cli.command("p-complete")
@file_arg
@prime_opt
@tower_opt
@json_opt
def p_complete(path, prime, tower, as_json):
    """The p-completion of a nilpotent tower."""
    emit(*report_p_complete(load(path).tower(tower), prime), as_json)


@cli.command()
@file_arg
@prime_opt
@click.option("--fibration", default=None, help="Only this fibration.")
@click.option("--gset", default=None, help="Only this G-set.")
@json_opt
def burnside(path, prime, fibration, gset, as_json):
    """Homotopy fixed point sections of fibrations and fixed points of G-sets."""
    emit(*report_burnside(load(path), prime, fibration, gset), as_json)


@cli.command()
@click.argument("path", type=click.Path(dir_okay=False), required=False)
@click.option("--group", "group", required=True, help="Group name in the document or a builtin like cyclic:4.")
@click.option("--module", "module", required=True, help="Module name in the document or trivial:k1,k2,...")
@click.option("--degree", type=int, required=True, help="Cohomological degree n >= 0.")
@json_opt
def cohomology(path, group, module, degree, as_json):
    """Compute H^n(G; M) as invariant factors."""
    if degree < 0:
        raise UserInputError("degree must be non-negative", location="--degree")
    doc = load(path) if path else Document("<builtin>")
    emit(*report_cohomology(doc, group, module, degree), as_json)


@cli.command()
@file_arg
@click.option("--threads", type=int, default=None, help="Worker threads (default: SYLOWTOWER_THREADS or 1).")
@json_opt
def run(path, threads, as_json):
    """Run the analysis requests listed in a document, in document order."""
    doc = load(path)
    n = _threads(threads)

    def one(req):
        try:
            return req, run_request(doc, req), None
        except SylowTowerError as e:
            return req, None, e

    if n == 1:
        results = [one(r) for r in doc.requests]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(one, doc.requests))
    out, lines, code = [], [], 0
    for i, (req, res, err) in enumerate(results):
        head = " ".join(f"{k}={req[k]}" for k in sorted(req) if k != "command")
        lines.append(f"[{i}] {req['command']} {head}".rstrip())
        if err is None:
            out.append({"request": req, "result": res[0]})
            lines.extend("  " + line for line in res[1])
        else:
            out.append({"request": req, **_error_json(err)})
            lines.append("  " + err.describe())
            code = code or err.exit_code
    emit({"results": out}, lines, as_json)
    if code:
        sys.exit(code)


@cli.command()
@click.option("--full", is_flag=True, help="Run the larger randomized suites.")
@click.option("--threads", type=int, default=None, help="Worker threads (default: SYLOWTOWER_THREADS or 1).")
@click.option("--seed", type=int, default=0, show_default=True)
@json_opt
def selftest(full, threads, seed, as_json):
    """Run the invariant suites on the built-in corpus."""
    from .selftest import run_suites

    results = run_suites(full=full, seed=seed, threads=_threads(threads))
    rep = {"suites": [r.to_json() for r in results], "passed": all(r.ok for r in results)}
    lines = [r.line() for r in results]
    emit(rep, lines, as_json)
    if not rep["passed"]:
        sys.exit(TheoryViolation.exit_code)


def main(argv=None) -> int:
    as_json = "--json" in (argv if argv is not None else sys.argv[1:])
    try:
        cli.main(args=argv, prog_name="sylowtower", standalone_mode=False)
        return 0
    except SylowTowerError as e:
        err = e
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        err = UserInputError("aborted", location="<terminal>", hint="rerun the command")
    except click.ClickException as e:
        err = UserInputError(e.format_message(), location="<command line>", hint="see sylowtower --help")
    except SystemExit as e:
        return int(e.code or 0)
    except MemoryError:
        err = CapacityError("out of memory", location="<runtime>")
    except RecursionError:
        err = CapacityError("recursion limit exceeded", location="<runtime>")
    except Exception as e:  # noqa: BLE001 - surfaced as an internal error class
        err = TheoryViolation(f"internal error {type(e).__name__}: {e}", location="<runtime>")
    if as_json:
        click.echo(json.dumps(_error_json(err), indent=2, sort_keys=True))
    click.echo(err.describe(), err=True)
    return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
