"""Command-line front end.

Every subcommand builds a request model, calls the matching service
handler (in-process by default, over HTTP with --url), and prints either
a human-readable report or, with --json, the deterministic wire format.

Exit codes: 0 ok (including negative verdicts), 2 malformed input,
3 computation budget exceeded, 4 missing invariant (e.g. a link class
whose Hopf-pairing invariant lambda is not known).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import SCHEMA_VERSION, schemas, service
from .exactlin import ENUM_BUDGET_ENV

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_MISSING = 4

_EXIT_BY_CODE = {
    service.ERROR_INPUT: EXIT_INPUT,
    service.ERROR_BUDGET: EXIT_BUDGET,
    service.ERROR_MISSING: EXIT_MISSING,
}


class _Client:
    """Dispatches requests either in-process or to a running service."""

    def __init__(self, url: Optional[str] = None):
        self.url = url.rstrip("/") if url else None

    def call(self, method: str, path: str, handler, request=None):
        if self.url is None:
            return handler(request) if request is not None else handler()
        import httpx

        if method == "GET":
            resp = httpx.get(self.url + path)
        else:
            resp = httpx.post(
                self.url + path, json=json.loads(request.model_dump_json(by_alias=True))
            )
        if resp.status_code >= 400:
            detail = resp.json().get("detail", {})
            raise service.ServiceError(
                detail.get("code", service.ERROR_INPUT),
                detail.get("message", resp.text),
            )
        return resp.json()


def _dump(report) -> dict:
    if isinstance(report, dict):
        return report
    return json.loads(report.model_dump_json(by_alias=True))


def _emit(report, args, render) -> int:
    data = _dump(report)
    if args.json:
        print(json.dumps(data, sort_keys=True, separators=(",", ": "), indent=1))
    else:
        render(data)
    return EXIT_OK


# --- argument helpers ---------------------------------------------------------


def _parse_ints(text: str, expect: Optional[int] = None) -> list[int]:
    try:
        vals = [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise service.ServiceError(service.ERROR_INPUT, f"expected integers, got {text!r}")
    if expect is not None and len(vals) != expect:
        raise service.ServiceError(
            service.ERROR_INPUT, f"expected {expect} integers, got {len(vals)} in {text!r}"
        )
    return vals


def _manifold_spec(args) -> schemas.ManifoldSpec:
    form = None
    if getattr(args, "form", None):
        try:
            form = json.loads(args.form)
        except json.JSONDecodeError as exc:
            raise service.ServiceError(service.ERROR_INPUT, f"malformed form JSON: {exc}")
    return schemas.ManifoldSpec(
        builtin=getattr(args, "builtin", None),
        form=form,
        b1=getattr(args, "b1", 0) or 0,
        b2=getattr(args, "b2", None),
        e=getattr(args, "e", None),
        sigma=getattr(args, "sigma", None),
    )


def _load_collection(path: str) -> schemas.CollectionIn:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise service.ServiceError(service.ERROR_INPUT, f"cannot read collection {path}: {exc}")
    if isinstance(data, list):
        data = {"links": data}
    try:
        return schemas.CollectionIn.model_validate(data)
    except ValueError as exc:
        raise service.ServiceError(service.ERROR_INPUT, f"malformed collection {path}: {exc}")


def _parse_ambient(text: str) -> schemas.AmbientIn:
    free, torsion = 0, []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        if key.strip() == "free":
            free = _parse_ints(val, 1)[0]
        elif key.strip() == "torsion":
            torsion = _parse_ints(val)
        else:
            raise service.ServiceError(
                service.ERROR_INPUT, f"unknown ambient field {key.strip()!r}"
            )
    return schemas.AmbientIn(free=free, torsion=torsion)


def _parse_letters(text: str) -> list[schemas.TwistLetterIn]:
    letters = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        curve_part, _, exp_part = chunk.rpartition(":")
        if not curve_part:
            raise service.ServiceError(
                service.ERROR_INPUT, f"letter {chunk!r} is not of the form p,q:k"
            )
        p, q = _parse_ints(curve_part, 2)
        k = _parse_ints(exp_part, 1)[0]
        letters.append(schemas.TwistLetterIn(curve=(p, q), exponent=k))
    if not letters:
        raise service.ServiceError(service.ERROR_INPUT, "empty twist word")
    return letters


# --- renderers ----------------------------------------------------------------


def _render_index(data: dict) -> None:
    m = data["manifold"]
    print(f"manifold {m['name']}: b1={m['b1']} b2={m['b2']} e={m['e']} sigma={m['sigma']}")
    om = data["omega"]
    tail = "" if om["complete"] else " (window search, possibly incomplete)"
    print(f"Omega window |a| <= {om['window']}: {om['values']}{tail}")
    if not data["pairs"]:
        print("no realizable index pairs in the window")
    for p in data["pairs"]:
        feas = "feasible" if p["feasible_as_milnor_total"] else "infeasible as a Milnor total"
        print(
            f"  (lambda, rho) = ({p['lambda']}, {p['rho']})  mu = {p['mu']} [{feas}]"
            f"  index convention (-lambda, rho) = {tuple(p['plane_field_index'])}"
            f"  chern squares = {tuple(p['chern_squares'])}"
        )


def _render_obstruct(data: dict) -> None:
    m = data["manifold"]
    print(f"manifold {m['name']}: b1={m['b1']} b2={m['b2']} e={m['e']} sigma={m['sigma']}")
    for v in data["verdicts"]:
        print(f"  [{v['code']}] {v['detail']}")
        if v["witness"]:
            print(f"      witness: {json.dumps(v['witness'], sort_keys=True)}")


def _render_gphi(data: dict) -> None:
    print(data["presentation"]["text"])
    print(f"abelianization: {data['abelianization']['description']}")
    verdict = data["verdict"]
    line = f"verdict: {verdict}"
    if data.get("coset_count") is not None:
        line += f" (coset table closed at {data['coset_count']})"
    print(line)
    if data.get("reason"):
        print(f"  {data['reason']}")
    if data.get("criterion_value") is not None:
        print(f"criterion k1k2 + k2k3 + k3k1 = {data['criterion_value']}")
    if data.get("torus_expandable") is not None:
        print(f"torus expandable: {data['torus_expandable']}")
    if data.get("annotation"):
        print(f"note: {data['annotation']}")


def _render_enumerate(data: dict) -> None:
    print(f"solution triples with |k_i| <= {data['bound']}:")
    for family, triples in data["families"].items():
        print(f"  {family}: {len(triples)} triples")
        for t in triples:
            print(f"    {tuple(t)}")
    exceptions = data.get("nontrivial_exceptions", [])
    if exceptions:
        print(f"  nontrivial exceptions (perfect, not trivial): {len(exceptions)} triples")
        for t in exceptions:
            print(f"    {tuple(t)}")
    if data["anomalies"]:
        print(f"  ANOMALIES: {[tuple(t) for t in data['anomalies']]}")
    else:
        print("  no anomalies")


def _render_totals(data: dict) -> None:
    print(f"mu total = {data['mu_total']}, lambda total = {data['lambda_total']}")


def _render_equiv(data: dict) -> None:
    word = "stably equivalent" if data["equivalent"] else "NOT stably equivalent"
    print(
        f"{word}: totals (mu, lambda) = {tuple(data['totals_a'])} vs {tuple(data['totals_b'])}"
    )


def _render_hopf(data: dict) -> None:
    if data["unfoldable"]:
        print(
            f"unfolds to {data['positives']} positive and {data['negatives']} "
            "negative Hopf links"
        )
    else:
        print(f"not Hopf-unfoldable: {data['violated']}")


def _render_word(data: dict) -> None:
    a, b, c, d = data["matrix"]
    print(f"matrix [[{a},{b}],[{c},{d}]]")
    print(f"order: {data['order'] if data['order'] is not None else 'infinite'}")
    print(f"abelian image mod 12: {data['abelian_image_mod_12']}")


def _render_order(data: dict) -> None:
    print(f"trace {data['trace']}")
    print(f"order: {data['order'] if data['order'] is not None else 'infinite'}")


def _render_conj(data: dict) -> None:
    print(f"{data['kind']}: {data['description']}")


def _render_ishida(data: dict) -> None:
    print(
        f"intersection number {data['intersection_number']}: "
        f"subgroup type {data['subgroup']}"
    )


def _render_twotwist(data: dict) -> None:
    a, b, c, d = data["matrix"]
    print(f"product [[{a},{b}],[{c},{d}]]")
    print(data["certificate"])


def _render_abelian(data: dict) -> None:
    print(f"image in Z/12: {data['image_mod_12']}")
    if data["commutator_obstruction_vanishes"]:
        print("no abelian obstruction to being a product of commutators")
    else:
        print("nonzero image: not a product of commutators")


def _render_dbeta(data: dict) -> None:
    print(f"d = {data['d']}")
    print(data["note"])


def _render_shell(data: dict) -> None:
    d1, d2 = data["moduli"]
    lam, rho = data["stored_pair"]
    print(f"(lambda, rho) = ({lam}, {rho}); index convention (-lambda, rho) = "
          f"{tuple(data['plane_field_index'])}")
    print(f"moduli (d1, d2) = ({d1}, {d2}); 0 means no reduction")
    print(f"shell invariant (-lambda mod d1, rho mod d2) = {tuple(data['invariant'])}")


def _render_catalog(data: dict) -> None:
    for entry in data["entries"]:
        m = entry["invariants"]
        print(f"{entry['name']}: b1={m['b1']} b2={m['b2']} e={m['e']} sigma={m['sigma']}")
        if entry.get("monodromy_exponents"):
            print(f"  monodromy exponents: {tuple(entry['monodromy_exponents'])}")
        if entry.get("links"):
            for link in entry["links"]:
                print(
                    f"  link: {link['name']} x{link['multiplicity']} "
                    f"(mu={link['mu']}, lambda={link['lambda']})"
                )
        print(f"  provenance: {entry['provenance']}")


def _render_selfcheck(data: dict) -> None:
    for check in data["checks"]:
        status = "ok " if check["passed"] else "FAIL"
        print(f"[{status}] {check['name']}: {check['detail']}")
    print("all checks passed" if data["passed"] else "SELF-CHECK FAILED")


# --- subcommand runners -------------------------------------------------------


def _run_index(args, client: _Client) -> int:
    req = schemas.IndexRequest(manifold=_manifold_spec(args), window=args.window, box=args.box)
    return _emit(client.call("POST", "/index", service.handle_index, req), args, _render_index)


def _run_obstruct(args, client: _Client) -> int:
    req = schemas.ObstructRequest(
        manifold=_manifold_spec(args), base=args.base, fiber=args.fiber
    )
    return _emit(
        client.call("POST", "/obstruct", service.handle_obstruct, req), args, _render_obstruct
    )


def _run_gphi(args, client: _Client) -> int:
    if (args.k is None) == (args.monodromy is None):
        raise service.ServiceError(
            service.ERROR_INPUT, "provide exactly one of --k or --monodromy"
        )
    if args.k is not None:
        k1, k2, k3 = _parse_ints(args.k, 3)
        req = schemas.GphiRequest(k=(k1, k2, k3), max_cosets=args.max_cosets)
    else:
        try:
            with open(args.monodromy) as fh:
                data = json.load(fh)
            monodromy = schemas.MonodromyIn.model_validate(data)
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise service.ServiceError(
                service.ERROR_INPUT, f"malformed monodromy file {args.monodromy}: {exc}"
            )
        req = schemas.GphiRequest(monodromy=monodromy, max_cosets=args.max_cosets)
    return _emit(client.call("POST", "/gphi", service.handle_gphi, req), args, _render_gphi)


def _run_enumerate(args, client: _Client) -> int:
    req = schemas.EnumerateRequest(
        bound=args.bound, torus_expandable_only=args.torus_expandable
    )
    return _emit(
        client.call("POST", "/enumerate", service.handle_enumerate, req),
        args,
        _render_enumerate,
    )


def _run_unfold(args, client: _Client) -> int:
    collection = _load_collection(args.collection)
    if args.unfold_cmd == "totals":
        req = schemas.TotalsRequest(collection=collection)
        return _emit(
            client.call("POST", "/unfold/totals", service.handle_totals, req),
            args,
            _render_totals,
        )
    if args.unfold_cmd == "equiv":
        req = schemas.EquivRequest(a=collection, b=_load_collection(args.other))
        return _emit(
            client.call("POST", "/unfold/equiv", service.handle_equiv, req),
            args,
            _render_equiv,
        )
    req = schemas.HopfRequest(collection=collection)
    return _emit(
        client.call("POST", "/unfold/hopf", service.handle_hopf, req), args, _render_hopf
    )


def _matrix_request(args) -> schemas.MatrixRequest:
    a, b, c, d = _parse_ints(args.matrix, 4)
    try:
        return schemas.MatrixRequest(matrix=(a, b, c, d))
    except ValueError as exc:
        raise service.ServiceError(service.ERROR_INPUT, str(exc))


def _run_mcg(args, client: _Client) -> int:
    cmd = args.mcg_cmd
    if cmd == "word":
        req = schemas.WordRequest(letters=_parse_letters(args.letters))
        return _emit(
            client.call("POST", "/mcg/word", service.handle_mcg_word, req), args, _render_word
        )
    if cmd == "order":
        return _emit(
            client.call("POST", "/mcg/order", service.handle_mcg_order, _matrix_request(args)),
            args,
            _render_order,
        )
    if cmd == "conj":
        return _emit(
            client.call("POST", "/mcg/conj", service.handle_mcg_conj, _matrix_request(args)),
            args,
            _render_conj,
        )
    if cmd == "ishida":
        req = schemas.IshidaRequest(
            c1=tuple(_parse_ints(args.c1, 2)), c2=tuple(_parse_ints(args.c2, 2))
        )
        return _emit(
            client.call("POST", "/mcg/ishida", service.handle_mcg_ishida, req),
            args,
            _render_ishida,
        )
    if cmd == "twotwist":
        req = schemas.TwoTwistRequest(
            c1=tuple(_parse_ints(args.c1, 2)),
            k1=args.k1,
            c2=tuple(_parse_ints(args.c2, 2)),
            k2=args.k2,
        )
        return _emit(
            client.call("POST", "/mcg/twotwist", service.handle_mcg_twotwist, req),
            args,
            _render_twotwist,
        )
    return _emit(
        client.call("POST", "/mcg/abelian", service.handle_mcg_abelian, _matrix_request(args)),
        args,
        _render_abelian,
    )


def _run_dbeta(args, client: _Client) -> int:
    if args.fiber_genus is not None:
        req = schemas.DbetaRequest(fiber_genus=args.fiber_genus)
    else:
        if args.ambient is None or getattr(args, "cls", None) is None:
            raise service.ServiceError(
                service.ERROR_INPUT, "need --fiber-genus, or --ambient with --class"
            )
        req = schemas.DbetaRequest(
            ambient=_parse_ambient(args.ambient), coords=_parse_ints(args.cls)
        )
    return _emit(client.call("POST", "/dbeta", service.handle_dbeta, req), args, _render_dbeta)


def _run_shell(args, client: _Client) -> int:
    lam, rho = _parse_ints(args.pair, 2)
    if args.fiber_genus is not None:
        req = schemas.ShellRequest(lam=lam, rho=rho, fiber_genus=args.fiber_genus)
    else:
        req = schemas.ShellRequest(lam=lam, rho=rho, d1=args.d1, d2=args.d2)
    return _emit(client.call("POST", "/shell", service.handle_shell, req), args, _render_shell)


def _run_catalog(args, client: _Client) -> int:
    return _emit(client.call("GET", "/catalog", service.handle_catalog), args, _render_catalog)


def _run_selfcheck(args, client: _Client) -> int:
    report = client.call("GET", "/selfcheck", service.handle_selfcheck)
    rc = _emit(report, args, _render_selfcheck)
    data = _dump(report)
    return rc if data["passed"] else 1


def _run_serve(args, _client: _Client) -> int:
    import uvicorn

    uvicorn.run("singfib.service:app", host=args.host, port=args.port)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="singfib",
        description="Exact invariants and obstructions for singular fibrations "
        "of closed oriented 4-manifolds.",
        epilog="Lattice-point enumeration is capped at 10^7 points; override with "
        f"the {ENUM_BUDGET_ENV} environment variable. JSON output carries "
        f'"schema": "{SCHEMA_VERSION}". Exit codes: 0 ok, 2 malformed input, '
        "3 budget exceeded, 4 missing invariant.",
    )
    parser.add_argument("--json", action="store_true", help="emit machine-readable JSON")
    parser.add_argument(
        "--url", default=None, help="base URL of a running service (default: in-process)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_manifold_args(p):
        p.add_argument("--builtin", help="builtin manifold tag (see `catalog`)")
        p.add_argument("--form", help="intersection form as a JSON row matrix")
        p.add_argument("--b1", type=int, default=0)
        p.add_argument("--b2", type=int, default=None)
        p.add_argument("--e", type=int, default=None)
        p.add_argument("--sigma", type=int, default=None)

    p = sub.add_parser("index", help="Omega window and realizable (lambda, rho) pairs")
    add_manifold_args(p)
    p.add_argument("--window", type=int, default=100, help="bound on |alpha|")
    p.add_argument("--box", type=int, default=8, help="coefficient box for indefinite forms")
    p.set_defaults(run=_run_index)

    p = sub.add_parser("obstruct", help="obstructions to carrying a singular fibration")
    add_manifold_args(p)
    p.add_argument("--base", help="base surface: s2, t2, genus:<g>, or a chi value")
    p.add_argument("--fiber", help="fiber surface, same format")
    p.set_defaults(run=_run_obstruct)

    p = sub.add_parser("gphi", help="triviality of the capped mapping-torus group")
    p.add_argument("--k", help="three boundary-twist exponents k1,k2,k3")
    p.add_argument("--monodromy", help="path to a monodromy-data JSON file")
    p.add_argument("--max-cosets", type=int, default=100_000, help="coset table budget")
    p.set_defaults(run=_run_gphi)

    p = sub.add_parser("enumerate", help="genus-zero solution triples by family")
    p.add_argument("--bound", type=int, required=True, help="bound on |k_i|")
    p.add_argument(
        "--torus-expandable",
        action="store_true",
        help="keep only triples whose fiber expands to a torus",
    )
    p.set_defaults(run=_run_enumerate)

    p = sub.add_parser("unfold", help="stable unfolding calculus for link collections")
    usub = p.add_subparsers(dest="unfold_cmd", required=True)
    pt = usub.add_parser("totals", help="total (mu, lambda) of a collection")
    pt.add_argument("collection", help="collection JSON file")
    pe = usub.add_parser("equiv", help="stable equivalence of two collections")
    pe.add_argument("collection", help="first collection JSON file")
    pe.add_argument("other", help="second collection JSON file")
    ph = usub.add_parser("hopf", help="decompose into positive/negative Hopf links")
    ph.add_argument("collection", help="collection JSON file")
    p.set_defaults(run=_run_unfold)

    p = sub.add_parser("mcg", help="torus mapping-class computations in SL(2,Z)")
    msub = p.add_subparsers(dest="mcg_cmd", required=True)
    pw = msub.add_parser("word", help="evaluate a product of Dehn twists")
    pw.add_argument(
        "--letters", required=True, help="semicolon-separated letters p,q:k"
    )
    for name in ("order", "conj", "abelian"):
        pm = msub.add_parser(
            name,
            help={
                "order": "order of a mapping class",
                "conj": "canonical conjugacy-class tag",
                "abelian": "image in the abelianization Z/12",
            }[name],
        )
        pm.add_argument("--matrix", required=True, help="row-major entries a,b,c,d")
    pi = msub.add_parser("ishida", help="subgroup generated by two Dehn twists")
    pi.add_argument("--c1", required=True, help="first curve p,q")
    pi.add_argument("--c2", required=True, help="second curve p,q")
    pt2 = msub.add_parser("twotwist", help="is a product of two twist powers trivial?")
    pt2.add_argument("--c1", required=True, help="first curve p,q")
    pt2.add_argument("--k1", type=int, required=True)
    pt2.add_argument("--c2", required=True, help="second curve p,q")
    pt2.add_argument("--k2", type=int, required=True)
    p.set_defaults(run=_run_mcg)

    p = sub.add_parser("dbeta", help="reduction modulus d of a fibered cohomology class")
    p.add_argument("--fiber-genus", type=int, default=None)
    p.add_argument("--ambient", help='ambient H^1, e.g. "free=2;torsion=3,9"')
    p.add_argument("--class", dest="cls", help="class coordinates c1,c2,...")
    p.set_defaults(run=_run_dbeta)

    p = sub.add_parser("shell", help="shell invariant of an index pair")
    p.add_argument("--pair", required=True, help="index pair lambda,rho")
    p.add_argument("--fiber-genus", type=int, default=None)
    p.add_argument("--d1", type=int, default=None)
    p.add_argument("--d2", type=int, default=None)
    p.set_defaults(run=_run_shell)

    p = sub.add_parser("catalog", help="list built-in examples with provenance")
    p.set_defaults(run=_run_catalog)

    p = sub.add_parser("selfcheck", help="run the built-in invariant suite")
    p.set_defaults(run=_run_selfcheck)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(run=_run_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    client = _Client(args.url)
    try:
        return args.run(args, client)
    except service.ServiceError as exc:
        print(f"error ({exc.code}): {exc.message}", file=sys.stderr)
        return _EXIT_BY_CODE.get(exc.code, EXIT_INPUT)
    except ValueError as exc:
        print(f"error (input): {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
