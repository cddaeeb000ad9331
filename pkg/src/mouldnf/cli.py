"""Command-line front end.

Subcommands::

    mouldnf solve-mould PROBLEM   solve the mould equation, write F/S/G/N
    mouldnf normalize PROBLEM     normal form of an engine problem
    mouldnf verify PROBLEM        re-verify (optionally a stored bundle, --deep oracles)
    mouldnf semiclassical PROBLEM compare Moyal and Poisson normal forms
    mouldnf show FILE             pretty-print a mould or element file

Exit codes: 0 success, 2 invalid input, 3 solver error, 4 verification failure.
Reports are deterministic; timing goes to stderr only.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from typing import Dict, List, Optional

from . import io
from .errors import MouldError, SchemaError
from .liecore import NormalFormResult, normal_form, verify_normal_form
from .moulds import Mould, letter_to_json, shuffle_coefficient
from .scalars import Scalar

EXIT_OK, EXIT_SCHEMA, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4


def _fmt_letter(a) -> str:
    if isinstance(a, tuple):
        return "(" + ",".join(str(x) for x in a) + ")"
    return str(a)


def _fmt_word(w) -> str:
    return "[" + " ".join(_fmt_letter(a) for a in w) + "]"


def _pass(flag: bool) -> str:
    return "PASS" if flag else "FAIL"


class Report:
    """Ordered report: text lines for stdout and a JSON document."""

    def __init__(self, command: str):
        self.lines: List[str] = []
        self.doc: Dict = {"command": command}
        self.checks: Dict[str, bool] = {}

    def line(self, text: str = ""):
        self.lines.append(text)

    def check(self, name: str, ok: bool, detail: str = ""):
        self.checks[name] = bool(ok)
        self.line(f"check {name}: {_pass(ok)}" + (f" ({detail})" if detail and not ok else ""))

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def finish(self) -> dict:
        self.doc["checks"] = dict(self.checks)
        self.doc["status"] = _pass(self.ok)
        self.line(f"status: {_pass(self.ok)}")
        return self.doc


def _counts(M: Mould) -> dict:
    return {str(k): v for k, v in enumerate(M.counts_by_length())}


def _mould_summary(rep: Report, name: str, M: Mould, show: int = 8):
    counts = _counts(M)
    rep.line(f"{name}: nonzero entries by length {counts}")
    for w, v in M.sorted_items()[:show]:
        if w:
            rep.line(f"  {name}^{_fmt_word(w)} = {v}")
    extra = len([w for w in M.entries if w]) - show
    if extra > 0:
        rep.line(f"  ... {extra} more")
    return counts


def _element_lines(rep: Report, name: str, X, show: int = 12):
    terms = X.sorted_terms()
    rep.line(f"{name}: {len(terms)} terms")
    for k, v in terms[:show]:
        rep.line(f"  {k}: {v}")
    if len(terms) > show:
        rep.line(f"  ... {len(terms) - show} more")


# ---------------------------------------------------------------------------
# solve-mould
# ---------------------------------------------------------------------------


def _solve_mould(parsed, rep: Report, deep: bool, seed: int):
    from .oracle import alternal_by_coproduct, shuffle_by_permutations, symmetral_by_coproduct
    from .solver import closed_form_check, normalize_zero_resonant, solve, verify_solution

    sol = solve(parsed.eigenvalues, parsed.alphabet, parsed.max_len, gauge=parsed.gauge)
    if parsed.normalize_resonant:
        sol = normalize_zero_resonant(sol)
    rep.line(f"alphabet: {', '.join(_fmt_letter(a) for a in sol.alphabet)}")
    rep.line("eigenvalues: " + ", ".join(f"{_fmt_letter(a)}->{sol.eigenvalues[a]}"
                                         for a in sol.alphabet))
    rep.line(f"max_len: {sol.max_len}")
    summary = {}
    for name in ("F", "S", "G", "N"):
        summary[name] = _mould_summary(rep, name, getattr(sol, name))
    res = verify_solution(sol)
    for key, val in res.summary().items():
        if isinstance(val, bool):
            rep.check(key, val)
        else:
            rep.check(f"residual {key}", val is None, f"first nonzero {val}")
    closed = closed_form_check(sol)
    rep.check("closed forms", closed.ok)
    if deep:
        rep.check("alternal F (coproduct)", alternal_by_coproduct(sol.F))
        rep.check("alternal G (coproduct)", alternal_by_coproduct(sol.G))
        rep.check("symmetral S (coproduct)", symmetral_by_coproduct(sol.S))
        rng = random.Random(seed)
        letters = list(sol.alphabet) or [0]
        agree = True
        for _ in range(40):
            a = tuple(rng.choice(letters) for _ in range(rng.randint(0, 3)))
            b = tuple(rng.choice(letters) for _ in range(rng.randint(0, 3)))
            n = list(a + b)
            rng.shuffle(n)
            n = tuple(n)
            agree &= shuffle_coefficient(a, b, n) == shuffle_by_permutations(a, b, n)
        rep.check("shuffle coefficients (permutations)", agree)
    rep.doc.update({
        "alphabet": [letter_to_json(a) for a in sol.alphabet],
        "eigenvalues": [str(sol.eigenvalues[a]) for a in sol.alphabet],
        "max_len": sol.max_len,
        "solution": {"nonzero_by_length": summary},
        "residuals": res.summary(),
    })
    files = {name + ".json": getattr(sol, name).to_json() for name in ("F", "S", "G", "N", "A")}
    return files


# ---------------------------------------------------------------------------
# normalize / verify
# ---------------------------------------------------------------------------


def _build(parsed):
    problem = parsed.build(parsed.order)
    gauge = io.parse_gauge(parsed.gauge_data, problem.letters, max(problem.m - 1, 0))
    return problem, gauge


def _problem_lines(rep: Report, problem, parsed):
    rep.line(f"engine: {parsed.engine}")
    rep.line(f"order: {problem.m}")
    letters = problem.letters
    rep.line(f"modes: {{{', '.join(_fmt_letter(a) for a in letters)}}}")
    rep.line("eigenvalues: " + ", ".join(f"{_fmt_letter(a)}->{problem.eigenvalues[a]}"
                                         for a in letters))
    if problem.model is not None:
        rep.line(f"frequency model: q={[list(r) for r in problem.model.q]} R={problem.model.R}")
    rep.doc.update({
        "engine": parsed.engine,
        "inputs": parsed.data,
        "order": problem.m,
        "modes": [letter_to_json(a) for a in letters],
        "eigenvalues": [str(problem.eigenvalues[a]) for a in letters],
    })


def _engine_checks(rep: Report, parsed, problem, result: NormalFormResult, deep: bool):
    from . import oracle
    report = result.report
    rep.check("commutation [X0, Z] = 0", report.commutation.is_zero())
    rep.check("conjugacy exp(ad Y)(X0+B) = X0+Z", report.conjugacy.is_zero())
    m = problem.m
    Z, Y = result.Z, result.Y
    if parsed.engine == "birkhoff" and parsed.real:
        real_gauge = result.solution.A.is_zero()
        if real_gauge:
            rep.check("Z real", Z.is_real())
            rep.check("Y real", Y.is_real())
    if parsed.engine == "pd":
        from .engines.vectorfields import Polynomial, pd_flow
        flow = pd_flow(problem, result)
        N = problem.X0.N
        ok = True
        for j in range(N):
            # exp(Y) acting on z_j by the Lie series of the derivation
            f = Polynomial.coordinate(N, j)
            acc, term = f, f
            for k in range(1, m + 1):
                term = Y.apply(term).truncate(m).scale(Scalar(1) / k)
                acc = acc + term
            ok &= acc.truncate(m) == flow[j]
        rep.check("flow via S equals exp(Y) on coordinates", ok)
    if parsed.engine == "quantum":
        from .engines.quantum import (MatrixOperator, conjugate_by, diagonal_operator,
                                      is_block_diagonal, unitary)
        energies = parsed.energies
        rep.check("Z block-diagonal", is_block_diagonal(Z, energies))
        X = diagonal_operator(energies, Z.ctx) + parsed.perturbation
        rep.check("U (X0+B) U^-1 = X0+Z", (conjugate_by(Y, X, m) - problem.X0 - Z).truncate(m).is_zero())
        if parsed.perturbation.is_symmetric():
            U = unitary(Y, m)
            rep.check("unitarity", U.matmul(U.conj(), m) == MatrixOperator.identity(Z.ctx))
        if deep and len(set(energies)) == len(energies) and len(energies) <= 6 and m <= 4:
            rs = oracle.rayleigh_schrodinger(energies, parsed.perturbation, m)
            ok = all(Z.terms.get((e, k, k), Scalar(0)) == rs[k][e - 1]
                     for k in range(len(energies)) for e in range(1, m))
            rep.check("Rayleigh-Schrodinger diagonal", ok)
    if deep:
        direct = oracle.direct_conjugacy(problem, Y, m)
        rep.check("direct conjugacy oracle", (direct - problem.X0 - Z).truncate(m).is_zero())
        if parsed.engine == "birkhoff" and problem.X0.ctx.d <= 2 and m <= 4 \
                and result.solution.A.is_zero():
            freqs = [Scalar.parse(f) for f in problem.metadata["frequencies"]]
            dep = oracle.deprit_birkhoff(freqs, parsed.perturbation, m, strict=False)
            if dep.ambiguous:
                rep.line("note: resonant modes make the Lie-transform comparison non-unique")
            else:
                rep.check("Lie-transform normal form", dep.normal_form == Z)


def _normalize(parsed, rep: Report, deep: bool):
    problem, gauge = _build(parsed)
    _problem_lines(rep, problem, parsed)
    result = normal_form(problem, gauge=gauge)
    _mould_summary(rep, "F", result.F, show=4)
    _element_lines(rep, "Z", result.Z)
    _element_lines(rep, "Y", result.Y)
    _engine_checks(rep, parsed, problem, result, deep)
    rep.doc.update({
        "solution": {name: _counts(getattr(result, name)) for name in ("F", "S", "G")},
        "Z": io.element_to_json(result.Z),
        "Y": io.element_to_json(result.Y),
        "residuals": {
            "commutation": io.element_to_json(result.report.commutation),
            "conjugacy": io.element_to_json(result.report.conjugacy),
        },
    })
    files = {"Z.json": io.element_to_json(result.Z), "Y.json": io.element_to_json(result.Y),
             "F.json": result.F.to_json(), "G.json": result.G.to_json()}
    return files


def _verify_bundle(parsed, rep: Report, bundle: str):
    import os
    from .solver import MouldSolution, verify_solution
    if parsed.engine == "mould":
        moulds = {}
        for name in ("F", "S", "G", "N", "A"):
            M = Mould.from_json(io.load_json(os.path.join(bundle, name + ".json")))
            moulds[name] = Mould(parsed.alphabet, parsed.max_len, M.entries)
        lam = parsed.eigenvalues
        if not isinstance(lam, dict):
            lam = lam.eigenvalues(parsed.alphabet, parsed.max_len)
        sol = MouldSolution(eigenvalues=lam, max_len=parsed.max_len, model=None, **moulds)
        res = verify_solution(sol)
        for key, val in res.summary().items():
            if isinstance(val, bool):
                rep.check(key, val)
            else:
                rep.check(f"residual {key}", val is None, f"first nonzero {val}")
        return
    problem, _ = _build(parsed)
    _problem_lines(rep, problem, parsed)
    Z = io.element_from_json(io.load_json(os.path.join(bundle, "Z.json")))
    Y = io.element_from_json(io.load_json(os.path.join(bundle, "Y.json")))
    if type(Z) is not type(problem.X0) or Z.ctx != problem.X0.ctx:
        raise SchemaError("stored Z does not belong to this problem's algebra")
    report = verify_normal_form(problem, NormalFormResult(Z=Z, Y=Y, solution=None))
    rep.check("commutation [X0, Z] = 0", report.commutation.is_zero())
    rep.check("conjugacy exp(ad Y)(X0+B) = X0+Z", report.conjugacy.is_zero())


# ---------------------------------------------------------------------------
# semiclassical
# ---------------------------------------------------------------------------


def _semiclassical(parsed, rep: Report):
    from .engines.moyal import semiclassical_compare
    if parsed.engine != "moyal":
        raise SchemaError("semiclassical needs a moyal problem")
    R = semiclassical_compare(parsed.omega, parsed.perturbation, parsed.order,
                              classical_omega=parsed.classical_omega)
    rep.line("engine: moyal")
    rep.line(f"order: {R.m}")
    rep.line(f"quantum modes: {{{', '.join(_fmt_letter(a) for a in R.quantum.solution.alphabet)}}}")
    rep.line(f"classical modes: {{{', '.join(_fmt_letter(a) for a in R.classical.solution.alphabet)}}}")
    rows = []
    for row in R.by_eps_order():
        e = row["eps"]
        rep.line(f"eps^{e}:")
        rec = {"eps": e}
        for name in ("classical", "quantum_hbar0", "corrections"):
            terms = row[name].sorted_terms()
            rec[name] = [{"key": io._to_listy(k), "c": str(v)} for k, v in terms]
            text = " + ".join(f"({v})*{_monomial(k)}" for k, v in terms) or "0"
            rep.line(f"  {name:14s} {text}")
        rows.append(rec)
    rep.check("termwise equality at hbar=0", R.equal_at_hbar_zero)
    rep.line(f"note: hbar corrections even: {R.corrections_even}")
    rep.line(f"note: same mould on both sides: {R.same_mould}")
    rep.doc.update({"engine": "moyal", "inputs": parsed.data, "order": R.m, "table": rows,
                    "corrections_even": R.corrections_even, "same_mould": R.same_mould})


def _monomial(key) -> str:
    e, h, k, l = key
    parts = []
    if e:
        parts.append(f"eps^{e}")
    if h:
        parts.append(f"hbar^{h}")
    for j, a in enumerate(k):
        if a:
            parts.append(f"x{j + 1}^{a}")
    for j, a in enumerate(l):
        if a:
            parts.append(f"xi{j + 1}^{a}")
    return "*".join(parts) or "1"


# ---------------------------------------------------------------------------
# show
# ---------------------------------------------------------------------------


def _show(path: str) -> List[str]:
    data = io.load_json(path)
    if isinstance(data, dict) and "entries" in data:
        M = Mould.from_json(data)
        out = [f"mould on {{{', '.join(_fmt_letter(a) for a in M.alphabet)}}}, max_len {M.max_len}"]
        out += [f"  {_fmt_word(w)}: {v}" for w, v in M.sorted_items()]
        return out
    if isinstance(data, dict) and "terms" in data and "type" in data:
        X = io.element_from_json(data)
        out = [f"{data['type']} with {len(X.terms)} terms"]
        out += [f"  {k}: {v}" for k, v in X.sorted_terms()]
        return out
    if isinstance(data, dict) and "engine" in data:
        io.validate_problem(data)
        return [f"valid {data['engine']} problem"] + io.dumps(data).splitlines()
    raise SchemaError("file is neither a mould, an element nor a problem")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mouldnf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, problem=True):
        if problem:
            p.add_argument("problem", help="problem file (JSON)")
        p.add_argument("--out-dir", help="write result files here (all or nothing)")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
        return p

    p = common(sub.add_parser("solve-mould", help="solve the mould equation"))
    p.add_argument("--max-len", type=int, help="override the truncation length")
    p.add_argument("--gauge", help="gauge generator mould file (overrides the problem)")
    p.add_argument("--deep", action="store_true", help="also run the oracle checks")

    p = common(sub.add_parser("normalize", help="normal form of an engine problem"))
    p.add_argument("--order", type=int, help="override the truncation order m")
    p.add_argument("--gauge", help="gauge generator mould file (overrides the problem)")
    p.add_argument("--deep", action="store_true", help="also run the oracle checks")

    p = common(sub.add_parser("verify", help="re-verify a problem or a stored bundle"))
    p.add_argument("--bundle", help="directory written by solve-mould or normalize")
    p.add_argument("--max-len", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--gauge")
    p.add_argument("--deep", action="store_true")

    p = common(sub.add_parser("semiclassical", help="Moyal vs Poisson normal forms"))
    p.add_argument("--order", type=int)

    p = sub.add_parser("show", help="pretty-print a mould, element or problem file")
    p.add_argument("file")
    return parser


def _load_problem(args):
    data = io.load_json(args.problem)
    gauge = getattr(args, "gauge", None)
    if gauge:
        if not isinstance(data, dict):
            raise SchemaError("problem must be an object")
        data = dict(data, gauge=io.load_json(gauge))
    return io.parse_problem(data, order=getattr(args, "order", None),
                            max_len=getattr(args, "max_len", None))


def _run(args, out) -> int:
    if args.command == "show":
        for line in _show(args.file):
            print(line, file=out)
        return EXIT_OK
    rep = Report(args.command)
    parsed = _load_problem(args)
    deep = getattr(args, "deep", False) or parsed.data.get("deep_verify", False)
    files: Dict = {}
    if args.command == "solve-mould":
        if parsed.engine != "mould":
            raise SchemaError("solve-mould needs a mould problem (engine 'mould')")
        files = _solve_mould(parsed, rep, deep, args.seed)
    elif args.command == "normalize":
        if parsed.engine == "mould":
            raise SchemaError("normalize needs an engine problem; use solve-mould")
        files = _normalize(parsed, rep, deep)
    elif args.command == "verify":
        if args.bundle:
            _verify_bundle(parsed, rep, args.bundle)
        elif parsed.engine == "mould":
            _solve_mould(parsed, rep, deep, args.seed)
        else:
            _normalize(parsed, rep, deep)
    elif args.command == "semiclassical":
        _semiclassical(parsed, rep)
    doc = rep.finish()
    for line in rep.lines:
        print(line, file=out)
    if args.out_dir:
        files["report.json"] = doc
        files["report.txt"] = "\n".join(rep.lines) + "\n"
        io.write_bundle(args.out_dir, files)
    return EXIT_OK if rep.ok else EXIT_VERIFY


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code = _run(args, out)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except MouldError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        pair = getattr(exc, "pair", None)
        if pair is not None:
            print(f"violating pair: {_fmt_word(pair[0])} {_fmt_word(pair[1])}", file=out)
        return EXIT_SOLVER
    print(f"elapsed: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
