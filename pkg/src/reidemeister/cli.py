"""Command line front end: ``reidemeister JOBFILE`` or ``reidemeister --fixtures [DIR]``.

Exit codes: 0 ok, 2 parse or validation error, 3 verification failure,
4 certification undecided, 5 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .jobs import JobError, JobSpec, parse_job, validate_numeric
from .lattice import IntMatrix, smith_normal_form
from .polyfree import (
    GroupError,
    PfGroup,
    PfMorphism,
    ResourceCapExceeded,
    centralizer,
    euler_data,
)
from .torus import bmv_classify, bmv_predicates, verify_relators
from .twisted import AbelianInvariant, Conclusion, certify_r_infinite, twisted_orbit_report
from .words import Word, format_word

EXIT_OK, EXIT_PARSE, EXIT_VERIFY, EXIT_UNDECIDED, EXIT_CAP = 0, 2, 3, 4, 5


@dataclass
class Report:
    command: str
    context: list[tuple[str, str]] = field(default_factory=list)
    result: list[str] = field(default_factory=list)
    status: str = "ok"
    exit_code: int = EXIT_OK

    def render(self, fmt: str = "stable") -> str:
        if fmt == "stable":
            lines = [f"command: {self.command}"]
            lines += [f"{k}: {v}" for k, v in self.context]
            lines.append(f"status: {self.status}")
            lines.append("result:")
            lines += [f"  {line}" for line in self.result]
            return "\n".join(lines) + "\n"
        head = f"{self.command}" + "".join(f"  [{k} {v}]" for k, v in self.context)
        body = "\n".join(self.result)
        return f"{head}\n{'-' * len(head)}\n{body}\n=> {self.status} (exit {self.exit_code})\n"


# ---------------------------------------------------------------- formatting


def describe_group(job: JobSpec) -> str:
    if job.torus is not None:
        return f"mapping_torus k={job.torus.k}"
    G = job.group
    kind = "direct" if G.is_direct() else "semidirect"
    out = f"{kind} r={G.r} s={G.s} kernel={','.join(G.kernel_names) or '-'} quotient={','.join(G.quotient_names) or '-'}"
    for b, f in zip(G.quotient_names, G.actions):
        if not f.is_identity():
            out += f" | {b}: " + ", ".join(f"{a} -> {format_word(w, G.kernel_names)}" for a, w in zip(G.kernel_names, f.images))
    return out


def describe_morphism(G: PfGroup, f: PfMorphism) -> str:
    return ", ".join(f"{n} -> {G.format(img)}" for n, img in zip(G.names, f.images))


def _word(G: PfGroup, w: Word | None, part: str) -> str:
    names = G.kernel_names if part == "kernel" else G.quotient_names
    return format_word(w, names)


# ---------------------------------------------------------------- commands


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise JobError(message)


def cmd_classify(job: JobSpec, rep: Report) -> None:
    if job.matrix is not None:
        M = job.matrix
        source = "matrix"
    else:
        G = job.group
        _need(G is not None and G.r == 2 and G.s == 1, "classify needs a 2x2 matrix or a group F_2 x| Z")
        # monodromy phi with t^-1 w t = phi(w) is the inverse of the stored action
        M = G.action_inverses[0].abelianization()
        source = "monodromy"
    try:
        case = bmv_classify(M)
    except ValueError as exc:
        raise JobError(str(exc)) from None
    preds = bmv_predicates(M)
    rep.result += [
        f"source: {source}",
        f"matrix: {M}",
        f"det: {M.det()}",
        f"case: {case.value} ({case.name})",
        "predicates: " + " ".join(f"{c.value}={'true' if v else 'false'}" for c, v in preds.items()),
    ]


def cmd_certify(job: JobSpec, rep: Report) -> None:
    _need(job.group is not None and job.morphism is not None, "certify needs a group and a morphism or family")
    _need(job.morphism.has_verified_inverse(), "certify needs an automorphism; add an 'inverse:' line")
    target = job.torus if job.torus is not None else job.group
    cert = certify_r_infinite(target, job.morphism)
    rep.result += cert.lines()
    rep.result.append(f"replay: {'ok' if cert.replay() else 'FAILED'}")
    if cert.conclusion is Conclusion.UNDECIDED:
        rep.status, rep.exit_code = "undecided", EXIT_UNDECIDED


def cmd_orbits(job: JobSpec, rep: Report) -> None:
    G = job.group
    _need(G is not None, "orbits needs a group")
    phi = job.morphism if job.morphism is not None else PfMorphism.identity(G)
    report = twisted_orbit_report(G, phi, job.ball, job.conj, jobs=job.jobs)
    rep.result += report.lines()
    rep.result.append(f"abelian_invariant_group: {AbelianInvariant(G, phi).quotient.structure}")


def cmd_centralizer(job: JobSpec, rep: Report) -> None:
    G = job.group
    _need(G is not None and job.element is not None, "centralizer needs a group and an element")
    try:
        d = centralizer(G, job.element)
    except GroupError as exc:
        raise JobError(str(exc)) from None
    rep.result += [f"element: {G.format(job.element)}", f"tag: {d.tag}"]
    if d.kernel_root is not None:
        rep.result.append(f"kernel_root: {_word(G, d.kernel_root, 'kernel')}")
    if d.quotient_root is not None:
        rep.result.append(f"quotient_root: {_word(G, d.quotient_root, 'quotient')}")
    if d.twist is not None:
        rep.result.append(f"twist: {_word(G, d.twist, 'kernel')}")
    if d.note:
        rep.result.append(f"note: {d.note}")


def cmd_snf(job: JobSpec, rep: Report) -> None:
    if job.positional:
        try:
            M = IntMatrix.parse(job.positional[0])
        except ValueError as exc:
            raise JobError(f"bad matrix: {exc}") from None
    else:
        _need(job.matrix is not None, 'snf needs a matrix, e.g. command snf "0 3; 0 0"')
        M = job.matrix
    snf = smith_normal_form(M)
    ok = snf.U @ M @ snf.V == snf.D
    rep.result += [
        f"M: {M}",
        f"U: {snf.U}",
        f"D: {snf.D}",
        f"V: {snf.V}",
        f"diagonal: {' '.join(map(str, snf.diagonal))}",
        f"check: U M V = D {'holds' if ok else 'FAILS'}",
    ]
    if not ok:
        rep.status, rep.exit_code = "verification failed", EXIT_VERIFY


def cmd_euler(job: JobSpec, rep: Report) -> None:
    if "ranks" in job.args:
        try:
            ranks = tuple(int(x) for x in job.args["ranks"].split(","))
        except ValueError:
            raise JobError("ranks must be a comma-separated list of integers") from None
    else:
        _need(job.group is not None, "euler needs ranks=... or a group")
        ranks = tuple(n for n in (job.group.r, job.group.s) if n > 0)
    try:
        data = euler_data(ranks)
    except GroupError as exc:
        raise JobError(str(exc)) from None
    rep.result += [
        f"ranks: {','.join(map(str, ranks))}",
        f"length: {data.length}",
        f"characteristic: {data.characteristic}",
        f"bound: {data.bound}",
    ]


def cmd_verify(job: JobSpec, rep: Report) -> None:
    _need(job.group is not None, "verify needs a group")
    G = job.group
    rep.result.append(f"group actions: verified automorphisms ({G.s} generator{'s' if G.s != 1 else ''})")
    if job.morphism is None:
        return
    problems = list(job.relator_problems)
    if job.torus is not None and not verify_relators(job.torus, job.morphism):
        problems.append("mapping torus presentation relators fail")
    rep.result.append(f"inverse: {'verified' if job.morphism.has_verified_inverse() else 'not supplied'}")
    if problems:
        rep.result.append("relators: FAIL")
        rep.result += [f"  {p}" for p in problems]
        rep.status, rep.exit_code = "verification failed", EXIT_VERIFY
    else:
        rep.result.append("relators: ok")


COMMAND_TABLE = {
    "classify": cmd_classify,
    "certify": cmd_certify,
    "orbits": cmd_orbits,
    "centralizer": cmd_centralizer,
    "snf": cmd_snf,
    "euler": cmd_euler,
    "verify": cmd_verify,
}


def run(job: JobSpec) -> Report:
    """Execute a validated job.  Raises ``JobError`` for misuse and
    ``ResourceCapExceeded`` when a ball grows past the caps."""
    rep = Report(job.command)
    if job.group is not None:
        rep.context.append(("group", describe_group(job)))
    if job.morphism is not None:
        label = f"family {job.family}" if job.family else describe_morphism(job.group, job.morphism)
        rep.context.append(("morphism", label))
    if job.command == "orbits":
        rep.context.append(("options", f"ball={job.ball} conj={job.conj}"))
    COMMAND_TABLE[job.command](job, rep)
    return rep


def run_text(text: str, fmt: str = "stable", ball=None, conj=None, jobs=None) -> tuple[str, int]:
    """Parse, run and render; returns ``(output, exit_code)`` and never raises
    for bad input."""
    try:
        job = parse_job(text)
        for key, val in (("ball", ball), ("conj", conj), ("jobs", jobs)):
            if val is not None:
                setattr(job, key, val)
        validate_numeric(job)
        rep = run(job)
    except (JobError, GroupError) as exc:
        return f"error: {exc}\n", EXIT_PARSE
    except ResourceCapExceeded as exc:
        return f"resource cap exceeded: {exc}\n", EXIT_CAP
    return rep.render(fmt), rep.exit_code


def bundled_fixtures() -> Path:
    return Path(str(resources.files("reidemeister") / "fixtures"))


def expected_exit(text: str) -> int:
    for line in text.splitlines():
        if line.startswith("# expect-exit:"):
            return int(line.split(":", 1)[1])
    return EXIT_OK


def run_fixtures(directory: Path, fmt: str, overrides: dict) -> int:
    files = sorted(directory.glob("*.job"))
    if not files:
        print(f"no .job files in {directory}", file=sys.stderr)
        return EXIT_PARSE
    mismatches = 0
    for path in files:
        text = path.read_text()
        out, code = run_text(text, fmt, **overrides)
        want = expected_exit(text)
        print(f"=== {path.name} (exit {code}, expected {want})")
        print(out, end="")
        mismatches += code != want
    print(f"=== {len(files)} fixtures, {mismatches} unexpected exit codes")
    return EXIT_OK if mismatches == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reidemeister", description="Twisted conjugacy computations on polyfree groups.")
    p.add_argument("job", nargs="?", help="job file, or '-' for standard input")
    p.add_argument("--ball", type=int, help="ball radius for orbits (overrides the job)")
    p.add_argument("--conj", type=int, help="conjugator radius for orbits (overrides the job)")
    p.add_argument("--jobs", type=int, help="worker processes for orbit merging")
    p.add_argument("--format", choices=("text", "stable"), default="text")
    p.add_argument(
        "--fixtures",
        nargs="?",
        const="",
        metavar="DIR",
        help="run every .job file in DIR (default: the bundled corpus) and compare exit codes",
    )
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"ball": args.ball, "conj": args.conj, "jobs": args.jobs}
    if args.fixtures is not None:
        directory = Path(args.fixtures) if args.fixtures else bundled_fixtures()
        return run_fixtures(directory, args.format, overrides)
    if args.job is None:
        print("error: give a job file or --fixtures", file=sys.stderr)
        return EXIT_PARSE
    try:
        text = sys.stdin.read() if args.job == "-" else Path(args.job).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out, code = run_text(text, args.format, **overrides)
    (sys.stderr if code == EXIT_PARSE else sys.stdout).write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
