"""Command-line entry point.

    ssiarch <command> [--model PATH] [--kb PATH ...]
            [--format human|json|dot|tsv|markdown]
            [--fail-on error|warning|info] [--scope kb|model]
            [--diff] [--scenario PATH]

Exit codes: 0 clean, 1 findings at or above --fail-on, 2 usage / file /
parse errors. Set SSIARCH_NO_COLOR to disable ANSI styling in human
output."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ssiarch import analysis, dsl, graph as graphmod, sim
from ssiarch.extension import ExtensionError, load_extension, merge
from ssiarch.findings import Finding, Severity
from ssiarch.kb import ACTOR_ORDER, KbError, KnowledgeBase, builtin_kb
from ssiarch.report import Report, emit_human, emit_json, emit_markdown

_NODE_ORDER = {kind: i for i, kind in enumerate(ACTOR_ORDER)}

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class CliError(Exception):
    """Usage, file, or parse error; maps to exit code 2."""


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc


def _load_kb(extension_paths: list[str]) -> KnowledgeBase:
    kb = builtin_kb()
    for path in extension_paths:
        text = _read_file(path)
        try:
            kb = merge(kb, load_extension(text))
        except (ExtensionError, KbError) as exc:
            raise CliError(f"{path}: {exc}") from exc
    return kb


def _load_model(path: str | None, kb: KnowledgeBase) -> dsl.ResolveResult:
    if path is None:
        raise CliError("this command requires --model")
    result = dsl.load_model(_read_file(path), kb)
    if result.model is None and result.findings and result.findings[0].rule.startswith("syntax."):
        f = result.findings[0]
        raise CliError(f"{path}:{f.span}: {f.message}")
    return result


def _relations_json(relations) -> list[dict]:
    ordered = sorted(
        relations, key=lambda r: (_NODE_ORDER[r.depender], _NODE_ORDER[r.dependee], r.nfr)
    )
    return [
        {
            "depender": r.depender.code,
            "dependee": r.dependee.code,
            "nfr": r.nfr.name,
            "rationale": r.rationale,
            "provenance": r.provenance.value,
        }
        for r in ordered
    ]


def _triples_json(relations) -> list[dict]:
    ordered = sorted(
        relations, key=lambda r: (_NODE_ORDER[r.depender], _NODE_ORDER[r.dependee], r.nfr)
    )
    return [
        {"depender": r.depender.code, "dependee": r.dependee.code, "nfr": r.nfr.name}
        for r in ordered
    ]


def _cmd_validate(args, kb: KnowledgeBase) -> tuple[Report, list[Finding]]:
    result = _load_model(args.model, kb)
    findings = list(result.findings)
    payload: dict = {}
    if result.model is not None:
        findings.extend(analysis.check_claims(result.model, kb))
        payload = {
            "model": result.model.name,
            "actors": len(result.model.actors),
            "wallets": len(result.model.wallets),
            "explicit_dependencies": len(result.model.explicit_deps),
        }
    return Report("validate", tuple(findings), payload), findings


def _cmd_coverage(args, kb: KnowledgeBase) -> tuple[Report, list[Finding]]:
    model = None
    if args.scope == "model":
        result = _load_model(args.model, kb)
        if result.model is None:
            return Report("coverage", tuple(result.findings), {}), list(result.findings)
        model = result.model
    report = analysis.coverage(kb, model)
    findings = [
        Finding(
            Severity.WARNING,
            "coverage.gap",
            nfr.name,
            f"no design pattern supports {nfr.name} ({kb.entry(nfr).name})",
        )
        for nfr in sorted(report.uncovered)
    ]
    payload = {
        "scope": report.scope.value,
        "covered": {
            nfr.name: sorted(p for p, _ in pairs) for nfr, pairs in report.covered.items()
        },
        "uncovered": [
            {"key": nfr.name, "name": kb.entry(nfr).name} for nfr in sorted(report.uncovered)
        ],
    }
    return Report("coverage", tuple(findings), payload), findings


def _cmd_deps(args, kb: KnowledgeBase) -> tuple[Report, list[Finding]]:
    findings: list[Finding] = []
    if args.diff:
        # Cross-check only where the authoritative table has rows;
        # derivation over uncatalogued NFRs is not a disagreement.
        derived = analysis.derive_dependencies(kb)
        covered_nfrs = {rel.nfr for rel in kb.dependencies}
        diff = analysis.diff_dependencies(
            kb.dependencies, {rel for rel in derived if rel.nfr in covered_nfrs}
        )
        for rel in sorted(diff.missing_from_derived, key=lambda r: r.nfr):
            findings.append(
                Finding(
                    Severity.WARNING,
                    "deps.missing",
                    rel.nfr.name,
                    f"({rel.depender.code}, {rel.dependee.code}, {rel.nfr.name}) is "
                    "authoritative but not derivable from the responsibility matrix",
                )
            )
        for rel in sorted(diff.extra_in_derived, key=lambda r: r.nfr):
            findings.append(
                Finding(
                    Severity.WARNING,
                    "deps.extra",
                    rel.nfr.name,
                    f"({rel.depender.code}, {rel.dependee.code}, {rel.nfr.name}) is "
                    "derivable but absent from the authoritative relation set",
                )
            )
        payload = {
            "matched": _triples_json(diff.matched),
            "missing_from_derived": _triples_json(diff.missing_from_derived),
            "extra_in_derived": _triples_json(diff.extra_in_derived),
        }
    else:
        payload = {"relations": _relations_json(kb.dependencies)}
    return Report("deps", tuple(findings), payload), findings


def _cmd_stats(args, kb: KnowledgeBase) -> tuple[Report, list[Finding]]:
    stats = analysis.responsibility_stats(kb)
    findings = [
        Finding(Severity.WARNING, "stats.discrepancy", text.split(":", 1)[0], text)
        for text in stats.discrepancies
    ]
    payload = {
        "computed": {a.code: stats.primary_counts[a] for a in stats.primary_counts},
        "claimed": {a.code: stats.claimed_counts[a] for a in stats.claimed_counts},
        "primary_nfrs": {
            a.code: sorted(k.name for k in keys) for a, keys in stats.primary_nfrs.items()
        },
        "discrepancies": list(stats.discrepancies),
    }
    return Report("stats", tuple(findings), payload), findings


def _cmd_simulate(args, kb: KnowledgeBase) -> tuple[Report, list[Finding]]:
    if args.scenario is None:
        raise CliError("simulate requires --scenario")
    text = _read_file(args.scenario)
    try:
        scenarios = sim.load_scenarios(text)
    except ExtensionError as exc:
        raise CliError(f"{args.scenario}: {exc}") from exc
    findings: list[Finding] = []
    summaries = []
    for i, scenario in enumerate(scenarios, start=1):
        trace = sim.run_scenario(scenario)
        findings.extend(sim.check_trace(trace, kb))
        summaries.append(
            {"scenario": i, "outcome": trace.outcome.value, "events": len(trace.events)}
        )
    return Report("simulate", tuple(findings), {"traces": summaries}), findings


def _cmd_graph(args, kb: KnowledgeBase) -> str:
    if args.format not in ("dot", "tsv"):
        raise CliError("graph requires --format dot or --format tsv")
    if args.scope == "model":
        result = _load_model(args.model, kb)
        if result.model is None:
            messages = "; ".join(f.message for f in result.findings)
            raise CliError(f"model does not resolve: {messages}")
        g = graphmod.build_graph(
            kb.dependencies,
            kb.ownership,
            scope=graphmod.GraphScope.MODEL_SCOPED,
            model=result.model,
        )
    else:
        g = graphmod.build_graph(kb.dependencies, kb.ownership)
    return graphmod.to_dot(g) if args.format == "dot" else graphmod.to_tsv(g)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssiarch",
        description="Actor-oriented NFR analysis for DI/SSI architectures.",
    )
    parser.add_argument(
        "command",
        choices=["validate", "coverage", "deps", "graph", "simulate", "stats"],
    )
    parser.add_argument("--model", help="path to a .ssiarch model file")
    parser.add_argument(
        "--kb",
        action="append",
        default=[],
        metavar="PATH",
        help="KB extension file; may repeat, merged in order",
    )
    parser.add_argument(
        "--format",
        choices=["human", "json", "dot", "tsv", "markdown"],
        default="human",
    )
    parser.add_argument(
        "--fail-on",
        choices=["error", "warning", "info"],
        default="error",
        help="minimum severity that forces a nonzero exit",
    )
    parser.add_argument("--scope", choices=["kb", "model"], default="kb")
    parser.add_argument("--diff", action="store_true", help="deps: diff against derivation")
    parser.add_argument("--scenario", help="scenario file for simulate")
    return parser


def run(argv: list[str], out=sys.stdout, err=sys.stderr) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        kb = _load_kb(args.kb)
        if args.command == "graph":
            out.write(_cmd_graph(args, kb))
            return EXIT_OK
        handler = {
            "validate": _cmd_validate,
            "coverage": _cmd_coverage,
            "deps": _cmd_deps,
            "simulate": _cmd_simulate,
            "stats": _cmd_stats,
        }[args.command]
        report, findings = handler(args, kb)
    except CliError as exc:
        err.write(f"ssiarch: {exc}\n")
        return EXIT_USAGE

    if args.format == "json":
        out.write(emit_json(report))
    elif args.format == "markdown":
        out.write(emit_markdown(report))
    elif args.format in ("dot", "tsv"):
        err.write(f"ssiarch: --format {args.format} applies only to the graph command\n")
        return EXIT_USAGE
    else:
        color = os.environ.get("SSIARCH_NO_COLOR") is None
        out.write(emit_human(report, color=color))

    threshold = {"error": Severity.ERROR, "warning": Severity.WARNING, "info": Severity.INFO}[
        args.fail_on
    ]
    if any(f.severity.rank >= threshold.rank for f in findings):
        return EXIT_FINDINGS
    return EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
