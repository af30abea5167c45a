#!/usr/bin/env python3
"""Print the analyses over the built-in knowledge base: responsibility
statistics, constraint classification, pattern-coverage gaps, and the
derivation cross-check."""

from ssiarch import analysis
from ssiarch.kb import PRIMARY_ACTORS, builtin_kb


def main() -> None:
    kb = builtin_kb()

    stats = analysis.responsibility_stats(kb)
    print("primary responsibility counts (matrix vs claimed):")
    for actor in PRIMARY_ACTORS:
        keys = ", ".join(k.name for k in sorted(stats.primary_nfrs[actor]))
        print(
            f"  {actor.long_name:8} {stats.primary_counts[actor]:2} vs "
            f"{stats.claimed_counts[actor]:2}  [{keys}]"
        )
    for text in stats.discrepancies:
        print(f"  discrepancy: {text}")

    constraints = sorted(analysis.classify_constraints(kb))
    print("\nsystem constraints (wallet/system-owned, no primary-actor owner):")
    print("  " + ", ".join(f"{k.name} ({kb.entry(k).name})" for k in constraints))

    cov = analysis.coverage(kb)
    print("\nNFRs without pattern support in the built-in mapping:")
    print("  " + ", ".join(k.name for k in sorted(cov.uncovered)))

    derived = analysis.derive_dependencies(kb)
    covered = {rel.nfr for rel in kb.dependencies}
    diff = analysis.diff_dependencies(
        kb.dependencies, {rel for rel in derived if rel.nfr in covered}
    )
    print("\nderivation cross-check against the built-in relation rows:")
    print(f"  matched: {len(diff.matched)}")
    for rel in sorted(diff.missing_from_derived, key=lambda r: r.nfr):
        print(
            f"  not derivable: ({rel.depender.code}, {rel.dependee.code}, {rel.nfr.name})"
            f" -- {rel.rationale}"
        )
    for rel in sorted(diff.extra_in_derived, key=lambda r: r.nfr):
        print(f"  extra: ({rel.depender.code}, {rel.dependee.code}, {rel.nfr.name})")


if __name__ == "__main__":
    main()
