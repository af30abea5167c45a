#!/usr/bin/env python3
"""Run the credential-lifecycle simulator across every fault toggle and
print the outcome and findings for each run."""

import dataclasses

from ssiarch import sim
from ssiarch.kb import builtin_kb


def main() -> None:
    kb = builtin_kb()
    base = sim.Scenario(
        issuer_id="uni",
        owner_id="alice",
        verifier_id="library",
        attributes={"name": "Alice", "degree": "MSc", "year": "2024"},
        request=sim.PresentationRequest(
            verifier_id="library", requested_attributes=frozenset({"degree"})
        ),
    )
    runs = [
        ("happy path", sim.Toggles()),
        ("no issuance consent", sim.Toggles(skip_issuance_consent=True)),
        ("no presentation consent", sim.Toggles(skip_presentation_consent=True)),
        ("tampered attribute", sim.Toggles(tamper_attribute="degree")),
        ("revoked credential", sim.Toggles(revoke_before_presentation=True)),
        ("over-disclosure", sim.Toggles(over_disclose=True)),
    ]
    for label, toggles in runs:
        scenario = dataclasses.replace(base, toggles=toggles)
        trace = sim.run_scenario(scenario)
        findings = sim.check_trace(trace, kb)
        rules = ", ".join(f.rule for f in findings) or "-"
        print(f"{label:24} outcome={trace.outcome.value:8} findings: {rules}")


if __name__ == "__main__":
    main()
