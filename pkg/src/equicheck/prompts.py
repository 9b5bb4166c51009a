"""Prompt templates for the semantic analyzers and the verdict stage.

Each analyzer prompt follows the same skeleton: a role sentence, the general
functional-equivalence definition, a property-specific equivalence
definition, the material under analysis, and a JSON output instruction.
Templates are version-stamped so run logs identify exactly what was sent.
"""

from __future__ import annotations

PROMPT_VERSION = "1"

FUNCTIONAL_EQUIVALENCE_DEFINITION = (
    "Two code fragments in different programming languages are considered "
    "functionally equivalent if, when executed on the same input, they "
    "always have identical program states at all corresponding points "
    "reachable by program execution, and they both produce the same output "
    "upon termination."
)

_OUTPUT_INSTRUCTION = (
    "Respond with ONLY a single JSON object of the form "
    '{{"is_equivalent": "yes" | "no", "explanation": "<text>"{extra_keys}}}.'
)

_FRAGMENTS_BLOCK = """\
Source fragment ({src_lang}):
```
{src_code}
```

Target fragment ({tgt_lang}):
```
{tgt_code}
```
"""

_PROPERTY_DEFINITIONS = {
    "control_flow": (
        "Control-flow equivalence: the branching, looping, and exit "
        "structures of the two fragments must induce the same execution "
        "orderings. Watch for reordered conditions, missing branches, and "
        "altered loop termination criteria."
    ),
    "data_flow": (
        "Data-flow equivalence: values must be defined, propagated, and "
        "consumed the same way in both fragments. Watch for unused "
        "variables, dropped assignments, and divergent value propagation."
    ),
    "io": (
        "IO equivalence covers five dimensions: (1) semantic equivalence of "
        "accepted inputs, (2) consistency of produced outputs, (3) "
        "preservation of side effects (file operations, network calls, "
        "global state modifications), (4) uniform handling of edge cases, "
        "and (5) similarity in performance-critical complexity."
    ),
    "lib_api": (
        "Library API equivalence: external library calls in the two "
        "fragments must behave the same. Watch for subtle differences "
        "between similar APIs (rounding modes, encodings, locale or "
        "timezone defaults, boundary behavior). When the fragments are not "
        "equivalent, suggest how to fix the target."
    ),
    "exception": (
        "Exception/error-handling equivalence covers five dimensions: (1) "
        "detecting and handling the same error conditions, (2) semantically "
        "equivalent exception/error types, (3) equivalent error messages or "
        "codes, (4) consistent recovery mechanisms, and (5) equivalent "
        "error propagation. Where they differ, recommend target-language "
        "error handling that matches the source's semantics."
    ),
    "spec": (
        "Specification equivalence: the fragments must (1) fulfill the same "
        "documented or inferred functional requirements, (2) satisfy "
        "identical pre-conditions and post-conditions, (3) maintain the "
        "same invariants, and (4) handle the same input domain including "
        "edge cases. Extract specifications from signatures, type "
        "annotations, docstrings, and comments; when none exist, infer the "
        "behavioral contract from the code. If the contracts disagree, "
        "produce a formalized specification reconciling both and a "
        "counterexample demonstrating the mismatch."
    ),
}

_ROLES = {
    "control_flow": "You are an expert in control-flow analysis of programs.",
    "data_flow": "You are an expert in data-flow analysis of programs.",
    "io": "You are an expert in analyzing the input/output behavior of programs.",
    "lib_api": "You are an expert in library and API semantics across programming languages.",
    "exception": "You are an expert in exception and error handling semantics.",
    "spec": "You are an expert in program specifications and behavioral contracts.",
}

_EXTRA_KEYS = {
    "io": ', "counterexample": "<an input that triggers dissimilar IO behavior; required when is_equivalent is no>"',
    "lib_api": ', "suggestions": "<how to fix the target; expected when is_equivalent is no>"',
    "exception": ', "suggestions": "<target-language error handling aligned with the source>"',
    "spec": ', "reconciled_specification": "<optional>", "counterexample": "<optional>"',
    "control_flow": "",
    "data_flow": "",
}


def analyzer_prompt(analyzer: str, src_lang: str, src_code: str,
                    tgt_lang: str, tgt_code: str,
                    structures: str = "") -> str:
    parts = [
        _ROLES[analyzer],
        "",
        "General definition of functional equivalence:",
        FUNCTIONAL_EQUIVALENCE_DEFINITION,
        "",
        _PROPERTY_DEFINITIONS[analyzer],
        "",
        _FRAGMENTS_BLOCK.format(
            src_lang=src_lang, src_code=src_code,
            tgt_lang=tgt_lang, tgt_code=tgt_code,
        ),
    ]
    if structures:
        parts += [structures, ""]
    parts.append(
        _OUTPUT_INSTRUCTION.format(extra_keys=_EXTRA_KEYS[analyzer])
    )
    parts.append(f"[analyzer={analyzer} prompt_version={PROMPT_VERSION}]")
    return "\n".join(parts)


VERDICT_ROLE = (
    "You are the final adjudicator for a cross-language translation "
    "validation pipeline. Confirm or reject the test generation and repair "
    "agent's findings against the semantic analysis, then produce a "
    "condensed summary for end users."
)

VERDICT_INSTRUCTION = (
    "Respond with ONLY a single JSON object of the form "
    '{"is_equivalent": "yes" | "no" | "unknown", "summary": "<text>"}. '
    'Answer "unknown" only if the evidence is insufficient to adjudicate.'
)


def verdict_prompt(semantic_json: str, agent_json: str, agent_status: str) -> str:
    return "\n".join(
        [
            VERDICT_ROLE,
            "",
            "General definition of functional equivalence:",
            FUNCTIONAL_EQUIVALENCE_DEFINITION,
            "",
            f"agent_status: {agent_status}",
            "",
            "<semantic_analysis_report>",
            semantic_json,
            "</semantic_analysis_report>",
            "",
            "<test_generation_and_repair_report>",
            agent_json,
            "</test_generation_and_repair_report>",
            "",
            VERDICT_INSTRUCTION,
            f"[stage=verdict prompt_version={PROMPT_VERSION}]",
        ]
    )
