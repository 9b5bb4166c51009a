"""Final adjudication: combine the semantic analysis report and the test
generation/repair agent's findings into a single EQ / NEQ / VF verdict and
assemble the per-pair report document.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .agent import AgentReport
from .analyzers import SemanticReport
from .errors import EquicheckError
from .gateway import ChatRequest, Gateway, Usage
from .prompts import PROMPT_VERSION, verdict_prompt

EQ = "EQ"
NEQ = "NEQ"
VF = "VF"

_ANSWER_TO_VERDICT = {"yes": EQ, "no": NEQ, "unknown": VF}


@dataclass
class FinalVerdict:
    verdict: str  # EQ | NEQ | VF
    summary: str = ""
    patch_validated: Optional[bool] = None
    source: str = "model"  # model | fallback
    usage: Usage = field(default_factory=Usage)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "summary": self.summary,
            "patch_validated": self.patch_validated,
            "source": self.source,
            "usage": self.usage.to_dict(),
        }


def _fallback(agent_report: Optional[AgentReport], agent_status: str,
              reason: str) -> FinalVerdict:
    # deterministic stand-in when the adjudicator itself is unavailable:
    # trust a completed agent run (it executed tests), otherwise punt to VF
    if agent_report is not None and agent_status == "completed":
        verdict = _ANSWER_TO_VERDICT.get(agent_report.is_equivalent, VF)
        summary = f"adjudicator unavailable ({reason}); adopted agent verdict"
    else:
        verdict = VF
        summary = f"adjudicator unavailable ({reason}); no executable evidence"
    return FinalVerdict(verdict=verdict, summary=summary, source="fallback")


def run_verdict_agent(semantic_report: Optional[SemanticReport],
                      agent_report: Optional[AgentReport],
                      agent_status: str,
                      gateway: Gateway,
                      model_id: str = "mock-model",
                      max_output_tokens: int = 2048) -> FinalVerdict:
    semantic_json = semantic_report.to_json() if semantic_report is not None else "{}"
    agent_json = (
        json.dumps(agent_report.to_dict(), indent=2, sort_keys=True)
        if agent_report is not None
        else "{}"
    )
    prompt = verdict_prompt(semantic_json, agent_json, agent_status)
    usage = Usage()
    req = ChatRequest(
        model_id=model_id,
        user_text=prompt,
        max_output_tokens=max_output_tokens,
    )
    try:
        obj = gateway.complete_json(req, ["is_equivalent", "summary"], usage)
    except EquicheckError as exc:
        return _fallback(agent_report, agent_status, str(exc))
    answer = str(obj.get("is_equivalent", "")).lower()
    verdict = _ANSWER_TO_VERDICT.get(answer)
    if verdict is None:
        return _fallback(agent_report, agent_status, f"unrecognized answer {answer!r}")
    return FinalVerdict(
        verdict=verdict,
        summary=str(obj.get("summary", "")),
        source="model",
        usage=usage,
    )


def config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, default=str).encode()
    ).hexdigest()


def assemble_report(pair_id: str,
                    source_language: str,
                    target_language: str,
                    semantic_report: Optional[SemanticReport],
                    agent_report: Optional[AgentReport],
                    agent_status: str,
                    final: FinalVerdict,
                    config: dict,
                    test_results: Optional[dict] = None,
                    warnings: Optional[list[str]] = None) -> dict:
    """The per-pair report document. Deliberately contains no wall-clock
    values so a replayed run serializes byte-for-byte identically."""
    return {
        "pair_id": pair_id,
        "source_language": source_language,
        "target_language": target_language,
        "prompt_version": PROMPT_VERSION,
        "config": config,
        "config_hash": config_hash(config),
        "warnings": list(warnings or []),
        "semantic_analysis": (
            semantic_report.to_dict() if semantic_report is not None else None
        ),
        "test_repair": {
            "status": agent_status,
            "report": agent_report.to_dict() if agent_report is not None else None,
            "test_results": test_results,
        },
        "verdict": final.to_dict(),
    }
