"""Unified diff application and generation.

The applier is strict: context and deletion lines must match the file
exactly at the position named by the hunk header (no fuzz), so a stale patch
fails loudly instead of landing somewhere surprising.
"""

from __future__ import annotations

import difflib
import re

from .errors import PatchApplyError

_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


def make_unified_diff(old_text: str, new_text: str, path: str) -> str:
    diff = difflib.unified_diff(
        old_text.splitlines(keepends=True),
        new_text.splitlines(keepends=True),
        fromfile=f"a/{path}",
        tofile=f"b/{path}",
    )
    out = []
    for line in diff:
        if line.endswith("\n"):
            out.append(line)
        else:
            out.append(line + "\n")
            out.append("\\ No newline at end of file\n")
    return "".join(out)


def patch_target_file(patch_text: str):
    """Path named by the +++ header, stripped of its a/ or b/ prefix."""
    for line in patch_text.splitlines():
        if line.startswith("+++ "):
            path = line[4:].split("\t")[0].strip()
            if path.startswith(("a/", "b/")):
                path = path[2:]
            return path
    return None


def apply_unified_diff(original: str, patch_text: str) -> str:
    old_lines = original.splitlines(keepends=True)
    result: list[str] = []
    cursor = 0  # index into old_lines
    lines = patch_text.splitlines()
    i = 0
    saw_hunk = False
    while i < len(lines):
        line = lines[i]
        m = _HUNK_RE.match(line)
        if not m:
            i += 1
            continue
        saw_hunk = True
        old_start = int(m.group(1))
        old_index = max(old_start - 1, 0)
        if old_index < cursor:
            raise PatchApplyError("hunks out of order or overlapping")
        result.extend(old_lines[cursor:old_index])
        cursor = old_index
        i += 1
        last_tag = None
        while i < len(lines):
            hunk_line = lines[i]
            if hunk_line.startswith("@@") or hunk_line.startswith(("--- ", "+++ ")):
                break
            if hunk_line.startswith("\\"):  # "\ No newline at end of file"
                # applies to the new text only when it follows an addition
                # or context line we emitted
                if last_tag in ("+", " ") and result and result[-1].endswith("\n"):
                    result[-1] = result[-1][:-1]
                i += 1
                continue
            if not hunk_line:
                tag, content = " ", ""
            else:
                tag, content = hunk_line[0], hunk_line[1:]
            if tag == " ":
                if cursor >= len(old_lines) or old_lines[cursor].rstrip("\n") != content:
                    raise PatchApplyError(
                        f"context mismatch at line {cursor + 1}: "
                        f"expected {content!r}"
                    )
                result.append(old_lines[cursor])
                cursor += 1
            elif tag == "-":
                if cursor >= len(old_lines) or old_lines[cursor].rstrip("\n") != content:
                    raise PatchApplyError(
                        f"deletion mismatch at line {cursor + 1}: "
                        f"expected {content!r}"
                    )
                cursor += 1
            elif tag == "+":
                result.append(content + "\n")
            else:
                raise PatchApplyError(f"unrecognized patch line: {hunk_line!r}")
            last_tag = tag
            i += 1
    if not saw_hunk:
        raise PatchApplyError("patch contains no hunks")
    result.extend(old_lines[cursor:])
    return "".join(result)
