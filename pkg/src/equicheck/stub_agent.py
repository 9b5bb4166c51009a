"""A scripted stand-in for the coding agent, runnable as
``python -m equicheck.stub_agent``.

It reads the prompt (so transcripts show what it saw), optionally sleeps,
optionally prints leading noise, then prints a canned JSON response from a
file. Used in tests and offline demos where no real agent is available.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="equicheck-stub-agent")
    ap.add_argument("--prompt", type=Path, help="prompt file to read (echoed length only)")
    ap.add_argument("--response", type=Path, required=True,
                    help="file whose contents are printed as the agent reply")
    ap.add_argument("--sleep", type=float, default=0.0,
                    help="seconds to sleep before replying (timeout testing)")
    ap.add_argument("--noise", default="",
                    help="text printed before the response (malformed-output testing)")
    ap.add_argument("--exit-code", type=int, default=0)
    args = ap.parse_args(argv)

    if args.prompt and args.prompt.exists():
        prompt = args.prompt.read_text()
        print(f"[stub agent] read prompt ({len(prompt)} chars)", file=sys.stderr)
    if args.sleep > 0:
        time.sleep(args.sleep)
    if args.noise:
        print(args.noise)
    print(args.response.read_text())
    return args.exit_code


if __name__ == "__main__":
    sys.exit(main())
