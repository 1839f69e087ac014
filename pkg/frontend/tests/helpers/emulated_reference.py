"""Run an emulated session to completion and emit its per-episode
selections and history as JSON, so a frontend test can replay the same
selections through a human session and compare transcripts.

Usage: python3 emulated_reference.py <config.json>
"""

import json
import sys

from preftransfer.config import parse_run_config
from preftransfer.runner import build_engine

if __name__ == "__main__":
    with open(sys.argv[1]) as f:
        cfg = parse_run_config(json.load(f))
    engine = build_engine(cfg)
    engine.run()
    print(json.dumps({
        "status": engine.session.status,
        "history": engine.session.history,
        "selections": engine.session.selections,
    }))
