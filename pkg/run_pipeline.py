#!/usr/bin/env python3
"""
End-to-end demo: synthetic corpus -> daily moods -> panel -> Granger table -> forecast table
"""
import os
import sys

from app.main import run

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/pipeline"
    seed = sys.argv[2] if len(sys.argv) > 2 else "42"
    print("🚀 Running the moodcast pipeline...")
    print(f"📁 Output directory: {out}")

    steps = [
        ["synth", "--seed", seed, "--out", out],
        ["build-lexicon", "--ngrams", os.path.join(out, "ngrams.tsv"), "--out", out],
        ["ingest", "--corpus", os.path.join(out, "tweets.tsv"), "--out", out],
        ["score", "--documents", os.path.join(out, "documents.jsonl"),
         "--gpoms-lexicon", os.path.join(out, "gpoms_lexicon.json"), "--out", out],
        ["normalize", "--mood", os.path.join(out, "mood.csv"), "--prices", os.path.join(out, "prices.csv"),
         "--zscore-k", "7", "--out", out],
        ["granger", "--panel", os.path.join(out, "panel.csv"), "--out", out],
        ["evaluate", "--panel", os.path.join(out, "panel.csv"), "--split-date", "2008-08-01", "--out", out],
        ["report", "--panel", os.path.join(out, "panel.csv"), "--split-date", "2008-08-01", "--out", out],
    ]
    for step in steps:
        print(f"▶️ moodcast {' '.join(step)}")
        code = run(step)
        if code != 0:
            print(f"❌ Step '{step[0]}' failed with exit code {code}")
            sys.exit(code)
    print("✅ Pipeline completed")
