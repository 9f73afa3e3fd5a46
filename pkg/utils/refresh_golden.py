"""
Refresh the golden certificate files used by the test suite
Runs the CLI in process for the three certificate kinds and rewrites
tests/golden/*.json after showing what changed.
"""

import json
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from click.testing import CliRunner  # noqa: E402

from cli import cli  # noqa: E402

GOLDEN_DIR = os.path.join(ROOT, "tests", "golden")

RUNS = {
    "bispectral": ["verify", "--op", "d^2 - 2*x^-2", "--prec", "16", "--depth", "16"],
    "string": ["string", "--op", "d^2 - 2*x^-2", "--prec", "16", "--depth", "16"],
    "reduction": ["classify", "--op", "d^2 - 2*x^-2", "--prec", "24", "--depth", "24"],
}


def refresh(kinds=None, write=True):
    print("\n" + "=" * 80)
    print("🔄 REFRESHING GOLDEN CERTIFICATES")
    print("=" * 80)
    runner = CliRunner()
    changed = 0
    for kind, args in RUNS.items():
        if kinds and kind not in kinds:
            continue
        result = runner.invoke(cli, args)
        if result.exit_code != 0:
            print(f"❌ {kind:<12} exit {result.exit_code}: {result.output.strip()[:200]}")
            continue
        document = json.loads(result.stdout)
        path = os.path.join(GOLDEN_DIR, f"{kind}.json")
        old = None
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                old = json.load(fh)
        if old == document:
            print(f"✅ {kind:<12} unchanged")
            continue
        changed += 1
        print(f"⚠️  {kind:<12} differs from {os.path.relpath(path, ROOT)}")
        if write:
            os.makedirs(GOLDEN_DIR, exist_ok=True)
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(document, fh, indent=2, ensure_ascii=False)
                fh.write("\n")
            print("   ✍️  rewritten")
    print("-" * 80)
    print(f"📊 {changed} golden file(s) {'rewritten' if write else 'differ'}")
    return changed


if __name__ == "__main__":
    print("\n" + "=" * 80)
    print("GOLDEN FILE REFRESH")
    print("=" * 80)

    print("\nOptions:")
    print("1. Compare only")
    print("2. Compare and rewrite")
    print("3. Exit")

    choice = input("\nEnter your choice (1-3): ").strip()

    if choice == "1":
        refresh(write=False)
    elif choice == "2":
        confirm = input("\n⚠️  This will overwrite tests/golden. Continue? (yes/no): ")
        if confirm.lower() == "yes":
            refresh(write=True)
        else:
            print("❌ Refresh cancelled")
    else:
        print("\n👋 Goodbye!")

    print("\n" + "=" * 80)
