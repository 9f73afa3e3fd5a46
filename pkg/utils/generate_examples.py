"""
Generate example operator documents for the CLI
Writes Bessel operators, monomial Darboux transformations and a few
operators outside the admissible class as JSON operator documents.
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from bessel import BesselParams, bessel_operator  # noqa: E402
from certificates import operator_document  # noqa: E402
from darboux import KernelSpec, monomial_darboux  # noqa: E402
from grammar import parse_kernel_list, parse_operator  # noqa: E402


def bessel_example(beta):
    return bessel_operator(BesselParams.of(beta))


def darboux_example(base, power, kernel, out_power=None):
    spec = KernelSpec(BesselParams.of(base), power, tuple(parse_kernel_list(kernel)))
    return monomial_darboux(spec, out_power).L


EXAMPLES = {
    "bessel_minus1_2": lambda: bessel_example(["-1", "2"]),
    "bessel_quarter": lambda: bessel_example(["1/4", "3/4"]),
    "bessel_order3": lambda: bessel_example(["-1", "1", "3"]),
    "adler_moser": lambda: darboux_example(["0", "1"], 2, "x; x^3 - 2"),
    "order3_darboux": lambda: darboux_example(["0", "1", "2"], 1, "x"),
    "airy": lambda: parse_operator("d^2 + x"),
    "non_fuchsian": lambda: parse_operator("d^2 + x^-3"),
    "slow_decay": lambda: parse_operator("d^2 + x^-1"),
}


def generate_examples(output_dir="samples"):
    """Write one JSON document per example into ``output_dir``."""
    print("\n" + "=" * 80)
    print("📝 GENERATING EXAMPLE OPERATORS")
    print("=" * 80)
    os.makedirs(output_dir, exist_ok=True)
    written = 0
    for name, build in EXAMPLES.items():
        try:
            L = build()
            path = os.path.join(output_dir, f"{name}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(operator_document(L), fh, indent=2, ensure_ascii=False)
                fh.write("\n")
            print(f"✅ {name:<20} {L}")
            written += 1
        except Exception as e:
            print(f"❌ {name:<20} failed: {e}")

    # Bispectral check with a wrong Lambda; verify must reject it
    faulty = operator_document(bessel_example(["-1", "2"]))
    faulty["lambda"] = "d^2 - 3*x^-2"
    faulty["theta"] = {"2": "1"}
    with open(os.path.join(output_dir, "faulty_lambda.json"), "w", encoding="utf-8") as fh:
        json.dump(faulty, fh, indent=2)
        fh.write("\n")
    written += 1

    print("-" * 80)
    print(f"📊 {written} documents written to {output_dir}/")
    return written


if __name__ == "__main__":
    print("\n" + "=" * 80)
    print("EXAMPLE OPERATOR GENERATOR")
    print("=" * 80)

    target = input("\nOutput directory (default: samples): ").strip() or "samples"
    generate_examples(target)

    print("\n" + "=" * 80)
