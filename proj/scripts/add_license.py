#!/usr/bin/env python3
"""Prepend the Apache-2.0 header to C++ and CMake sources. Idempotent."""

import argparse
import pathlib

ROOTS = ("core", "tools", "tests", "benchmarks")
CPP_SUFFIXES = {".cpp", ".hpp", ".h", ".cc"}


def header_for(path: pathlib.Path, text: str) -> str:
    if path.suffix in CPP_SUFFIXES:
        return text
    # CMake: same text with '#' comments.
    return "".join("#" + line[2:] if line.startswith("//") else line for line in text.splitlines(True))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("license", type=pathlib.Path, help="header text with // comment prefixes")
    parser.add_argument("--repo", type=pathlib.Path, default=pathlib.Path(__file__).resolve().parent.parent)
    args = parser.parse_args()

    text = args.license.read_text().rstrip("\n") + "\n\n"
    files = [args.repo / "CMakeLists.txt"]
    for root in ROOTS:
        for p in sorted((args.repo / root).rglob("*")):
            if p.is_file() and (p.suffix in CPP_SUFFIXES or p.name == "CMakeLists.txt" or p.suffix == ".in"):
                files.append(p)
    changed = 0
    for p in files:
        header = header_for(p, text)
        body = p.read_text()
        if body.startswith(header.splitlines()[0]):
            continue
        p.write_text(header + body)
        changed += 1
    print(f"{changed} of {len(files)} files updated")


if __name__ == "__main__":
    main()
