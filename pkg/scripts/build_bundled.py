"""Regenerate the packaged dataset copies from raw source files.

Usage: python scripts/build_bundled.py RAW_DIR

RAW_DIR must contain adult.data, adult.test, german.data and
compas-scores-two-years.csv as distributed by their original hosts.
"""
import sys
from pathlib import Path

from databias.datasets import build_bundled_copy

SOURCES = {
    "adult": ["adult.data", "adult.test"],
    "german": ["german.data"],
    "compas": ["compas-scores-two-years.csv"],
}


def main(raw_dir):
    raw_dir = Path(raw_dir)
    dest = Path(__file__).resolve().parent.parent / "src" / "databias" / "_data"
    for name, files in SOURCES.items():
        blobs = [(raw_dir / f).read_bytes() for f in files]
        print(build_bundled_copy(name, blobs, dest))


if __name__ == "__main__":
    main(sys.argv[1])
