import argparse
from pathlib import Path


def parser(doc: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=doc)
    ap.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    ap.add_argument("--workers", type=int, default=1)
    return ap
