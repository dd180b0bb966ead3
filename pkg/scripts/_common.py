"""Shared argument handling for the experiment scripts."""
import argparse
import logging
import sys
from pathlib import Path

from abcsim.bench import write_csv


def parser(description: str, trials: int) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=2021)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, help="CSV path (stdout if omitted)")
    return p


def emit(rows, out) -> None:
    logging.getLogger(__name__).info("%d rows", len(rows))
    write_csv(rows, out if out else sys.stdout)


logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s: %(message)s")
