""" Command-line entry point: runs one ratingbench subcommand, e.g.

    python bench_entry.py run --config experiments/movies.toml --arm rs2rs-llama
"""

import logging
import sys
from sys import stderr

from ratingbench.runner.cli import run_cli

log_format = '%(levelname)s %(asctime)s [%(filename)s %(funcName)s] - %(message)s'
logging.basicConfig(stream=stderr, format=log_format)

if __name__ == '__main__':
    sys.exit(run_cli(sys.argv[1:]))
