# droplet-ctrl/cli.py - command line entry point
"""
Usage: droplet-ctrl <simulate|optimize|gradcheck|energycheck> --config <path> [--out <dir>]

Exit codes: 0 success, 1 solver failure, 2 configuration error,
3 energy inequality violated.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

sys.path.insert(0, str(Path(__file__).parent))

from models.scenario import load_config
from pipeline.commands import COMMANDS, run_subcommand
from utils.config import get_config
from utils.errors import ConfigError, create_error_response, exit_code_for
from utils.logging import get_logger, setup_logging

logger = get_logger("cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="droplet-ctrl",
        description="Droplet simulation and contact-angle optimal control",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="Subcommand to run")
    parser.add_argument("--config", required=True, type=Path, help="Scenario JSON file")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    return parser


def _init_logging() -> None:
    try:
        config = get_config()
        setup_logging(
            log_level=config.LOG_LEVEL,
            log_file=config.LOG_FILE,
            enable_json=config.LOG_FORMAT == "json",
        )
    except ConfigError as e:
        setup_logging()
        logger.warning(f"Failed to load configuration: {e}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _init_logging()
    try:
        config = load_config(args.config)
    except ConfigError as e:
        print(json.dumps(create_error_response(e, include_traceback=False)), file=sys.stderr)
        return exit_code_for(e)
    return run_subcommand(args.command, config, args.out)


if __name__ == "__main__":
    sys.exit(main())
