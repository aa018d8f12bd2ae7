from __future__ import annotations

import argparse
import logging
import os
import sys

import toml
from toml import TomlDecodeError

from config import COMMANDS
from errors import ConfigurationError, InvalidInputError, QcWeylError
from verification import Verifier

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def get_configuration_paths(files: list[str]) -> list[str]:
    """
    Returns a list of configuration paths to look for configuration files
    :return: List of paths to check
    """
    configuration_paths = []
    for file in files:
        if os.path.isfile(file):
            configuration_paths.append(file)

    configuration_paths.append(str(os.path.join(os.getcwd(), "qcweyl.toml")))

    if os.environ.get("HOME", None) is not None:
        configuration_paths.append(os.path.join(os.environ["HOME"], ".qcweyl.rc"))

    configuration_paths.append("/etc/default/qcweyl.conf")
    return configuration_paths


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcweyl",
                                     description="Verification harness for the homogeneity-two Weyl curvature "
                                                 "of quaternionic contact structures")
    parser.add_argument("command", choices=COMMANDS, help="Verification suite to run")
    parser.add_argument("--n", help="Quaternionic dimension n >= 1", type=int)
    parser.add_argument("--seed", help="Seed of all random draws", type=int)
    parser.add_argument("--mode", help="Arithmetic mode", choices=("exact", "float"))
    parser.add_argument("--tol", help="Zero tolerance of the float mode", type=float)
    parser.add_argument("--in", dest="input", help="QC point data JSON (weyl)", type=str)
    parser.add_argument("--out", dest="output", help="Report path, stdout if omitted", type=str)
    parser.add_argument("-e", "--environment", help="Runtime environment (prod by default)",
                        default="prod", action="store", type=str)
    parser.add_argument('config_files', nargs='*')
    return parser


def command_line_configuration(arguments: argparse.Namespace) -> dict:
    """
    Configuration layer of the command line flags, applied with the highest priority
    """
    general = {"command": arguments.command}
    for key in ("n", "seed", "input", "output"):
        value = getattr(arguments, key)
        if value is not None:
            general[key] = value
    arithmetic = {}
    if arguments.mode is not None:
        arithmetic["mode"] = arguments.mode
    if arguments.tol is not None:
        arithmetic["tolerance"] = arguments.tol
    layer = {"general": general, "arithmetic": arithmetic}
    if arguments.command == "heisenberg" and arguments.n is not None:
        layer["heisenberg"] = {"n_values": [arguments.n]}
    return layer


def load_configurations(files: list[str]) -> list[dict]:
    """
    Load every existing configuration file, in decreasing order of priority
    :raises ConfigurationError: if a file is not valid TOML
    """
    configs = []
    for configuration_path in get_configuration_paths(files):
        if os.path.isfile(configuration_path):
            try:
                logging.debug(f"Loading configuration from {configuration_path}")
                configs.append(toml.load(configuration_path))
            except TomlDecodeError as tde:
                raise ConfigurationError("File %s is not a valid toml: %s" % (configuration_path, tde.msg))
    return configs


def main(argv: list[str] | None = None) -> int:
    arguments = build_parser().parse_intermixed_args(argv)

    try:
        configs = [command_line_configuration(arguments)] + load_configurations(arguments.config_files)
        verifier = Verifier(configs, arguments.environment)
        if not verifier.test():
            return EXIT_USAGE
        report = verifier.run()
        report.write(verifier.config['general']['output'], verifier.config['report']['html'])
    except (ConfigurationError, InvalidInputError) as e:
        logging.error(str(e))
        return EXIT_USAGE
    except QcWeylError as e:
        logging.error(f"Verification aborted: {e}")
        return EXIT_FAILED

    if not report.passed:
        logging.error(f"{len(report.failed_checks)} checks failed: "
                      f"{', '.join(check.name for check in report.failed_checks)}")
        return EXIT_FAILED
    return EXIT_PASSED


if __name__ == "__main__":
    sys.exit(main())
