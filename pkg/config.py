import copy
import logging
from typing import Mapping

import utils
from backends import ArithmeticBackend, get_backend
from errors import ConfigurationError

COMMANDS = ('algebra', 'cohomology', 'commutators', 'weyl', 'heisenberg', 'selftest')

DEFAULT_CONFIGURATION = {
    'general': {
        'command': 'selftest',  # One of COMMANDS
        'n': 1,                 # Quaternionic dimension of the contact distribution
        'seed': 42,             # Seed of every random draw (data sets, commutator samples)
        'samples': 10000,       # Number of random basis pairs for the commutator oracle if n > 1
        'input': None,          # QC point data JSON for the weyl command, generated from seed if empty
        'output': None          # Path of the JSON report (or of the weyl result), stdout if empty
    },

    'arithmetic': {
        'mode': 'exact',    # exact (fractions) or float (float64)
        'tolerance': 1e-9   # Zero and relative nullspace threshold in float mode, ignored in exact mode
    },

    'cohomology': {
        'degrees': [1, 2],     # Cochain degrees of the harmonic profile
        'homogeneities': []    # Positive homogeneities per degree, 1 ... 2q+2 if empty
    },

    'weyl': {
        'datasets': 50  # Random consistent data sets per sweep
    },

    'heisenberg': {
        'n_values': [1, 2],  # n values of the flatness pipeline
        'export': None       # Path to write the exported QC point data of the flat model to
    },

    'report': {
        'schema': 1,    # Report schema version
        'html': False   # Also write an HTML rendering next to the JSON report
    },

    'logging': {
        'level': 'INFO'
    }
}


class ConfigurationBasedObject(object):
    def __init__(self, config, environment='prod'):
        """
        Create a new configuration based object and supply the application configuration
        :param config: The configuration passed by the user (may contain a list in decreasing order of priority)
        :param environment: Runtime environment to use as optional suffix to configuration parameters
        :raises ConfigurationError: if the merged configuration is invalid
        """
        # Set default config as config parameters
        self.config = copy.deepcopy(DEFAULT_CONFIGURATION)

        config = utils.ensure_list(config)
        for c in config[::-1]:
            for key in self.config:
                if isinstance(self.config[key], Mapping):
                    for option in self.config[key]:
                        value = c.get(key, {}).get(option, None)
                        environment_value = c.get(key, {}).get(f'{option}_{environment}', None)
                        if environment_value is not None:
                            self.config[key][option] = environment_value
                        elif value is not None:
                            self.config[key][option] = value
                else:
                    value = c.get(key, None)
                    environment_value = c.get(f'{key}_{environment}', None)
                    if environment_value is not None:
                        self.config[key] = environment_value
                    elif value is not None:
                        self.config[key] = value

        # Setup logging
        logging.basicConfig(level=logging.DEBUG)
        self.logger = logging.getLogger()
        self.logger.setLevel(self.config['logging']['level'])

        self._validate()
        self._backend = get_backend(self.mode, self.tolerance)

    def _validate(self):
        general = self.config['general']
        if general['command'] not in COMMANDS:
            raise ConfigurationError(f"Unknown command {general['command']}, expected one of {', '.join(COMMANDS)}")
        if not isinstance(general['n'], int) or general['n'] < 1:
            raise ConfigurationError(f"general->n must be an integer >= 1, got {general['n']}")
        if self.mode not in ('exact', 'float'):
            raise ConfigurationError(f"arithmetic->mode must be exact or float, got {self.mode}")
        try:
            tolerance = float(self.config['arithmetic']['tolerance'])
        except (TypeError, ValueError):
            raise ConfigurationError(f"arithmetic->tolerance is not a number: {self.config['arithmetic']['tolerance']}")
        if tolerance <= 0:
            raise ConfigurationError(f"arithmetic->tolerance must be positive, got {tolerance}")
        if int(self.config['general']['samples']) < 1 or int(self.config['weyl']['datasets']) < 1:
            raise ConfigurationError("general->samples and weyl->datasets must be positive")
        utils.ensure_int_list(self.config['heisenberg']['n_values'], 'heisenberg->n_values', 1)
        utils.ensure_int_list(self.config['cohomology']['degrees'], 'cohomology->degrees', 0)
        utils.ensure_int_list(self.config['cohomology']['homogeneities'], 'cohomology->homogeneities', 1)

    @property
    def command(self) -> str:
        return self.config['general']['command']

    @property
    def n(self) -> int:
        return self.config['general']['n']

    @property
    def seed(self) -> int:
        return int(self.config['general']['seed'])

    @property
    def mode(self) -> str:
        return self.config['arithmetic']['mode']

    @property
    def tolerance(self) -> float:
        return float(self.config['arithmetic']['tolerance'])

    @property
    def backend(self) -> ArithmeticBackend:
        return self._backend
