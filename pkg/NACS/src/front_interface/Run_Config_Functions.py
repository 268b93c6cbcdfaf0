# Standard library imports
import argparse
import dataclasses
import math
import os
import textwrap
from dataclasses import dataclass

# External library imports
import yaml

# General Modules
from NACS.src.back_end.General_Utility.Errors import ConfigError

"""
Run configuration: defaults, the YAML control file and the command line.

Values are resolved in three layers. The dataclass defaults reproduce the
A(n) = 9.5 + 0.1 cos(n) instance; a control file given with --config
overrides them; flags given on the command line override both.
"""

VERBS = ("verify", "lambda", "oracle", "plot")
FORMATS = ("csv", "json", "svg")
CONFIG_FILE_NAME = "run_config.yml"


@dataclass
class RunConfig:
    a_star: float = 9.5
    epsilon: float = 0.1
    mu_h: float = 0.615
    mu_v: float = 0.615
    mu: float = 0.618
    n_min: int = -100
    n_max: int = 100
    grid: int = 256
    depth: int = 8
    output_dir: str = "horseshoe_out"
    formats: tuple = FORMATS
    force: bool = False
    oracle_grid: int = 2048
    oracle_k: int = 6
    oracle_refine: int = 2
    curve_samples: int = 1025
    a1_samples: int = 1024
    measure_depth: int = 6
    lambda_n: int = 0
    lambda_file: str = None
    quiet: bool = False
    threads: int = None

    @property
    def n_window(self):
        return (self.n_min, self.n_max)

    def to_dict(self):
        out = dataclasses.asdict(self)
        out["formats"] = list(self.formats)
        return out


_FIELD_TYPES = {
    "a_star": float,
    "epsilon": float,
    "mu_h": float,
    "mu_v": float,
    "mu": float,
    "n_min": int,
    "n_max": int,
    "grid": int,
    "depth": int,
    "oracle_grid": int,
    "oracle_k": int,
    "oracle_refine": int,
    "curve_samples": int,
    "a1_samples": int,
    "measure_depth": int,
    "lambda_n": int,
    "threads": int,
    "force": bool,
    "quiet": bool,
}


def _field_names():
    return {f.name for f in dataclasses.fields(RunConfig)}


def validate_config(config):
    """Raise ConfigError for the first unusable value; return the config."""

    for name in ("a_star", "epsilon", "mu_h", "mu_v", "mu"):
        value = getattr(config, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError("%s must be a finite number" % name)
    for name in ("mu_h", "mu_v", "mu"):
        if not getattr(config, name) > 0:
            raise ConfigError("%s must be positive" % name)
    if config.epsilon < 0:
        raise ConfigError("epsilon must be non-negative")
    if not config.n_min <= config.n_max:
        raise ConfigError(
            "n_min = %d exceeds n_max = %d" % (config.n_min, config.n_max)
        )
    if config.grid < 2:
        raise ConfigError("grid must be at least 2")
    if config.depth < 1:
        raise ConfigError("depth must be at least 1")
    if config.oracle_grid < 32:
        raise ConfigError("oracle_grid must be at least 32")
    if config.oracle_k < 0:
        raise ConfigError("oracle_k must be non-negative")
    if config.oracle_refine < 1:
        raise ConfigError("oracle_refine must be at least 1")
    if config.curve_samples < 2 or config.a1_samples < 4:
        raise ConfigError("sample counts are too small")
    if config.measure_depth < 1:
        raise ConfigError("measure_depth must be at least 1")
    if config.threads is not None and config.threads < 1:
        raise ConfigError("threads must be at least 1")
    unknown = set(config.formats) - set(FORMATS)
    if unknown or not config.formats:
        raise ConfigError(
            "formats must be a non-empty subset of %s, got %s"
            % (", ".join(FORMATS), ", ".join(map(str, config.formats)))
        )
    return config


def config_from_dict(values, base=None):
    """Overlay a mapping of field names onto base (or the defaults)."""

    values = dict(values or {})
    unknown = set(values) - _field_names()
    if unknown:
        raise ConfigError(
            "unknown configuration key(s): %s" % ", ".join(sorted(unknown))
        )
    if "formats" in values:
        values["formats"] = parse_formats(values["formats"])
    for name, kind in _FIELD_TYPES.items():
        if values.get(name) is not None:
            try:
                values[name] = kind(values[name])
            except (TypeError, ValueError):
                raise ConfigError(
                    "%s must be %s, got %r" % (name, kind.__name__, values[name])
                )
    base = base or RunConfig()
    try:
        return dataclasses.replace(base, **values)
    except TypeError as error:
        raise ConfigError(str(error))


def load_config_file(path):
    """Read a YAML control file whose keys are RunConfig field names."""
    if not os.path.exists(path):
        raise ConfigError("control file %s does not exist" % path)
    with open(path, "r") as f:
        try:
            output = yaml.safe_load(f)
        except yaml.YAMLError as error:
            raise ConfigError("control file %s is not valid YAML: %s" % (path, error))
    if output is None:
        return {}
    if not isinstance(output, dict):
        raise ConfigError("control file %s must hold a mapping" % path)
    return output


def write_config_file(config, path):
    """Write the resolved config back as a commented YAML control file."""

    comments = textwrap.dedent(
        """\
        #------------------------------------------------------------------
        # Resolved run configuration. Pass this file back with --config to
        # repeat the run; command line flags override any value below.
        # Valid output formats are:

        #   %s

        #------------------------------------------------------------------
        """
        % ", ".join(FORMATS)
    )
    with open(path, "w") as f:
        f.write(comments)
        f.write("\n")
        f.write(yaml.safe_dump(config.to_dict(), sort_keys=False))
    return path


def parse_formats(value):
    if isinstance(value, str):
        value = [v for v in value.replace(" ", "").split(",") if v]
    return tuple(dict.fromkeys(str(v).lower() for v in value))


class _UsageParser(argparse.ArgumentParser):
    """argparse reports problems through ConfigError instead of exiting."""

    def error(self, message):
        raise ConfigError(message)


def build_parser():
    shared = _UsageParser(add_help=False)
    add = shared.add_argument
    s = argparse.SUPPRESS
    add("--config", default=s, help="YAML control file")
    add("--a-star", dest="a_star", type=float, default=s)
    add("--epsilon", type=float, default=s)
    add("--mu-h", dest="mu_h", type=float, default=s)
    add("--mu-v", dest="mu_v", type=float, default=s)
    add("--mu", type=float, default=s, help="expansion constant")
    add("--n-min", dest="n_min", type=int, default=s)
    add("--n-max", dest="n_max", type=int, default=s)
    add("--grid", type=int, default=s, help="cone check lattice size")
    add("--depth", type=int, default=s, help="symbolic depth")
    add("--out", dest="output_dir", default=s, help="output directory")
    add("--format", dest="formats", default=s, help="e.g. csv,json,svg")
    add("--force", action="store_true", default=s)
    add("--n", dest="lambda_n", type=int, default=s, help="time slice")
    add("--k", dest="oracle_k", type=int, default=s, help="oracle window")
    add("--oracle-grid", dest="oracle_grid", type=int, default=s)
    add("--oracle-refine", dest="oracle_refine", type=int, default=s)
    add("--lambda-file", dest="lambda_file", default=s)
    add("--threads", type=int, default=s)
    add("--quiet", action="store_true", default=s)

    parser = _UsageParser(
        prog="horseshoe",
        description="Verify the nonautonomous horseshoe of the Henon family.",
    )
    verbs = parser.add_subparsers(dest="verb")
    verbs.required = True
    for verb in VERBS:
        verbs.add_parser(verb, parents=[shared])
    return parser


def resolve_config(argv=None):
    """Parse argv into (verb, RunConfig), layering defaults, file and flags.

    Raises
    ------
    ConfigError
        Unknown verb or flag, bad values, or an invalid control file.
    """

    args = vars(build_parser().parse_args(argv))
    verb = args.pop("verb")
    config = RunConfig()
    path = args.pop("config", None)
    if path is not None:
        config = config_from_dict(load_config_file(path), config)
    config = config_from_dict(args, config)
    return verb, validate_config(config)
