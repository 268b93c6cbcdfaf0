### Standard Libraries
import sys

### Front End Modules
from NACS.src.front_interface.Run_Config_Functions import resolve_config

from NACS.src.back_end.General_Utility.Errors import ConfigError, HorseshoeError
from NACS.src.back_end.Control_Function import (
    cmd_lambda,
    cmd_oracle,
    cmd_plot,
    cmd_verify,
)

EXIT_USAGE = 2
EXIT_WRITE = 3

COMMANDS = {
    "verify": cmd_verify,
    "lambda": cmd_lambda,
    "oracle": cmd_oracle,
    "plot": cmd_plot,
}


def run(argv=None):
    """Resolve the configuration, run one verb and return its exit status.

    0 all checks passed, 1 a verification row failed, 2 the command line or
    control file was unusable, 3 an output file could not be written.
    """

    try:
        verb, config = resolve_config(argv)
        _, status = COMMANDS[verb](config)
    except ConfigError as error:
        print("usage error: %s" % error, file=sys.stderr)
        return EXIT_USAGE
    except OSError as error:
        print("write error: %s" % error, file=sys.stderr)
        return EXIT_WRITE
    except HorseshoeError as error:
        print("verification error: %s: %s" % (type(error).__name__, error),
              file=sys.stderr)
        return 1
    return status


def verification_activation():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    verification_activation()
