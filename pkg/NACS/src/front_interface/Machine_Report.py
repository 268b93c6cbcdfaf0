import platform

import psutil

from NACS.src.back_end.General_Utility.General_Utilities import worker_count
from NACS.src.front_interface.terminalsize import (
    print_rule,
    print_section,
)


def get_size(bytes, suffix="B"):
    """
    Scale bytes to its proper format
    e.g:
        1253656 => '1.20MB'
        1253656678 => '1.17GB'
    """

    factor = 1024
    for unit in ["", "K", "M", "G", "T", "P"]:
        if bytes < factor:
            return f"{bytes:.2f}{unit}{suffix}"
        bytes /= factor
    return f"{bytes:.2f}E{suffix}"


def machine_summary(threads=None):
    """Facts about the host a run happened on, for the report header.

    Parameters
    ----------
    threads: integer or None
        Explicit thread request, resolved the same way the run resolves it.


    Returns
    -------
    summary: dict
        system, machine, python, physical and logical cores, threads used,
        total and available memory.
    """

    uname = platform.uname()
    memory = psutil.virtual_memory()
    return {
        "system": uname.system,
        "machine": uname.machine,
        "python": platform.python_version(),
        "physical_cores": psutil.cpu_count(logical=False),
        "logical_cores": psutil.cpu_count(logical=True),
        "threads": worker_count(threads),
        "memory_total": get_size(memory.total),
        "memory_available": get_size(memory.available),
    }


def print_machine_summary(summary, quiet=False):
    if quiet:
        return
    print_section("Machine")
    print(f"System: {summary['system']} ({summary['machine']})")
    print(f"Python: {summary['python']}")
    print(
        "Cores: %s physical, %s logical, %s worker thread(s)"
        % (
            summary["physical_cores"],
            summary["logical_cores"],
            summary["threads"],
        )
    )
    print(
        f"Memory: {summary['memory_available']} available of "
        f"{summary['memory_total']}"
    )
    print_rule()
