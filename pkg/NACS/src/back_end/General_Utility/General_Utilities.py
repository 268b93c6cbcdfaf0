#!/usr/bin/env python
# coding: utf-8

# Standard Libraries
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor

# External Libraries
import numpy as np
import pandas as pd
import psutil

# General Modules
from NACS.src.back_end.General_Utility.Errors import ConfigError

"""
This file is for the general utilities of the verification system. These
functions do small but repetitive tasks: writing result tables and reports
with exact real formatting, choosing how many worker threads to use and
mapping work over them in a fixed order.
"""

FLOAT_FORMAT = "%.17g"
THREADS_ENV = "HORSESHOE_THREADS"


def format_real(value):
    """Round-trip exact text for a real number."""
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        return repr(value)
    return FLOAT_FORMAT % value


def _plain(value):
    """Turn numpy scalars, arrays and tuples into JSON friendly objects."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        # JSON has no inf or nan
        return value if math.isfinite(value) else repr(value)
    return value


def write_csv(frame, path):
    """Write a DataFrame with every real at 17 significant digits.

    Parameters
    ----------
    frame: pd.DataFrame or list of dict
        The table. Column order is preserved.

    path: str
        Destination file.


    Returns
    -------
    path: str
    """

    if not isinstance(frame, pd.DataFrame):
        frame = pd.DataFrame(list(frame))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def append_csv(frame, path, header):
    """Append rows to a CSV, writing the header only when asked."""
    frame.to_csv(
        path,
        mode="a",
        header=header,
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
    )
    return path


def write_json(obj, path):
    """Write obj as JSON with sorted keys; floats keep their shortest repr."""
    with open(path, "w") as handle:
        json.dump(_plain(obj), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def read_json(path):
    with open(path) as handle:
        return json.load(handle)


def worker_count(requested=None):
    """Number of worker threads to use.

    An explicit request wins, then the HORSESHOE_THREADS environment
    variable, then the number of logical CPUs.
    """

    if requested is None:
        env = os.environ.get(THREADS_ENV)
        if env is not None and env.strip():
            try:
                requested = int(env)
            except ValueError:
                raise ConfigError(
                    "%s must be an integer, got %r" % (THREADS_ENV, env)
                )
    if requested is None:
        requested = psutil.cpu_count(logical=True) or 1
    if int(requested) < 1:
        raise ConfigError("thread count must be at least 1")
    return int(requested)


def parallel_map(func, items, threads=None):
    """Apply func to every item, returning results in input order."""
    items = list(items)
    threads = min(worker_count(threads), max(len(items), 1))
    if threads == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def chunks(iterable_size, chunk_size):
    """(start, stop) pairs covering range(iterable_size)."""
    chunk_size = max(int(chunk_size), 1)
    for start in range(0, int(iterable_size), chunk_size):
        yield start, min(start + chunk_size, int(iterable_size))
