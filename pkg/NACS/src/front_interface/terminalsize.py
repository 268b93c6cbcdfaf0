import os
import shutil
import struct

"""
Terminal width lookup and the banner lines every verb prints.

The width lookup asks the tty directly, then falls back to the environment
and finally to 80 columns when output is redirected.
"""

DEFAULT_SIZE = (80, 25)
MAX_WIDTH = 120


def _ioctl_size(fd):
    try:
        import fcntl
        import termios

        rows, cols = struct.unpack(
            "hh", fcntl.ioctl(fd, termios.TIOCGWINSZ, "1234")
        )
        return cols, rows
    except Exception:
        return None


def get_terminal_size():
    """(columns, rows) of the controlling terminal."""
    for fd in (1, 2, 0):
        size = _ioctl_size(fd)
        if size and size[0] > 0:
            return size
    try:
        return int(os.environ["COLUMNS"]), int(os.environ["LINES"])
    except (KeyError, ValueError):
        pass
    fallback = shutil.get_terminal_size(DEFAULT_SIZE)
    return fallback.columns, fallback.lines


def banner_width():
    return min(int(get_terminal_size()[0]), MAX_WIDTH)


def print_banner(message, quiet=False):
    """Full width '=' block with the message centred, as a verb starts."""
    if quiet:
        return
    size_x = banner_width()
    print("\n" + "=" * size_x)
    print(message.center(size_x))
    print("=" * size_x + "\n")


def print_section(message, fill="-", quiet=False):
    """One divider line with the message embedded half way along."""
    if quiet:
        return
    size_x = banner_width()
    message = " %s " % message
    half = int(size_x / 2) - int(len(message) / 2)
    print(fill * half + message + fill * max(size_x - half - len(message), 0))


def print_rule(fill="-", quiet=False):
    if not quiet:
        print(fill * banner_width() + "\n")
