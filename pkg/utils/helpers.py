"""
Utility helpers for mpspec
"""

import functools
import inspect
import logging
import math

import numpy as np

from config.settings import FLOAT_DIGITS

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


class SplitMix64:
    """
    Seeded 64-bit generator (splitmix64), reproducible across platforms.

    state += 0x9E3779B97F4A7C15; z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
    return z ^ (z >> 31)
    """

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, lo=0.0, hi=1.0):
        """Float in [lo, hi) from the top 53 bits."""
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0 ** -53)

    def integer(self, lo, hi):
        """Integer in [lo, hi] inclusive."""
        return lo + self.next_u64() % (hi - lo + 1)

    def uniforms(self, count, lo=0.0, hi=1.0):
        return np.array([self.uniform(lo, hi) for _ in range(count)])


def refine_on(exceptions, param, factor=2, max_attempts=3):
    """
    Decorator to retry a numerical routine with a finer resolution.

    The parameter is resolved through the function signature, so a default
    value refines too. The next value is the larger of `suggested_n` on the
    exception and the current value times factor.

    Args:
        exceptions: Exception types that signal insufficient resolution
        param: Argument enlarged between attempts
        factor: Refinement factor when the exception suggests nothing
        max_attempts: Maximum attempts including the first
    """
    def decorator(func):
        signature = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            bound = signature.bind(*args, **kwargs)
            bound.apply_defaults()
            last_exception = None

            for attempt in range(max_attempts):
                try:
                    return func(*bound.args, **bound.kwargs)
                except exceptions as e:
                    last_exception = e
                    current = bound.arguments.get(param)
                    if attempt == max_attempts - 1 or current is None:
                        break
                    suggested = getattr(e, "suggested_n", None)
                    bound.arguments[param] = type(current)(max(suggested or 0, current * factor))
                    logger.debug("%s: retrying with %s=%s", func.__name__, param, bound.arguments[param])

            raise last_exception

        return wrapper
    return decorator


def format_float(value):
    """
    Format a float for reports.

    Args:
        value: Number, bool or None

    Returns:
        str: 17 significant digits for floats; ints and bools as-is
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{FLOAT_DIGITS}g}"
    return str(value)


def parse_grid(text, kind=float):
    """
    Parse a comma-separated grid; "a,b,...,c" expands to a geometric
    progression when b/a is an integer ratio that reaches c, otherwise to
    an arithmetic one.

    Args:
        text: Grid text such as "8,16,...,512" or "1,1.5,2"
        kind: int or float

    Returns:
        list: Parsed grid values
    """
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if "..." not in parts:
        return [kind(p) for p in parts]
    idx = parts.index("...")
    if idx < 2 or idx != len(parts) - 2:
        raise ValueError(f"cannot expand grid '{text}'")
    head = [kind(p) for p in parts[:idx]]
    a, b, end = head[-2], head[-1], kind(parts[-1])
    out = head[:-2]
    if a > 0 and b > a and float(b / a).is_integer():
        ratio = b / a
        steps = math.log(end / a) / math.log(ratio)
        if abs(steps - round(steps)) < 1e-9:
            return out + [kind(a * ratio ** i) for i in range(int(round(steps)) + 1)]
    step = b - a
    if step <= 0:
        raise ValueError(f"cannot expand grid '{text}'")
    count = int(math.floor((end - a) / step + 1e-9)) + 1
    return out + [kind(a + i * step) for i in range(count)]
