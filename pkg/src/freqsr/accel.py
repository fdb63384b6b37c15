"""Kernel acceleration switch: numba @njit when available, pure-Python fallback.

Set FREQSR_NUMBA=0 to force the fallback path (the same kernel source runs
uncompiled). The flag is read once at import time; benchmarks/accel_compare.py
spawns subprocesses with the flag flipped to compare both paths.
"""
import os

_flag = os.environ.get("FREQSR_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "no", "off")

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USING_NUMBA = NUMBA_REQUESTED and HAVE_NUMBA

# The entropy kernels are 30x faster compiled, but the conv kernels lose to
# the BLAS-backed tensordot path (see benchmarks/accel_compare.py), so conv
# only uses the compiled loops when explicitly requested.
CONV_USE_NUMBA = (
    USING_NUMBA and os.environ.get("FREQSR_CONV_KERNEL", "numpy").strip().lower() == "numba"
)


def njit(func=None, *, inline=False):
    """Compile a hot kernel, or return it unchanged when acceleration is off.

    Kernels must be written in nopython-compatible numpy style so the exact
    same code runs on both paths. inline=True forces IR-level inlining for
    small helpers called once per decoded symbol.
    """

    def wrap(f):
        if not USING_NUMBA:
            return f
        opts = {"cache": True, "nogil": True}
        if inline:
            opts["inline"] = "always"
        return numba.njit(**opts)(f)

    return wrap if func is None else wrap(func)
