"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The compiled extension (Cython) is preferred; when it is unavailable the
NumPy reference implementation is used instead. Set ``CCI_TOOLKIT_BACKEND``
to ``python`` or ``compiled`` to force a choice (``compiled`` raises if the
extension was not built).
"""

from __future__ import annotations

import os

_forced = os.environ.get("CCI_TOOLKIT_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _pyref as _impl
elif _forced == "compiled":
    from . import _fast as _impl  # type: ignore[no-redef]
elif _forced:
    raise ValueError(
        f"CCI_TOOLKIT_BACKEND must be 'python' or 'compiled', got {_forced!r}"
    )
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pyref as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND_NAME
var_recursion = _impl.var_recursion
fit_var_ls = _impl.fit_var_ls


def get_backend(name: str):
    """Return a specific backend module, for benchmarks and equivalence tests."""
    if name == "python":
        from . import _pyref

        return _pyref
    if name == "compiled":
        from . import _fast

        return _fast
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> tuple[str, ...]:
    try:
        from . import _fast  # noqa: F401
    except ImportError:
        return ("python",)
    return ("python", "compiled")
