"""Kernel backend selection.

The hot scalar kernels exist twice: a compiled Cython extension
(``_speed``) and a pure-Python reference (``_pure``).  The compiled one is
picked when importable; set ``CPT_SENSE_BACKEND=python`` or ``=compiled``
to force a choice (``compiled`` raises if the extension is missing).
``benchmarks/compare_backends.py`` measures the difference.
"""

import os

_requested = os.environ.get("CPT_SENSE_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "compiled", "python"):
    raise ValueError(
        "CPT_SENSE_BACKEND must be 'auto', 'compiled' or 'python', got %r" % _requested)

if _requested == "python":
    from cpt_sense._core import _pure as _impl
else:
    try:
        from cpt_sense._core import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "CPT_SENSE_BACKEND=compiled but the compiled kernels are not "
                "built; install with the Cython extension or use the python "
                "backend")
        from cpt_sense._core import _pure as _impl  # type: ignore[no-redef]

BACKEND = "compiled" if _impl.__name__.endswith("_speed") else "python"

EXP_CLAMP = _impl.EXP_CLAMP
prelec_weight = _impl.prelec_weight
cpt_value = _impl.cpt_value
rank_weights = _impl.rank_weights
acceptance_from_utilities = _impl.acceptance_from_utilities
bestcase_revenue = _impl.bestcase_revenue
bestcase_revenue_gradient = _impl.bestcase_revenue_gradient
bestcase_partials = _impl.bestcase_partials


def backend_name():
    """Name of the kernel implementation in use: 'compiled' or 'python'."""
    return BACKEND
