"""Kernel backend selection.

The compiled extension ``cliffadapt._kernels`` provides the hot loops; the
pure-numpy module ``cliffadapt._kernels_py`` is a drop-in fallback.  Set
``CLIFFADAPT_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
by CI runs without a compiler).
"""

from __future__ import annotations

import os

if os.environ.get("CLIFFADAPT_PURE_PYTHON", "0") == "1":
    from . import _kernels_py as impl
else:
    try:
        from . import _kernels as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as impl

BACKEND: str = impl.BACKEND

apply_1q = impl.apply_1q
apply_cnot = impl.apply_cnot
apply_rzz = impl.apply_rzz
pauli_expval = impl.pauli_expval
stab_amplitude = impl.stab_amplitude
batch_stab_dense_accum = impl.batch_stab_dense_accum
batch_anchor_h = impl.batch_anchor_h
batch_anchor_rot = impl.batch_anchor_rot
