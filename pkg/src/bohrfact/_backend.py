"""Select the compiled kernel module when available, else the numpy fallback.

Set ``BOHRFACT_BACKEND=python`` to force the fallback.
"""
import os

from bohrfact import _pycore

if os.environ.get("BOHRFACT_BACKEND", "").lower() == "python":
    impl = _pycore
    NAME = "python"
else:
    try:
        from bohrfact import _core as impl  # type: ignore[attr-defined]

        NAME = "cython"
    except ImportError:
        impl = _pycore
        NAME = "python"

cauchy_product = impl.cauchy_product
kernel_abs_integral = impl.kernel_abs_integral
kernel_modulus = impl.kernel_modulus
