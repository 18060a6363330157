"""Exact zero-sum invariants of finite abelian groups.

Compute Davenport-type invariants (Davenport constant, small Davenport
constant, Olson-type constants with repeat budgets, and their strong
variants) by exhaustive pruned search, construct explicit lower-bound
witness multisets, and independently verify any witness certificate.
"""

from .groups import Element, GroupSpec, add, dstar, make_group, neg, order_of, scale
from .zseq import (
    Certificate,
    CertificateFormatError,
    Claims,
    Verdict,
    ZSeq,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "Element",
    "GroupSpec",
    "make_group",
    "add",
    "neg",
    "scale",
    "order_of",
    "dstar",
    "ZSeq",
    "Claims",
    "Certificate",
    "CertificateFormatError",
    "Verdict",
    "verify",
    "__version__",
]
