"""Flat models of torsors over a discrete valuation ring of positive characteristic."""

from .coeffs import CoeffScalar
from .errors import *  # noqa: F401,F403
from .groebner import IdealPresentation, contains, eliminate, groebner_basis, ideal_equal, saturate
from .hopf import HopfAlgebra, blowup_group, builtin, regular_embedding, verify_hopf
from .poly import MonomialOrder, MultiPoly, parse
from .schemes import (AffineAlgebra, Section, algebra, flat_closure, generic_fiber, is_finite_over,
                      neron_blowup, section_lifts, special_fiber)
from .torsors import (TorsorPresentation, blowup_torsor, extend_torsor, is_trivial_special_fiber,
                      m_torsor_from, m_torsor_roundtrip, standard_torsor, verify_torsor)

__version__ = "0.1.0"
