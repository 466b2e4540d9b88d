"""2D Lame eigenfunction radial-wave calculus, verified at desk scale.

Subpackages cover the self-contained Bessel machinery (`specfun`), field and
gradient evaluation from truncated radial expansions (`field`), boundary
traces on line segments (`traces`), coefficient constraint systems and their
nullspace cascades (`constraints`), complex-geometrical-optics sector
integrals (`cgo`), and the plane-wave / grating data model (`scattering`).
"""

from lamewave.field import FourierCoefficients, LameMedium, PolarPoint

__all__ = ["LameMedium", "FourierCoefficients", "PolarPoint"]
__version__ = "0.1.0"
