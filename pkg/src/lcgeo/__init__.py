"""lcgeo: conformal-geometric analysis of surfaces in the projective lightcone.

Surfaces of the (p,q)-sphere are represented by null lifts into R^{p+1,q+1};
the engine computes the central sphere congruence, the connection splitting,
the quadratic and quartic differentials, harmonicity residuals, and classifies
surfaces (Willmore / quasi-umbilic / space-form CMC / lightcone CMC branches)
with self-verifying structural identities.
"""

__version__ = "0.1.0"

from .linalg import AmbientSpace, Bivector, SubspaceFrame

__all__ = [
    "AmbientSpace",
    "Bivector",
    "SubspaceFrame",
    "__version__",
]
