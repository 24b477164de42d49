"""ergobreak: exact certificates for symmetry-breaking loss of ergodicity.

The package has three layers:

* exact rational geometry (``ratgeom``) — simplices, polytopes, barycentric
  coordinates, vertex enumeration and separation certificates, all over
  ``fractions.Fraction`` with zero tolerances;
* the map zoo — coupled torus maps (``torusmaps``), the symmetry-reduction
  pipeline onto the simplex (``reduction``), closed-form simplex restrictions
  (``simplexmaps``) and the constructive cyclic-expansion family with its
  certificate builder/checker (``asiup``);
* a floating-point lab (``dynlab``) for long orbits, permutahedron polar
  plots and orbit symmetry classification, backed by an optional compiled
  kernel with a pure-Python fallback.

The ``ergobreak`` CLI (see ``ergobreak.cli``) exposes every subsystem.
"""

__version__ = "0.1.0"
