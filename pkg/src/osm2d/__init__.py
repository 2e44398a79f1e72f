"""Orthogonality sampling imaging for limited-aperture scattering data.

Synthesize or ingest bistatic ring measurements, compute single-source,
summed, and multi-source indicator maps together with their analytic
Bessel-series structures, and score reconstructions with the Jaccard index.
"""

from .errors import (AmbiguityError, BoundNotApplicableError, ConfigError,
                     CoverageError, DegenerateMapError, DomainError,
                     InvalidInputError, InvalidSceneError, OSM2DError,
                     ParseError, PeakCountError, StructureError)
from .forward import (MeasurementSet, Scatterer, Scene, add_noise, born_field,
                      fresnel_two_disk_scene, green, load_measurements_csv,
                      quadrature_field, save_measurements_csv)
from .fresnel_io import (DEFAULT_COLUMNS, ColumnMap, FresnelRecord, assemble,
                         parse_file, write_file)
from .geometry import (EPSILON_0, MU_0, ArrayGeometry, Frequency, Medium,
                       emitter_angle, emitter_position, emitter_positions,
                       receiver_angle, receiver_position, receiver_positions,
                       wavelength, wavenumber)
from .imaging import (ComplexFieldMap, ImagingGrid, IndicatorMap,
                      analytic_multi_map, analytic_single_map, load_map_csv,
                      mosm_map, normalize, osm_map, osmm_map, phi_map,
                      save_map_csv, save_map_pgm)
from .metrics import (DEFAULT_PROMINENCE, DEFAULT_THRESHOLDS, PeakSet,
                      TruthMask, find_peaks, jaccard, jaccard_sweep,
                      localization_error, resolvable, truth_mask)
from .specfun import (EULER_MASCHERONI, SeriesTruncation, bessel_j, d1_curve,
                      d2_curve, default_truncation, disturb_factor_E,
                      hankel1_0, jacobi_anger_arc, multi_factor_M,
                      sidelobe_bound_E, sidelobe_bound_M)

__version__ = "0.1.0"
