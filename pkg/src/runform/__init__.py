"""Running-form comparison engine.

Compares an amateur runner's skeletal motion against an expert exemplar,
locates significant per-body-part differences through a declarative
biomechanical-attribute language, and produces corrective keyframe
animations with suggested viewing directions.
"""

__version__ = "0.1.0"
