"""catdb: databases as diagrams of tables over finite shape categories.

Joins are limits, sums are colimits, and every universal construction ships
with a brute-force oracle so the algebra can be checked at desk scale.
"""

__version__ = "0.1.0"
