"""Developer-side fixture exporter.

Computes number-field data (integral basis, class group with verified
principal generators, units, prime splittings) and emits the fixture
JSON consumed by the main package's general-field backend.  Fixtures are
build-time inputs committed to the repository; nothing at runtime ever
imports this package.

Backends: `native` (built-in engine: maximal orders and prime splitting
via sympy, relation search with an analytic class-number-formula
certificate, exact unit expansion) and `cypari` (a real PARI/GP bridge,
used when cypari2 is importable).
"""

__version__ = "0.1.0"
