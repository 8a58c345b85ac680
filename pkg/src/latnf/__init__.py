"""latnf: desk-scale rigorous number-field sampling, S-unit and class
group computation, and provable lattice reduction."""

__version__ = "0.1.0"
