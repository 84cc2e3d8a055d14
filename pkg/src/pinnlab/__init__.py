"""pinnlab: a desk-scale PDE-solver laboratory.

Neural-network surrogates with analytic derivative jets, trainable Fourier
basis layers with adaptive pruning, strong boundary-condition variants, a
finite-difference reference solver, spectral analysis tools, and a CLI
harness for reproducible benchmark runs.
"""

__version__ = "0.1.0"
