"""
roughflow - rough-path numerics and fast-slow averaging experiments.

Subpackages:
- tensor_core: level-2 group, cadlag rough paths, p-variation, Lyons extension
- mixing_gen: phi-mixing Markov sequences, exact covariances, suspension flows
- brownian: Brownian rough paths, rescaling, Euler-Maruyama lifts, LIL growth
- rde: Davie scheme, drift clocks, corrected diffusions, Lipschitz probe
- cm_opt: Cameron-Martin LIL constants
- avg_cli: experiment runners and the ``roughflow`` command line
"""

__version__ = "1.0.0"
