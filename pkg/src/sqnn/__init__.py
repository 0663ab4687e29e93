"""sqnn: simulators for squeezed-light photonic neural computing.

Two engines built on a shared Gaussian/Fock substrate:

* :mod:`sqnn.reservoir` -- a loop-based Gaussian quantum reservoir computer
  with squeezed-light input encoding, intracavity squeezing, homodyne
  readout and a ridge-trained linear output layer;
* :mod:`sqnn.memory` -- an associative memory built on a driven-dissipative
  nonlinear resonator whose metastable squeezed lobes store the patterns.
"""

__version__ = "0.1.0"
