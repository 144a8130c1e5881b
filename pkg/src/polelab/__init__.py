"""polelab: numerical checks of magnetic-pole quantization with a massive photon.

Submodules:
    fields        screened electric fields, pole fields, tube potentials
    gauge         two-patch potentials, loop holonomy, the winding condition
    angmom        field angular momentum of a charge-pole pair
    interference  lattice wave propagation past a flux line
    vortex        abelian-Higgs flux tubes, tension, confinement
    cli           command-line front end
"""

__version__ = "0.1.0"
