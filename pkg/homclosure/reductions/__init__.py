from homclosure.reductions.dominoes import DominoSystem, PeriodicTilingSpec, bounded_tiling, periodic_tiling
from homclosure.reductions.grid import grid_sentence, mdtgd_variant, tiling_sentence
from homclosure.reductions.sat3 import Sat3Instance, sat3_gadget

__all__ = [
    "DominoSystem",
    "PeriodicTilingSpec",
    "Sat3Instance",
    "bounded_tiling",
    "grid_sentence",
    "mdtgd_variant",
    "periodic_tiling",
    "sat3_gadget",
    "tiling_sentence",
]
