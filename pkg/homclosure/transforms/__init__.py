from homclosure.transforms.coloring import coloring, homclosure_witness
from homclosure.transforms.labels import tr_n
from homclosure.transforms.relativize import relativize
from homclosure.transforms.second_order import eso_fin_wrap, so_shom, so_sup
from homclosure.transforms.spoilers import SpoilerKind, spoiler_construction, spoiler_search

__all__ = [
    "SpoilerKind",
    "coloring",
    "eso_fin_wrap",
    "homclosure_witness",
    "relativize",
    "so_shom",
    "so_sup",
    "spoiler_construction",
    "spoiler_search",
    "tr_n",
]
