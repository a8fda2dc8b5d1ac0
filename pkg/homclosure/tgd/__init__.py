from homclosure.tgd.decider import Certificate, SpoilerSketch, tgd_homclosed
from homclosure.tgd.rules import TgdRule, tgd_normalize

__all__ = ["Certificate", "SpoilerSketch", "TgdRule", "tgd_homclosed", "tgd_normalize"]
