from homclosure.capture.builder import CaptureResult, build_capture
from homclosure.capture.eafo import eafo_homclosure
from homclosure.capture.lfp import lfp_translate, lfp_translate_capture

__all__ = ["CaptureResult", "build_capture", "eafo_homclosure", "lfp_translate", "lfp_translate_capture"]
