from homclosure.tools.homclosure_tool import HomclosureTool

__all__ = ["HomclosureTool"]
