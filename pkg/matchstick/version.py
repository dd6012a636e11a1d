# matchstick/version.py
__tool_name__ = "matchstick"
__version__ = "1.0.0"
