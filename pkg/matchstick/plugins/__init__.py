"""
Plugin system for matchstick output formats and report metadata.
"""
