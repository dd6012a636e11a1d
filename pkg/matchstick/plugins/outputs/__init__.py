"""
Output plugins for matchstick. Each plugin subclasses OutputPlugin and renders
a Report in its own format.
"""
