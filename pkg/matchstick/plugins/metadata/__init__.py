"""
Metadata plugins for matchstick. Each plugin is a class that inherits from MetadataPlugin
and implements attach_metadata().
"""
