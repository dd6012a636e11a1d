import logging

from matchstick.map_core import canonical_form, serialize_map
from matchstick.plugins.metadata.plugin_base import MetadataPlugin

logger = logging.getLogger(__name__)


class CanonicalMapMetadataPlugin(MetadataPlugin):
    metadata_name = "canonical_map"
    default = False
    description = "The input map relabelled to its canonical form, in map file syntax."

    def attach_metadata(self, metadata: dict) -> None:
        pmap = getattr(self.session, "pmap", None)
        if pmap is None:
            return
        metadata["canonical_map"] = serialize_map(canonical_form(pmap))
