import hashlib
import logging

from matchstick.map_core import canonical_form, serialize_map
from matchstick.plugins.metadata.plugin_base import MetadataPlugin

logger = logging.getLogger(__name__)


class MapDigestMetadataPlugin(MetadataPlugin):
    metadata_name = "map_digest"
    default = False  # Not enabled by default.
    description = ("SHA-256 of the canonical text of the input map; equal exactly for orientation-preserving "
                   "isomorphic inputs, so mirror images usually differ.")

    def attach_metadata(self, metadata: dict) -> None:
        pmap = getattr(self.session, "pmap", None)
        if pmap is None:
            logger.debug("No input map, skipping map_digest")
            return
        text = serialize_map(canonical_form(pmap))
        metadata["map_digest"] = hashlib.sha256(text.encode("utf-8")).hexdigest()
