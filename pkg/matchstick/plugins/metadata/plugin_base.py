from abc import ABC, abstractmethod
from typing import Any, Dict


class MetadataPlugin(ABC):
    def __init__(self, session=None):
        self.session = session

    @abstractmethod
    def attach_metadata(self, metadata: Dict[str, Any]) -> None:
        """Modify the report metadata in place by adding or changing entries."""
        pass
