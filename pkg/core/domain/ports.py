from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from core.algebra.exactlin import Subspace
from core.algebra.polynomials import MultiPoly

from .models import (ActionPointData, FormFamily, PolyKVector, PolySection,
                     TrialOutcome)


class StoragePort(ABC):
    """Port for reading inputs and persisting reports"""

    @abstractmethod
    def load_structure(self, source: Any) -> FormFamily:
        """Decode a form family from a path or a parsed JSON object"""
        pass

    @abstractmethod
    def load_subspace(self, source: Any) -> Subspace:
        pass

    @abstractmethod
    def load_action(self, source: Any) -> ActionPointData:
        pass

    @abstractmethod
    def load_polynomial(self, source: Any) -> MultiPoly:
        pass

    @abstractmethod
    def load_section(self, source: Any) -> PolySection:
        pass

    @abstractmethod
    def load_kvector(self, source: Any) -> PolyKVector:
        pass

    @abstractmethod
    async def save_report(self, name: str, report: Dict[str, Any]) -> Optional[str]:
        """Persist a report under the storage root, returning its path"""
        pass

    @abstractmethod
    async def export_to_file(self, data: Any, filepath: str) -> None:
        """Export data to file"""
        pass


class LoggingPort(ABC):
    """Port for per-trial campaign logging"""

    @abstractmethod
    def start_trial(self, property_id: str, trial: int, seed: int) -> Dict[str, Any]:
        pass

    @abstractmethod
    def end_trial(self, context: Dict[str, Any], outcome: TrialOutcome) -> Any:
        pass

    @abstractmethod
    def generate_report(self, property_id: Optional[str] = None) -> Dict[str, Any]:
        pass
